"""Spreading speeds of the limiting systems from their linearisations at zero.

For a decay rate ``nu`` the time-1 linear map acting on ``phi * exp(-nu x)``
has a principal eigenvalue ``lambda(nu)``; the speed is
``c* = inf_{nu > 0} log(lambda(nu)) / nu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError
from .models import CooperativeModel, ScalarShiftModel, _side, limit_jacobian

NU_MIN = 1e-3
NU_MAX = 50.0
N_SCAN = 200
GOLDEN_TOL = 1e-8


@dataclass(frozen=True)
class CharacteristicParams:
    """Linear delayed equation ``v' = a v + b v(t - tau)``."""

    a: float
    b: float
    tau: float

    def __post_init__(self) -> None:
        if self.b < 0:
            raise ValueError("b must be nonnegative")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")


def principal_root(p: CharacteristicParams) -> float:
    """Unique real root of ``z = a + b exp(-z tau)``.

    ``g(z) = z - a - b exp(-z tau)`` is strictly increasing, so bisection on an
    expanding bracket is safe. ``g(a) <= 0`` always holds.
    """
    a, b, tau = p.a, p.b, p.tau
    if b == 0.0 or tau == 0.0:
        return a + b

    def g(z: float) -> float:
        return z - a - b * math.exp(-z * tau)

    lo = a
    step = max(1.0, abs(b))
    hi = a + step
    while g(hi) < 0:
        lo, hi = hi, hi + step
        step *= 2.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    z = lo if abs(g(lo)) <= abs(g(hi)) else hi
    # one Newton polish; g' = 1 + b tau e^{-z tau} >= 1
    z_new = z - g(z) / (1.0 + b * tau * math.exp(-z * tau))
    return z_new if abs(g(z_new)) < abs(g(z)) else z


def characteristic_params(model: ScalarShiftModel, side: str, nu: float) -> CharacteristicParams:
    return CharacteristicParams(a=model.d * nu * nu - model.mu,
                                b=model.mu * limit_jacobian(model, side), tau=model.tau)


def log_lambda_scalar(model: ScalarShiftModel, side: str, nu: float) -> float:
    return principal_root(characteristic_params(model, side, nu))


def lambda_scalar(model: ScalarShiftModel, side: str, nu: float) -> float:
    if nu <= 0:
        raise ValueError("nu must be positive")
    return math.exp(log_lambda_scalar(model, side, nu))


def matrix_exp(A) -> np.ndarray:
    """``exp(A)`` by scaling and squaring with a truncated Taylor series."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix_exp needs a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    B = A / (2.0 ** s)
    E = np.eye(n)
    term = np.eye(n)
    for k in range(1, 40):
        term = term @ B / k
        E = E + term
        if np.max(np.abs(term)) <= 1e-18 * np.max(np.abs(E)):
            break
    for _ in range(s):
        E = E @ E
    return E


def perron(P, tol: float = 1e-12, max_iter: int = 100_000) -> tuple[float, np.ndarray]:
    """Perron root and positive eigenvector (``max v = 1``) of a nonnegative irreducible matrix.

    Power iteration runs on ``P + I``, which is primitive whenever ``P`` is
    irreducible, so periodic matrices converge too.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("perron needs a square matrix")
    if np.any(P < 0):
        raise ValueError("perron needs a nonnegative matrix")
    if not np.any(P):
        raise NumericError("zero matrix has no Perron root")
    n = P.shape[0]
    scale = np.max(np.abs(P))
    Q = P / scale + np.eye(n)
    v = np.ones(n)
    for _ in range(max_iter):
        w = Q @ v
        v = w / np.max(w)
        Pv = P @ v
        rho = float(np.dot(Pv, v) / np.dot(v, v))
        if np.max(np.abs(Pv - rho * v)) < tol * rho:
            if np.any(v <= 0):
                raise NumericError("Perron vector not strictly positive (matrix reducible?)")
            return rho, v
    raise NumericError("power iteration did not converge")


def log_lambda_matrix(model: CooperativeModel, side: str, nu: float) -> tuple[float, np.ndarray]:
    """``log rho(exp(A + nu^2 D))`` and its Perron vector.

    The diagonal shift ``sigma`` is factored out before exponentiating so that
    large ``nu`` does not overflow: ``rho(exp(B)) = e^sigma rho(exp(B - sigma I))``.
    """
    A = limit_jacobian(model, side)
    B = A + nu * nu * np.diag(model.diffusivities)
    sigma = float(np.max(np.diag(B)))
    rho, v = perron(matrix_exp(B - sigma * np.eye(B.shape[0])))
    return sigma + math.log(rho), v


def lambda_matrix(model: CooperativeModel, side: str, nu: float) -> float:
    return math.exp(log_lambda_matrix(model, side, nu)[0])


@dataclass
class SpeedReport:
    side: str
    c_star: float
    nu_star: float
    nus: np.ndarray
    log_lambdas: np.ndarray
    perron_vector: np.ndarray | None = None
    frame_speeds: tuple[float, float] | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def lambdas(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_lambdas)

    @property
    def phis(self) -> np.ndarray:
        return self.log_lambdas / self.nus

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.nus.tolist(), self.lambdas.tolist()))

    def to_csv(self) -> str:
        lines = ["nu,lambda,phi"]
        for nu, lam, phi in zip(self.nus, self.lambdas, self.phis):
            lines.append(f"{nu:.17g},{lam:.17g},{phi:.17g}")
        return "\n".join(lines) + "\n"


def _golden(fun, a: float, b: float, tol: float) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def spreading_speed(model, side: str) -> SpeedReport:
    """Minimise ``log lambda(nu) / nu``: log-spaced scan then golden-section refinement."""
    side = _side(side)
    if isinstance(model, ScalarShiftModel):
        def loglam(nu):
            return log_lambda_scalar(model, side, nu)

        if model.b(side) <= 1.0:
            raise NumericError("zero is not unstable for this limit (f'(0) <= 1): c* would be 0")
    else:
        def loglam(nu):
            return log_lambda_matrix(model, side, nu)[0]

        A = limit_jacobian(model, side)
        if np.max(np.linalg.eigvals(A).real) <= 0:
            raise NumericError("s(A) <= 0: zero is not unstable for this limit")

    nus = np.geomspace(NU_MIN, NU_MAX, N_SCAN)
    logs = np.array([loglam(nu) for nu in nus])
    if np.any(~np.isfinite(logs)):
        raise NumericError("non-finite lambda in the scan")
    phis = logs / nus
    k = int(np.argmin(phis))
    if k == N_SCAN - 1:
        raise NumericError("minimizer outside bracket; extend nu range")
    flags = []
    slope_sign = np.sign(np.diff(phis))
    slope_sign = slope_sign[slope_sign != 0]
    if np.count_nonzero(np.diff(slope_sign)) > 1:
        flags.append("phi not unimodal on the scan range")
    lo = nus[max(k - 1, 0)]
    hi = nus[min(k + 1, N_SCAN - 1)]
    nu_star = _golden(lambda nu: loglam(nu) / nu, lo, hi, GOLDEN_TOL)
    c_star = float(loglam(nu_star) / nu_star)
    if c_star <= 0:
        raise NumericError("non-positive spreading speed")
    vec = None
    if isinstance(model, CooperativeModel):
        vec = log_lambda_matrix(model, side, nu_star)[1]
    return SpeedReport(side=side, c_star=c_star, nu_star=nu_star, nus=nus, log_lambdas=logs,
                       perron_vector=vec, flags=flags)


@dataclass(frozen=True)
class FrameSpeeds:
    rightward: float
    leftward: float
    comoving_rightward: float
    comoving_leftward: float


def lab_frame_speeds(model, report_plus: SpeedReport, report_minus: SpeedReport) -> FrameSpeeds:
    """Lab-frame front speeds and their comoving-frame counterparts."""
    c = float(getattr(model, "c", 0.0))
    return FrameSpeeds(rightward=report_plus.c_star, leftward=report_minus.c_star,
                       comoving_rightward=report_plus.c_star - c,
                       comoving_leftward=report_minus.c_star + c)


@dataclass(frozen=True)
class Speeds:
    """The pair ``c*(+inf), c*(-inf)`` used by the verdicts."""

    plus: float
    minus: float

    @classmethod
    def of(cls, model) -> "Speeds":
        return cls(float(spreading_speed(model, "+").c_star), float(spreading_speed(model, "-").c_star))
