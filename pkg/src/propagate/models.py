"""Model definitions for the delayed scalar equation with a shifting habitat
and for cooperative asymptotically homogeneous systems.

Scalar model, lab frame::

    u_t = d u_xx - mu u + mu f(x - c t, u(t - tau, x))

Cooperative system::

    u_t = D u_xx + f(x, u)

Classical growth terms g(u) are encoded as ``f = u + g/mu`` so that the
scalar equation keeps the ``-mu u + mu f`` form.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .errors import ConfigError, NumericError

VIOLATION_TOL = 1e-8
FD_STEP = 1e-6


def _tanh_profile(lo: float, hi: float, w: float) -> Callable[[np.ndarray], np.ndarray]:
    def beta(s):
        return lo + (hi - lo) * 0.5 * (1.0 + np.tanh(np.asarray(s, dtype=float) / w))

    return beta


@dataclass(frozen=True)
class ScalarShiftModel:
    d: float
    mu: float
    tau: float
    c: float
    f: Callable
    f_plus: Callable
    f_minus: Callable
    b_plus: float
    b_minus: float
    u_star_plus: float
    u_star_minus: float
    cap: float
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    df_du: Callable | None = None
    width: float = 1.0
    monotone: bool = False
    subhomogeneous: bool = False

    n_components = 1

    @property
    def diffusivities(self) -> np.ndarray:
        return np.array([self.d])

    def limit(self, side: str) -> Callable:
        return self.f_plus if _side(side) == "+" else self.f_minus

    def u_star(self, side: str) -> float:
        return self.u_star_plus if _side(side) == "+" else self.u_star_minus

    def b(self, side: str) -> float:
        return self.b_plus if _side(side) == "+" else self.b_minus

    def dfdu(self, s, u):
        if self.df_du is not None:
            return self.df_du(s, u)
        return (self.f(s, u + FD_STEP) - self.f(s, u - FD_STEP)) / (2 * FD_STEP)

    def replace(self, **changes) -> "ScalarShiftModel":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class CooperativeModel:
    N: int
    D: np.ndarray
    f: Callable
    f_plus: Callable
    f_minus: Callable
    A_plus: np.ndarray
    A_minus: np.ndarray
    M: np.ndarray
    u_star_plus: np.ndarray
    u_star_minus: np.ndarray
    alpha0: float
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    jac: Callable | None = None
    width: float = 1.0

    c = 0.0
    tau = 0.0
    monotone = True
    subhomogeneous = True

    @property
    def n_components(self) -> int:
        return self.N

    @property
    def diffusivities(self) -> np.ndarray:
        return np.asarray(self.D, dtype=float)

    @property
    def cap(self) -> np.ndarray:
        return self.M

    def limit(self, side: str) -> Callable:
        return self.f_plus if _side(side) == "+" else self.f_minus

    def u_star(self, side: str) -> np.ndarray:
        return self.u_star_plus if _side(side) == "+" else self.u_star_minus

    def jacobian(self, x, u) -> np.ndarray:
        """Jacobian ``(N, N, ...)`` at points ``x`` and states ``u`` of shape ``(N, ...)``."""
        if self.jac is not None:
            return self.jac(x, u)
        return _fd_jacobian(lambda v: self.f(x, v), np.asarray(u, dtype=float))


def _side(side: str) -> str:
    s = str(side).strip().lower()
    if s in ("+", "plus", "right", "+inf"):
        return "+"
    if s in ("-", "minus", "left", "-inf"):
        return "-"
    raise ValueError(f"side must be plus or minus, got {side!r}")


def _fd_jacobian(fun: Callable, u: np.ndarray) -> np.ndarray:
    N = u.shape[0]
    cols = []
    for j in range(N):
        e = np.zeros_like(u)
        e[j] = FD_STEP
        cols.append((np.asarray(fun(u + e)) - np.asarray(fun(u - e))) / (2 * FD_STEP))
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------- built-ins

def builtin_shifted_logistic(beta_minus: float, beta_plus: float, w: float = 1.0, mu: float = 3.0,
                             d: float = 1.0, tau: float = 0.0, c: float = 0.0) -> ScalarShiftModel:
    """Logistic growth ``u (beta(s) - u)`` with a tanh habitat quality ``beta``."""
    if not 0 < beta_minus < beta_plus:
        raise ConfigError("need 0 < beta_minus < beta_plus")
    if w <= 0 or d <= 0 or mu <= 0 or tau < 0:
        raise ConfigError("need w > 0, d > 0, mu > 0, tau >= 0")
    if not beta_plus < mu + beta_minus:
        raise ConfigError("box invariance needs beta_plus < mu + beta_minus")
    if not mu >= 2 * beta_plus - beta_minus:
        raise ConfigError("monotonicity needs mu >= 2*beta_plus - beta_minus")
    beta = _tanh_profile(beta_minus, beta_plus, w)

    def f(s, u):
        return u + u * (beta(s) - u) / mu

    def df_du(s, u):
        return 1.0 + (beta(s) - 2.0 * u) / mu

    return ScalarShiftModel(
        d=d, mu=mu, tau=tau, c=c, f=f,
        f_plus=lambda u: u + u * (beta_plus - u) / mu,
        f_minus=lambda u: u + u * (beta_minus - u) / mu,
        b_plus=1.0 + beta_plus / mu, b_minus=1.0 + beta_minus / mu,
        u_star_plus=beta_plus, u_star_minus=beta_minus, cap=beta_plus,
        kind="shifted_logistic",
        params=dict(beta_minus=beta_minus, beta_plus=beta_plus, w=w, mu=mu, d=d, tau=tau, c=c),
        df_du=df_du, width=w, monotone=True, subhomogeneous=True,
    )


def builtin_fisher(d: float = 1.0, r: float = 1.0, mu: float = 1.0, tau: float = 0.0,
                   c: float = 0.0) -> ScalarShiftModel:
    """Homogeneous Fisher-KPP ``u_t = d u_xx + r u (1 - u)``; c* = 2 sqrt(d r) when tau = 0."""
    if d <= 0 or r <= 0 or mu <= 0 or tau < 0:
        raise ConfigError("need d, r, mu > 0 and tau >= 0")
    if mu < r:
        raise ConfigError("monotonicity on [0,1] needs mu >= r")

    def f_hom(u):
        return u + r * u * (1.0 - u) / mu

    return ScalarShiftModel(
        d=d, mu=mu, tau=tau, c=c,
        f=lambda s, u: f_hom(u) + 0.0 * np.asarray(s, dtype=float),
        f_plus=f_hom, f_minus=f_hom,
        b_plus=1.0 + r / mu, b_minus=1.0 + r / mu,
        u_star_plus=1.0, u_star_minus=1.0, cap=1.0, kind="fisher",
        params=dict(d=d, r=r, mu=mu, tau=tau, c=c),
        df_du=lambda s, u: 1.0 + r * (1.0 - 2.0 * u) / mu + 0.0 * np.asarray(s, dtype=float),
        monotone=True, subhomogeneous=True,
    )


def builtin_shifted_ricker(p_minus: float, p_plus: float, w: float = 1.0, mu: float = 1.0,
                           d: float = 1.0, tau: float = 0.0, c: float = 0.0) -> ScalarShiftModel:
    """Ricker birth function ``p(s) u exp(-u)``; not monotone once ``p_plus > e``."""
    if not 1.0 < p_minus < p_plus < math.e ** 2:
        raise ConfigError("period-two uniqueness not guaranteed: need 1 < p_minus < p_plus < e^2")
    if w <= 0 or d <= 0 or mu <= 0 or tau < 0:
        raise ConfigError("need w > 0, d > 0, mu > 0, tau >= 0")
    p = _tanh_profile(p_minus, p_plus, w)
    cap = max(p_plus / math.e, math.log(p_plus))
    return ScalarShiftModel(
        d=d, mu=mu, tau=tau, c=c,
        f=lambda s, u: p(s) * u * np.exp(-u),
        f_plus=lambda u: p_plus * u * np.exp(-u),
        f_minus=lambda u: p_minus * u * np.exp(-u),
        b_plus=p_plus, b_minus=p_minus,
        u_star_plus=math.log(p_plus), u_star_minus=math.log(p_minus), cap=cap,
        kind="shifted_ricker",
        params=dict(p_minus=p_minus, p_plus=p_plus, w=w, mu=mu, d=d, tau=tau, c=c),
        df_du=lambda s, u: p(s) * np.exp(-u) * (1.0 - u),
        width=w, monotone=cap <= 1.0, subhomogeneous=True,
    )


def tabulated_scalar_model(s_nodes, u_nodes, table, mu: float, d: float, tau: float = 0.0,
                           c: float = 0.0, cap: float | None = None) -> ScalarShiftModel:
    """Reaction given on an (s, u) table, bilinear in between.

    ``s`` is clamped to the table range (the end rows are the limits f_±);
    ``u`` is extrapolated linearly.
    """
    s_nodes = np.asarray(s_nodes, dtype=float)
    u_nodes = np.asarray(u_nodes, dtype=float)
    table = np.asarray(table, dtype=float)
    if table.shape != (s_nodes.size, u_nodes.size):
        raise ConfigError("table shape must be (len(s_nodes), len(u_nodes))")
    if np.any(np.diff(s_nodes) <= 0) or np.any(np.diff(u_nodes) <= 0):
        raise ConfigError("table nodes must be strictly increasing")

    def f(s, u):
        s, u = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(u, dtype=float))
        sc = np.clip(s, s_nodes[0], s_nodes[-1])
        i = np.clip(np.searchsorted(s_nodes, sc, side="right") - 1, 0, s_nodes.size - 2)
        ws = (sc - s_nodes[i]) / (s_nodes[i + 1] - s_nodes[i])
        j = np.clip(np.searchsorted(u_nodes, u, side="right") - 1, 0, u_nodes.size - 2)
        wu = (u - u_nodes[j]) / (u_nodes[j + 1] - u_nodes[j])
        return ((1 - ws) * ((1 - wu) * table[i, j] + wu * table[i, j + 1])
                + ws * ((1 - wu) * table[i + 1, j] + wu * table[i + 1, j + 1]))

    f_plus = lambda u: f(s_nodes[-1], u)  # noqa: E731
    f_minus = lambda u: f(s_nodes[0], u)  # noqa: E731
    cap = float(u_nodes[-1]) if cap is None else float(cap)
    b_plus = float((f_plus(FD_STEP) - f_plus(-FD_STEP)) / (2 * FD_STEP))
    b_minus = float((f_minus(FD_STEP) - f_minus(-FD_STEP)) / (2 * FD_STEP))
    model = ScalarShiftModel(
        d=d, mu=mu, tau=tau, c=c, f=f, f_plus=f_plus, f_minus=f_minus,
        b_plus=b_plus, b_minus=b_minus, u_star_plus=float("nan"), u_star_minus=float("nan"),
        cap=cap, kind="tabulated",
        params=dict(mu=mu, d=d, tau=tau, c=c, s_range=[float(s_nodes[0]), float(s_nodes[-1])]),
        width=max(1.0, (s_nodes[-1] - s_nodes[0]) / 100.0),
        monotone=bool(np.all(np.diff(table, axis=1) >= -VIOLATION_TOL)),
        subhomogeneous=False,
    )
    model = model.replace(u_star_plus=positive_equilibrium(model, "+"),
                          u_star_minus=positive_equilibrium(model, "-"))
    # subhomogeneity is checked on the table itself, not assumed
    alphas = np.linspace(0.0, 1.0, 21)[:, None, None]
    ss = s_nodes[None, :, None]
    uu = u_nodes[None, None, :]
    sub = np.all(f(ss, alphas * uu) - alphas * f(ss, uu) >= -VIOLATION_TOL)
    return model.replace(subhomogeneous=bool(sub))


def builtin_cooperative_pair(beta1, beta2, kappa: float, w: float = 1.0,
                             D=(1.0, 1.0)) -> CooperativeModel:
    """Two logistic species coupled by symmetric migration ``kappa (u_j - u_i)``.

    ``beta1`` and ``beta2`` are either constants or ``(minus, plus)`` limit pairs
    joined by a tanh profile of width ``w``.
    """
    b1 = tuple(beta1) if np.ndim(beta1) else (float(beta1), float(beta1))
    b2 = tuple(beta2) if np.ndim(beta2) else (float(beta2), float(beta2))
    if kappa <= 0:
        raise ConfigError("kappa must be > 0 (kappa = 0 makes the Jacobian reducible)")
    if min(b1 + b2) <= 0:
        raise ConfigError("beta limits must be positive")
    D = np.asarray(D, dtype=float)
    if D.shape != (2,) or np.any(D <= 0):
        raise ConfigError("D must hold two positive diffusivities")
    beta_1 = _tanh_profile(b1[0], b1[1], w)
    beta_2 = _tanh_profile(b2[0], b2[1], w)

    def _rhs(bb1, bb2, u):
        u = np.asarray(u, dtype=float)
        u1, u2 = u[0], u[1]
        return np.stack([u1 * (bb1 - u1) + kappa * (u2 - u1),
                         u2 * (bb2 - u2) + kappa * (u1 - u2)])

    def _jac(bb1, bb2, u):
        u = np.asarray(u, dtype=float)
        u1, u2 = u[0], u[1]
        k = kappa * np.ones_like(u1)
        return np.array([[bb1 - 2 * u1 - kappa, k], [k, bb2 - 2 * u2 - kappa]])

    def f(x, u):
        return _rhs(beta_1(x), beta_2(x), u)

    def jac(x, u):
        return _jac(beta_1(x), beta_2(x), u)

    A_plus = np.array([[b1[1] - kappa, kappa], [kappa, b2[1] - kappa]])
    A_minus = np.array([[b1[0] - kappa, kappa], [kappa, b2[0] - kappa]])
    for name, A in (("A_plus", A_plus), ("A_minus", A_minus)):
        if np.max(np.linalg.eigvals(A).real) <= 0:
            raise ConfigError(f"instability of 0 fails: s({name}) <= 0")
    m = 2.0 * max(b1 + b2)
    M = np.array([m, m])
    model = CooperativeModel(
        N=2, D=D, f=f,
        f_plus=lambda u: _rhs(b1[1], b2[1], u),
        f_minus=lambda u: _rhs(b1[0], b2[0], u),
        A_plus=A_plus, A_minus=A_minus, M=M,
        u_star_plus=np.full(2, np.nan), u_star_minus=np.full(2, np.nan),
        alpha0=0.0, kind="cooperative_pair",
        params=dict(beta1=list(b1), beta2=list(b2), kappa=kappa, w=w, D=D.tolist()),
        jac=jac, width=w,
    )
    model = dataclasses.replace(model, u_star_plus=positive_equilibrium(model, "+"),
                                u_star_minus=positive_equilibrium(model, "-"))
    return dataclasses.replace(model, alpha0=alpha_star(model))


# ---------------------------------------------------------------- analysis of models

def limit_jacobian(model, side: str):
    """``f_±'(0)`` (scalar) or ``D_u f_±(0)`` (system)."""
    side = _side(side)
    if isinstance(model, ScalarShiftModel):
        if model.kind != "tabulated":
            return model.b(side)
        fl = model.limit(side)
        return float((fl(FD_STEP) - fl(-FD_STEP)) / (2 * FD_STEP))
    if model.kind == "cooperative_pair":
        A = model.A_plus if side == "+" else model.A_minus
    else:
        A = _fd_jacobian(model.limit(side), np.zeros(model.N))
    off = A - np.diag(np.diag(A))
    if np.min(off) < -VIOLATION_TOL:
        raise NumericError("cooperativity violated: negative off-diagonal Jacobian entry")
    return np.array(A, dtype=float)


def _scalar_equilibrium_newton(g, dg, u0: float, lo: float, hi: float) -> float:
    u = u0
    for _ in range(200):
        gu = g(u)
        if abs(gu) < 1e-14:
            return u
        slope = dg(u)
        if slope == 0 or not math.isfinite(slope):
            break
        step = gu / slope
        lam = 1.0
        while lam > 1e-8:
            cand = u - lam * step
            if lo < cand <= hi and abs(g(cand)) < abs(gu):
                break
            lam *= 0.5
        else:
            break
        u = cand
    if abs(g(u)) < 1e-12:
        return u
    raise NumericError("equilibrium not found (Newton)")


def _bisect(g, lo: float, hi: float) -> float:
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise NumericError("equilibrium not found: no sign change")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm == 0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return lo if abs(g(lo)) <= abs(g(hi)) else hi


def positive_equilibrium(model, side: str, method: str = "newton"):
    """Positive fixed point of ``f_±`` (scalar) or zero of ``f_±`` (system)."""
    side = _side(side)
    fl = model.limit(side)
    if isinstance(model, ScalarShiftModel):
        def g(u):
            return float(fl(u)) - u

        def dg(u):
            return float((fl(u + FD_STEP) - fl(u - FD_STEP)) / (2 * FD_STEP)) - 1.0

        hi = float(model.cap)
        lo = hi * 1e-9
        if g(lo) <= 0:
            raise NumericError("equilibrium not found: zero is not unstable for this limit")
        if g(hi) > 0:
            raise NumericError("equilibrium not found: f_± does not map the cap inside the box")
        if method == "bisection":
            u = _bisect(g, lo, hi)
        else:
            try:
                u = _scalar_equilibrium_newton(g, dg, hi, lo, hi)
            except NumericError:
                u = _bisect(g, lo, hi)
        if abs(g(u)) >= 1e-12 or u <= 0:
            raise NumericError("equilibrium not found")
        return u
    # system: damped Newton on f_±(u) = 0 from the cap
    u = np.asarray(model.M, dtype=float).copy()
    for _ in range(200):
        r = np.asarray(fl(u), dtype=float)
        if np.max(np.abs(r)) < 1e-14:
            break
        J = _fd_jacobian(fl, u) if model.jac is None else _limit_jac(model, side, u)
        step = np.linalg.solve(J, r)
        lam = 1.0
        while lam > 1e-8:
            cand = u - lam * step
            if np.all(cand > 0) and np.max(np.abs(fl(cand))) < np.max(np.abs(r)):
                break
            lam *= 0.5
        else:
            break
        u = cand
    if np.max(np.abs(fl(u))) >= 1e-12 or np.any(u <= 0):
        raise NumericError("equilibrium not found")
    return u


def _limit_jac(model: CooperativeModel, side: str, u: np.ndarray) -> np.ndarray:
    far = 1e6 * model.width * (1 if side == "+" else -1)
    return np.asarray(model.jac(far, u), dtype=float)


def _box_samples(model, n_samples: int, span: float = 20.0):
    """Deterministic Halton samples of (x, u) over a habitat window times the box."""
    N = model.n_components
    pts = qmc.Halton(d=1 + N, scramble=False).random(n_samples)
    L = span * model.width
    x = -L + 2 * L * pts[:, 0]
    cap = np.broadcast_to(np.asarray(model.cap, dtype=float), (N,))
    u = pts[:, 1:].T * cap[:, None]
    # corners and the box faces u_i = cap_i matter for extremal checks
    xc = np.linspace(-L, L, 41)
    corners = np.array(np.meshgrid(*[[0.0, ci] for ci in cap], indexing="ij")).reshape(N, -1)
    xx, kk = np.meshgrid(xc, np.arange(corners.shape[1]), indexing="ij")
    x = np.concatenate([x, xx.ravel()])
    u = np.concatenate([u, corners[:, kk.ravel()]], axis=1)
    return x, u


def alpha_star(model: CooperativeModel, n_samples: int = 4000) -> float:
    """Shift making ``alpha E + D_u f`` nonnegative on the box, plus a 10% margin."""
    x, u = _box_samples(model, n_samples)
    J = model.jacobian(x, u)
    if not np.all(np.isfinite(J)):
        raise NumericError("unbounded sampled Jacobian")
    diag = np.array([J[i, i] for i in range(model.N)])
    return 1.1 * max(0.0, -float(np.min(diag)))


@dataclass
class Clause:
    name: str
    passed: bool
    worst_violation: float
    worst_location: tuple
    required: bool = True


@dataclass
class AssumptionReport:
    clauses: dict[str, Clause]
    tolerance: float = VIOLATION_TOL

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses.values() if c.required)

    def failures(self) -> list[str]:
        return [k for k, c in self.clauses.items() if c.required and not c.passed]

    def as_dict(self) -> dict:
        return {k: dict(passed=c.passed, worst_violation=c.worst_violation,
                        worst_location=[float(v) for v in c.worst_location], required=c.required)
                for k, c in self.clauses.items()}


def _clause(name, violation: np.ndarray, where, tol=VIOLATION_TOL, required=True) -> Clause:
    """``violation`` > 0 means the inequality fails by that much."""
    violation = np.asarray(violation, dtype=float).ravel()
    k = int(np.argmax(violation))
    worst = float(violation[k])
    loc = tuple(np.asarray(w).ravel()[k % np.asarray(w).size] for w in where)
    return Clause(name, worst <= tol, max(worst, 0.0), loc, required)


def verify_assumptions(model, sample_budget: int = 10_000) -> AssumptionReport:
    """Sampled check of the standing hypotheses; failures are reported, not raised."""
    x, u = _box_samples(model, sample_budget)
    clauses: dict[str, Clause] = {}
    alphas = np.linspace(0.0, 1.0, 11)
    if isinstance(model, ScalarShiftModel):
        u = u[0]
        fu = model.f(x, u)
        f0 = model.f(x, np.zeros_like(x))
        clauses["f(s,0)=0"] = _clause("f(s,0)=0", np.abs(f0), (x,))
        clauses["nonnegative"] = _clause("nonnegative", -fu, (x, u))
        clauses["box"] = _clause("box", fu - model.cap, (x, u))
        slope0 = model.dfdu(x, np.zeros_like(x))
        clauses["f<=f'(0)u"] = _clause("f<=f'(0)u", fu - slope0 * u, (x, u))
        for side, fl in (("+", model.f_plus), ("-", model.f_minus)):
            fl_u = fl(u)
            clauses[f"limit_linear_bound{side}"] = _clause(
                f"limit_linear_bound{side}", np.maximum(-fl_u, fl_u - model.b(side) * u), (u,))
            clauses[f"unstable_zero{side}"] = Clause(
                f"unstable_zero{side}", model.b(side) > 1.0, max(0.0, 1.0 - model.b(side)), (side,))
        sub = np.stack([model.f(x, a * u) - a * fu for a in alphas])
        clauses["subhomogeneous"] = _clause(
            "subhomogeneous", -sub, (np.broadcast_to(x, sub.shape), np.broadcast_to(u, sub.shape)),
            required=model.subhomogeneous)
        du = model.dfdu(x, u)
        clauses["monotone_in_u"] = _clause("monotone_in_u", -du, (x, u), required=model.monotone)
    else:
        N = model.N
        fu = model.f(x, u)
        f0 = model.f(x, np.zeros_like(u))
        clauses["f(x,0)=0"] = _clause("f(x,0)=0", np.max(np.abs(f0), axis=0), (x,))
        J = model.jacobian(x, u)
        off = np.stack([-J[i, j] for i in range(N) for j in range(N) if i != j])
        clauses["cooperative"] = _clause("cooperative", np.max(off, axis=0), (x,))
        above = []
        for a in (1.001, 1.01, 1.1, 1.5, 2.0, 3.0):
            aM = (a * model.M)[:, None] * np.ones((N, x.size))
            above.append(np.max(model.f(x, aM), axis=0))
        clauses["dissipative_above_M"] = _clause("dissipative_above_M", np.max(above, axis=0), (x,), tol=0.0)
        sub = np.stack([np.min(model.f(x, a * u) - a * fu, axis=0) for a in alphas])
        clauses["subhomogeneous"] = _clause("subhomogeneous", -sub, (np.broadcast_to(x, sub.shape),))
        J0 = model.jacobian(x, np.zeros_like(u))
        lin = np.einsum("ijk,jk->ik", J0, u)
        clauses["f<=Df(0)u"] = _clause("f<=Df(0)u", np.max(fu - lin, axis=0), (x,))
        for side in ("+", "-"):
            A = limit_jacobian(model, side)
            irreducible = bool(np.all(_reach(A)))
            s_A = float(np.max(np.linalg.eigvals(A).real))
            clauses[f"irreducible{side}"] = Clause(f"irreducible{side}", irreducible, 0.0 if irreducible else 1.0, (side,))
            clauses[f"unstable_zero{side}"] = Clause(f"unstable_zero{side}", s_A > 0, max(0.0, -s_A), (side,))
    clauses["limit_convergence"] = _limit_convergence(model)
    return AssumptionReport(clauses)


def _reach(A: np.ndarray) -> np.ndarray:
    N = A.shape[0]
    adj = (np.abs(A) > 0) | np.eye(N, dtype=bool)
    R = adj.copy()
    for _ in range(N):
        R = (R.astype(int) @ adj.astype(int)) > 0
    return R


def _limit_convergence(model) -> Clause:
    """sup_u |f(±X, u) - f_±(u)| must decrease as X grows."""
    N = model.n_components
    cap = np.broadcast_to(np.asarray(model.cap, dtype=float), (N,))
    uu = np.linspace(0.0, 1.0, 101)[None, :] * cap[:, None]
    Xs = model.width * np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    worst = 0.0
    loc = (0.0,)
    for sgn, fl in ((1.0, model.f_plus), (-1.0, model.f_minus)):
        errs = []
        for X in Xs:
            xs = np.full(uu.shape[1], sgn * X)
            val = model.f(xs, uu[0] if N == 1 else uu)
            errs.append(float(np.max(np.abs(np.asarray(val) - np.asarray(fl(uu[0] if N == 1 else uu))))))
        inc = np.diff(errs)
        k = int(np.argmax(inc))
        if inc[k] > worst:
            worst, loc = float(inc[k]), (sgn * Xs[k + 1],)
    return Clause("limit_convergence", worst <= VIOLATION_TOL, worst, loc)


def max_reaction_slope(model, n: int = 201) -> float:
    """``max |d f / d u|`` over the habitat window times the box (max row sum for systems)."""
    if isinstance(model, ScalarShiftModel):
        s = np.linspace(-20 * model.width, 20 * model.width, 81)[:, None]
        u = np.linspace(0.0, model.cap, n)[None, :]
        return float(np.max(np.abs(model.dfdu(s, u))))
    x, u = _box_samples(model, 2000)
    J = model.jacobian(x, u)
    return float(np.max(np.sum(np.abs(J), axis=1)))
