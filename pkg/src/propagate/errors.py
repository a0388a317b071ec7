class PropagateError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 3


class ConfigError(PropagateError, ValueError):
    exit_code = 2


class NumericError(PropagateError, ArithmeticError):
    exit_code = 3


class HypothesisError(PropagateError, ValueError):
    """A theorem's standing hypotheses are not met by the model or scenario."""

    exit_code = 3
