"""Exception hierarchy.  Every domain error the CLI maps to exit code 1 derives from ``MdpcError``."""


class MdpcError(Exception):
    """Base class for domain errors."""


class ParameterError(MdpcError, ValueError):
    """Inputs violate an operation's preconditions."""


class FormatError(MdpcError, ValueError):
    """A serialized matrix, key, word or config is malformed."""


class RegimeError(ParameterError):
    """An asymptotic formula was evaluated outside its regime of validity."""


class BudgetExhausted(MdpcError):
    """Rejection sampling ran out of attempts."""

    def __init__(self, attempts: int, target_s: int, best_s: int | None):
        self.attempts = attempts
        self.target_s = target_s
        self.best_s = best_s
        super().__init__(
            f"no sample with max column intersection <= {target_s} in {attempts} attempts"
            f" (best seen: {best_s})"
        )


class EnumerationBudgetExceeded(MdpcError):
    """Exhaustive verification would enumerate more patterns than allowed."""
