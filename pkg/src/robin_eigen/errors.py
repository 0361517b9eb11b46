"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the supported mathematical domain."""


class ConvergenceFailure(RuntimeError):
    """An iteration did not reach its tolerance within the allowed steps."""


class BracketFailure(RuntimeError):
    """No sign change could be located for a root that must exist.

    Signals either a bug or a regime the solvers do not support; callers
    should never treat it as "no eigenvalue".
    """
