"""First Robin eigenvalues of balls, spherical shells and Neumann-Robin annuli.

The eigenvalues come from modified-Bessel secular equations, with a
finite-volume solver as an independent check.
"""

__version__ = "0.1.0"

from .errors import BracketFailure, ConvergenceFailure, DomainError
from .geometry import PlanarSummary, ShellGeometry, match_shell_to_ball, radii_from_summary, surface, volume
from .secular import Boundary, EigenResult, SecularProblem, solve_lambda1, variational_bound

__all__ = [
    "__version__",
    "BracketFailure",
    "ConvergenceFailure",
    "DomainError",
    "PlanarSummary",
    "ShellGeometry",
    "match_shell_to_ball",
    "radii_from_summary",
    "surface",
    "volume",
    "Boundary",
    "EigenResult",
    "SecularProblem",
    "solve_lambda1",
    "variational_bound",
]
