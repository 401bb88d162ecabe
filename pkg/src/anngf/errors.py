"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 2, numerical failures (non-positive symbol, indefinite effective
matrix, invalid moments) with 3, and iterative-solver non-convergence
with 4.
"""


class AnngfError(Exception):
    """Base class for package errors."""


class ConfigError(AnngfError):
    """Invalid or inconsistent run configuration (CLI exit code 2)."""


class NumericalError(AnngfError):
    """Numerical precondition violated (CLI exit code 3)."""


class SymbolVanishesError(NumericalError):
    """Operator symbol fails to stay positive away from the origin."""


class ConvergenceError(AnngfError):
    """Iterative solver exceeded its iteration cap (CLI exit code 4)."""


class StencilError(AnngfError):
    """Difference stencil does not fit inside the field's box."""
