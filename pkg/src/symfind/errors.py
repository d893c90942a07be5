"""Exception hierarchy shared by all symfind modules."""


class SymfindError(Exception):
    """Base class for every error raised by symfind."""


class RegistryMismatchError(SymfindError, ValueError):
    """Two polynomials over different variable registries were combined."""


class UnknownVariableError(SymfindError, KeyError):
    """A variable name is not part of the registry."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown variable"


class ZeroDenominatorError(SymfindError, ZeroDivisionError):
    """A denominator is (or became) the zero polynomial."""


class ModelError(SymfindError):
    """Invalid model source or model structure.

    ``line`` and ``column`` are 1-based and ``None`` when not applicable.
    """

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class AnsatzError(SymfindError):
    """The requested ansatz cannot represent the problem honestly."""


class InconclusiveError(SymfindError):
    """A resource ceiling was hit; no answer is claimed."""

    def __init__(self, message, steps=None):
        self.steps = steps
        super().__init__(message)


class SolverBugError(SymfindError, AssertionError):
    """An internal consistency check failed (e.g. a branch with nonzero residual)."""


class IntegrationError(SymfindError):
    """Numerical integration hit a pole or produced non-finite values."""
