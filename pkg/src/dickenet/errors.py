"""Exception types shared across the package."""


class DickenetError(Exception):
    """Base class for all package-specific errors."""


class DomainError(DickenetError, ValueError):
    """An argument lies outside an operation's domain (bad index, dimension mismatch, ...)."""


class UnsupportedConfigurationError(DomainError):
    """A parameter combination the implementation deliberately does not support (e.g. odd N)."""


class ConfigError(DickenetError):
    """A scenario configuration file is malformed or invalid.

    Carries an optional source line so CLI diagnostics can point at the
    offending line of the config file.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message)

    def anchored(self, path: str) -> str:
        if self.line is None:
            return f"{path}: {self.args[0]}"
        return f"{path}:{self.line}: {self.args[0]}"


class NumericFailure(DickenetError):
    """A numerical routine failed to produce a usable result."""
