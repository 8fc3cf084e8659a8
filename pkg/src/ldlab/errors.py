"""Package-level error types (exit-code mapping happens in the CLI)."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class BudgetError(RuntimeError):
    """A compute budget (enumeration size, family size, sample floor) was exceeded."""
