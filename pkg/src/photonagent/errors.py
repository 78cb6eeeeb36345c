"""Exception types shared across the package.

The CLI maps these onto exit codes: validation/configuration problems
exit with 1, integration/runtime failures with 2.
"""


class ValidationError(ValueError):
    """A parameter or input violates a documented precondition."""


class ConfigError(ValidationError):
    """A configuration file or integration grid is malformed."""


class IntegrationError(RuntimeError):
    """A numerical integration produced an inadmissible state."""
