"""Exception types raised by the library and the CLI."""


class ConfigError(ValueError):
    """A job configuration failed validation."""


class SizeLimitError(ValueError):
    """A problem size exceeds a configured cap."""


class IllConditionedError(ValueError):
    """Parameters make a closed form numerically singular."""


class RegimeWarning(UserWarning):
    """Parameters lie outside the regime where an approximation is trusted."""
