"""Exception types used across the package."""


class LabError(Exception):
    """Base class for all package-specific errors."""


class PreconditionError(LabError):
    """An operation's stated hypothesis does not hold for the given inputs."""


class ResourceRefusal(LabError):
    """The requested job exceeds the configured work ceiling; nothing was run."""


class TableRequiredError(LabError):
    """A complexity table is needed but absent and building is disabled."""


class CacheError(LabError):
    """A cache file is unreadable, truncated, or from a different machine."""
