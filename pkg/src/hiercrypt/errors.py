"""Exception hierarchy shared by the library and the CLI."""


class HierCryptError(Exception):
    """Base class for every error raised by hiercrypt."""


class DomainError(HierCryptError, ValueError):
    """A chaotic parameter, state or cipher symbol is outside its valid range."""


class KeyFormatError(HierCryptError, ValueError):
    """A serialized key has the wrong size or an out-of-range field."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ImageFormatError(HierCryptError, ValueError):
    """An image is malformed, unsupported, or has mismatched dimensions."""


class AccessError(HierCryptError):
    """The recipient's sub-keys do not permit the requested decryption."""


class DegenerateSampleError(HierCryptError, ValueError):
    """A statistic is undefined for the sample (e.g. zero variance)."""
