class AdapterError(Exception):
    """Base class for adapter failures."""


class MissingEncoderWeightsError(AdapterError):
    """Pretrained weights are not available (offline or uncached)."""


class UndecodableImageError(AdapterError):
    """An input image could not be opened or decoded."""
