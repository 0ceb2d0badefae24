"""Encoder adapter: turn an input image plus its slice images into the
binary tensor files consumed by the actr planning pipeline.

The adapter only extracts features and rasterizes masks/occupancy; all
difference semantics live downstream, so swapping encoders requires no
planner changes.
"""

from .extract import AdapterConfig, extract
from .errors import AdapterError, MissingEncoderWeightsError, UndecodableImageError

__version__ = "0.1.0"
