"""Exception types shared across the package.

The CLI maps these onto stable exit codes (see ``actr.cli``), so scripts
driving the pipeline can distinguish bad files from bad shapes.
"""


class ActrError(Exception):
    """Base class for all package-specific errors."""


class MalformedFileError(ActrError):
    """A file failed structural validation (bad magic, truncated payload, ...)."""


class ShapeMismatchError(ActrError):
    """Tensor or grid dimensions are inconsistent with each other."""


class EmptyMaskError(ActrError):
    """An object mask contains no foreground cells."""


class EmptyGridError(ActrError):
    """A block grid contains no retained blocks."""
