"""Kernel backend selection.

Prefers the compiled Cython core; falls back to the numpy implementations
when the extension is missing.  Set ACTR_FORCE_FALLBACK=1 to force the
numpy backend (used by the benchmark and the backend-parity tests).
"""

import os

if os.environ.get("ACTR_FORCE_FALLBACK", "0") not in ("", "0"):
    from . import _fallback as _impl

    BACKEND = "fallback"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as _impl

        BACKEND = "fallback"

segment_box_hit = _impl.segment_box_hit
sampled_segment_box_hit = _impl.sampled_segment_box_hit
visible_mask = _impl.visible_mask
visible_mask_sampled = _impl.visible_mask_sampled
blocked_by_triangles = _impl.blocked_by_triangles

__all__ = [
    "BACKEND",
    "segment_box_hit",
    "sampled_segment_box_hit",
    "visible_mask",
    "visible_mask_sampled",
    "blocked_by_triangles",
]
