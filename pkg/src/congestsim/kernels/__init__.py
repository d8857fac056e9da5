"""Clearance/collision kernels with backend selection at import time.

The compiled extension is preferred; the numpy fallback is used when the
extension is unavailable or when CONGESTSIM_KERNELS=pure is set. Both
backends make bit-identical decisions (see benchmarks/bench_kernels.py for
the speed comparison).
"""

import os

from congestsim.kernels import pure as _pure

_forced = os.environ.get("CONGESTSIM_KERNELS", "").strip().lower()

if _forced == "pure":
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from congestsim.kernels import _fast as _impl
        BACKEND = "fast"
    except ImportError:
        if _forced == "fast":
            raise
        _impl = _pure
        BACKEND = "pure"

move_ok = _impl.move_ok
segment_ok = _impl.segment_ok
segment_hits_buildings = _impl.segment_hits_buildings
point_in_buildings = _impl.point_in_buildings
min_separation = _impl.min_separation

__all__ = [
    "BACKEND",
    "move_ok",
    "segment_ok",
    "segment_hits_buildings",
    "point_in_buildings",
    "min_separation",
]
