"""Hot-loop kernels: compiled extension when available, numpy fallback.

Set ACTIVEIDS_PURE=1 to force the pure-numpy path (used by the benchmark
and for debugging).
"""

import os

if os.environ.get("ACTIVEIDS_PURE"):
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _fast as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _pure as _impl

        BACKEND = "pure"

nearest_centroids = _impl.nearest_centroids
forest_votes = _impl.forest_votes

__all__ = ["BACKEND", "nearest_centroids", "forest_votes"]
