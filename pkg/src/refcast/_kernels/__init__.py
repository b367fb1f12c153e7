"""Numeric kernel backends.

The compiled extension is used when importable; otherwise the numpy
fallback takes over. Set ``REFCAST_PURE=1`` to force the fallback. Both
backends are bit-identical by construction (see ``_pure`` for the pinned
accumulation orders), so the choice only affects speed.
"""

import os

from . import _pure

if os.environ.get("REFCAST_PURE", "").strip() not in ("", "0"):
    _impl = _pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
exhaustive_best_subset = _impl.exhaustive_best_subset
bootstrap_means = _impl.bootstrap_means
bootstrap_quantiles = _impl.bootstrap_quantiles
mwu_extreme_count = _impl.mwu_extreme_count
lex_mask_smaller = _impl.lex_mask_smaller
