"""Backend selection for the step-function kernels.

The compiled extension is used when it imports; setting the environment
variable ``SHIFTLAB_PURE_PYTHON=1`` forces the numpy fallback.
"""

import functools
import os

import numpy as np

if os.environ.get("SHIFTLAB_PURE_PYTHON", "") not in ("", "0"):
    from shiftlab import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from shiftlab import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from shiftlab import _kernels_py as _impl

        BACKEND = "python"



def _contiguous(func):
    """Typed memoryviews in the extension need C-contiguous buffers."""

    @functools.wraps(func)
    def wrapper(*args):
        return func(*(np.ascontiguousarray(a) if isinstance(a, np.ndarray) else a for a in args))

    return wrapper


jump_fourier_sums = _contiguous(_impl.jump_fourier_sums)
laurent_jump_sum = _contiguous(_impl.laurent_jump_sum)
rational_jump_sum = _contiguous(_impl.rational_jump_sum)
merge_sorted_phases = _contiguous(_impl.merge_sorted_phases)
unwrap_phase = _contiguous(_impl.unwrap_phase)
arctan_weighted_l1 = _contiguous(_impl.arctan_weighted_l1)
truncated_l1 = _contiguous(_impl.truncated_l1)

__all__ = [
    "BACKEND",
    "jump_fourier_sums",
    "laurent_jump_sum",
    "rational_jump_sum",
    "merge_sorted_phases",
    "unwrap_phase",
    "arctan_weighted_l1",
    "truncated_l1",
]
