"""Hot-loop kernel dispatch.

The numba backend is used by default; set DOCID_DISABLE_NUMBA=1 (before
import) to force the pure-numpy fallback. Both backends expose the same
functions with identical semantics; benchmarks/bench_kernels.py compares
them side by side.
"""

import os

from . import numpy_impl

_flag = os.environ.get("DOCID_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in {"1", "true", "yes", "on"}

if NUMBA_DISABLED:
    _impl = numpy_impl
else:
    try:
        from . import numba_impl as _impl
    except ImportError:
        _impl = numpy_impl

BACKEND = _impl.BACKEND_NAME

gaussian_kernel = numpy_impl.gaussian_kernel
gaussian_blur = _impl.gaussian_blur
resize_bilinear = _impl.resize_bilinear
extrema_mask = _impl.extrema_mask
orientation_histogram = _impl.orientation_histogram
descriptor_histogram = _impl.descriptor_histogram
# descriptor matching is matmul-shaped: the BLAS formulation beats the
# scalar loop on every measured size (see benchmarks/bench_kernels.py),
# so both modes route it to the numpy implementation
match_count = numpy_impl.match_count


def get_backend(name: str):
    """Return a kernel module by name ('numba' or 'numpy'); used by benchmarks."""
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        from . import numba_impl
        return numba_impl
    raise ValueError(f"unknown kernel backend: {name!r}")


def warmup():
    """Precompile the numba kernels if they are the active backend."""
    if BACKEND == "numba":
        _impl.warmup()
