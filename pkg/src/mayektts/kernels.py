"""Hot-loop kernels, compiled when the extension is built, numpy otherwise.

Set ``MAYEKTTS_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from ._ext import pykernels

BACKEND = "python"
_impl = pykernels

if not os.environ.get("MAYEKTTS_PURE_PYTHON"):
    try:
        from ._ext import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        pass

polyphase_resample = _impl.polyphase_resample
conv1d_same = _impl.conv1d_same
overlap_add = _impl.overlap_add
