"""Backend selection for the sparse kernels.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
numpy implementation in ``_fallback`` is used.  Setting the environment
variable ``HWOPSIP_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _fallback

if os.environ.get("HWOPSIP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
        BACKEND = "python"

csr_matvec = _impl.csr_matvec
cg_chunk = _impl.cg_chunk

__all__ = ["BACKEND", "csr_matvec", "cg_chunk"]
