"""Select the compiled kernel module, falling back to pure Python."""
import logging
import os

log = logging.getLogger(__name__)

if os.environ.get("GRF_TOOLKIT_PURE", "") not in ("", "0"):
    from . import _kernels_py as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as kernels
        BACKEND = "python"
        log.debug("compiled kernels unavailable, using pure-Python fallback")

edt_sq = kernels.edt_sq
polar_normals = kernels.polar_normals
