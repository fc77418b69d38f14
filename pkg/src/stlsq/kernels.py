"""Backend selection for the hot loops.

The compiled extension ``stlsq._ckernels`` is used when it was built and
imports cleanly; otherwise the numpy implementations in ``stlsq._pykernels``
are used. Setting ``STLSQ_PURE_PYTHON=1`` forces the fallback.
"""

import os

from stlsq import _pykernels

if os.environ.get("STLSQ_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from stlsq import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

rk4_lorenz = _impl.rk4_lorenz
rk4_thomas = _impl.rk4_thomas
best_subset = _impl.best_subset
rk4_generic = _pykernels.rk4_generic


def available_backends():
    """Mapping of backend name to kernel module for every importable backend."""
    out = {"python": _pykernels}
    try:
        from stlsq import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
