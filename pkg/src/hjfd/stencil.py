"""Backend selection for the stencil kernel.

The compiled extension is used when it was built; set ``HJFD_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

from . import _pystencil

LAX_FRIEDRICHS = _pystencil.LAX_FRIEDRICHS
HIGH_ORDER = _pystencil.HIGH_ORDER
MODIFIED = _pystencil.MODIFIED
LINEAR = _pystencil.LINEAR
QUADRATIC = _pystencil.QUADRATIC

_cstencil = None
if not os.environ.get("HJFD_PURE_PYTHON"):
    try:
        from . import _cstencil
    except ImportError:  # extension not built
        _cstencil = None

BACKENDS = {"python": _pystencil.axis_terms}
if _cstencil is not None:
    BACKENDS["cython"] = _cstencil.axis_terms

BACKEND = "cython" if _cstencil is not None else "python"
axis_terms = BACKENDS[BACKEND]
