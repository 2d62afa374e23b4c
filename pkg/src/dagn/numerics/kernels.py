"""Select the GRU recurrence backend at import time.

The compiled ``_gru_ext`` is preferred; set ``DAGN_PURE_PYTHON=1`` to force
the numpy fallback.
"""

import os

from dagn.numerics import _gru_py

BACKEND = "python"
_impl = _gru_py

if not os.environ.get("DAGN_PURE_PYTHON"):
    try:
        from dagn.numerics import _gru_ext
    except ImportError:
        pass
    else:
        _impl = _gru_ext
        BACKEND = "cython"


def gru_forward(gx, w_h, b_h):
    return _impl.gru_forward(gx, w_h, b_h)


def gru_backward(dout, hs, r, z, n, ghn, w_h):
    return _impl.gru_backward(dout, hs, r, z, n, ghn, w_h)
