"""Backend selection for the time-stepping kernels.

Prefers the compiled extension when it was built; otherwise falls back to
the numpy/scipy implementation with identical semantics.  Setting the
environment variable MFELENS_PURE=1 forces the fallback (used by the
benchmark and the cross-backend tests).
"""

import os

from . import _kernels_py

if os.environ.get("MFELENS_PURE", "0") not in ("", "0"):
    _impl = _kernels_py
    HAVE_EXTENSION = False
else:
    try:
        from . import _kernels as _impl

        HAVE_EXTENSION = True
    except ImportError:
        _impl = _kernels_py
        HAVE_EXTENSION = False

BACKEND = "compiled" if HAVE_EXTENSION else "pure"

make_arrowhead_stepper = _impl.make_arrowhead_stepper
make_csr_stepper = _impl.make_csr_stepper
