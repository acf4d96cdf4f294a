"""Backend selection for the dense tensor kernels.

The compiled extension is used when available; the pure-numpy fallback is
selected otherwise, or when ROUGHCONTROL_PURE_PYTHON=1 is set.  Both expose
the same flat-array API (mul, exp_increment, sig_chain).
"""

import os

from . import dense as _py

if os.environ.get("ROUGHCONTROL_PURE_PYTHON") == "1":
    _impl = _py
else:
    try:
        from . import _ctensor as _impl
    except ImportError:
        _impl = _py

BACKEND = _impl.BACKEND
mul = _impl.mul
exp_increment = _impl.exp_increment
sig_chain = _impl.sig_chain

# the reference implementation stays importable for cross-checks/benchmarks
python_impl = _py
