"""Backend dispatch for the evaluation kernels.

The compiled extension is preferred when it imported cleanly; set
ROUNDKIT_PURE=1 to force the numpy fallback (used by the parity tests and
the benchmark).
"""

import os

from . import _ref

if os.environ.get("ROUNDKIT_PURE"):
    _impl = _ref
else:
    try:
        from . import _fast as _impl
    except ImportError:
        _impl = _ref

abs_dot_max = _impl.abs_dot_max
factor_norm = _impl.factor_norm
pnorm_rows = _impl.pnorm_rows


def backend_name() -> str:
    return _impl.BACKEND


__all__ = ["abs_dot_max", "factor_norm", "pnorm_rows", "backend_name"]
