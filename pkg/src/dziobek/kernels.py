"""Kernel backend selection.

Prefers the compiled Cython core and falls back to the numpy implementation
when the extension is unavailable.  Set DZIOBEK_PURE=1 to force the fallback
(used by the benchmark and by backend-consistency tests).
"""

from __future__ import annotations

import os

from . import _pykernels

NEWTON_OK = _pykernels.NEWTON_OK
NEWTON_NO_CONVERGENCE = _pykernels.NEWTON_NO_CONVERGENCE
NEWTON_COLLAPSE = _pykernels.NEWTON_COLLAPSE
NEWTON_STALLED = _pykernels.NEWTON_STALLED

if os.environ.get("DZIOBEK_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ccore as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

residual_full = _impl.residual_full
residual_reduced = _impl.residual_reduced
jacobian_reduced = _impl.jacobian_reduced
newton_reduced = _impl.newton_reduced


def backend_name() -> str:
    return "pure-python" if _impl is _pykernels else "compiled"
