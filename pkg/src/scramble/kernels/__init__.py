"""Hot-kernel backend selection.

The compiled extension `_core` is preferred when it imported cleanly;
otherwise the pure-numpy `_py` module takes over.  Both expose the same
three callables.  Set the environment variable SCRAMBLE_FORCE_PY to any
non-empty value to force the fallback (useful for benchmarking and for
cross-checking the two implementations).
"""

import os

if os.environ.get("SCRAMBLE_FORCE_PY"):
    from . import _py as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _py as _impl

BACKEND = _impl.BACKEND
apply_kick = _impl.apply_kick
jacobi_eigh = _impl.jacobi_eigh
eigh_ql = _impl.eigh_ql

__all__ = ["BACKEND", "apply_kick", "jacobi_eigh", "eigh_ql"]
