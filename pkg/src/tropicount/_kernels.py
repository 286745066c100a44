"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``TROPICOUNT_PURE_PYTHON=1`` to force the fallback.
"""

import os

from tropicount import _pykernels

BACKEND = "python"

if os.environ.get("TROPICOUNT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from tropicount import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

int_rank = _impl.int_rank
snf_diagonal = _impl.snf_diagonal
solve_int = _impl.solve_int
fm_feasible_int = _impl.fm_feasible_int
reduce_ineqs_int = _impl.reduce_ineqs_int
