"""Integer kernels with a compiled backend and a pure-Python fallback.

The compiled extension is used when it was built and
``STRATA_LAB_PURE_PYTHON`` is unset; ``BACKEND`` names the active one.
Compiled calls that overflow 64-bit arithmetic are transparently redone in
Python, so results never depend on the backend.
"""

import os

from . import _pykernels

_compiled = None
if not os.environ.get("STRATA_LAB_PURE_PYTHON"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def rref_int(rows, ncols):
    if _compiled is not None:
        try:
            return _compiled.rref_int(rows, ncols)
        except OverflowError:
            pass
    return _pykernels.rref_int(rows, ncols)


class IntegerAction:
    """Backend-dispatching wrapper; see ``_pykernels.IntegerAction``."""

    def __init__(self, numerators, denominators, dim):
        self.dim = dim
        self.order = len(numerators)
        self._py = _pykernels.IntegerAction(numerators, denominators, dim)
        self._c = None
        if _compiled is not None:
            try:
                self._c = _compiled.IntegerAction(numerators, denominators, dim)
            except OverflowError:
                self._c = None

    def stabilizer(self, x):
        if self._c is not None:
            try:
                return self._c.stabilizer(x)
            except OverflowError:
                pass
        return self._py.stabilizer(x)

    def fixes(self, index, x):
        if self._c is not None:
            try:
                return self._c.fixes(index, x)
            except OverflowError:
                pass
        return self._py.fixes(index, x)


__all__ = ["BACKEND", "IntegerAction", "rref_int"]
