"""Hot numerical kernels.

The compiled Cython module is used when it was built; otherwise the numpy
implementation is selected at import time. Both expose the same functions.
"""

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

active = _ckernels if _ckernels is not None else _pykernels
BACKEND = active.NAME


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return active
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available; "
                         f"have {sorted(BACKENDS)}") from None


def wedge_accumulate(F, G, tf, tg, to, fac, out):
    return active.wedge_accumulate(F, G, tf, tg, to, fac, out)


def rank2_pairings(B, X, lam):
    return active.rank2_pairings(B, X, lam)
