"""Pure numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable, and as the
reference the compiled kernels are tested against.
"""

import numpy as np

NAME = "python"


def wedge_accumulate(F, G, tf, tg, to, fac, out):
    """Accumulate ``out[b, to[t]] += fac[t] * F[b, tf[t]] @ G[b, tg[t]]``.

    ``F`` and ``G`` have shape ``(batch, keys, r, r)``; a batch of size one
    broadcasts against the other operand.
    """
    if len(tf) == 0:
        return out
    prod = np.matmul(F[:, tf], G[:, tg])
    scatter = np.zeros((out.shape[1], len(tf)), dtype=complex)
    scatter[to, np.arange(len(tf))] = fac
    out += np.einsum("kt,btij->bkij", scatter, prod)
    return out


def _anti(P, Q):
    return P @ Q + Q @ P


def rank2_pairings(B, X, lam):
    """Both sides of the rank-2 anticommutator inequality for a batch.

    Returns ``(lhs, rhs)`` with ``lhs = <B.B^+, X.X^+>_T`` and
    ``rhs = <B.X^+, B.X^+>_T`` where ``P.Q = PQ + QP`` and the pairing weights
    entry ``(i, j)`` by ``1 / (l_i + l_j)`` with ``l = (1, lam)``.
    """
    B = np.asarray(B, dtype=complex)
    X = np.asarray(X, dtype=complex)
    lam = np.asarray(lam, dtype=float)
    Bh = np.conj(np.swapaxes(B, -1, -2))
    Xh = np.conj(np.swapaxes(X, -1, -2))
    bb = _anti(B, Bh)
    xx = _anti(X, Xh)
    bx = _anti(B, Xh)
    w = np.empty(lam.shape + (2, 2))
    w[..., 0, 0] = 0.5
    w[..., 0, 1] = w[..., 1, 0] = 1.0 / (1.0 + lam)
    w[..., 1, 1] = 0.5 / lam
    lhs = np.sum(np.conj(bb) * xx * w, axis=(-1, -2)).real
    rhs = np.sum(np.abs(bx) ** 2 * w, axis=(-1, -2))
    return lhs, rhs
