"""Rank-2 bundles over surfaces: MA-semi-positive vbMA solutions are MA-positive.

Write ``i Theta = A i dz1^dz1b + C i dz2^dz2b + B i dz1^dz2b + B^+ i dz2^dz1b``.
Positivity reduces, after solving the anticommutator equation against ``C``,
to the inequality

    <B.B^+, X.X^+>_T >= <B.X^+, B.X^+>_T      (P.Q = PQ + QP)

for all 2x2 ``B, X`` and every ``lambda > 0``, where ``<P, Q>_T`` weights entry
``(i, j)`` by ``1 / (l_i + l_j)`` with ``l = (1, lambda)``.  This module makes
each step of that reduction checkable.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InputError, InvariantViolation, PreconditionError
from .forms import Curvature, vbma_residual
from .gram import Kind, classify, gram_matrix


def _h(M):
    return np.conj(np.swapaxes(M, -1, -2))


def _anti(P, Q):
    return P @ Q + Q @ P


@dataclass(frozen=True)
class SurfaceBlocks:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "C"):
            M = np.asarray(getattr(self, name), dtype=complex)
            if M.shape != (2, 2):
                raise InputError(f"block {name} must be 2x2, got {M.shape}")
            object.__setattr__(self, name, M)
        for name in ("A", "C"):
            M = getattr(self, name)
            if np.max(np.abs(M - _h(M))) > 1e-12 * max(1.0, np.max(np.abs(M))):
                raise InputError(f"block {name} must be Hermitian")

    def curvature(self):
        return Curvature(np.array([[self.A, self.B], [_h(self.B), self.C]]))

    @classmethod
    def from_curvature(cls, theta):
        if (theta.n, theta.r) != (2, 2):
            raise InputError("surface blocks need n = r = 2")
        c = theta.coeffs
        return cls(c[0, 0], c[0, 1], c[1, 1])


def anticommutator_solve(C, X):
    """Solve ``C T + T C = X`` for ``T`` with ``C`` Hermitian positive definite."""
    C = np.asarray(C, dtype=complex)
    X = np.asarray(X, dtype=complex)
    if np.max(np.abs(C - _h(C))) > 1e-12 * max(1.0, np.max(np.abs(C))):
        raise InputError("C must be Hermitian")
    lam, U = np.linalg.eigh(C)
    if lam[0] <= 0:
        raise InputError("C must be positive definite for the anticommutator inverse")
    Xp = _h(U) @ X @ U
    return U @ (Xp / (lam[:, None] + lam[None, :])) @ _h(U)


def anticommutator_matrix(C):
    """Matrix of ``Y -> CY + YC`` acting on row-major flattened ``Y``."""
    C = np.asarray(C, dtype=complex)
    m = C.shape[0]
    I = np.eye(m)
    return np.kron(C, I) + np.kron(I, C.T)


@dataclass(frozen=True)
class GreekCoefficients:
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    epsilon: complex
    a11: float
    a22: float
    a12_plus_a21: float

    @property
    def middle(self):
        """Coefficient of ``lambda`` in the cleared-denominator quadratic."""
        return self.a11 + self.a22 + 2 * self.a12_plus_a21


def greek_coefficients(B, X):
    """The five bilinear minors of ``(B, X)`` and the resulting ``a_ij``."""
    B = np.asarray(B, dtype=complex)
    X = np.asarray(X, dtype=complex)
    al = B[0, 0] * X[0, 1] - B[0, 1] * X[0, 0]
    be = B[0, 0] * X[1, 0] - B[1, 0] * X[0, 0]
    ga = B[0, 1] * X[1, 0] - B[1, 0] * X[0, 1]
    de = B[1, 1] * X[0, 1] - B[0, 1] * X[1, 1]
    ep = B[1, 1] * X[1, 0] - B[1, 0] * X[1, 1]
    a11 = 2 * abs(al) ** 2 + 2 * abs(be) ** 2 + abs(ga) ** 2
    a22 = 2 * abs(de) ** 2 + 2 * abs(ep) ** 2 + abs(ga) ** 2
    a12_21 = -(abs(al + de) ** 2 + abs(be + ep) ** 2)
    return GreekCoefficients(complex(al), complex(be), complex(ga), complex(de),
                             complex(ep), float(a11), float(a22), float(a12_21))


def pairing_coefficients(B, X):
    """``a_ij = (B.B^+)_ij (X.X^+)_ji - |(B.X^+)_ij|^2`` straight from the definition."""
    B = np.asarray(B, dtype=complex)
    X = np.asarray(X, dtype=complex)
    bb = _anti(B, _h(B))
    xx = _anti(X, _h(X))
    bx = _anti(B, _h(X))
    return bb * xx.T - np.abs(bx) ** 2


def t_pairing(P, Q, lam):
    """``<P, Q>_T`` for ``C = diag(1, lam)``."""
    l = np.array([1.0, lam])
    return complex(np.sum(np.conj(P) * Q / (l[:, None] + l[None, :])))


def schur_inequality_check(B, X, lam, tol=1e-9):
    """Evaluate both sides of the reduced Schur inequality.

    Returns ``(lhs, rhs, holds)`` with ``holds = lhs >= rhs - tol * scale`` and
    ``scale = max(|lhs| + |rhs|, 1e-300)``.
    """
    if not lam > 0:
        raise InputError("lambda must be positive")
    B = np.asarray(B, dtype=complex)
    X = np.asarray(X, dtype=complex)
    lhs = t_pairing(_anti(B, _h(B)), _anti(X, _h(X)), lam).real
    bx = _anti(B, _h(X))
    rhs = t_pairing(bx, bx, lam).real
    return lhs, rhs, bool(lhs >= rhs - tol * (abs(lhs) + abs(rhs)))


def schur_inequality_batch(B, X, lam, tol=1e-9, backend=None):
    """Vectorised ``schur_inequality_check`` over leading batch axes."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise InputError("lambda must be positive")
    lhs, rhs = _kernels.get_backend(backend).rank2_pairings(B, X, lam)
    return lhs, rhs, lhs >= rhs - tol * (np.abs(lhs) + np.abs(rhs))


def quadratic_lambda_check(g, tol=0.0):
    """Is ``l^2 a11 + l (a11 + a22 + 2(a12 + a21)) + a22 >= 0`` for all ``l > 0``?

    Decided as: automatic when the middle coefficient is non-negative,
    otherwise ``|middle| <= 2 sqrt(a11 a22)``.  ``tol`` is absolute slack for
    the second comparison.
    """
    if g.a11 < -tol or g.a22 < -tol:
        return False
    mid = g.middle
    if mid >= 0:
        return True
    return bool(-mid <= 2 * np.sqrt(max(g.a11, 0.0) * max(g.a22, 0.0)) + tol)


def cauchy_schwarz_chain(g):
    """The three quantities ``(lead, middle, bound)`` of the chain

    ``-2(a12 + a21) - a11 - a22 <= 4(|alpha delta| + |beta epsilon|) <= 2 sqrt(a11 a22)``.
    """
    lead = -2 * g.a12_plus_a21 - g.a11 - g.a22
    mid = 4 * (abs(g.alpha * g.delta) + abs(g.beta * g.epsilon))
    bound = 2 * np.sqrt(g.a11 * g.a22)
    return float(lead), float(mid), float(bound)


def greek_arrays(B, X):
    """Vectorised Greek coefficients over a batch ``(N, 2, 2)``."""
    B = np.asarray(B, dtype=complex)
    X = np.asarray(X, dtype=complex)
    al = B[:, 0, 0] * X[:, 0, 1] - B[:, 0, 1] * X[:, 0, 0]
    be = B[:, 0, 0] * X[:, 1, 0] - B[:, 1, 0] * X[:, 0, 0]
    ga = B[:, 0, 1] * X[:, 1, 0] - B[:, 1, 0] * X[:, 0, 1]
    de = B[:, 1, 1] * X[:, 0, 1] - B[:, 0, 1] * X[:, 1, 1]
    ep = B[:, 1, 1] * X[:, 1, 0] - B[:, 1, 0] * X[:, 1, 1]
    return al, be, ga, de, ep


def random_pairs(rng, count):
    """``count`` Gaussian pairs ``(B, X)`` and log-uniform ``lambda`` in [1e-3, 1e3]."""
    def cplx():
        return rng.standard_normal((count, 2, 2)) + 1j * rng.standard_normal((count, 2, 2))
    B, X = cplx(), cplx()
    lam = 10.0 ** rng.uniform(-3.0, 3.0, size=count)
    return B, X, lam


def rank2_sweep(trials, seed, tol=1e-9, chunk=20000, backend=None):
    """Randomised check of the Schur inequality and the Cauchy-Schwarz chain.

    Returns a dict with violation counts, the worst normalised margins, and
    the first violating trial (if any).
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    schur_bad = chain_bad = quad_bad = 0
    worst_schur = np.inf
    worst_chain = np.inf
    witness = None
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        B, X, lam = random_pairs(rng, m)
        lhs, rhs, holds = schur_inequality_batch(B, X, lam, tol, backend)
        scale = np.abs(lhs) + np.abs(rhs)
        margin = (lhs - rhs) / np.where(scale > 0, scale, 1.0)
        worst_schur = min(worst_schur, float(margin.min()))
        al, be, ga, de, ep = greek_arrays(B, X)
        a11 = 2 * abs(al) ** 2 + 2 * abs(be) ** 2 + abs(ga) ** 2
        a22 = 2 * abs(de) ** 2 + 2 * abs(ep) ** 2 + abs(ga) ** 2
        a1221 = -(abs(al + de) ** 2 + abs(be + ep) ** 2)
        lead = -2 * a1221 - a11 - a22
        mid = 4 * (abs(al * de) + abs(be * ep))
        bound = 2 * np.sqrt(a11 * a22)
        cscale = np.maximum(np.maximum(np.abs(lead), mid), np.maximum(bound, 1e-300))
        ok_chain = (lead <= mid + tol * cscale) & (mid <= bound + tol * cscale)
        worst_chain = min(worst_chain, float(np.min((bound - lead) / cscale)))
        middle = a11 + a22 + 2 * a1221
        ok_quad = (middle >= 0) | (-middle <= bound + tol * cscale)
        schur_bad += int(np.sum(~holds))
        chain_bad += int(np.sum(~ok_chain))
        quad_bad += int(np.sum(~ok_quad))
        if witness is None and not (holds.all() and ok_chain.all() and ok_quad.all()):
            i = int(np.argmin(holds & ok_chain & ok_quad))
            witness = {"trial": done + i, "lambda": float(lam[i]),
                       "B": B[i].tolist(), "X": X[i].tolist(),
                       "lhs": float(lhs[i]), "rhs": float(rhs[i])}
        done += m
    return {
        "trials": trials, "seed": seed, "tol": tol,
        "schur_violations": schur_bad, "chain_violations": chain_bad,
        "quadratic_violations": quad_bad,
        "min_relative_margin": worst_schur, "min_chain_margin": worst_chain,
        "witness": witness,
    }


def random_vbma_solution(rng, eta0=1.0, b_scale=1.0):
    """A random point solution of ``(i Theta)^2 = eta0 vol Id`` with ``C > 0``.

    ``C`` is a random positive definite matrix, ``B`` is Gaussian, and ``A``
    solves ``AC + CA = {B, B^+} + eta0 Id``.
    """
    Z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    C = Z @ _h(Z) + 0.1 * np.eye(2)
    B = b_scale * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    A = anticommutator_solve(C, _anti(B, _h(B)) + eta0 * np.eye(2))
    A = 0.5 * (A + _h(A))
    return SurfaceBlocks(A, B, C)


def surface_preservation_check(blocks, eta0, tol=None, residual_tol=1e-10):
    """Full-space verdict for a rank-2 surface vbMA solution.

    Raises ``PreconditionError`` when the blocks do not solve the vbMA
    equation, when ``{A, C}`` is not positive definite, or when the Gram
    matrix is indefinite.  Raises ``InvariantViolation`` if a valid input
    comes out strictly semi-positive.
    """
    if not eta0 > 0:
        raise InputError("eta0 must be positive")
    AC = _anti(blocks.A, blocks.C)
    if np.linalg.eigvalsh(0.5 * (AC + _h(AC)))[0] <= 0:
        raise PreconditionError("{A, C} is not positive definite, so (i Theta)^2 "
                                "cannot be a positive multiple of the volume form")
    theta = blocks.curvature()
    res = vbma_residual(theta, eta0)
    scale = max(1.0, eta0, float(np.max(np.abs(AC))))
    if res > residual_tol * scale:
        raise PreconditionError(f"blocks do not solve the vbMA equation "
                                f"(residual {res:.3e})")
    verdict = classify(gram_matrix(theta), tol)
    if verdict.kind == Kind.INDEFINITE:
        raise PreconditionError("curvature is not MA-semi-positive")
    if verdict.kind != Kind.POSITIVE:
        raise InvariantViolation(
            f"semi-positive rank-2 solution is not positive "
            f"(min eigenvalue {verdict.min_eigenvalue:.3e})")
    return verdict
