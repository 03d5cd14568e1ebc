"""MA-positivity as a Hermitian Gram matrix.

For a curvature ``i Theta`` on C^n and an End(C^r)-valued (1, 0)-form ``a``
the MA quadratic form is

    Q(a) = sum_{k=0}^{n-1} Tr(i a ^ (i Theta)^k ^ a^* ^ (i Theta)^{n-1-k}) / vol.

The full space of (1, 0)-forms has the orthonormal basis ``E_{ab} dz^mu``,
flattened as ``mu * r^2 + a * r + b``.  ``gram_matrix`` returns ``H`` with
``Q(sum v_p e_p) = v^H H v``, i.e. ``H`` is conjugate-linear in its first slot.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InputError, InvariantViolation
from .forms import EndForm, curvature_powers, top_pairing, wedge_arrays

FLOOR = 1e-12
REL_TOL = 1e-8


class Kind(str, Enum):
    POSITIVE = "Positive"
    STRICTLY_SEMI_POSITIVE = "StrictlySemiPositive"
    INDEFINITE = "Indefinite"
    ZERO = "Zero"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Verdict:
    kind: Kind
    min_eigenvalue: float
    kernel_dimension: int
    witness: np.ndarray
    tol: float
    eigenvalues: np.ndarray = field(repr=False)

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "min_eigenvalue": float(self.min_eigenvalue),
            "kernel_dimension": int(self.kernel_dimension),
            "tol": float(self.tol),
            "witness": [[float(z.real), float(z.imag)] for z in self.witness],
        }


@dataclass(frozen=True)
class MaGram:
    matrix: np.ndarray
    basis: list

    @property
    def dim(self):
        return self.matrix.shape[0]


class Subspace:
    """Span of linearly independent End-valued (1, 0)-forms.

    ``coords`` holds each spanning form as a column in the full
    ``E_{ab} dz^mu`` basis.
    """

    def __init__(self, forms, labels=None, cond_limit=1e10):
        forms = list(forms)
        if not forms:
            raise InputError("a subspace needs at least one spanning form")
        n, r = forms[0].n, forms[0].r
        for f in forms:
            if f.bidegree != (1, 0) or f.n != n or f.r != r:
                raise InputError("subspace elements must be (1, 0)-forms of one shape")
        self.n, self.r = n, r
        self.forms = forms
        self.labels = list(labels) if labels is not None else list(range(len(forms)))
        self.coords = np.stack([f.coeffs.reshape(-1) for f in forms], axis=1)
        frob = self.coords.conj().T @ self.coords
        s = np.linalg.svd(frob, compute_uv=False)
        if s[-1] <= s[0] / cond_limit:
            raise InputError("spanning set of the subspace is linearly dependent")

    @property
    def dim(self):
        return len(self.forms)


def basis_labels(n, r):
    return [(mu, a, b) for mu in range(n) for a in range(r) for b in range(r)]


def basis_forms_array(n, r):
    """Flat coefficients of every basis form ``E_{ab} dz^mu``: ``(n r^2, n, r, r)``."""
    N = n * r * r
    out = np.zeros((N, n, r, r), dtype=complex)
    for p, (mu, a, b) in enumerate(basis_labels(n, r)):
        out[p, mu, a, b] = 1.0
    return out


def _side_arrays(theta, A, powers=None):
    """For each ``k`` the flat arrays ``i a ^ P_k`` and ``a^* ^ P_{n-1-k}``.

    ``A`` is a batch ``(N, n, r, r)`` of (1, 0)-form coefficients.
    """
    n, r = theta.n, theta.r
    powers = powers if powers is not None else curvature_powers(theta, n - 1)
    Astar = np.conj(np.swapaxes(A, -1, -2))
    out = []
    for k in range(n):
        P = powers[k].flat()[None]
        left = 1j * wedge_arrays(A, P, n, r, (1, 0), (k, k))
        Pr = powers[n - 1 - k].flat()[None]
        right = wedge_arrays(Astar, Pr, n, r, (0, 1), (n - 1 - k, n - 1 - k))
        out.append((k, left, right))
    return out


def ma_quadratic_form_batch(theta, A, powers=None):
    """``Q`` evaluated on a batch of (1, 0)-forms given as ``(N, n, r, r)``."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 4 or A.shape[1:] != (theta.n, theta.r, theta.r):
        raise InputError(f"expected (N, {theta.n}, {theta.r}, {theta.r}) coefficients; "
                         f"got {A.shape}")
    total = np.zeros(A.shape[0], dtype=complex)
    for k, left, right in _side_arrays(theta, A, powers):
        tf, tg, fac = top_pairing(theta.n, (k + 1, k))
        total += np.einsum("t,ntab,ntba->n", fac, left[:, tf], right[:, tg])
    scale = max(1.0, float(np.max(np.abs(total), initial=0.0)))
    if np.max(np.abs(total.imag), initial=0.0) > 1e-10 * scale:
        raise InputError("MA quadratic form came out non-real; curvature not Hermitian?")
    return total.real


def ma_quadratic_form(theta, a):
    """``Q(a)`` for a single End-valued (1, 0)-form."""
    if not isinstance(a, EndForm) or a.bidegree != (1, 0):
        raise InputError("the MA quadratic form takes an End-valued (1, 0)-form")
    if (a.n, a.r) != (theta.n, theta.r):
        raise InputError("form and curvature differ in dimension or rank")
    return float(ma_quadratic_form_batch(theta, a.coeffs[:, 0][None])[0])


def _full_gram_direct(theta):
    n, r = theta.n, theta.r
    E = basis_forms_array(n, r)
    H = np.zeros((len(E), len(E)), dtype=complex)
    for k, left, right in _side_arrays(theta, E):
        tf, tg, fac = top_pairing(n, (k + 1, k))
        # H[q, p] = sum_t fac_t Tr(left_p[tf_t] right_q[tg_t])
        H += np.einsum("t,ptab,qtba->qp", fac, left[:, tf], right[:, tg])
    return H


def _full_gram_polarization(theta):
    n, r = theta.n, theta.r
    N = n * r * r
    E = basis_forms_array(n, r)
    powers = curvature_powers(theta, n - 1)
    diag = ma_quadratic_form_batch(theta, E, powers)
    H = np.diag(diag).astype(complex)
    iu, ju = np.triu_indices(N, 1)

    def q(coef):
        return ma_quadratic_form_batch(theta, E[iu] + coef * E[ju], powers)

    # h(x, y) = 1/4[Q(x+y) - Q(x-y)] - i/4[Q(x+iy) - Q(x-iy)], conjugate-linear in x
    vals = 0.25 * (q(1) - q(-1)) - 0.25j * (q(1j) - q(-1j))
    H[iu, ju] = vals
    H[ju, iu] = np.conj(vals)
    return H


def gram_matrix(theta, W=None, method="direct"):
    """Hermitian Gram matrix of the MA form, on the full space or on ``W``.

    ``method="direct"`` contracts the sesquilinear form on basis pairs;
    ``method="polarization"`` rebuilds it from quadratic-form values only.
    """
    if method == "direct":
        H = _full_gram_direct(theta)
    elif method == "polarization":
        H = _full_gram_polarization(theta)
    else:
        raise InputError(f"unknown Gram method {method!r}")
    H = 0.5 * (H + H.conj().T)
    if W is None:
        return MaGram(H, basis_labels(theta.n, theta.r))
    if (W.n, W.r) != (theta.n, theta.r):
        raise InputError("subspace and curvature differ in dimension or rank")
    V = W.coords
    HW = V.conj().T @ H @ V
    return MaGram(0.5 * (HW + HW.conj().T), list(W.labels))


def default_tol(H):
    return max(REL_TOL * float(np.linalg.norm(H, 2)), FLOOR)


def classify(H, tol=None):
    """Spectral verdict of a Hermitian matrix (or ``MaGram``)."""
    if isinstance(H, MaGram):
        H = H.matrix
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InputError("classify needs a square matrix")
    scale = max(float(np.max(np.abs(H), initial=0.0)), 1.0)
    if np.max(np.abs(H - H.conj().T), initial=0.0) > 1e-10 * scale:
        raise InputError("matrix is not Hermitian")
    if tol is None:
        tol = default_tol(H)
    elif tol <= 0:
        raise InputError("tolerance must be positive")
    w, V = np.linalg.eigh(0.5 * (H + H.conj().T))
    kernel = int(np.sum(np.abs(w) <= tol))
    witness = V[:, 0]
    if np.max(np.abs(H), initial=0.0) <= FLOOR:
        kind = Kind.ZERO
    elif w[0] > tol:
        kind = Kind.POSITIVE
    elif w[0] < -tol:
        kind = Kind.INDEFINITE
    else:
        kind = Kind.STRICTLY_SEMI_POSITIVE
    return Verdict(kind, float(w[0]), kernel, witness, float(tol), w)


def combine_kinds(kinds):
    """Verdict kind of a block-diagonal matrix from the kinds of its blocks."""
    kinds = list(kinds)
    if Kind.INDEFINITE in kinds:
        return Kind.INDEFINITE
    if all(k == Kind.ZERO for k in kinds):
        return Kind.ZERO
    if Kind.STRICTLY_SEMI_POSITIVE in kinds or Kind.ZERO in kinds:
        return Kind.STRICTLY_SEMI_POSITIVE
    return Kind.POSITIVE


def random_directions(rng, count, n, r, W=None):
    """Unit-Frobenius random (1, 0)-forms as an ``(count, n, r, r)`` array.

    Directions are standard complex Gaussians (in ``W``'s spanning
    coordinates when a subspace is given), then normalised.
    """
    if W is None:
        Z = rng.standard_normal((count, n, r, r)) + 1j * rng.standard_normal((count, n, r, r))
    else:
        c = rng.standard_normal((count, W.dim)) + 1j * rng.standard_normal((count, W.dim))
        Z = (c @ W.coords.T).reshape(count, n, r, r)
    norms = np.sqrt(np.sum(np.abs(Z) ** 2, axis=(1, 2, 3)))
    return Z / norms[:, None, None, None]


def monte_carlo_min(theta, W=None, trials=1000, seed=0, extra=None, chunk=4096):
    """Smallest ``Q`` over ``trials`` random unit directions.

    Uses ``numpy.random.default_rng(seed)`` (PCG64).  ``extra`` may hold
    further directions (flat coefficient vectors in the full basis), which
    are normalised and included.  The evaluation goes through the wedge
    products, not the Gram matrix.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    n, r = theta.n, theta.r
    powers = curvature_powers(theta, n - 1)
    best = np.inf
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        best = min(best, float(ma_quadratic_form_batch(
            theta, random_directions(rng, m, n, r, W), powers).min()))
        done += m
    if extra is not None:
        X = np.atleast_2d(np.asarray(extra, dtype=complex))
        X = X / np.linalg.norm(X, axis=1, keepdims=True)
        best = min(best, float(ma_quadratic_form_batch(
            theta, X.reshape(-1, n, r, r), powers).min()))
    return best


def restrict(H, groups):
    """Sub-blocks ``H[g][:, g]`` for each index group."""
    H = H.matrix if isinstance(H, MaGram) else H
    return [H[np.ix_(g, g)] for g in groups]


def off_block_max(H, groups):
    """Largest entry of ``H`` coupling two different index groups."""
    H = H.matrix if isinstance(H, MaGram) else H
    label = np.full(H.shape[0], -1)
    for i, g in enumerate(groups):
        label[list(g)] = i
    if np.any(label < 0):
        raise InputError("groups do not cover every basis index")
    mask = label[:, None] != label[None, :]
    return float(np.max(np.abs(H[mask]), initial=0.0))


def vortex_groups(base_rank):
    """The four decoupled index groups for a rank ``base_rank + 1`` vortex curvature.

    Coordinates are ``(w, z) = (0, 1)``; bundle index ``base_rank`` is the
    line-bundle slot.  Each group lists flat indices ``mu * r^2 + row * r + col``.
    """
    n1 = base_rank
    r = n1 + 1
    low = range(n1)

    def idx(mu, a, b):
        return mu * r * r + a * r + b

    g1 = ([idx(0, i, j) for i in low for j in low] + [idx(1, n1, j) for j in low]
          + [idx(0, n1, n1)])
    g2 = ([idx(1, i, j) for i in low for j in low] + [idx(0, i, n1) for i in low]
          + [idx(1, n1, n1)])
    g3 = [idx(1, i, n1) for i in low]
    g4 = [idx(0, n1, j) for j in low]
    return [g1, g2, g3, g4]


def decoupling_blocks(theta, base_rank, tol=1e-12):
    """Index partition under which the Gram matrix of a vortex curvature splits.

    ``theta`` must live on C^2 with rank ``base_rank + 1`` and have the
    product-point pattern: in the ``w``-direction (index 0) and the
    ``z``-direction (index 1) the diagonal coefficients are block diagonal,
    and the mixed coefficient only couples the base block to the line slot.
    Returns ``(groups, gram)``; raises if the Gram is not block diagonal.
    """
    n1 = base_rank
    if theta.n != 2 or theta.r != n1 + 1 or n1 < 1:
        raise InputError("vortex shape needs n = 2 and rank = base_rank + 1")
    c = theta.coeffs
    scale = max(theta.max_abs(), 1.0)
    bad = (np.abs(c[0, 0][:n1, n1]).max() + np.abs(c[1, 1][:n1, n1]).max()
           + np.abs(c[0, 1][n1, :]).max() + np.abs(c[0, 1][:, :n1]).max())
    if bad > 1e-12 * scale:
        raise InputError("curvature does not have the vortex product-point shape")
    groups = vortex_groups(n1)
    gram = gram_matrix(theta)
    leak = off_block_max(gram, groups)
    if leak > tol * max(float(np.linalg.norm(gram.matrix, 2)), 1.0):
        raise InvariantViolation(f"Gram matrix couples the vortex groups (max entry {leak:.3e})")
    return groups, gram
