"""Rank-2 vortex bundles over threefolds ``X x P^1`` with ``dim X = 2``.

Coordinates are ``(z1, z2, zeta)`` with ``zeta`` the P^1 direction.  All
(1, 1)-forms are stored through their coefficients in the ``i dz ^ dzbar``
basis, so "omitting factors of i" is automatic.  The stored curvature is

    [[Theta1 + a sigma, N], [N^*, Theta2 + b sigma]]

with ``sigma = i dzeta ^ dzetabar``, ``N = sum_mu l_mu i dz^mu ^ dzetabar``
and ``G = -l ^ lbar`` (coefficients ``-l_mu conj(l_nu)``).

At a point, coordinates are chosen with ``3a Theta1 + G = Id`` and
``3b Theta2 + G = diag(lam1, lam2)``; the reduced vbMA system then reads

    2b - a (lam1 |l2|^2 + lam2 |l1|^2) = c,
    2a lam1 lam2 - b (|l1|^2 + |l2|^2) = c.

The restricted subspace ``W`` is spanned by ``E_10 dzeta``, ``E_00 dz1``,
``E_00 dz2``, ``E_11 dz1`` and ``E_11 dz2``.  On it the MA Gram matrix equals
``K [[Delta, -w^*], [-w, M]] K`` with ``K = diag(1/(3ab), 1, 1, 1, 1)``, so its
positivity is that of ``X = Delta M - w w^*``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, InvariantViolation
from .forms import MAX_N, Curvature, EndForm, curvature_power, multi_indices, wedge
from .gram import Kind, Subspace, classify, gram_matrix
from .seeding import child_seeds

REL_TOL = 1e-10


def _scale(*xs):
    return max(1.0, *(abs(x) for x in xs))


def region_p_contains(a, b, lam1, lam2, x1, x2):
    """Strict membership of ``(|l1|^2, |l2|^2)`` in region P (axes included)."""
    return (x1 >= 0 and x2 >= 0
            and lam1 * x2 + lam2 * x1 < 2 * b / a
            and x1 + x2 < 2 * a * lam1 * lam2 / b)


@dataclass(frozen=True)
class ThreefoldInstance:
    """Pointwise data of a threefold vortex curvature solving the reduced vbMA system."""

    a: float
    b: float
    lam1: float
    lam2: float
    ell: np.ndarray
    c: float

    def __post_init__(self):
        ell = np.asarray(self.ell, dtype=complex).reshape(-1)
        if ell.shape != (2,):
            raise InputError("ell must have two complex components")
        object.__setattr__(self, "ell", ell)
        for name in ("a", "b", "lam1", "lam2", "c"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise InputError(f"{name} must be a positive real, got {v}")
        res = self.residuals()
        if max(res) > REL_TOL * _scale(self.c, 2 * self.b, 2 * self.a * self.lam1 * self.lam2):
            raise InputError(f"reduced vbMA equations fail: residuals {res}")
        x1, x2 = self.ell_sq
        if not region_p_contains(self.a, self.b, self.lam1, self.lam2, x1, x2):
            raise InputError("(|l1|^2, |l2|^2) lies outside region P")

    @classmethod
    def from_coordinates(cls, a, b, lam1, lam2, ell):
        """Instance with ``c`` read off the first equation."""
        x1, x2 = np.abs(np.asarray(ell, dtype=complex)) ** 2
        c = 2 * b - a * (lam1 * x2 + lam2 * x1)
        return cls(float(a), float(b), float(lam1), float(lam2), ell, float(c))

    @property
    def ell_sq(self):
        x = np.abs(self.ell) ** 2
        return float(x[0]), float(x[1])

    @property
    def c1(self):
        x1, x2 = self.ell_sq
        return 2 * self.b - self.a * self.lam1 * x2 - self.a * self.lam2 * x1

    @property
    def c2(self):
        x1, x2 = self.ell_sq
        return 2 * self.a * self.lam1 * self.lam2 - self.b * (x1 + x2)

    def residuals(self):
        return abs(self.c1 - self.c), abs(self.c2 - self.c)

    def vortex_consistent(self, r2, tol=1e-10):
        """Whether ``a + b = 4 r2 + 2`` for the integer ``r2``."""
        return abs(self.a + self.b - (4 * r2 + 2)) <= tol * _scale(self.a + self.b)

    def with_phases(self, phases):
        """Copy with ``l_i`` multiplied by ``exp(i phases[i])``."""
        return ThreefoldInstance(self.a, self.b, self.lam1, self.lam2,
                                 self.ell * np.exp(1j * np.asarray(phases)), self.c)


def _random_phases(rng):
    return np.exp(2j * np.pi * rng.random(2))


def make_instance(a, b, lam1, lam2, t, seed=0):
    """Instance with ``|l1|^2 = t s`` and ``|l2|^2 = (1 - t) s``, or ``None``.

    ``s`` solves ``s (b - a (lam1 (1 - t) + lam2 t)) = 2 a lam1 lam2 - 2 b``.
    When both sides vanish identically every ``s`` works and one is drawn
    uniformly from the admissible interval.
    """
    for name, v in (("a", a), ("b", b), ("lam1", lam1), ("lam2", lam2)):
        if not v > 0:
            raise InputError(f"{name} must be positive")
    if not 0.0 <= t <= 1.0:
        raise InputError("direction t must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    coef = b - a * (lam1 * (1 - t) + lam2 * t)
    rhs = 2 * a * lam1 * lam2 - 2 * b
    eps = 1e-12 * _scale(b, a * lam1, a * lam2, 2 * a * lam1 * lam2)
    if abs(coef) <= eps:
        if abs(rhs) > eps:
            return None
        weight = lam1 * (1 - t) + lam2 * t
        s_max = min(2 * b / (a * weight), 2 * a * lam1 * lam2 / b)
        s = rng.random() * s_max
    else:
        s = rhs / coef
    if s < 0:
        return None
    x1, x2 = t * s, (1 - t) * s
    if not region_p_contains(a, b, lam1, lam2, x1, x2):
        return None
    c = 2 * a * lam1 * lam2 - b * s
    if c <= 0:
        return None
    ell = np.sqrt([x1, x2]) * _random_phases(rng)
    return ThreefoldInstance(float(a), float(b), float(lam1), float(lam2), ell, float(c))


def solve_lambda2(a, b, lam1, t, s):
    """``lam2`` making ``|l1|^2 = t s``, ``|l2|^2 = (1 - t) s`` compatible (may be <= 0)."""
    return (s * b - s * a * lam1 * (1 - t) + 2 * b) / (a * (2 * lam1 + s * t))


def random_instances(count, seed=0, box=(0.2, 5.0), s_max=3.0):
    """``count`` valid instances drawn by solving for ``lam2``.

    ``a``, ``b``, ``lam1`` are uniform in ``box``, ``t`` uniform in [0, 1] and
    ``s`` uniform in ``[0, s_max]``; draws that leave region P are rejected.
    """
    rng = np.random.default_rng(seed)
    lo, hi = box
    out = []
    while len(out) < count:
        a, b, lam1 = rng.uniform(lo, hi, 3)
        t, s = rng.random(), rng.uniform(0.0, s_max)
        lam2 = solve_lambda2(a, b, lam1, t, s)
        x1, x2 = t * s, (1 - t) * s
        if lam2 <= 0 or not region_p_contains(a, b, lam1, lam2, x1, x2):
            continue
        ell = np.sqrt([x1, x2]) * _random_phases(rng)
        out.append(ThreefoldInstance.from_coordinates(a, b, lam1, lam2, ell))
    return out


# ---------------------------------------------------------------- curvature


def _scalar_form(n, p, coeffs):
    coeffs = np.asarray(coeffs, dtype=complex)
    return EndForm(n, 1, p, p, coeffs.reshape(coeffs.shape[0], coeffs.shape[1], 1, 1))


def _embed(form, n_total):
    """Pull a scalar form on C^n back to C^n x C^(n_total - n)."""
    terms = {}
    for i, I in enumerate(multi_indices(form.n, form.p)):
        for j, J in enumerate(multi_indices(form.n, form.q)):
            if form.coeffs[i, j, 0, 0] != 0:
                terms[(I, J)] = form.coeffs[i, j]
    return EndForm.from_terms(n_total, 1, form.p, form.q, terms)


def _power(x, k):
    out = EndForm.identity(x.n, 1)
    for _ in range(k):
        out = wedge(out, x)
    return out


def block_curvature(theta1, theta2, a, b, ell):
    """Rank-2 curvature on ``C^n x C`` from base coefficient matrices and ``l``."""
    theta1 = np.asarray(theta1, dtype=complex)
    theta2 = np.asarray(theta2, dtype=complex)
    ell = np.asarray(ell, dtype=complex).reshape(-1)
    n = theta1.shape[0]
    if theta1.shape != (n, n) or theta2.shape != (n, n) or ell.shape != (n,):
        raise InputError("theta1, theta2 must be n x n and ell of length n")
    if n + 1 > MAX_N:
        raise InputError(f"base dimension {n} exceeds the supported {MAX_N - 1}")
    c = np.zeros((n + 1, n + 1, 2, 2), dtype=complex)
    c[:n, :n, 0, 0] = theta1
    c[:n, :n, 1, 1] = theta2
    c[n, n, 0, 0] = a
    c[n, n, 1, 1] = b
    c[:n, n, 0, 1] = ell
    c[n, :n, 1, 0] = ell.conj()
    return Curvature(c)


@dataclass(frozen=True)
class PowerBlocks:
    """Closed-form pieces of the ``k``-th power, as scalar forms on the base."""

    k: int
    theta1_k: EndForm
    theta2_k: EndForm
    P1: EndForm
    P2: EndForm
    Q: EndForm
    error: float


def _power_blocks(x, y, G, a, b, k):
    n = x.n
    xp = [_power(x, j) for j in range(k + 1)]
    yp = [_power(y, j) for j in range(k + 1)]

    def zero(deg):
        return EndForm(n, 1, deg, deg)

    P1 = xp[k - 1] * (k * a)
    P2 = yp[k - 1] * (k * b)
    if k >= 2:
        s1, s2 = zero(k - 2), zero(k - 2)
        for j in range(k - 1):
            s1 = s1 + wedge(xp[j], yp[k - 2 - j]) * (j + 1)
            s2 = s2 + wedge(yp[j], xp[k - 2 - j]) * (j + 1)
        P1 = P1 + wedge(G, s1)
        P2 = P2 + wedge(G, s2)
    Q = zero(k - 1)
    for j in range(k):
        Q = Q + wedge(xp[j], yp[k - 1 - j])
    return xp[k], yp[k], P1, P2, Q


def _assemble_power(blocks, ell, n):
    theta1_k, theta2_k, P1, P2, Q = blocks
    N = n + 1
    sigma = EndForm.from_terms(N, 1, 1, 1, {((n,), (n,)): 1.0})
    upper = EndForm.from_terms(N, 1, 1, 1, {((mu,), (n,)): ell[mu] for mu in range(n)})
    lower = EndForm.from_terms(N, 1, 1, 1, {((n,), (mu,)): np.conj(ell[mu]) for mu in range(n)})
    e = [_embed(f, N) for f in (theta1_k, theta2_k, P1, P2, Q)]
    tl = e[0] + wedge(e[2], sigma)
    br = e[1] + wedge(e[3], sigma)
    tr = wedge(e[4], upper)
    bl = wedge(e[4], lower)
    k = tl.p
    out = np.zeros(tl.coeffs.shape[:2] + (2, 2), dtype=complex)
    out[..., 0, 0] = tl.coeffs[..., 0, 0]
    out[..., 1, 1] = br.coeffs[..., 0, 0]
    out[..., 0, 1] = tr.coeffs[..., 0, 0]
    out[..., 1, 0] = bl.coeffs[..., 0, 0]
    return EndForm(N, 2, k, k, out)


def theta_powers(theta1, theta2, a, b, ell, k, tol=1e-12):
    """Block decomposition of the ``k``-th power of the block curvature.

    ``theta1``, ``theta2`` are ``n x n`` coefficient matrices on the base and
    ``G = -l ^ lbar``.  The closed form is checked against the direct wedge
    power; a relative mismatch above ``tol`` raises ``InvariantViolation``.
    """
    theta1 = np.asarray(theta1, dtype=complex)
    n = theta1.shape[0]
    if int(k) != k or not 1 <= k <= n + 1:
        raise InputError(f"power k must be an integer in 1..{n + 1}")
    ell = np.asarray(ell, dtype=complex).reshape(-1)
    theta = block_curvature(theta1, theta2, a, b, ell)
    x = _scalar_form(n, 1, theta1)
    y = _scalar_form(n, 1, theta2)
    G = _scalar_form(n, 1, -np.outer(ell, ell.conj()))
    blocks = _power_blocks(x, y, G, a, b, k)
    closed = _assemble_power(blocks, ell, n)
    direct = curvature_power(theta, k)
    scale = max(direct.max_abs(), 1.0)
    error = float(np.max(np.abs(closed.coeffs - direct.coeffs), initial=0.0)) / scale
    if error > tol:
        raise InvariantViolation(f"block power formula off by {error:.3e} (relative) at k={k}")
    return PowerBlocks(k, *blocks, error)


def base_forms(inst):
    """Coefficient matrices ``(Theta1, Theta2, G)`` at the instance point."""
    ell = inst.ell
    G = -np.outer(ell, ell.conj())
    theta1 = (np.eye(2) - G) / (3 * inst.a)
    theta2 = (np.diag([inst.lam1, inst.lam2]) - G) / (3 * inst.b)
    return theta1, theta2, G


def assemble_curvature(inst):
    theta1, theta2, _ = base_forms(inst)
    return block_curvature(theta1, theta2, inst.a, inst.b, inst.ell)


def vbma_constant(inst):
    """``(i Theta)^3 / vol`` should be ``c / (3ab) Id``."""
    return inst.c / (3 * inst.a * inst.b)


# ------------------------------------------------------- restricted positivity


@dataclass(frozen=True)
class RestrictedData:
    Delta: float
    M: np.ndarray
    w: np.ndarray
    X: np.ndarray
    detA: float
    detA_closed: float

    @property
    def w1(self):
        return self.w[:2]

    @property
    def w2(self):
        return self.w[2:]


def delta_closed(inst):
    a, b, l1, l2 = inst.a, inst.b, inst.lam1, inst.lam2
    x1, x2 = inst.ell_sq
    return (2 * b * b + 2 * a * a * l1 * l2 + a * b * (l1 + l2)
            + b * (2 * b + a) * (x1 + x2) + a * (2 * a + b) * (l2 * x1 + l1 * x2))


def delta_from_forms(inst):
    """Coefficient of ``k^2`` in the reduced positivity form, by wedge products."""
    a, b = inst.a, inst.b
    t1 = _scalar_form(2, 1, np.eye(2))
    t2 = _scalar_form(2, 1, np.diag([inst.lam1, inst.lam2]))
    G = _scalar_form(2, 1, -np.outer(inst.ell, inst.ell.conj()))
    form = (wedge(t1, t1) * b ** 2 + wedge(t2, t2) * a ** 2 + wedge(t1, t2) * (a * b)
            - wedge(G, t1 * (b * (2 * b + a)) + t2 * (a * (2 * a + b))))
    return float(form.top()[0, 0].real)


def m_matrix(inst):
    l1, l2 = inst.ell
    x1, x2 = inst.ell_sq
    return np.array([
        [2, 0, -x2, l1 * np.conj(l2)],
        [0, 2, l2 * np.conj(l1), -x1],
        [-x2, l1 * np.conj(l2), 2 * inst.lam2, 0],
        [l2 * np.conj(l1), -x1, 0, 2 * inst.lam1],
    ], dtype=complex)


def w_vector(inst):
    a, b, lam1, lam2 = inst.a, inst.b, inst.lam1, inst.lam2
    l1, l2 = inst.ell
    return np.array([l1 * (2 * b + a * lam2), l2 * (2 * b + a * lam1),
                     l1 * (b + 2 * a * lam2), l2 * (b + 2 * a * lam1)], dtype=complex)


def build_X(inst):
    """``Delta``, ``M``, ``w`` and ``X = Delta M - w w^*`` for the instance."""
    Delta = delta_from_forms(inst)
    closed = delta_closed(inst)
    if abs(Delta - closed) > 1e-12 * _scale(closed):
        raise InvariantViolation(f"Delta by wedge {Delta} disagrees with closed form {closed}")
    if Delta <= 0:
        raise InvariantViolation(f"Delta = {Delta} is not positive")
    M = m_matrix(inst)
    w = w_vector(inst)
    X = Delta * M - np.outer(w, w.conj())
    X = 0.5 * (X + X.conj().T)
    detA = float(np.linalg.det(X[:2, :2]).real)
    w1 = w[:2]
    detA_closed = float(2 * Delta * (2 * Delta - np.vdot(w1, w1).real))
    return RestrictedData(Delta, M, w, X, detA, detA_closed)


def restricted_subspace():
    """The five spanning forms of ``W`` on C^3 with rank 2."""
    def e(mu, row, col):
        x = np.zeros((3, 2, 2), dtype=complex)
        x[mu, row, col] = 1.0
        return EndForm.one_form(x)

    labels = ["E10 dzeta", "E00 dz1", "E00 dz2", "E11 dz1", "E11 dz2"]
    return Subspace([e(2, 1, 0), e(0, 0, 0), e(1, 0, 0), e(0, 1, 1), e(1, 1, 1)], labels)


def restricted_gram(inst):
    """5 x 5 Gram matrix of the MA form of the assembled curvature on ``W``."""
    return gram_matrix(assemble_curvature(inst), restricted_subspace()).matrix


def gram_model(inst, data=None):
    """``K [[Delta, -w^*], [-w, M]] K`` predicted for :func:`restricted_gram`."""
    data = data if data is not None else build_X(inst)
    kappa = 1.0 / (3 * inst.a * inst.b)
    H = np.zeros((5, 5), dtype=complex)
    H[0, 0] = kappa ** 2 * data.Delta
    H[1:, 0] = -kappa * data.w
    H[0, 1:] = -kappa * data.w.conj()
    H[1:, 1:] = data.M
    return H


@dataclass(frozen=True)
class VerdictComparison:
    kind_X: Kind
    kind_HW: Kind
    min_X: float
    min_HW: float
    model_error: float

    @property
    def agree(self):
        return self.kind_X == self.kind_HW


def compare_restricted(inst):
    """Classify ``X`` and the restricted Gram ``H_W`` side by side."""
    data = build_X(inst)
    HW = restricted_gram(inst)
    model = gram_model(inst, data)
    err = float(np.max(np.abs(HW - model))) / max(float(np.max(np.abs(model))), 1.0)
    vx, vh = classify(data.X), classify(HW)
    return VerdictComparison(vx.kind, vh.kind, vx.min_eigenvalue, vh.min_eigenvalue, err)


# ------------------------------------------------------------- determinants


def g_values(a, b, lam1, lam2, x1, x2):
    """``(f, g1, g2)`` at ``|l1|^2 = x1``, ``|l2|^2 = x2`` (array friendly)."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    L = x1 + x2
    p = lam1 * lam2
    f = (4 * p * b * b + 4 * p * p * a * a
         + 2 * a * b * p * (lam1 + lam2 - L - lam1 * x2 - lam2 * x1)
         - a * a * p * (lam1 ** 2 * x2 + lam2 ** 2 * x1)
         - b * b * (lam1 * x1 + lam2 * x2))
    cross = (lam1 - lam2) ** 2 * x1 * x2
    g2 = 2 * f + a * b * cross
    g1 = f * L + a * a * p * cross
    return f, g1, g2


@dataclass(frozen=True)
class DetDecomposition:
    c1: float
    c2: float
    c3: float
    f: float
    g1: float
    g2: float
    detX: float
    Delta: float
    lhs: float
    rhs: float
    rel_error: float


def det_decomposition(inst, rtol=1e-9):
    """Direct ``det X / (2 Delta^3)`` against ``(c2 g2 + c1 g1) / (a lam1 lam2)``."""
    a, b, lam1, lam2 = inst.a, inst.b, inst.lam1, inst.lam2
    x1, x2 = inst.ell_sq
    L = x1 + x2
    c1, c2 = inst.c1, inst.c2
    c3 = 4 * lam1 * lam2 - lam1 * x2 * L - lam2 * x1 * L
    c3_alt = 2 * c2 / a + c1 * L / a
    if abs(c3 - c3_alt) > 1e-12 * _scale(c3, 4 * lam1 * lam2, c3_alt):
        raise InvariantViolation(f"c3 = {c3} but 2 c2/a + c1 |l|^2/a = {c3_alt}")
    data = build_X(inst)
    detX = float(np.linalg.det(data.X).real)
    f, g1, g2 = (float(v) for v in g_values(a, b, lam1, lam2, x1, x2))
    lhs = detX / (2 * data.Delta ** 3)
    rhs = (c2 * g2 + c1 * g1) / (a * lam1 * lam2)
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    if rel > rtol:
        raise InvariantViolation(f"det identity off by {rel:.3e} (relative)")
    return DetDecomposition(c1, c2, c3, f, g1, g2, detX, data.Delta, lhs, rhs, rel)


def corner_point(a, b, lam1, lam2, clamp=1e-12):
    """Intersection of the two slanted edges of P.

    Returns ``(x1, x2, note)`` or ``None`` when ``lam1 == lam2`` or the point
    is outside the closed positive quadrant.  Coordinates in ``[-clamp, 0)``
    are set to zero and flagged in ``note``.
    """
    if lam1 == lam2:
        return None
    x1 = 2 * (b * b - a * a * lam1 ** 2 * lam2) / (a * b * (lam2 - lam1))
    x2 = 2 * (b * b - a * a * lam1 * lam2 ** 2) / (a * b * (lam1 - lam2))
    note = ""
    scale = 2 * a * lam1 * lam2 / b
    if min(x1, x2) < -clamp * scale:
        return None
    if x1 < 0 or x2 < 0:
        note = "clamped tiny negative coordinate to 0"
        x1, x2 = max(x1, 0.0), max(x2, 0.0)
    return x1, x2, note


def g2_scale(a, b, lam1, lam2, x1, x2):
    """Magnitude of the terms making up ``g2``, for relative comparisons."""
    p = lam1 * lam2
    L = x1 + x2
    terms = [4 * p * b * b, 4 * p * p * a * a, 2 * a * b * p * (lam1 + lam2),
             2 * a * b * p * (L + lam1 * x2 + lam2 * x1),
             a * a * p * (lam1 ** 2 * x2 + lam2 ** 2 * x1),
             b * b * (lam1 * x1 + lam2 * x2), a * b * (lam1 - lam2) ** 2 * x1 * x2]
    return max(terms)


def equal_lambda_boundary(a, b, lam):
    """For ``lam1 = lam2 = lam``: ``(z0, f(z0), closed form)`` at the far end of P."""
    z_line = 2 * b / (a * lam)
    z_sum = 2 * a * lam * lam / b
    if z_line <= z_sum:
        z0 = z_line
        closed = (2 / a) * (b + 2 * a * lam) * (a * a * lam ** 3 - b * b)
    else:
        z0 = z_sum
        closed = (2 * lam * lam / b) * (2 * b + a * lam) * (b * b - a * a * lam ** 3)
    f, _, _ = g_values(a, b, lam, lam, z0 / 2, z0 / 2)
    return z0, float(f), float(closed)


def region_p_box(a, b, lam1, lam2):
    """Bounding box ``(x1_max, x2_max)`` of region P."""
    s = 2 * a * lam1 * lam2 / b
    return min(2 * b / (a * lam2), s), min(2 * b / (a * lam1), s)


def sample_region_p(a, b, lam1, lam2, count, rng, max_rounds=1000):
    """Uniform points of P by rejection from its bounding box."""
    h1, h2 = region_p_box(a, b, lam1, lam2)
    got = []
    total = 0
    for _ in range(max_rounds):
        need = count - total
        if need <= 0:
            break
        pts = rng.random((2 * need + 8, 2)) * [h1, h2]
        x1, x2 = pts[:, 0], pts[:, 1]
        keep = (lam1 * x2 + lam2 * x1 < 2 * b / a) & (x1 + x2 < 2 * a * lam1 * lam2 / b)
        pts = pts[keep][:need]
        got.append(pts)
        total += len(pts)
    if total < count:
        raise InvariantViolation(f"region P sampler produced {total} of {count} points")
    return np.concatenate(got)


def region_p_sweep(a, b, lam1, lam2, samples=1000, seed=0, strict=True):
    """Minima of ``g1``, ``g2`` over uniform samples of P plus corner/boundary checks."""
    for name, v in (("a", a), ("b", b), ("lam1", lam1), ("lam2", lam2)):
        if not v > 0:
            raise InputError(f"{name} must be positive")
    if samples < 1:
        raise InputError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    pts = sample_region_p(a, b, lam1, lam2, samples, rng)
    f, g1, g2 = g_values(a, b, lam1, lam2, pts[:, 0], pts[:, 1])
    bad = np.flatnonzero((g1 <= 0) | (g2 <= 0))
    report = {
        "params": {"a": a, "b": b, "lambda1": lam1, "lambda2": lam2},
        "samples": int(samples),
        "min_f": float(f.min()),
        "min_g1": float(g1.min()),
        "min_g2": float(g2.min()),
        "violations": int(len(bad)),
        "witness": pts[bad[0]].tolist() if len(bad) else None,
        "corner": None,
        "equal_lambda": None,
    }
    corner = corner_point(a, b, lam1, lam2)
    if corner is not None:
        x1, x2, note = corner
        _, _, gc = g_values(a, b, lam1, lam2, x1, x2)
        report["corner"] = {"x1": x1, "x2": x2, "g2": float(gc),
                            "g2_relative": float(gc) / g2_scale(a, b, lam1, lam2, x1, x2),
                            "note": note}
    if lam1 == lam2:
        z0, fz, closed = equal_lambda_boundary(a, b, lam1)
        report["equal_lambda"] = {"z0": z0, "f": fz, "closed_form": closed,
                                  "scale": g2_scale(a, b, lam1, lam1, z0 / 2, z0 / 2)}
    if strict and bad.size:
        raise InvariantViolation(f"g1 or g2 not positive at interior point {report['witness']}")
    return report


# ------------------------------------------------------------ 2-form square


def two_form_square(eta, p, q, A, B, Cc):
    """Discrepancy between ``omega^2 / (2 vol)`` by wedge and by the expansion.

    ``omega = eta + A p^pbar + B q^qbar + Cc p^qbar + conj(Cc) q^pbar`` on C^2,
    expanded as ``eta^2 + 2 eta (omega - eta) + 2 (AB - |Cc|^2) p^pbar^q^qbar``.
    """
    eta = np.asarray(eta, dtype=complex).reshape(2, 2)
    p = np.asarray(p, dtype=complex).reshape(2)
    q = np.asarray(q, dtype=complex).reshape(2)
    rest = (A * np.outer(p, p.conj()) + B * np.outer(q, q.conj())
            + Cc * np.outer(p, q.conj()) + np.conj(Cc) * np.outer(q, p.conj()))
    e = _scalar_form(2, 1, eta)
    omega = _scalar_form(2, 1, eta + rest)
    direct = wedge(omega, omega).top()[0, 0] / 2
    pp = _scalar_form(2, 1, np.outer(p, p.conj()))
    qq = _scalar_form(2, 1, np.outer(q, q.conj()))
    volume_pq = wedge(pp, qq).top()[0, 0]
    expanded = (wedge(e, e).top()[0, 0] + 2 * wedge(e, _scalar_form(2, 1, rest)).top()[0, 0]
                + 2 * (A * B - abs(Cc) ** 2) * volume_pq) / 2
    return float(abs(direct - expanded))


# ------------------------------------------------------------------ sweeps


def draw_parameters(rng, equal=False):
    """Log-uniform ``(a, b, lam1, lam2)`` in ``[0.1, 10]``; ``lam2 = lam1`` if ``equal``."""
    a, b, lam1, lam2 = np.exp(rng.uniform(np.log(0.1), np.log(10.0), 4))
    if equal:
        lam2 = lam1
    return float(a), float(b), float(lam1), float(lam2)


def region_p_campaign(draws=100, samples=1000, seed=0, equal_every=5, corner_tol=1e-9,
                      boundary_tol=1e-9):
    """Region-P sweeps over ``draws`` parameter sets.

    Every ``equal_every``-th draw uses ``lam1 = lam2``.  Corner values of
    ``g2`` and equal-lambda boundary values of ``f`` are judged relative to
    the size of their constituent terms.
    """
    seeds = child_seeds(seed, draws)
    out = {"draws": draws, "samples": samples, "seed": seed,
           "min_g1": np.inf, "min_g2": np.inf, "interior_violations": 0,
           "corners_checked": 0, "max_corner_g2_relative": 0.0,
           "equal_lambda_checked": 0, "min_boundary_f_relative": np.inf,
           "witness": None}
    for i, s in enumerate(seeds):
        rng = np.random.default_rng(s)
        params = draw_parameters(rng, equal=equal_every > 0 and i % equal_every == 0)
        rep = region_p_sweep(*params, samples=samples, seed=s, strict=False)
        out["min_g1"] = min(out["min_g1"], rep["min_g1"])
        out["min_g2"] = min(out["min_g2"], rep["min_g2"])
        out["interior_violations"] += rep["violations"]
        bad = rep["violations"] > 0
        if rep["corner"] is not None:
            out["corners_checked"] += 1
            rel = abs(rep["corner"]["g2_relative"])
            out["max_corner_g2_relative"] = max(out["max_corner_g2_relative"], rel)
            bad = bad or rel > corner_tol
        if rep["equal_lambda"] is not None:
            out["equal_lambda_checked"] += 1
            eq = rep["equal_lambda"]
            rel = eq["f"] / eq["scale"]
            out["min_boundary_f_relative"] = min(out["min_boundary_f_relative"], rel)
            bad = bad or rel < -boundary_tol
        if bad and out["witness"] is None:
            out["witness"] = {"draw": i, "seed": s, "report": rep}
    out["passed"] = out["witness"] is None
    return out


def det_identity_sweep(count=10000, seed=0, rtol=1e-9):
    """Determinant identity, ``Delta > 0`` and ``det(A) > 0`` on ``count`` instances."""
    worst = 0.0
    min_delta = np.inf
    min_detA = np.inf
    worst_detA_gap = 0.0
    witness = None
    for i, inst in enumerate(random_instances(count, seed=seed)):
        try:
            dec = det_decomposition(inst, rtol=rtol)
            data = build_X(inst)
        except InvariantViolation as exc:
            if witness is None:
                witness = {"index": i, "error": str(exc), "a": inst.a, "b": inst.b,
                           "lambda1": inst.lam1, "lambda2": inst.lam2,
                           "ell": inst.ell.tolist()}
            continue
        worst = max(worst, dec.rel_error)
        min_delta = min(min_delta, data.Delta)
        min_detA = min(min_detA, data.detA_closed)
        gap = abs(data.detA - data.detA_closed) / _scale(data.detA_closed)
        worst_detA_gap = max(worst_detA_gap, gap)
        if witness is None and (data.detA_closed <= 0 or gap > rtol):
            witness = {"index": i, "detA": data.detA, "detA_closed": data.detA_closed}
    return {"count": count, "seed": seed, "rtol": rtol,
            "max_relative_error": worst, "min_delta": float(min_delta),
            "min_detA": float(min_detA), "max_detA_gap": worst_detA_gap,
            "witness": witness, "passed": witness is None}
