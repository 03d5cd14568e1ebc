"""Vortex bundles over surfaces: the rank n+1 counterexample and its lift.

Coordinates on C^2 are ``(w, z)`` with ``w`` the base direction and ``z`` the
fibre direction; the Fubini-Study coefficient is normalised to 1 at the
evaluation point.  The curvature of rank ``n + 1`` has stored coefficients

    i Theta[w, w] = diag(A, A'),   i Theta[z, z] = diag(B, B'),
    i Theta[w, z] = [[0, C], [0, 0]],   i Theta[z, w] = i Theta[w, z]^dagger,

with ``B = diag(b)`` and ``C`` a column vector, so the vbMA equation reads
``{A, B} - C C^* = k Id`` and ``2 A' B' - |C|^2 = k``.

The E_1 basis is normalised so the line-bundle section is ``T = (t, 0, ...)``;
when ``T = 0`` every basis diagonalises ``B`` and we rotate ``C`` onto the
last coordinate, matching the layout of the standard counterexample.
"""

from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np
from scipy.optimize import brentq

from .errors import CapacityError, InputError, InvariantViolation
from .forms import MAX_N, Curvature, EndForm, curvature_power, wedge
from .gram import (Kind, classify, combine_kinds, default_tol, gram_matrix,
                   ma_quadratic_form_batch, off_block_max, restrict, vortex_groups)


def _align_last(C):
    """Unitary ``U`` with ``U^H C = (0, ..., 0, |C|)``."""
    n = len(C)
    norm = np.linalg.norm(C)
    if norm == 0:
        return np.eye(n, dtype=complex)
    if np.all(C[:-1] == 0):
        U = np.eye(n, dtype=complex)
        U[-1, -1] = C[-1] / abs(C[-1])
        return U
    M = np.column_stack([C / norm, np.eye(n)])
    Q, _ = np.linalg.qr(M)
    Q = Q[:, :n]
    Q[:, 0] *= np.vdot(Q[:, 0], C) / abs(np.vdot(Q[:, 0], C))
    return np.column_stack([Q[:, 1:], Q[:, 0]])


@dataclass(frozen=True)
class VortexSurfaceInstance:
    """Point data of a vortex curvature in the normalised E_1 basis."""

    n: int
    r: int
    k: float
    t_norm_sq: float
    C: np.ndarray
    A: np.ndarray
    Aprime: float
    basis: np.ndarray = field(repr=False)

    @property
    def b(self):
        b = np.full(self.n, 2.0 * self.r)
        b[0] += self.t_norm_sq
        return b

    @property
    def Bprime(self):
        return 2.0 * self.r + 2.0 - self.t_norm_sq

    @property
    def B(self):
        return np.diag(self.b)

    @property
    def c_norm_sq(self):
        return float(np.vdot(self.C, self.C).real)

    def residuals(self):
        """Max-norm residuals of the two vbMA block equations."""
        B = self.B
        r1 = self.A @ B + B @ self.A - np.outer(self.C, self.C.conj()) - self.k * np.eye(self.n)
        r2 = 2 * self.Aprime * self.Bprime - self.c_norm_sq - self.k
        return float(np.max(np.abs(r1))), float(abs(r2))

    def with_blocks(self, A=None, Aprime=None):
        """Copy with ``A`` and/or ``A'`` replaced (no re-solve)."""
        return VortexSurfaceInstance(
            self.n, self.r, self.k, self.t_norm_sq, self.C,
            np.asarray(A if A is not None else self.A, dtype=complex),
            float(Aprime if Aprime is not None else self.Aprime), self.basis)


def _validate(n, r, k, t_norm_sq):
    if int(n) != n or n < 2:
        raise InputError("E_1 rank n must be an integer >= 2")
    if int(r) != r or r < 1:
        raise InputError("vortex integer r must be a positive integer")
    if not k > 0:
        raise InputError("vbMA constant k must be positive")
    if not 0.0 <= t_norm_sq <= 1.0:
        raise InputError("|T|^2 must lie in [0, 1]")
    if n + 1 > 8:
        raise CapacityError("rank n + 1 exceeds the dense storage limit of 8")


def solve_curvature(n, r, k, t_norm_sq, C):
    """Solve the vbMA block equations for ``A`` and ``A'``.

    ``a_ij = (k delta_ij + c_i conj(c_j)) / (b_i + b_j)`` and
    ``A' = (k + |C|^2) / (2 B')``.
    """
    _validate(n, r, k, t_norm_sq)
    C = np.asarray(C, dtype=complex).reshape(-1)
    if C.shape != (n,):
        raise InputError(f"C must have {n} entries")
    U = _align_last(C) if t_norm_sq == 0 else np.eye(n, dtype=complex)
    Cn = U.conj().T @ C
    if t_norm_sq == 0:
        Cn[:-1] = 0.0
    b = np.full(n, 2.0 * r)
    b[0] += t_norm_sq
    Bp = 2.0 * r + 2.0 - t_norm_sq
    A = (k * np.eye(n) + np.outer(Cn, Cn.conj())) / (b[:, None] + b[None, :])
    Ap = (k + float(np.vdot(Cn, Cn).real)) / (2 * Bp)
    inst = VortexSurfaceInstance(n, r, float(k), float(t_norm_sq), Cn, A, Ap, U)
    res = inst.residuals()
    if max(res) > 1e-12 * max(1.0, k + inst.c_norm_sq):
        raise InvariantViolation(f"vbMA residuals {res} after solving")
    return inst


def counterexample(n, k=4.0, r=1):
    """The strictly semi-positive example: ``T = 0`` and ``|C|^2 = k (2r + 1)``."""
    C = np.zeros(n, dtype=complex)
    C[-1] = np.sqrt(k * (2 * r + 1))
    return solve_curvature(n, r, k, 0.0, C)


def assemble_curvature(inst):
    """Rank ``n + 1`` curvature on C^2 for the instance."""
    n = inst.n
    R = n + 1
    c = np.zeros((2, 2, R, R), dtype=complex)
    c[0, 0][:n, :n] = inst.A
    c[0, 0][n, n] = inst.Aprime
    c[1, 1][:n, :n] = inst.B
    c[1, 1][n, n] = inst.Bprime
    c[0, 1][:n, n] = inst.C
    c[1, 0] = c[0, 1].conj().T
    return Curvature(c)


@dataclass(frozen=True)
class BForms:
    """Gram matrices of the four decoupled pieces of the MA form.

    Variable order, each entry being the coefficient of a basis form
    ``E_{row,col} dz^mu`` (``n`` is the line slot):

    * B1: ``alpha[i, j]`` at ``(w, i, j)`` row-major, ``gamma[j]`` at ``(z, n, j)``,
      ``delta`` at ``(w, n, n)``;
    * B2: ``alpha[i, j]`` at ``(z, i, j)``, ``beta[i]`` at ``(w, i, n)``,
      ``delta`` at ``(z, n, n)``;
    * B3: ``beta[i]`` at ``(z, i, n)``;
    * B4: ``gamma[j]`` at ``(w, n, j)``.
    """

    B1: np.ndarray
    B2: np.ndarray
    B3: np.ndarray
    B4: np.ndarray

    def as_list(self):
        return [self.B1, self.B2, self.B3, self.B4]


def b_forms(inst):
    """Closed-form Gram matrices of the four decoupled quadratic forms."""
    n = inst.n
    A, Ap, b, Bp, C = inst.A, inst.Aprime, inst.b, inst.Bprime, inst.C
    I = np.eye(n)
    N1 = n * n + n + 1
    B1 = np.zeros((N1, N1), dtype=complex)
    B1[:n * n, :n * n] = np.diag((b[:, None] + b[None, :]).reshape(-1))
    g = slice(n * n, n * n + n)
    B1[g, g] = np.conj(A) + Ap * I
    B1[-1, -1] = 2 * Bp
    for i in range(n):
        for j in range(n):
            B1[i * n + j, n * n + j] = -C[i]
            B1[n * n + j, i * n + j] = -np.conj(C[i])
    B1[g, -1] = -np.conj(C)
    B1[-1, g] = -C

    B2 = np.zeros((N1, N1), dtype=complex)
    B2[:n * n, :n * n] = np.kron(I, A.T) + np.kron(A, I)
    B2[g, g] = inst.B + Bp * I
    B2[-1, -1] = 2 * Ap
    for i in range(n):
        for j in range(n):
            B2[i * n + j, n * n + i] = -np.conj(C[j])
            B2[n * n + i, i * n + j] = -C[j]
    B2[g, -1] = -C
    B2[-1, g] = -np.conj(C)

    B3 = A + Ap * I
    B4 = inst.B.T + Bp * I
    return BForms(B1, B2, B3.astype(complex), B4.astype(complex))


def b_form_value(matrix, v):
    """Quadratic form ``v^H M v`` for a coefficient vector ``v``."""
    v = np.asarray(v, dtype=complex)
    return float(np.real(np.vdot(v, matrix @ v)))


@dataclass(frozen=True)
class SchurChain:
    Mcal: np.ndarray
    Pcal: np.ndarray
    Rcal: np.ndarray
    Qcal: np.ndarray
    pprime: float
    qprime: complex
    rprime: float
    sprime: float
    v: np.ndarray
    kinds: tuple
    max_error: float

    def closed_form_R(self):
        v = self.v.reshape(-1, 1)
        m = len(self.v)
        top = np.concatenate([[[self.pprime]], np.conj(self.qprime) * v.conj().T], axis=1)
        bottom = np.concatenate([self.qprime * v,
                                 self.rprime * np.eye(m) + self.sprime * v @ v.conj().T], axis=1)
        return np.concatenate([top, bottom], axis=0)


def m_matrix(inst):
    """The (n^2 + n + 1)-square Hermitian matrix of the B1 form in block layout."""
    n = inst.n
    b, C = inst.b, inst.C
    N1 = n * n + n + 1
    Bcal = np.diag((b[:, None] + b[None, :]).reshape(-1)).astype(complex)
    Dcal = np.zeros((n, n * n), dtype=complex)
    for jp in range(n):
        for j in range(n):
            Dcal[jp, jp * n + j] = np.conj(C[j])
    M = np.zeros((N1, N1), dtype=complex)
    M[:n * n, :n * n] = Bcal
    M[:n * n, n * n:n * n + n] = -Dcal.conj().T
    M[n * n:n * n + n, :n * n] = -Dcal
    M[n * n:n * n + n, n * n:n * n + n] = inst.A + inst.Aprime * np.eye(n)
    M[n * n:n * n + n, -1] = -C
    M[-1, n * n:n * n + n] = -np.conj(C)
    M[-1, -1] = 2 * inst.Bprime
    return M


def q_matrix(inst):
    b, C = inst.b, inst.C
    return np.diag([np.sum(np.abs(C) ** 2 / (bi + b)) for bi in b]).astype(complex)


def r_matrix(inst):
    """``A + A' Id - Q - C C^* / (2 B')``."""
    n = inst.n
    return (inst.A + inst.Aprime * np.eye(n) - q_matrix(inst)
            - np.outer(inst.C, inst.C.conj()) / (2 * inst.Bprime))


def _schur(M, k):
    """Schur complement of the leading ``k x k`` block."""
    A, B, C, D = M[:k, :k], M[:k, k:], M[k:, :k], M[k:, k:]
    return D - C @ np.linalg.solve(A, B)


def schur_chain(inst, tol=1e-10):
    """Reduce the B1 form to an ``n x n`` matrix and check the closed forms."""
    n, r, k = inst.n, inst.r, inst.k
    b, Bp, Ap, C = inst.b, inst.Bprime, inst.Aprime, inst.C
    M = m_matrix(inst)
    if np.min(b) <= 0:
        raise InvariantViolation("diagonal block of the B1 matrix is not positive definite")
    Qcal = q_matrix(inst)
    P = np.zeros((n + 1, n + 1), dtype=complex)
    P[:n, :n] = inst.A + Ap * np.eye(n) - Qcal
    P[:n, n] = -C
    P[n, :n] = -np.conj(C)
    P[n, n] = 2 * Bp
    R = r_matrix(inst)

    c1, v = C[0], C[1:]
    vv = float(np.vdot(v, v).real)
    b1 = b[0]
    pp = k / (2 * b1) + Ap - vv / (b1 + 2 * r) - abs(c1) ** 2 / (2 * Bp)
    qp = np.conj(c1) * (1 / (b1 + 2 * r) - 1 / (2 * Bp))
    rp = k / (4 * r) + Ap - vv / (4 * r) - abs(c1) ** 2 / (b1 + 2 * r)
    sp = 1 / (4 * r) - 1 / (2 * Bp)

    scale = max(1.0, float(np.max(np.abs(M))))
    errs = [float(np.max(np.abs(_schur(M, n * n) - P))),
            float(np.max(np.abs(_schur_last(P) - R)))]
    chain = SchurChain(M, P, R, Qcal, float(pp), complex(qp), float(rp), float(sp),
                       v.copy(), (), 0.0)
    errs.append(float(np.max(np.abs(chain.closed_form_R() - R))))
    max_err = max(errs)
    if max_err > tol * scale:
        raise InvariantViolation(f"Schur chain closed forms disagree by {max_err:.3e}")
    shared = default_tol(M)
    kinds = (classify(M, shared).kind, classify(P, shared).kind, classify(R, shared).kind)
    if Kind.POSITIVE in kinds and Kind.INDEFINITE in kinds:
        raise InvariantViolation(f"Schur-chain verdicts differ: {[str(x) for x in kinds]}")
    return SchurChain(M, P, R, Qcal, float(pp), complex(qp), float(rp), float(sp),
                      v.copy(), kinds, max_err / scale)


def _schur_last(P):
    """Schur complement eliminating the last (scalar) entry."""
    return P[:-1, :-1] - np.outer(P[:-1, -1], P[-1, :-1]) / P[-1, -1]


@dataclass(frozen=True)
class SemidefCase:
    case: str
    min_eigenvalue: float
    tol: float
    pprime: float
    qv_norm: float
    shifted_min: float


def classify_semidef_case(inst, tol=None):
    """Sort the B1 form into Positive, Case1, Case2 or Indefinite.

    Case1: ``p' = 0``, ``q' v = 0`` and ``r' Id + s' v v^*`` semi-definite.
    Case2: ``p' > 0`` and ``r' Id + (s' - |q'|^2 / p') v v^*`` singular
    semi-definite.  Also checks that Case1 happens exactly when ``T = 0`` and
    ``|C|^2 = k (2r + 1)``.
    """
    ch = schur_chain(inst)
    R = ch.Rcal
    tol = default_tol(ch.Mcal) if tol is None else tol
    verdict = classify(R, tol)
    v = ch.v.reshape(-1, 1)
    m = len(ch.v)
    qv = abs(ch.qprime) * float(np.linalg.norm(ch.v))
    shifted = float("nan")
    if verdict.kind == Kind.POSITIVE:
        case = "Positive"
    elif verdict.kind == Kind.INDEFINITE:
        case = "Indefinite"
    else:
        base = ch.rprime * np.eye(m) + ch.sprime * v @ v.conj().T
        if abs(ch.pprime) <= tol and qv <= tol and \
                (m == 0 or np.linalg.eigvalsh(base)[0] >= -tol):
            case = "Case1"
        elif ch.pprime > tol:
            S = ch.rprime * np.eye(m) + (ch.sprime - abs(ch.qprime) ** 2 / ch.pprime) \
                * v @ v.conj().T
            shifted = float(np.linalg.eigvalsh(S)[0]) if m else 0.0
            if abs(shifted) > tol * max(1.0, abs(ch.pprime)):
                raise InvariantViolation("semi-definite remainder matrix is not singular")
            case = "Case2"
        else:
            raise InvariantViolation("semi-definite B1 form matches neither case")
    level = inst.t_norm_sq == 0 and \
        abs(inst.c_norm_sq - inst.k * (2 * inst.r + 1)) <= tol * max(1.0, inst.c_norm_sq)
    if (case == "Case1") != level:
        raise InvariantViolation("Case1 does not coincide with T = 0, |C|^2 = k(2r+1)")
    return SemidefCase(case, verdict.min_eigenvalue, tol, ch.pprime, qv, shifted)


def case2_boundary(n=2, r=1, k=4.0, t_norm_sq=0.5, direction=None, rho_max=50.0):
    """Instance on the Case2 level set, found by root-finding on ``|C|``.

    ``direction`` is a unit vector with ``c_1 != 0`` and ``v != 0``.  Returns
    ``(instance, rho, residual)`` where ``residual`` is the smallest eigenvalue
    of the reduced matrix at the root.
    """
    if t_norm_sq <= 0:
        raise InputError("the Case2 construction needs |T|^2 > 0")
    if direction is None:
        direction = np.ones(n) / np.sqrt(n)
    direction = np.asarray(direction, dtype=complex)
    direction = direction / np.linalg.norm(direction)

    def min_eig(rho):
        inst = solve_curvature(n, r, k, t_norm_sq, rho * direction)
        return float(np.linalg.eigvalsh(r_matrix(inst))[0])

    grid = np.linspace(0.0, rho_max, 401)
    vals = [min_eig(x) for x in grid]
    for lo, hi, flo, fhi in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if flo > 0 >= fhi:
            rho = brentq(min_eig, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
            inst = solve_curvature(n, r, k, t_norm_sq, rho * direction)
            return inst, rho, min_eig(rho)
    raise InputError("no positivity boundary found along this direction")


# ---------------------------------------------------------------------------
# lift to C^2 x C^m


@dataclass(frozen=True)
class LiftedInstance:
    base: VortexSurfaceInstance
    m: int
    phi: Curvature


def lift_curvature(inst, m):
    """``i Phi = i Theta + sum_j i du^j ^ du^j-bar Id`` on C^{m+2}."""
    if m < 1:
        raise InputError("the lift needs m >= 1 extra dimensions")
    if m + 2 > MAX_N:
        raise CapacityError(f"m + 2 = {m + 2} exceeds the form capacity {MAX_N}")
    theta = assemble_curvature(inst)
    R = theta.r
    c = np.zeros((m + 2, m + 2, R, R), dtype=complex)
    c[:2, :2] = theta.coeffs
    for j in range(m):
        c[2 + j, 2 + j] = np.eye(R)
    return LiftedInstance(inst, m, Curvature(c))


def sufficient_form(theta, k, D):
    """``Tr((iT)^2 D D^* + D (iT)^2 D^* + iT D ^ iT D^*) / vol`` on C^2.

    ``(iT)^2 = k vol Id`` turns the first two terms into ``2 k |D|_F^2``;
    ``iT D`` right-multiplies every coefficient by ``D``.
    """
    D = np.asarray(D, dtype=complex)
    left = theta.right_multiply(D)
    right = theta.right_multiply(D.conj().T)
    cross = np.trace(wedge(left, right).top())
    return float(2 * k * np.sum(np.abs(D) ** 2) + cross.real)


def binomial_identity_holds(m):
    """Coefficient check of
    ``sum_mu (1+x)^mu (1+y)^(m+1-mu) = sum_k C(m+2,k) sum_j x^(k-1-j) y^j``.
    """
    for a in range(m + 2):
        for b in range(m + 2 - a):
            lhs = sum(comb(mu, a) * comb(m + 1 - mu, b) for mu in range(m + 2))
            if lhs != comb(m + 2, a + b + 1):
                return False
    return True


def lift(inst, m, samples=1000, seed=0, tol=None):
    """Build the lifted curvature and verify its claimed properties.

    Returns ``(lifted, report)``; ``report`` records the top power, the
    block split of the Gram matrix, the sampled minimum of the sufficient
    form, and the full verdict.
    """
    lifted = lift_curvature(inst, m)
    phi = lifted.phi
    theta = assemble_curvature(inst)
    R = phi.r
    k = inst.k
    d = m + 2
    top = curvature_power(phi, d).top()
    expected = k * factorial(d) / 2
    top_err = float(np.max(np.abs(top - expected * np.eye(R))))

    gram = gram_matrix(phi)
    H = gram.matrix
    base_idx = [p for p, (mu, _, _) in enumerate(gram.basis) if mu < 2]
    fibre_groups = [[p for p, (mu, _, _) in enumerate(gram.basis) if mu == 2 + j]
                    for j in range(m)]
    split_leak = off_block_max(H, [base_idx] + fibre_groups)
    H_theta = gram_matrix(theta).matrix
    base_scale = comb(d, 2) * factorial(m)
    base_err = float(np.max(np.abs(H[np.ix_(base_idx, base_idx)] - base_scale * H_theta)))

    rng = np.random.default_rng(seed)
    Ds = rng.standard_normal((samples, R, R)) + 1j * rng.standard_normal((samples, R, R))
    suff = np.array([sufficient_form(theta, k, D) for D in Ds])
    # the same quantity through the lifted MA form on D du^1
    fibre_scale = comb(d, 3) * factorial(m - 1)
    A = np.zeros((min(samples, 50), d, R, R), dtype=complex)
    A[:, 2] = Ds[:len(A)]
    via_phi = ma_quadratic_form_batch(phi, A) / fibre_scale
    suff_err = float(np.max(np.abs(via_phi - suff[:len(A)])) / max(1.0, np.max(np.abs(suff))))

    verdict = classify(gram, tol)
    report = {
        "m": m,
        "top_coefficient": float(top[0, 0].real),
        "expected_top": expected,
        "top_error": top_err,
        "split_leak": split_leak,
        "base_block_error": base_err,
        "sufficient_min": float(suff.min()),
        "sufficient_cross_error": suff_err,
        "verdict": verdict,
    }
    return lifted, report


def full_verdict(inst, tol=None):
    """Verdict of the full Gram matrix and of each decoupled block."""
    theta = assemble_curvature(inst)
    gram = gram_matrix(theta)
    groups = vortex_groups(inst.n)
    blocks = restrict(gram, groups)
    kinds = [classify(Bk, tol if tol is not None else default_tol(gram.matrix)).kind
             for Bk in blocks]
    return classify(gram, tol), kinds, combine_kinds(kinds)


def random_instance(rng, n=None, r=None):
    """Random valid instance (used by sweeps and tests)."""
    n = int(rng.integers(2, 5)) if n is None else n
    r = int(rng.integers(1, 4)) if r is None else r
    k = float(rng.uniform(0.5, 5.0))
    t = float(rng.uniform(0.0, 1.0))
    C = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return solve_curvature(n, r, k, t, C)


def one_form_from_vector(v, n, r):
    return EndForm.one_form(np.asarray(v, dtype=complex).reshape(n, r, r))


def b_forms_agreement(inst):
    """``(leak, block_error)``: off-block size of the full Gram and the gap
    between its diagonal blocks and the closed-form B1..B4, both relative."""
    H = gram_matrix(assemble_curvature(inst)).matrix
    groups = vortex_groups(inst.n)
    scale = max(1.0, float(np.max(np.abs(H))))
    leak = off_block_max(H, groups) / scale
    err = max(float(np.max(np.abs(blk - ref)))
              for blk, ref in zip(restrict(H, groups), b_forms(inst).as_list()))
    return leak, err / scale
