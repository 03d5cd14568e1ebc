"""End(C^r)-valued (p, q)-forms on C^n with dense coefficient storage.

A form of bidegree (p, q) is stored as an array of shape
``(C(n, p), C(n, q), r, r)``.  Entry ``[I, J]`` is the matrix coefficient of
the basis element ``e_{I,J} = i^{pq} dz^I ^ dzbar^J`` where ``I`` and ``J``
run over strictly increasing index tuples in ``itertools.combinations``
order.  Indices are zero based.

The ``i^{pq}`` normalisation makes three things simple:

* the volume form ``prod_j (i dz^j ^ dzbar^j)`` is ``e_{[n],[n]}`` with
  coefficient 1, so "divide by vol" means reading the top coefficient;
* a (1, 1)-form with coefficients ``H`` is ``sum H_{mu nu} i dz^mu ^ dzbar^nu``,
  i.e. we store ``i Theta`` directly;
* the adjoint of ``F e_{I,J}`` is ``F^dagger e_{J,I}`` with no extra signs.
"""

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from . import _kernels
from .errors import CapacityError, InputError

MAX_N = 4
MAX_R = 8


@lru_cache(maxsize=None)
def multi_indices(n, p):
    return tuple(combinations(range(n), p))


@lru_cache(maxsize=None)
def _index_lookup(n, p):
    return {I: k for k, I in enumerate(multi_indices(n, p))}


def _merge_sign(I, K):
    """Sign of the shuffle sorting the concatenation ``I + K``."""
    inversions = sum(1 for x in I for y in K if x > y)
    return -1 if inversions % 2 else 1


def _permutation_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def wedge_table(n, p1, q1, p2, q2):
    """Nonzero terms of ``e_{I,J} ^ e_{K,L}`` as flat key indices.

    Returns ``(tf, tg, to, fac)`` with
    ``e[tf[t]] ^ e[tg[t]] = fac[t] * e[to[t]]``.
    """
    p, q = p1 + p2, q1 + q2
    tf, tg, to, fac = [], [], [], []
    if p <= n and q <= n:
        nq1, nq2 = comb(n, q1), comb(n, q2)
        nq = comb(n, q)
        look_p, look_q = _index_lookup(n, p), _index_lookup(n, q)
        phase = 1j ** (-(p1 * q2 + p2 * q1) % 4)
        base = -1 if (q1 * p2) % 2 else 1
        for a, I in enumerate(multi_indices(n, p1)):
            for c, K in enumerate(multi_indices(n, p2)):
                if set(I) & set(K):
                    continue
                sIK = _merge_sign(I, K)
                IK = look_p[tuple(sorted(I + K))]
                for b, J in enumerate(multi_indices(n, q1)):
                    for d, L in enumerate(multi_indices(n, q2)):
                        if set(J) & set(L):
                            continue
                        sJL = _merge_sign(J, L)
                        tf.append(a * nq1 + b)
                        tg.append(c * nq2 + d)
                        to.append(IK * nq + look_q[tuple(sorted(J + L))])
                        fac.append(base * sIK * sJL * phase)
    return (np.array(tf, dtype=np.intp), np.array(tg, dtype=np.intp),
            np.array(to, dtype=np.intp), np.array(fac, dtype=complex))


def _check_capacity(n, r):
    if n < 1 or r < 1:
        raise InputError(f"dimension and rank must be positive, got n={n}, r={r}")
    if n > MAX_N or r > MAX_R:
        raise CapacityError(
            f"dense storage supports n <= {MAX_N} and r <= {MAX_R}; got n={n}, r={r}")


class EndForm:
    """An End(C^r)-valued (p, q)-form on C^n."""

    __slots__ = ("n", "r", "p", "q", "coeffs")

    def __init__(self, n, r, p, q, coeffs=None):
        _check_capacity(n, r)
        if p < 0 or q < 0:
            raise InputError("bidegree must be non-negative")
        shape = (comb(n, p), comb(n, q), r, r)
        if coeffs is None:
            coeffs = np.zeros(shape, dtype=complex)
        else:
            coeffs = np.array(coeffs, dtype=complex)
            if coeffs.shape != shape:
                raise InputError(f"coefficient array has shape {coeffs.shape}, "
                                 f"expected {shape}")
        coeffs.flags.writeable = False
        self.n, self.r, self.p, self.q = n, r, p, q
        self.coeffs = coeffs

    @classmethod
    def from_terms(cls, n, r, p, q, terms):
        """Build a form from ``{(I, J): matrix}``.

        Index tuples may be unordered; they are sorted with the matching
        permutation sign, and tuples with a repeated index contribute zero.
        """
        out = np.zeros((comb(n, p), comb(n, q), r, r), dtype=complex)
        look_p, look_q = _index_lookup(n, p), _index_lookup(n, q)
        for (I, J), mat in terms.items():
            I, J = tuple(I), tuple(J)
            if len(I) != p or len(J) != q:
                raise InputError(f"key {(I, J)} does not have bidegree ({p}, {q})")
            if any(not 0 <= x < n for x in I + J):
                raise InputError(f"key {(I, J)} has an index outside 0..{n - 1}")
            if len(set(I)) < p or len(set(J)) < q:
                continue
            sign = _permutation_sign(I) * _permutation_sign(J)
            out[look_p[tuple(sorted(I))], look_q[tuple(sorted(J))]] += \
                sign * np.asarray(mat, dtype=complex).reshape(r, r)
        return cls(n, r, p, q, out)

    @classmethod
    def identity(cls, n, r):
        """The 0-form Id."""
        return cls(n, r, 0, 0, np.eye(r)[None, None])

    @classmethod
    def one_form(cls, coeffs):
        """(1, 0)-form ``sum_mu coeffs[mu] dz^mu`` from an ``(n, r, r)`` array."""
        coeffs = np.asarray(coeffs, dtype=complex)
        n, r = coeffs.shape[0], coeffs.shape[1]
        return cls(n, r, 1, 0, coeffs[:, None])

    @property
    def bidegree(self):
        return (self.p, self.q)

    @property
    def keys(self):
        return [(I, J) for I in multi_indices(self.n, self.p)
                for J in multi_indices(self.n, self.q)]

    def flat(self):
        """Coefficients with the key axes merged: ``(keys, r, r)``."""
        return self.coeffs.reshape(-1, self.r, self.r)

    def __getitem__(self, key):
        I, J = key
        return self.coeffs[_index_lookup(self.n, self.p)[tuple(I)],
                           _index_lookup(self.n, self.q)[tuple(J)]]

    def _same_shape(self, other):
        if not isinstance(other, EndForm) or \
                (self.n, self.r, self.p, self.q) != (other.n, other.r, other.p, other.q):
            raise InputError("forms differ in dimension, rank or bidegree")

    def __add__(self, other):
        self._same_shape(other)
        return type(self)._rebuild(self, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._same_shape(other)
        return type(self)._rebuild(self, self.coeffs - other.coeffs)

    def __neg__(self):
        return type(self)._rebuild(self, -self.coeffs)

    def __mul__(self, scalar):
        return EndForm(self.n, self.r, self.p, self.q, self.coeffs * scalar)

    __rmul__ = __mul__

    @staticmethod
    def _rebuild(like, coeffs):
        return EndForm(like.n, like.r, like.p, like.q, coeffs)

    def __xor__(self, other):
        return wedge(self, other)

    def adjoint(self):
        """The form ``F^*`` of bidegree (q, p)."""
        return EndForm(self.n, self.r, self.q, self.p,
                       np.conj(self.coeffs.transpose(1, 0, 3, 2)))

    def right_multiply(self, mat):
        return EndForm(self.n, self.r, self.p, self.q, self.coeffs @ mat)

    def left_multiply(self, mat):
        return EndForm(self.n, self.r, self.p, self.q, mat @ self.coeffs)

    def matrix_map(self, fn):
        """Apply ``fn`` to the coefficient array, keeping the bidegree."""
        return EndForm(self.n, self.r, self.p, self.q, fn(self.coeffs))

    def top(self):
        """Coefficient matrix against the volume form (zero if not top degree)."""
        if self.p == self.n and self.q == self.n:
            return self.coeffs[0, 0].copy()
        return np.zeros((self.r, self.r), dtype=complex)

    def trace(self):
        """Scalar-valued form as an ``(C(n,p), C(n,q))`` array of traces."""
        return np.trace(self.coeffs, axis1=2, axis2=3)

    def max_abs(self):
        return float(np.max(np.abs(self.coeffs), initial=0.0))

    def is_zero(self, tol=0.0):
        return self.max_abs() <= tol

    def allclose(self, other, tol=1e-12):
        self._same_shape(other)
        scale = max(self.max_abs(), other.max_abs(), 1.0)
        return float(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0)) <= tol * scale

    def __repr__(self):
        return f"EndForm(n={self.n}, r={self.r}, bidegree=({self.p}, {self.q}))"


def wedge_arrays(F, G, n, r, deg_f, deg_g):
    """Batched wedge on flat coefficient arrays.

    ``F`` has shape ``(batch_f, keys_f, r, r)`` and ``G`` has shape
    ``(batch_g, keys_g, r, r)`` with batch sizes equal or one of them 1.
    Returns the flat coefficients of the product, shape ``(batch, keys, r, r)``.
    """
    (p1, q1), (p2, q2) = deg_f, deg_g
    tf, tg, to, fac = wedge_table(n, p1, q1, p2, q2)
    batch = max(F.shape[0], G.shape[0])
    out = np.zeros((batch, comb(n, p1 + p2) * comb(n, q1 + q2), r, r), dtype=complex)
    if len(tf):
        _kernels.wedge_accumulate(np.ascontiguousarray(F, dtype=complex),
                                  np.ascontiguousarray(G, dtype=complex),
                                  tf, tg, to, fac, out)
    return out


def wedge(f, g):
    """Wedge product; matrix coefficients multiply in the order ``f`` then ``g``."""
    if not isinstance(f, EndForm) or not isinstance(g, EndForm):
        raise InputError("wedge expects two EndForm values")
    if f.n != g.n or f.r != g.r:
        raise InputError(f"cannot wedge forms on C^{f.n} rank {f.r} "
                         f"and C^{g.n} rank {g.r}")
    out = wedge_arrays(f.flat()[None], g.flat()[None], f.n, f.r, f.bidegree, g.bidegree)
    p, q = f.p + g.p, f.q + g.q
    return EndForm(f.n, f.r, p, q, out[0].reshape(comb(f.n, p), comb(f.n, q), f.r, f.r))


def top_pairing(n, deg_left):
    """Terms ``(tf, tg, fac)`` with ``top(L ^ R) = sum fac * L[tf] R[tg]``."""
    p, q = deg_left
    tf, tg, _, fac = wedge_table(n, p, q, n - p, n - q)
    return tf, tg, fac


class Curvature(EndForm):
    """A Hermitian (1, 1)-form standing in for ``i Theta`` at a point.

    ``coeffs[mu, nu]`` is the matrix multiplying ``i dz^mu ^ dzbar^nu``;
    Hermitian symmetry means ``coeffs[nu, mu] == coeffs[mu, nu]^dagger``.
    """

    __slots__ = ()

    def __init__(self, coeffs, tol=1e-12):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 4 or coeffs.shape[0] != coeffs.shape[1] \
                or coeffs.shape[2] != coeffs.shape[3]:
            raise InputError(f"curvature coefficients must have shape (n, n, r, r); "
                             f"got {coeffs.shape}")
        n, r = coeffs.shape[0], coeffs.shape[2]
        super().__init__(n, r, 1, 1, coeffs)
        herm = np.conj(self.coeffs.transpose(1, 0, 3, 2))
        scale = max(self.max_abs(), 1.0)
        if np.max(np.abs(herm - self.coeffs), initial=0.0) > tol * scale:
            raise InputError("curvature is not Hermitian: coeffs[nu, mu] must equal "
                             "coeffs[mu, nu]^dagger")

    @classmethod
    def from_form(cls, form):
        if form.bidegree != (1, 1):
            raise InputError("a curvature must have bidegree (1, 1)")
        return cls(form.coeffs)

    @staticmethod
    def _rebuild(like, coeffs):
        return Curvature(coeffs)

    def __mul__(self, scalar):
        if np.isrealobj(scalar) or np.imag(scalar) == 0:
            return Curvature(self.coeffs * np.real(scalar))
        return EndForm.__mul__(self, scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Curvature(n={self.n}, r={self.r})"


def curvature_power(theta, k):
    """``(i Theta)^k``; the zero form when ``k > n`` and ``Id`` when ``k = 0``."""
    if k < 0:
        raise InputError("power must be non-negative")
    result = EndForm.identity(theta.n, theta.r)
    for _ in range(k):
        result = wedge(result, theta)
    return result


def curvature_powers(theta, kmax=None):
    """List ``[(i Theta)^0, ..., (i Theta)^kmax]`` sharing intermediate products."""
    kmax = theta.n if kmax is None else kmax
    out = [EndForm.identity(theta.n, theta.r)]
    for _ in range(kmax):
        out.append(wedge(out[-1], theta))
    return out


def top_coefficient(theta):
    """Matrix ``(i Theta)^n / vol``."""
    return curvature_power(theta, theta.n).top()


def vbma_residual(theta, eta0):
    """Max-norm of ``(i Theta)^n / vol - eta0 * Id``."""
    top = top_coefficient(theta)
    return float(np.max(np.abs(top - eta0 * np.eye(theta.r))))


def commutator_terms(theta, g):
    """Both sides of the commutator identity for ``g`` in End(C^r).

    Returns ``(chain, bracket)`` where
    ``chain = sum_k (i Theta)^k ^ [i Theta, g] ^ (i Theta)^{n-1-k}`` and
    ``bracket = [(i Theta)^n, g]``, both as top-degree matrices.
    """
    g = np.asarray(g, dtype=complex)
    n = theta.n
    powers = curvature_powers(theta)
    comm = theta.matrix_map(lambda c: c @ g - g @ c)
    chain = np.zeros((theta.r, theta.r), dtype=complex)
    for k in range(n):
        chain += wedge(wedge(powers[k], comm), powers[n - 1 - k]).top()
    top = powers[n].top()
    return chain, top @ g - g @ top


def commutator_identity_check(theta, g):
    """Max-norm of ``chain - [(i Theta)^n, g]``; zero up to rounding."""
    chain, bracket = commutator_terms(theta, g)
    return float(np.max(np.abs(chain - bracket)))


def random_curvature(n, r, rng, scale=1.0):
    """Random Hermitian (1, 1)-form with Gaussian entries."""
    Z = rng.standard_normal((n * r, n * r)) + 1j * rng.standard_normal((n * r, n * r))
    H = (Z + Z.conj().T) * (scale / 2)
    return Curvature(H.reshape(n, r, n, r).transpose(0, 2, 1, 3))


def curvature_from_hermitian(H, n, r):
    """Curvature whose (mu, alpha), (nu, beta) entry is ``H[mu*r+alpha, nu*r+beta]``."""
    H = np.asarray(H, dtype=complex)
    return Curvature(H.reshape(n, r, n, r).transpose(0, 2, 1, 3))
