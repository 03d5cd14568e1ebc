import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vbma import vortex
from vbma.errors import InputError
from vbma.forms import Curvature, EndForm, random_curvature
from vbma.gram import (Kind, Subspace, classify, combine_kinds, decoupling_blocks, default_tol,
                       gram_matrix, ma_quadratic_form, monte_carlo_min, off_block_max,
                       vortex_groups)


def diag_curvature(values, r=1):
    n = len(values)
    c = np.zeros((n, n, r, r), dtype=complex)
    for mu, t in enumerate(values):
        c[mu, mu] = t * np.eye(r)
    return Curvature(c)


def test_one_dimensional_gram_is_identity():
    H = gram_matrix(diag_curvature([3.0])).matrix
    assert np.allclose(H, [[1.0]])


def test_surface_line_bundle_gram():
    # r = 1, i Theta = diag(t1, t2): Q(c1 dz1 + c2 dz2) = 2 (t2 |c1|^2 + t1 |c2|^2).
    H = gram_matrix(diag_curvature([3.0, 5.0])).matrix
    assert np.allclose(H, np.diag([10.0, 6.0]), atol=1e-14)
    v = classify(gram_matrix(diag_curvature([3.0, -5.0])))
    assert v.kind == Kind.INDEFINITE and v.min_eigenvalue == pytest.approx(-10.0)


@pytest.mark.parametrize("n,r", [(2, 1), (2, 2), (2, 3), (3, 2)])
def test_direct_and_polarization_agree(rng, n, r):
    theta = random_curvature(n, r, rng)
    direct = gram_matrix(theta).matrix
    polar = gram_matrix(theta, method="polarization").matrix
    assert np.max(np.abs(direct - polar)) <= 1e-12 * np.max(np.abs(direct))


def test_gram_invariants(rng):
    theta = random_curvature(2, 2, rng)
    G = gram_matrix(theta)
    assert G.dim == 8 and len(G.basis) == 8
    assert np.allclose(G.matrix, G.matrix.conj().T, atol=1e-12)
    for i, (mu, a, b) in enumerate(G.basis):
        coeffs = np.zeros((2, 2, 2), dtype=complex)
        coeffs[mu, a, b] = 1.0
        assert ma_quadratic_form(theta, EndForm.one_form(coeffs)) == pytest.approx(G.matrix[i, i].real)


def test_unknown_method(rng):
    with pytest.raises(InputError):
        gram_matrix(random_curvature(2, 1, rng), method="magic")


def test_classify_examples():
    v = classify(np.eye(3))
    assert v.kind == Kind.POSITIVE and v.min_eigenvalue == pytest.approx(1.0)
    v = classify(np.diag([1.0, -1.0]))
    assert v.kind == Kind.INDEFINITE
    assert np.allclose(np.abs(v.witness), [0.0, 1.0])
    v = classify(np.diag([2.0, 0.0, 0.0]))
    assert v.kind == Kind.STRICTLY_SEMI_POSITIVE and v.kernel_dimension == 2
    assert classify(np.zeros((2, 2))).kind == Kind.ZERO


def test_classify_tolerance_scales_with_norm():
    H = np.diag([1e6, 1e-4])
    assert default_tol(H) == pytest.approx(1e-2)
    assert classify(H).kind == Kind.STRICTLY_SEMI_POSITIVE
    assert classify(H, tol=1e-6).kind == Kind.POSITIVE


def test_classify_rejects_bad_input():
    with pytest.raises(InputError):
        classify(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(InputError):
        classify(np.ones((2, 3)))
    with pytest.raises(InputError):
        classify(np.eye(2), tol=0.0)


def test_combine_kinds():
    P, S, I, Z = Kind.POSITIVE, Kind.STRICTLY_SEMI_POSITIVE, Kind.INDEFINITE, Kind.ZERO
    assert combine_kinds([P, P]) == P
    assert combine_kinds([P, S]) == S
    assert combine_kinds([P, Z]) == S
    assert combine_kinds([S, I]) == I
    assert combine_kinds([Z, Z]) == Z


def test_verdict_to_dict():
    d = classify(np.diag([1.0, -2.0])).to_dict()
    assert d["kind"] == "Indefinite" and d["min_eigenvalue"] == -2.0
    assert len(d["witness"]) == 2 and len(d["witness"][0]) == 2


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), r=st.integers(1, 3))
def test_quadratic_form_bounded_by_min_eigenvalue(seed, r):
    rng = np.random.default_rng(seed)
    theta = random_curvature(2, r, rng)
    H = gram_matrix(theta).matrix
    lmin = np.linalg.eigvalsh(H)[0]
    a = rng.standard_normal((2, r, r)) + 1j * rng.standard_normal((2, r, r))
    a /= np.linalg.norm(a)
    q = ma_quadratic_form(theta, EndForm.one_form(a))
    assert q >= lmin - 1e-10 * np.linalg.norm(H, 2)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(0.1, 10.0))
def test_scaling_preserves_kind(seed, t):
    theta = random_curvature(2, 2, np.random.default_rng(seed))
    H = gram_matrix(theta).matrix
    Ht = gram_matrix(theta * t).matrix
    assert np.allclose(Ht, t * H, atol=1e-10 * t * np.max(np.abs(H)))
    assert classify(Ht).kind == classify(H).kind


def test_monte_carlo_never_undercuts(rng):
    for r in (1, 2, 3):
        theta = random_curvature(2, r, rng)
        v = classify(gram_matrix(theta))
        assert monte_carlo_min(theta, trials=2000, seed=r) >= v.min_eigenvalue - v.tol


def test_monte_carlo_positive_instance():
    assert monte_carlo_min(diag_curvature([1.0, 2.0], r=2), trials=1000, seed=0) > 0


def test_monte_carlo_finds_negative():
    assert monte_carlo_min(diag_curvature([1.0, -1.0], r=2), trials=10_000, seed=0) < 0


def test_monte_carlo_is_seeded(rng):
    theta = random_curvature(2, 2, rng)
    assert monte_carlo_min(theta, trials=500, seed=4) == monte_carlo_min(theta, trials=500, seed=4)
    with pytest.raises(InputError):
        monte_carlo_min(theta, trials=0)


def test_monte_carlo_at_counterexample_witness():
    inst = vortex.counterexample(2)
    theta = vortex.assemble_curvature(inst)
    v = classify(gram_matrix(theta))
    assert v.kind == Kind.STRICTLY_SEMI_POSITIVE
    assert monte_carlo_min(theta, trials=10, seed=0, extra=v.witness) <= v.tol


def test_subspace_gram_and_monte_carlo(rng):
    theta = random_curvature(2, 2, rng)
    forms = [EndForm.one_form(rng.standard_normal((2, 2, 2)) + 0j) for _ in range(3)]
    W = Subspace(forms)
    HW = gram_matrix(theta, W).matrix
    V = W.coords
    assert np.allclose(HW, V.conj().T @ gram_matrix(theta).matrix @ V, atol=1e-12)
    lmin_W = np.linalg.eigvalsh(V.conj().T @ V)  # Frobenius Gram of the spanning set
    mc = monte_carlo_min(theta, W=W, trials=500, seed=1)
    # Directions are unit-Frobenius, so the bound uses the full-space minimum.
    assert mc >= np.linalg.eigvalsh(gram_matrix(theta).matrix)[0] - 1e-10
    assert lmin_W[0] > 0


def test_subspace_rejects_dependent_forms(rng):
    f = EndForm.one_form(rng.standard_normal((2, 1, 1)) + 0j)
    with pytest.raises(InputError, match="dependent"):
        Subspace([f, f * 2.0])
    with pytest.raises(InputError):
        Subspace([])


def test_decoupling_on_vortex_instance(rng):
    inst = vortex.random_instance(rng, n=2, r=1)
    theta = vortex.assemble_curvature(inst)
    groups, G = decoupling_blocks(theta, inst.n)
    assert sorted(i for g in groups for i in g) == list(range(G.dim))
    assert off_block_max(G, groups) <= 1e-12 * np.max(np.abs(G.matrix))


def test_decoupling_rejects_wrong_shape(rng):
    with pytest.raises(InputError, match="product-point"):
        decoupling_blocks(random_curvature(2, 3, rng), 2)
    with pytest.raises(InputError):
        decoupling_blocks(random_curvature(3, 3, rng), 2)
    assert len(vortex_groups(2)) == 4
