import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vbma._kernels import BACKENDS
from vbma.errors import InputError, PreconditionError
from vbma.gram import Kind
from vbma.rank2 import (SurfaceBlocks, anticommutator_matrix, anticommutator_solve,
                        cauchy_schwarz_chain, greek_coefficients, pairing_coefficients,
                        quadratic_lambda_check, random_pairs, random_vbma_solution, rank2_sweep,
                        schur_inequality_batch, schur_inequality_check,
                        surface_preservation_check)


def cplx(rng, shape=(2, 2)):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_greek_coefficients_match_definition(rng):
    for _ in range(50):
        B, X = cplx(rng), cplx(rng)
        g = greek_coefficients(B, X)
        a = pairing_coefficients(B, X)
        scale = np.max(np.abs(a))
        assert abs(g.a11 - a[0, 0]) <= 1e-12 * scale
        assert abs(g.a22 - a[1, 1]) <= 1e-12 * scale
        assert abs(g.a12_plus_a21 - (a[0, 1] + a[1, 0])) <= 1e-12 * scale


def test_schur_gap_is_the_lambda_quadratic(rng):
    for lam in (1e-2, 0.7, 1.0, 35.0):
        B, X = cplx(rng), cplx(rng)
        lhs, rhs, _ = schur_inequality_check(B, X, lam)
        g = greek_coefficients(B, X)
        quad = lam ** 2 * g.a11 + lam * g.middle + g.a22
        assert (lhs - rhs) * 2 * lam * (1 + lam) == pytest.approx(quad, rel=1e-10)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), log_lam=st.floats(-3, 3))
def test_schur_inequality_and_chain(seed, log_lam):
    rng = np.random.default_rng(seed)
    B, X = cplx(rng), cplx(rng)
    lhs, rhs, holds = schur_inequality_check(B, X, 10.0 ** log_lam)
    assert holds
    g = greek_coefficients(B, X)
    lead, mid, bound = cauchy_schwarz_chain(g)
    tol = 1e-9 * max(abs(lead), mid, bound, 1e-300)
    assert lead <= mid + tol and mid <= bound + tol
    assert quadratic_lambda_check(g, tol=tol)


def test_quadratic_check_rejects_negative_leading():
    g = greek_coefficients(np.eye(2), np.zeros((2, 2)))
    assert quadratic_lambda_check(g)
    bad = g.__class__(0, 0, 0, 0, 0, a11=-1.0, a22=1.0, a12_plus_a21=0.0)
    assert not quadratic_lambda_check(bad)
    wide = g.__class__(0, 0, 0, 0, 0, a11=1.0, a22=1.0, a12_plus_a21=-3.0)
    assert not quadratic_lambda_check(wide)


def test_batch_matches_scalar(rng):
    B, X, lam = random_pairs(rng, 20)
    lhs, rhs, holds = schur_inequality_batch(B, X, lam)
    for i in range(20):
        l1, r1, h1 = schur_inequality_check(B[i], X[i], lam[i])
        assert lhs[i] == pytest.approx(l1, rel=1e-12) and rhs[i] == pytest.approx(r1, rel=1e-12)
        assert holds[i] == h1
    with pytest.raises(InputError):
        schur_inequality_check(B[0], X[0], 0.0)
    with pytest.raises(InputError):
        schur_inequality_batch(B, X, -lam)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
def test_backends_agree_on_pairings(rng):
    B, X, lam = random_pairs(rng, 500)
    (l0, r0), (l1, r1) = [mod.rank2_pairings(B, X, lam) for mod in BACKENDS.values()]
    assert np.allclose(l0, l1, rtol=1e-13) and np.allclose(r0, r1, rtol=1e-13)


def test_anticommutator_solver(rng):
    Z = cplx(rng, (3, 3))
    C = Z @ Z.conj().T + np.eye(3)
    X = cplx(rng, (3, 3))
    T = anticommutator_solve(C, X)
    assert np.allclose(C @ T + T @ C, X, atol=1e-12)
    flat = np.linalg.solve(anticommutator_matrix(C), X.reshape(-1))
    assert np.allclose(T.reshape(-1), flat, atol=1e-12)
    with pytest.raises(InputError, match="positive definite"):
        anticommutator_solve(-C, X)
    with pytest.raises(InputError, match="Hermitian"):
        anticommutator_solve(Z, X)


def test_random_solution_is_positive(rng):
    for _ in range(20):
        blocks = random_vbma_solution(rng, eta0=2.0)
        assert surface_preservation_check(blocks, 2.0).kind == Kind.POSITIVE


def test_flat_solution():
    # A = C = Id, B = 0 solves the equation with eta0 = 2.
    blocks = SurfaceBlocks(np.eye(2), np.zeros((2, 2)), np.eye(2))
    assert surface_preservation_check(blocks, 2.0).min_eigenvalue > 0


def test_preservation_preconditions(rng):
    blocks = random_vbma_solution(rng)
    with pytest.raises(InputError):
        surface_preservation_check(blocks, 0.0)
    with pytest.raises(PreconditionError, match="residual"):
        surface_preservation_check(blocks, 1.5)
    neg = SurfaceBlocks(-np.eye(2), np.zeros((2, 2)), np.eye(2))
    with pytest.raises(PreconditionError, match="positive definite"):
        surface_preservation_check(neg, 1.0)


def test_blocks_validation(rng):
    with pytest.raises(InputError):
        SurfaceBlocks(np.eye(3), np.zeros((2, 2)), np.eye(2))
    with pytest.raises(InputError, match="Hermitian"):
        SurfaceBlocks(cplx(rng), np.zeros((2, 2)), np.eye(2))
    blocks = random_vbma_solution(rng)
    again = SurfaceBlocks.from_curvature(blocks.curvature())
    assert np.allclose(again.B, blocks.B)


def test_sweep_is_deterministic():
    a = rank2_sweep(5000, seed=9, chunk=1000)
    b = rank2_sweep(5000, seed=9, chunk=1000)
    assert a == b
    assert a["schur_violations"] == a["chain_violations"] == a["quadratic_violations"] == 0
    assert a["witness"] is None
    with pytest.raises(InputError):
        rank2_sweep(0, seed=1)
