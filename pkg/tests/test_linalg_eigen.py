import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectra_lab.errors import DomainError
from spectra_lab.linalg_eigen import (
    DenseSymmetric,
    EigenPairs,
    SymTridiagonal,
    dense_eigen,
    evolve,
    resolvent_apply,
    residuals,
    sturm_count,
    tridiag_eigen,
    wave_velocity,
)


def dirichlet_laplacian(L: float, n: int) -> SymTridiagonal:
    h = L / (n + 1)
    return SymTridiagonal(np.full(n, 2 / h**2), np.full(n - 1, -1 / h**2), h=h)


def fd_dirichlet_values(L: float, n: int) -> np.ndarray:
    h = L / (n + 1)
    j = np.arange(1, n + 1)
    return 4 / h**2 * np.sin(j * np.pi * h / (2 * L)) ** 2


def assert_orthonormal(v, tol=1e-10):
    assert np.max(np.abs(v.T @ v - np.eye(v.shape[1]))) < tol


# -- tridiagonal solver -------------------------------------------------------


def test_two_by_two():
    pairs = tridiag_eigen(SymTridiagonal(np.array([2.0, 2.0]), np.array([1.0])), 2)
    assert np.allclose(pairs.values, [1, 3], atol=1e-14)


def test_repeated_eigenvalue_cluster():
    pairs = tridiag_eigen(SymTridiagonal(np.full(3, 5.0), np.zeros(2)), 3)
    assert np.allclose(pairs.values, [5, 5, 5])
    assert_orthonormal(pairs.vectors)


def test_fd_laplacian_against_closed_form():
    T = dirichlet_laplacian(np.pi, 200)
    pairs = tridiag_eigen(T, 10)
    assert abs(pairs.values[0] - 1) < 1e-4
    assert np.allclose(pairs.values, fd_dirichlet_values(np.pi, 200)[:10], rtol=1e-13)
    assert_orthonormal(pairs.vectors)
    assert np.all(residuals(T, pairs) <= 1e-9 * T.norm())


def test_sturm_count_is_monotone_counting():
    T = dirichlet_laplacian(1.0, 50)
    vals = fd_dirichlet_values(1.0, 50)
    mids = 0.5 * (vals[:-1] + vals[1:])
    assert np.array_equal(sturm_count(T, mids), np.arange(1, 50))
    assert sturm_count(T, vals[0] - 1.0)[0] == 0


@given(st.integers(2, 50), st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_bisection_matches_jacobi(n, seed):
    rng = np.random.default_rng(seed)
    T = SymTridiagonal(rng.standard_normal(n), rng.standard_normal(n - 1))
    tri = tridiag_eigen(T)
    dense = dense_eigen(T.to_dense())
    assert np.max(np.abs(tri.values - dense.values)) < 1e-8
    assert_orthonormal(tri.vectors)
    assert_orthonormal(dense.vectors)


def test_tridiag_validation():
    with pytest.raises(DomainError):
        SymTridiagonal(np.array([1.0]), np.array([]))
    with pytest.raises(DomainError):
        SymTridiagonal(np.ones(3), np.ones(3))
    with pytest.raises(DomainError):
        tridiag_eigen(dirichlet_laplacian(1.0, 5), 6)


def test_tridiag_is_deterministic():
    T = dirichlet_laplacian(2.0, 80)
    a, b = tridiag_eigen(T, 5), tridiag_eigen(T, 5)
    assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)


# -- Jacobi solver -----------------------------------------------------------


def test_jacobi_diagonal():
    pairs = dense_eigen(np.diag([3.0, 1.0, 2.0]))
    assert np.array_equal(pairs.values, [1.0, 2.0, 3.0])


def test_jacobi_similarity_invariance():
    th = 0.37
    Q = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    pairs = dense_eigen(Q @ np.diag([1.0, 4.0]) @ Q.T)
    assert np.allclose(pairs.values, [1, 4], atol=1e-14)
    assert abs(abs(pairs.vectors[:, 0] @ Q[:, 0]) - 1) < 1e-14


def test_jacobi_matches_tridiag_on_embedded_matrix():
    T = dirichlet_laplacian(np.pi, 60)
    dense = dense_eigen(DenseSymmetric(T.to_dense()))
    tri = tridiag_eigen(T, 60)
    assert np.max(np.abs(dense.values - tri.values)) < 1e-9
    # eigenvectors agree up to sign, which both solvers fix the same way
    assert np.max(np.abs(dense.vectors - tri.vectors)) < 1e-8


def test_jacobi_random_and_odd_sizes():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3, 9, 40):
        B = rng.standard_normal((n, n))
        A = B + B.T
        pairs = dense_eigen(A)
        assert np.all(np.diff(pairs.values) >= 0)
        assert_orthonormal(pairs.vectors)
        assert np.all(residuals(A, pairs) <= 1e-12 * np.linalg.norm(A) * n)


def test_jacobi_tie_break_by_index():
    pairs = dense_eigen(np.diag([2.0, 1.0, 2.0, 2.0]))
    assert np.argmax(pairs.vectors[:, 1]) == 0
    assert np.argmax(pairs.vectors[:, 2]) == 2
    assert np.argmax(pairs.vectors[:, 3]) == 3


def test_dense_symmetry_check():
    with pytest.raises(DomainError):
        DenseSymmetric(np.array([[1.0, 2.0], [2.1, 1.0]]))
    DenseSymmetric(np.array([[1.0, 2.0], [2.0 + 1e-14, 1.0]]))


@pytest.mark.slow
def test_jacobi_desk_scale():
    rng = np.random.default_rng(11)
    B = rng.standard_normal((512, 512))
    A = B + B.T
    pairs = dense_eigen(A)
    assert_orthonormal(pairs.vectors)
    assert pairs.residual_bound < 1e-12


# -- expansions --------------------------------------------------------------


@pytest.fixture(scope="module")
def lap():
    T = dirichlet_laplacian(np.pi, 120)
    return T, tridiag_eigen(T, 120)


def test_resolvent_single_mode(lap):
    _, pairs = lap
    u1 = pairs.vectors[:, 0]
    assert np.allclose(resolvent_apply(pairs, 0.0, u1), u1 / pairs.values[0], atol=1e-14)


def test_resolvent_defining_identity(lap):
    T, pairs = lap
    f = np.random.default_rng(0).standard_normal(T.n)
    u = resolvent_apply(pairs, -1.0, f)
    assert np.linalg.norm(T.matvec(u) + u - f) / np.linalg.norm(f) < 1e-8


def test_resolvent_blows_up_near_eigenvalue(lap):
    _, pairs = lap
    g1 = pairs.values[0]
    f = pairs.vectors[:, 0] + pairs.vectors[:, 1]
    r1 = np.linalg.norm(resolvent_apply(pairs, g1 - 1e-3, f))
    r2 = np.linalg.norm(resolvent_apply(pairs, g1 - 1e-4, f))
    assert r2 / r1 == pytest.approx(10.0, rel=0.1)
    with pytest.raises(DomainError):
        resolvent_apply(pairs, g1, f)


def test_evolve_identity_at_zero(lap):
    _, pairs = lap
    f = np.random.default_rng(1).standard_normal(len(pairs))
    for kind in ("heat", "schrodinger"):
        assert np.allclose(evolve(pairs, f, 0.0, kind), f, atol=1e-12)
    assert np.allclose(evolve(pairs, f, 0.0, "wave", velocity=np.zeros_like(f)), f, atol=1e-12)


def test_heat_single_mode(lap):
    _, pairs = lap
    u1 = pairs.vectors[:, 0]
    assert np.allclose(evolve(pairs, u1, 1.0, "heat"), np.exp(-pairs.values[0]) * u1, atol=1e-14)
    with pytest.raises(DomainError):
        evolve(pairs, u1, -1.0, "heat")


def test_schrodinger_unitary(lap):
    _, pairs = lap
    f = np.random.default_rng(2).standard_normal(len(pairs))
    for t in (0.1, 1.0, 7.3, 100.0):
        out = evolve(pairs, f, t, "schrodinger")
        assert np.iscomplexobj(out)
        assert abs(np.linalg.norm(out) - np.linalg.norm(f)) < 1e-10


def test_heat_gap_controls_alignment(lap):
    _, pairs = lap
    f = np.random.default_rng(4).standard_normal(len(pairs))
    g1, g2 = pairs.values[:2]
    u1 = pairs.vectors[:, 0]
    ts = np.linspace(1.0, 5.0, 9)
    resid = []
    for t in ts:
        v = evolve(pairs, f, t, "heat")
        v = v / np.linalg.norm(v)
        resid.append(np.linalg.norm(v - (v @ u1) * u1))
    slope = np.polyfit(ts, np.log(resid), 1)[0]
    assert slope == pytest.approx(-(g2 - g1), rel=0.05)


def test_wave_energy_conserved(lap):
    T, pairs = lap
    rng = np.random.default_rng(5)
    u0 = pairs.vectors[:, :10] @ rng.standard_normal(10)
    v0 = pairs.vectors[:, :10] @ rng.standard_normal(10)

    def energy(u, v):
        return u @ T.matvec(u) + v @ v

    e0 = energy(u0, v0)
    for t in np.linspace(0, 10, 11):
        u = evolve(pairs, u0, t, "wave", velocity=v0)
        v = wave_velocity(pairs, u0, v0, t)
        assert abs(energy(u, v) - e0) <= 1e-8 * e0


def test_wave_needs_positive_spectrum():
    pairs = EigenPairs(np.array([0.0, 1.0]), np.eye(2))
    with pytest.raises(DomainError):
        evolve(pairs, np.ones(2), 1.0, "wave")
    with pytest.raises(DomainError):
        evolve(pairs, np.ones(2), 1.0, "diffusion")
