import json
import math

import numpy as np
import pytest

from spectra_lab.closed_form import DIRICHLET, interval_spectrum, robin
from spectra_lab.discretization import laplacian_1d, schrodinger_1d, quadratic_potential
from spectra_lab.errors import DomainError
from spectra_lab.linalg_eigen import tridiag_eigen
from spectra_lab.variational import (
    TrialSubspace,
    bc_comparison,
    courant_probe,
    eigensum_bound,
    minimize_rayleigh,
    monotonicity_check,
    poincare_upper,
    rayleigh_quotient,
)


@pytest.fixture(scope="module")
def fd():
    T = laplacian_1d(math.pi, DIRICHLET, 40)
    return T, tridiag_eigen(T, 40)


@pytest.fixture(scope="module")
def well():
    T = schrodinger_1d(quadratic_potential(), 6.0, 36)
    return T, tridiag_eigen(T, 36)


def test_quotient_of_eigenvectors(fd):
    T, pairs = fd
    for j in range(5):
        assert rayleigh_quotient(T, pairs.vectors[:, j]) == pytest.approx(pairs.values[j], rel=1e-12)


def test_quotient_of_sampled_sine():
    n = 400
    T = laplacian_1d(2.0, DIRICHLET, n)
    f = np.sin(math.pi * T.nodes / 2.0)
    q = rayleigh_quotient(T, f)
    assert abs(q - (math.pi / 2) ** 2) < (math.pi / 2) ** 4 * T.h**2


def test_quotient_bounded_below(fd):
    T, pairs = fd
    rng = np.random.default_rng(0)
    for _ in range(200):
        assert rayleigh_quotient(T, rng.standard_normal(T.n)) >= pairs.values[0] - 1e-10
    with pytest.raises(DomainError):
        rayleigh_quotient(T, np.zeros(T.n))


def test_poincare_attained_on_eigenspace(fd):
    T, pairs = fd
    for j in (1, 3, 6):
        S = TrialSubspace(pairs.vectors[:, :j])
        assert poincare_upper(T, S) == pytest.approx(pairs.values[j - 1], rel=1e-10)


def test_poincare_coordinate_subspaces_strict(fd):
    T, pairs = fd
    for j in range(1, 8):
        val = poincare_upper(T, TrialSubspace(np.eye(T.n)[:, :j]))
        assert val > pairs.values[j - 1]


@pytest.mark.parametrize("op", ["fd", "well"])
def test_minimax_over_random_subspaces(op, request):
    T, pairs = request.getfixturevalue(op)
    rng = np.random.default_rng(7)
    for j in range(1, 6):
        for _ in range(100):
            S = TrialSubspace(rng.standard_normal((T.n, j)))
            assert poincare_upper(T, S) >= pairs.values[j - 1] - 1e-10
            if j >= 2:
                P = TrialSubspace(rng.standard_normal((T.n, j - 1)))
                assert courant_probe(T, P) <= pairs.values[j - 1] + 1e-10


def test_courant_attained(fd):
    T, pairs = fd
    assert courant_probe(T, TrialSubspace.empty(T.n)) == pytest.approx(pairs.values[0], rel=1e-10)
    for j in (2, 4):
        S = TrialSubspace(pairs.vectors[:, : j - 1])
        assert courant_probe(T, S) == pytest.approx(pairs.values[j - 1], rel=1e-9)


def test_degenerate_basis_rejected():
    v = np.random.default_rng(1).standard_normal(10)
    with pytest.raises(DomainError):
        TrialSubspace(np.column_stack([v, 2 * v]))


def test_eigensum(fd):
    T, pairs = fd
    assert eigensum_bound(T, pairs.vectors[:, :4]) == pytest.approx(pairs.values[:4].sum(), rel=1e-12)
    rng = np.random.default_rng(3)
    for _ in range(100):
        Q, _ = np.linalg.qr(rng.standard_normal((T.n, 4)))
        assert eigensum_bound(T, Q) >= pairs.values[:4].sum() - 1e-10
    f = rng.standard_normal(T.n)
    assert eigensum_bound(T, f) == pytest.approx(rayleigh_quotient(T, f))
    with pytest.raises(DomainError):
        eigensum_bound(T, np.column_stack([f, f + 1]))


def test_coordinate_descent_finds_ground_state():
    T = laplacian_1d(math.pi, DIRICHLET, 20)
    g1 = tridiag_eigen(T, 1).values[0]
    f, q, _ = minimize_rayleigh(T, np.random.default_rng(5).standard_normal(20))
    assert abs(q - g1) < 1e-6
    assert np.linalg.norm(T.matvec(f) - q * f) / np.linalg.norm(f) < 1e-4


def test_distinct_eigenvectors_orthogonal(well):
    _, pairs = well
    G = pairs.vectors.T @ pairs.vectors
    assert np.max(np.abs(G - np.eye(len(pairs)))) < 1e-10


@pytest.mark.parametrize("sigma", [0.1, 1.0, 10.0])
def test_bc_chain_interval(sigma):
    v = bc_comparison(math.pi, sigma, 200, 10)
    assert v.holds and v.worst_margin >= -1e-10


def test_bc_chain_small_sigma_gap():
    v = bc_comparison(math.pi, 1e-6, 200, 10)
    mu, rho, _ = v.details["exact"]
    assert np.max(rho - mu) < 1e-3
    mu, rho, _ = v.details["fd"]
    assert np.max(rho - mu) < 1e-3


def test_bc_chain_square():
    v = bc_comparison((math.pi, math.pi), 1.0, 100, 10)
    assert v.holds


def test_verdict_json_shape():
    payload = json.loads(bc_comparison(1.0, 1.0, 50, 5).to_json())
    assert set(payload) == {"theorem", "parameters", "j_range", "holds", "worst_margin"}
    assert payload["j_range"] == [1, 5] and payload["holds"] is True


def test_dirichlet_inclusion():
    v = monotonicity_check("dirichlet_inclusion",
                           {"outer": (math.pi, math.pi), "inner": (math.pi / 2, math.pi / 2)})
    assert v.holds
    assert np.allclose(v.details["inner"], 4 * v.details["outer"])
    with pytest.raises(DomainError):
        monotonicity_check("dirichlet_inclusion", {"outer": (1, 1), "inner": (2, 0.5)})


def test_neumann_partition():
    assert monotonicity_check("neumann_partition", {"rect": (2.0, 1.0)}).holds


def test_neumann_inclusion_counterexample():
    v = monotonicity_check("neumann_inclusion")
    assert not v.holds
    assert v.details["mu2"] == pytest.approx(math.pi**2)
    assert v.details["mu2_inner"] == pytest.approx(math.pi**2 / 1.62)


def test_closed_form_chain_matches_robin_limits():
    # the Robin branch sits strictly between the two closed forms
    mu = interval_spectrum(math.pi, robin(1.0), 5).values
    assert np.all(mu > np.arange(0, 5) ** 2) and np.all(mu < np.arange(1, 6) ** 2)
