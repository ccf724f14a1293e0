import math
import warnings

import numpy as np
import pytest

from spectra_lab.errors import DomainError
from spectra_lab.scattering_sech import (
    LineGrid,
    TruncationWarning,
    apply_L,
    box_spectrum,
    cutoff,
    cutoff_norm,
    factorization_check,
    generalized_mode,
    line_grid_for,
    lowering,
    mode_residual,
    omega_grid,
    plancherel_check,
    raising,
    spectral_decompose,
    weyl_sequence,
)
from spectra_lab.special_functions import sech

FOUR_PI2 = 4 * math.pi**2


@pytest.fixture(scope="module")
def grid():
    return LineGrid(20.0, 4096)


def test_grid_invariants():
    g = LineGrid(15.0, 101)
    assert np.array_equal(g.xs, -g.xs[::-1])
    with pytest.raises(DomainError):
        LineGrid(10.0, 1000)


def test_factorization_on_gaussians(grid):
    x = grid.xs
    res = factorization_check(grid, [np.exp(-x**2), np.exp(-(x - 1) ** 2 / 2), x * np.exp(-x**2)])
    assert res.plus_minus < 1e-4 and res.minus_plus < 1e-4
    coarse = LineGrid(20.0, 2048)
    xc = coarse.xs
    res_c = factorization_check(coarse, [np.exp(-xc**2)])
    res_f = factorization_check(grid, [np.exp(-x**2)])
    assert res_f.minus_plus < res_c.minus_plus


def test_ground_state(grid):
    x = grid.xs
    assert np.max(np.abs(lowering(grid, sech(x)))) < 1e-6
    inside = np.abs(x) <= grid.R - 1
    assert np.max(np.abs(apply_L(grid, sech(x)) + sech(x))[inside]) < 1e-4


def test_adjointness(grid):
    x = grid.xs
    u = np.exp(-x**2) * (1 + 0.5j * x)
    v = np.exp(-((x - 1) ** 2)) * np.cos(3 * x)
    assert abs(grid.inner(raising(grid, u), v) - grid.inner(u, lowering(grid, v))) < 1e-6


def test_generalized_modes(grid):
    m0 = generalized_mode(0.0, grid)
    assert np.allclose(m0.values, np.tanh(grid.xs))
    assert mode_residual(m0, grid) < 1e-4
    m1 = generalized_mode(1.0, grid)
    assert m1.lam == pytest.approx(FOUR_PI2)
    assert m1.modulus_defect(grid.xs) < 1e-10
    ends = np.abs(m1.values[[0, -1]])
    assert np.allclose(ends, math.sqrt(1 + FOUR_PI2), rtol=1e-12)
    with pytest.raises(DomainError):
        generalized_mode(11.0, grid)


def test_mode_residual_second_order_or_better():
    r = [mode_residual(generalized_mode(0.5, LineGrid(20.0, n)), LineGrid(20.0, n)) for n in (1024, 2048)]
    assert r[0] / r[1] > 4


def test_decompose_sech():
    g = LineGrid(30.0, 8192)
    dec = spectral_decompose(sech(g.xs), g, omega_grid(4.0, 961))
    assert abs(dec.c_disc - 2) < 1e-6
    assert np.max(np.abs(dec.coeffs)) < 1e-8
    assert np.max(np.abs(dec.reconstruct() - sech(g.xs))) < 1e-6


def test_decompose_gaussian_and_refinement(grid):
    f = np.exp(-grid.xs**2)
    dec = spectral_decompose(f, grid)
    err = np.max(np.abs(dec.reconstruct() - f))
    assert err < 1e-4
    fine = LineGrid(20.0, 2 * grid.n - 1)
    dec2 = spectral_decompose(np.exp(-fine.xs**2), fine, omega_grid(4.0, 2 * len(dec.omegas) - 1))
    err2 = np.max(np.abs(dec2.reconstruct() - np.exp(-fine.xs**2)))
    assert err / err2 >= 8


def test_zero_and_linearity(grid):
    zero = spectral_decompose(np.zeros(grid.n), grid)
    assert zero.c_disc == 0 and np.all(zero.coeffs == 0)
    x = grid.xs
    f, g = np.exp(-x**2), x * np.exp(-(x**2) / 2)
    a = 0.7 - 0.2j
    d1, d2, d3 = (spectral_decompose(v, grid) for v in (f, g, a * f + g))
    assert abs(d3.c_disc - (a * d1.c_disc + d2.c_disc)) < 1e-10
    assert np.max(np.abs(d3.coeffs - (a * d1.coeffs + d2.coeffs))) < 1e-10


def test_plancherel(grid):
    x = grid.xs
    sech_rep = plancherel_check(sech(x), grid)
    assert sech_rep.rhs == pytest.approx(2.0, abs=1e-6)
    assert plancherel_check(np.exp(-x**2), grid).gap < 1e-3
    odd = x * np.exp(-x**2)
    dec = spectral_decompose(odd, grid)
    assert abs(dec.c_disc) < 1e-14
    assert plancherel_check(odd, grid).gap < 1e-3


def test_truncation_warning(grid):
    with pytest.warns(TruncationWarning):
        spectral_decompose(np.exp(-grid.xs**2 / 100), grid)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        spectral_decompose(np.exp(-grid.xs**2), grid)


def test_single_bound_state():
    vals = box_spectrum(15.0, 0.01, k=3).values
    assert np.sum(vals < 0) == 1
    assert abs(vals[0] + 1) < 1e-3


def test_lowest_box_mode_scales_like_inverse_square_width():
    # the smallest positive eigenvalue of a box of half-width R behaves like
    # (pi / 2R)^2 times a slowly varying factor, so doubling R quarters it
    a, b, c = (box_spectrum(R, 0.05, k=2).values[1] for R in (15.0, 30.0, 60.0))
    assert a > b > c > 0
    assert 0.2 <= b / a <= 0.3 and 0.2 <= c / b <= 0.3


def test_cutoff():
    x = np.linspace(-3, 3, 6001)
    k = cutoff(x)
    assert np.all(k[np.abs(x) <= 1] == 1) and np.all(k[np.abs(x) >= 2] == 0)
    assert cutoff_norm() ** 2 == pytest.approx(np.trapezoid(k**2, x), rel=1e-8)


def test_weyl_sequence_rates():
    steps = weyl_sequence(FOUR_PI2, [4, 8, 16, 32])
    res = np.array([s.residual for s in steps])
    assert np.all((res[1:] / res[:-1] >= 0.4) & (res[1:] / res[:-1] <= 0.6))
    assert all(abs(s.norm - 1) < 1e-6 for s in steps)
    for name in steps[0].pairings:
        p = np.array([s.pairings[name] for s in steps])
        assert np.all(np.diff(p) < 0), name
    gauss = [s.pairings["gaussian"] for s in steps]
    assert gauss[-1] < 0.1 * gauss[0]


def test_weyl_sequence_with_well():
    steps = weyl_sequence(FOUR_PI2, [4, 8, 16, 32], operator="sech")
    res = [s.residual for s in steps]
    assert all(a > b for a, b in zip(res, res[1:]))


def test_weyl_sequence_errors():
    with pytest.raises(DomainError):
        weyl_sequence(-1.0, [4])
    with pytest.raises(DomainError):
        weyl_sequence(1.0, [16], grid=LineGrid(20.0, 4001))
    assert line_grid_for(66.0).R == 66.0
