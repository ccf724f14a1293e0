import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectra_lab.closed_form import (
    DIRICHLET,
    NEUMANN,
    circle_spectrum,
    counting_function,
    interval_spectrum,
    rectangle_spectrum,
    triangle_spectrum,
)
from spectra_lab.errors import DomainError
from spectra_lab.weyl_asymptotics import (
    CountingCurve,
    area_bounds_check,
    counting_curve,
    inversion_check,
    lattice_count,
    lattice_eigenvalue,
    li_yau_check,
    polya_check,
    union_count,
    union_spectrum,
    weyl_ratio,
)

PI = math.pi


def test_lattice_count_examples():
    assert lattice_count(PI, PI, 6.0, DIRICHLET) == 3
    assert lattice_count(PI, PI, 0.0, DIRICHLET) == 0
    assert lattice_count(PI, PI, 0.0, NEUMANN) == 1
    assert lattice_count(PI, PI, 5.0, DIRICHLET) == 3  # boundary points count


@given(st.floats(0.0, 400.0), st.sampled_from([DIRICHLET, NEUMANN]))
@settings(max_examples=50, deadline=None)
def test_lattice_count_matches_sorted_spectrum(alpha, bc):
    spec = rectangle_spectrum(1.3, 2.1, bc, 400)
    assert lattice_count(1.3, 2.1, alpha, bc) == counting_function(spec, alpha)


def test_lattice_count_monotone():
    alphas = np.linspace(0, 500, 400)
    counts = [lattice_count(1.0, 1.7, a, DIRICHLET) for a in alphas]
    assert np.all(np.diff(counts) >= 0)


def test_lattice_budget_and_domain():
    with pytest.raises(DomainError):
        lattice_count(PI, PI, 1e9, DIRICHLET)
    with pytest.raises(DomainError):
        lattice_count(PI, PI, -1.0, DIRICHLET)


def test_area_bounds():
    rep = area_bounds_check(PI, PI, 100.0)
    assert rep.lower_ok and rep.upper_ok
    below = area_bounds_check(PI, PI, 1.9)
    assert below.count == 0 and below.lower < 0 and below.lower_ok and below.upper_ok


def test_upper_slack_shrinks_relative_to_alpha():
    rel = []
    for a in (10.0, 1e2, 1e3, 1e4):
        rep = area_bounds_check(PI, PI, a)
        assert rep.lower_ok and rep.upper_ok
        rel.append(rep.upper_slack / a)
    assert all(x > y for x, y in zip(rel, rel[1:]))


def test_weyl_ratio_interval_and_square():
    spec = interval_spectrum(PI, DIRICHLET, 1000)
    assert abs(weyl_ratio(spec, PI, 1)[-1] - 1) < 5e-3
    lam = lattice_eigenvalue(PI, PI, 10**4, DIRICHLET)
    assert abs(lam * PI**2 / (4 * PI * 1e4) - 1) <= 0.05
    # d = 2 reduces to lambda_j |Omega| / (4 pi j)
    sq = rectangle_spectrum(PI, PI, DIRICHLET, 50)
    j = np.arange(1, 51)
    assert np.allclose(weyl_ratio(sq, PI**2, 2), sq.values * PI**2 / (4 * PI * j))


def test_weyl_ratio_rejections():
    with pytest.raises(DomainError):
        weyl_ratio(circle_spectrum(5), 2 * PI, 1)
    with pytest.raises(DomainError):
        weyl_ratio([1.0, 2.0], 0.0, 2)
    with pytest.raises(DomainError):
        weyl_ratio([1.0, 2.0], 1.0, 4)


def test_inversion_exact_staircase():
    rep = inversion_check(2.0, [10, 100, 1000])
    assert np.all(rep.deviations <= 1.0 / rep.js)


def test_inversion_with_square_root_perturbation():
    # shape of the rectangle lower bound: N = alpha/c - (P/2pi) sqrt(alpha)
    rep = inversion_check(4 / PI, [10**2, 10**3, 10**4], perturbation=lambda a: -2 * math.sqrt(a))
    assert rep.deviations[-1] < 0.05
    assert np.all(np.diff(rep.deviations) < 0)


def test_inversion_on_actual_square_curve():
    counting = lambda a: lattice_count(PI, PI, a, DIRICHLET)  # noqa: E731
    rep = inversion_check(4 * PI / PI**2, [10**2, 10**4], counting=counting)
    assert rep.deviations[1] < rep.deviations[0]


@pytest.mark.parametrize("dims", [(PI, PI), (1.0, 2.0)])
def test_polya_rectangles(dims):
    L, M = dims
    area = L * M
    assert polya_check(rectangle_spectrum(L, M, DIRICHLET, 10**4), area, "dirichlet") == []
    assert polya_check(rectangle_spectrum(L, M, NEUMANN, 10**4), area, "neumann") == []


def test_polya_triangle_and_first_value():
    tri = triangle_spectrum(1.0, DIRICHLET, 2000)
    assert polya_check(tri, math.sqrt(3) / 4, "dirichlet") == []
    assert 2.0 >= 4 * PI / PI**2


def test_polya_flags_a_violation():
    assert polya_check([0.1, 100.0], 1.0, "dirichlet") == [1]
    assert polya_check([0.0, 1e3], 1.0, "neumann") == [2]


@pytest.mark.parametrize("dims", [(PI, PI), (1.0, 2.0)])
def test_li_yau(dims):
    L, M = dims
    rep = li_yau_check(rectangle_spectrum(L, M, DIRICHLET, 1000), L * M)
    assert rep.holds and np.all(rep.margins >= 0)
    assert rep.corollary_violations == []


def test_li_yau_first_term():
    rep = li_yau_check(rectangle_spectrum(PI, PI, DIRICHLET, 1), PI**2)
    assert rep.margins[0] == pytest.approx(2 - 2 * PI / PI**2)


def test_bracketing_by_two_squares():
    # 2 x 1 rectangle cut into two unit squares
    rects = [(1.0, 1.0), (1.0, 1.0)]
    mu_t = union_spectrum(rects, NEUMANN, 50)
    mu = rectangle_spectrum(2.0, 1.0, NEUMANN, 50).values
    lam = rectangle_spectrum(2.0, 1.0, DIRICHLET, 50).values
    lam_t = union_spectrum(rects, DIRICHLET, 50)
    tol = 1e-12 * lam_t
    assert np.all(mu_t <= mu + tol) and np.all(mu <= lam + tol) and np.all(lam <= lam_t + tol)


def test_union_counting_is_additive():
    rects = [(1.0, 1.0), (1.0, 2.0), (0.5, 3.0), (2.0, 2.0)]
    for alpha in (5.0, 50.0, 500.0):
        for k in range(1, 5):
            spec = np.concatenate([rectangle_spectrum(L, M, DIRICHLET, 2000).values for L, M in rects[:k]])
            assert union_count(rects[:k], alpha, DIRICHLET) == int(np.sum(spec <= alpha * (1 + 1e-12)))


def test_counting_curve_csv():
    curve = counting_curve(PI, PI, [10.0, 100.0, 1000.0])
    buf = io.StringIO()
    curve.write_csv(buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "alpha,count,weyl_prediction,lower_bound,upper_bound"
    assert len(lines) == 4
    assert int(lines[2].split(",")[1]) == lattice_count(PI, PI, 100.0, DIRICHLET)


def test_counting_curve_invariants():
    with pytest.raises(DomainError):
        CountingCurve(np.array([1.0, 2.0]), np.array([3, 2]), 1.0, 4.0)
    with pytest.raises(DomainError):
        CountingCurve(np.array([2.0, 1.0]), np.array([1, 2]), 1.0, 4.0)
