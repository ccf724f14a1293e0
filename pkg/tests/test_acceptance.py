"""Acceptance criteria 1-11.

Each test prints one ``PASS``/``FAIL`` line (outside pytest's capture) and
then asserts the criterion with the tolerance stated for it.
"""

import math
import time
import warnings

import numpy as np
import pytest

from spectra_lab.closed_form import (
    DIRICHLET,
    NEUMANN,
    hydrogen_spectrum,
    interval_spectrum,
    oscillator_spectrum,
    rectangle_spectrum,
)
from spectra_lab.discretization import (
    hydrogen_radial,
    laplacian_1d,
    quadratic_potential,
    schrodinger_1d,
    sech2_potential,
)
from spectra_lab.linalg_eigen import tridiag_eigen
from spectra_lab.scattering_sech import (
    LineGrid,
    TruncationWarning,
    omega_grid,
    plancherel_check,
    spectral_decompose,
    weyl_sequence,
)
from spectra_lab.special_functions import bessel_j, bessel_root, sech
from spectra_lab.stability_rd import (
    linearized_spectrum_rd,
    reaction_preset,
    sensitivity_solution,
    shoot_steady,
    stability_verdict,
)
from spectra_lab.stability_tf import (
    constant_coefficient,
    constant_profile,
    constant_state_modes,
    convexity_trial,
    film_preset,
    linearized_spectrum_tf,
    steady_state_tf,
    zero_mode,
)
from spectra_lab.variational import bc_comparison
from spectra_lab.weyl_asymptotics import lattice_count, lattice_eigenvalue

PI = math.pi
TWO_PI = 2 * PI


@pytest.fixture
def verdict(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail
    return emit


def test_criterion_01_closed_form_goldens(verdict):
    checks = {
        "square dirichlet": (rectangle_spectrum(PI, PI, DIRICHLET, 6).values, [2, 5, 5, 8, 10, 10]),
        "square neumann": (rectangle_spectrum(PI, PI, NEUMANN, 6).values, [0, 1, 1, 2, 4, 4]),
        "interval dirichlet": (interval_spectrum(PI, DIRICHLET, 3).values, [1, 4, 9]),
        "oscillator d=1": (oscillator_spectrum(1, 4).values, [1, 3, 5, 7]),
        "hydrogen": (hydrogen_spectrum(3).values, [-1] + [-1 / 4] * 4 + [-1 / 9] * 9),
    }
    drift = {k: float(np.max(np.abs(np.asarray(got) - np.asarray(want, dtype=float))))
             for k, (got, want) in checks.items()}
    ok = all(len(got) == len(want) for got, want in checks.values()) and max(drift.values()) <= 1e-12
    verdict(1, ok, f"max drift {max(drift.values()):.2e} over {', '.join(drift)}")


def test_criterion_02_bessel_roots(verdict):
    paper = {(0, 1): 2.40, (1, 1): 3.83, (2, 1): 5.13, (1, 2): 5.52}
    got = {key: bessel_root(*key) for key in paper}
    misses = {f"j_{n},{m}": round(got[(n, m)], 4) for (n, m), v in paper.items()
              if abs(got[(n, m)] - v) >= 0.01}
    x = np.linspace(0.1, 30.0, 300)
    # J0' by a centred difference of the computed J0, independent of how J0' is coded
    h = 1e-4
    slope = (bessel_j(0, x + h) - bessel_j(0, x - h)) / (2 * h)
    identity = float(np.max(np.abs(slope + bessel_j(1, x))))
    root_gap = max(abs(bessel_root(0, m, "Jprime") - bessel_root(1, m)) for m in range(1, 6))
    ok = not misses and identity <= 1e-8 and root_gap <= 1e-8
    verdict(2, ok, f"roots off by >= 0.01: {misses or 'none'}; "
                   f"J0' + J1 = {identity:.1e}, root gap {root_gap:.1e}")


def test_criterion_03_fd_convergence(verdict):
    err = [abs(tridiag_eigen(laplacian_1d(PI, DIRICHLET, n), 1).values[0] - 1.0) for n in (100, 200, 400)]
    ratios = [err[0] / err[1], err[1] / err[2]]
    ok = all(3.6 <= r <= 4.4 for r in ratios)
    verdict(3, ok, f"error ratios {ratios[0]:.4f}, {ratios[1]:.4f}")


def test_criterion_04_bc_comparison_chain(verdict):
    margins = {}
    for sigma in (0.1, 1.0, 10.0):
        margins[f"interval s={sigma:g}"] = bc_comparison(PI, sigma, 200, j_max=10).worst_margin
        margins[f"square s={sigma:g}"] = bc_comparison((PI, PI), sigma, 60, j_max=10).worst_margin
    worst = min(margins.values())
    verdict(4, worst >= -1e-10, f"worst margin {worst:.3e} over {len(margins)} cases")


def test_criterion_05_weyl(verdict):
    t0 = time.perf_counter()
    lam = lattice_eigenvalue(PI, PI, 10_000, DIRICHLET)
    elapsed = time.perf_counter() - t0
    ratio = lam * PI**2 / (4 * PI * 10_000)
    area, perim = PI**2, 4 * PI
    bounds_ok = True
    for alpha in (10.0, 1e2, 1e3, 1e4):
        N = lattice_count(PI, PI, alpha, DIRICHLET)
        lower = area / (4 * PI) * alpha - perim / (2 * PI) * math.sqrt(alpha)
        bounds_ok &= lower <= N <= area / (4 * PI) * alpha
    ok = abs(ratio - 1) <= 0.05 and elapsed <= 10 and bounds_ok
    verdict(5, ok, f"ratio at j=1e4 {ratio:.5f} in {elapsed:.2f}s; counting bounds hold: {bounds_ok}")


def test_criterion_06_polya_li_yau(verdict):
    bad = []
    for L, M in ((PI, PI), (1.0, 2.0)):
        area = L * M
        j = np.arange(1, 1001)
        lam = rectangle_spectrum(L, M, DIRICHLET, 1000).values
        mu = rectangle_spectrum(L, M, NEUMANN, 1000).values
        bound = 4 * PI * j / area
        tol = 1e-12 * bound
        bad += [("polya D", L, M, int(k)) for k in j[lam < bound - tol]]
        bad += [("polya N", L, M, int(k)) for k in j[mu > bound + tol]]
        bad += [("li-yau", L, M, int(k)) for k in j[np.cumsum(lam) < 2 * PI * j**2 / area * (1 - 1e-12)]]
    verdict(6, not bad, f"violations for j <= 1000: {bad[:5] or 'none'}")


def test_criterion_07_schrodinger_wells(verdict):
    osc = tridiag_eigen(schrodinger_1d(quadratic_potential(), 10.0, 2000), 5).values
    osc_err = float(np.max(np.abs(osc - [1, 3, 5, 7, 9])))
    T = schrodinger_1d(sech2_potential(), 20.0, 4000)
    pairs = tridiag_eigen(T, 3)
    n_neg = int(np.sum(pairs.values < 0))
    ground = pairs.vectors[:, 0]
    target = sech(T.nodes)
    cosine = abs(ground @ target) / (np.linalg.norm(ground) * np.linalg.norm(target))
    t0 = time.perf_counter()
    hyd = tridiag_eigen(hydrogen_radial(40.0, 4000), 2).values
    elapsed = time.perf_counter() - t0
    hyd_err = float(np.max(np.abs(hyd - [-1.0, -0.25])))
    ok = (osc_err <= 1e-3 and n_neg == 1 and abs(pairs.values[0] + 1) <= 1e-3 and cosine > 0.999
          and hyd_err <= 1e-2 and elapsed <= 60)
    verdict(7, ok, f"oscillator err {osc_err:.1e}; sech2 negatives {n_neg}, E0 {pairs.values[0]:.6f}, "
                   f"cosine {cosine:.6f}; hydrogen err {hyd_err:.1e} in {elapsed:.2f}s")


def test_criterion_08_reaction_diffusion(verdict):
    lin, lc = reaction_preset("linear"), reaction_preset("linear_cubic")
    two_hump = shoot_steady(lin, 1.0, n_zeros=2)
    tau1 = float(linearized_spectrum_rd(lin, two_hump, 1000, k=1).values[0])
    s, d = 1.0, 1e-4
    _, vT = sensitivity_solution(lc, s)
    fd = (shoot_steady(lc, s + d).T - shoot_steady(lc, s - d).T) / (2 * d)
    rel = abs(vT / s - fd) / abs(fd)
    energy = max(shoot_steady(lc, s).energy_residual for s in (0.5, 1.0, 2.0))
    # y + y^3 hardens (unstable states), y - y^3 softens below its separatrix (stable states)
    soft = reaction_preset("linear_minus_cubic")
    sweep = [stability_verdict(lc, s) for s in np.linspace(0.5, 2.5, 5)]
    sweep += [stability_verdict(soft, s) for s in np.linspace(0.2, 0.6, 5)]
    agree = all(np.sign(e.s_dT_ds) == np.sign(e.tau1) for e in sweep)
    ok = abs(tau1 + 0.75) <= 1e-3 and rel <= 1e-4 and energy < 1e-8 and agree
    verdict(8, ok, f"tau1 {tau1:.6f}; v(T) vs centred difference {rel:.1e}; energy {energy:.1e}; "
                   f"sweeps agree: {agree} ({sorted({e.verdict for e in sweep})})")


def test_criterion_09_thin_film(verdict):
    quad = film_preset("quadratic")
    Hbar, n = 0.5, 256
    vals = np.sort(linearized_spectrum_tf(constant_profile(Hbar, TWO_PI, n), quad).values)[:10]
    q = TWO_PI * np.arange(1, 6) / TWO_PI
    exact = q**2 * (q**2 - Hbar**2)  # independent evaluation of the dispersion relation
    assert np.allclose(exact, [t for _, t in constant_state_modes(quad, Hbar, TWO_PI, 5)])
    disp = float(np.max(np.abs(vals.reshape(5, 2) - exact[:, None]) / np.abs(exact)[:, None]))

    g = constant_coefficient((TWO_PI / TWO_PI) ** 2)
    prof, _ = steady_state_tf(g, TWO_PI, 1.0, center=1.5, n=128)
    zm = zero_mode(linearized_spectrum_tf(prof, g), prof.H)

    qprof, _ = steady_state_tf(quad, TWO_PI, 0.3, n=128)
    tau1 = float(linearized_spectrum_tf(qprof, quad).values[0])
    full, reduced = convexity_trial(qprof, quad)
    forms = abs(full - reduced) / abs(reduced)
    ok = disp <= 1e-2 and zm.similarity > 0.999 and abs(zm.value) < 1e-3 and tau1 < 0 and forms <= 1e-4
    verdict(9, ok, f"dispersion rel err {disp:.1e}; zero mode similarity {zm.similarity:.6f}, "
                   f"tau {zm.value:.1e}; g=y^2 tau1 {tau1:.4f}, trial forms differ {forms:.1e}")


def test_criterion_10_sech_spectral_calculus(verdict):
    g30 = LineGrid(30.0, 8192)
    dec = spectral_decompose(sech(g30.xs), g30, omega_grid(4.0, 961))
    cmax = float(np.max(np.abs(dec.coeffs)))
    g = LineGrid(20.0, 4096)
    gap = plancherel_check(np.exp(-g.xs**2), g).gap
    d1 = spectral_decompose(np.exp(-g.xs**2), g)
    e1 = float(np.max(np.abs(d1.reconstruct() - np.exp(-g.xs**2))))
    fine = LineGrid(20.0, 2 * g.n - 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        d2 = spectral_decompose(np.exp(-fine.xs**2), fine, omega_grid(4.0, 2 * len(d1.omegas) - 1))
    e2 = float(np.max(np.abs(d2.reconstruct() - np.exp(-fine.xs**2))))
    ok = abs(dec.c_disc - 2) <= 1e-6 and cmax < 1e-8 and gap < 1e-3 and e1 < 1e-4 and e1 / e2 >= 8
    verdict(10, ok, f"c_disc {dec.c_disc.real:.10f}, max continuum {cmax:.1e}; Plancherel gap {gap:.1e}; "
                    f"reconstruction {e1:.1e} -> {e2:.1e} (x{e1 / e2:.1f})")


def test_criterion_11_weyl_sequence(verdict):
    steps = weyl_sequence(4 * PI**2, [4, 8, 16, 32])
    res = np.array([s.residual for s in steps])
    ratios = res[1:] / res[:-1]
    norms = max(abs(s.norm - 1) for s in steps)
    monotone = {name: bool(np.all(np.diff([s.pairings[name] for s in steps]) < 0))
                for name in steps[0].pairings}
    ok = bool(np.all((ratios >= 0.4) & (ratios <= 0.6))) and norms <= 1e-6 and all(monotone.values())
    verdict(11, ok, f"residual ratios {np.round(ratios, 4).tolist()}; norm defect {norms:.1e}; "
                    f"pairings decreasing {monotone}")
