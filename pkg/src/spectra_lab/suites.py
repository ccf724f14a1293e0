"""Validation batteries run by ``spectra-lab validate --suite <name>``.

Each suite returns a list of :class:`Check` records.  A suite fails when any
check fails; numeric errors raised inside a check are recorded as failures of
that check rather than aborting the whole battery.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from spectra_lab.closed_form import DIRICHLET, NEUMANN, rectangle_spectrum
from spectra_lab.errors import SpectraError
from spectra_lab.scattering_sech import (
    LineGrid,
    TruncationWarning,
    omega_grid,
    plancherel_check,
    spectral_decompose,
    weyl_sequence,
)
from spectra_lab.special_functions import sech
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
from spectra_lab.variational import bc_comparison, monotonicity_check
from spectra_lab.weyl_asymptotics import (
    area_bounds_check,
    inversion_check,
    lattice_eigenvalue,
    li_yau_check,
    polya_check,
)

TWO_PI = 2.0 * math.pi


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "value": self.value,
                "detail": self.detail}


def _guard(name: str, fn: Callable[[], Check]) -> Check:
    try:
        return fn()
    except SpectraError as exc:
        return Check(name, False, None, {"error": f"{type(exc).__name__}: {exc}"})


# ---------------------------------------------------------------------------
# Counting and eigenvalue inequalities
# ---------------------------------------------------------------------------


def suite_weyl() -> list[Check]:
    def ratio():
        lam = lattice_eigenvalue(math.pi, math.pi, 10_000, DIRICHLET)
        r = lam * math.pi**2 / (4 * math.pi * 10_000)
        return Check("square_ratio_j10000", abs(r - 1) <= 0.05, r, {"lambda": lam})

    def bounds():
        reps = [area_bounds_check(math.pi, math.pi, a) for a in (10.0, 1e2, 1e3, 1e4)]
        ok = all(r.lower_ok and r.upper_ok for r in reps)
        return Check("counting_bounds", ok, min(min(r.lower_slack, r.upper_slack) for r in reps),
                     {"counts": [r.count for r in reps]})

    def inversion():
        rep = inversion_check(1.0, [10, 100, 1000], perturbation=lambda a: math.sqrt(a) / 10)
        dev = rep.deviations
        return Check("inversion_decay", bool(np.all(np.diff(dev) < 0)), float(dev[-1]),
                     {"deviations": dev})

    return [_guard("square_ratio_j10000", ratio), _guard("counting_bounds", bounds),
            _guard("inversion_decay", inversion)]


DOMAINS = {"square": (math.pi, math.pi), "rect_1x2": (1.0, 2.0)}


def suite_polya(j_max: int = 1000) -> list[Check]:
    out = []
    for tag, (L, M) in DOMAINS.items():
        for bc in (DIRICHLET, NEUMANN):
            name = f"{tag}_{bc.tag}"

            def run(L=L, M=M, bc=bc, name=name):
                bad = polya_check(rectangle_spectrum(L, M, bc, j_max), L * M, bc.tag)
                return Check(name, not bad, float(len(bad)), {"violations": bad[:10]})
            out.append(_guard(name, run))
    return out


def suite_liyau(j_max: int = 1000) -> list[Check]:
    out = []
    for tag, (L, M) in DOMAINS.items():
        def run(L=L, M=M, tag=tag):
            rep = li_yau_check(rectangle_spectrum(L, M, DIRICHLET, j_max), L * M)
            return Check(tag, rep.holds, float(rep.margins.min()),
                         {"corollary_violations": rep.corollary_violations[:10]})
        out.append(_guard(tag, run))
    return out


def suite_comparison() -> list[Check]:
    out = []
    for sigma in (0.1, 1.0, 10.0):
        for dims, n, tag in ((math.pi, 200, "interval"), ((math.pi, math.pi), 60, "square")):
            name = f"{tag}_sigma_{sigma:g}"

            def run(dims=dims, n=n, sigma=sigma, name=name):
                v = bc_comparison(dims, sigma, n, j_max=10)
                return Check(name, v.holds, v.worst_margin, {})
            out.append(_guard(name, run))
    return out


def suite_monotonicity() -> list[Check]:
    def incl():
        v = monotonicity_check("dirichlet_inclusion", {"outer": (2.0, 2.0), "inner": (1.0, 1.5)})
        return Check("dirichlet_inclusion", v.holds, v.worst_margin)

    def part():
        v = monotonicity_check("neumann_partition", {"rect": (2.0, 1.0)})
        return Check("neumann_partition", v.holds, v.worst_margin)

    def counter():
        # Neumann eigenvalues are not monotone under inclusion; the check passes
        # when the counterexample is detected
        v = monotonicity_check("neumann_inclusion")
        return Check("neumann_inclusion_counterexample", not v.holds, v.worst_margin)

    return [_guard("dirichlet_inclusion", incl), _guard("neumann_partition", part),
            _guard("neumann_inclusion_counterexample", counter)]


# ---------------------------------------------------------------------------
# Stability studies
# ---------------------------------------------------------------------------


def suite_stability_rd() -> list[Check]:
    lin, lc = reaction_preset("linear"), reaction_preset("linear_cubic")

    def two_hump():
        prof = shoot_steady(lin, 1.0, n_zeros=2)
        tau = float(linearized_spectrum_rd(lin, prof, 1000, k=1).values[0])
        return Check("sine_two_hump_tau1", abs(tau + 0.75) <= 1e-3, tau, {"T": prof.T})

    def sensitivity():
        s, d = 1.0, 1e-4
        _, vT = sensitivity_solution(lc, s)
        fd = (shoot_steady(lc, s + d).T - shoot_steady(lc, s - d).T) / (2 * d)
        rel = abs(vT / s - fd) / abs(fd)
        return Check("time_map_identity", rel <= 1e-4, rel, {"vT": vT, "fd": fd})

    def energy():
        worst = max(shoot_steady(lc, s).energy_residual for s in (0.5, 1.0, 2.0))
        return Check("energy_conservation", worst < 1e-8, worst)

    def sweep():
        ev = [stability_verdict(lc, s) for s in np.linspace(0.5, 2.5, 5)]
        agree = all(np.sign(e.s_dT_ds) == np.sign(e.tau1) for e in ev)
        return Check("verdict_sweep", agree, float(len(ev)), {"verdicts": [e.verdict for e in ev]})

    return [_guard("sine_two_hump_tau1", two_hump), _guard("time_map_identity", sensitivity),
            _guard("energy_conservation", energy), _guard("verdict_sweep", sweep)]


def suite_stability_tf() -> list[Check]:
    quad = film_preset("quadratic")

    def dispersion():
        Hbar, n = 0.5, 256
        vals = np.sort(linearized_spectrum_tf(constant_profile(Hbar, TWO_PI, n), quad).values)
        exact = np.array([t for _, t in constant_state_modes(quad, Hbar, TWO_PI, 5)])
        err = float(np.max(np.abs(vals[:10].reshape(5, 2) - exact[:, None]) / np.abs(exact)[:, None]))
        return Check("dispersion_k_le_5", err <= 1e-2, err)

    def translation():
        g = constant_coefficient(1.0)
        prof, _ = steady_state_tf(g, TWO_PI, 1.0, center=1.5, n=128)
        zm = zero_mode(linearized_spectrum_tf(prof, g), prof.H)
        return Check("translation_zero_mode", zm.similarity > 0.999 and abs(zm.value) < 1e-3,
                     zm.similarity, {"tau": zm.value, "multiplicity": zm.multiplicity})

    def quadratic():
        prof, _ = steady_state_tf(quad, TWO_PI, 0.3, n=128)
        tau1 = float(linearized_spectrum_tf(prof, quad).values[0])
        full, reduced = convexity_trial(prof, quad)
        rel = abs(full - reduced) / abs(reduced)
        return Check("quadratic_unstable", tau1 < 0 and rel <= 1e-4, tau1,
                     {"trial_full": full, "trial_reduced": reduced})

    return [_guard("dispersion_k_le_5", dispersion), _guard("translation_zero_mode", translation),
            _guard("quadratic_unstable", quadratic)]


# ---------------------------------------------------------------------------
# sech^2 spectral calculus
# ---------------------------------------------------------------------------


def suite_sech() -> list[Check]:
    def bound_state():
        g = LineGrid(30.0, 8192)
        dec = spectral_decompose(sech(g.xs), g, omega_grid(4.0, 961))
        cmax = float(np.max(np.abs(dec.coeffs)))
        ok = abs(dec.c_disc - 2) <= 1e-6 and cmax < 1e-8
        return Check("sech_decomposition", ok, float(dec.c_disc.real), {"max_continuum": cmax})

    def plancherel():
        g = LineGrid(20.0, 4096)
        gap = plancherel_check(np.exp(-g.xs**2), g).gap
        return Check("plancherel_gaussian", gap < 1e-3, gap)

    def weyl():
        steps = weyl_sequence(4 * math.pi**2, [4, 8, 16, 32])
        res = np.array([s.residual for s in steps])
        ratios = res[1:] / res[:-1]
        ok = bool(np.all((ratios >= 0.4) & (ratios <= 0.6)))
        ok &= all(abs(s.norm - 1) <= 1e-6 for s in steps)
        for name in steps[0].pairings:
            ok &= bool(np.all(np.diff([s.pairings[name] for s in steps]) < 0))
        return Check("weyl_sequence", ok, float(ratios.max()), {"ratios": ratios})

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        return [_guard("sech_decomposition", bound_state), _guard("plancherel_gaussian", plancherel),
                _guard("weyl_sequence", weyl)]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "weyl": suite_weyl,
    "polya": suite_polya,
    "liyau": suite_liyau,
    "comparison": suite_comparison,
    "monotonicity": suite_monotonicity,
    "stability-rd": suite_stability_rd,
    "stability-tf": suite_stability_tf,
    "sech": suite_sech,
}


def run_suite(name: str) -> list[Check]:
    return SUITES[name]()


__all__ = ["Check", "SUITES", "run_suite"]
