"""Steady states of ``U'' + f(U) = 0`` on an interval and their stability.

A steady state is shot from ``U(0) = 0, U'(0) = s`` and ends at the first
return to zero, ``T(s)``.  The sign of ``s T'(s)`` decides linear stability of
that profile under Dirichlet conditions on ``(0, T(s))``; the module computes
it from the variational equation and cross-checks it against the lowest
eigenvalue of the linearized operator ``-w'' - f'(U) w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from spectra_lab.closed_form import DIRICHLET
from spectra_lab.discretization import laplacian_1d
from spectra_lab.errors import DomainError, InconsistentVerdict, ShootingError
from spectra_lab.linalg_eigen import EigenPairs, SymTridiagonal, tridiag_eigen

Scalar = Callable[[np.ndarray], np.ndarray]

DEFAULT_STEPS = 4096
EVENT_TOL = 1e-10
ENERGY_TOL = 1e-8
MARGINAL_BAND = 1e-6
TAU_BAND = 1e-4
STEP_BUDGET = 2_000_000


@dataclass(frozen=True)
class ReactionFn:
    """A nonlinearity ``f`` with three derivatives and ``F(y) = int_0^y f``.

    The antiderivative is checked against ``f`` by central differences at 20
    seeded points of ``[-2, 2]``.
    """

    f: Scalar
    fp: Scalar
    fpp: Scalar
    fppp: Scalar
    F: Scalar
    name: str = "custom"

    def __post_init__(self):
        if abs(float(self.F(np.array(0.0)))) > 1e-12:
            raise DomainError("antiderivative must satisfy F(0) = 0")
        y = np.random.default_rng(12).uniform(-2.0, 2.0, 20)
        d = 1e-5
        slope = (self.F(y + d) - self.F(y - d)) / (2 * d)
        if np.max(np.abs(slope - self.f(y)) / (1.0 + np.abs(self.f(y)))) > 1e-6:
            raise DomainError("F' does not match f")


def _poly(c0: float, c1: float, c3: float, name: str) -> ReactionFn:
    # f(y) = c0 + c1 y + c3 y^3
    return ReactionFn(
        f=lambda y: c0 + c1 * y + c3 * y**3,
        fp=lambda y: c1 + 3 * c3 * y**2,
        fpp=lambda y: 6 * c3 * y,
        fppp=lambda y: 6 * c3 + 0 * y,
        F=lambda y: c0 * y + c1 * y**2 / 2 + c3 * y**4 / 4,
        name=name,
    )


REACTION_PRESETS: dict[str, ReactionFn] = {
    "linear": _poly(0.0, 1.0, 0.0, "linear"),
    "cubic": _poly(0.0, 0.0, 1.0, "cubic"),
    "linear_cubic": _poly(0.0, 1.0, 1.0, "linear_cubic"),
    "linear_minus_cubic": _poly(0.0, 1.0, -1.0, "linear_minus_cubic"),
}


def reaction_preset(name: str) -> ReactionFn:
    try:
        return REACTION_PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown reaction preset {name!r}") from None


@dataclass(frozen=True)
class SteadyStateProfile:
    """Samples of a shot steady state on ``[0, T]`` (uniform, endpoints included).

    ``v`` holds the solution of the variational equation ``v'' + f'(U) v = 0``
    with ``v(0) = 0, v'(0) = 1``, integrated on the same grid.
    """

    s: float
    xs: np.ndarray
    U: np.ndarray
    Uprime: np.ndarray
    T: float
    v: np.ndarray = field(repr=False, default=None)
    energy_residual: float = 0.0
    zeros: int = 1

    def __post_init__(self):
        if self.U[0] != 0.0:
            raise DomainError("a profile starts at U(0) = 0")
        if abs(self.U[-1]) > EVENT_TOL * max(1.0, abs(self.s)):
            raise DomainError("profile does not end at a zero of U")
        if self.energy_residual >= ENERGY_TOL * max(1.0, self.s**2):
            raise DomainError(f"energy drift {self.energy_residual:.2e} exceeds tolerance")

    @property
    def h(self) -> float:
        return self.T / (len(self.xs) - 1)

    def symmetry_defect(self) -> float:
        """``max |U(T/2 + t) - U(T/2 - t)|`` over the grid (single-hump profiles)."""
        return float(np.max(np.abs(self.U - self.U[::-1])))


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------


def _rhs(f: ReactionFn, y: np.ndarray) -> np.ndarray:
    U, P, v, w = y
    return np.array([P, -f.f(U), w, -f.fp(U) * v])


def _rk4(f: ReactionFn, y: np.ndarray, h: float) -> np.ndarray:
    k1 = _rhs(f, y)
    k2 = _rhs(f, y + 0.5 * h * k1)
    k3 = _rhs(f, y + 0.5 * h * k2)
    k4 = _rhs(f, y + h * k3)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _march(f: ReactionFn, s: float, T: float, steps: int) -> np.ndarray:
    """Uniform RK4 on ``[0, T]``; returns the state at every grid point."""
    h = T / steps
    out = np.empty((steps + 1, 4))
    y = np.array([0.0, s, 0.0, 1.0])
    out[0] = y
    for i in range(steps):
        y = _rk4(f, y, h)
        out[i + 1] = y
    return out


def _locate_zero(f: ReactionFn, s: float, n_zeros: int, h: float) -> float:
    """Coarse march until the ``n_zeros``-th sign change of U, then bisect."""
    y = np.array([0.0, s, 0.0, 1.0])
    x, found = 0.0, 0
    for _ in range(STEP_BUDGET):
        nxt = _rk4(f, y, h)
        if not np.all(np.isfinite(nxt)) or abs(nxt[0]) > 1e8:
            raise ShootingError(f"solution with slope s = {s:g} escapes before returning to zero")
        if x > 0 and np.sign(nxt[0]) != np.sign(y[0]) or nxt[0] == 0.0:
            found += 1
            if found == n_zeros:
                lo, hi = 0.0, h
                while hi - lo > 1e-3 * EVENT_TOL:
                    mid = 0.5 * (lo + hi)
                    if np.sign(_rk4(f, y, mid)[0]) == np.sign(y[0]):
                        lo = mid
                    else:
                        hi = mid
                return x + 0.5 * (lo + hi)
        y, x = nxt, x + h
    raise ShootingError(f"no return to zero within {STEP_BUDGET} steps for s = {s:g}")


def shoot_steady(f: ReactionFn, s: float, steps: int = DEFAULT_STEPS, n_zeros: int = 1) -> SteadyStateProfile:
    """Shoot ``U'' + f(U) = 0, U(0) = 0, U'(0) = s`` to its ``n_zeros``-th zero.

    The zero is bracketed by a coarse RK4 march with bisection, then polished
    by Newton steps on ``T`` so that the uniform ``steps``-step integration
    ends at ``U(T) = 0`` to within ``1e-10``.

    Raises
    ------
    DomainError
        For ``s = 0`` or an odd ``steps``.
    ShootingError
        When the orbit escapes or never returns to zero.
    """
    s = float(s)
    if s == 0.0 or not math.isfinite(s):
        raise DomainError("initial slope must be nonzero")
    if steps < 16 or steps % 2:
        raise DomainError("steps must be an even integer >= 16")
    T = _locate_zero(f, s, n_zeros, 1e-2 / max(1.0, abs(s)))
    for _ in range(6):
        traj = _march(f, s, T, steps)
        U_end, P_end = traj[-1, 0], traj[-1, 1]
        T -= U_end / P_end
        if abs(U_end) < 1e-3 * EVENT_TOL * max(1.0, abs(s)):
            break
    traj = _march(f, s, T, steps)
    xs = np.linspace(0.0, T, steps + 1)
    U, P = traj[:, 0], traj[:, 1]
    energy = np.max(np.abs(0.5 * P**2 + f.F(U) - 0.5 * s * s))
    return SteadyStateProfile(s, xs, U, P, float(T), v=traj[:, 2], energy_residual=float(energy),
                              zeros=n_zeros)


def time_map(f: ReactionFn, s_values: Iterable[float], steps: int = DEFAULT_STEPS) -> list[tuple[float, float]]:
    """Pairs ``(s, T(s))``; shooting failures propagate."""
    return [(float(s), shoot_steady(f, s, steps).T) for s in s_values]


def energy_time_map(f: ReactionFn, s: float, nodes: int = 80) -> float:
    """``T(s)`` from ``2 int_0^{U_max} dU / sqrt(s^2 - 2F(U))``.

    The turning point ``U_max`` solves ``2F(U) = s^2``; the substitution
    ``U = U_max (1 - t^2)`` removes the square-root singularity, leaving a
    smooth integrand for Gauss-Legendre quadrature.
    """
    s = float(s)
    if s == 0:
        raise DomainError("initial slope must be nonzero")
    sgn = math.copysign(1.0, s)
    gap = lambda u: s * s - 2.0 * float(f.F(np.array(sgn * u)))  # noqa: E731
    hi = 1e-3
    while gap(hi) > 0:
        hi *= 2
        if hi > 1e8:
            raise ShootingError("no turning point: the orbit does not return")
    u_max = sgn * brentq(gap, 0.0, hi, xtol=1e-15, rtol=1e-15)
    t, w = np.polynomial.legendre.leggauss(nodes)
    t, w = 0.5 * (t + 1.0), 0.5 * w
    U = u_max * (1.0 - t * t)
    integrand = 2.0 * abs(u_max) * t / np.sqrt(s * s - 2.0 * f.F(U))
    return float(2.0 * np.sum(w * integrand))


def sensitivity_solution(f: ReactionFn, s: float, steps: int = DEFAULT_STEPS) -> tuple[np.ndarray, float]:
    """Samples of ``v = dU/ds`` and ``v(T) = s T'(s)``."""
    prof = shoot_steady(f, s, steps)
    return prof.v, float(prof.v[-1])


# ---------------------------------------------------------------------------
# Linearization
# ---------------------------------------------------------------------------


def profile_interpolant(f: ReactionFn, profile: SteadyStateProfile) -> CubicHermiteSpline:
    """C^1 interpolant of ``U`` built from ``U`` and ``U'`` samples."""
    return CubicHermiteSpline(profile.xs, profile.U, profile.Uprime)


def linearized_operator_rd(f: ReactionFn, profile: SteadyStateProfile, n: int) -> SymTridiagonal:
    """``-w'' - f'(U) w`` with Dirichlet conditions on ``(0, T)``, ``n`` interior nodes."""
    base = laplacian_1d(profile.T, DIRICHLET, n)
    U = profile_interpolant(f, profile)(base.nodes)
    return SymTridiagonal(base.diag - f.fp(U), base.offdiag, h=base.h, nodes=base.nodes, bc=base.bc)


def linearized_spectrum_rd(f: ReactionFn, profile: SteadyStateProfile, n: int = 1000,
                           k: int = 3) -> EigenPairs:
    """Lowest ``k`` eigenpairs of the linearized operator."""
    return tridiag_eigen(linearized_operator_rd(f, profile, n), k)


def constant_state_tau(q: float, X: float, j) -> np.ndarray:
    """``tau_j = (j pi / X)^2 - q`` for the linearization about ``U = 0``."""
    j = np.asarray(j, dtype=float)
    return (j * math.pi / X) ** 2 - q


def discrete_quotient(T: SymTridiagonal, w: np.ndarray) -> float:
    return float(w @ T.matvec(w) / (w @ w))


def nullmode_quotient(f: ReactionFn, profile: SteadyStateProfile, n: int = 2000) -> float:
    """Rayleigh quotient of ``U'`` cut off outside two consecutive zeros of ``U'``.

    Between those zeros ``w = U'`` solves ``-w'' - f'(U) w = 0`` and vanishes
    at both ends, so the quotient is zero up to discretization error.
    """
    Up = profile.Uprime
    idx = np.nonzero(np.sign(Up[1:]) != np.sign(Up[:-1]))[0]
    if len(idx) < 2:
        raise DomainError("U' needs two sign changes; shoot past the first zero")
    P = CubicHermiteSpline(profile.xs, Up, -f.f(profile.U))
    roots = [brentq(P, profile.xs[i], profile.xs[i + 1], xtol=1e-14) for i in idx[:2]]
    op = linearized_operator_rd(f, profile, n)
    x = op.nodes
    w = np.where((x > roots[0]) & (x < roots[1]), P(x), 0.0)
    return discrete_quotient(op, w)


def convexity_quotient(f: ReactionFn, profile: SteadyStateProfile, n: int = 2000) -> float:
    """Rayleigh quotient of ``w = U'' = -f(U)``, negative when ``f''' > 0``."""
    op = linearized_operator_rd(f, profile, n)
    U = profile_interpolant(f, profile)(op.nodes)
    return discrete_quotient(op, -f.f(U))


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityEvidence:
    s: float
    T: float
    dT_ds: float
    tau1: float
    verdict: str

    @property
    def s_dT_ds(self) -> float:
        return self.s * self.dT_ds

    def to_dict(self) -> dict:
        return {"s": self.s, "T": self.T, "dT_ds": self.dT_ds, "tau1": self.tau1,
                "verdict": self.verdict}


def stability_verdict(f: ReactionFn, s: float, n: int = 1000, steps: int = DEFAULT_STEPS) -> StabilityEvidence:
    """Classify the steady state shot with slope ``s`` on ``(0, T(s))``.

    The verdict follows the sign of ``s T'(s)`` (marginal below ``1e-6``).
    The lowest linearized eigenvalue must agree: negative when unstable,
    positive when stable, unless it lies within ``1e-4`` of zero.

    Raises
    ------
    InconsistentVerdict
        If the two criteria disagree outside that band.
    """
    prof = shoot_steady(f, s, steps)
    sdT = float(prof.v[-1])
    tau1 = float(linearized_spectrum_rd(f, prof, n, k=1).values[0])
    if abs(sdT) < MARGINAL_BAND:
        verdict = "marginal"
        agree = abs(tau1) < TAU_BAND
    elif sdT < 0:
        verdict = "unstable"
        agree = tau1 < 0 or abs(tau1) < TAU_BAND
    else:
        verdict = "stable"
        agree = tau1 > 0 or abs(tau1) < TAU_BAND
    if not agree:
        raise InconsistentVerdict(f"s T'(s) = {sdT:.3e} but tau_1 = {tau1:.3e} at s = {s:g}")
    return StabilityEvidence(float(s), prof.T, sdT / prof.s, tau1, verdict)


__all__ = [
    "REACTION_PRESETS",
    "ReactionFn",
    "StabilityEvidence",
    "SteadyStateProfile",
    "constant_state_tau",
    "convexity_quotient",
    "energy_time_map",
    "linearized_operator_rd",
    "linearized_spectrum_rd",
    "nullmode_quotient",
    "profile_interpolant",
    "reaction_preset",
    "sensitivity_solution",
    "shoot_steady",
    "stability_verdict",
    "time_map",
]
