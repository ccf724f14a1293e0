"""Thin-film steady states ``H'' + G(H) = beta`` and their linearized spectra.

Periodic steady states of ``h_t = -h_xxxx - (g(h) h_x)_x`` are closed orbits of
the oscillator ``H'' = beta - G(H)``.  For a fixed starting excursion the
orbit's period depends on the centre ``c`` (with ``beta = G(c)``), and ``c`` is
tuned by a bracketed root-find until the period equals ``X``.  Linearized
spectra live on mean-zero periodic functions (the operator acts on the
antiderivative of the film perturbation), so translating a nonconstant profile
shows up as the zero mode ``H - mean(H)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from spectra_lab.discretization import thinfilm_linearized
from spectra_lab.errors import DomainError, ShootingError
from spectra_lab.linalg_eigen import EigenPairs, dense_eigen

Scalar = Callable[[np.ndarray], np.ndarray]

STEADY_TOL = 1e-6
ZERO_MODE_TOL = 1e-3
SUBSTEPS = 16
# profiles whose minimum falls below this fraction of the maximum count as touching zero
TOUCH_REL = 1e-8


@dataclass(frozen=True)
class FilmCoefficient:
    """``g`` with two derivatives and an antiderivative ``G``."""

    g: Scalar
    gp: Scalar
    gpp: Scalar
    G: Scalar
    name: str = "custom"

    def __post_init__(self):
        y = np.random.default_rng(13).uniform(0.1, 3.0, 20)
        d = 1e-5
        slope = (self.G(y + d) - self.G(y - d)) / (2 * d)
        if np.max(np.abs(slope - self.g(y)) / (1.0 + np.abs(self.g(y)))) > 1e-6:
            raise DomainError("G' does not match g")


def constant_coefficient(value: float) -> FilmCoefficient:
    v = float(value)
    return FilmCoefficient(lambda y: v + 0.0 * np.asarray(y), lambda y: 0.0 * np.asarray(y),
                           lambda y: 0.0 * np.asarray(y), lambda y: v * np.asarray(y), f"const:{v:g}")


def power_coefficient(p: int) -> FilmCoefficient:
    """``g(y) = y^p`` for a nonnegative integer ``p``."""
    if p == 0:
        return constant_coefficient(1.0)
    return FilmCoefficient(lambda y: np.asarray(y) ** p,
                           lambda y: p * np.asarray(y) ** (p - 1),
                           lambda y: p * (p - 1) * np.asarray(y) ** max(p - 2, 0) if p >= 2 else 0.0 * np.asarray(y),
                           lambda y: np.asarray(y) ** (p + 1) / (p + 1),
                           {1: "linear", 2: "quadratic"}.get(p, f"power:{p}"))


def film_preset(spec: str) -> FilmCoefficient:
    """``quadratic`` (y^2), ``linear`` (y) or ``const:<v>``."""
    if spec == "quadratic":
        return power_coefficient(2)
    if spec == "linear":
        return power_coefficient(1)
    if spec.startswith("const:"):
        try:
            return constant_coefficient(float(spec[6:]))
        except ValueError:
            raise DomainError(f"bad constant in {spec!r}") from None
    raise DomainError(f"unknown film preset {spec!r}")


@dataclass(frozen=True)
class PeriodicProfile:
    """Positive samples of a periodic profile on ``x_i = i X / n``."""

    X: float
    xs: np.ndarray
    H: np.ndarray
    mean: float
    beta: float = math.nan

    def __post_init__(self):
        if not np.min(self.H) > TOUCH_REL * np.max(np.abs(self.H)):
            raise DomainError("film thickness must stay positive")
        if len(self.xs) != len(self.H):
            raise DomainError("grid and samples differ in length")

    @property
    def n(self) -> int:
        return len(self.H)

    def derivative(self, order: int) -> np.ndarray:
        return spectral_derivative(self.H, self.X, order)


def constant_profile(Hbar: float, X: float, n: int, g: FilmCoefficient | None = None) -> PeriodicProfile:
    xs = np.arange(n) * X / n
    beta = float(g.G(np.array(Hbar))) if g is not None else math.nan
    return PeriodicProfile(X, xs, np.full(n, float(Hbar)), float(Hbar), beta)


def spectral_derivative(f: np.ndarray, X: float, order: int) -> np.ndarray:
    """``order``-th derivative of periodic samples by FFT."""
    n = len(f)
    k = 2j * math.pi * np.fft.rfftfreq(n, d=X / n)
    fh = np.fft.rfft(f) * k**order
    if n % 2 == 0 and order % 2 == 1:
        fh[-1] = 0.0
    return np.fft.irfft(fh, n)


def periodic_integral(f: np.ndarray, X: float) -> float:
    """Periodic trapezoid rule (spectrally accurate for smooth data)."""
    return float(np.sum(f) * X / len(f))


def _resample(f: np.ndarray, n: int) -> np.ndarray:
    m = len(f)
    if m == n:
        return f
    fh = np.fft.rfft(f)
    out = np.zeros(n // 2 + 1, dtype=complex)
    keep = min(len(fh), len(out)) - 1
    out[:keep] = fh[:keep]
    return np.fft.irfft(out, n) * n / m


# ---------------------------------------------------------------------------
# Constant states
# ---------------------------------------------------------------------------


def constant_state_modes(g: FilmCoefficient, Hbar: float, X: float, kmax: int) -> list[tuple[int, float]]:
    """``tau(k) = q^2 (q^2 - g(Hbar))`` with ``q = 2 pi k / X``, ``k = 1..kmax``."""
    if not Hbar > 0:
        raise DomainError("constant state must be positive")
    if kmax < 1:
        raise DomainError("kmax must be at least 1")
    gbar = float(g.g(np.array(float(Hbar))))
    out = []
    for k in range(1, kmax + 1):
        q2 = (2 * math.pi * k / X) ** 2
        out.append((k, q2 * (q2 - gbar)))
    return out


def dispersion_verdict(modes: list[tuple[int, float]]) -> str:
    return "stable" if all(t >= 0 for _, t in modes) else "unstable"


# ---------------------------------------------------------------------------
# Nonconstant steady states
# ---------------------------------------------------------------------------


def _step(G: Scalar, beta: float, y: np.ndarray, h: float) -> np.ndarray:
    def rhs(z):
        return np.array([z[1], beta - float(G(z[0]))])

    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def orbit_period(g: FilmCoefficient, center: float, amplitude: float, h: float = 2e-3,
                 max_steps: int = 200_000) -> float:
    """Period of the orbit through ``(center + amplitude, 0)`` with ``beta = G(center)``.

    The orbit is symmetric under ``x -> -x``, so the period is twice the time
    until ``H'`` next vanishes; that crossing is located by bisection on the
    last RK4 step.
    """
    beta = float(g.G(np.array(center)))
    y = np.array([center + amplitude, 0.0])
    going = -math.copysign(1.0, amplitude)
    x = 0.0
    for _ in range(max_steps):
        nxt = _step(g.G, beta, y, h)
        if nxt[0] <= TOUCH_REL * (abs(center) + abs(amplitude)) or not np.all(np.isfinite(nxt)) or abs(nxt[0]) > 1e6:
            raise ShootingError("orbit leaves the positive half-line")
        if x > 0 and np.sign(nxt[1]) != going:
            lo, hi = 0.0, h
            while hi - lo > 1e-15:
                mid = 0.5 * (lo + hi)
                if np.sign(_step(g.G, beta, y, mid)[1]) == going:
                    lo = mid
                else:
                    hi = mid
            return 2.0 * (x + 0.5 * (lo + hi))
        y, x = nxt, x + h
    raise ShootingError("orbit does not close within the step budget")


def steady_state_tf(g: FilmCoefficient, X: float, amplitude: float, center: float = 1.0,
                    n: int = 256) -> tuple[PeriodicProfile, float]:
    """A nonconstant ``X``-periodic solution of ``H'' + G(H) = beta``.

    Parameters
    ----------
    amplitude : float
        Excursion of ``H(0)`` above the centre; fixed during the search.
    center : float
        Initial guess for the centre ``c``; the root-find adjusts it (and with
        it ``beta = G(c)``) until the orbit period equals ``X``.  When the
        period does not depend on ``c`` (constant ``g``) the guess is kept,
        provided its period already equals ``X``.
    n : int
        Number of periodic samples.

    Raises
    ------
    DomainError
        For a degenerate amplitude (constant profile) or a profile touching 0.
    ShootingError
        When no centre in the search range gives period ``X``.
    """
    if not X > 0:
        raise DomainError("period must be positive")
    if abs(amplitude) < 1e-8:
        raise DomainError("amplitude too small: the profile would be constant")

    def mismatch(c):
        return orbit_period(g, c, amplitude) - X

    c0 = float(center)
    m0 = mismatch(c0)
    m1 = mismatch(c0 * 1.01)
    if abs(m1 - m0) < 1e-10 * X:
        if abs(m0) > 1e-8 * X:
            raise ShootingError("period is independent of the centre and differs from X")
        c = c0
    else:
        # walk towards the sign change in geometric steps
        factor = 1.05 if (m1 - m0) * m0 < 0 else 1 / 1.05
        a, ma = c0, m0
        for _ in range(60):
            b = a * factor
            try:
                mb = mismatch(b)
            except ShootingError:
                raise ShootingError("no centre gives period X before the orbit degenerates") from None
            if np.sign(mb) != np.sign(ma):
                break
            a, ma = b, mb
        else:
            raise ShootingError("period matching failed: no sign change in the bracket")
        c = brentq(mismatch, min(a, b), max(a, b), xtol=1e-14, rtol=1e-14)
    beta = float(g.G(np.array(c)))
    h = X / (n * SUBSTEPS)
    y = np.array([c + amplitude, 0.0])
    H = np.empty(n)
    for i in range(n):
        H[i] = y[0]
        for _ in range(SUBSTEPS):
            y = _step(g.G, beta, y, h)
    xs = np.arange(n) * X / n
    return PeriodicProfile(X, xs, H, float(H.mean()), beta), beta


def steady_residual(profile: PeriodicProfile, g: FilmCoefficient, beta: float | None = None) -> float:
    """``max |H'' + G(H) - beta|`` with spectral derivatives."""
    beta = profile.beta if beta is None else beta
    return float(np.max(np.abs(profile.derivative(2) + g.G(profile.H) - beta)))


# ---------------------------------------------------------------------------
# Linearized spectra
# ---------------------------------------------------------------------------


def linearized_spectrum_tf(profile: PeriodicProfile, g: FilmCoefficient, n: int | None = None) -> EigenPairs:
    """Eigenpairs of ``w'''' + (g(H) w')'`` on mean-zero periodic grid functions.

    Eigenvectors are returned on the full ``n``-point grid (they have zero
    mean).  Profiles are resampled spectrally when ``n`` differs from the
    profile's own resolution.
    """
    H = profile.H if n is None else _resample(profile.H, int(n))
    A = thinfilm_linearized(H, g.g, profile.X)
    reduced = dense_eigen(A)
    Q = A.meta["basis"]
    return EigenPairs(reduced.values, Q @ reduced.vectors, reduced.residual_bound)


@dataclass(frozen=True)
class ZeroMode:
    index: int
    value: float
    similarity: float
    multiplicity: int


def zero_mode(pairs: EigenPairs, target: np.ndarray, cluster_tol: float | None = None) -> ZeroMode:
    """The eigenvalue nearest zero and how well its eigenspace captures ``target``.

    Similarity is ``|P target| / |target|`` with ``P`` the projector onto the
    eigenvectors whose eigenvalues lie within ``cluster_tol`` of the nearest
    one, so exact degeneracies do not depend on the basis the solver returns.
    """
    vals = pairs.values
    i = int(np.argmin(np.abs(vals)))
    tol = cluster_tol if cluster_tol is not None else 1e-10 * np.max(np.abs(vals)) + 1e-12
    members = np.nonzero(np.abs(vals - vals[i]) <= tol)[0]
    t = np.asarray(target, dtype=float) - np.mean(target)
    proj = pairs.vectors[:, members].T @ t
    return ZeroMode(i, float(vals[i]), float(np.linalg.norm(proj) / np.linalg.norm(t)), len(members))


def convexity_trial(profile: PeriodicProfile, g: FilmCoefficient) -> tuple[float, float]:
    """Rayleigh numerator of ``w = H'`` in two forms.

    Returns ``(int (H''')^2 - g(H) (H'')^2, -1/3 int g''(H) (H')^4)``; they agree
    for steady states and are negative when ``g`` is strictly convex.
    """
    H1, H2, H3 = (profile.derivative(k) for k in (1, 2, 3))
    full = periodic_integral(H3**2 - g.g(profile.H) * H2**2, profile.X)
    reduced = -periodic_integral(g.gpp(profile.H) * H1**4, profile.X) / 3.0
    return full, reduced


@dataclass(frozen=True)
class FilmReport:
    X: float
    beta: float
    tau1: float
    zero_mode_gap: float
    verdict: str

    def to_dict(self) -> dict:
        return {"X": self.X, "beta": self.beta, "tau1": self.tau1,
                "zero_mode_gap": self.zero_mode_gap, "verdict": self.verdict}


def film_report(g: FilmCoefficient, X: float, amplitude: float, center: float = 1.0,
                n: int = 128) -> tuple[FilmReport, PeriodicProfile]:
    """Steady state, lowest eigenvalue and translational-mode gap in one record.

    The verdict is ``unstable`` when ``tau_1`` lies below ``-1e-3``, the band
    reserved for the discretized zero mode.
    """
    profile, beta = steady_state_tf(g, X, amplitude, center, n)
    pairs = linearized_spectrum_tf(profile, g)
    zm = zero_mode(pairs, profile.H)
    tau1 = float(pairs.values[0])
    verdict = "unstable" if tau1 < -ZERO_MODE_TOL else "stable"
    return FilmReport(float(X), beta, tau1, abs(zm.value), verdict), profile


__all__ = [
    "FilmCoefficient",
    "FilmReport",
    "PeriodicProfile",
    "ZeroMode",
    "constant_coefficient",
    "constant_profile",
    "constant_state_modes",
    "convexity_trial",
    "dispersion_verdict",
    "film_preset",
    "film_report",
    "linearized_spectrum_tf",
    "orbit_period",
    "periodic_integral",
    "power_coefficient",
    "spectral_derivative",
    "steady_residual",
    "steady_state_tf",
    "zero_mode",
]
