"""Continuous-spectrum calculus for ``L = -d^2/dx^2 - 2 sech^2 x`` on the line.

``L`` factors through the ladder operators ``L+ = -d/dx + tanh x`` and
``L- = d/dx + tanh x``: ``L = L+ L- - 1`` and ``L- L+ - 1 = -d^2/dx^2``.  Hence
``L+`` carries the plane waves ``e^{2 pi i w x}`` to generalized eigenfunctions
``(tanh x - 2 pi i w) e^{2 pi i w x}`` of ``L`` with eigenvalue ``4 pi^2 w^2``,
while ``sech`` (annihilated by ``L-``) is the single bound state, at ``-1``.

Derivatives are fourth-order centred differences on a uniform symmetric grid,
with zero extension beyond the ends.  For the decomposition the ladder
operator is applied to plane waves through its exact discrete symbol, so the
coefficient map is the grid adjoint of the one used for resynthesis and the
whole calculus converges at fourth order.

Inner products are linear in the first slot and conjugate-linear in the
second, ``<u, v> = int u conj(v)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from spectra_lab.discretization import schrodinger_1d, sech2_potential
from spectra_lab.errors import DomainError
from spectra_lab.linalg_eigen import EigenPairs, tridiag_eigen
from spectra_lab.special_functions import sech

TWO_PI = 2.0 * math.pi
DECAY_TOL = 1e-8
CHUNK = 64


class TruncationWarning(UserWarning):
    """A grid or frequency window is too short for the requested accuracy."""


@dataclass(frozen=True)
class LineGrid:
    """``n`` equispaced nodes on ``[-R, R]`` (symmetric about 0)."""

    R: float
    n: int

    def __post_init__(self):
        if not self.R >= 15:
            raise DomainError("the line grid needs R >= 15 so that sech^2 decays below 1e-12")
        if int(self.n) != self.n or self.n < 16:
            raise DomainError("the line grid needs n >= 16 nodes")

    @property
    def h(self) -> float:
        return 2.0 * self.R / (self.n - 1)

    @property
    def xs(self) -> np.ndarray:
        x = np.linspace(-self.R, self.R, self.n)
        return 0.5 * (x - x[::-1])  # exact symmetry

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        return complex(np.sum(self.weights * u * np.conj(v)))

    def norm(self, u: np.ndarray) -> float:
        return math.sqrt(float(np.sum(self.weights * np.abs(u) ** 2)))


def line_grid_for(width: float, h: float = 0.01) -> LineGrid:
    """Smallest grid with spacing at most ``h`` covering ``[-width, width]``."""
    R = max(15.0, float(width))
    return LineGrid(R, int(math.ceil(2 * R / h)) + 1)


# ---------------------------------------------------------------------------
# Difference operators
# ---------------------------------------------------------------------------


def d1(f: np.ndarray, h: float) -> np.ndarray:
    p = np.pad(f, 2)
    return (-p[4:] + 8 * p[3:-1] - 8 * p[1:-3] + p[:-4]) / (12 * h)


def d2(f: np.ndarray, h: float) -> np.ndarray:
    p = np.pad(f, 2)
    return (-p[4:] + 16 * p[3:-1] - 30 * p[2:-2] + 16 * p[1:-3] - p[:-4]) / (12 * h * h)


def raising(grid: LineGrid, f: np.ndarray) -> np.ndarray:
    """``L+ f = -f' + tanh(x) f``."""
    return -d1(f, grid.h) + np.tanh(grid.xs) * f


def lowering(grid: LineGrid, f: np.ndarray) -> np.ndarray:
    """``L- f = f' + tanh(x) f``."""
    return d1(f, grid.h) + np.tanh(grid.xs) * f


def apply_L(grid: LineGrid, f: np.ndarray) -> np.ndarray:
    """``-f'' - 2 sech^2(x) f``."""
    return -d2(f, grid.h) - 2.0 * sech(grid.xs) ** 2 * f


def free_laplacian(grid: LineGrid, f: np.ndarray) -> np.ndarray:
    return -d2(f, grid.h)


def symbol(omega: np.ndarray, h: float) -> np.ndarray:
    """Real symbol ``s(w)`` with ``d1 e^{2 pi i w x} = i s(w) e^{2 pi i w x}``."""
    t = TWO_PI * np.asarray(omega, dtype=float) * h
    return (8.0 * np.sin(t) - np.sin(2.0 * t)) / (6.0 * h)


@dataclass(frozen=True)
class FactorizationResiduals:
    plus_minus: float   # max |(L+ L- - 1) f - L f|
    minus_plus: float   # max |(L- L+ - 1) f + f''|


def factorization_check(grid: LineGrid, functions: Iterable[np.ndarray],
                        margin: float = 1.0) -> FactorizationResiduals:
    """Largest residuals of both factorization identities over a batch of samples.

    Nodes within ``margin`` of the ends are skipped: zero extension turns any
    leftover tail there into an ``O(tail / h^2)`` artefact.
    """
    inside = np.abs(grid.xs) <= grid.R - margin
    pm = mp = 0.0
    for f in functions:
        f = np.asarray(f)
        r1 = raising(grid, lowering(grid, f)) - f - apply_L(grid, f)
        r2 = lowering(grid, raising(grid, f)) - f + d2(f, grid.h)
        pm = max(pm, float(np.max(np.abs(r1[inside]))))
        mp = max(mp, float(np.max(np.abs(r2[inside]))))
    return FactorizationResiduals(pm, mp)


# ---------------------------------------------------------------------------
# Generalized eigenfunctions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneralizedMode:
    omega: float
    values: np.ndarray
    lam: float

    def __post_init__(self):
        if self.lam < 0:
            raise DomainError("generalized eigenvalues are nonnegative")

    def modulus_defect(self, xs: np.ndarray) -> float:
        """``max | |v|^2 - tanh^2 x - 4 pi^2 w^2 |``."""
        return float(np.max(np.abs(np.abs(self.values) ** 2 - np.tanh(xs) ** 2 - self.lam)))


def generalized_mode(omega: float, grid: LineGrid) -> GeneralizedMode:
    """Samples of ``(tanh x - 2 pi i w) e^{2 pi i w x}``."""
    if abs(omega) > 10:
        raise DomainError("|omega| must be at most 10")
    x = grid.xs
    vals = (np.tanh(x) - 1j * TWO_PI * omega) * np.exp(1j * TWO_PI * omega * x)
    return GeneralizedMode(float(omega), vals, (TWO_PI * omega) ** 2)


def mode_residual(mode: GeneralizedMode, grid: LineGrid, margin: float = 1.0) -> float:
    """``max |(L - lambda) v|`` over nodes at least ``margin`` inside the ends."""
    r = apply_L(grid, mode.values) - mode.lam * mode.values
    inside = np.abs(grid.xs) <= grid.R - margin
    return float(np.max(np.abs(r[inside])))


# ---------------------------------------------------------------------------
# Decomposition and Plancherel
# ---------------------------------------------------------------------------


def omega_grid(omega_max: float = 4.0, count: int | None = None, R: float = 20.0) -> np.ndarray:
    """Symmetric uniform frequencies.

    The default spacing is at most ``1/(2R)``: coarser spacing makes the
    resynthesis periodic with a period shorter than the window and folds the
    function back onto itself.
    """
    if count is None:
        count = 2 * int(math.ceil(2 * R * omega_max)) + 1
    if count < 3 or count % 2 == 0:
        raise DomainError("the frequency grid needs an odd count >= 3")
    return np.linspace(-omega_max, omega_max, count)


def _omega_weights(omegas: np.ndarray) -> np.ndarray:
    d = np.diff(omegas)
    if np.any(d <= 0) or not np.allclose(d, d[0], rtol=1e-9):
        raise DomainError("frequencies must be uniform and increasing")
    if not np.allclose(omegas, -omegas[::-1], atol=1e-12 * max(1.0, abs(omegas[-1]))):
        raise DomainError("frequency grid must be symmetric")
    w = np.full(len(omegas), d[0])
    w[0] = w[-1] = 0.5 * d[0]
    return w / (1.0 + (TWO_PI * omegas) ** 2)


@dataclass(frozen=True)
class Decomposition:
    """Bound-state coefficient, continuum coefficients and quadrature weights."""

    grid: LineGrid
    c_disc: complex
    omegas: np.ndarray
    coeffs: np.ndarray
    weights: np.ndarray

    def continuum_modes(self, rows: slice) -> np.ndarray:
        x = self.grid.xs
        om = self.omegas[rows]
        s = symbol(om, self.grid.h)
        return (np.tanh(x)[None, :] - 1j * s[:, None]) * np.exp(1j * TWO_PI * om[:, None] * x[None, :])

    def reconstruct(self) -> np.ndarray:
        """``c_disc sech / 2 + sum_w W(w) c(w) (L+ v_w)``."""
        out = 0.5 * self.c_disc * sech(self.grid.xs).astype(complex)
        for start in range(0, len(self.omegas), CHUNK):
            rows = slice(start, start + CHUNK)
            out += (self.weights[rows] * self.coeffs[rows]) @ self.continuum_modes(rows)
        return out

    def continuum_energy(self) -> float:
        return float(np.sum(self.weights * np.abs(self.coeffs) ** 2))

    def rows(self):
        """``(omega, re, im, weight)`` tuples for CSV export."""
        return [(float(o), float(c.real), float(c.imag), float(w))
                for o, c, w in zip(self.omegas, self.coeffs, self.weights)]


def spectral_decompose(f: np.ndarray, grid: LineGrid, omegas: np.ndarray | None = None,
                       omega_max: float = 4.0) -> Decomposition:
    """Coefficients ``c_disc = <f, sech>`` and ``c(w) = <f, L+ v_w>``.

    ``L+ v_w`` is the grid raising operator applied to the plane wave, i.e.
    ``(tanh x - i s(w)) e^{2 pi i w x}`` with the fourth-order symbol ``s``.

    Warns (:class:`TruncationWarning`) when ``f`` has not decayed below
    ``1e-8`` at the ends of the grid or the coefficients at ``+-omega_max``
    exceed ``1e-8``.
    """
    f = np.asarray(f)
    if f.shape != (grid.n,):
        raise DomainError("samples must match the grid")
    if omegas is None:
        omegas = omega_grid(omega_max, R=grid.R)
    omegas = np.asarray(omegas, dtype=float)
    weights = _omega_weights(omegas)
    scale = max(1.0, float(np.max(np.abs(f)))) if f.size else 1.0
    if max(abs(f[0]), abs(f[-1])) > DECAY_TOL * scale:
        warnings.warn("f has not decayed at the ends of the grid", TruncationWarning, stacklevel=2)
    wf = grid.weights * f
    c_disc = complex(np.sum(wf * sech(grid.xs)))
    coeffs = np.empty(len(omegas), dtype=complex)
    dec = Decomposition(grid, c_disc, omegas, coeffs, weights)
    for start in range(0, len(omegas), CHUNK):
        rows = slice(start, start + CHUNK)
        coeffs[rows] = np.conj(dec.continuum_modes(rows)) @ wf
    if max(abs(coeffs[0]), abs(coeffs[-1])) > DECAY_TOL * scale:
        warnings.warn("continuum coefficients have not decayed at the frequency cutoff",
                      TruncationWarning, stacklevel=2)
    return dec


@dataclass(frozen=True)
class PlancherelReport:
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        """Relative gap ``|lhs - rhs| / lhs`` (absolute when ``lhs = 0``)."""
        d = abs(self.lhs - self.rhs)
        return d / self.lhs if self.lhs > 0 else d


def plancherel_check(f: np.ndarray, grid: LineGrid, omegas: np.ndarray | None = None,
                     omega_max: float = 4.0) -> PlancherelReport:
    """``|f|^2`` against ``|<f, sech>|^2 / 2 + sum W(w) |c(w)|^2``."""
    dec = spectral_decompose(f, grid, omegas, omega_max)
    lhs = grid.norm(f) ** 2
    return PlancherelReport(lhs, 0.5 * abs(dec.c_disc) ** 2 + dec.continuum_energy())


# ---------------------------------------------------------------------------
# Box spectra
# ---------------------------------------------------------------------------


def box_spectrum(R: float, h: float, k: int = 4) -> EigenPairs:
    """Lowest ``k`` Dirichlet eigenpairs of ``L`` on ``[-R, R]`` with spacing about ``h``."""
    n = int(round(2 * R / h)) - 1
    return tridiag_eigen(schrodinger_1d(sech2_potential(), R, n), k)


# ---------------------------------------------------------------------------
# Weyl sequences for the free Laplacian
# ---------------------------------------------------------------------------


def smoothstep(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10.0 - 15.0 * t + 6.0 * t * t)


def cutoff(x: np.ndarray) -> np.ndarray:
    """C^2 bump: 1 on ``|x| <= 1``, 0 on ``|x| >= 2``, quintic smoothstep between."""
    return 1.0 - smoothstep(np.abs(x) - 1.0)


def cutoff_norm() -> float:
    """``|cutoff|_{L^2}``, integrated exactly as a polynomial."""
    P = np.polynomial.Polynomial
    S = P([0, 0, 0, 10, -15, 6])
    tail = ((1 - S) ** 2).integ()
    return math.sqrt(2.0 * (1.0 + tail(1.0) - tail(0.0)))


def default_test_functions() -> dict[str, Callable[[np.ndarray], np.ndarray]]:
    return {
        "gaussian": lambda x: np.exp(-0.5 * x * x),
        "sech": sech,
        "odd_gaussian": lambda x: x * np.exp(-0.5 * x * x),
    }


@dataclass(frozen=True)
class WeylStep:
    n: int
    residual: float
    norm: float
    pairings: dict


def weyl_function(lam: float, n: float, grid: LineGrid) -> np.ndarray:
    """``w_n = c_n cutoff(x/n) e^{2 pi i w x}`` with ``4 pi^2 w^2 = lam``."""
    omega = math.sqrt(lam) / TWO_PI
    c_n = 1.0 / (math.sqrt(n) * cutoff_norm())
    x = grid.xs
    return c_n * cutoff(x / n) * np.exp(1j * TWO_PI * omega * x)


def weyl_sequence(lam: float, n_values: Sequence[int], h: float = 0.01, grid: LineGrid | None = None,
                  operator: str = "free", tests: dict | None = None) -> list[WeylStep]:
    """Residual, norm and weak pairings of ``w_n`` for each ``n``.

    Parameters
    ----------
    lam : float
        Target point of the continuous spectrum, ``lam >= 0``.
    h : float
        Grid spacing when each ``n`` gets its own grid (the default).
    grid : LineGrid, optional
        A fixed grid for all ``n``; it must cover the support ``|x| <= 2n``
        with a margin of one unit.
    operator : {"free", "sech"}
        ``-d^2/dx^2`` or ``-d^2/dx^2 - 2 sech^2 x``.
    """
    if lam < 0:
        raise DomainError("Weyl sequences exist only for lambda >= 0")
    if operator not in ("free", "sech"):
        raise DomainError("operator must be 'free' or 'sech'")
    tests = tests or default_test_functions()
    out = []
    for n in n_values:
        if n <= 0:
            raise DomainError("n must be positive")
        g = grid if grid is not None else line_grid_for(2 * n + 2, h)
        if 2 * n + 1 > g.R:
            raise DomainError(f"grid half-width {g.R:g} too narrow for n = {n}")
        w = weyl_function(lam, n, g)
        op = free_laplacian(g, w) if operator == "free" else apply_L(g, w)
        res = g.norm(op - lam * w)
        pair = {name: abs(g.inner(fn(g.xs), w)) for name, fn in tests.items()}
        out.append(WeylStep(int(n), res, g.norm(w), pair))
    return out


__all__ = [
    "Decomposition",
    "FactorizationResiduals",
    "GeneralizedMode",
    "LineGrid",
    "PlancherelReport",
    "TruncationWarning",
    "WeylStep",
    "apply_L",
    "box_spectrum",
    "cutoff",
    "cutoff_norm",
    "d1",
    "d2",
    "default_test_functions",
    "factorization_check",
    "free_laplacian",
    "generalized_mode",
    "line_grid_for",
    "lowering",
    "mode_residual",
    "omega_grid",
    "plancherel_check",
    "raising",
    "spectral_decompose",
    "symbol",
    "weyl_function",
    "weyl_sequence",
]
