"""Counting functions, Weyl ratios and the Polya / Li-Yau inequalities.

Rectangle counts are obtained by walking the lattice ``(j, k)`` column by
column inside the ellipse ``(j pi/L)^2 + (k pi/M)^2 <= alpha``, so values up to
``alpha ~ 1e7`` never require materializing a sorted spectrum.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from spectra_lab.closed_form import (
    COUNT_RTOL,
    BoundaryCondition,
    Spectrum,
    rectangle_spectrum,
)
from spectra_lab.errors import DomainError

# Unit-ball volumes for d = 1, 2, 3.
BALL_VOLUME = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}
ENUMERATION_BUDGET = 10**8


# ---------------------------------------------------------------------------
# Lattice counting
# ---------------------------------------------------------------------------


def _start(bc: BoundaryCondition) -> int:
    if bc.tag not in ("dirichlet", "neumann"):
        raise DomainError("lattice counting covers Dirichlet and Neumann rectangles")
    return 1 if bc.tag == "dirichlet" else 0


def lattice_count(L: float, M: float, alpha: float, bc: BoundaryCondition) -> int:
    """``N(alpha)`` for the ``L x M`` rectangle by lattice-point enumeration.

    Points on the ellipse count (eigenvalues ``<= alpha``), with the same
    relative slack as :func:`spectra_lab.closed_form.counting_function`.

    Raises
    ------
    DomainError
        For negative ``alpha`` or when the ellipse holds ``>= 1e8`` points.
    """
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")
    start = _start(bc)
    a, b = math.sqrt(alpha) * L / math.pi, math.sqrt(alpha) * M / math.pi
    if (a + 1) * (b + 1) >= ENUMERATION_BUDGET:
        raise DomainError(f"alpha = {alpha:g} exceeds the enumeration budget")
    top = alpha + COUNT_RTOL * max(1.0, abs(alpha))
    j = np.arange(start, int(a) + 2)
    xj = (j * math.pi / L) ** 2
    j, xj = j[xj <= top], xj[xj <= top]
    if len(j) == 0:
        return 0
    kmax = np.floor(M / math.pi * np.sqrt(np.maximum(top - xj, 0.0))).astype(np.int64)
    # repair floating-point edge cases so each column count is exact
    kmax += ((kmax + 1) * math.pi / M) ** 2 + xj <= top
    kmax -= (kmax * math.pi / M) ** 2 + xj > top
    return int(np.sum(np.maximum(kmax - start + 1, 0)))


@dataclass(frozen=True)
class BoundsReport:
    alpha: float
    count: int
    lower: float
    upper: float
    lower_ok: bool
    upper_ok: bool

    @property
    def lower_slack(self) -> float:
        return self.count - self.lower

    @property
    def upper_slack(self) -> float:
        return self.upper - self.count


def weyl_bounds(L: float, M: float, alpha: float) -> tuple[float, float]:
    """Dirichlet two-sided bound ``(A/4pi) a - (P/2pi) sqrt(a) <= N(a) <= (A/4pi) a``."""
    area, perim = L * M, 2.0 * (L + M)
    upper = area / (4.0 * math.pi) * alpha
    return upper - perim / (2.0 * math.pi) * math.sqrt(alpha), upper


def area_bounds_check(L: float, M: float, alpha: float) -> BoundsReport:
    """Check both area bounds for the Dirichlet rectangle at ``alpha``."""
    count = lattice_count(L, M, alpha, BoundaryCondition("dirichlet"))
    lower, upper = weyl_bounds(L, M, alpha)
    return BoundsReport(alpha, count, lower, upper, count >= lower, count <= upper)


@dataclass(frozen=True)
class CountingCurve:
    """Samples ``(alpha_i, N(alpha_i))`` with the domain's area and perimeter."""

    alphas: np.ndarray
    counts: np.ndarray
    area: float
    perimeter: float
    domain: str = "rectangle"

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=float)
        counts = np.asarray(self.counts, dtype=np.int64)
        if alphas.shape != counts.shape:
            raise DomainError("alphas and counts must have equal length")
        if np.any(np.diff(alphas) <= 0):
            raise DomainError("alphas must be strictly increasing")
        if np.any(np.diff(counts) < 0) or np.any(counts < 0):
            raise DomainError("counts must be nonnegative and nondecreasing")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "counts", counts)

    def weyl_prediction(self) -> np.ndarray:
        return self.area / (4.0 * math.pi) * self.alphas

    def lower_bound(self) -> np.ndarray:
        return self.weyl_prediction() - self.perimeter / (2.0 * math.pi) * np.sqrt(self.alphas)

    def write_csv(self, stream: TextIO, digits: int = 12) -> None:
        """Columns: alpha, count, weyl_prediction, lower_bound, upper_bound."""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["alpha", "count", "weyl_prediction", "lower_bound", "upper_bound"])
        pred, low = self.weyl_prediction(), self.lower_bound()
        for a, c, p, lo in zip(self.alphas, self.counts, pred, low):
            writer.writerow([f"{a:.{digits}g}", int(c), f"{p:.{digits}g}", f"{lo:.{digits}g}",
                             f"{p:.{digits}g}"])


def counting_curve(L: float, M: float, alphas: Iterable[float],
                   bc: BoundaryCondition | None = None) -> CountingCurve:
    bc = bc or BoundaryCondition("dirichlet")
    alphas = np.asarray(list(alphas), dtype=float)
    counts = [lattice_count(L, M, a, bc) for a in alphas]
    return CountingCurve(alphas, np.array(counts), L * M, 2.0 * (L + M))


def lattice_eigenvalue(L: float, M: float, j: int, bc: BoundaryCondition) -> float:
    """The ``j``-th rectangle eigenvalue (1-based, with multiplicity)."""
    if j < 1:
        raise DomainError("eigenvalue index starts at 1")
    return float(rectangle_spectrum(L, M, bc, j).values[-1])


# ---------------------------------------------------------------------------
# Weyl ratios and the inversion lemma
# ---------------------------------------------------------------------------


def weyl_ratio(values: Spectrum | Sequence[float], volume: float, d: int) -> np.ndarray:
    """``r_j = lambda_j / (4 pi^2 (j / (V_d |Omega|))^(2/d))`` for ``j = 1, 2, ...``.

    Closed manifolds (the circle) are not covered and are rejected.
    """
    if isinstance(values, Spectrum):
        if values.domain.tag == "circle":
            raise DomainError("Weyl ratios are defined here for bounded domains, not the circle")
        values = values.values
    if not volume > 0:
        raise DomainError("volume must be positive")
    if d not in BALL_VOLUME:
        raise DomainError("dimension must be 1, 2 or 3")
    lam = np.asarray(values, dtype=float)
    j = np.arange(1, len(lam) + 1)
    return lam / (4.0 * math.pi**2 * (j / (BALL_VOLUME[d] * volume)) ** (2.0 / d))


@dataclass(frozen=True)
class InversionReport:
    js: np.ndarray
    lambdas: np.ndarray
    deviations: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(self.deviations.max())


def jump_points(N: Callable[[float], int], js: Iterable[int], rtol: float = 1e-13) -> np.ndarray:
    """``lambda_j = inf {alpha : N(alpha) >= j}`` for a nondecreasing step function."""
    out = []
    for j in js:
        hi = 1.0
        while N(hi) < j:
            hi *= 2.0
            if hi > 1e300:
                raise DomainError(f"counting function never reaches {j}")
        lo = 0.0
        while hi - lo > rtol * hi:
            mid = 0.5 * (lo + hi)
            if N(mid) >= j:
                hi = mid
            else:
                lo = mid
        out.append(hi)
    return np.array(out)


def inversion_check(c: float, js: Iterable[int],
                    perturbation: Callable[[float], float] | None = None,
                    counting: Callable[[float], int] | None = None) -> InversionReport:
    """Recover ``lambda_j`` from ``N`` and measure ``|lambda_j / (c j) - 1|``.

    ``N`` defaults to ``floor(alpha / c + perturbation(alpha))``; a ready-made
    counting function can be passed instead.
    """
    if not c > 0:
        raise DomainError("c must be positive")
    if counting is None:
        pert = perturbation or (lambda a: 0.0)

        def counting(alpha):
            return max(0, math.floor(alpha / c + pert(alpha)))

    js = np.asarray(list(js), dtype=int)
    lam = jump_points(counting, js)
    return InversionReport(js, lam, np.abs(lam / (c * js) - 1.0))


# ---------------------------------------------------------------------------
# Polya and Li-Yau
# ---------------------------------------------------------------------------


def polya_check(values: Spectrum | Sequence[float], area: float, kind: str = "dirichlet") -> list[int]:
    """1-based indices violating ``lambda_j >= 4 pi j/|Omega|`` (Dirichlet)
    or ``mu_j <= 4 pi j/|Omega|`` (Neumann, counted from ``mu_1 = 0``)."""
    lam = np.asarray(values.values if isinstance(values, Spectrum) else values, dtype=float)
    j = np.arange(1, len(lam) + 1)
    bound = 4.0 * math.pi * j / area
    slack = 1e-12 * np.maximum(1.0, bound)
    if kind == "dirichlet":
        bad = lam < bound - slack
    elif kind == "neumann":
        bad = lam > bound + slack
    else:
        raise DomainError("kind must be 'dirichlet' or 'neumann'")
    return [int(i) for i in j[bad]]


@dataclass(frozen=True)
class LiYauReport:
    margins: np.ndarray
    corollary_violations: list[int]

    @property
    def holds(self) -> bool:
        return bool(np.all(self.margins >= -1e-9 * np.arange(1, len(self.margins) + 1) ** 2)
                    and not self.corollary_violations)


def li_yau_check(values: Spectrum | Sequence[float], area: float) -> LiYauReport:
    """Margins ``sum_{k<=j} lambda_k - 2 pi j^2/|Omega|`` and the corollary
    ``lambda_j >= 2 pi j/|Omega|``."""
    lam = np.asarray(values.values if isinstance(values, Spectrum) else values, dtype=float)
    j = np.arange(1, len(lam) + 1)
    margins = np.cumsum(lam) - 2.0 * math.pi * j**2 / area
    bad = j[lam < 2.0 * math.pi * j / area * (1 - 1e-12)]
    return LiYauReport(margins, [int(i) for i in bad])


# ---------------------------------------------------------------------------
# Unions of rectangles
# ---------------------------------------------------------------------------


def union_count(rects: Sequence[tuple[float, float]], alpha: float, bc: BoundaryCondition) -> int:
    """Counting function of a disjoint union: the sum of the pieces' counts."""
    return sum(lattice_count(L, M, alpha, bc) for L, M in rects)


def union_spectrum(rects: Sequence[tuple[float, float]], bc: BoundaryCondition, count: int) -> np.ndarray:
    """Sorted union (with multiplicity) of the rectangles' spectra."""
    parts = [rectangle_spectrum(L, M, bc, count).values for L, M in rects]
    return np.sort(np.concatenate(parts))[:count]


__all__ = [
    "BALL_VOLUME",
    "BoundsReport",
    "CountingCurve",
    "InversionReport",
    "LiYauReport",
    "area_bounds_check",
    "counting_curve",
    "inversion_check",
    "jump_points",
    "lattice_count",
    "lattice_eigenvalue",
    "li_yau_check",
    "polya_check",
    "union_count",
    "union_spectrum",
    "weyl_bounds",
    "weyl_ratio",
]
