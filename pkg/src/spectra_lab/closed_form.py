"""Exact spectra of the explicitly solvable catalog problems.

Every constructor returns a :class:`Spectrum`: eigenvalues sorted
nondecreasingly, repeated according to multiplicity, each carrying a mode
label so individual modes can be targeted (``(j, k)`` for rectangles,
``(n, m, "cos")`` for disks, and so on).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from spectra_lab.errors import DomainError, TruncationError
from spectra_lab.special_functions import (
    MAX_ORDER,
    bessel_j,
    bessel_roots_below,
    hermite_function,
)

# Relative slack used when comparing eigenvalues against a threshold, so that
# values like (3 pi / pi)^2 = 9.000000000000002 still count as <= 9.
COUNT_RTOL = 1e-12


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet, Neumann, Robin(sigma) or Periodic."""

    tag: str
    sigma: float | None = None

    def __post_init__(self):
        if self.tag not in ("dirichlet", "neumann", "robin", "periodic"):
            raise DomainError(f"unknown boundary condition {self.tag!r}")
        if self.tag == "robin":
            if self.sigma is None or not math.isfinite(self.sigma):
                raise DomainError("Robin condition needs a finite sigma")
        elif self.sigma is not None:
            raise DomainError("sigma is only meaningful for Robin conditions")

    @classmethod
    def parse(cls, text: str, sigma: float | None = None) -> "BoundaryCondition":
        text = text.lower()
        return cls(text, sigma if text == "robin" else None)

    def __str__(self):
        return f"robin({self.sigma:g})" if self.tag == "robin" else self.tag


DIRICHLET = BoundaryCondition("dirichlet")
NEUMANN = BoundaryCondition("neumann")
PERIODIC = BoundaryCondition("periodic")


def robin(sigma: float) -> BoundaryCondition:
    return BoundaryCondition("robin", float(sigma))


DOMAIN_TAGS = (
    "circle",
    "interval",
    "rectangle",
    "disk",
    "equilateral_triangle",
    "harmonic_oscillator",
    "hydrogen_radial",
    "sech_well",
)


@dataclass(frozen=True)
class DomainSpec:
    """Tagged description of a catalog problem.

    ``dims`` holds the lengths the tag needs: ``(L,)`` for an interval,
    ``(L, M)`` for a rectangle, ``(R,)`` for a disk, ``(side,)`` for the
    triangle, ``(d,)`` for the oscillator.
    """

    tag: str
    dims: tuple[float, ...] = ()

    def __post_init__(self):
        if self.tag not in DOMAIN_TAGS:
            raise DomainError(f"unknown domain {self.tag!r}")
        if any(not (d > 0 and math.isfinite(d)) for d in self.dims):
            raise DomainError(f"domain lengths must be positive and finite: {self.dims}")
        if self.tag == "harmonic_oscillator" and (
            len(self.dims) != 1 or int(self.dims[0]) != self.dims[0]
        ):
            raise DomainError("oscillator dimension must be a single integer >= 1")

    @property
    def area(self) -> float:
        if self.tag == "rectangle":
            return self.dims[0] * self.dims[1]
        if self.tag == "disk":
            return math.pi * self.dims[0] ** 2
        if self.tag == "equilateral_triangle":
            return math.sqrt(3.0) / 4.0 * self.dims[0] ** 2
        if self.tag == "interval":
            return self.dims[0]
        if self.tag == "circle":
            return 2.0 * math.pi
        raise DomainError(f"no area for {self.tag}")

    @property
    def perimeter(self) -> float:
        if self.tag == "rectangle":
            return 2.0 * (self.dims[0] + self.dims[1])
        if self.tag == "disk":
            return 2.0 * math.pi * self.dims[0]
        if self.tag == "equilateral_triangle":
            return 3.0 * self.dims[0]
        raise DomainError(f"no perimeter for {self.tag}")


@dataclass(frozen=True)
class Spectrum:
    """Nondecreasing eigenvalues with per-entry mode labels."""

    values: np.ndarray
    labels: tuple
    domain: DomainSpec
    bc: BoundaryCondition | None = None
    _modes: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if len(values) != len(self.labels):
            raise DomainError("one label per eigenvalue is required")
        if np.any(np.diff(values) < 0):
            raise DomainError("spectrum values must be nondecreasing")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, j):
        return self.values[j]

    def eigenfunction(self, j: int) -> Callable:
        """Evaluator of the (unnormalized) eigenfunction behind ``values[j]``."""
        if self._modes is None:
            raise DomainError(f"no closed-form eigenfunctions for {self.domain.tag}")
        return self._modes(self.labels[j], self.values[j])


def _sorted_spectrum(values, labels, domain, bc, count, modes=None) -> Spectrum:
    values = np.asarray(values, dtype=float)
    order = sorted(range(len(values)), key=lambda i: (values[i], labels[i]))[:count]
    return Spectrum(values[order], tuple(labels[i] for i in order), domain, bc, modes)


def _check_count(count) -> int:
    if int(count) != count or count < 1:
        raise DomainError("count must be a positive integer")
    return int(count)


def _check_length(*lengths):
    for x in lengths:
        if not (x > 0 and math.isfinite(x)):
            raise DomainError(f"lengths must be positive and finite, got {x}")


# ---------------------------------------------------------------------------
# One dimension
# ---------------------------------------------------------------------------


def _robin_characteristic(k: float, L: float, sigma: float) -> float:
    """((k^2 - s^2) sin kL - 2 s k cos kL) / (k (s^2 + k^2)).

    Zeros at k = sqrt(rho) are the Robin eigenvalues; this is
    tan(kL) = 2 s k / (k^2 - s^2) cleared of its poles.  The division by k
    removes the trivial zero at the origin.
    """
    if k == 0.0:
        return -(sigma * sigma * L + 2.0 * sigma) / (sigma * sigma)
    num = (k * k - sigma * sigma) * math.sin(k * L) - 2.0 * sigma * k * math.cos(k * L)
    return num / (k * (sigma * sigma + k * k))


def robin_interval_eigenvalues(L: float, sigma: float, count: int) -> np.ndarray:
    """First ``count`` Robin eigenvalues of ``-d^2/dx^2`` on ``(0, L)``, sigma > 0.

    The j-th root of the characteristic function lies in the branch
    ``((j-1) pi / L, j pi / L)`` of tan, between the Neumann and Dirichlet
    values; each branch is solved by Brent bisection.
    """
    _check_length(L)
    if not sigma > 0:
        raise DomainError("closed-form Robin roots need sigma > 0; use the FD operator")
    out = np.empty(count)
    for j in range(1, count + 1):
        lo, hi = (j - 1) * math.pi / L, j * math.pi / L
        k = brentq(_robin_characteristic, lo, hi, args=(L, sigma), xtol=1e-15, rtol=1e-15)
        out[j - 1] = k * k
    return out


def _interval_modes(L, bc):
    def make(label, value):
        if bc.tag == "dirichlet":
            return lambda x: np.sin(label * math.pi * np.asarray(x) / L)
        if bc.tag == "neumann":
            return lambda x: np.cos(label * math.pi * np.asarray(x) / L)
        k, s = math.sqrt(value), bc.sigma
        return lambda x: k * np.cos(k * np.asarray(x)) + s * np.sin(k * np.asarray(x))

    return make


def interval_spectrum(L: float, bc: BoundaryCondition, count: int) -> Spectrum:
    """Eigenvalues of ``-u'' = lambda u`` on ``(0, L)``.

    Dirichlet: ``(j pi / L)^2`` for ``j >= 1``; Neumann: the same for
    ``j >= 0``; Robin (sigma > 0): roots of the transcendental equation.
    Robin eigenfunctions are returned unnormalized,
    ``sqrt(rho) cos(sqrt(rho) x) + sigma sin(sqrt(rho) x)``.
    """
    _check_length(L)
    count = _check_count(count)
    domain = DomainSpec("interval", (float(L),))
    if bc.tag == "dirichlet":
        js = np.arange(1, count + 1)
    elif bc.tag == "neumann":
        js = np.arange(0, count)
    elif bc.tag == "robin":
        vals = robin_interval_eigenvalues(L, bc.sigma, count)
        return Spectrum(vals, tuple(range(1, count + 1)), domain, bc, _interval_modes(L, bc))
    else:
        raise DomainError("periodic conditions belong to the circle, not the interval")
    vals = (js * math.pi / L) ** 2
    return Spectrum(vals, tuple(int(j) for j in js), domain, bc, _interval_modes(L, bc))


def circle_spectrum(count: int) -> Spectrum:
    """Eigenvalues ``j^2, j in Z`` of ``-d^2/dtheta^2`` on the unit circle."""
    count = _check_count(count)
    labels = [(0, "const")]
    j = 1
    while len(labels) < count:
        labels += [(j, "cos"), (j, "sin")]
        j += 1
    labels = labels[:count]
    vals = np.array([float(lab[0] ** 2) for lab in labels])

    def make(label, value):
        j, kind = label
        if kind == "const":
            return lambda t: np.ones_like(np.asarray(t, dtype=float))
        trig = np.cos if kind == "cos" else np.sin
        return lambda t: trig(j * np.asarray(t))

    return Spectrum(vals, tuple(labels), DomainSpec("circle"), PERIODIC, make)


# ---------------------------------------------------------------------------
# Two dimensions
# ---------------------------------------------------------------------------


def _index_start(bc: BoundaryCondition, allowed=("dirichlet", "neumann")) -> int:
    if bc.tag not in allowed:
        raise DomainError(f"{bc} has no closed form here; use the FD operator")
    return 1 if bc.tag == "dirichlet" else 0


def rectangle_values_below(L: float, M: float, bc: BoundaryCondition, alpha: float):
    """All ``(value, (j, k))`` with ``(j pi/L)^2 + (k pi/M)^2 <= alpha``."""
    start = _index_start(bc)
    jmax = int(math.ceil(math.sqrt(max(alpha, 0.0)) * L / math.pi)) + 2
    kmax = int(math.ceil(math.sqrt(max(alpha, 0.0)) * M / math.pi)) + 2
    j = np.arange(start, jmax + 1)
    k = np.arange(start, kmax + 1)
    vals = (j[:, None] * math.pi / L) ** 2 + (k[None, :] * math.pi / M) ** 2
    mask = vals <= alpha * (1 + COUNT_RTOL)
    jj, kk = np.nonzero(mask)
    return vals[mask], j[jj], k[kk]


def _grow_until(count: int, alpha0: float, enumerate_below):
    alpha = alpha0
    while True:
        result = enumerate_below(alpha)
        if len(result[0]) >= count:
            return result
        alpha *= 1.5


def rectangle_spectrum(L: float, M: float, bc: BoundaryCondition, count: int) -> Spectrum:
    """Eigenvalues ``(j pi/L)^2 + (k pi/M)^2`` of the rectangle ``(0,L) x (0,M)``.

    The double-indexed family is enumerated out to a threshold ``alpha``
    large enough to hold ``count`` values; since the formula is increasing in
    each index, nothing below ``alpha`` is missed.
    """
    _check_length(L, M)
    count = _check_count(count)
    _index_start(bc)
    alpha0 = 4 * math.pi * count / (L * M) + 2 * (math.pi / min(L, M)) ** 2
    vals, js, ks = _grow_until(count, alpha0, lambda a: rectangle_values_below(L, M, bc, a))
    order = np.lexsort((ks, js, vals))[:count]
    labels = tuple((int(js[i]), int(ks[i])) for i in order)

    def make(label, value):
        j, k = label
        f = np.sin if bc.tag == "dirichlet" else np.cos
        return lambda x, y: f(j * math.pi * np.asarray(x) / L) * f(k * math.pi * np.asarray(y) / M)

    return Spectrum(vals[order], labels, DomainSpec("rectangle", (float(L), float(M))), bc, make)


def disk_spectrum(R: float, bc: BoundaryCondition, count: int) -> Spectrum:
    """Eigenvalues ``(j_{n,m}/R)^2`` of the disk of radius ``R``.

    Dirichlet uses roots of ``J_n``, Neumann roots of ``J_n'`` plus the
    constant mode 0.  Modes with ``n >= 1`` appear twice (cos and sin).
    """
    _check_length(R)
    count = _check_count(count)
    kind = "J" if _index_start(bc) == 1 else "Jprime"
    # Weyl guess N(alpha) ~ R^2 alpha / 4 - R sqrt(alpha) / 2, padded
    alpha = (4.0 * count + 8.0 * math.sqrt(count) + 10.0) / R**2
    while True:
        xmax = R * math.sqrt(alpha)
        vals, labels = [], []
        if kind == "Jprime":
            vals.append(0.0)
            labels.append((0, 0, "const"))
        for n in range(MAX_ORDER + 1):
            roots = bessel_roots_below(n, xmax, kind)
            if len(roots) == 0:
                break
            for m, r in enumerate(roots, start=1):
                lam = (r / R) ** 2
                if n == 0:
                    vals.append(lam)
                    labels.append((0, m, "cos"))
                else:
                    vals += [lam, lam]
                    labels += [(n, m, "cos"), (n, m, "sin")]
        else:
            # order MAX_ORDER still had roots below xmax, so higher orders may too
            raise DomainError("disk spectrum needs Bessel orders beyond the supported range")
        if len(vals) >= count:
            break
        alpha *= 1.2

    def make(label, value):
        n, m, trig = label
        k = math.sqrt(value)
        if trig == "const":
            return lambda r, th: np.ones_like(np.asarray(r, dtype=float))
        ang = np.cos if trig == "cos" else np.sin
        return lambda r, th: bessel_j(n, k * np.asarray(r)) * ang(n * np.asarray(th))

    return _sorted_spectrum(vals, labels, DomainSpec("disk", (float(R),)), bc, count, make)


def triangle_spectrum(L: float, bc: BoundaryCondition, count: int) -> Spectrum:
    """Equilateral triangle of side ``L``: ``16 pi^2/(9 L^2) (j^2 + jk + k^2)``.

    Dirichlet indices ``j, k >= 1``; Neumann ``j, k >= 0``.
    """
    _check_length(L)
    count = _check_count(count)
    start = _index_start(bc)
    c = 16.0 * math.pi**2 / (9.0 * L**2)

    def below(alpha):
        top = int(math.sqrt(max(alpha, 0.0) / c)) + 2
        idx = np.arange(start, top + 1)
        q = idx[:, None] ** 2 + idx[:, None] * idx[None, :] + idx[None, :] ** 2
        vals = c * q
        mask = vals <= alpha * (1 + COUNT_RTOL)
        jj, kk = np.nonzero(mask)
        return vals[mask], idx[jj], idx[kk]

    area = math.sqrt(3.0) / 4.0 * L * L
    vals, js, ks = _grow_until(count, 4 * math.pi * count / area + 4 * c, below)
    order = np.lexsort((ks, js, vals))[:count]
    labels = tuple((int(js[i]), int(ks[i])) for i in order)
    return Spectrum(vals[order], labels, DomainSpec("equilateral_triangle", (float(L),)), bc)


# ---------------------------------------------------------------------------
# Quantum catalog
# ---------------------------------------------------------------------------


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, out = -1, []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def oscillator_spectrum(d: int, count: int) -> Spectrum:
    """Harmonic oscillator ``-Delta u + |x|^2 u = E u`` in ``d`` dimensions.

    ``E = (2 k_1 + 1) + ... + (2 k_d + 1)``; level ``2K + d`` has one mode per
    composition of ``K`` into ``d`` parts.
    """
    if int(d) != d or d < 1:
        raise DomainError("dimension must be an integer >= 1")
    d = int(d)
    count = _check_count(count)
    vals, labels = [], []
    K = 0
    while len(vals) < count:
        for comp in sorted(_compositions(K, d), reverse=True):
            vals.append(float(2 * K + d))
            labels.append(comp)
        K += 1

    modes = None
    if d == 1:
        def modes(label, value):
            return lambda x: hermite_function(label[0], x)

    return Spectrum(
        np.array(vals[:count]),
        tuple(labels[:count]),
        DomainSpec("harmonic_oscillator", (float(d),)),
        None,
        modes,
    )


def hydrogen_spectrum(count_levels: int) -> Spectrum:
    """Hydrogen bound states ``E = -1/n^2`` with multiplicity ``n^2``.

    Labels are ``(n, l, m)`` with ``0 <= l < n`` and ``|m| <= l``.
    """
    count_levels = _check_count(count_levels)
    vals, labels = [], []
    for n in range(1, count_levels + 1):
        for l in range(n):
            for m in range(-l, l + 1):
                vals.append(-1.0 / n**2)
                labels.append((n, l, m))
    return Spectrum(np.array(vals), tuple(labels), DomainSpec("hydrogen_radial"))


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------


def counting_function(spec: Spectrum, alpha: float) -> int:
    """``N(alpha)``: number of eigenvalues ``<= alpha``, with multiplicity.

    Raises
    ------
    TruncationError
        If the stored spectrum does not extend past ``alpha``, in which case
        the count could be an undercount.
    """
    values = spec.values
    if len(values) == 0 or values[-1] <= alpha:
        raise TruncationError(
            f"spectrum ends at {values[-1] if len(values) else 'nothing'}; "
            f"cannot count eigenvalues up to {alpha}"
        )
    slack = COUNT_RTOL * max(1.0, abs(alpha))
    return int(np.searchsorted(values, alpha + slack, side="right"))


__all__ = [
    "BoundaryCondition",
    "DIRICHLET",
    "DomainSpec",
    "NEUMANN",
    "PERIODIC",
    "Spectrum",
    "circle_spectrum",
    "counting_function",
    "disk_spectrum",
    "hydrogen_spectrum",
    "interval_spectrum",
    "oscillator_spectrum",
    "rectangle_spectrum",
    "rectangle_values_below",
    "robin",
    "robin_interval_eigenvalues",
    "triangle_spectrum",
]
