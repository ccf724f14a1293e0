"""Bessel and Hermite functions, Bessel roots, and composite quadrature.

Bessel functions of integer order are evaluated from the integral
representation

    J_n(x) = (1/2pi) * int_0^{2pi} cos(n t - x sin t) dt,

whose integrand is periodic and entire, so the equispaced trapezoid rule
converges geometrically once the node count exceeds ``x + n``.  The aliasing
error of an ``N``-point rule is a sum of ``J_{n +- kN}(x)`` terms, which we keep
below 1e-15 by padding ``N`` past the turning point of the Bessel function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.optimize import brentq

from spectra_lab.errors import ConvergenceError, DomainError

MAX_ORDER = 20
MAX_ARGUMENT = 1.0e3
MAX_ROOT_INDEX = 100
SCAN_STEP = 0.1

BesselKind = Literal["J", "Jprime"]


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a composite rule on ``interval``."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape:
            raise DomainError("nodes and weights must have the same length")
        if np.any(self.weights < 0):
            raise DomainError("quadrature weights must be nonnegative")

    def __len__(self) -> int:
        return len(self.nodes)

    @classmethod
    def simpson(cls, a: float, b: float, n_intervals: int) -> "QuadratureRule":
        """Composite Simpson rule with ``n_intervals`` (even) subintervals."""
        if n_intervals < 2 or n_intervals % 2:
            raise DomainError("Simpson needs an even number of subintervals >= 2")
        if not b > a:
            raise DomainError("interval must satisfy a < b")
        nodes = np.linspace(a, b, n_intervals + 1)
        h = (b - a) / n_intervals
        w = np.full(n_intervals + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        return cls(nodes, w * h / 3.0, (float(a), float(b)))

    @classmethod
    def trapezoid(cls, a: float, b: float, n_intervals: int) -> "QuadratureRule":
        if n_intervals < 1:
            raise DomainError("need at least one subinterval")
        if not b > a:
            raise DomainError("interval must satisfy a < b")
        nodes = np.linspace(a, b, n_intervals + 1)
        h = (b - a) / n_intervals
        w = np.full(n_intervals + 1, h)
        w[0] = w[-1] = 0.5 * h
        return cls(nodes, w, (float(a), float(b)))

    @classmethod
    def midpoint(cls, a: float, b: float, n_intervals: int) -> "QuadratureRule":
        if n_intervals < 1:
            raise DomainError("need at least one subinterval")
        if not b > a:
            raise DomainError("interval must satisfy a < b")
        h = (b - a) / n_intervals
        nodes = a + h * (np.arange(n_intervals) + 0.5)
        return cls(nodes, np.full(n_intervals, h), (float(a), float(b)))

    @classmethod
    def periodic(cls, a: float, b: float, n: int) -> "QuadratureRule":
        """Equispaced rule on ``[a, b)`` for ``b - a`` periodic integrands."""
        if n < 1 or not b > a:
            raise DomainError("need n >= 1 and a < b")
        h = (b - a) / n
        return cls(a + h * np.arange(n), np.full(n, h), (float(a), float(b)))


def integrate(rule: QuadratureRule, f: np.ndarray | Callable[[np.ndarray], np.ndarray]):
    """Apply ``rule`` to samples of ``f`` (or to ``f`` evaluated at the nodes).

    Complex samples are integrated componentwise.
    """
    samples = f(rule.nodes) if callable(f) else np.asarray(f)
    if samples.shape[-1] != len(rule.nodes):
        raise DomainError(
            f"sample length {samples.shape[-1]} does not match {len(rule.nodes)} nodes"
        )
    return samples @ rule.weights


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------


def _check_order(order) -> int:
    if int(order) != order or not 0 <= order <= MAX_ORDER:
        raise DomainError(f"Bessel order must be an integer in [0, {MAX_ORDER}], got {order}")
    return int(order)


def _node_count(order: int, xmax: float) -> int:
    return int(xmax + order + 64 + 8 * np.cbrt(xmax))


def _bessel_unchecked(order: int, x: np.ndarray) -> np.ndarray:
    n_nodes = _node_count(abs(order), float(np.max(x, initial=0.0)))
    t = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    phase = order * t[None, :] - x.reshape(-1, 1) * np.sin(t)[None, :]
    return np.cos(phase).mean(axis=1).reshape(x.shape)


def bessel_j(order: int, x):
    """Bessel function of the first kind ``J_order(x)``.

    Parameters
    ----------
    order : int
        Integer order in ``[0, 20]``.
    x : float or array_like
        Nonnegative argument(s), at most 1e3.

    Returns
    -------
    float or ndarray
        Values with absolute error below 1e-10 (in practice ~1e-14).
    """
    order = _check_order(order)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > MAX_ARGUMENT) or not np.all(np.isfinite(arr)):
        raise DomainError(f"Bessel argument must lie in [0, {MAX_ARGUMENT:g}]")
    out = _bessel_unchecked(order, arr)
    return float(out) if out.ndim == 0 else out


def bessel_jprime(order: int, x):
    """Derivative ``J_order'(x)`` via ``(J_{n-1} - J_{n+1}) / 2``."""
    order = _check_order(order)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > MAX_ARGUMENT):
        raise DomainError(f"Bessel argument must lie in [0, {MAX_ARGUMENT:g}]")
    if order == 0:
        out = -_bessel_unchecked(1, arr)
    else:
        out = 0.5 * (_bessel_unchecked(order - 1, arr) - _bessel_unchecked(order + 1, arr))
    return float(out) if out.ndim == 0 else out


def _kind_function(order: int, kind: str):
    if kind == "J":
        return lambda x: bessel_j(order, x)
    if kind == "Jprime":
        return lambda x: bessel_jprime(order, x)
    raise DomainError(f"kind must be 'J' or 'Jprime', got {kind!r}")


def _scan_start(order: int) -> float:
    # j_{n,1} > n and j'_{n,1} > n for n >= 1; the point x = 0 is excluded
    # (J_n(0) = 0 for n >= 1, J_0'(0) = 0).
    return max(float(order), SCAN_STEP)


def bessel_roots_below(order: int, xmax: float, kind: BesselKind = "J") -> np.ndarray:
    """All positive roots of ``J_order`` (or ``J_order'``) smaller than ``xmax``."""
    order = _check_order(order)
    func = _kind_function(order, kind)
    start = _scan_start(order)
    if xmax <= start:
        return np.empty(0)
    if xmax > MAX_ARGUMENT:
        raise DomainError("root scan beyond supported argument range")
    grid = np.arange(start, xmax + SCAN_STEP, SCAN_STEP)
    grid = grid[grid <= MAX_ARGUMENT]
    vals = func(grid)
    roots = []
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0):
        lo, hi = grid[i], grid[i + 1]
        if vals[i] == 0.0:
            root = lo
        elif vals[i + 1] == 0.0:
            continue  # picked up as the left endpoint of the next cell
        else:
            root = brentq(func, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        if root < xmax and (not roots or root - roots[-1] > 1e-9):
            roots.append(root)
    return np.array(roots)


def bessel_root(order: int, index: int, kind: BesselKind = "J") -> float:
    """The ``index``-th positive root of ``J_order`` or of ``J_order'``.

    Roots are bracketed by a sign scan with step 0.1 and refined with Brent's
    bisection/secant hybrid to absolute tolerance 1e-14.

    Raises
    ------
    ConvergenceError
        If the scan reaches its safety bound without ``index`` sign changes.
    """
    order = _check_order(order)
    if int(index) != index or not 1 <= index <= MAX_ROOT_INDEX:
        raise DomainError(f"root index must be an integer in [1, {MAX_ROOT_INDEX}]")
    bound = 10.0 + (index + order) * np.pi
    roots = bessel_roots_below(order, bound, kind)
    if len(roots) < index:
        raise ConvergenceError(
            f"found only {len(roots)} roots of {kind}_{order} below the scan bound {bound:.3f}"
        )
    return float(roots[index - 1])


# ---------------------------------------------------------------------------
# Hermite polynomials
# ---------------------------------------------------------------------------


def hermite(k: int, x):
    """Physicists' Hermite polynomial ``H_k(x)`` by the three-term recurrence.

    ``H_0 = 1``, ``H_1 = 2x``, ``H_{k+1} = 2x H_k - 2k H_{k-1}``.

    Raises
    ------
    OverflowError
        If an intermediate value overflows double precision.
    """
    if int(k) != k or not 0 <= k <= 30:
        raise DomainError("Hermite degree must be an integer in [0, 30]")
    x = np.asarray(x, dtype=float)
    with np.errstate(over="raise", invalid="raise"):
        try:
            prev, cur = np.ones_like(x), 2.0 * x
            if k == 0:
                out = prev
            else:
                for j in range(1, int(k)):
                    prev, cur = cur, 2.0 * x * cur - 2.0 * j * prev
                out = cur
        except FloatingPointError as exc:
            raise OverflowError(f"H_{k} overflowed for the given x") from exc
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"H_{k} overflowed for the given x")
    return float(out) if out.ndim == 0 else out


def hermite_function(k: int, x):
    """Unnormalized oscillator eigenfunction ``H_k(x) exp(-x^2/2)``."""
    x = np.asarray(x, dtype=float)
    return hermite(k, x) * np.exp(-0.5 * x * x)


def sech(x):
    """Overflow-free hyperbolic secant."""
    e = np.exp(-np.abs(np.asarray(x, dtype=float)))
    return 2.0 * e / (1.0 + e * e)


__all__ = [
    "QuadratureRule",
    "bessel_j",
    "bessel_jprime",
    "bessel_root",
    "bessel_roots_below",
    "hermite",
    "hermite_function",
    "integrate",
    "sech",
]

