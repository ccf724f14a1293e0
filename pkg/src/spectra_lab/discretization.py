"""Finite-difference operators for the catalog problems.

Grids
-----
Dirichlet problems use the vertex grid ``x_i = a + i h`` (``i = 1..n``,
``h = (b - a)/(n + 1)``) with the ``(-1, 2, -1)/h^2`` stencil.  Neumann and
Robin problems use the cell-centred grid ``x_i = a + (i - 1/2) h``
(``h = (b - a)/n``): a mirror ghost node reflects ``u`` across the wall, which
turns the boundary diagonal into ``1/h^2`` and leaves the matrix symmetric.
Robin adds ``sigma/h`` (the boundary integral lumped onto the end cell).

The cell-centred grid also carries a Dirichlet variant (ghost ``-u``, boundary
diagonal ``3/h^2``), so the three conditions can be compared on one node set:
there the matrices are ordered ``N <= R(sigma) <= D`` whenever
``0 <= sigma h <= 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from spectra_lab.closed_form import BoundaryCondition
from spectra_lab.errors import DomainError
from spectra_lab.linalg_eigen import DenseSymmetric, SymTridiagonal, tridiag_eigen
from spectra_lab.special_functions import sech

GridKind = Literal["vertex", "cell", "periodic"]

# Kronecker assembly beyond this many unknowns is refused; dense_eigen is a
# desk-scale solver and the sum-spectrum path covers larger grids.
MAX_DENSE = 2000
MAX_TENSOR = 40_000


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on ``[a, b]`` with ``n`` unknowns."""

    a: float
    b: float
    n: int
    kind: GridKind = "vertex"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise DomainError("a grid needs n >= 3 unknowns")
        if not self.b > self.a:
            raise DomainError("grid endpoints must satisfy a < b")
        if self.kind not in ("vertex", "cell", "periodic"):
            raise DomainError(f"unknown grid kind {self.kind!r}")

    @property
    def h(self) -> float:
        width = self.b - self.a
        return width / (self.n + 1) if self.kind == "vertex" else width / self.n

    @property
    def nodes(self) -> np.ndarray:
        i = np.arange(self.n)
        if self.kind == "vertex":
            return self.a + (i + 1) * self.h
        if self.kind == "cell":
            return self.a + (i + 0.5) * self.h
        return self.a + i * self.h


@dataclass(frozen=True)
class PotentialFn:
    """A potential ``V(x)`` with a descriptor tag."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    descriptor: str = "custom"

    def __post_init__(self):
        if self.descriptor not in ("quadratic", "sech2", "coulomb_radial", "custom"):
            raise DomainError(f"unknown potential descriptor {self.descriptor!r}")

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))


def quadratic_potential() -> PotentialFn:
    return PotentialFn(lambda x: x * x, "quadratic")


def sech2_potential(depth: float = 2.0) -> PotentialFn:
    return PotentialFn(lambda x: -depth * sech(x) ** 2, "sech2")


def coulomb_potential(charge: float = 2.0) -> PotentialFn:
    return PotentialFn(lambda r: -charge / r, "coulomb_radial")


def zero_potential() -> PotentialFn:
    return PotentialFn(np.zeros_like, "custom")


def _stencil(n: int, h: float, left: float, right: float) -> tuple[np.ndarray, np.ndarray]:
    diag = np.full(n, 2.0 / h**2)
    diag[0], diag[-1] = left, right
    return diag, np.full(n - 1, -1.0 / h**2)


def laplacian_1d(L: float, bc: BoundaryCondition, n: int, grid: GridKind | None = None,
                 a: float = 0.0) -> SymTridiagonal:
    """``-d^2/dx^2`` on ``(a, a + L)`` as a symmetric tridiagonal matrix.

    Parameters
    ----------
    L : float
        Interval length.
    bc : BoundaryCondition
        Dirichlet, Neumann or Robin (any real sigma).
    n : int
        Number of unknowns, at least 3.
    grid : {"vertex", "cell"}, optional
        Node placement.  Defaults to ``"vertex"`` for Dirichlet and ``"cell"``
        for Neumann/Robin; the latter two are only defined on the cell grid.
    """
    if not (L > 0 and math.isfinite(L)):
        raise DomainError("interval length must be positive")
    tag = bc.tag
    if tag == "periodic":
        raise DomainError("periodic conditions are not tridiagonal; use the circle closed form")
    if grid is None:
        grid = "vertex" if tag == "dirichlet" else "cell"
    if grid == "vertex" and tag != "dirichlet":
        raise DomainError("Neumann and Robin conditions live on the cell-centred grid")
    g = Grid1D(a, a + L, n, grid)
    h = g.h
    if tag == "dirichlet":
        end = 2.0 / h**2 if grid == "vertex" else 3.0 / h**2
    elif tag == "neumann":
        end = 1.0 / h**2
    else:
        # ghost from (u_0 - u_g)/h = sigma (u_0 + u_g)/2: second order at the wall
        damp = 1.0 + 0.5 * bc.sigma * h
        if damp <= 0:
            raise DomainError("grid too coarse for this negative Robin constant (need sigma h > -2)")
        end = 1.0 / h**2 + bc.sigma / (h * damp)
    diag, off = _stencil(n, h, end, end)
    return SymTridiagonal(diag, off, h=h, nodes=g.nodes, bc=str(bc))


# ---------------------------------------------------------------------------
# Rectangles: Kronecker sums
# ---------------------------------------------------------------------------


def _all_eigenvalues(T: SymTridiagonal) -> np.ndarray:
    return tridiag_eigen(T, T.n).values


@dataclass(frozen=True)
class TensorLaplacian:
    """``T_x (x) I + I (x) T_y`` on an ``nx`` by ``ny`` rectangle grid.

    Node ``(i, k)`` is stored at flat index ``i * ny + k``.
    """

    tx: SymTridiagonal
    ty: SymTridiagonal
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.tx.n, self.ty.n

    @property
    def size(self) -> int:
        return self.tx.n * self.ty.n

    def dense(self) -> DenseSymmetric:
        """The assembled matrix (only for ``nx * ny <= 2000``)."""
        if self.size > MAX_DENSE:
            raise DomainError(
                f"dense assembly of {self.size} unknowns exceeds {MAX_DENSE}; use eigenvalues()"
            )
        ax, ay = self.tx.to_dense(), self.ty.to_dense()
        full = np.kron(ax, np.eye(self.ty.n)) + np.kron(np.eye(self.tx.n), ay)
        return DenseSymmetric(full, {"shape": self.shape})

    def eigenvalues(self, count: int | None = None) -> np.ndarray:
        """Smallest eigenvalues via pairwise sums of the 1-d spectra."""
        if "sums" not in self._cache:
            ex, ey = _all_eigenvalues(self.tx), _all_eigenvalues(self.ty)
            self._cache["sums"] = np.sort((ex[:, None] + ey[None, :]).ravel())
        sums = self._cache["sums"]
        return sums if count is None else sums[:count]


def laplacian_rectangle(L: float, M: float, bc: BoundaryCondition, nx: int, ny: int,
                        grid: GridKind | None = None) -> TensorLaplacian:
    """Five-point Laplacian on ``(0, L) x (0, M)`` with the same condition on every side."""
    if nx * ny > MAX_TENSOR:
        raise DomainError(f"grid of {nx * ny} nodes exceeds the supported {MAX_TENSOR}")
    return TensorLaplacian(laplacian_1d(L, bc, nx, grid), laplacian_1d(M, bc, ny, grid))


# ---------------------------------------------------------------------------
# Schroedinger operators
# ---------------------------------------------------------------------------


def _add_potential(T: SymTridiagonal, values: np.ndarray, nodes: np.ndarray) -> SymTridiagonal:
    if not np.all(np.isfinite(values)):
        bad = nodes[~np.isfinite(values)][0]
        raise DomainError(f"potential is not finite at node x = {bad:g}")
    return SymTridiagonal(T.diag + values, T.offdiag, h=T.h, nodes=T.nodes, bc=T.bc)


def schrodinger_1d(V: PotentialFn, R: float, n: int,
                   bc: BoundaryCondition | None = None) -> SymTridiagonal:
    """``-u'' + V u`` on the box ``(-R, R)``; Dirichlet walls by default."""
    if not R > 0:
        raise DomainError("box half-width must be positive")
    bc = bc or BoundaryCondition("dirichlet")
    T = laplacian_1d(2.0 * R, bc, n, a=-R)
    with np.errstate(all="ignore"):
        vals = np.asarray(V(T.nodes), dtype=float)
    return _add_potential(T, vals, T.nodes)


def hydrogen_radial(R: float, n: int) -> SymTridiagonal:
    """``-u'' - (2/r) u`` on ``(0, R)`` with ``u(0) = u(R) = 0`` (``l = 0``).

    Nodes sit at ``r_i = (i + 1/2) h`` so the Coulomb term is never evaluated
    at the origin; the walls are imposed through odd ghost nodes.
    """
    if not R > 0:
        raise DomainError("truncation radius must be positive")
    T = laplacian_1d(R, BoundaryCondition("dirichlet"), n, grid="cell")
    return _add_potential(T, coulomb_potential()(T.nodes), T.nodes)


# ---------------------------------------------------------------------------
# Periodic fourth-order thin-film operator
# ---------------------------------------------------------------------------


def periodic_difference(n: int, h: float, order: int) -> np.ndarray:
    """Periodic forward difference (``order=1``) or centred second difference."""
    eye = np.eye(n)
    shift = np.roll(eye, 1, axis=1)  # (shift @ u)_i = u_{i+1}
    if order == 1:
        return (shift - eye) / h
    if order == 2:
        return (shift - 2 * eye + shift.T) / h**2
    raise DomainError("order must be 1 or 2")


def mean_zero_basis(n: int) -> np.ndarray:
    """Orthonormal real Fourier basis of the mean-zero subspace of ``R^n``.

    Columns are ``cos``/``sin`` modes of wavenumbers ``1..n/2``, so constant
    coefficient operators come out diagonal.
    """
    i = np.arange(n)
    cols = []
    for k in range(1, (n - 1) // 2 + 1):
        cols.append(np.cos(2 * np.pi * k * i / n) * math.sqrt(2.0 / n))
        cols.append(np.sin(2 * np.pi * k * i / n) * math.sqrt(2.0 / n))
    if n % 2 == 0:
        cols.append(np.cos(np.pi * i) / math.sqrt(n))
    return np.column_stack(cols)


def thinfilm_linearized(H: np.ndarray, g: Callable, X: float) -> DenseSymmetric:
    """Linearized thin-film operator ``w'''' + (g(H) w')'`` on mean-zero functions.

    Assembled as ``D2^T D2 - D1^T diag(g(H_{i+1/2})) D1`` with periodic
    differences on ``n = len(H)`` equispaced nodes of ``[0, X)``, then
    compressed to the mean-zero subspace through an orthonormal basis ``Q``
    (stored in ``meta["basis"]``); eigenvectors lift back as ``Q y``.
    """
    H = np.asarray(H, dtype=float)
    n = len(H)
    if n < 16:
        raise DomainError("the thin-film operator needs n >= 16 nodes")
    if not X > 0:
        raise DomainError("period must be positive")
    h = X / n
    d1 = periodic_difference(n, h, 1)
    d2 = periodic_difference(n, h, 2)
    mid = 0.5 * (H + np.roll(H, -1))
    gm = np.asarray(g(mid), dtype=float) * np.ones(n)
    full = d2.T @ d2 - d1.T @ (gm[:, None] * d1)
    full = 0.5 * (full + full.T)
    Q = mean_zero_basis(n)
    B = Q.T @ full @ Q
    return DenseSymmetric(0.5 * (B + B.T), {"basis": Q, "X": X, "h": h, "full": full})


__all__ = [
    "Grid1D",
    "PotentialFn",
    "TensorLaplacian",
    "coulomb_potential",
    "hydrogen_radial",
    "laplacian_1d",
    "laplacian_rectangle",
    "mean_zero_basis",
    "periodic_difference",
    "quadratic_potential",
    "schrodinger_1d",
    "sech2_potential",
    "thinfilm_linearized",
    "zero_potential",
]
