"""Symmetric eigensolvers and eigen-expansion calculus.

Two solvers that share no code, so each can check the other:

* :func:`tridiag_eigen` counts eigenvalues below a shift with the Sturm
  sequence of the leading principal minors, bisects on that count, and
  recovers eigenvectors by inverse iteration;
* :func:`dense_eigen` runs cyclic Jacobi rotations in round-robin order, which
  lets the ``n/2`` disjoint rotations of one round be applied as a single
  vectorized update.

On top of an :class:`EigenPairs` expansion we provide the resolvent
``(A - lambda)^{-1}`` and the heat, wave and Schroedinger propagators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from spectra_lab.errors import ConvergenceError, DomainError

EPS = np.finfo(float).eps
NEIGHBOUR_GAP = 1e-3  # relative gap below which inverse-iteration vectors are re-orthogonalized


@dataclass(frozen=True)
class SymTridiagonal:
    """Symmetric tridiagonal matrix plus the grid it was assembled on."""

    diag: np.ndarray
    offdiag: np.ndarray
    h: float | None = None
    nodes: np.ndarray | None = field(default=None, repr=False)
    bc: str | None = None

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or len(d) < 2:
            raise DomainError("a tridiagonal matrix needs n >= 2")
        if e.shape != (len(d) - 1,):
            raise DomainError("offdiag must have length n - 1")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return len(self.diag)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        out = self.diag.reshape((-1,) + (1,) * (v.ndim - 1)) * v
        e = self.offdiag.reshape((-1,) + (1,) * (v.ndim - 1))
        out[:-1] += e * v[1:]
        out[1:] += e * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def norm(self) -> float:
        """Infinity-norm (an upper bound for the spectral norm)."""
        a = np.abs(self.offdiag)
        rows = np.abs(self.diag).copy()
        rows[:-1] += a
        rows[1:] += a
        return float(rows.max())

    def gershgorin(self) -> tuple[float, float]:
        a = np.abs(self.offdiag)
        r = np.zeros(self.n)
        r[:-1] += a
        r[1:] += a
        return float((self.diag - r).min()), float((self.diag + r).max())


@dataclass(frozen=True)
class DenseSymmetric:
    """Dense real symmetric matrix (checked to 1e-12 relative)."""

    entries: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("matrix must be square")
        scale = np.abs(a).max(initial=0.0)
        if np.abs(a - a.T).max(initial=0.0) > 1e-12 * max(scale, EPS):
            raise DomainError("matrix is not symmetric")
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.entries @ v

    def to_dense(self) -> np.ndarray:
        return self.entries

    def norm(self) -> float:
        return float(np.abs(self.entries).sum(axis=1).max())


@dataclass(frozen=True)
class EigenPairs:
    """Sorted eigenvalues with orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray
    residual_bound: float = 0.0

    def __len__(self) -> int:
        return len(self.values)

    def coefficients(self, f: np.ndarray) -> np.ndarray:
        return self.vectors.T @ f


def as_matrix(A) -> np.ndarray:
    if isinstance(A, (SymTridiagonal, DenseSymmetric)):
        return A.to_dense()
    return np.asarray(A, dtype=float)


def matvec(A, v):
    if isinstance(A, (SymTridiagonal, DenseSymmetric)):
        return A.matvec(v)
    return np.asarray(A) @ v


def residuals(A, pairs: EigenPairs) -> np.ndarray:
    """``||A v_j - lambda_j v_j||_2`` for every pair."""
    AV = matvec(A, pairs.vectors)
    return np.linalg.norm(AV - pairs.vectors * pairs.values, axis=0)


# ---------------------------------------------------------------------------
# Sturm bisection + inverse iteration
# ---------------------------------------------------------------------------


def sturm_count(T: SymTridiagonal, shifts) -> np.ndarray:
    """Number of eigenvalues of ``T`` strictly below each shift.

    Counts negative pivots of the LDL^T factorization of ``T - x``; a zero
    pivot is nudged to ``-eps * scale`` so the count stays well defined.
    """
    x = np.atleast_1d(np.asarray(shifts, dtype=float))
    d, e2 = T.diag, T.offdiag**2
    tiny = EPS * max(T.norm(), 1.0)
    q = d[0] - x
    q[q == 0.0] = -tiny
    count = (q < 0).astype(int)
    for i in range(1, T.n):
        q = (d[i] - x) - e2[i - 1] / q
        q[q == 0.0] = -tiny
        count += q < 0
    return count


def bisect_eigenvalues(T: SymTridiagonal, k: int, rtol: float = 4 * EPS) -> np.ndarray:
    """The ``k`` smallest eigenvalues of ``T`` by simultaneous bisection."""
    lo_g, hi_g = T.gershgorin()
    pad = 1e-12 * max(abs(lo_g), abs(hi_g), 1.0)
    lo = np.full(k, lo_g - pad)
    hi = np.full(k, hi_g + pad)
    idx = np.arange(k)
    floor = 2 * EPS * max(T.norm(), 1.0) * 1e-2
    for _ in range(200):
        width = hi - lo
        active = width > rtol * np.maximum(np.abs(lo), np.abs(hi)) + floor
        if not active.any():
            break
        mid = 0.5 * (lo[active] + hi[active])
        below = sturm_count(T, mid) > idx[active]
        a_lo, a_hi = lo[active], hi[active]
        a_hi[below] = mid[below]
        a_lo[~below] = mid[~below]
        lo[active], hi[active] = a_lo, a_hi
    return 0.5 * (lo + hi)


def _lead_index(x: np.ndarray) -> int:
    """First entry at least half the largest magnitude.

    Used for sign normalization and tie-breaking instead of the argmax, which
    is decided by rounding when a mode has two extremes of equal size.
    """
    mag = np.abs(x)
    return int(np.argmax(mag >= 0.5 * mag.max()))


def _sign_of(x: np.ndarray) -> float:
    return 1.0 if x[_lead_index(x)] >= 0 else -1.0


def _cluster_ids(values: np.ndarray, scale: float) -> np.ndarray:
    ids = np.zeros(len(values), dtype=int)
    for i in range(1, len(values)):
        ids[i] = ids[i - 1] + (values[i] - values[i - 1] >= 1e-8 * scale)
    return ids


def tridiag_eigen(T: SymTridiagonal, k: int | None = None, max_iter: int = 8) -> EigenPairs:
    """The ``k`` smallest eigenpairs of a symmetric tridiagonal matrix.

    Eigenvalues come from Sturm-count bisection.  Each eigenvector is found by
    inverse iteration with shift ``lambda + 1e-10 * max(1, |lambda|)``;
    members of a cluster (gap below 1e-8 relative to ``||T||``) are kept
    orthonormal by modified Gram-Schmidt against earlier cluster members.
    Close but distinct neighbours (within ``1e-3 ||T||``) get the same
    treatment, since inverse iteration alone only separates them to about
    ``residual / gap``.

    Raises
    ------
    ConvergenceError
        If inverse iteration has not converged after ``max_iter`` solves.
    """
    n = T.n
    k = n if k is None else int(k)
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n = {n}")
    values = bisect_eigenvalues(T, k)
    tnorm = max(T.norm(), EPS)
    clusters = _cluster_ids(values, max(tnorm, 1.0))
    tol = 1e3 * n * EPS * tnorm
    rng = np.random.default_rng(20240601)
    vectors = np.empty((n, k))
    band = np.zeros((3, n))
    band[0, 1:] = T.offdiag
    band[2, :-1] = T.offdiag
    for j in range(k):
        lam = values[j]
        shift = lam + 1e-10 * max(1.0, abs(lam))
        band[1] = T.diag - shift
        peers = [i for i in range(j)
                 if clusters[i] == clusters[j] or lam - values[i] < NEIGHBOUR_GAP * tnorm]
        x = rng.standard_normal(n)
        converged = False
        for _ in range(max_iter):
            x = solve_banded((1, 1), band, x, check_finite=False)
            for _pass in range(2):
                for i in peers:
                    x -= (vectors[:, i] @ x) * vectors[:, i]
            x /= np.linalg.norm(x)
            if converged:
                break  # one polishing solve past the residual test
            converged = np.linalg.norm(T.matvec(x) - lam * x) <= tol
        if not converged:
            raise ConvergenceError(f"inverse iteration did not converge for eigenpair {j}")
        vectors[:, j] = x * _sign_of(x)
    pairs = EigenPairs(values, vectors)
    res = residuals(T, pairs)
    return EigenPairs(values, vectors, float(res.max() / tnorm))


# ---------------------------------------------------------------------------
# Cyclic Jacobi
# ---------------------------------------------------------------------------


def _round_robin(m: int) -> list[np.ndarray]:
    """Circle-method arrangements of ``m`` (even) indices.

    In each arrangement positions ``(2i, 2i+1)`` form the rotation pairs; over
    the ``m - 1`` arrangements every index pair meets exactly once.
    """
    players = list(range(m))
    arrangements = []
    for _ in range(m - 1):
        first, second = players[: m // 2], players[m // 2 :][::-1]
        arrangements.append(np.array([x for pair in zip(first, second) for x in pair]))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return arrangements


def _transition_perms(arrangements: list[np.ndarray]) -> list[np.ndarray]:
    """Position permutations taking arrangement r to r + 1 (cyclically)."""
    perms = []
    for r, cur in enumerate(arrangements):
        nxt = arrangements[(r + 1) % len(arrangements)]
        where = np.empty_like(cur)
        where[cur] = np.arange(len(cur))
        perms.append(where[nxt])
    return perms


def dense_eigen(A, tol: float = 1e-12, max_sweeps: int = 60) -> EigenPairs:
    """Full eigendecomposition of a dense symmetric matrix by Jacobi rotations.

    Sweeps continue until the off-diagonal Frobenius norm drops below
    ``tol * ||A||_F``.  The working matrix is kept permuted so the rotation
    pairs of each round sit at adjacent positions; the ``n/2`` rotations then
    act on strided views in one vectorized update.  Vectors are
    sign-normalized (first entry of at least half the peak magnitude is
    positive) and ties in value are broken by
    the index of that entry.
    """
    dense = as_matrix(A)
    n = dense.shape[0]
    if n > 2000:
        raise DomainError("dense_eigen is meant for n <= 2000")
    if n == 1:
        return EigenPairs(dense[0].copy(), np.ones((1, 1)), 0.0)
    m = n + (n % 2)
    a = np.zeros((m, m))
    a[:n, :n] = dense
    fro = np.linalg.norm(a)
    target = tol * max(fro, EPS)
    skip = EPS * 1e-3 * max(fro, EPS)
    arrangements = _round_robin(m)
    perms = _transition_perms(arrangements)
    start = arrangements[0]
    a = np.ascontiguousarray(a[start][:, start])
    w = np.ascontiguousarray(np.eye(m)[:, start])  # columns: current basis
    even, odd = np.arange(0, m, 2), np.arange(1, m, 2)
    for _sweep in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for perm in perms:
            apq = a[even, odd]
            live = np.abs(apq) > skip
            if live.any():
                d = np.diag(a)
                safe = np.where(live, apq, 1.0)
                tau = (d[1::2] - d[0::2]) / (2.0 * safe)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                rot = c + 1j * (t * c)
                # Adjacent columns (2i, 2i+1) read as one complex column, so the
                # plane rotation is a complex multiply.  Rows follow by
                # symmetry: J^T A J = (J^T (A J)^T ... ) rotated columnwise twice.
                a.view(np.complex128)[...] *= rot
                a = np.ascontiguousarray(a.T)
                a.view(np.complex128)[...] *= rot
                a[even[live], odd[live]] = 0.0
                a[odd[live], even[live]] = 0.0
                w.view(np.complex128)[...] *= rot
            a = a.take(perm, axis=0).take(perm, axis=1)
            w = w.take(perm, axis=1)
        a = 0.5 * (a + a.T)
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    values = np.diag(a).copy()
    if m != n:
        # The padded index has a zero row, so no rotation ever touches it.
        keep = w[n, :] != 1.0
        values, w = values[keep], w[:, keep]
    vectors = w[:n, :].copy()
    lead = np.array([_lead_index(vectors[:, j]) for j in range(n)])
    vectors = vectors * np.sign(vectors[lead, np.arange(n)])
    order = np.lexsort((lead, values))
    values, vectors = values[order], vectors[:, order]
    res = residuals(dense, EigenPairs(values, vectors))
    return EigenPairs(values, vectors, float(res.max() / max(np.abs(dense).sum(1).max(), EPS)))


# ---------------------------------------------------------------------------
# Eigen-expansion calculus
# ---------------------------------------------------------------------------


def resolvent_apply(pairs: EigenPairs, lam: float, f: np.ndarray) -> np.ndarray:
    """``sum_j (gamma_j - lam)^{-1} <f, u_j> u_j``.

    Raises
    ------
    DomainError
        If ``lam`` coincides (to 1e-12 relative) with an eigenvalue.
    """
    gaps = pairs.values - lam
    scale = max(1.0, abs(lam), float(np.abs(pairs.values).max()))
    if np.min(np.abs(gaps)) <= 1e-12 * scale:
        raise DomainError(f"lambda = {lam} is an eigenvalue; the resolvent is undefined")
    return pairs.vectors @ (pairs.coefficients(f) / gaps)


def evolve(pairs: EigenPairs, initial: np.ndarray, t: float, kind: str = "heat",
           velocity: np.ndarray | None = None) -> np.ndarray:
    """Propagate ``initial`` for time ``t`` mode by mode.

    ``heat``: ``exp(-gamma t)``.  ``wave``: ``cos(sqrt(gamma) t)`` on the
    displacement plus ``sin(sqrt(gamma) t)/sqrt(gamma)`` on ``velocity``
    (all eigenvalues must be positive).  ``schrodinger``: ``exp(-i gamma t)``,
    the solution of ``i u_t = A u``.
    """
    c = pairs.coefficients(initial)
    g = pairs.values
    if kind == "heat":
        if t < 0:
            raise DomainError("the heat semigroup runs forward in time only")
        return pairs.vectors @ (np.exp(-g * t) * c)
    if kind == "wave":
        if np.any(g <= 0):
            raise DomainError("wave evolution needs every eigenvalue positive")
        w = np.sqrt(g)
        out = np.cos(w * t) * c
        if velocity is not None:
            out = out + np.sin(w * t) / w * pairs.coefficients(velocity)
        return pairs.vectors @ out
    if kind == "schrodinger":
        return pairs.vectors @ (np.exp(-1j * g * t) * c)
    raise DomainError(f"unknown evolution kind {kind!r}")


def wave_velocity(pairs: EigenPairs, initial: np.ndarray, velocity: np.ndarray, t: float) -> np.ndarray:
    """Time derivative of the wave evolution at ``t``."""
    w = np.sqrt(pairs.values)
    c, cv = pairs.coefficients(initial), pairs.coefficients(velocity)
    return pairs.vectors @ (-w * np.sin(w * t) * c + np.cos(w * t) * cv)


__all__ = [
    "DenseSymmetric",
    "EigenPairs",
    "SymTridiagonal",
    "bisect_eigenvalues",
    "dense_eigen",
    "evolve",
    "resolvent_apply",
    "residuals",
    "sturm_count",
    "tridiag_eigen",
    "wave_velocity",
]
