"""Rayleigh quotients and checkable forms of the minimax principles.

Maxima and minima of the Rayleigh quotient over a subspace are computed
exactly by compressing the operator onto an orthonormal basis of that
subspace and diagonalizing the small matrix, which turns the minimax
statements into finite computations.  Comparison theorems return
:class:`Verdict` records that serialize to JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from spectra_lab.closed_form import (
    BoundaryCondition,
    interval_spectrum,
    rectangle_spectrum,
    robin,
)
from spectra_lab.discretization import laplacian_1d, laplacian_rectangle
from spectra_lab.errors import DomainError
from spectra_lab.linalg_eigen import as_matrix, dense_eigen, matvec, tridiag_eigen
from spectra_lab.weyl_asymptotics import union_spectrum

DIRICHLET = BoundaryCondition("dirichlet")
NEUMANN = BoundaryCondition("neumann")


def _gram_schmidt(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Raises DomainError when a column is (numerically) dependent on earlier ones.
    """
    q = np.array(vectors, dtype=float, copy=True)
    for i in range(q.shape[1]):
        norm0 = np.linalg.norm(q[:, i])
        if norm0 == 0:
            raise DomainError("trial basis contains a zero vector")
        q[:, i] /= norm0
        for _ in range(2):
            for k in range(i):
                q[:, i] -= (q[:, k] @ q[:, i]) * q[:, k]
        norm = np.linalg.norm(q[:, i])
        if norm < math.sqrt(tol):
            raise DomainError("trial basis is linearly dependent")
        q[:, i] /= norm
    return q


@dataclass(frozen=True)
class TrialSubspace:
    """Span of the columns of ``basis`` (stored orthonormalized)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        if b.shape[1] == 0:
            object.__setattr__(self, "basis", b)
            return
        normalized = b / np.linalg.norm(b, axis=0)
        if np.linalg.det(normalized.T @ normalized) <= 1e-12:
            raise DomainError("trial basis is degenerate (Gram determinant <= 1e-12)")
        object.__setattr__(self, "basis", _gram_schmidt(b))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def empty(cls, n: int) -> "TrialSubspace":
        return cls(np.zeros((n, 0)))


def rayleigh_quotient(A, f: np.ndarray) -> float:
    """``<Af, f> / <f, f>``."""
    f = np.asarray(f, dtype=float)
    ff = f @ f
    if ff == 0:
        raise DomainError("the Rayleigh quotient of the zero vector is undefined")
    return float(matvec(A, f) @ f / ff)


def _compress(A, Q: np.ndarray) -> np.ndarray:
    AQ = matvec(A, Q)
    P = Q.T @ AQ
    return 0.5 * (P + P.T)


def poincare_upper(A, S: TrialSubspace) -> float:
    """``max_{f in S} R(f)``, an upper bound for ``gamma_dim(S)``."""
    if S.dim == 0:
        raise DomainError("subspace must be nonempty")
    return float(dense_eigen(_compress(A, S.basis)).values[-1])


def complement_basis(S: TrialSubspace, n: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``S`` in ``R^n``."""
    if S.dim == 0:
        return np.eye(n)
    full, _ = np.linalg.qr(S.basis, mode="complete")
    return full[:, S.dim:]


def courant_probe(A, S: TrialSubspace) -> float:
    """``min_{f perp S} R(f)``, a lower bound for ``gamma_{dim(S)+1}``."""
    n = as_matrix(A).shape[0]
    C = complement_basis(S, n)
    return float(dense_eigen(_compress(A, C)).values[0])


def eigensum_bound(A, F: np.ndarray) -> float:
    """Sum of the Rayleigh quotients of pairwise orthogonal vectors.

    Bounds ``gamma_1 + ... + gamma_m`` from above for ``m`` columns.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    norms = np.linalg.norm(F, axis=0)
    if np.any(norms == 0):
        raise DomainError("vectors must be nonzero")
    G = (F.T @ F) / np.outer(norms, norms)
    off = G - np.diag(np.diag(G))
    if np.max(np.abs(off), initial=0.0) > 1e-10:
        raise DomainError("vectors are not pairwise orthogonal")
    return float(sum(rayleigh_quotient(A, F[:, i]) for i in range(F.shape[1])))


def minimize_rayleigh(A, f0: np.ndarray, max_sweeps: int = 20000, tol: float = 1e-15):
    """Gradient-free coordinate descent on the Rayleigh quotient.

    Each step minimizes ``R(f + t e_i)`` over ``t`` exactly: the stationary
    points solve ``(c e - b) t^2 + (c d - a) t + (b d - a e) = 0`` with
    ``a = <Af, f>``, ``b = (Af)_i``, ``c = A_ii``, ``d = <f, f>``, ``e = f_i``.

    Returns
    -------
    (f, q, sweeps) : tuple
        Normalized minimizer, its quotient and the sweeps used.
    """
    M = as_matrix(A)
    f = np.asarray(f0, dtype=float).copy()
    f /= np.linalg.norm(f)
    Af = M @ f
    q_prev = np.inf
    for sweep in range(1, max_sweeps + 1):
        for i in range(len(f)):
            a, b, c, d, e = f @ Af, Af[i], M[i, i], f @ f, f[i]
            qa, qb, qc = c * e - b, c * d - a, b * d - a * e
            if abs(qa) > 1e-300:
                disc = max(qb * qb - 4 * qa * qc, 0.0)
                roots = [(-qb + s * math.sqrt(disc)) / (2 * qa) for s in (1.0, -1.0)]
            elif abs(qb) > 1e-300:
                roots = [-qc / qb]
            else:
                roots = []
            best_t, best_q = 0.0, a / d
            for t in roots:
                den = d + 2 * e * t + t * t
                if den > 0:
                    qt = (a + 2 * b * t + c * t * t) / den
                    if qt < best_q:
                        best_t, best_q = t, qt
            if best_t:
                f[i] += best_t
                Af += best_t * M[:, i]
        scale = np.linalg.norm(f)
        f /= scale
        Af /= scale
        q = f @ Af
        if abs(q_prev - q) <= tol * max(1.0, abs(q)):
            return f, float(q), sweep
        q_prev = q
    return f, float(f @ Af), max_sweeps


# ---------------------------------------------------------------------------
# Comparison theorems
# ---------------------------------------------------------------------------


@dataclass
class Verdict:
    """Outcome of a comparison check; ``worst_margin < 0`` means it failed."""

    theorem: str
    parameters: dict
    j_range: list
    holds: bool
    worst_margin: float
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.holds = bool(self.holds)
        self.worst_margin = float(self.worst_margin)
        self.j_range = [int(j) for j in self.j_range]
        self.parameters = {k: list(v) if isinstance(v, tuple) else v
                           for k, v in self.parameters.items()}

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out.pop("details")
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _chain_margin(low: np.ndarray, mid: np.ndarray, high: np.ndarray) -> float:
    return float(min(np.min(mid - low), np.min(high - mid)))


def bc_comparison(dims: float | Sequence[float], sigma: float, n: int, j_max: int = 10) -> Verdict:
    """Neumann <= Robin <= Dirichlet, eigenvalue by eigenvalue, ``j <= j_max``.

    ``dims`` is a length (interval) or a pair ``(L, M)`` (rectangle, through
    sums of 1-d spectra).  All three finite-difference spectra use one
    cell-centred grid; the interval case also checks the closed forms.
    """
    if not sigma > 0:
        raise DomainError("the comparison is stated for sigma > 0")
    rb = robin(sigma)
    if np.ndim(dims) == 0:
        L = float(dims)
        fd = [tridiag_eigen(laplacian_1d(L, bc, n, grid="cell"), j_max).values
              for bc in (NEUMANN, rb, DIRICHLET)]
        exact = [interval_spectrum(L, bc, j_max).values for bc in (NEUMANN, rb, DIRICHLET)]
        margin = min(_chain_margin(*fd), _chain_margin(*exact))
        params = {"L": L, "sigma": sigma, "n": n, "domain": "interval"}
        details = {"fd": fd, "exact": exact}
    else:
        L, M = map(float, dims)
        fd = [laplacian_rectangle(L, M, bc, n, n, grid="cell").eigenvalues(j_max)
              for bc in (NEUMANN, rb, DIRICHLET)]
        margin = _chain_margin(*fd)
        params = {"L": L, "M": M, "sigma": sigma, "n": n, "domain": "rectangle"}
        details = {"fd": fd}
    return Verdict("neumann<=robin<=dirichlet", params, [1, j_max], margin >= -1e-10, margin, details)


# Thin rectangle laid along the diagonal of the unit square.  Rotated by 45
# degrees its extent along either axis is (0.9 + 0.1) * sqrt(2) / sqrt(2) = 1,
# so it just fits; its first nonzero Neumann eigenvalue is pi^2 / 1.62.
COUNTEREXAMPLE_RECT = (math.sqrt(2) * 0.9, math.sqrt(2) * 0.1)


def monotonicity_check(kind: str, params: dict | None = None, j_max: int = 50) -> Verdict:
    """Domain monotonicity checks on closed-form rectangle spectra.

    ``dirichlet_inclusion``
        ``params = {"outer": (L, M), "inner": (l, m)}``; expects
        ``lambda_j(outer) <= lambda_j(inner)``.
    ``neumann_partition``
        ``params = {"rect": (L, M)}``; the rectangle is cut in half along its
        first side and ``mu_j(halves) <= mu_j(rect)`` is expected.
    ``neumann_inclusion``
        The unit square against the thin rectangle inscribed along its
        diagonal; Neumann eigenvalues are *not* monotone under inclusion, and
        the verdict reports ``holds=False`` with the second eigenvalues.
    """
    params = dict(params or {})
    if kind == "dirichlet_inclusion":
        (L, M), (l, m) = params["outer"], params["inner"]
        if l > L or m > M:
            raise DomainError("inner rectangle does not fit inside the outer one")
        outer = rectangle_spectrum(L, M, DIRICHLET, j_max).values
        inner = rectangle_spectrum(l, m, DIRICHLET, j_max).values
        margin = float(np.min(inner - outer))
        return Verdict("dirichlet_inclusion", params, [1, j_max], margin >= -1e-12 * inner.max(),
                       margin, {"outer": outer, "inner": inner})
    if kind == "neumann_partition":
        L, M = params["rect"]
        whole = rectangle_spectrum(L, M, NEUMANN, j_max).values
        halves = union_spectrum([(L / 2, M), (L / 2, M)], NEUMANN, j_max)
        margin = float(np.min(whole - halves))
        return Verdict("neumann_partition", params, [1, j_max], margin >= -1e-12 * whole.max(),
                       margin, {"whole": whole, "parts": halves})
    if kind == "neumann_inclusion":
        side = params.setdefault("square", 1.0)
        rect = params.setdefault("inner", COUNTEREXAMPLE_RECT)
        mu = rectangle_spectrum(side, side, NEUMANN, 2).values
        mu_t = rectangle_spectrum(rect[0], rect[1], NEUMANN, 2).values
        # inclusion would predict mu_t[1] >= mu[1] if Neumann monotonicity held
        margin = float(mu_t[1] - mu[1])
        return Verdict("neumann_inclusion", {"square": side, "inner": list(rect)}, [2, 2],
                       margin >= 0, margin, {"mu2": mu[1], "mu2_inner": mu_t[1]})
    raise DomainError(f"unknown monotonicity check {kind!r}")


__all__ = [
    "COUNTEREXAMPLE_RECT",
    "TrialSubspace",
    "Verdict",
    "bc_comparison",
    "complement_basis",
    "courant_probe",
    "eigensum_bound",
    "minimize_rayleigh",
    "monotonicity_check",
    "poincare_upper",
    "rayleigh_quotient",
]
