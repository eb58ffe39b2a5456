"""Closed-form partial trace of a symmetric pure state onto an accessible block.

A Dicke state of N qubits splits over a (Q, N-Q) bipartition with
hypergeometric weights w(l, r) = sqrt(C(Q,l) C(N-Q,r) / C(N,l+r)), so the
bipartite amplitude matrix of the global pure state is
A[l, r] = w(l, r) c_{l+r} and the reduced density matrix is rho = A A^H.
The same contraction with the derivative amplitudes gives d(rho)/d(alpha).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import NumericsError
from .spinops import DickeState

__all__ = ["ReducedDensity", "weight", "weight_table", "reduce_state",
           "EIGENVALUE_FLOOR", "HERMITICITY_TOL"]

EIGENVALUE_FLOOR = -1e-10   # eigenvalues below this indicate a bug, not rounding
HERMITICITY_TOL = 1e-12     # max allowed asymmetry before symmetrization


@dataclass(frozen=True)
class ReducedDensity:
    """Reduced state of the accessible block and its kick-angle derivative."""

    n_accessible: int
    rho: np.ndarray
    drho: np.ndarray

    def __post_init__(self):
        dim = self.n_accessible + 1
        if self.rho.shape != (dim, dim) or self.drho.shape != (dim, dim):
            raise ValueError("matrix shape does not match accessible block size")
        self.rho.setflags(write=False)
        self.drho.setflags(write=False)


def _log_binom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def weight(n_total: int, n_accessible: int, l: int, r: int) -> float:
    """Bipartition weight sqrt(C(Q,l) C(N-Q,r) / C(N,l+r)) via log-gamma."""
    q = n_accessible
    if not 0 < q <= n_total:
        raise ValueError(f"accessible block must satisfy 1 <= Q <= N, got Q={q}, N={n_total}")
    if not (0 <= l <= q and 0 <= r <= n_total - q):
        raise ValueError(f"indices out of range: l={l}, r={r} for N={n_total}, Q={q}")
    return float(np.exp(0.5 * (_log_binom(q, l) + _log_binom(n_total - q, r)
                               - _log_binom(n_total, l + r))))


@lru_cache(maxsize=64)
def weight_table(n_total: int, n_accessible: int) -> np.ndarray:
    """(Q+1, N-Q+1) table of bipartition weights, shared across all times."""
    q = n_accessible
    if not 0 < q <= n_total:
        raise ValueError(f"accessible block must satisfy 1 <= Q <= N, got Q={q}, N={n_total}")
    l = np.arange(q + 1, dtype=float)[:, None]
    r = np.arange(n_total - q + 1, dtype=float)[None, :]
    table = np.exp(0.5 * (_log_binom(float(q), l) + _log_binom(float(n_total - q), r)
                          - _log_binom(float(n_total), l + r)))
    table.setflags(write=False)
    return table


def reduce_state(state: DickeState, n_accessible: int) -> ReducedDensity:
    """Partial trace of ``state`` onto ``n_accessible`` qubits, with derivative."""
    n = state.basis.n_qubits
    q = n_accessible
    if not 0 < q <= n:
        raise ValueError(f"accessible block must satisfy 1 <= Q <= N, got Q={q}, N={n}")
    w = weight_table(n, q)
    idx = np.arange(q + 1)[:, None] + np.arange(n - q + 1)[None, :]
    a = w * state.c[idx]
    da = w * state.dc[idx]
    rho = a @ a.conj().T
    cross = da @ a.conj().T
    drho = cross + cross.conj().T  # exactly Hermitian entry by entry

    rho = _symmetrize(rho, "rho")
    drho = _symmetrize(drho, "drho")

    trace = float(np.real(np.trace(rho)))
    if abs(trace - 1.0) > 1e-10:
        raise NumericsError(f"reduced trace {trace} deviates from 1 beyond 1e-10")
    return ReducedDensity(n_accessible=q, rho=rho, drho=drho)


def _symmetrize(mat: np.ndarray, name: str) -> np.ndarray:
    deviation = float(np.abs(mat - mat.conj().T).max())
    if deviation >= HERMITICITY_TOL:
        raise NumericsError(f"{name} asymmetry {deviation:.3e} exceeds {HERMITICITY_TOL}")
    return (mat + mat.conj().T) / 2.0


def clip_spectrum(eigenvalues: np.ndarray) -> np.ndarray:
    """Zero out eigenvalues in [EIGENVALUE_FLOOR, 0) and renormalize the trace;
    anything below the floor aborts as a numerics bug."""
    low = float(eigenvalues.min())
    if low < EIGENVALUE_FLOOR:
        raise NumericsError(f"eigenvalue {low} below {EIGENVALUE_FLOOR}")
    clipped = np.where(eigenvalues < 0.0, 0.0, eigenvalues)
    total = clipped.sum()
    if total > 0.0:
        clipped = clipped / total
    return clipped
