"""Quantum Fisher information for pure and reduced states.

The estimated parameter is the kick angle; states carry its derivative, so
the pure-state value is 4(<dc|dc> - |<dc|c>|^2) and the mixed-state value is
the spectral sum 2 sum_{nm} |<m|drho|n>|^2 / (p_n + p_m) restricted to pairs
with p_n + p_m above a small cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericsError
from .reduction import ReducedDensity, clip_spectrum
from .spinops import DickeState

__all__ = [
    "QfiRecord",
    "SpectralDecomposition",
    "pure_qfi",
    "spectral_decomposition",
    "mixed_qfi",
    "fractional_qfi",
    "DEFAULT_SPECTRAL_TOL",
]

DEFAULT_SPECTRAL_TOL = 1e-12  # cutoff on p_n + p_m (trace-normalized, so absolute)
RATIO_SLACK = 1e-6            # tolerated overshoot of partial/full above 1


@dataclass(frozen=True)
class QfiRecord:
    """One QFI sample; the unit of all swept output."""

    kappa: float
    alpha: float
    n_qubits: int
    n_accessible: int
    theta: float
    phi: float
    t: int
    qfi: float
    label: str = ""

    def __post_init__(self):
        if self.qfi < 0:
            raise ValueError(f"qfi must be nonnegative, got {self.qfi}")
        if self.n_accessible > self.n_qubits:
            raise ValueError("accessible block larger than the system")


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray   # descending, clipped, trace-renormalized
    eigenvectors: np.ndarray  # columns aligned with eigenvalues
    tolerance: float


def pure_qfi(state: DickeState) -> float:
    """QFI of a pure state from its co-propagated derivative."""
    if abs(np.linalg.norm(state.c) - 1.0) > 1e-10:
        raise ValueError("state must be normalized")
    dc = state.dc
    value = 4.0 * (float(np.real(np.vdot(dc, dc))) - float(abs(np.vdot(dc, state.c))) ** 2)
    if value < -1e-9:
        raise NumericsError(f"pure QFI {value} below rounding floor")
    return max(value, 0.0)


def spectral_decomposition(rd: ReducedDensity, tol: float = DEFAULT_SPECTRAL_TOL) -> SpectralDecomposition:
    """Eigendecomposition of rho with the negative-eigenvalue clip policy applied."""
    if tol <= 0:
        raise ValueError(f"spectral tolerance must be positive, got {tol}")
    try:
        eigvals, eigvecs = np.linalg.eigh(rd.rho)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericsError(f"eigendecomposition failed: {exc}") from exc
    eigvals = clip_spectrum(eigvals)
    order = np.argsort(eigvals)[::-1]
    return SpectralDecomposition(eigenvalues=eigvals[order],
                                 eigenvectors=eigvecs[:, order],
                                 tolerance=tol)


def mixed_qfi(rd: ReducedDensity, spectral_tol: float = DEFAULT_SPECTRAL_TOL) -> float:
    """QFI of a reduced state via the spectral sum over populated eigenpairs."""
    spec = spectral_decomposition(rd, spectral_tol)
    p = spec.eigenvalues
    v = spec.eigenvectors
    b = v.conj().T @ rd.drho @ v
    pair_sum = p[:, None] + p[None, :]
    mask = pair_sum > spectral_tol
    value = 2.0 * float(np.sum((np.abs(b) ** 2)[mask] / pair_sum[mask]))
    return max(value, 0.0)


def fractional_qfi(partial: QfiRecord, full: QfiRecord) -> float:
    """Ratio of partial-access to full-access QFI for the same run."""
    shared = ("kappa", "alpha", "n_qubits", "theta", "phi", "t")
    for name in shared:
        if getattr(partial, name) != getattr(full, name):
            raise ValueError(f"records disagree on {name}")
    if full.n_accessible != full.n_qubits:
        raise ValueError("full record must have access to the whole system")
    if partial.n_accessible > full.n_accessible:
        raise ValueError("partial record has more access than the full one")
    if full.qfi == 0.0:
        if partial.qfi > 0.0:
            raise ValueError("partial QFI positive while full QFI is zero")
        return 0.0
    ratio = partial.qfi / full.qfi
    if ratio > 1.0 + RATIO_SLACK:
        raise NumericsError(f"QFI ratio {ratio} violates monotonicity beyond {RATIO_SLACK}")
    return min(ratio, 1.0)
