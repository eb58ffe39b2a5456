"""Kicked-top Floquet propagator and stroboscopic evolution.

One period applies a z-rotation by the kick angle alpha followed by the
one-axis twist exp(-i kappa/(2j) Jy^2); the kicking period is fixed to 1.
The state's derivative with respect to alpha is co-propagated exactly via
the product rule, so no finite differencing is needed in production.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import NumericsError
from .spinops import DickeState, SpinBasis, build_operator

__all__ = [
    "Propagator",
    "Snapshot",
    "build_propagator",
    "step",
    "evolve",
    "save_checkpoint",
    "load_checkpoint",
    "CHECKPOINT_FORMAT_VERSION",
]

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1
RENORM_EVERY = 1024  # periods between norm-drift checks
RENORM_ABORT = 1e-9  # larger drift indicates an instability, not rounding


@dataclass(frozen=True)
class Propagator:
    """One-period unitary U = twist @ rotation, with the rotation kept as phases."""

    basis: SpinBasis
    kappa: float
    alpha: float
    twist: np.ndarray              # dense exp(-i kappa/(2j) Jy^2)
    rotation_phases: np.ndarray    # exp(-i alpha (k - j)), k = 0..N
    matrix: np.ndarray             # twist @ diag(rotation_phases)

    def __post_init__(self):
        for arr in (self.twist, self.rotation_phases, self.matrix):
            arr.setflags(write=False)


@dataclass(frozen=True)
class Snapshot:
    t: int
    state: DickeState


def build_propagator(basis: SpinBasis, kappa: float, alpha: float = np.pi / 2) -> Propagator:
    """Assemble the one-period unitary from a single Jy eigendecomposition."""
    if kappa < 0:
        raise ValueError(f"kappa must be nonnegative, got {kappa}")
    jy = build_operator(basis, "Jy").matrix
    try:
        eigvals, eigvecs = np.linalg.eigh(jy)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericsError(f"Jy eigendecomposition failed: {exc}") from exc
    j = basis.n_qubits / 2.0
    twist_phases = np.exp(-1j * kappa / (2.0 * j) * eigvals**2)
    twist = (eigvecs * twist_phases) @ eigvecs.conj().T
    rotation = np.exp(-1j * alpha * basis.m_values())
    matrix = twist * rotation  # column scaling = twist @ diag(rotation)
    prop = Propagator(basis=basis, kappa=float(kappa), alpha=float(alpha),
                      twist=twist, rotation_phases=rotation, matrix=matrix)
    unitarity = np.abs(matrix.conj().T @ matrix - np.eye(basis.dim)).max()
    if unitarity > 1e-10:
        raise NumericsError(f"propagator not unitary: max |U^H U - 1| = {unitarity}")
    return prop


def step(prop: Propagator, snap: Snapshot) -> Snapshot:
    """Advance one period: c' = U c and dc' = U dc + T (-i Jz) R c."""
    state = snap.state
    if state.basis.dim != prop.basis.dim:
        raise ValueError("snapshot dimension does not match propagator")
    c, dc = _step_arrays(prop, state.c, state.dc)
    return Snapshot(t=snap.t + 1, state=DickeState(basis=prop.basis, c=c, dc=dc))


def _step_arrays(prop: Propagator, c: np.ndarray, dc: np.ndarray):
    r = prop.rotation_phases
    m = prop.basis.m_values()
    rc = r * c
    rdc = r * dc - 1j * (m * rc)
    stacked = prop.twist @ np.column_stack((rc, rdc))
    return stacked[:, 0], stacked[:, 1]


def evolve(prop: Propagator, initial: DickeState, sample_times: Sequence[int],
           t0: int = 0, checkpoint_cb=None) -> Iterator[Snapshot]:
    """Yield snapshots at the requested integer periods.

    Stepping is one period at a time; every RENORM_EVERY periods the norm is
    checked and renormalized (c and dc share the factor so their ratio, and
    hence the QFI, is untouched).  A drift beyond RENORM_ABORT aborts.

    ``t0`` is the period count already accumulated in ``initial`` (nonzero when
    resuming from a checkpoint); renormalization stays keyed to absolute time
    so a resumed run is bit-identical to an uninterrupted one.
    """
    times = list(sample_times)
    if any(t1 >= t2 for t1, t2 in zip(times, times[1:])) or (times and times[0] < t0):
        raise ValueError("sample_times must be strictly increasing and >= t0")
    if times and times[-1] > 2**32:
        raise ValueError("sample times beyond 2^32 periods are not supported")
    if initial.basis.dim != prop.basis.dim:
        raise ValueError("initial state dimension does not match propagator")

    c = initial.c.copy()
    dc = initial.dc.copy()
    t = t0
    for target in times:
        while t < target:
            c, dc = _step_arrays(prop, c, dc)
            t += 1
            if t % RENORM_EVERY == 0:
                nrm = np.linalg.norm(c)
                drift = abs(nrm - 1.0)
                if drift >= RENORM_ABORT:
                    raise NumericsError(f"norm drift {drift:.3e} at t={t} exceeds {RENORM_ABORT}")
                if drift > 0.0:
                    log.debug("renormalizing at t=%d, drift %.3e", t, drift)
                    c = c / nrm
                    dc = dc / nrm
        snap = Snapshot(t=t, state=DickeState(basis=prop.basis, c=c, dc=dc))
        if checkpoint_cb is not None:
            checkpoint_cb(snap)
        yield snap


def config_fingerprint(prop: Propagator, initial: DickeState) -> str:
    """Hash identifying (basis, kappa, alpha, initial amplitudes) for resume checks."""
    h = hashlib.sha256()
    h.update(f"{prop.basis.n_qubits}:{prop.kappa!r}:{prop.alpha!r}".encode())
    h.update(initial.c.tobytes())
    return h.hexdigest()[:16]


def save_checkpoint(path: str | Path, snap: Snapshot, config_hash: str) -> None:
    """Versioned dump of (t, c, dc, config hash); written atomically."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        np.savez(fh,
                 format_version=CHECKPOINT_FORMAT_VERSION,
                 t=snap.t,
                 c=snap.state.c,
                 dc=snap.state.dc,
                 config_hash=np.bytes_(config_hash.encode()))
    tmp.replace(path)


def load_checkpoint(path: str | Path, basis: SpinBasis, config_hash: str) -> Snapshot:
    """Load a checkpoint; resuming from it reproduces an uninterrupted run bit for bit."""
    with np.load(path) as data:
        version = int(data["format_version"])
        if version != CHECKPOINT_FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint format version {version}")
        stored_hash = bytes(data["config_hash"]).decode()
        if stored_hash != config_hash:
            raise ValueError("checkpoint belongs to a different configuration")
        snap = Snapshot(t=int(data["t"]),
                        state=DickeState(basis=basis, c=data["c"], dc=data["dc"]))
    return snap
