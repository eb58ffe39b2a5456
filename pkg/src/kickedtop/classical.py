"""Semiclassical kicked-top map on the unit sphere and chaos diagnostics.

The map rotates (X, Y, Z) about z by alpha and then twists about y by an
angle proportional to the rotated Y component.  Lyapunov exponents use the
Benettin scheme: propagate one tangent vector through the analytic Jacobian,
project out the radial direction, renormalize every step, and average the
log stretch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "ClassicalPoint",
    "LyapunovEstimate",
    "map_step",
    "jacobian",
    "lyapunov",
    "phase_portrait",
    "sphere_grid",
    "orbit",
    "angular_dispersion",
    "is_regular_orbit",
]


@dataclass(frozen=True)
class ClassicalPoint:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def theta_phi(self) -> tuple[float, float]:
        return float(np.arccos(np.clip(self.z, -1.0, 1.0))), float(np.arctan2(self.y, self.x))


@dataclass(frozen=True)
class LyapunovEstimate:
    kappa: float
    alpha: float
    lambda_mean: float
    n_trajectories: int
    n_steps: int
    seed: int
    per_trajectory: np.ndarray | None = None


def _map_arrays(x, y, z, kappa, alpha):
    """Vectorized map; operands may be scalars or equal-shape arrays."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    u = x * ca - y * sa
    v = x * sa + y * ca
    arg = kappa * v
    cv, sv = np.cos(arg), np.sin(arg)
    xn = u * cv + z * sv
    yn = v
    zn = -u * sv + z * cv
    nrm = np.sqrt(xn * xn + yn * yn + zn * zn)
    return xn / nrm, yn / nrm, zn / nrm


def map_step(p: ClassicalPoint, kappa: float, alpha: float) -> ClassicalPoint:
    """One period of the classical map, renormalized onto the sphere."""
    x, y, z = _map_arrays(p.x, p.y, p.z, kappa, alpha)
    return ClassicalPoint(float(x), float(y), float(z))


def jacobian(p: ClassicalPoint, kappa: float, alpha: float) -> np.ndarray:
    """Analytic 3x3 derivative of the (unnormalized) map at ``p``."""
    return _jacobian_arrays(np.array([p.x]), np.array([p.y]), np.array([p.z]),
                            kappa, alpha)[0]


def _jacobian_arrays(x, y, z, kappa, alpha):
    """Batched Jacobians, shape (n, 3, 3)."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    u = x * ca - y * sa
    v = x * sa + y * ca
    arg = kappa * v
    cv, sv = np.cos(arg), np.sin(arg)
    xn = u * cv + z * sv        # new X (unnormalized)
    zn = -u * sv + z * cv       # new Z
    jac = np.empty(x.shape + (3, 3))
    jac[..., 0, 0] = ca * cv + kappa * sa * zn
    jac[..., 0, 1] = -sa * cv + kappa * ca * zn
    jac[..., 0, 2] = sv
    jac[..., 1, 0] = sa
    jac[..., 1, 1] = ca
    jac[..., 1, 2] = 0.0
    jac[..., 2, 0] = -ca * sv - kappa * sa * xn
    jac[..., 2, 1] = sa * sv - kappa * ca * xn
    jac[..., 2, 2] = cv
    return jac


def _seed_points(seed: int, n_traj: int):
    """Uniform area-measure samples plus unit tangent vectors, one Philox
    stream per trajectory so parallel and serial runs agree bitwise."""
    x = np.empty(n_traj)
    y = np.empty(n_traj)
    z = np.empty(n_traj)
    w = np.empty((n_traj, 3))
    for i in range(n_traj):
        rng = np.random.Generator(np.random.Philox(key=[seed, i]))
        zi = rng.uniform(-1.0, 1.0)
        phi = rng.uniform(0.0, 2.0 * np.pi)
        s = np.sqrt(1.0 - zi * zi)
        x[i], y[i], z[i] = s * np.cos(phi), s * np.sin(phi), zi
        vec = rng.standard_normal(3)
        vec -= (vec @ np.array([x[i], y[i], z[i]])) * np.array([x[i], y[i], z[i]])
        w[i] = vec / np.linalg.norm(vec)
    return x, y, z, w


def lyapunov(kappa: float, alpha: float, n_traj: int, n_steps: int,
             seed: int, keep_per_trajectory: bool = False) -> LyapunovEstimate:
    """Phase-space averaged largest Lyapunov exponent (per period)."""
    if n_traj < 1 or n_steps < 1:
        raise ValueError("n_traj and n_steps must be >= 1")
    x, y, z, w = _seed_points(seed, n_traj)
    log_stretch = np.zeros(n_traj)
    for _ in range(n_steps):
        jac = _jacobian_arrays(x, y, z, kappa, alpha)
        w = np.einsum("nij,nj->ni", jac, w)
        x, y, z = _map_arrays(x, y, z, kappa, alpha)
        pos = np.stack((x, y, z), axis=1)
        w -= np.sum(w * pos, axis=1, keepdims=True) * pos  # kill radial component
        norms = np.linalg.norm(w, axis=1)
        log_stretch += np.log(norms)
        w /= norms[:, None]
    local = log_stretch / n_steps
    return LyapunovEstimate(kappa=float(kappa), alpha=float(alpha),
                            lambda_mean=float(np.mean(local)),
                            n_trajectories=n_traj, n_steps=n_steps, seed=seed,
                            per_trajectory=local if keep_per_trajectory else None)


def orbit(p0: ClassicalPoint, kappa: float, alpha: float, n_steps: int) -> np.ndarray:
    """Trajectory including the seed, shape (n_steps + 1, 3)."""
    out = np.empty((n_steps + 1, 3))
    x, y, z = p0.x, p0.y, p0.z
    out[0] = (x, y, z)
    for i in range(1, n_steps + 1):
        x, y, z = _map_arrays(x, y, z, kappa, alpha)
        out[i] = (x, y, z)
    return out


def phase_portrait(kappa: float, alpha: float, grid: Sequence[ClassicalPoint],
                   n_steps: int) -> np.ndarray:
    """Orbits of all seeds in (theta, phi, orbit_id) rows for plotting.

    Seeds advance in lock-step as one vectorized batch; rows are grouped by
    orbit and ordered by time within each group.
    """
    seeds = np.array([[p.x, p.y, p.z] for p in grid])
    n_orbits = len(seeds)
    traj = np.empty((n_steps + 1, n_orbits, 3))
    x, y, z = seeds[:, 0].copy(), seeds[:, 1].copy(), seeds[:, 2].copy()
    traj[0] = np.stack((x, y, z), axis=1)
    for i in range(1, n_steps + 1):
        x, y, z = _map_arrays(x, y, z, kappa, alpha)
        traj[i] = np.stack((x, y, z), axis=1)
    theta = np.arccos(np.clip(traj[..., 2], -1.0, 1.0))
    phi = np.arctan2(traj[..., 1], traj[..., 0])
    rows = np.empty((n_orbits * (n_steps + 1), 3))
    for oid in range(n_orbits):
        block = slice(oid * (n_steps + 1), (oid + 1) * (n_steps + 1))
        rows[block, 0] = theta[:, oid]
        rows[block, 1] = phi[:, oid]
        rows[block, 2] = oid
    return rows


def sphere_grid(n_theta: int = 16, n_phi: int = 16) -> list[ClassicalPoint]:
    """Portrait seed grid, uniform in (cos theta, phi), poles excluded."""
    points = []
    for cz in np.linspace(-1.0, 1.0, n_theta + 2)[1:-1]:
        s = np.sqrt(1.0 - cz * cz)
        for phi in np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False):
            points.append(ClassicalPoint(s * np.cos(phi), s * np.sin(phi), cz))
    return points


def angular_dispersion(xyz: np.ndarray) -> float:
    """Mean angle between orbit points and their normalized centroid."""
    centroid = xyz.mean(axis=0)
    nrm = np.linalg.norm(centroid)
    if nrm == 0.0:
        return float(np.pi / 2)
    centroid = centroid / nrm
    cosines = np.clip(xyz @ centroid, -1.0, 1.0)
    return float(np.mean(np.arccos(cosines)))


def is_regular_orbit(p0: ClassicalPoint, kappa: float, alpha: float,
                     n_steps: int = 1000, threshold: float = 0.5,
                     max_period: int = 4) -> bool:
    """Operational island test: dispersion about the orbit centroid stays small.

    Islands come in period-q chains (q <= 4 for a quarter-turn rotation), so the
    orbit is subsampled at periods 1..max_period; a chain orbit collapses onto a
    single island for the right q while a chaotic orbit stays dispersed for all.
    """
    xyz = orbit(p0, kappa, alpha, n_steps)
    for period in range(1, max_period + 1):
        dispersion = max(angular_dispersion(xyz[offset::period])
                         for offset in range(period))
        if dispersion < threshold:
            return True
    return False
