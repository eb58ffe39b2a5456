"""Experiment configuration: defaults, INI parsing, canonical hashing.

The file format is flat key-value with sections; unknown sections or keys are
rejected so typos fail fast.  Angles accept "pi" fractions like ``pi/2``.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError

__all__ = ["ExperimentConfig", "InitialState", "desk_config", "full_config",
           "load_config", "LAMBDA_ANCHORS"]

# Per-period Lyapunov exponents implied by the Ehrenfest-time anchors of the
# two standard chaoticity settings (ln(2j)/lambda = 35 and 3 at 2j = 1000).
LAMBDA_ANCHORS = {3.0: math.log(1000.0) / 35.0, 30.0: math.log(1000.0) / 3.0}

_PI_FORMS = re.compile(r"^\s*(?:(\d+(?:\.\d+)?)\s*\*\s*)?pi(?:\s*/\s*(\d+(?:\.\d+)?))?\s*$")


def parse_angle(text: str) -> float:
    """Parse a float, allowing pi forms: ``pi``, ``pi/2``, ``3*pi/4``."""
    m = _PI_FORMS.match(text)
    if m:
        value = math.pi
        if m.group(1):
            value *= float(m.group(1))
        if m.group(2):
            value /= float(m.group(2))
        return value
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


@dataclass(frozen=True)
class InitialState:
    theta: float
    phi: float
    label: str


@dataclass(frozen=True)
class ExperimentConfig:
    n_qubits: int = 100
    alpha: float = math.pi / 2
    kappas: tuple[float, ...] = (3.0, 30.0)
    states: tuple[InitialState, ...] = ()
    q_list: tuple[int, ...] = ()
    t_max: int = 4096
    dense_until: int = 64
    q_scaling_times: tuple[int, ...] = ()
    q_scaling_max: int = 90
    q_scaling_step: int = 1
    classical_kappas: tuple[float, ...] = (0.5, 1.0, 2.0, 2.5, 3.0, 6.0, 10.0, 30.0)
    portrait_kappas: tuple[float, ...] = (3.0, 30.0)
    n_trajectories: int = 2000
    n_lyapunov_steps: int = 5000
    portrait_steps: int = 500
    portrait_grid: tuple[int, int] = (16, 16)
    spectral_tol: float = 1e-12
    seed: int = 12345
    checkpoint_every: int = 8
    out_dir: str = "out"

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ConfigError("n_qubits must be >= 1")
        if any(q < 1 or q > self.n_qubits for q in self.q_list):
            raise ConfigError("every Q must satisfy 1 <= Q <= n_qubits")
        labels = [s.label for s in self.states]
        if len(labels) != len(set(labels)):
            raise ConfigError("state labels must be unique")
        if self.q_scaling_max > self.n_qubits:
            raise ConfigError("q_scaling_max exceeds n_qubits")
        if self.spectral_tol <= 0:
            raise ConfigError("spectral_tol must be positive")
        if self.t_max < 0 or self.dense_until < 0:
            raise ConfigError("time grid bounds must be nonnegative")

    def canonical_hash(self) -> str:
        """Stable 12-hex-digit digest of every resolved field."""
        parts = []
        for name in sorted(self.__dataclass_fields__):
            value = getattr(self, name)
            if name == "states":
                value = tuple((s.label, repr(s.theta), repr(s.phi)) for s in value)
            parts.append(f"{name}={value!r}")
        digest = hashlib.sha256(";".join(parts).encode()).hexdigest()
        return digest[:12]


DEFAULT_STATES = (
    InitialState(math.pi / 2, math.pi / 2, "equatorial"),
    InitialState(1.82, 1.54, "island"),
    InitialState(2.20, 2.44, "non-equatorial-island"),
    InitialState(2.46, 0.32, "chaotic-sea"),
    InitialState(2.56, 2.31, "edge"),
)


def desk_config(**overrides) -> ExperimentConfig:
    """Defaults sized for a desk run: N = 100, times to 2^12."""
    base = dict(
        n_qubits=100,
        states=DEFAULT_STATES,
        q_list=(5, 10, 25, 50, 90, 100),
        t_max=4096,
        q_scaling_times=(23, 17, 4096),
        q_scaling_max=90,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def full_config(**overrides) -> ExperimentConfig:
    """Paper-scale defaults: N = 1000, times to 2^15, long Lyapunov averages."""
    base = dict(
        n_qubits=1000,
        states=DEFAULT_STATES,
        q_list=(5, 10, 25, 50, 100, 150, 250, 500, 900, 1000),
        t_max=32768,
        q_scaling_times=(35, 167, 32768),
        q_scaling_max=900,
        n_trajectories=40000,
        n_lyapunov_steps=50000,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


_SCHEMA = {
    "system": {"n_qubits", "alpha", "kappas"},
    "states": None,  # free-form label = theta, phi
    "sweep": {"q_list", "t_max", "dense_until", "q_scaling_times",
              "q_scaling_max", "q_scaling_step"},
    "classical": {"kappa_grid", "portrait_kappas", "n_trajectories",
                  "n_steps", "portrait_steps", "portrait_grid"},
    "numerics": {"spectral_tol", "seed", "checkpoint_every"},
    "output": {"directory"},
}


def load_config(path: str | Path, full_scale: bool = False) -> ExperimentConfig:
    """Parse an INI file on top of the desk or paper-scale defaults."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not read:
        raise ConfigError(f"config file not found: {path}")

    overrides: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        allowed = _SCHEMA[section]
        for key, raw in parser.items(section):
            if allowed is not None and key not in allowed:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            _apply_option(overrides, section, key, raw)

    base = full_config if full_scale else desk_config
    try:
        return base(**overrides)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _apply_option(overrides: dict, section: str, key: str, raw: str) -> None:
    def ints(text):
        return tuple(int(x) for x in text.replace(",", " ").split())

    def floats(text):
        return tuple(parse_angle(x) for x in text.replace(",", " ").split())

    try:
        if section == "system":
            if key == "n_qubits":
                overrides["n_qubits"] = int(raw)
            elif key == "alpha":
                overrides["alpha"] = parse_angle(raw)
            elif key == "kappas":
                overrides["kappas"] = floats(raw)
        elif section == "states":
            pair = floats(raw)
            if len(pair) != 2:
                raise ConfigError(f"state {key!r} needs 'theta, phi', got {raw!r}")
            overrides.setdefault("states", ())
            overrides["states"] += (InitialState(pair[0], pair[1], key),)
        elif section == "sweep":
            if key == "q_list":
                overrides["q_list"] = ints(raw)
            elif key == "q_scaling_times":
                overrides["q_scaling_times"] = ints(raw)
            elif key == "portrait_grid":
                overrides["portrait_grid"] = ints(raw)
            else:
                overrides[{"t_max": "t_max", "dense_until": "dense_until",
                           "q_scaling_max": "q_scaling_max",
                           "q_scaling_step": "q_scaling_step"}[key]] = int(raw)
        elif section == "classical":
            if key == "kappa_grid":
                overrides["classical_kappas"] = floats(raw)
            elif key == "portrait_kappas":
                overrides["portrait_kappas"] = floats(raw)
            elif key == "portrait_grid":
                grid = ints(raw)
                if len(grid) != 2:
                    raise ConfigError("portrait_grid needs two integers")
                overrides["portrait_grid"] = grid
            else:
                overrides[{"n_trajectories": "n_trajectories",
                           "n_steps": "n_lyapunov_steps",
                           "portrait_steps": "portrait_steps"}[key]] = int(raw)
        elif section == "numerics":
            if key == "spectral_tol":
                overrides["spectral_tol"] = float(raw)
            else:
                overrides[{"seed": "seed", "checkpoint_every": "checkpoint_every"}[key]] = int(raw)
        elif section == "output":
            overrides["out_dir"] = raw
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad value for {key!r} in [{section}]: {raw!r}") from exc
