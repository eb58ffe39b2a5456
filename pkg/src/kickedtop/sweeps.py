"""Sweep orchestration: QFI-over-time sweeps, subsystem-size sweeps, classical runs.

One (kappa, initial state) evolution is serial; QFI evaluations across Q fan
out on a thread pool (LAPACK releases the GIL) and are written back in
canonical (t, Q) order, so output never depends on scheduling.  Tasks
checkpoint their evolution state and can resume to bit-identical rows.
"""

from __future__ import annotations

import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import default_time_grid, fit_power_law, slope_transition
from .classical import ClassicalPoint, lyapunov, phase_portrait, sphere_grid
from .config import LAMBDA_ANCHORS, ExperimentConfig, InitialState
from .errors import ConfigError
from .floquet import build_propagator, evolve, load_checkpoint, save_checkpoint
from .qfi import QfiRecord, fractional_qfi, mixed_qfi, pure_qfi
from .reduction import reduce_state
from .runio import CSV_COLUMNS, RowWriter, RunManifest, format_row, read_rows
from .spinops import SpinBasis, coherent_state

__all__ = ["run_qfi_sweep", "run_q_scaling", "run_classical", "reproduce",
           "characteristic_grid_times", "fit_rows", "FIGURE_IDS"]

log = logging.getLogger(__name__)

TRANSITION_SPLIT = 0.1
TRANSITIONS_HEADER = ("experiment_id,config_hash,kappa,label,t,split,"
                      "s_below,stderr_below,r2_below,n_below,"
                      "s_above,stderr_above,r2_above,n_above\n")
FITS_HEADER = ("experiment_id,config_hash,kappa,label,group,axis,"
               "window_lo,window_hi,exponent,stderr,r_squared,n_points\n")


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text)


def characteristic_grid_times(config: ExperimentConfig, kappa: float) -> list[int]:
    """Integer (t_E, t_H, late) for one chaoticity setting.

    The per-period Lyapunov exponent comes from the anchored values for the
    standard settings and from a pilot run otherwise.
    """
    j = config.n_qubits / 2.0
    lam = LAMBDA_ANCHORS.get(float(kappa))
    if lam is None:
        lam = lyapunov(kappa, config.alpha, 2000, 2000, seed=config.seed).lambda_mean
        if lam <= 0:
            raise ConfigError(f"kappa={kappa} is not chaotic; no Ehrenfest time")
    t_e = max(1, round(np.log(2.0 * j) / lam))
    t_h = max(1, round(j / 3.0))
    return sorted({t_e, t_h, config.t_max})


class _SweepContext:
    def __init__(self, config: ExperimentConfig, out_dir: Path, command: str,
                 threads: int = 1, resume: bool = False):
        self.config = config
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.checkpoint_dir = self.out_dir / "checkpoints"
        self.checkpoint_dir.mkdir(exist_ok=True)
        self.threads = max(1, threads)
        self.resume = resume
        self.config_hash = config.canonical_hash()
        self.manifest = RunManifest(config_hash=self.config_hash,
                                    code_version=__version__, command=command)

    def existing_keys(self, csv_path: Path) -> set:
        if not (self.resume and csv_path.exists()):
            return set()
        return {(r["experiment_id"], r["t"], r["Q"]) for r in read_rows(csv_path)}

    def save_manifest(self) -> None:
        self.manifest.save(self.out_dir / f"manifest_{self.manifest.command}.json")


def _qfi_task(ctx: _SweepContext, writer: RowWriter, existing: set,
              experiment_id: str, kappa: float, state: InitialState,
              times: list[int], q_values: list[int]) -> None:
    """Evolve one (kappa, state) pair and emit rows at each (t, Q)."""
    config = ctx.config
    n = config.n_qubits
    basis = SpinBasis(n)
    missing = [(t, q) for t in times for q in q_values
               if (experiment_id, t, q) not in existing]
    if not missing:
        ctx.manifest.task_status(experiment_id, "already-complete")
        return
    first_missing_t = min(t for t, _ in missing)

    prop = build_propagator(basis, kappa, config.alpha)
    initial = coherent_state(basis, state.theta, state.phi)
    ckpt_token = f"{ctx.config_hash}:{experiment_id}"
    ckpt_path = ctx.checkpoint_dir / (_safe_name(experiment_id) + ".npz")

    t0, start_state = 0, initial
    if ctx.resume and ckpt_path.exists():
        try:
            snap = load_checkpoint(ckpt_path, basis, ckpt_token)
            if snap.t <= first_missing_t:
                t0, start_state = snap.t, snap.state
                log.info("%s: resuming from checkpoint at t=%d", experiment_id, t0)
        except ValueError as exc:
            log.warning("%s: ignoring checkpoint (%s)", experiment_id, exc)

    sample_times = [t for t in times if t >= t0]
    ctx.manifest.task_status(experiment_id, "running")

    def q_row(snap_state, t, q, full_record):
        begin = time.perf_counter()
        if q == n:
            value = pure_qfi(snap_state)
        else:
            value = mixed_qfi(reduce_state(snap_state, q), config.spectral_tol)
        record = QfiRecord(kappa=kappa, alpha=config.alpha, n_qubits=n,
                           n_accessible=q, theta=state.theta, phi=state.phi,
                           t=t, qfi=value, label=state.label)
        frac = None if q == n else fractional_qfi(record, full_record)
        wall_ms = int(round(1000.0 * (time.perf_counter() - begin)))
        return format_row(experiment_id, ctx.config_hash, record, frac, wall_ms)

    with ThreadPoolExecutor(max_workers=ctx.threads) as pool:
        for index, snap in enumerate(evolve(prop, start_state, sample_times, t0=t0)):
            grid_index = times.index(snap.t)
            full_record = QfiRecord(kappa=kappa, alpha=config.alpha, n_qubits=n,
                                    n_accessible=n, theta=state.theta,
                                    phi=state.phi, t=snap.t,
                                    qfi=pure_qfi(snap.state), label=state.label)
            todo = [q for q in q_values if (experiment_id, snap.t, q) not in existing]
            if todo:
                lines = pool.map(lambda q: q_row(snap.state, snap.t, q, full_record), todo)
                for line in lines:
                    writer.write_line(line)
            if (grid_index + 1) % config.checkpoint_every == 0:
                save_checkpoint(ckpt_path, snap, ckpt_token)
    ctx.manifest.task_status(experiment_id, "done")


def run_qfi_sweep(config: ExperimentConfig, out_dir: str | Path,
                  threads: int = 1, resume: bool = False,
                  csv_name: str = "qfi_sweep.csv") -> Path:
    """QFI versus time for every (kappa, state, Q) in the config."""
    ctx = _SweepContext(config, Path(out_dir), "qfi-sweep", threads, resume)
    csv_path = ctx.out_dir / csv_name
    existing = ctx.existing_keys(csv_path)
    times = default_time_grid(config.t_max, config.dense_until)
    q_values = sorted(set(config.q_list))
    ctx.save_manifest()
    try:
        with RowWriter(csv_path) as writer:
            for kappa in config.kappas:
                for state in config.states:
                    experiment_id = f"qfi-sweep:k={kappa:g}:{state.label}"
                    _qfi_task(ctx, writer, existing, experiment_id, kappa,
                              state, times, q_values)
    finally:
        ctx.manifest.add_output(csv_path)
        ctx.manifest.finish()
        ctx.save_manifest()
    return csv_path


def run_q_scaling(config: ExperimentConfig, out_dir: str | Path,
                  threads: int = 1, resume: bool = False,
                  times_by_kappa: dict[float, list[int]] | None = None,
                  csv_name: str = "q_scaling.csv") -> Path:
    """QFI versus subsystem size at a few fixed times, plus slope transitions."""
    ctx = _SweepContext(config, Path(out_dir), "q-scaling", threads, resume)
    csv_path = ctx.out_dir / csv_name
    existing = ctx.existing_keys(csv_path)
    n = config.n_qubits
    q_values = sorted(set(range(1, config.q_scaling_max + 1, config.q_scaling_step))
                      | {config.q_scaling_max, n})
    ctx.save_manifest()
    try:
        with RowWriter(csv_path) as writer:
            for kappa in config.kappas:
                if times_by_kappa is not None:
                    times = sorted(times_by_kappa[kappa])
                else:
                    times = sorted(config.q_scaling_times)
                for state in config.states:
                    experiment_id = f"q-scaling:k={kappa:g}:{state.label}"
                    _qfi_task(ctx, writer, existing, experiment_id, kappa,
                              state, times, q_values)
        transitions = write_transitions(csv_path, ctx.out_dir / "q_scaling_transitions.csv")
        ctx.manifest.add_output(transitions)
    finally:
        ctx.manifest.add_output(csv_path)
        ctx.manifest.finish()
        ctx.save_manifest()
    return csv_path


def write_transitions(rows_csv: Path, out_csv: Path,
                      split: float = TRANSITION_SPLIT) -> Path:
    """Fractional-QFI slope transition per (kappa, label, t) group."""
    rows = read_rows(rows_csv)
    groups: dict = {}
    for row in rows:
        if row["qfi_fractional"] is None:
            continue
        key = (row["experiment_id"], row["config_hash"], row["kappa"],
               row["label"], row["t"], row["N"])
        groups.setdefault(key, []).append((row["Q"] / row["N"], row["qfi_fractional"]))
    with open(out_csv, "w") as fh:
        fh.write(TRANSITIONS_HEADER)
        for (exp_id, chash, kappa, label, t, _n), samples in sorted(groups.items()):
            try:
                below, above = slope_transition(samples, split)
            except ValueError as exc:
                log.info("slope transition skipped for %s t=%d: %s", label, t, exc)
                continue
            fh.write(f"{exp_id},{chash},{kappa!r},{label},{t},{split!r},"
                     f"{below.exponent!r},{below.stderr!r},{below.r_squared!r},{below.n_points},"
                     f"{above.exponent!r},{above.stderr!r},{above.r_squared!r},{above.n_points}\n")
    return out_csv


def fit_rows(rows: list[dict], axis: str, window: tuple[float, float]) -> list[dict]:
    """Power-law fits over grouped sweep rows.

    axis="time": QFI vs t, one group per (kappa, label, Q).
    axis="subsystem": QFI vs Q, one group per (kappa, label, t).
    """
    if axis not in ("time", "subsystem"):
        raise ValueError(f"axis must be 'time' or 'subsystem', got {axis!r}")
    groups: dict = {}
    for row in rows:
        if axis == "time":
            key = (row["experiment_id"], row["config_hash"], row["kappa"],
                   row["label"], row["Q"])
            sample = (row["t"], row["qfi"])
        else:
            key = (row["experiment_id"], row["config_hash"], row["kappa"],
                   row["label"], row["t"])
            sample = (row["Q"], row["qfi"])
        groups.setdefault(key, []).append(sample)
    results = []
    for (exp_id, chash, kappa, label, group), samples in sorted(groups.items()):
        try:
            fit = fit_power_law(samples, window, axis=axis)
        except ValueError as exc:
            log.info("fit skipped for %s %s=%s: %s", label, axis, group, exc)
            continue
        results.append({"experiment_id": exp_id, "config_hash": chash,
                        "kappa": kappa, "label": label, "group": group,
                        "fit": fit})
    return results


def write_fits(fits: list[dict], out_csv: Path) -> Path:
    with open(out_csv, "w") as fh:
        fh.write(FITS_HEADER)
        for item in fits:
            fit = item["fit"]
            fh.write(f"{item['experiment_id']},{item['config_hash']},"
                     f"{item['kappa']!r},{item['label']},{item['group']},{fit.axis},"
                     f"{fit.window[0]!r},{fit.window[1]!r},{fit.exponent!r},"
                     f"{fit.stderr!r},{fit.r_squared!r},{fit.n_points}\n")
    return out_csv


def run_classical(config: ExperimentConfig, out_dir: str | Path,
                  portraits: bool = True, lyapunov_sweep: bool = True) -> list[Path]:
    """Lyapunov sweep over the kappa grid plus phase portraits."""
    ctx = _SweepContext(config, Path(out_dir), "classical")
    outputs: list[Path] = []
    ctx.save_manifest()
    try:
        if lyapunov_sweep:
            path = ctx.out_dir / "lyapunov.csv"
            with open(path, "w") as fh:
                fh.write("experiment_id,config_hash,kappa,alpha,lambda_mean,"
                         "n_trajectories,n_steps,seed\n")
                for kappa in config.classical_kappas:
                    task = f"lyapunov:k={kappa:g}"
                    ctx.manifest.task_status(task, "running")
                    est = lyapunov(kappa, config.alpha, config.n_trajectories,
                                   config.n_lyapunov_steps, seed=config.seed)
                    fh.write(f"{task},{ctx.config_hash},{kappa!r},{config.alpha!r},"
                             f"{est.lambda_mean!r},{est.n_trajectories},"
                             f"{est.n_steps},{est.seed}\n")
                    ctx.manifest.task_status(task, "done")
            outputs.append(path)
        if portraits:
            grid = sphere_grid(*config.portrait_grid)
            for kappa in config.portrait_kappas:
                task = f"portrait:k={kappa:g}"
                ctx.manifest.task_status(task, "running")
                rows = phase_portrait(kappa, config.alpha, grid, config.portrait_steps)
                path = ctx.out_dir / f"portrait_k{kappa:g}.csv"
                with open(path, "w") as fh:
                    fh.write("theta,phi,orbit_id\n")
                    for theta, phi, oid in rows:
                        fh.write(f"{theta!r},{phi!r},{int(oid)}\n")
                outputs.append(path)
                ctx.manifest.task_status(task, "done")
    finally:
        for path in outputs:
            ctx.manifest.add_output(path)
        ctx.manifest.finish()
        ctx.save_manifest()
    return outputs


FIGURE_IDS = ("fig1b", "fig1c", "fig2", "fig3", "fig4", "figS2", "figS3")

MARKED_STATES = ("non-equatorial-island", "chaotic-sea", "edge")


def _select_states(config: ExperimentConfig, labels) -> tuple[InitialState, ...]:
    by_label = {s.label: s for s in config.states}
    missing = [l for l in labels if l not in by_label]
    if missing:
        raise ConfigError(f"config lacks states {missing}")
    return tuple(by_label[l] for l in labels)


def _scaled_q(config: ExperimentConfig, fractions) -> tuple[int, ...]:
    n = config.n_qubits
    qs = sorted({max(1, round(f * n)) for f in fractions})
    return tuple(qs)


def reproduce(figure_id: str, config: ExperimentConfig, out_dir: str | Path,
              threads: int = 1, resume: bool = False, render: bool = True) -> list[Path]:
    """Run the canned recipe behind one figure and emit plot-ready data.

    Data lands under ``out_dir/<figure_id>/``; alongside the delimited output a
    rendered PNG is written unless ``render`` is disabled.
    """
    if figure_id not in FIGURE_IDS:
        raise ConfigError(f"unknown figure id {figure_id!r}; expected one of {FIGURE_IDS}")
    from . import plots  # deferred: pulls in matplotlib

    fig_dir = Path(out_dir) / figure_id
    fig_dir.mkdir(parents=True, exist_ok=True)
    outputs: list[Path] = []
    from dataclasses import replace

    if figure_id == "fig1b":
        cfg = replace(config, portrait_kappas=())
        outputs += run_classical(cfg, fig_dir, portraits=False)
        if render:
            outputs.append(plots.render_lyapunov(fig_dir / "lyapunov.csv",
                                                 fig_dir / "fig1b.png"))
    elif figure_id == "fig1c":
        cfg = replace(config, portrait_kappas=(3.0, 30.0))
        outputs += run_classical(cfg, fig_dir, lyapunov_sweep=False)
        if render:
            outputs.append(plots.render_portraits(
                [fig_dir / f"portrait_k{k:g}.csv" for k in cfg.portrait_kappas],
                fig_dir / "fig1c.png"))
    elif figure_id in ("fig2", "figS2"):
        labels = MARKED_STATES if figure_id == "fig2" else [s.label for s in config.states]
        q_partial = _scaled_q(config, (0.005, 0.01, 0.025, 0.05, 0.1, 0.15, 0.25, 0.5))
        cfg = replace(config, kappas=(3.0,), states=_select_states(config, labels),
                      q_list=q_partial + (config.n_qubits,))
        csv_path = run_qfi_sweep(cfg, fig_dir, threads=threads, resume=resume)
        outputs.append(csv_path)
        t_h = max(1, round(config.n_qubits / 6.0))
        fits = fit_rows(read_rows(csv_path), "time", (t_h, min(config.t_max, 10**4)))
        outputs.append(write_fits(fits, fig_dir / "time_scaling_fits.csv"))
        if render:
            outputs.append(plots.render_qfi_vs_time(csv_path, fig_dir / f"{figure_id}.png"))
    elif figure_id == "fig3":
        cfg = replace(config, kappas=(30.0,),
                      states=_select_states(config, MARKED_STATES),
                      q_list=_scaled_q(config, (0.05, 0.1, 0.15)) + (config.n_qubits,))
        csv_path = run_qfi_sweep(cfg, fig_dir, threads=threads, resume=resume)
        outputs.append(csv_path)
        if render:
            outputs.append(plots.render_qfi_vs_time(csv_path, fig_dir / "fig3.png"))
    elif figure_id == "fig4":
        times = {k: characteristic_grid_times(config, k) for k in (3.0, 30.0)}
        cfg = replace(config, kappas=(3.0, 30.0),
                      states=_select_states(config, MARKED_STATES))
        csv_path = run_q_scaling(cfg, fig_dir, threads=threads, resume=resume,
                                 times_by_kappa=times)
        outputs.append(csv_path)
        outputs.append(fig_dir / "q_scaling_transitions.csv")
        if render:
            outputs.append(plots.render_fractional(csv_path, fig_dir / "fig4.png"))
    elif figure_id == "figS3":
        cfg = replace(config, kappas=(3.0,))
        csv_path = run_q_scaling(cfg, fig_dir, threads=threads, resume=resume)
        outputs.append(csv_path)
        lo = max(1.0, TRANSITION_SPLIT * config.n_qubits)
        fits = fit_rows(read_rows(csv_path), "subsystem", (lo, config.q_scaling_max))
        outputs.append(write_fits(fits, fig_dir / "q_scaling_fits.csv"))
        if render:
            outputs.append(plots.render_qfi_vs_q(csv_path, fig_dir / "figS3.png"))
    return outputs
