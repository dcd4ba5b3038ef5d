"""Experiment harness: seeded Monte Carlo sweeps emitting CSV tables.

Three subcommands cover the standard experiment set: `rate-sweep` (mean
achievable rate and fitting errors over a grid of weighting factors and SNRs),
`beampattern` (radiated power over an angle grid for one weighting factor),
and `convergence` (the objective trace of a single run).

Every trial draws its channel from seed base_seed + trial and its solver start
from seed base_seed + trial + 2**32, so results depend only on the config and
never on worker count or scheduling.  CSV artifacts are byte-reproducible;
wall-clock timing lives in a JSON sidecar next to each table.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import altmin, channel, metrics, ula

# keeps solver init streams disjoint from channel streams for any sane trial count
ALTMIN_SEED_OFFSET = 2**32


class ConfigError(ValueError):
    """Invalid experiment configuration or config file."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment, mirroring the JSON config schema.

    `total_power` defaults to the receive antenna count when omitted.
    `tolerance` is the relative stopping tolerance handed to the solver; the
    harness default is looser than the solver's own so runs at the default
    dimensions stop within tens of iterations.
    """

    n_tx: int = 120
    n_rx: int = 6
    n_streams: int = 6
    n_rf: int = 24
    n_paths: int = 10
    target_angles_deg: tuple[float, ...] = (-30.0, 0.0, 30.0)
    total_power: float | None = None
    eta_values: tuple[float, ...] = tuple(round(0.4 + 0.05 * i, 10) for i in range(13))
    snr_db_values: tuple[float, ...] = (0.0,)
    num_trials: int = 100
    base_seed: int = 12345
    tolerance: float = 1e-4
    max_iterations: int = 100
    beampattern_grid_deg: tuple[float, float, float] = (-90.0, 90.0, 0.5)

    def __post_init__(self) -> None:
        object.__setattr__(self, "target_angles_deg", tuple(float(a) for a in self.target_angles_deg))
        object.__setattr__(self, "eta_values", tuple(float(e) for e in self.eta_values))
        object.__setattr__(self, "snr_db_values", tuple(float(s) for s in self.snr_db_values))
        object.__setattr__(self, "beampattern_grid_deg", tuple(float(g) for g in self.beampattern_grid_deg))
        if self.total_power is None:
            object.__setattr__(self, "total_power", float(self.n_rx))
        else:
            object.__setattr__(self, "total_power", float(self.total_power))

    def validate(self) -> None:
        counts = {
            "n_tx": self.n_tx, "n_rx": self.n_rx, "n_streams": self.n_streams,
            "n_rf": self.n_rf, "n_paths": self.n_paths,
            "num_trials": self.num_trials, "max_iterations": self.max_iterations,
        }
        for name, value in counts.items():
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if len(self.target_angles_deg) == 0:
            raise ConfigError("target_angles_deg must not be empty")
        if any(not -90.0 <= a <= 90.0 for a in self.target_angles_deg):
            raise ConfigError("target_angles_deg entries must lie in [-90, 90]")
        if self.n_tx % self.n_rf != 0:
            raise ConfigError(f"n_tx ({self.n_tx}) must be divisible by n_rf ({self.n_rf})")
        if self.n_tx % len(self.target_angles_deg) != 0:
            raise ConfigError(
                f"n_tx ({self.n_tx}) must be divisible by the number of targets "
                f"({len(self.target_angles_deg)})"
            )
        if self.n_streams > min(self.n_tx, self.n_rx):
            raise ConfigError("n_streams must not exceed min(n_tx, n_rx)")
        if self.n_streams < len(self.target_angles_deg):
            raise ConfigError("n_streams must be at least the number of targets")
        if not self.total_power > 0:
            raise ConfigError("total_power must be positive")
        if len(self.eta_values) == 0 or any(not 0.0 <= e <= 1.0 for e in self.eta_values):
            raise ConfigError("eta_values must be a nonempty list of values in [0, 1]")
        if len(self.snr_db_values) == 0:
            raise ConfigError("snr_db_values must not be empty")
        if not isinstance(self.base_seed, int) or not 0 <= self.base_seed < 2**32:
            raise ConfigError("base_seed must fit in an unsigned 32-bit integer")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if len(self.beampattern_grid_deg) != 3:
            raise ConfigError("beampattern_grid_deg must be [start, stop, step]")
        start, stop, step = self.beampattern_grid_deg
        try:
            ula.angle_grid_deg(start, stop, step)
        except ValueError as exc:
            raise ConfigError(f"beampattern_grid_deg invalid: {exc}") from exc

    def to_dict(self) -> dict:
        doc = dataclasses.asdict(self)
        for key, value in doc.items():
            if isinstance(value, tuple):
                doc[key] = list(value)
        return doc


_INT_FIELDS = {"n_tx", "n_rx", "n_streams", "n_rf", "n_paths", "num_trials",
               "base_seed", "max_iterations"}
_SEQ_FIELDS = {"target_angles_deg", "eta_values", "snr_db_values", "beampattern_grid_deg"}


def config_from_dict(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
    kwargs = {}
    for name, value in doc.items():
        try:
            if name in _INT_FIELDS:
                if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                    raise ConfigError(f"{name} must be an integer, got {value!r}")
                kwargs[name] = int(value)
            elif name in _SEQ_FIELDS:
                kwargs[name] = tuple(float(x) for x in value)
            else:
                kwargs[name] = float(value) if value is not None else None
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config field {name} is malformed: {exc}") from exc
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(doc)


@dataclass(frozen=True)
class TrialDesign:
    """Everything produced for one (weighting factor, trial) pair."""

    channel: channel.ChannelRealization
    f_com: np.ndarray
    w_com: np.ndarray
    f_rad: np.ndarray
    report: altmin.AltMinReport


def design_trial(config: ExperimentConfig, eta: float, trial: int) -> TrialDesign:
    """Draw the trial's channel, build both targets, and run the alternating design."""
    params = channel.ChannelParams(
        num_tx=config.n_tx, num_rx=config.n_rx, num_paths=config.n_paths,
        rng_seed=config.base_seed + trial,
    )
    realization = channel.generate_channel(params)
    f_com, w_com = channel.optimal_digital_beamformers(
        realization.matrix, config.n_streams, config.total_power
    )
    scene = ula.TargetScene(
        tuple(math.radians(a) for a in config.target_angles_deg), config.n_tx
    )
    f_rad = ula.radar_beamformer(scene, config.total_power)
    alt_config = altmin.AltMinConfig(
        eta=eta, total_power=config.total_power, tolerance=config.tolerance,
        max_iterations=config.max_iterations,
        rng_seed=config.base_seed + trial + ALTMIN_SEED_OFFSET,
    )
    report = altmin.alternating_minimization(f_com, f_rad, config.n_rf, alt_config)
    return TrialDesign(channel=realization, f_com=f_com, w_com=w_com, f_rad=f_rad, report=report)


def _map_trials(worker, tasks, workers: int) -> list:
    if workers <= 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves task order, so reductions cannot depend on scheduling
        return list(pool.map(worker, tasks))


def _rate_trial(task) -> dict:
    config, trial = task
    rates = []
    comm_errs = []
    radar_errs = []
    iterations = []
    converged = []
    for eta in config.eta_values:
        try:
            design = design_trial(config, eta, trial)
            hybrid = design.report.hybrid.materialize()
            comm, radar, _ = metrics.fitting_errors(
                hybrid, design.f_com, design.f_rad @ design.report.unitary.matrix, eta
            )
            rates.append([
                metrics.achievable_rate(design.channel.matrix, hybrid, design.w_com, snr)
                for snr in config.snr_db_values
            ])
        except (altmin.SolverError, np.linalg.LinAlgError) as exc:
            raise altmin.SolverError(f"trial {trial} at eta={eta} failed: {exc}") from exc
        comm_errs.append(comm)
        radar_errs.append(radar)
        iterations.append(design.report.iterations_used)
        converged.append(design.report.converged)
    return {"rates": rates, "comm": comm_errs, "radar": radar_errs,
            "iterations": iterations, "converged": converged}


RATE_COLUMNS = ("eta", "snr_db", "mean_rate", "std_rate",
                "mean_comm_err", "mean_radar_err", "mean_iterations")


def run_rate_sweep(config: ExperimentConfig, workers: int = 1):
    """Monte Carlo rate sweep over (eta, snr) pairs.

    Returns (columns, rows, info): rows are sorted by (eta, snr_db) and carry
    the across-trial mean and sample standard deviation of the rate plus mean
    fitting errors and iteration counts.
    """
    tasks = [(config, trial) for trial in range(config.num_trials)]
    results = _map_trials(_rate_trial, tasks, workers)
    n = config.num_trials
    rates = np.array([r["rates"] for r in results])        # (trial, eta, snr)
    comm = np.array([r["comm"] for r in results])          # (trial, eta)
    radar = np.array([r["radar"] for r in results])
    iters = np.array([r["iterations"] for r in results], dtype=float)
    converged_runs = int(sum(sum(r["converged"]) for r in results))

    rows = []
    eta_order = sorted(range(len(config.eta_values)), key=lambda i: config.eta_values[i])
    snr_order = sorted(range(len(config.snr_db_values)), key=lambda i: config.snr_db_values[i])
    for i in eta_order:
        for j in snr_order:
            sample = rates[:, i, j]
            std = float(sample.std(ddof=1)) if n > 1 else 0.0
            rows.append((
                config.eta_values[i],
                config.snr_db_values[j],
                float(sample.mean()),
                std,
                float(comm[:, i].mean()),
                float(radar[:, i].mean()),
                float(iters[:, i].mean()),
            ))
    info = {"converged_runs": converged_runs, "total_runs": n * len(config.eta_values)}
    return RATE_COLUMNS, rows, info


def _beampattern_trial(task) -> dict:
    config, eta, trial = task
    try:
        design = design_trial(config, eta, trial)
    except (altmin.SolverError, np.linalg.LinAlgError) as exc:
        raise altmin.SolverError(f"trial {trial} at eta={eta} failed: {exc}") from exc
    covariance = ula.covariance_of(design.report.hybrid.materialize())
    return {"covariance": covariance, "converged": design.report.converged}


BEAMPATTERN_COLUMNS = ("angle_deg", "gain")


def run_beampattern(config: ExperimentConfig, eta: float,
                    average_trials: bool = False, workers: int = 1):
    """Beampattern of the designed transmit covariance on the configured grid.

    By default a single seeded run (trial 0); with `average_trials` the
    covariance is averaged over all `num_trials` trials before evaluating the
    pattern.  Returns (columns, rows, header, info).
    """
    trials = range(config.num_trials) if average_trials else range(1)
    tasks = [(config, eta, trial) for trial in trials]
    results = _map_trials(_beampattern_trial, tasks, workers)
    stacked = np.array([r["covariance"] for r in results])
    covariance = stacked.sum(axis=0) / len(results)
    grid = ula.angle_grid_deg(*config.beampattern_grid_deg)
    gains = ula.beampattern(covariance, ula.UlaConfig(config.n_tx), np.deg2rad(grid))
    rows = list(zip(grid.tolist(), gains.tolist()))
    header = {
        "command": "beampattern",
        "eta": format(eta, ".17g"),
        "base_seed": config.base_seed,
        "averaged_trials": len(results),
        "grid_deg": ":".join(format(g, ".17g") for g in config.beampattern_grid_deg),
    }
    info = {"converged_runs": int(sum(r["converged"] for r in results)),
            "total_runs": len(results)}
    return BEAMPATTERN_COLUMNS, rows, header, info


CONVERGENCE_COLUMNS = ("iteration", "objective")


def run_convergence(config: ExperimentConfig, eta: float):
    """Objective trace of a single seeded run (trial 0)."""
    try:
        design = design_trial(config, eta, 0)
    except (altmin.SolverError, np.linalg.LinAlgError) as exc:
        raise altmin.SolverError(f"trial 0 at eta={eta} failed: {exc}") from exc
    rows = [(k, value) for k, value in enumerate(design.report.objective_trace)]
    info = {"converged_runs": int(design.report.converged), "total_runs": 1,
            "iterations_used": design.report.iterations_used}
    return CONVERGENCE_COLUMNS, rows, info


def _format_cell(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path, columns, rows, header_meta: dict | None = None) -> None:
    """Write a CSV table with optional `# key=value` comment lines on top."""
    lines = []
    if header_meta:
        lines.extend(f"# {key}={value}" for key, value in header_meta.items())
    lines.append(",".join(columns))
    lines.extend(",".join(_format_cell(cell) for cell in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="")


def write_metadata(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                          encoding="ascii", newline="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfrcbeam",
        description="Monte Carlo experiments for joint radar-communication "
                    "hybrid beamforming",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp: argparse.ArgumentParser, with_eta: bool) -> None:
        sp.add_argument("--config", default=None, help="JSON config file")
        sp.add_argument("--out", required=True, help="output CSV path")
        sp.add_argument("--seed", type=int, default=None, help="override base_seed")
        sp.add_argument("--workers", type=int, default=1,
                        help="parallel trial workers (does not affect output)")
        if with_eta:
            sp.add_argument("--eta", type=float, required=True,
                            help="weighting factor in [0, 1]")

    add_common(sub.add_parser("rate-sweep", help="rate and error statistics over "
                              "the configured eta and SNR grids"), with_eta=False)
    beam = sub.add_parser("beampattern", help="transmit beampattern for one eta")
    add_common(beam, with_eta=True)
    beam.add_argument("--average-trials", action="store_true",
                      help="average the covariance over all trials instead of "
                           "using the first")
    add_common(sub.add_parser("convergence", help="objective trace of one run"),
               with_eta=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        config = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            if not 0 <= args.seed < 2**32:
                raise ConfigError("--seed must fit in an unsigned 32-bit integer")
            config = dataclasses.replace(config, base_seed=args.seed)
        config.validate()
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        eta = getattr(args, "eta", None)
        if eta is not None and not 0.0 <= eta <= 1.0:
            raise ConfigError("--eta must lie in [0, 1]")

        header = None
        if args.command == "rate-sweep":
            columns, rows, info = run_rate_sweep(config, workers=args.workers)
        elif args.command == "beampattern":
            columns, rows, header, info = run_beampattern(
                config, eta, average_trials=args.average_trials, workers=args.workers
            )
        else:
            columns, rows, info = run_convergence(config, eta)

        write_csv(args.out, columns, rows, header)
        meta = {
            "command": args.command,
            "config": config.to_dict(),
            "eta": eta,
            "workers": args.workers,
            "altmin_seed_offset": ALTMIN_SEED_OFFSET,
            "wall_time_s": time.monotonic() - started,
            **info,
        }
        write_metadata(f"{args.out}.meta.json", meta)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (altmin.SolverError, np.linalg.LinAlgError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
