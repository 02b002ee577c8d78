"""Command-line driver: ``randent <command> [flags]``.

Commands: ``quenched``, ``temporal``, ``haar-baseline``, ``geometry-check``
and ``analytic``.  Every flag may also come from a TOML or JSON file passed
with ``--config`` (keys are flag names with dashes turned into underscores);
flags given on the command line win.  Exit codes: 0 success, 2 invalid
input, 3 numeric failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geometry, output
from .ensemble import AVERAGING_MODES, EnsembleSeries, mixed_state_observable, parse_measure, pure_state_observable
from .errors import NumericError, ValidationError
from .quenched import (
    QuenchedEnsembleConfig,
    averaged_linear_entropy_analytic,
    averaged_rho_analytic,
    f_tau,
    psi_c,
    run_quenched_ensemble,
)
from .su4 import HaarSampler
from .temporal import (
    BELL,
    PhiState,
    TemporalEnsembleConfig,
    TemporalParams,
    averaged_rho_temporal_analytic,
    haar_pure_mean,
    run_temporal_ensemble,
    schmidt_diffusion_mean,
)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

COMMANDS = ("quenched", "temporal", "haar-baseline", "geometry-check", "analytic")
CURVES = ("quenched-L", "quenched-f", "temporal-mean", "temporal-L-bell", "temporal-L-unentangled")
SAMPLERS = ("euler-inverse-cdf", "ginibre-qr")

# Keys that steer execution or presentation only; they never reach the CSV echo.
_NOT_ECHOED = ("out", "svg", "threads", "no_timestamp", "config")

_COMMON = {
    "out": (str, None, True),
    "threads": (int, None, False),
    "no_timestamp": (bool, False, False),
}

# name -> (type, default, required)
PARAMS: dict[str, dict[str, tuple]] = {
    "quenched": {
        "seed": (int, None, True),
        "n": (int, None, True),
        "c": (float, 0.0, False),
        "measure": (str, "linear", False),
        "mode": (str, "average-of-entanglement", False),
        "tau_max": (float, 5.0, False),
        "tau_steps": (int, 100, False),
        "sigma": (float, 1.0, False),
        "svg": (str, None, False),
    },
    "temporal": {
        "seed": (int, None, True),
        "n": (int, None, True),
        "initial": (str, "unentangled", False),
        "measure": (str, "linear", False),
        "mode": (str, "average-of-entanglement", False),
        "D": (float, 0.5, False),
        "dt": (float, 1e-3, False),
        "t_max": (float, 0.6, False),
        "t_steps": (int, 60, False),
        "scaled": (bool, False, False),
        "svg": (str, None, False),
    },
    "haar-baseline": {
        "seed": (int, None, True),
        "n": (int, None, True),
        "sampler": (str, "euler-inverse-cdf", False),
        "measure": (str, "von-neumann,linear", False),
    },
    "geometry-check": {
        "seed": (int, None, True),
        "points": (int, 5, False),
        "h": (float, geometry.DEFAULT_STEP, False),
    },
    "analytic": {
        "curve": (str, None, True),
        "tau_max": (float, 5.0, False),
        "tau_steps": (int, 500, False),
        "initial": (str, "bell", False),
        "measure": (str, "von-neumann", False),
    },
}
for _table in PARAMS.values():
    _table.update(_COMMON)


@dataclass
class ExperimentSpec:
    command: str
    params: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.params[key]

    @property
    def echo(self) -> dict:
        body = {k: v for k, v in self.params.items() if k not in _NOT_ECHOED}
        return {"command": self.command, **body}


def _coerce(name: str, kind, value):
    if value is None:
        return None
    if kind is bool:
        if not isinstance(value, bool):
            raise ValidationError(f"{name} must be a boolean")
        return value
    if kind is int:
        if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
            raise ValidationError(f"{name} must be an integer")
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ValidationError(f"{name} must be an integer") from None
    if kind is float:
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ValidationError(f"{name} must be a number") from None
        if not np.isfinite(value):
            raise ValidationError(f"{name} must be finite")
        return value
    if not isinstance(value, str):
        raise ValidationError(f"{name} must be a string")
    return value


def load_config(path) -> dict:
    """Read a TOML or JSON config file (chosen by extension)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".toml":
        import tomli

        with open(path, "rb") as fh:
            try:
                data = tomli.load(fh)
            except tomli.TOMLDecodeError as exc:
                raise ValidationError(f"invalid TOML in {path}: {exc}") from None
    elif suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"invalid JSON in {path}: {exc}") from None
    else:
        raise ValidationError(f"config must be .toml or .json, got {path.name!r}")
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a table of keys")
    return data


def resolve_config(command: str, file_values: dict | None, flags: dict) -> ExperimentSpec:
    """Merge defaults, config-file values and flags (in rising precedence)."""
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r}")
    table = PARAMS[command]
    file_values = dict(file_values or {})
    file_command = file_values.pop("command", command)
    if file_command != command:
        raise ValidationError(f"config is for {file_command!r}, not {command!r}")
    unknown = sorted(set(file_values) - set(table))
    if unknown:
        raise ValidationError(f"unknown config keys for {command}: {', '.join(unknown)}")
    unknown = sorted(k for k, v in flags.items() if k not in table and v is not None)
    if unknown:
        raise ValidationError(f"unknown options for {command}: {', '.join(unknown)}")

    params = {}
    for name, (kind, default, required) in table.items():
        value = default
        if name in file_values:
            value = _coerce(name, kind, file_values[name])
        if flags.get(name) is not None:
            value = _coerce(name, kind, flags[name])
        if value is None and required:
            raise ValidationError(f"missing required setting {name!r}")
        params[name] = value
    spec = ExperimentSpec(command, params)
    _validate(spec)
    return spec


def _validate(spec: ExperimentSpec) -> None:
    p = spec.params
    if p.get("seed") is not None and p["seed"] < 0:
        raise ValidationError("seed must be non-negative")
    if p.get("threads") is not None and p["threads"] < 1:
        raise ValidationError("threads must be >= 1")
    for key in ("n", "points", "tau_steps", "t_steps"):
        if key in p and p[key] is not None and p[key] < 1:
            raise ValidationError(f"{key} must be >= 1")
    for key in ("tau_max", "t_max", "h", "sigma", "D", "dt"):
        if key in p and not p[key] > 0:
            raise ValidationError(f"{key} must be positive")
    if "mode" in p and p["mode"] not in AVERAGING_MODES:
        raise ValidationError(f"mode must be one of {', '.join(AVERAGING_MODES)}")
    if spec.command in ("quenched", "temporal", "analytic"):
        parse_measure(p["measure"])
    if spec.command == "haar-baseline":
        if p["sampler"] not in SAMPLERS:
            raise ValidationError(f"sampler must be one of {', '.join(SAMPLERS)}")
        for m in p["measure"].split(","):
            parse_measure(m.strip())
    if spec.command == "analytic" and p["curve"] not in CURVES:
        raise ValidationError(f"curve must be one of {', '.join(CURVES)}")
    if spec.command in ("temporal", "analytic"):
        parse_initial(p["initial"])
    if spec.command == "temporal":
        TemporalParams(p["D"], p["dt"])
        TemporalEnsembleConfig(1, _temporal_grid(p), TemporalParams(p["D"], p["dt"]), p["seed"])
    if spec.command == "geometry-check" and p["points"] < 5:
        raise ValidationError("geometry-check needs at least 5 points")


def parse_initial(text: str):
    """``bell``, ``unentangled``, ``phi:<angle>`` or ``c:<amplitude>``."""
    if text == "bell":
        return BELL
    if text == "unentangled":
        return np.array([0, 0, 0, 1], dtype=complex)
    kind, _, value = text.partition(":")
    try:
        x = float(value)
    except ValueError:
        raise ValidationError(f"cannot parse initial state {text!r}") from None
    if kind == "phi":
        return PhiState(x)
    if kind == "c":
        return psi_c(x)
    raise ValidationError(f"cannot parse initial state {text!r}")


def _grid(vmax: float, steps: int) -> np.ndarray:
    return np.linspace(0.0, vmax, steps + 1)


def _temporal_grid(p: dict) -> np.ndarray:
    # Snap to the dt lattice so the grid is exact multiples of the step.
    t = _grid(p["t_max"], p["t_steps"])
    k = np.rint(t / p["dt"])
    if np.any(np.abs(k * p["dt"] - t) > 1e-9 * np.maximum(1.0, t)):
        raise ValidationError("every grid time must be an integer multiple of dt")
    return k * p["dt"]


def _initial_rho(psi) -> np.ndarray:
    psi = psi.vector() if isinstance(psi, PhiState) else np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


# ---------------------------------------------------------------------------
# commands; each returns {path: text} plus an exit status


def _cmd_quenched(spec: ExperimentSpec):
    p = spec.params
    tau = _grid(p["tau_max"], p["tau_steps"])
    cfg = QuenchedEnsembleConfig(
        n_trajectories=p["n"],
        tau_grid=tau,
        master_seed=p["seed"],
        initial_c=p["c"],
        averaging_mode=p["mode"],
        measure=p["measure"],
        sigma=p["sigma"],
        threads=p["threads"],
    )
    series = run_quenched_ensemble(cfg)
    files = {p["out"]: output.series_csv(series, spec.echo, not p["no_timestamp"])}
    if p["svg"]:
        overlay = None
        if p["mode"] == "entanglement-of-average":
            overlay = mixed_state_observable(averaged_rho_analytic(_initial_rho(cfg.psi0), tau), cfg.measure)
        elif p["c"] == 0 and str(cfg.measure) == "linear":
            overlay = averaged_linear_entropy_analytic(tau)
        files[p["svg"]] = output.line_plot_svg(
            tau, series.mean, series.stderr, overlay, "tau", str(cfg.measure), f"quenched GUE, n={p['n']}"
        )
    return files, EXIT_OK


def _cmd_temporal(spec: ExperimentSpec):
    p = spec.params
    params = TemporalParams(p["D"], p["dt"])
    t = _temporal_grid(p)
    cfg = TemporalEnsembleConfig(
        n_trajectories=p["n"],
        t_grid=t,
        params=params,
        master_seed=p["seed"],
        initial=parse_initial(p["initial"]),
        averaging_mode=p["mode"],
        measure=p["measure"],
        threads=p["threads"],
    )
    series = run_temporal_ensemble(cfg)
    tau = params.to_tau(t)
    if p["scaled"]:
        series = EnsembleSeries(tau, series.mean, series.stderr, series.n, "tau", series.rho_mean, series.metadata)
    files = {p["out"]: output.series_csv(series, spec.echo, not p["no_timestamp"])}
    if p["svg"]:
        if p["mode"] == "entanglement-of-average":
            rho_t = averaged_rho_temporal_analytic(_initial_rho(cfg.psi0), params.D, t)
            overlay = mixed_state_observable(rho_t, cfg.measure)
        else:
            overlay = schmidt_diffusion_mean(cfg.measure, cfg.psi0, tau)
        files[p["svg"]] = output.line_plot_svg(
            series.grid,
            series.mean,
            series.stderr,
            overlay,
            series.grid_name,
            str(cfg.measure),
            f"Brownian SU(4), n={p['n']}",
        )
    return files, EXIT_OK


def _cmd_haar(spec: ExperimentSpec):
    p = spec.params
    sampler = HaarSampler(p["seed"], p["sampler"])
    measures = [parse_measure(m.strip()) for m in p["measure"].split(",")]
    sums = np.zeros(len(measures))
    sq = np.zeros(len(measures))
    done = 0
    while done < p["n"]:
        m = min(100_000, p["n"] - done)
        psi = sampler.state(m)
        for i, meas in enumerate(measures):
            x = pure_state_observable(psi, meas)
            sums[i] += x.sum()
            sq[i] += (x * x).sum()
        done += m
    n = p["n"]
    rows = []
    for i, meas in enumerate(measures):
        mean = sums[i] / n
        var = max(sq[i] / n - mean * mean, 0.0) * n / max(n - 1, 1)
        rows.append([str(meas), mean, np.sqrt(var / n), n, haar_pure_mean(meas)])
    comments = []
    if not p["no_timestamp"]:
        comments.append(output.timestamp())
    comments.append("spec " + json.dumps(spec.echo, sort_keys=True, separators=(",", ":")))
    text = output.table_csv(["measure", "mean", "stderr", "n", "exact"], rows, comments)
    return {p["out"]: text}, EXIT_OK


def _cmd_geometry(spec: ExperimentSpec):
    p = spec.params
    rng = np.random.default_rng(p["seed"])
    pts = geometry.sample_interior_points(p["points"], rng, p["h"])
    report = geometry.check_identities(pts, p["h"]).to_dict()
    ratio = geometry.density_ratio(pts, p["h"])
    report["density_ratio_spread"] = geometry.relative_spread(ratio)
    report["density_ratio_mean"] = float(ratio.mean())
    report["spec"] = spec.echo
    status = EXIT_OK if report["passed"] else EXIT_NUMERIC
    return {p["out"]: output.json_text(report)}, status


def _cmd_analytic(spec: ExperimentSpec):
    p = spec.params
    tau = _grid(p["tau_max"], p["tau_steps"])
    curve = p["curve"]
    if curve == "quenched-L":
        mean = averaged_linear_entropy_analytic(tau)
    elif curve == "quenched-f":
        mean = f_tau(tau)
    elif curve == "temporal-L-bell":
        mean = 0.2 + 0.3 * np.exp(-10 * tau)
    elif curve == "temporal-L-unentangled":
        mean = 0.2 - 0.2 * np.exp(-10 * tau)
    else:
        mean = schmidt_diffusion_mean(p["measure"], parse_initial(p["initial"]), tau)
    series = EnsembleSeries(tau, np.asarray(mean, dtype=float), np.zeros_like(tau), 0, "tau")
    return {p["out"]: output.series_csv(series, spec.echo, not p["no_timestamp"])}, EXIT_OK


_RUNNERS = {
    "quenched": _cmd_quenched,
    "temporal": _cmd_temporal,
    "haar-baseline": _cmd_haar,
    "geometry-check": _cmd_geometry,
    "analytic": _cmd_analytic,
}


def run(spec: ExperimentSpec) -> int:
    """Run a resolved spec; outputs are written only once everything is computed."""
    targets = [spec.params["out"]] + ([spec.params["svg"]] if spec.params.get("svg") else [])
    for t in targets:
        output.check_writable(t)
    files, status = _RUNNERS[spec.command](spec)
    for path, text in files.items():
        output.write_atomic(path, text)
    return status


# ---------------------------------------------------------------------------
# argument parsing


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "quenched": "time-independent GUE ensemble",
        "temporal": "fresh GUE Hamiltonian every step (unitary Brownian motion)",
        "haar-baseline": "entanglement of Haar-random pure states",
        "geometry-check": "numerical Laplacian identities on the SU(4) chart",
        "analytic": "closed-form curves, no randomness",
    }
    for command in COMMANDS:
        sp = sub.add_parser(command, help=helps[command])
        sp.add_argument("--config", help="TOML or JSON file with default settings")
        for name, (kind, default, required) in PARAMS[command].items():
            if kind is bool:
                sp.add_argument(_flag(name), dest=name, action="store_true", default=None)
            else:
                hint = "required" if required else f"default {default}"
                sp.add_argument(_flag(name), dest=name, type=kind, default=None, help=hint)
    return parser


def _error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config = args.pop("config")
    try:
        file_values = load_config(config) if config else None
        spec = resolve_config(command, file_values, args)
        return run(spec)
    except ValidationError as exc:
        _error("validation", str(exc))
        return EXIT_VALIDATION
    except NumericError as exc:
        _error("numeric", str(exc))
        return EXIT_NUMERIC
    except OSError as exc:
        _error("io", str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
