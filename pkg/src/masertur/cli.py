"""Command-line interface: point, sweep, heatmap, montecarlo, verify.

Configuration comes from flags and/or a flat key-value config file (flags
win). Every JSON document embeds the resolved configuration, so re-running
on the embedded block reproduces the numerical payload exactly. Exit
codes: 0 success, 2 usage/config, 3 domain singularity, 4 numerical
failure, 5 verify-suite failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, kernels
from .bound import quantum_bound
from .counting import fano
from .errors import ConfigError, DomainError, NumericalError
from .explorer import AxisSpec, heatmap, McSpec, monte_carlo, sweep, SweepSpec
from .model import derived_rates, EngineParams, steady_state_closed_form
from .uncertainty import thermodynamic_uncertainty
from .verify import run_all

_PARAM_KEYS = {
    "gamma_u": float,
    "gamma_l": float,
    "n_u": float,
    "n_l": float,
    "epsilon": float,
    "delta": float,
}

_COMMON_KEYS = {**_PARAM_KEYS, "out": str, "format": str, "seed": int}

_COMMAND_KEYS = {
    "point": {},
    "sweep": {"axis": str, "from": float, "to": float, "points": int, "log": bool},
    "heatmap": {
        "eps_from": float,
        "eps_to": float,
        "eps_points": int,
        "eps_log": bool,
        "delta_from": float,
        "delta_to": float,
        "delta_points": int,
        "delta_log": bool,
    },
    "montecarlo": {
        "samples": int,
        "bin_width": float,
        "with_bound": bool,
        "workers": int,
        "hist_min": float,
        "hist_max": float,
    },
    "verify": {"samples": int, "oracle_points": int, "oracle_tolerance": float},
}

_DEFAULTS = {
    "gamma_u": 2.0,
    "gamma_l": 0.1,
    "n_u": 0.027,
    "n_l": 5.0,
    "epsilon": 0.15,
    "delta": 0.0,
    "seed": 0,
    "out": None,
    "point": {"format": "json"},
    "sweep": {
        "format": "csv",
        "axis": "epsilon",
        "from": 0.01,
        "to": 1.0,
        "points": 200,
        "log": False,
    },
    "heatmap": {
        "format": "csv",
        "eps_from": 0.01,
        "eps_to": 1.0,
        "eps_points": 40,
        "eps_log": True,
        "delta_from": -1.0,
        "delta_to": 1.0,
        "delta_points": 41,
        "delta_log": False,
    },
    "montecarlo": {
        "format": "json",
        "samples": 1_000_000,
        "bin_width": 0.01,
        "with_bound": False,
        "workers": 1,
        "hist_min": 0.0,
        "hist_max": 20.0,
    },
    "verify": {
        "format": "json",
        "samples": 100_000,
        "oracle_points": 100,
        "oracle_tolerance": 1e-6,
    },
}

_FORMATS = {
    "point": ("json",),
    "sweep": ("csv", "json"),
    "heatmap": ("csv", "json"),
    "montecarlo": ("json",),
    "verify": ("json",),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="masertur",
        description="Three-level maser engine: steady states, counting statistics, "
        "thermodynamic uncertainty and its quantum bound.",
    )
    parser.add_argument("--version", action="version", version=f"masertur {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--gamma-u", dest="gamma_u", type=float, default=None)
        p.add_argument("--gamma-l", dest="gamma_l", type=float, default=None)
        p.add_argument("--n-u", dest="n_u", type=float, default=None)
        p.add_argument("--n-l", dest="n_l", type=float, default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--delta", type=float, default=None)
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--config", default=None, help="flat key=value config file")

    p_point = sub.add_parser("point", help="full report at one parameter point")
    add_common(p_point)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter")
    add_common(p_sweep)
    p_sweep.add_argument("--axis", choices=kernels.PARAM_ORDER, default=None)
    p_sweep.add_argument("--from", dest="from_", type=float, default=None)
    p_sweep.add_argument("--to", type=float, default=None)
    p_sweep.add_argument("--points", type=int, default=None)
    p_sweep.add_argument("--log", action="store_const", const=True, default=None)

    p_heat = sub.add_parser("heatmap", help="drive-detuning maps of Q, Q_cl, coherence")
    add_common(p_heat)
    p_heat.add_argument("--eps-from", dest="eps_from", type=float, default=None)
    p_heat.add_argument("--eps-to", dest="eps_to", type=float, default=None)
    p_heat.add_argument("--eps-points", dest="eps_points", type=int, default=None)
    p_heat.add_argument(
        "--eps-log", dest="eps_log", action="store_const", const=True, default=None
    )
    p_heat.add_argument("--delta-from", dest="delta_from", type=float, default=None)
    p_heat.add_argument("--delta-to", dest="delta_to", type=float, default=None)
    p_heat.add_argument("--delta-points", dest="delta_points", type=int, default=None)
    p_heat.add_argument(
        "--delta-log", dest="delta_log", action="store_const", const=True, default=None
    )

    p_mc = sub.add_parser("montecarlo", help="Monte Carlo exploration of Q and Q_cl")
    add_common(p_mc)
    p_mc.add_argument("--samples", type=int, default=None)
    p_mc.add_argument("--bin-width", dest="bin_width", type=float, default=None)
    p_mc.add_argument(
        "--with-bound", dest="with_bound", action="store_const", const=True, default=None
    )
    p_mc.add_argument("--workers", type=int, default=None)
    p_mc.add_argument("--hist-min", dest="hist_min", type=float, default=None)
    p_mc.add_argument("--hist-max", dest="hist_max", type=float, default=None)

    p_verify = sub.add_parser("verify", help="run the release check suite")
    add_common(p_verify)
    p_verify.add_argument("--samples", type=int, default=None)
    p_verify.add_argument("--oracle-points", dest="oracle_points", type=int, default=None)
    p_verify.add_argument(
        "--oracle-tolerance", dest="oracle_tolerance", type=float, default=None
    )

    return parser


_BOOL_WORDS = {
    "true": True,
    "1": True,
    "yes": True,
    "on": True,
    "false": False,
    "0": False,
    "no": False,
    "off": False,
}


def _parse_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, 1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                if "=" not in text:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, _, value = text.partition("=")
                entries[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return entries


def _convert(key: str, raw: str, kind):
    if kind is bool:
        word = raw.lower()
        if word not in _BOOL_WORDS:
            raise ConfigError(f"config key {key}: expected a boolean, got {raw!r}")
        return _BOOL_WORDS[word]
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"config key {key}: {exc}") from exc


def resolve_config(command: str, cli_values: dict, config_path: str | None) -> dict:
    """Defaults, then config file, then explicit flags."""
    allowed = {**_COMMON_KEYS, **_COMMAND_KEYS[command]}
    resolved = {
        key: _DEFAULTS.get(command, {}).get(key, _DEFAULTS.get(key))
        for key in allowed
    }
    if config_path:
        for key, raw in _parse_config_file(config_path).items():
            if key not in allowed:
                raise ConfigError(f"unknown config key {key!r} for command {command}")
            resolved[key] = _convert(key, raw, allowed[key])
    for key, value in cli_values.items():
        if value is not None:
            resolved[key] = value
    if resolved["format"] not in _FORMATS[command]:
        raise ConfigError(
            f"format {resolved['format']!r} not supported by {command} "
            f"(choose from {_FORMATS[command]})"
        )
    return resolved


def _engine_params(config: dict) -> EngineParams:
    return EngineParams(**{key: config[key] for key in _PARAM_KEYS})


def _sanitize(value):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats become null."""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    return value


_EXECUTION_KEYS = ("out", "workers")  # affect how, not what, is computed


def _embedded_config(command: str, config: dict) -> dict:
    embed = {"command": command}
    embed.update({k: v for k, v in config.items() if k not in _EXECUTION_KEYS})
    return embed


def _provenance(config: dict, timestamp: bool = False) -> dict:
    block = {"artifact": "masertur", "version": __version__, "seed": config["seed"]}
    if timestamp:
        block["timestamp"] = datetime.now(timezone.utc).isoformat()
    return block


def _format_float(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(columns: list[str], rows: list[list], destination) -> None:
    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(
            [_format_float(v) if isinstance(v, float) or v is None else str(v) for v in row]
        )


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(document: dict, out: str | None) -> None:
    _emit(json.dumps(_sanitize(document), indent=2) + "\n", out)


def _run_point(config: dict) -> int:
    params = _engine_params(config)
    gamma_big, gamma_c = derived_rates(params)
    ss = steady_state_closed_form(params)
    cum = fano(params, "quantum")
    report = thermodynamic_uncertainty(params, "quantum")
    components = quantum_bound(params)
    document = {
        "command": "point",
        "config": _embedded_config("point", config),
        "params": {key: getattr(params, key) for key in _PARAM_KEYS},
        "derived": {"decoherence_rate": gamma_big, "classical_rate": gamma_c},
        "steady_state": {
            "rho_xx": ss.rho_xx,
            "rho_uu": ss.rho_uu,
            "rho_ll": ss.rho_ll,
            "rho_ul_re": ss.rho_ul_re,
            "rho_ul_im": ss.rho_ul_im,
        },
        "cumulants": {
            "mean": cum.mean,
            "variance": cum.variance,
            "fano": cum.fano,
            "fano_pop": cum.fano_pop,
            "fano_tr": cum.fano_tr,
        },
        "uncertainty": {
            "sigma": report.sigma,
            "q": report.q,
            "q_pop": report.q_pop,
            "q_tr": report.q_tr,
            "q_classical": report.q_classical,
            "advantage": report.advantage,
        },
        "bound": {
            "upsilon": components.upsilon,
            "psi": components.psi,
            "h_prime": components.h_prime,
            "bound": components.bound,
        },
        "provenance": _provenance(config, timestamp=True),
    }
    _emit_json(document, config["out"])
    return 0


_SWEEP_FIELDS = (
    "q", "q_cl", "bound", "mean", "variance", "sigma", "rho_ul_re", "rho_ul_im",
)


def _run_sweep(config: dict) -> int:
    spec = SweepSpec(
        base=_engine_params(config),
        axis=config["axis"],
        lo=config["from"],
        hi=config["to"],
        points=config["points"],
        scale="log" if config["log"] else "linear",
    )
    rows = sweep(spec)
    columns = [config["axis"], *_SWEEP_FIELDS, "error"]
    table = [
        [row.x, *(getattr(row, name) for name in _SWEEP_FIELDS), row.error or ""]
        for row in rows
    ]
    if config["format"] == "csv":
        buffer = io.StringIO()
        _write_csv(columns, table, buffer)
        _emit(buffer.getvalue(), config["out"])
    else:
        document = {
            "command": "sweep",
            "config": _embedded_config("sweep", config),
            "columns": columns,
            "rows": table,
            "provenance": _provenance(config),
        }
        _emit_json(document, config["out"])
    return 0


def _run_heatmap(config: dict) -> int:
    base = _engine_params(config)
    eps_axis = AxisSpec(
        config["eps_from"], config["eps_to"], config["eps_points"],
        "log" if config["eps_log"] else "linear",
    )
    delta_axis = AxisSpec(
        config["delta_from"], config["delta_to"], config["delta_points"],
        "log" if config["delta_log"] else "linear",
    )
    grid = heatmap(base, eps_axis, delta_axis)
    if config["format"] == "csv":
        columns = ["epsilon", "delta", "q", "q_cl", "rho_ul_abs", "rho_ul_im", "error"]
        table = []
        for i, dlt in enumerate(grid.delta_grid):
            for j, eps in enumerate(grid.eps_grid):
                table.append(
                    [
                        float(eps),
                        float(dlt),
                        float(grid.q[i, j]),
                        float(grid.q_cl[i, j]),
                        float(grid.rho_ul_abs[i, j]),
                        float(grid.rho_ul_im[i, j]),
                        grid.errors.get((i, j), ""),
                    ]
                )
        buffer = io.StringIO()
        _write_csv(columns, table, buffer)
        _emit(buffer.getvalue(), config["out"])
    else:
        document = {
            "command": "heatmap",
            "config": _embedded_config("heatmap", config),
            "eps_grid": grid.eps_grid.tolist(),
            "delta_grid": grid.delta_grid.tolist(),
            "q": grid.q.tolist(),
            "q_cl": grid.q_cl.tolist(),
            "rho_ul_abs": grid.rho_ul_abs.tolist(),
            "rho_ul_im": grid.rho_ul_im.tolist(),
            "errors": {f"{i},{j}": msg for (i, j), msg in sorted(grid.errors.items())},
            "provenance": _provenance(config),
        }
        _emit_json(document, config["out"])
    return 0


def _run_montecarlo(config: dict) -> int:
    spec = McSpec(
        samples=config["samples"],
        bin_width=config["bin_width"],
        seed=config["seed"],
        hist_range=(config["hist_min"], config["hist_max"]),
    )
    result = monte_carlo(spec, workers=config["workers"], with_bound=config["with_bound"])
    document = {
        "command": "montecarlo",
        "config": _embedded_config("montecarlo", config),
        "samples": result.samples,
        "excluded": result.excluded,
        "violation_stats": result.stats,
        "histogram_q": result.hist_q.to_dict(),
        "histogram_q_cl": result.hist_q_cl.to_dict(),
        "provenance": _provenance(config),
    }
    _emit_json(document, config["out"])
    return 0


def _run_verify(config: dict) -> int:
    results = run_all(
        seed=config["seed"],
        samples=config["samples"],
        oracle_points=config["oracle_points"],
        oracle_tolerance=config["oracle_tolerance"],
    )
    for check in results:
        status = "PASS" if check.passed else "FAIL"
        extra = f" {check.detail}" if check.detail else ""
        print(
            f"{status} {check.name}: worst={check.worst:.3e} "
            f"tol={check.tolerance:.3e} n={check.n}{extra}"
        )
    all_passed = all(check.passed for check in results)
    if config["out"]:
        document = {
            "command": "verify",
            "config": _embedded_config("verify", config),
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "worst": c.worst,
                    "tolerance": c.tolerance,
                    "n": c.n,
                    "detail": c.detail,
                }
                for c in results
            ],
            "passed": all_passed,
            "provenance": _provenance(config),
        }
        _emit_json(document, config["out"])
    return 0 if all_passed else 5


_RUNNERS = {
    "point": _run_point,
    "sweep": _run_sweep,
    "heatmap": _run_heatmap,
    "montecarlo": _run_montecarlo,
    "verify": _run_verify,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command
    cli_values = {
        key: getattr(args, "from_" if key == "from" else key)
        for key in {**_COMMON_KEYS, **_COMMAND_KEYS[command]}
    }
    try:
        config = resolve_config(command, cli_values, args.config)
        return _RUNNERS[command](config)
    except ConfigError as exc:
        print(f"masertur: config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"masertur: domain error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"masertur: numerical error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
