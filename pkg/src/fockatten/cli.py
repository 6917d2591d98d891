"""Command-line front end: named scenarios emitting CSV/JSON artifacts.

Every run resolves its configuration (JSON file plus flag overrides plus
defaults), validates it before touching any physics, computes the full
scenario in memory, and only then writes the artifacts via temp-file
rename.  Identical configurations produce byte-identical outputs.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure
(truncation tail or herald probability checks).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .channels import (
    BeamSplitter,
    HeraldError,
    herald_noclick,
    herald_zero,
    inject,
    trace_out,
)
from .interferometer import (
    MziConfig,
    curve_csv,
    efficiency_csv,
    mzi_output,
    phase_sweep,
    visibility,
    visibility_vs_efficiency,
)
from .states import TruncationError, even_cat, smsv, tmsv
from .wigner import (
    PhaseSpaceGrid,
    fit_gaussian,
    fit_json_dict,
    negativity_volume,
    wigner_csv,
    wigner_mixed,
    wigner_pure,
)

import numpy as np

SCENARIOS = ("wigner", "cat-atten", "smsv-atten", "mzi-sweep", "eta-sweep")

SQRT_HALF = math.sqrt(0.5)

DEFAULT_ETAS = (0.0, 0.25, 0.5, 0.75, 1.0)

#: parameter keys each scenario accepts (anything else is rejected)
ALLOWED_PARAMS = {
    "wigner": {"alpha", "s", "xi", "cutoff"},
    "cat-atten": {"alpha", "keep", "mode", "eta", "cutoff"},
    "smsv-atten": {"s", "xi", "keep", "mode", "eta", "cutoff"},
    "mzi-sweep": {"xi", "keep", "mode", "eta", "samples", "cutoff"},
    "eta-sweep": {"xi", "keep", "samples", "etas", "cutoff"},
}

GRID_SCENARIOS = {"wigner", "cat-atten", "smsv-atten"}

ATTEN_MODES = ("ordinary", "heralded", "efficiency")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(_glue_grid_value(sys.argv[1:] if argv is None else argv))
    if args.command is None:
        parser.print_help()
        return 2
    try:
        config, diagnostics = _resolve(args)
    except ConfigFileError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.command == "validate":
        for line in diagnostics:
            print(line)
        return 0
    if diagnostics:
        for line in diagnostics:
            print(f"invalid config: {line}", file=sys.stderr)
        return 2
    try:
        files, results = _compute(config)
    except (TruncationError, HeraldError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    _write_outputs(Path(config["output"]), files, results, config)
    return 0


def entry() -> None:
    raise SystemExit(main())


class ConfigFileError(ValueError):
    pass


def _glue_grid_value(argv):
    """Join ``--grid -5:5:201`` into ``--grid=-5:5:201``.

    Grid minima are usually negative, and argparse would otherwise read
    the value as an unknown option flag.
    """
    out = []
    it = iter(argv)
    for token in it:
        if token == "--grid":
            value = next(it, None)
            out.append(token if value is None else f"--grid={value}")
        else:
            out.append(token)
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockatten",
        description="Attenuation of nonclassical optical states in a truncated number basis.",
    )
    sub = parser.add_subparsers(dest="command")
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        _add_scenario_flags(p)
    v = sub.add_parser("validate", help="report configuration problems without running")
    v.add_argument("scenario", nargs="?", choices=SCENARIOS, default=None)
    _add_scenario_flags(v)
    return parser


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--cutoff", type=int, help="photon-number cutoff")
    p.add_argument("--grid", help="phase-space grid as MIN:MAX:POINTS")
    p.add_argument("--alpha", type=float, help="even-cat amplitude")
    p.add_argument("--s", type=float, dest="s", help="squeeze ratio s (xi = ln sqrt(s))")
    p.add_argument("--xi", type=float, help="squeeze parameter xi")
    p.add_argument("--keep", type=float, help="kept amplitude of the attenuator")
    p.add_argument("--mode", choices=ATTEN_MODES, help="how the auxiliary mode is resolved")
    p.add_argument("--eta", type=float, help="detector efficiency (efficiency mode)")
    p.add_argument("--samples", type=int, help="number of phase samples")
    p.add_argument("--etas", help="comma-separated efficiency grid (eta-sweep)")


def _resolve(args) -> tuple:
    """Merge config file, flags, and defaults; return (config, diagnostics)."""
    doc = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigFileError(f"config file not found: {path}")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigFileError(f"config file is not valid JSON: {exc}")
        if not isinstance(doc, dict):
            raise ConfigFileError("config file must hold a JSON object")

    diagnostics = []
    unknown_top = set(doc) - {"scenario", "parameters", "output", "grid"}
    for key in sorted(unknown_top):
        diagnostics.append(f"unknown config key {key!r}")

    scenario = getattr(args, "scenario", None) or args.command
    if scenario == "validate":
        scenario = None
    file_scenario = doc.get("scenario")
    if scenario is None:
        scenario = file_scenario
    elif file_scenario is not None and file_scenario != scenario:
        diagnostics.append(
            f"config file names scenario {file_scenario!r} but {scenario!r} was requested"
        )
    if scenario not in SCENARIOS:
        diagnostics.append(f"unknown or missing scenario {scenario!r}")
        return {"scenario": scenario}, diagnostics

    params = doc.get("parameters", {})
    if not isinstance(params, dict):
        diagnostics.append("config 'parameters' must be an object")
        params = {}
    params = dict(params)
    for flag in ("cutoff", "alpha", "s", "xi", "keep", "mode", "eta", "samples"):
        value = getattr(args, flag, None)
        if value is not None:
            params[flag] = value
    if getattr(args, "etas", None) is not None:
        try:
            params["etas"] = [float(v) for v in str(args.etas).split(",") if v.strip()]
        except ValueError:
            diagnostics.append(f"could not parse --etas {args.etas!r} as comma-separated reals")

    output = args.out if args.out is not None else doc.get("output")
    grid_spec = doc.get("grid")
    if getattr(args, "grid", None) is not None:
        parts = str(args.grid).split(":")
        grid_spec = parts  # validated below

    config = {"scenario": scenario, "output": output, "parameters": params}
    # Tail checks are predicted here only for `validate`; a run lets the
    # constructors raise during compute so the failure maps to exit 3.
    validating = args.command == "validate"
    diagnostics += _validate_scenario(
        scenario, params, output, grid_spec, config,
        require_output=not validating, predict=validating,
    )
    return config, diagnostics


def _validate_scenario(
    scenario, params, output, grid_spec, config, require_output=True, predict=False
) -> list:
    problems = []
    allowed = ALLOWED_PARAMS[scenario]
    for key in sorted(set(params) - allowed):
        problems.append(f"parameter {key!r} is not used by scenario {scenario!r}")
    params = {k: v for k, v in params.items() if k in allowed}

    def number(key, default=None, low=None, high=None, integer=False):
        value = params.get(key, default)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            problems.append(f"{key} must be a number, got {value!r}")
            return None
        if integer and int(value) != value:
            problems.append(f"{key} must be an integer, got {value!r}")
            return None
        value = int(value) if integer else float(value)
        if low is not None and value < low:
            problems.append(f"{key} = {value} below minimum {low}")
            return None
        if high is not None and value > high:
            problems.append(f"{key} = {value} above maximum {high}")
            return None
        return value

    resolved = {}
    if scenario in ("wigner", "cat-atten", "smsv-atten"):
        resolved["cutoff"] = number("cutoff", default=20, low=2, integer=True)
    else:
        resolved["cutoff"] = number("cutoff", default=10, low=2, integer=True)

    if scenario == "wigner":
        given = [k for k in ("alpha", "s", "xi") if k in params]
        if len(given) > 1:
            problems.append(f"give exactly one of alpha / s / xi, got {given}")
        elif not given or given[0] == "alpha":
            resolved["family"] = "even-cat"
            resolved["alpha"] = number("alpha", default=2.0)
        else:
            resolved["family"] = "smsv"
            _resolve_squeeze(params, number, resolved, problems)
    elif scenario == "cat-atten":
        resolved["alpha"] = number("alpha", default=2.0)
        resolved["keep"] = number("keep", default=SQRT_HALF, low=0.0, high=1.0)
        _resolve_mode_eta(params, number, resolved, problems)
    elif scenario == "smsv-atten":
        if "s" in params and "xi" in params:
            problems.append("give either s or xi, not both")
        _resolve_squeeze(params, number, resolved, problems, default_s=3.0)
        resolved["keep"] = number("keep", default=SQRT_HALF, low=0.0, high=1.0)
        _resolve_mode_eta(params, number, resolved, problems)
    elif scenario == "mzi-sweep":
        resolved["xi"] = number("xi", default=0.5)
        resolved["keep"] = number("keep", default=SQRT_HALF, low=0.0, high=1.0)
        resolved["samples"] = number("samples", default=64, low=8, integer=True)
        _resolve_mode_eta(params, number, resolved, problems)
    elif scenario == "eta-sweep":
        resolved["xi"] = number("xi", default=0.5)
        resolved["keep"] = number("keep", default=SQRT_HALF, low=0.0, high=1.0)
        resolved["samples"] = number("samples", default=64, low=8, integer=True)
        etas = params.get("etas", list(DEFAULT_ETAS))
        if not isinstance(etas, (list, tuple)) or not etas:
            problems.append(f"etas must be a nonempty list of reals, got {etas!r}")
        else:
            clean = []
            for value in etas:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    problems.append(f"etas entry {value!r} is not a number")
                elif not 0.0 <= float(value) <= 1.0:
                    problems.append(f"etas entry {value} outside [0, 1]")
                else:
                    clean.append(float(value))
            resolved["etas"] = clean

    if scenario in GRID_SCENARIOS:
        resolved["grid"] = _validate_grid(grid_spec, problems)
    elif grid_spec is not None:
        problems.append(f"grid has no effect for scenario {scenario!r}")

    if output is None:
        if require_output:
            problems.append("no output directory (give --out or config 'output')")
    elif not isinstance(output, str) or not output:
        problems.append(f"output must be a nonempty path, got {output!r}")

    config["parameters"] = resolved
    if predict and not problems:
        problems += _predict_tail(scenario, resolved)
    return problems


def _resolve_squeeze(params, number, resolved, problems, default_s=None) -> None:
    if "xi" in params:
        xi = number("xi")
        if xi is not None:
            resolved["xi"] = xi
            resolved["s"] = math.exp(2.0 * xi)
    else:
        s = number("s", default=default_s, low=None)
        if s is not None:
            if s <= 0:
                problems.append(f"s must be positive, got {s}")
            else:
                resolved["s"] = s
                resolved["xi"] = 0.5 * math.log(s)


def _resolve_mode_eta(params, number, resolved, problems) -> None:
    mode = params.get("mode", "heralded")
    if mode not in ATTEN_MODES:
        problems.append(f"mode must be one of {ATTEN_MODES}, got {mode!r}")
        mode = None
    resolved["mode"] = mode
    eta = number("eta", low=0.0, high=1.0)
    if mode == "efficiency" and eta is None and "eta" not in params:
        problems.append("efficiency mode needs --eta in [0, 1]")
    if mode not in (None, "efficiency") and "eta" in params:
        problems.append(f"eta has no effect in mode {mode!r}")
    resolved["eta"] = eta


def _validate_grid(grid_spec, problems):
    if grid_spec is None:
        return [-5.0, 5.0, 201]
    spec = list(grid_spec)
    if len(spec) != 3:
        problems.append(f"grid must be MIN:MAX:POINTS, got {grid_spec!r}")
        return None
    try:
        lo, hi, pts = float(spec[0]), float(spec[1]), int(float(spec[2]))
    except (TypeError, ValueError):
        problems.append(f"grid values must be numeric, got {grid_spec!r}")
        return None
    if not lo < hi:
        problems.append(f"grid minimum {lo} must lie below maximum {hi}")
        return None
    if pts < 3:
        problems.append(f"grid needs at least 3 points, got {pts}")
        return None
    return [lo, hi, pts]


def _predict_tail(scenario, resolved) -> list:
    """Run the constructors' own cutoff checks without any heavy computation."""
    try:
        if scenario == "wigner":
            if resolved["family"] == "even-cat":
                even_cat(resolved["alpha"], resolved["cutoff"])
            else:
                smsv(resolved["xi"], resolved["cutoff"])
        elif scenario == "cat-atten":
            even_cat(resolved["alpha"], resolved["cutoff"])
        elif scenario == "smsv-atten":
            smsv(resolved["xi"], resolved["cutoff"])
        else:
            tmsv(resolved["xi"], resolved["cutoff"])
    except (TruncationError, ValueError) as exc:
        return [str(exc)]
    return []


def _make_grid(triple) -> PhaseSpaceGrid:
    lo, hi, pts = triple
    axis = np.linspace(lo, hi, pts)
    return PhaseSpaceGrid(axis, axis.copy())


def _compute(config) -> tuple:
    scenario = config["scenario"]
    p = config["parameters"]
    files = {}
    results = {}

    if scenario in GRID_SCENARIOS:
        grid = _make_grid(p["grid"])
        if scenario == "wigner":
            if p["family"] == "even-cat":
                ket = even_cat(p["alpha"], p["cutoff"])
            else:
                ket = smsv(p["xi"], p["cutoff"])
            w = wigner_pure(ket, grid)
        else:
            if scenario == "cat-atten":
                ket = even_cat(p["alpha"], p["cutoff"])
            else:
                ket = smsv(p["xi"], p["cutoff"])
            two = inject(ket, BeamSplitter.from_keep(p["keep"]))
            if p["mode"] == "ordinary":
                w = wigner_mixed(trace_out(two, 1), grid)
                results["herald_probability"] = 1.0
            elif p["mode"] == "heralded":
                outcome = herald_zero(two)
                w = wigner_pure(outcome.state, grid)
                results["herald_probability"] = outcome.probability
            else:
                outcome = herald_noclick(two, p["eta"])
                w = wigner_mixed(outcome.state, grid)
                results["herald_probability"] = outcome.probability
        files["wigner.csv"] = wigner_csv(w)
        results["normalization"] = w.integrate()
        results["negativity"] = negativity_volume(w)
        if scenario == "smsv-atten" or (scenario == "wigner" and p["family"] == "smsv"):
            fit = _jsonable(fit_json_dict(fit_gaussian(w)))
            results["fit"] = fit
            files["fit.json"] = json.dumps(fit, sort_keys=True, indent=2) + "\n"
    elif scenario == "mzi-sweep":
        cfg = MziConfig(
            xi=p["xi"], arm_keep=p["keep"], mode=p["mode"], eta=p["eta"],
            phi_samples=p["samples"], cutoff=p["cutoff"],
        )
        curve = phase_sweep(cfg)
        files["curve.csv"] = curve_csv(curve)
        results["visibility"] = visibility(curve)
        results["herald_probability"] = mzi_output(cfg, 0.0).probability
    else:  # eta-sweep
        template = MziConfig(
            xi=p["xi"], arm_keep=p["keep"], mode="ordinary",
            phi_samples=p["samples"], cutoff=p["cutoff"],
        )
        rows = visibility_vs_efficiency(template, p["etas"])
        files["eta_visibility.csv"] = efficiency_csv(rows)
        results["visibility_vs_eta"] = [[eta, vis] for eta, vis in rows]

    files["plots.md"] = _plots_text(scenario, sorted(k for k in files if k.endswith(".csv")))
    return files, results


def _plots_text(scenario, csv_names) -> str:
    lines = [f"# Plot recipes: {scenario}", ""]
    for name in csv_names:
        if name == "wigner.csv":
            lines += [
                f"## {name}",
                "Columns x, p, w sampled row-major on a uniform grid.  Reshape w",
                "to (len(unique x), len(unique p)) and render as a heatmap or",
                "contour plot with x horizontal, p vertical; negative regions mark",
                "nonclassicality.",
                "",
            ]
        elif name == "curve.csv":
            lines += [
                f"## {name}",
                "Coincidence probability against interferometer phase phi over one",
                "2*pi period.  Plot as a line; visibility is (max-min)/(max+min).",
                "",
            ]
        elif name == "eta_visibility.csv":
            lines += [
                f"## {name}",
                "Interference visibility against detector efficiency eta.  Plot as",
                "points or a line over eta in [0, 1].",
                "",
            ]
    return "\n".join(lines)


def _jsonable(value):
    """Recursively convert numpy scalars so json.dumps accepts the payload."""
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_outputs(out_dir: Path, files: dict, results: dict, config) -> None:
    summary = _jsonable({
        "config": {
            "scenario": config["scenario"],
            "output": config["output"],
            "parameters": config["parameters"],
        },
        "results": results,
        "tool": {"name": "fockatten", "version": __version__},
    })
    files = dict(files)
    files["summary.json"] = json.dumps(summary, sort_keys=True, indent=2) + "\n"
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    for name, text in sorted(files.items()):
        tmp = out_dir / (name + ".tmp")
        tmp.write_text(text)
        staged.append((tmp, out_dir / name))
    for tmp, final in staged:
        os.replace(tmp, final)
