"""Command-line front end.

Four subcommands: ``apply``, ``iterate``, ``qset``, ``truncation-study``.
Runs are driven by a JSON config (schema-validated with located errors)
or a named scenario; identical config and seed give byte-identical
outputs. Exit codes: 0 success, 1 property or bound violation, 2 config
error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .dynamics import (
    check_growth_bound,
    detect_convergence,
    diagnostics_json,
    iterate,
    write_trajectory_csv,
)
from .errors import TrajectoryTooShortError, VolterraError
from .extension import CompatibleFamily, check_w_equals_v, converge_power, gap_study_rows, power_truncation_gap, vn_apply
from .operators import (
    Operator,
    ShiftOperator,
    TensorOperator,
    VolterraOperator,
    conjugate_apply,
    fixed_point_residual,
)
from .qset import LPProblem, FaceIndexSet, example52_emptiness, q_membership_residual, q_set_point
from .simplex import SimplexPoint, l1_distance, geometric_profile, make_point, sample_interior
from .skew import DeterminingTensor, SkewSpec, spec_from_json


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- schemas

_OPERATOR_SCHEMA = {
    "oneOf": [
        {"type": "object", "properties": {"kind": {"const": "zero"}}, "required": ["kind"], "additionalProperties": False},
        {"type": "object", "properties": {"kind": {"const": "alternating"}}, "required": ["kind"], "additionalProperties": False},
        {"type": "object", "properties": {"kind": {"const": "shift"}}, "required": ["kind"], "additionalProperties": False},
        {
            "type": "object",
            "properties": {"kind": {"const": "dense"}, "rows": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}, "minItems": 1}},
            "required": ["kind", "rows"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "block"}, "blocks": {"type": "array", "items": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}, "minItems": 1}},
            "required": ["kind", "blocks"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "pair"}, "coeffs": {"type": "array", "items": {"type": "number"}, "minItems": 1}},
            "required": ["kind", "coeffs"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "tensor"},
                "dim": {"type": "integer", "minimum": 1},
                "values": {"type": "array", "items": {"type": "array", "minItems": 4, "maxItems": 4, "items": {"type": "number"}}},
                "volterra": {"type": "boolean"},
            },
            "required": ["kind", "dim", "values"],
            "additionalProperties": False,
        },
    ]
}

_POINT_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"kind": {"const": "pairs"}, "pairs": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}}, "minItems": 1}},
            "required": ["kind", "pairs"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "uniform"}, "indices": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}},
            "required": ["kind", "indices"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "sampled"}, "face": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}},
            "required": ["kind", "face"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "geometric"}, "n": {"type": "integer", "minimum": 1}, "ratio": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
            "required": ["kind", "n", "ratio"],
            "additionalProperties": False,
        },
    ]
}

_GRID_SCHEMA = {
    "type": "object",
    "properties": {
        "m": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "n": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "p": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
    },
    "required": ["m", "n", "p"],
    "additionalProperties": False,
}

_SCHEMAS = {
    "apply": {
        "type": "object",
        "properties": {"operator": _OPERATOR_SCHEMA, "point": _POINT_SCHEMA, "seed": {"type": "integer", "minimum": 0}},
        "required": ["operator", "point"],
        "additionalProperties": False,
    },
    "iterate": {
        "type": "object",
        "properties": {
            "operator": _OPERATOR_SCHEMA,
            "point": _POINT_SCHEMA,
            "steps": {"type": "integer", "minimum": 1},
            "tol": {"type": "number", "exclusiveMinimum": 0},
            "window": {"type": "integer", "minimum": 2},
            "stride": {"type": "integer", "minimum": 1},
            "check_growth": {"type": "boolean"},
            "seed": {"type": "integer", "minimum": 0},
            "svg": {
                "type": "object",
                "properties": {"coordinates": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}},
                "required": ["coordinates"],
                "additionalProperties": False,
            },
        },
        "required": ["operator", "point", "steps"],
        "additionalProperties": False,
    },
    "qset": {
        "type": "object",
        "properties": {
            "operator": _OPERATOR_SCHEMA,
            "face": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
            "emptiness": {
                "type": "object",
                "properties": {"lo": {"type": "integer", "minimum": 2}, "hi": {"type": "integer", "minimum": 2}},
                "required": ["lo", "hi"],
                "additionalProperties": False,
            },
            "seed": {"type": "integer", "minimum": 0},
        },
        "additionalProperties": False,
    },
    "truncation-study": {
        "type": "object",
        "properties": {
            "base": _OPERATOR_SCHEMA,
            "point": _POINT_SCHEMA,
            "grid": _GRID_SCHEMA,
            "tails": {"type": "array", "items": _OPERATOR_SCHEMA, "minItems": 2, "maxItems": 2},
            "tail_levels": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
            "converge": {
                "type": "object",
                "properties": {"m": {"type": "integer", "minimum": 1}, "eps": {"type": "number", "exclusiveMinimum": 0}},
                "required": ["m", "eps"],
                "additionalProperties": False,
            },
            "seed": {"type": "integer", "minimum": 0},
        },
        "required": ["base", "point", "grid"],
        "additionalProperties": False,
    },
}

# ---------------------------------------------------------------- scenarios

_RPS_ROWS = [[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]]

_SCENARIOS: dict[str, dict[str, dict]] = {
    "example-5.1": {
        "iterate": {
            "operator": {"kind": "pair", "coeffs": [1.0] * 20},
            "point": {"kind": "uniform", "indices": list(range(1, 41))},
            "steps": 5000,
            "tol": 1e-9,
            "window": 50,
        },
        "apply": {
            "operator": {"kind": "pair", "coeffs": [1.0] * 20},
            "point": {"kind": "uniform", "indices": list(range(1, 41))},
        },
        "qset": {"operator": {"kind": "pair", "coeffs": [1.0]}, "face": [1, 2]},
    },
    "example-5.2": {
        "iterate": {
            "operator": {"kind": "alternating"},
            "point": {"kind": "uniform", "indices": list(range(1, 41))},
            "steps": 10000,
            "check_growth": True,
        },
        "apply": {
            "operator": {"kind": "alternating"},
            "point": {"kind": "uniform", "indices": list(range(1, 41))},
        },
        "qset": {"emptiness": {"lo": 5, "hi": 20}},
    },
    "shift": {
        "iterate": {
            "operator": {"kind": "shift"},
            "point": {"kind": "pairs", "pairs": [[1, 1.0]]},
            "steps": 100,
        },
        "apply": {"operator": {"kind": "shift"}, "point": {"kind": "pairs", "pairs": [[1, 1.0]]}},
    },
    "rps": {
        "iterate": {
            "operator": {"kind": "dense", "rows": _RPS_ROWS},
            "point": {"kind": "pairs", "pairs": [[1, 0.5], [2, 0.3], [3, 0.2]]},
            "steps": 100000,
        },
        "apply": {
            "operator": {"kind": "dense", "rows": _RPS_ROWS},
            "point": {"kind": "pairs", "pairs": [[1, 0.5], [2, 0.3], [3, 0.2]]},
        },
        "qset": {"operator": {"kind": "dense", "rows": _RPS_ROWS}, "face": [1, 2, 3]},
    },
}

# ---------------------------------------------------------------- helpers


def _load_config(command: str, args) -> dict:
    config: dict = {}
    if args.scenario is not None:
        table = _SCENARIOS.get(args.scenario)
        if table is None or command not in table:
            raise ConfigError(f"unknown scenario {args.scenario!r} for command {command!r}")
        config.update(json.loads(json.dumps(table[command])))
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        config.update(user)
    if not config:
        raise ConfigError("need --config and/or --scenario")
    if args.seed is not None:
        config["seed"] = args.seed
    config.setdefault("seed", 0)
    validator = jsonschema.Draft202012Validator(_SCHEMAS[command])
    errors = sorted(validator.iter_errors(config), key=lambda e: e.json_path)
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise ConfigError(f"config invalid at {best.json_path}: {best.message}")
    return config


def _config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _build_operator(obj: dict) -> Operator:
    kind = obj["kind"]
    try:
        if kind == "shift":
            return ShiftOperator()
        if kind == "tensor":
            return TensorOperator(DeterminingTensor.from_json(obj))
        return VolterraOperator(spec_from_json(obj))
    except (VolterraError, ValueError) as exc:
        raise ConfigError(f"operator config rejected: {exc}") from exc


def _build_skew(obj: dict) -> SkewSpec:
    if obj["kind"] in ("shift", "tensor"):
        raise ConfigError(f"this command needs a skew-form operator, got {obj['kind']!r}")
    try:
        spec = spec_from_json(obj)
    except (VolterraError, ValueError) as exc:
        raise ConfigError(f"operator config rejected: {exc}") from exc
    return spec


def _build_point(obj: dict, seed: int) -> SimplexPoint:
    try:
        if obj["kind"] == "pairs":
            return make_point([(int(i), float(w)) for i, w in obj["pairs"]])
        if obj["kind"] == "uniform":
            idx = obj["indices"]
            return make_point([(int(i), 1.0 / len(idx)) for i in idx])
        if obj["kind"] == "sampled":
            return sample_interior(FaceIndexSet.of(obj["face"]), seed)
        return geometric_profile(int(obj["n"]), float(obj["ratio"]))
    except (VolterraError, ValueError) as exc:
        raise ConfigError(f"point config rejected: {exc}") from exc


def _report(command: str, config: dict, payload: dict) -> dict:
    return {"command": command, "version": __version__, "config_hash": _config_hash(config), **payload}


def _write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def _write_svg(path: Path, traj, coordinates: list[int]) -> None:
    """Static line plot of selected coordinates against the step number."""
    width, height, pad = 640.0, 360.0, 40.0
    steps = traj.recorded_steps
    smax = max(steps[-1], 1)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" viewBox="0 0 {width:g} {height:g}">',
        f'<rect width="{width:g}" height="{height:g}" fill="white"/>',
        f'<line x1="{pad:g}" y1="{height - pad:g}" x2="{width - pad:g}" y2="{height - pad:g}" stroke="black"/>',
        f'<line x1="{pad:g}" y1="{pad:g}" x2="{pad:g}" y2="{height - pad:g}" stroke="black"/>',
    ]
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]
    for ci, coord in enumerate(coordinates):
        pts = []
        for point, m in zip(traj.points, steps):
            x = pad + (width - 2 * pad) * (m / smax)
            y = height - pad - (height - 2 * pad) * point.weight(coord)
            pts.append(f"{x:.2f},{y:.2f}")
        color = palette[ci % len(palette)]
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{" ".join(pts)}"/>')
        lines.append(
            f'<text x="{width - pad + 4:g}" y="{pad + 14 * ci:g}" font-size="11" fill="{color}">x{coord}</text>'
        )
    lines.append("</svg>")
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------- commands


def cmd_apply(config: dict, out: Path) -> int:
    op = _build_operator(config["operator"])
    x = _build_point(config["point"], config["seed"])
    result = op.apply(x)
    payload: dict = {
        "input": x.to_pairs(),
        "result": result.to_pairs(),
        "result_sum": float(sum(result.weights)),
    }
    if isinstance(op, VolterraOperator):
        conj = conjugate_apply(op.spec, x, x)
        payload["conjugate_diagonal"] = conj.to_pairs()
        payload["conjugate_gap"] = l1_distance(conj, result)
    _write_json(out / "apply.json", _report("apply", config, payload))
    print(f"apply: result sum {payload['result_sum']!r} (target 1 within 1e-12)")
    return 0


def cmd_iterate(config: dict, out: Path) -> int:
    op = _build_operator(config["operator"])
    x0 = _build_point(config["point"], config["seed"])
    steps = config["steps"]
    tol = config.get("tol", 1e-9)
    window = config.get("window", 50)
    stride = config.get("stride", 1)
    traj = iterate(op, x0, steps, record_stride=stride)
    try:
        verdict = detect_convergence(traj, tol=tol, window=window)
    except TrajectoryTooShortError as exc:
        raise ConfigError(str(exc)) from exc
    write_trajectory_csv(traj, out / "trajectory.csv")
    _write_json(out / "diagnostics.json", _report("iterate", config, diagnostics_json(traj, verdict)))
    if "svg" in config:
        _write_svg(out / "trajectory.svg", traj, config["svg"]["coordinates"])
    print(f"iterate: {steps} steps, verdict {verdict.status}")
    if config.get("check_growth", False):
        check_growth_bound(traj)
        print("iterate: growth bound certified")
    return 0


def cmd_qset(config: dict, out: Path) -> int:
    payload: dict = {}
    if "emptiness" in config:
        lo, hi = config["emptiness"]["lo"], config["emptiness"]["hi"]
        if hi < lo:
            raise ConfigError("emptiness range needs hi >= lo")
        runs = []
        for n in range(lo, hi + 1):
            res = example52_emptiness(n)
            runs.append({"n": n, "status": "infeasible", "iterations": res.iterations})
        payload["emptiness"] = runs
        print(f"qset: emptiness certified for n in {lo}..{hi}")
    else:
        if "operator" not in config or "face" not in config:
            raise ConfigError("qset needs either an emptiness range or operator plus face")
        spec = _build_skew(config["operator"])
        face = FaceIndexSet.of(config["face"])
        idx = np.asarray(face.indices, dtype=np.int64)
        problem = LPProblem(face, spec.window(idx), ("<=",) * len(idx))
        result = q_set_point(spec, face)
        payload["problem"] = problem.to_json()
        payload["lp"] = result.to_json()
        if result.feasible:
            witness = result.witness
            payload["fix_residual"] = fixed_point_residual(VolterraOperator(spec), witness)
            payload["q_residual"] = q_membership_residual(spec, witness)
            print(f"qset: feasible, fix residual {payload['fix_residual']!r}")
        else:
            print("qset: infeasible")
    _write_json(out / "qset.json", _report("qset", config, payload))
    return 0


def cmd_truncation_study(config: dict, out: Path) -> int:
    base = _build_skew(config["base"])
    x = _build_point(config["point"], config["seed"])
    fam = CompatibleFamily(base)
    grid = config["grid"]
    reports = []
    for m in grid["m"]:
        for n in grid["n"]:
            for p in grid["p"]:
                reports.append(power_truncation_gap(fam, x, m, n, p))
    with open(out / "gaps.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "n", "p", "k", "gap", "bound"])
        for m, n, p, k, gap, bound in gap_study_rows(reports):
            writer.writerow([m, n, p, k, repr(gap), repr(bound)])
    max_ratio = max((r.max_ratio for r in reports), default=0.0)
    payload: dict = {"configurations": len(reports), "max_gap_over_bound": max_ratio}

    if "tails" in config:
        tails = [_build_skew(t) for t in config["tails"]]
        levels = config.get("tail_levels", grid["n"])
        checked = []
        for n in levels:
            check_w_equals_v(CompatibleFamily(base, tails[0]), x, n, other_tail=tails[1])
            checked.append(n)
        payload["tail_levels_certified"] = checked

    if "converge" in config:
        m, eps = config["converge"]["m"], config["converge"]["eps"]
        approx = converge_power(fam, x, m, eps)
        exact = x
        for _ in range(m):
            exact = vn_apply(fam, x.max_index, exact)
        gap = max(
            abs(approx.weight(k) - exact.weight(k))
            for k in set(approx.indices) | set(exact.indices)
        )
        payload["converge_power_gap"] = gap
        payload["converge_power_eps"] = eps
        if gap > eps:
            raise VolterraError(f"converge_power gap {gap!r} exceeds eps {eps!r}")

    _write_json(out / "summary.json", _report("truncation-study", config, payload))
    print(f"truncation-study: {len(reports)} configurations, max gap/bound {max_ratio!r}")
    return 0


_COMMANDS = {
    "apply": cmd_apply,
    "iterate": cmd_iterate,
    "qset": cmd_qset,
    "truncation-study": cmd_truncation_study,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qvolterra", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="path to a JSON run config")
        p.add_argument("--scenario", type=str, default=None, help="named scenario preset")
        p.add_argument("--out", type=str, default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed override")
    args = parser.parse_args(argv)

    try:
        config = _load_config(args.command, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](config, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except VolterraError as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
