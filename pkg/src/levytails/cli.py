"""Declarative command-line driver: bound curves, simulations, audits, sweeps.

Usage::

    levytails CONFIG.json [--seed N] [--count N] [--out DIR]

The config file is one JSON object.  Recognized keys:

    task    "bound" | "simulate" | "verify" | "sweep"
    model   {"variant": "stable" | "quadratic" | "levy_area" |
                        "log_kernel" | "gauss_kernel" |
                        "brownian_square_norm" | "brownian_sample_variance",
             "alpha": float,                   (stable)
             "sigma_total": float,             (stable/log_kernel/gauss_kernel)
             "T": float,                       (levy_area/brownian_*)
             "eigs": [floats]                  (quadratic, explicit spectrum)
             "generator": {"kind": "energy"|"centered", "T": float,
                           "N": int, "convention": "spectral"|"pathwise"}}
                                               (quadratic, closed-form spectrum)
    bound   {"name": <catalog name>, ...parameters}   (see the table in
            _BOUND_KEYS; "dev_nico" is accepted as an alias of "bennett")
    grid    {"x_lo": float, "x_hi": float, "points": int}
            (deviation units; verify audits are capped at 20 points)
    mc      {"count": int, "steps": int, "seed": int, "stream": int}
    out     {"dir": str}
    run     inner task of a sweep ("bound" | "simulate" | "verify")
    over    {"dotted.path": [values, ...]} sweep axes (Cartesian product),
            paths rooted at model/bound/grid/mc

Flags --seed, --count, --out override mc.seed, mc.count, out.dir; every
override is echoed on stdout and the post-override config is embedded in
every JSON artifact, so a report always names the exact parameters that
produced it.

Artifacts (under out.dir):
    bound     bound_curve.csv (x,bound,regime,valid), bound_summary.json
    simulate  samples.bin (binary batch), simulate_summary.json
    verify    verify_report.json, verify_curve.csv
              (x,p_hat,ci_lo,ci_hi,bound,verdict)
    sweep     sweep_summary.json + one cell_NNN/ directory per cell

Exit codes: 0 = ran clean (all verdicts PASS/INCONCLUSIVE), 2 = some
audit returned VIOLATION, 1 = configuration or execution error.  Reruns
with the same config and seed produce byte-identical CSV payloads.
"""

from __future__ import annotations

import argparse
import copy
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from .catalog import (
    QuadraticSpec,
    StableSpec,
    bennett_bound,
    id_lower_curve,
    levy_area_bound,
    median_bound_linear,
    quad_euclid_iid_bound,
    quad_wiener_bound,
    quad_wiener_lower,
    stable_median_bound,
    two_regime_bound,
)
from .errors import ConfigError, LevytailsError
from .models import (
    GaussKernel,
    LevyArea,
    LogKernel,
    QuadraticSpectral,
    Stable,
    chaos_eigenvalues,
)
from .simulate import (
    RngContract,
    sample_brownian_quadratic,
    sample_chaos2,
    sample_levy_area,
    sample_stable,
    save_batch,
)
from .verify import audit_bound, deviation_values, empirical_median, empirical_tail

_TASKS = ("bound", "simulate", "verify", "sweep")
_TOP_KEYS = {"task", "model", "bound", "grid", "mc", "out", "run", "over"}
_MAX_SWEEP_CELLS = 1000
_MISSING = object()


# ----------------------------------------------------------------------
# Config access with field-path errors
# ----------------------------------------------------------------------


def _loc(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _section(cfg: dict, key: str, required: bool) -> dict:
    if key not in cfg:
        if required:
            raise ConfigError(f"{key}: required for this task")
        return {}
    val = cfg[key]
    if not isinstance(val, dict):
        raise ConfigError(f"{key}: must be an object")
    return val


def _check_keys(section: dict, allowed: set, path: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{_loc(path, key)}: unknown key "
                              f"(allowed: {', '.join(sorted(allowed))})")


def _num(section: dict, key: str, path: str, default=_MISSING):
    if key not in section:
        if default is _MISSING:
            raise ConfigError(f"{_loc(path, key)}: required")
        return default
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{_loc(path, key)}: must be a number, got {val!r}")
    return float(val)


def _int(section: dict, key: str, path: str, default=_MISSING, minimum=None):
    if key not in section:
        if default is _MISSING:
            raise ConfigError(f"{_loc(path, key)}: required")
        return default
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(
            f"{_loc(path, key)}: must be an integer, got {val!r}")
    if minimum is not None and val < minimum:
        raise ConfigError(
            f"{_loc(path, key)}: must be >= {minimum}, got {val}")
    return val


def _str(section: dict, key: str, path: str, default=_MISSING, choices=None):
    if key not in section:
        if default is _MISSING:
            raise ConfigError(f"{_loc(path, key)}: required")
        return default
    val = section[key]
    if not isinstance(val, str):
        raise ConfigError(f"{_loc(path, key)}: must be a string, got {val!r}")
    if choices is not None and val not in choices:
        raise ConfigError(f"{_loc(path, key)}: must be one of "
                          f"{', '.join(sorted(choices))}; got {val!r}")
    return val


def _jsonable(obj):
    """Recursively convert numpy scalars/arrays and tuples for json."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _dump_json(doc: dict, path: Path) -> None:
    path.write_text(json.dumps(_jsonable(doc), sort_keys=True, indent=2)
                    + "\n")


# ----------------------------------------------------------------------
# Model construction
# ----------------------------------------------------------------------

_MODEL_VARIANTS = ("stable", "quadratic", "levy_area", "log_kernel",
                   "gauss_kernel", "brownian_square_norm",
                   "brownian_sample_variance")


def build_model(model_cfg: dict):
    """Config section -> Levy model object (None for the brownian path
    functionals, which are samplers rather than Levy measures)."""
    variant = _str(model_cfg, "variant", "model", choices=_MODEL_VARIANTS)
    allowed = {"variant"}
    if variant == "stable":
        allowed |= {"alpha", "sigma_total"}
        _check_keys(model_cfg, allowed, "model")
        return Stable(alpha=_num(model_cfg, "alpha", "model"),
                      sigma_total=_num(model_cfg, "sigma_total", "model"))
    if variant in ("log_kernel", "gauss_kernel"):
        allowed |= {"sigma_total"}
        _check_keys(model_cfg, allowed, "model")
        cls = LogKernel if variant == "log_kernel" else GaussKernel
        return cls(sigma_total=_num(model_cfg, "sigma_total", "model"))
    if variant == "levy_area":
        allowed |= {"T"}
        _check_keys(model_cfg, allowed, "model")
        return LevyArea(T=_num(model_cfg, "T", "model"))
    if variant in ("brownian_square_norm", "brownian_sample_variance"):
        allowed |= {"T"}
        _check_keys(model_cfg, allowed, "model")
        _num(model_cfg, "T", "model")  # validate presence/type
        return None
    # quadratic: explicit eigs XOR generator
    allowed |= {"eigs", "generator"}
    _check_keys(model_cfg, allowed, "model")
    has_eigs = "eigs" in model_cfg
    has_gen = "generator" in model_cfg
    if has_eigs == has_gen:
        raise ConfigError(
            "model.eigs: quadratic needs exactly one of eigs / generator")
    if has_eigs:
        eigs = model_cfg["eigs"]
        if (not isinstance(eigs, list) or not eigs
                or any(isinstance(a, bool) or not isinstance(a, (int, float))
                       for a in eigs)):
            raise ConfigError("model.eigs: must be a nonempty number list")
        return QuadraticSpectral(tuple(float(a) for a in eigs))
    gen = model_cfg["generator"]
    if not isinstance(gen, dict):
        raise ConfigError("model.generator: must be an object")
    _check_keys(gen, {"kind", "T", "N", "convention"}, "model.generator")
    return chaos_eigenvalues(
        _str(gen, "kind", "model.generator", choices=("energy", "centered")),
        _num(gen, "T", "model.generator"),
        _int(gen, "N", "model.generator", minimum=1),
        _str(gen, "convention", "model.generator", default="spectral",
             choices=("spectral", "pathwise")),
    )


# ----------------------------------------------------------------------
# Bound construction
# ----------------------------------------------------------------------

_BOUND_KEYS = {
    "bennett": {"K", "alpha2"},
    "quad_wiener": {"form", "target", "lip_c"},
    "quad_wiener_lower": {"b", "target", "T", "n"},
    "quad_euclid": {"b", "mean_abs"},
    "levy_area": {"variant", "n", "lip_c", "b", "mean_abs"},
    "id_lower": set(),
    "median_linear": {"C", "C_prime"},
    "stable_median": {"variant", "epsilon", "b", "lip_c"},
    "two_regime": {"variant", "K", "alpha2", "alpha3", "alpha4"},
}
_BOUND_ALIASES = {"dev_nico": "bennett"}


def _quad_spec(model, mean_abs=None) -> QuadraticSpec:
    if not isinstance(model, QuadraticSpectral):
        raise ConfigError(
            "bound.name: this bound needs model.variant = quadratic")
    return QuadraticSpec(eigs_per_component=(model.eigs,), mean_abs=mean_abs)


def build_bound(bound_cfg: dict, model):
    """Config section + model -> catalog TailBound."""
    name = _str(bound_cfg, "name", "bound")
    name = _BOUND_ALIASES.get(name, name)
    if name not in _BOUND_KEYS:
        raise ConfigError(
            f"bound.name: unknown bound {bound_cfg['name']!r} "
            f"(catalog: {', '.join(sorted(_BOUND_KEYS))})")
    _check_keys(bound_cfg, _BOUND_KEYS[name] | {"name"}, "bound")
    if name == "bennett":
        return bennett_bound(_num(bound_cfg, "K", "bound"),
                             _num(bound_cfg, "alpha2", "bound"))
    if name == "quad_wiener":
        return quad_wiener_bound(
            _quad_spec(model),
            lip_c=_num(bound_cfg, "lip_c", "bound", default=1.0),
            form=_str(bound_cfg, "form", "bound", default="exact_h",
                      choices=("exact_h", "log_form", "min_form")),
            target=_str(bound_cfg, "target", "bound", default="lipschitz",
                        choices=("lipschitz", "sup")))
    if name == "quad_wiener_lower":
        target = _str(bound_cfg, "target", "bound", default="inf_norm",
                      choices=("inf_norm", "sup", "area"))
        b = _num(bound_cfg, "b", "bound", default=0.5)
        if target == "area":
            return quad_wiener_lower(
                None, b=b, target=target,
                T=_num(bound_cfg, "T", "bound"),
                n=_int(bound_cfg, "n", "bound", default=1, minimum=1))
        return quad_wiener_lower(_quad_spec(model), b=b, target=target)
    if name == "quad_euclid":
        return quad_euclid_iid_bound(
            _quad_spec(model, _num(bound_cfg, "mean_abs", "bound",
                                   default=None)),
            b=_num(bound_cfg, "b", "bound", default=0.5))
    if name == "levy_area":
        if not isinstance(model, LevyArea):
            raise ConfigError(
                "bound.name: levy_area needs model.variant = levy_area")
        variant = _str(bound_cfg, "variant", "bound", default="lipschitz",
                       choices=("lipschitz", "euclid"))
        return levy_area_bound(
            model.T,
            n=_int(bound_cfg, "n", "bound", default=1, minimum=1),
            lip_c=_num(bound_cfg, "lip_c", "bound", default=1.0),
            b=_num(bound_cfg, "b", "bound", default=None),
            variant=variant,
            mean_abs=_num(bound_cfg, "mean_abs", "bound", default=None))
    if name == "id_lower":
        if model is None:
            raise ConfigError("bound.name: id_lower needs a model section")
        return id_lower_curve(model)
    if name == "median_linear":
        if model is None:
            raise ConfigError("bound.name: median_linear needs a model")
        return median_bound_linear(model, _num(bound_cfg, "C", "bound"),
                                   _num(bound_cfg, "C_prime", "bound"))
    if name == "stable_median":
        if not isinstance(model, Stable):
            raise ConfigError(
                "bound.name: stable_median needs model.variant = stable")
        spec = StableSpec(alpha=model.alpha, sigma_total=model.sigma_total,
                          lip_c=_num(bound_cfg, "lip_c", "bound", default=1.0))
        return stable_median_bound(
            spec,
            variant=_str(bound_cfg, "variant", "bound", default="general",
                         choices=("general", "uniform", "sharp",
                                  "near2_exp", "near2_log")),
            epsilon=_num(bound_cfg, "epsilon", "bound", default=None),
            b=_num(bound_cfg, "b", "bound", default=None))
    # two_regime
    return two_regime_bound(
        _num(bound_cfg, "K", "bound"),
        _num(bound_cfg, "alpha2", "bound"),
        alpha3=_num(bound_cfg, "alpha3", "bound", default=None),
        alpha4=_num(bound_cfg, "alpha4", "bound", default=None),
        variant=_str(bound_cfg, "variant", "bound", default="third_moment",
                     choices=("third_moment", "fourth_moment")))


# ----------------------------------------------------------------------
# Shared pieces: grid, mc, simulation dispatch
# ----------------------------------------------------------------------


def _parse_grid(cfg: dict, audit: bool) -> np.ndarray:
    grid = _section(cfg, "grid", required=True)
    _check_keys(grid, {"x_lo", "x_hi", "points"}, "grid")
    x_lo = _num(grid, "x_lo", "grid")
    x_hi = _num(grid, "x_hi", "grid")
    points = _int(grid, "points", "grid", minimum=2)
    if not x_lo < x_hi:
        raise ConfigError(f"grid.x_hi: must exceed x_lo, got "
                          f"[{x_lo}, {x_hi}]")
    if audit and points > 20:
        raise ConfigError(
            f"grid.points: audit tasks are capped at 20 points, got {points}")
    return np.linspace(x_lo, x_hi, points)


def _parse_mc(cfg: dict) -> dict:
    mc = _section(cfg, "mc", required=True)
    _check_keys(mc, {"count", "steps", "seed", "stream"}, "mc")
    return {
        "count": _int(mc, "count", "mc", minimum=1),
        "steps": _int(mc, "steps", "mc", default=None, minimum=1),
        "seed": _int(mc, "seed", "mc", default=0, minimum=0),
        "stream": _int(mc, "stream", "mc", default=0, minimum=0),
    }


def _run_sampler(model_cfg: dict, model, mc: dict):
    variant = model_cfg["variant"]
    rng = RngContract(mc["seed"])
    count, stream = mc["count"], mc["stream"]
    if variant == "quadratic":
        return sample_chaos2(model, count, rng, stream_id=stream)
    if variant == "levy_area":
        steps = mc["steps"] if mc["steps"] is not None else 4096
        return sample_levy_area(model.T, steps, count, rng, stream_id=stream)
    if variant == "stable":
        return sample_stable(model.alpha, 1, "uniform", count, rng,
                             stream_id=stream, sigma_total=model.sigma_total)
    if variant in ("brownian_square_norm", "brownian_sample_variance"):
        kind = variant[len("brownian_"):]
        steps = mc["steps"] if mc["steps"] is not None else 256
        return sample_brownian_quadratic(kind, float(model_cfg["T"]), steps,
                                         count, rng, stream_id=stream)
    raise ConfigError(
        f"model.variant: {variant!r} has no command-line sampler "
        "(compound-Poisson sampling is available through the Python API)")


# ----------------------------------------------------------------------
# Task runners (each returns an exit code and writes its artifacts)
# ----------------------------------------------------------------------


def _run_bound(cfg: dict, out_dir: Path, phase: dict) -> int:
    phase["op"] = "bound/build"
    model = build_model(_section(cfg, "model", required=False)) \
        if "model" in cfg else None
    bound = build_bound(_section(cfg, "bound", required=True), model)
    xs = _parse_grid(cfg, audit=False)
    phase["op"] = "bound/evaluate"
    values, regimes, valid = bound.evaluate_grid(xs)
    rows = ["x,bound,regime,valid"]
    for x, v, reg, ok in zip(xs, values, regimes, valid):
        rows.append(f"{x:.17g},{v:.17g},{reg},{int(ok)}")
    phase["op"] = "bound/emit"
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bound_curve.csv").write_text("\n".join(rows) + "\n")
    _dump_json({
        "task": "bound",
        "config": cfg,
        "bound": bound.name,
        "direction": bound.direction,
        "center": bound.center,
        "points": len(xs),
        "valid_points": int(np.count_nonzero(valid)),
    }, out_dir / "bound_summary.json")
    print(f"task=bound bound={bound.name} points={len(xs)} "
          f"out={out_dir / 'bound_curve.csv'}")
    return 0


def _run_simulate(cfg: dict, out_dir: Path, phase: dict) -> int:
    phase["op"] = "simulate/build"
    model_cfg = _section(cfg, "model", required=True)
    model = build_model(model_cfg)
    mc = _parse_mc(cfg)
    phase["op"] = "simulate/sample"
    batch = _run_sampler(model_cfg, model, mc)
    phase["op"] = "simulate/emit"
    out_dir.mkdir(parents=True, exist_ok=True)
    sample_path = out_dir / "samples.bin"
    save_batch(batch, str(sample_path))
    values = batch.values
    _dump_json({
        "task": "simulate",
        "config": cfg,
        "count": batch.count,
        "seed": batch.seed,
        "stream_id": batch.stream_id,
        "mean": float(values.mean()),
        "se": float(values.std() / np.sqrt(values.shape[0])),
        "min": float(values.min()),
        "max": float(values.max()),
        "meta": batch.meta,
    }, out_dir / "simulate_summary.json")
    print(f"task=simulate count={batch.count} seed={batch.seed} "
          f"out={sample_path}")
    return 0


def _run_verify(cfg: dict, out_dir: Path, phase: dict) -> int:
    phase["op"] = "verify/build"
    model_cfg = _section(cfg, "model", required=True)
    model = build_model(model_cfg)
    bound = build_bound(_section(cfg, "bound", required=True), model)
    grid = _parse_grid(cfg, audit=True)
    mc = _parse_mc(cfg)
    phase["op"] = "verify/sample"
    batch = _run_sampler(model_cfg, model, mc)
    phase["op"] = "verify/center"
    values = batch.values
    estimates = {}
    center_se = None
    if bound.center == "median":
        med = empirical_median(batch)
        center = med["median"]
        estimates = {"median": med["median"], "median_ci_lo": med["ci_lo"],
                     "median_ci_hi": med["ci_hi"]}
    else:
        if bound.meta.get("transform") == "norm":
            base = np.abs(values) if values.ndim == 1 \
                else np.linalg.norm(values, axis=1)
        else:
            base = values
        center = float(base.mean())
        center_se = float(base.std() / np.sqrt(base.shape[0]))
        estimates = {"mean": center, "mean_se": center_se}
    phase["op"] = "verify/audit"
    deviations, meta = deviation_values(batch, bound, center)
    curve = empirical_tail(deviations, grid, meta=meta)
    report = audit_bound(curve, bound, center, center_se=center_se,
                         estimates=estimates)
    phase["op"] = "verify/emit"
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = json.loads(report.to_json())
    doc["task"] = "verify"
    doc["config"] = cfg
    doc["seed"] = batch.seed
    _dump_json(doc, out_dir / "verify_report.json")
    (out_dir / "verify_curve.csv").write_text(
        "\n".join(report.csv_rows()) + "\n")
    print(f"task=verify bound={bound.name} verdict={report.verdict} "
          f"out={out_dir / 'verify_report.json'}")
    return 2 if report.verdict == "VIOLATION" else 0


def _set_path(cfg: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    if parts[0] not in ("model", "bound", "grid", "mc") or len(parts) < 2:
        raise ConfigError(
            f"over.{dotted}: sweep axes must point into model/bound/grid/mc")
    node = cfg
    for part in parts[:-1]:
        nxt = node.setdefault(part, {})
        if not isinstance(nxt, dict):
            raise ConfigError(f"over.{dotted}: {part} is not an object")
        node = nxt
    node[parts[-1]] = value


def _run_sweep(cfg: dict, out_dir: Path, phase: dict) -> int:
    phase["op"] = "sweep/config"
    run = _str(cfg, "run", "", choices=("bound", "simulate", "verify"))
    over = cfg.get("over")
    if not isinstance(over, dict) or not over:
        raise ConfigError("over: sweep needs a nonempty {path: [values]} map")
    paths = sorted(over)
    axes = []
    for path in paths:
        vals = over[path]
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"over.{path}: must be a nonempty list")
        axes.append(vals)
    n_cells = 1
    for axis in axes:
        n_cells *= len(axis)
    if n_cells > _MAX_SWEEP_CELLS:
        raise ConfigError(
            f"over: sweep would produce {n_cells} cells "
            f"(cap {_MAX_SWEEP_CELLS})")
    base = {k: v for k, v in cfg.items() if k not in ("task", "run", "over",
                                                      "out")}
    runner = {"bound": _run_bound, "simulate": _run_simulate,
              "verify": _run_verify}[run]
    cells = []
    worst = 0
    for idx, combo in enumerate(itertools.product(*axes)):
        cell_cfg = copy.deepcopy(base)
        cell_cfg["task"] = run
        for path, val in zip(paths, combo):
            _set_path(cell_cfg, path, val)
        cell_dir = out_dir / f"cell_{idx:03d}"
        phase["op"] = f"sweep/cell_{idx:03d}"
        code = runner(cell_cfg, cell_dir, phase)
        worst = max(worst, code)
        cells.append({"index": idx,
                      "overrides": dict(zip(paths, combo)),
                      "exit": code,
                      "dir": cell_dir.name})
    phase["op"] = "sweep/emit"
    out_dir.mkdir(parents=True, exist_ok=True)
    _dump_json({
        "task": "sweep",
        "config": cfg,
        "run": run,
        "cells": cells,
        "exit": worst,
    }, out_dir / "sweep_summary.json")
    print(f"task=sweep run={run} cells={len(cells)} exit={worst} "
          f"out={out_dir / 'sweep_summary.json'}")
    return worst


# ----------------------------------------------------------------------
# Entry point
# ----------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="levytails",
        description="Evaluate tail bounds, run seeded simulations, and "
                    "audit bounds against Monte-Carlo tails from a JSON "
                    "config.")
    parser.add_argument("config", help="path to the JSON config file")
    parser.add_argument("--seed", type=int, default=None,
                        help="override mc.seed")
    parser.add_argument("--count", type=int, default=None,
                        help="override mc.count")
    parser.add_argument("--out", default=None, help="override out.dir")
    args = parser.parse_args(argv)

    phase = {"op": "config"}
    try:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON: {exc}")
        if not isinstance(cfg, dict):
            raise ConfigError("config: top level must be a JSON object")
        _check_keys(cfg, _TOP_KEYS, "config")
        for flag, path in (("seed", ("mc", "seed")),
                           ("count", ("mc", "count"))):
            val = getattr(args, flag)
            if val is not None:
                cfg.setdefault(path[0], {})[path[1]] = val
                print(f"override {path[0]}.{path[1]}={val}")
        if args.out is not None:
            cfg.setdefault("out", {})["dir"] = args.out
            print(f"override out.dir={args.out}")
        task = _str(cfg, "task", "", choices=_TASKS)
        out_cfg = _section(cfg, "out", required=False)
        _check_keys(out_cfg, {"dir"}, "out")
        out_dir = Path(_str(out_cfg, "dir", "out", default="."))
        runner = {"bound": _run_bound, "simulate": _run_simulate,
                  "verify": _run_verify, "sweep": _run_sweep}[task]
        return runner(cfg, out_dir, phase)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except LevytailsError as exc:
        print(f"error [{phase['op']}] {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error [{phase['op']}] {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
