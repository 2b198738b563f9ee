"""Command-line experiment runner.

Each subcommand reads a JSON config, runs one experiment and writes a JSON
report (with the resolved config embedded) plus CSV series into the output
directory. Exit codes: 0 success, 2 config error, 3 proof-step failure,
4 numeric tolerance failure.
"""

import argparse
import csv
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import _mc, registry
from .errors import ConfigError, GaussRadonError, ToleranceError
from .gaussian import AffineGaussian, char_fn, empirical_char_fn, sample, tail_decay
from .hilbert import AffineSubspace, Frame, HVector, Hyperplane, as_hvector, orthonormalize
from .norms import DEFAULT_CERT_SAMPLES, build_adapted_sequence
from .radon import disintegrate_check, disintegrate_exponential, radon_transform, recover_point
from .support import describe_body, helgason_check_2d, support_experiment
from .wiener import SchauderBasis, brownian_sanity, condition_functional, path_clamp, path_from_coeffs, write_paths_csv

EXPERIMENTS = ("sample", "transform", "disintegrate", "recover", "tails", "support", "helgason2d", "wiener-sanity")
PROBE_T = [-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0]

DEFAULTS = {
    "sample": {"truncation": 10, "count": 100_000, "write_samples": 1000, "probe_directions": 5, "probe_t": PROBE_T},
    "transform": {"samples": 100_000},
    "disintegrate": {"lhs_samples": 100_000, "outer": 1000, "inner": 1000, "probe_directions": 5, "probe_t": PROBE_T},
    "recover": {"norm": {"name": "weighted-l2", "params": {"ratio": 0.25}}, "depth": 5, "samples": 100_000,
                "tail_samples": 100_000, "cert_samples": DEFAULT_CERT_SAMPLES, "conormals": [], "final_tolerance": None},
    "tails": {"norm": {"name": "weighted-l2", "params": {"ratio": 0.25}}, "depth": 6, "count": 100_000,
              "cert_samples": DEFAULT_CERT_SAMPLES, "conormals": [[1.0]], "truncation": None},
    "support": {"norm": {"name": "weighted-l2", "params": {"ratio": 0.25}}, "depth": 5, "samples": 100_000,
                "cert_samples": DEFAULT_CERT_SAMPLES, "mode": "vanishing", "truncation": None, "witness_count": 8},
    "helgason2d": {"angles": 64, "offsets": {"start": -3.0, "stop": 3.0, "num": 64}, "samples": 10_000},
    "wiener-sanity": {"levels": 8, "count": 100_000, "condition": {"c": 2.0, "t": 1.0, "samples": 100_000},
                      "export_paths": 4},
}

COUNT_FIELDS = ("count", "samples", "lhs_samples", "outer", "inner", "tail_samples", "cert_samples", "depth",
                "angles", "levels", "truncation")


# -- config -----------------------------------------------------------------


def load_config(ref):
    """Read a config from a path or ``shipped:NAME``."""
    try:
        if ref.startswith("shipped:"):
            text = (resources.files("gaussradon") / "configs" / f"{ref[8:]}.json").read_text()
        else:
            text = Path(ref).read_text()
    except (OSError, FileNotFoundError) as exc:
        raise ConfigError(f"cannot read config: {exc}", field="--config") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", field="--config") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object", field="--config")
    return cfg


def shipped_configs():
    root = resources.files("gaussradon") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve(cfg, experiment, seed=None):
    """Config with defaults filled in and basic checks applied."""
    kind = cfg.get("experiment", experiment)
    if kind != experiment:
        raise ConfigError(f"config is for {kind!r}, not {experiment!r}", field="experiment")
    out = {"experiment": experiment}
    out.update(DEFAULTS[experiment])
    out.update({k: v for k, v in cfg.items() if k != "out"})
    if seed is not None:
        out["seed"] = seed
    if "seed" not in out:
        raise ConfigError("a seed is required", field="seed")
    s = out["seed"]
    if isinstance(s, bool) or not isinstance(s, int) or s < 0:
        raise ConfigError("seed must be a non-negative integer", field="seed")
    for key in COUNT_FIELDS:
        v = out.get(key)
        if v is not None and (isinstance(v, bool) or not isinstance(v, int) or v < 1):
            raise ConfigError(f"{key} must be a positive integer", field=key)
    return out


def _need(cfg, key):
    if key not in cfg or cfg[key] is None:
        raise ConfigError(f"missing field {key!r}", field=key)
    return cfg[key]


def _vector(value, field):
    try:
        v = as_hvector(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"not a coefficient list: {exc}", field=field) from exc
    return v


def _hyperplane(spec, field="hyperplane"):
    if not isinstance(spec, dict) or "normal" not in spec or "offset" not in spec:
        raise ConfigError("hyperplane needs 'normal' and 'offset'", field=field)
    try:
        return Hyperplane.from_equation(_vector(spec["normal"], f"{field}.normal"), float(spec["offset"]))
    except GaussRadonError as exc:
        raise ConfigError(str(exc), field=field) from exc


def _frame(rows, field):
    vs = [_vector(r, f"{field}[{i}]") for i, r in enumerate(rows)]
    if not vs:
        return Frame()
    F = orthonormalize(vs)
    if F.dim != len(vs):
        raise ConfigError("vectors are linearly dependent", field=field)
    return F


# -- experiments --------------------------------------------------------------


def _probe_directions(count, dim, seed):
    rng = np.random.Generator(np.random.PCG64(_mc.derive_seed(seed, 7)))
    out = []
    for _ in range(count):
        z = rng.standard_normal(dim)
        out.append(z / np.linalg.norm(z))
    return out


def run_sample(cfg):
    N = cfg["truncation"]
    if "hyperplane" in cfg:
        P = _hyperplane(cfg["hyperplane"])
        sub = P.affine()
    else:
        spec = _need(cfg, "subspace")
        anchor = _vector(spec.get("anchor", []), "subspace.anchor")
        try:
            if "directions" in spec:
                sub = AffineSubspace(anchor, directions=_frame(spec["directions"], "subspace.directions"))
            else:
                sub = AffineSubspace(anchor, conormals=_frame(spec.get("conormals", []), "subspace.conormals"))
        except GaussRadonError as exc:
            raise ConfigError(str(exc), field="subspace") from exc
    mu = AffineGaussian(sub, N)
    X = sample(mu, cfg["seed"], cfg["count"])
    m = X.shape[0]
    tol = 4.0 / math.sqrt(m)
    probes = []
    for d in _probe_directions(cfg["probe_directions"], N, cfg["seed"]):
        for t in cfg["probe_t"]:
            xs = HVector(t * d)
            emp, exact = empirical_char_fn(X, xs), char_fn(mu, xs)
            probes.append({"t": t, "direction": d.tolist(), "empirical_re": emp.real, "empirical_im": emp.imag,
                           "exact_re": exact.real, "exact_im": exact.imag,
                           "ok": abs(emp.real - exact.real) <= tol and abs(emp.imag - exact.imag) <= tol})
    mean = X.mean(axis=0)
    passed = all(p["ok"] for p in probes)
    result = {"measure": mu.describe(), "count": m, "sample_mean": mean.tolist(),
              "anchor_error_max": float(np.max(np.abs(mean - mu.anchor_dense))),
              "cf_tolerance": tol, "probes": probes}
    k = min(cfg["write_samples"], m)
    series = {"samples.csv": ([f"x{i}" for i in range(N)], X[:k].tolist())}
    return result, series, passed


def run_transform(cfg):
    f = registry.make_functional(_need(cfg, "functional"))
    P = _hyperplane(_need(cfg, "hyperplane"))
    N = _need(cfg, "truncation")
    r = radon_transform(f, P, N, cfg["samples"], cfg["seed"])
    return {"functional": f.describe(), **r.as_dict()}, {}, True


def run_disintegrate(cfg):
    f = registry.make_functional(_need(cfg, "functional"))
    P = _hyperplane(_need(cfg, "hyperplane"))
    F = _frame(_need(cfg, "frame"), "frame")
    N = _need(cfg, "truncation")
    res = disintegrate_check(f, P, F, N, cfg["lhs_samples"], cfg["outer"], cfg["inner"], cfg["seed"])
    probes = []
    for d in _probe_directions(cfg["probe_directions"], N, cfg["seed"]):
        for t in cfg["probe_t"]:
            lhs, rhs = disintegrate_exponential(d, t, P, F, N)
            probes.append({"t": t, "direction": d.tolist(), "lhs_re": lhs.real, "lhs_im": lhs.imag,
                           "rhs_re": rhs.real, "rhs_im": rhs.imag, "ok": abs(lhs - rhs) <= 1e-9})
    res["lhs"] = res["lhs"].as_dict()
    res["functional"] = f.describe()
    res["exp_probes"] = probes
    return res, {}, res["agree"] and all(p["ok"] for p in probes)


def _levels_series(levels):
    keys = list(levels[0]) if levels else []
    return keys, [[lv[k] for k in keys] for lv in levels]


def run_recover(cfg):
    norm = registry.make_norm(cfg["norm"])
    p = _vector(_need(cfg, "point"), "point")
    f = registry.make_functional(_need(cfg, "functional"), norm=norm, point=p)
    conormals = orthonormalize([p] + [_vector(v, "conormals") for v in cfg["conormals"]])
    seq = build_adapted_sequence(conormals, norm, cfg["depth"], seed=_mc.derive_seed(cfg["seed"], 1),
                                 truncation=cfg.get("truncation"), samples=cfg["cert_samples"])
    levels = recover_point(f, p, seq, norm, cfg["samples"], _mc.derive_seed(cfg["seed"], 2), cfg["tail_samples"])
    passed = all(lv["within"] for lv in levels)
    if cfg["final_tolerance"] is not None:
        passed = passed and levels[-1]["error"] <= cfg["final_tolerance"]
    result = {"functional": f.describe(), "sequence": seq.as_dict(), "levels": levels}
    return result, {"levels.csv": _levels_series(levels)}, passed


def run_tails(cfg):
    norm = registry.make_norm(cfg["norm"])
    conormals = _frame(cfg["conormals"], "conormals")
    R = float(_need(cfg, "R"))
    seq = build_adapted_sequence(conormals, norm, cfg["depth"], seed=_mc.derive_seed(cfg["seed"], 1),
                                 truncation=cfg["truncation"], samples=cfg["cert_samples"])
    rows = tail_decay(seq, norm, R, cfg["count"], _mc.derive_seed(cfg["seed"], 2))
    for r in rows:
        r["ok"] = r["bound"] is None or r["estimate"] <= r["bound"] + r["half_width"]
    result = {"R": R, "sequence": seq.as_dict(), "levels": rows}
    return result, {"tails.csv": _levels_series(rows)}, all(r["ok"] for r in rows)


def run_support(cfg):
    norm = registry.make_norm(cfg["norm"])
    K = registry.make_body(_need(cfg, "body"))
    p = _vector(_need(cfg, "point"), "point")
    f = registry.make_functional(_need(cfg, "functional"), norm=norm, point=p)
    if cfg["mode"] not in ("vanishing", "contrapositive"):
        raise ConfigError("mode must be 'vanishing' or 'contrapositive'", field="mode")
    rep = support_experiment(f, K, p, norm, cfg["depth"], cfg["samples"], cfg["seed"], cfg["truncation"],
                             cfg["cert_samples"], cfg["mode"], cfg["witness_count"])
    result = {"functional": f.describe(), **rep.as_dict()}
    return result, {"levels.csv": _levels_series(rep.levels)}, rep.passed


def _offsets(spec):
    if isinstance(spec, dict):
        try:
            return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("offsets needs start, stop, num", field="offsets") from exc
    return np.asarray(spec, dtype=float)


def run_helgason2d(cfg):
    f = registry.make_functional(_need(cfg, "functional"))
    K = registry.make_body(_need(cfg, "body"))
    rep = helgason_check_2d(f, K, cfg["angles"], _offsets(cfg["offsets"]), cfg["samples"], cfg["seed"])
    lines = rep.pop("lines")
    rep["functional"] = f.describe()
    rep["body"] = describe_body(K)
    rep["lines"] = len(lines)
    return rep, {"lines.csv": _levels_series(lines)}, rep["missing_within_noise"]


def run_wiener_sanity(cfg):
    basis = SchauderBasis(cfg["levels"])
    rep = brownian_sanity(basis, cfg["count"], cfg["seed"])
    series = {}
    cond = cfg["condition"]
    passed = rep["passed"]
    if cond:
        f = path_clamp(float(cond.get("t", 1.0)), basis)
        r = condition_functional(f, HVector([1.0]), float(cond["c"]), basis, int(cond.get("samples", 100_000)),
                                 _mc.derive_seed(cfg["seed"], 1))
        ok = abs(r.estimate - float(cond["c"])) <= 3.0 * r.stderr if float(cond.get("t", 1.0)) == 1.0 else True
        rep["condition"] = {**r.as_dict(), "normal": "h(t) = t", "ok": bool(ok)}
        passed = passed and ok
    k = cfg["export_paths"]
    if k:
        mu = AffineGaussian.standard(basis.dimension)
        paths = path_from_coeffs(sample(mu, _mc.derive_seed(cfg["seed"], 2), k), basis)
        series["paths.csv"] = paths
    return rep, series, passed


RUNNERS = {
    "sample": run_sample,
    "transform": run_transform,
    "disintegrate": run_disintegrate,
    "recover": run_recover,
    "tails": run_tails,
    "support": run_support,
    "helgason2d": run_helgason2d,
    "wiener-sanity": run_wiener_sanity,
}


# -- output -------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, HVector):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(obj, target):
    text = json.dumps(obj, sort_keys=True, indent=2, default=_jsonable, allow_nan=False)
    Path(target).write_text(text + "\n")


def _write_series(out, name, data):
    if hasattr(data, "times"):
        write_paths_csv(out / name, data)
        return
    header, rows = data
    with open(out / name, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def run(experiment, cfg, out):
    """Run one resolved experiment; returns the exit code."""
    out.mkdir(parents=True, exist_ok=True)
    try:
        result, series, passed = RUNNERS[experiment](cfg)
    except GaussRadonError as exc:
        status = "config-error" if isinstance(exc, ConfigError) else "error"
        dump_json({"config": cfg, "status": status, "error": exc.as_dict()}, out / "report.json")
        print(json.dumps({"experiment": experiment, "status": status, "error": exc.as_dict()}), file=sys.stderr)
        return exc.exit_code
    for name, data in series.items():
        _write_series(out, name, data)
    status = "ok" if passed else "tolerance"
    dump_json({"config": cfg, "status": status, "passed": bool(passed), "result": result}, out / "report.json")
    print(f"{experiment}: {'pass' if passed else 'FAIL'} -> {out / 'report.json'}")
    return 0 if passed else ToleranceError.exit_code


def build_parser():
    ap = argparse.ArgumentParser(prog="gaussradon", description="Gaussian Radon transform experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run a {name} experiment")
        sp.add_argument("--config", required=True, help="JSON config path or shipped:NAME")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--out", help="output directory (default out/<experiment>)")
        sp.add_argument("--workers", type=int, default=1, help="threads for sharded Monte Carlo")
    lp = sub.add_parser("list", help="list registered norms, bodies, functionals and shipped configs")
    lp.add_argument("--json", action="store_true", help="machine-readable listing")
    return ap


def _print_listing(as_json):
    data = registry.listing()
    data["configs"] = shipped_configs()
    if as_json:
        print(json.dumps(data, indent=2, sort_keys=True))
        return
    for kind in ("norms", "bodies", "functionals"):
        print(f"{kind}:")
        for e in data[kind]:
            print(f"  {e['name']}: {e['summary']}")
            for k, v in e["params"].items():
                print(f"    {k}: {v}")
    print("configs:")
    for c in data["configs"]:
        print(f"  shipped:{c}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list":
        _print_listing(args.json)
        return 0
    try:
        if args.workers < 1:
            raise ConfigError("workers must be >= 1", field="--workers")
        raw = load_config(args.config)
        cfg = resolve(raw, args.command, args.seed)
    except ConfigError as exc:
        print(json.dumps({"status": "config-error", "error": exc.as_dict()}), file=sys.stderr)
        return exc.exit_code
    _mc.set_workers(args.workers)
    out = Path(args.out or raw.get("out") or f"out/{args.command}")
    return run(args.command, cfg, out)


if __name__ == "__main__":
    sys.exit(main())
