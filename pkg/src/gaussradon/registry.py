"""Named norms, bodies and functionals available to experiment configs."""

from dataclasses import dataclass

from . import functionals as fx
from .errors import ConfigError
from .hilbert import Ball, Hull
from .norms import HilbertNorm, WeightedL2Norm
from .wiener import SchauderBasis, WienerSupNorm, path_clamp


@dataclass(frozen=True)
class Entry:
    name: str
    summary: str
    schema: dict  # parameter -> description
    factory: object


def _param(params, key, field, default=None, required=False):
    if key in params:
        return params[key]
    if required:
        raise ConfigError(f"missing parameter {key!r}", field=f"{field}.params.{key}")
    return default


def _check_keys(params, entry, field):
    extra = sorted(set(params) - set(entry.schema))
    if extra:
        raise ConfigError(f"unknown parameter(s) {extra} for {entry.name!r}", field=f"{field}.params")


NORMS = {
    e.name: e
    for e in [
        Entry("hilbert", "Hilbert norm; not measurable, a negative control", {},
              lambda p, f: HilbertNorm()),
        Entry("weighted-l2", "sqrt(sum ratio^(i+1) x_i^2); analytic tail bounds",
              {"ratio": "weight ratio in (0, 1), default 0.25"},
              lambda p, f: WeightedL2Norm(float(_param(p, "ratio", f, 0.25)))),
        Entry("wiener-sup", "sup norm of the Schauder path on the dyadic grid",
              {"levels": "Schauder depth J (grid 2^J + 1 points), default 11"},
              lambda p, f: WienerSupNorm(int(_param(p, "levels", f, 11)))),
    ]
}

BODIES = {
    e.name: e
    for e in [
        Entry("ball", "closed ball", {"center": "coefficient list", "radius": "positive real"},
              lambda p, f: Ball(_param(p, "center", f, required=True), float(_param(p, "radius", f, required=True)))),
        Entry("hull", "convex hull of finitely many points", {"points": "list of coefficient lists"},
              lambda p, f: Hull(tuple(_param(p, "points", f, required=True)))),
    ]
}


def _bump(p, f, ctx):
    bump = fx.CoordinateBump(
        _param(p, "center", f, required=True), float(_param(p, "radius", f, required=True)),
        float(_param(p, "height", f, 1.0)), _param(p, "profile", f, "tent"), _param(p, "dim", f),
    )
    out = bump.functional()
    if ctx.get("norm") is not None and ctx.get("point") is not None:
        out = out.with_modulus(bump.modulus(ctx["point"], ctx["norm"], fx.default_radii()), ctx["point"])
    return out


FUNCTIONALS = {
    e.name: e
    for e in [
        Entry("clamped-coordinate", "clip(x_index, lo, hi)",
              {"index": "0-based coordinate", "lo": "default -10", "hi": "default 10"},
              lambda p, f, c: fx.clamped_coordinate(int(_param(p, "index", f, required=True)),
                                                    float(_param(p, "lo", f, -10.0)), float(_param(p, "hi", f, 10.0)))),
        Entry("constant", "f = value", {"value": "real, default 1"},
              lambda p, f, c: fx.constant(float(_param(p, "value", f, 1.0)))),
        Entry("coordinate-bump", "height * profile(|x_{<dim} - center| / radius); profile tent or smooth",
              {"center": "coefficient list", "radius": "positive real", "height": "default 1",
               "profile": "tent | smooth", "dim": "coordinates read, default len(center)"},
              _bump),
        Entry("exp-probe", "cos or sin of t <x*, x>",
              {"xstar": "coefficient list", "t": "default 1", "part": "re | im"},
              lambda p, f, c: fx.exp_probe(_param(p, "xstar", f, required=True), float(_param(p, "t", f, 1.0)),
                                           _param(p, "part", f, "re"))),
        Entry("gaussian-weight", "exp(-|x_{<dim}|^2 / 2)", {"dim": "coordinates read"},
              lambda p, f, c: fx.gaussian_weight(int(_param(p, "dim", f, required=True)))),
        Entry("path-clamp", "clip(x(t), lo, hi) for the Schauder path",
              {"t": "dyadic grid time", "levels": "Schauder depth", "lo": "default -10", "hi": "default 10"},
              lambda p, f, c: path_clamp(float(_param(p, "t", f, required=True)),
                                         SchauderBasis(int(_param(p, "levels", f, required=True))),
                                         float(_param(p, "lo", f, -10.0)), float(_param(p, "hi", f, 10.0)))),
        Entry("product-cos", "prod cos(freqs_i x_i + phases_i)", {"freqs": "list", "phases": "list, default 0"},
              lambda p, f, c: fx.product_cos(_param(p, "freqs", f, required=True), _param(p, "phases", f))),
        Entry("product-logistic", "prod logistic(scales_i x_i + shifts_i)", {"scales": "list", "shifts": "list, default 0"},
              lambda p, f, c: fx.product_logistic(_param(p, "scales", f, required=True), _param(p, "shifts", f))),
    ]
}


def _lookup(table, spec, field, kind):
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError(f"{kind} must be an object with a 'name'", field=field)
    entry = table.get(spec["name"])
    if entry is None:
        raise ConfigError(f"unknown {kind} {spec['name']!r}; known: {sorted(table)}", field=f"{field}.name")
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be an object", field=f"{field}.params")
    _check_keys(params, entry, field)
    return entry, params


def _wrap(field, build):
    try:
        return build()
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError, IndexError) as exc:
        raise ConfigError(f"invalid parameters: {exc}", field=field) from exc


def make_norm(spec, field="norm"):
    entry, params = _lookup(NORMS, spec, field, "norm model")
    return _wrap(field, lambda: entry.factory(params, field))


def make_body(spec, field="body"):
    entry, params = _lookup(BODIES, spec, field, "body")
    return _wrap(field, lambda: entry.factory(params, field))


def make_functional(spec, field="functional", norm=None, point=None):
    """Build a registered functional; a ``modulus`` entry of ``spec`` with a
    Lipschitz constant attaches a continuity modulus at ``point``."""
    entry, params = _lookup(FUNCTIONALS, spec, field, "functional")
    f = _wrap(field, lambda: entry.factory(params, field, {"norm": norm, "point": point}))
    mod = spec.get("modulus")
    if mod is not None:
        if norm is None or point is None:
            raise ConfigError("a modulus needs a norm and a point", field=f"{field}.modulus")
        if "lipschitz" not in mod:
            raise ConfigError("modulus needs 'lipschitz'", field=f"{field}.modulus.lipschitz")
        table = _wrap(f"{field}.modulus", lambda: fx.lipschitz_modulus(
            float(mod["lipschitz"]), f.min_dim, norm, fx.default_radii(), f.bound))
        f = f.with_modulus(table, point)
    return f


def listing():
    """Registry contents in stable order."""
    out = {}
    for kind, table in (("norms", NORMS), ("bodies", BODIES), ("functionals", FUNCTIONALS)):
        out[kind] = [
            {"name": name, "summary": table[name].summary, "params": dict(sorted(table[name].schema.items()))}
            for name in sorted(table)
        ]
    return out
