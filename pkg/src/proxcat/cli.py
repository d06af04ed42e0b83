"""Batch front-end: run a JSON scenario, write CSV and JSON outputs, exit with a status code.

Usage::

    proxcat <check|ppa|curve|rates> --config <path> [--out <dir>] [--seed <u64>]

Exit codes: 0 all checks pass, 1 some check fails, 2 configuration error,
3 numeric failure during the run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import checkers as ck
from . import engine, rates
from .errors import InvalidInput, NumericFailure, ProxcatError
from .geometry import Euclidean, HalfPlane, Spider
from .rates import Counterfunction, Modulus
from .resolvents import (
    Constant,
    Dilation,
    Identity,
    Negation,
    ProjectionOnto,
    ProxDistanceToPoint,
    ProxQuadraticToPoint,
    ProxQuadraticToSet,
    ProxScaledSquaredNorm,
    ResolventOfMonotoneLinear,
    ResolventOfNonexpansive,
    Rotation,
    member,
)
from .sets import Empty, EuclideanAffineLine, Segment, Singleton, SpiderRaySegment, Unknown, points_of

log = logging.getLogger("proxcat")

COMMANDS = ("check", "ppa", "curve", "rates")
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
SCHEMA_ID = "proxcat/1"


class ConfigError(InvalidInput):
    pass


# -- results ----------------------------------------------------------------


@dataclass
class Entry:
    name: str
    passed: bool
    data: dict


@dataclass
class RunReport:
    name: str
    command: str
    seed: int
    entries: list = field(default_factory=list)
    files: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def add(self, name, passed, data):
        self.entries.append(Entry(name, bool(passed), data))

    def add_report(self, name, rep: ck.ViolationReport):
        self.add(name, rep.passed, rep.to_dict())

    def to_dict(self):
        return {
            "schema": SCHEMA_ID,
            "name": self.name,
            "command": self.command,
            "seed": self.seed,
            "pass": self.passed,
            "checks": [{**e.data, "name": e.name, "pass": e.passed} for e in self.entries],
            "files": sorted(self.files),
        }


# -- config loading ---------------------------------------------------------


def load_schema() -> dict:
    return json.loads(resources.files("proxcat").joinpath("config.schema.json").read_text("utf-8"))


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config: {e.strerror}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}") from None
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        lines = []
        for err in errors:
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            lines.append(f"{path}: at {where}: {_short(err)}")
        raise ConfigError("\n".join(lines))
    return cfg


def _short(err) -> str:
    # oneOf failures: report the branch whose kind matched, if any
    if err.validator == "oneOf" and err.context:
        best = jsonschema.exceptions.best_match(err.context)
        return best.message
    return err.message


def build_space(spec):
    kind = spec["kind"]
    if kind == "euclidean":
        return Euclidean(spec["dim"])
    if kind == "halfplane":
        return HalfPlane()
    if kind == "spider":
        return Spider(spec["rays"])
    raise ConfigError(f"unknown space kind {kind!r}")


def build_set(space, spec):
    kind = spec["kind"]
    pt = space.parse_point
    if kind == "singleton":
        return Singleton(pt(spec["a"]))
    if kind == "segment":
        return Segment(pt(spec["a"]), pt(spec["b"]))
    if kind == "line":
        if not isinstance(space, Euclidean):
            raise ConfigError("line sets need a Euclidean space")
        return EuclideanAffineLine(pt(spec["point"]), tuple(spec["direction"]))
    if kind == "spider_ray_segment":
        if not isinstance(space, Spider):
            raise ConfigError("spider_ray_segment sets need a spider space")
        return SpiderRaySegment(spec["ray"], spec["r_min"], spec["r_max"])
    raise ConfigError(f"unknown set kind {kind!r}")


def build_map(space, spec):
    kind = spec["kind"]
    if kind == "identity":
        return Identity()
    if kind == "negation":
        return Negation()
    if kind == "constant":
        return Constant(space.parse_point(spec["a"]))
    if kind == "rotation":
        return Rotation(float(spec["angle"]))
    if kind == "projection":
        return ProjectionOnto(build_set(space, spec["set"]))
    raise ConfigError(f"unknown map kind {kind!r}")


def build_family(space, spec):
    kind = spec["kind"]
    if kind == "prox_quadratic_to_point":
        return ProxQuadraticToPoint(space.parse_point(spec["a"]))
    if kind == "prox_distance_to_point":
        return ProxDistanceToPoint(space.parse_point(spec["a"]))
    if kind == "prox_quadratic_to_set":
        return ProxQuadraticToSet(build_set(space, spec["set"]))
    if kind == "prox_scaled_squared_norm":
        return ProxScaledSquaredNorm(float(spec["c"]))
    if kind == "resolvent_of_nonexpansive":
        return ResolventOfNonexpansive(build_map(space, spec["map"]), float(spec.get("tol", 1e-10)))
    if kind == "resolvent_of_monotone_linear":
        return ResolventOfMonotoneLinear(tuple(tuple(r) for r in spec["matrix"]))
    if kind == "dilation":
        return Dilation()
    raise ConfigError(f"unknown family kind {kind!r}")


def build_schedule(spec):
    kind = spec["kind"]
    if kind == "constant":
        return engine.ConstantSteps(float(spec["c"]))
    if kind == "harmonic":
        return engine.HarmonicSteps()
    if kind == "explicit":
        return engine.ExplicitSteps(tuple(spec["values"]))
    raise ConfigError(f"unknown schedule kind {kind!r}")


def build_phi(spec):
    if spec is None:
        return Modulus.power(1.0, 2)
    return Modulus.power(spec.get("c", 1.0), spec.get("p", 2))


def build_g(spec) -> Counterfunction:
    kind = spec["kind"]
    if kind == "constant":
        return Counterfunction.constant(spec["k"])
    if kind == "linear":
        return Counterfunction.linear(spec["a"], spec.get("b", 0))
    if kind == "table":
        return Counterfunction.table(spec["values"])
    raise ConfigError(f"unknown counterfunction kind {kind!r}")


def build_grid(spec):
    kind = spec["kind"]
    if kind == "geometric":
        return engine.geometric_gammas(spec["start"], spec["ratio"], spec["count"])
    if kind == "geomspace":
        if not spec["stop"] > spec["start"]:
            raise ConfigError("geomspace grid needs stop > start")
        return [float(v) for v in np.geomspace(spec["start"], spec["stop"], spec["count"])]
    if kind == "explicit":
        return [float(v) for v in spec["values"]]
    raise ConfigError(f"unknown grid kind {kind!r}")


def _require(cfg, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"command {cfg['command']!r} needs field(s): {', '.join(missing)}")


def _sampling(cfg, space, seed) -> ck.SampleConfig:
    _require(cfg, "sampling")
    s = cfg["sampling"]
    return ck.SampleConfig(seed, s["count"], float(s["radius"]), space.parse_point(s["base"]))


# -- output helpers ---------------------------------------------------------


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def write_json(path: Path, obj):
    text = json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8", newline="")


def _label(name, **params):
    if not params:
        return name
    inner = ",".join(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}" for k, v in params.items())
    return f"{name}[{inner}]"


# -- check ------------------------------------------------------------------

GEOMETRY_CHECKS = {
    "cat0": ck.check_cat0,
    "geodesic_law": ck.check_geodesic_law,
    "quasi_axioms": ck.check_quasi_axioms,
    "cauchy_schwarz": ck.check_cauchy_schwarz,
    "hilbert_reduction": ck.check_hilbert_reduction,
}

EQUIVALENCE_CHECKS = ("nonexpansive", "resolvent_identity", "mutual_fne")


def _tol(cfg, default=None):
    t = cfg.get("tolerance")
    if t is not None:
        return float(t)
    return default


def run_check(cfg, space, seed, report: RunReport, out: Path):
    _require(cfg, "checks")
    family = build_family(space, cfg["family"]) if "family" in cfg else None
    T_map = build_map(space, cfg["map"]) if "map" in cfg else None
    gammas = [float(g) for g in cfg.get("gammas", [0.5, 1.0, 2.0])]
    names = []
    for n in cfg["checks"]:
        names.extend(EQUIVALENCE_CHECKS if n == "equivalence" else [n])

    per_check = cfg.get("tolerances", {})
    current = {"name": None}

    def kw(default):
        name = current["name"]
        t = per_check.get(name)
        if t is None and name in EQUIVALENCE_CHECKS:
            t = per_check.get("equivalence")
        if t is None:
            t = _tol(cfg, default)
        return {} if t is None else {"tol": float(t)}

    def need_family(n):
        if family is None:
            raise ConfigError(f"check {n!r} needs a family")

    sampled = None

    def cfg_s():
        nonlocal sampled
        if sampled is None:
            sampled = _sampling(cfg, space, seed)
        return sampled

    for n in names:
        log.info("running %s", n)
        current["name"] = n
        if n in GEOMETRY_CHECKS:
            if n == "hilbert_reduction" and not isinstance(space, Euclidean):
                raise ConfigError("hilbert_reduction applies to Euclidean space only")
            report.add_report(n, GEOMETRY_CHECKS[n](space, cfg_s(), **kw(None)))
        elif n == "nonexpansive":
            if family is not None:
                for g in gammas:
                    rep = ck.check_nonexpansive(space, member(space, family, g), cfg_s(), **kw(None))
                    rep.params = {"gamma": g}
                    report.add_report(_label(n, gamma=g), rep)
            elif T_map is not None:
                rep = ck.check_nonexpansive(space, lambda x: T_map.apply(space, x), cfg_s(), **kw(None))
                report.add_report(n, rep)
            else:
                raise ConfigError("check 'nonexpansive' needs a family or a map")
        elif n == "resolvent_identity":
            need_family(n)
            for g in gammas:
                rep = ck.check_resolvent_identity(space, family, g, cfg_s(), **kw(None))
                report.add_report(_label(n, gamma=g), rep)
        elif n in ("mutual_fne", "mutual_p2"):
            need_family(n)
            fn = ck.check_mutual_fne if n == "mutual_fne" else ck.check_mutual_p2
            for lam in gammas:
                for mu in gammas:
                    T, U = member(space, family, lam), member(space, family, mu)
                    rep = fn(space, T, U, lam, mu, cfg_s(), **kw(None))
                    report.add_report(_label(n, **{"lambda": lam, "mu": mu}), rep)
        elif n == "halp":
            need_family(n)
            pairs = [(lam, mu) for lam in gammas for mu in gammas if lam <= mu]
            for lam, mu in pairs:
                T, U = member(space, family, lam), member(space, family, mu)
                if "points" in cfg:
                    pts = [space.parse_point(p) for p in cfg["points"]]
                    rep = ck.check_halp_at(space, T, U, pts, **kw(None))
                else:
                    rep = ck.check_halp(space, T, U, cfg_s(), **kw(None))
                rep.params = {"lambda": lam, "mu": mu}
                report.add_report(_label(n, **{"lambda": lam, "mu": mu}), rep)
        elif n == "fixed_set":
            need_family(n)
            report.add_report(n, ck.check_fixed_set(space, family, gammas, **kw(None)))
        elif n in ("uniform_p2", "uniq_lemma"):
            _run_uniform(n, cfg, space, family, T_map, gammas, cfg_s(), report, kw(None))
        else:
            raise ConfigError(f"unknown check {n!r}")

    rows = [
        (e.name, e.data.get("max_violation"), e.data.get("tolerance"), e.passed) for e in report.entries
    ]
    path = out / f"{report.name}.checks.csv"
    write_csv(path, ["check_name", "max_violation", "tolerance", "pass"], rows)
    report.files.append(path.name)


def _run_uniform(n, cfg, space, family, T_map, gammas, cfg_s, report, kw):
    _require(cfg, "eps")
    eps = [float(e) for e in cfg["eps"]]
    phi = build_phi(cfg.get("phi"))
    targets = []
    if family is not None:
        # T_gamma of a family with modulus phi is uniformly (P2) with slack gamma * phi
        for g in gammas:
            targets.append(({"gamma": g}, member(space, family, g), g, family.fixed_set(space)))
    elif T_map is not None:
        _require(cfg, "scale")
        targets.append(({}, lambda x: T_map.apply(space, x), float(cfg["scale"]), T_map.fixed_set(space)))
    else:
        raise ConfigError(f"check {n!r} needs a family or a map")
    for params, T, scale, F in targets:
        if n == "uniform_p2":
            reps = ck.check_uniform_p2(
                space, T, cfg_s.base, cfg_s.radius, phi, scale, cfg_s,
                kw.get("tol", ck.DEFAULT_TOL), eps,
            )
        else:
            if "z" in cfg:
                z = space.parse_point(cfg["z"])
            elif isinstance(F, (Empty, Unknown)):
                raise ConfigError("uniq_lemma needs a fixed point z")
            else:
                z = points_of(space, F, 1)[0]
            reps = ck.check_uniq_lemma(space, T, z, cfg_s, phi, scale, eps, **kw)
        for e, rep in reps.items():
            report.add_report(_label(n, **params, eps=e), rep)


# -- ppa --------------------------------------------------------------------


def run_ppa_command(cfg, space, seed, report: RunReport, out: Path):
    _require(cfg, "family", "schedule", "x0", "eps")
    family = build_family(space, cfg["family"])
    schedule = build_schedule(cfg["schedule"])
    theta = engine.theta_for_schedule(schedule)
    phi = build_phi(cfg.get("phi"))
    eps = [float(e) for e in cfg["eps"]]
    x0 = space.parse_point(cfg["x0"])
    if "p" in cfg:
        p = space.parse_point(cfg["p"])
    else:
        F = family.fixed_set(space)
        if not isinstance(F, Singleton):
            raise ConfigError("ppa needs a reference point p when the fixed set is not a singleton")
        p = F.a
    b = float(cfg["b"]) if "b" in cfg else space.dist(x0, p)
    if space.dist(x0, p) > b * (1 + 1e-12):
        raise ConfigError(f"x0 lies outside the ball B(p, b) with b={b!r}")
    if b == 0:
        # x0 = p is fixed; any positive radius gives the same trivial ball
        b = 1.0
    needed = max(rates.ppa_rate_bound(theta, b, phi, e) for e in eps) + 1
    steps = int(cfg.get("steps", needed))
    log.info("ppa: %d steps", steps)

    if "sampling" in cfg:
        gam = [float(g) for g in schedule.gammas(min(steps, 64))]
        s = cfg["sampling"]
        inv = engine.check_ball_invariance(
            space, family, sorted(set(gam)), p, b, ck.SampleConfig(seed, s["count"], b, p)
        )
        report.add_report("ball_invariance", inv)

    trace = engine.run_ppa(space, family, schedule, x0, steps, p=p)
    b_data = trace.b
    report.add(
        "trace_in_ball", b_data <= b * (1 + 1e-12) + 1e-15, {"b": b, "max_d_to_p": b_data}
    )
    for rc in engine.verify_ppa_rate(trace, theta, max(b_data, 1e-300), phi, eps):
        d = rc.to_dict()
        d.update({"b": b_data, "theta": theta.label, "steps": steps})
        report.add(_label("ppa_rate", eps=rc.eps), rc.passed, d)

    every = int(cfg.get("csv_every", 1))
    idx = np.arange(0, steps + 1, every)
    if idx[-1] != steps:
        idx = np.append(idx, steps)
    path = out / f"{report.name}.ppa.csv"
    write_csv(
        path,
        ["n", "gamma_n", "d_to_p", "step"],
        (
            (
                int(n),
                float(trace.gammas[n]) if n < steps else None,
                float(trace.d_to_p[n]),
                float(trace.steps[n]) if n < steps else None,
            )
            for n in idx
        ),
    )
    report.files.append(path.name)


# -- curve ------------------------------------------------------------------


def run_curve(cfg, space, seed, report: RunReport, out: Path):
    _require(cfg, "family", "grid")
    family = build_family(space, cfg["family"])
    gammas = build_grid(cfg["grid"])
    if "points" in cfg:
        bases = [space.parse_point(p) for p in cfg["points"]]
    else:
        s = _sampling(cfg, space, seed)
        bases = [space.sample(ck.sample_rng(seed, i), s.base, s.radius) for i in range(s.count)]
    eps = [float(e) for e in cfg.get("eps", [])]
    gs = [build_g(g) for g in cfg.get("g", [])]
    if eps and not gs or gs and not eps:
        raise ConfigError("metastability needs both eps and g")
    F = family.fixed_set(space)
    projectable = not isinstance(F, (Empty, Unknown))
    limit_eps = cfg.get("limit_eps")
    if limit_eps is not None and not projectable:
        raise ConfigError("limit_eps needs a family with an analytic fixed set")
    cont = cfg.get("continuity")

    growth = []
    meta = {(e, g.label): [] for e in eps for g in gs}
    limit = []
    conts = {e: [] for e in (cont["eps"] if cont else [])}
    width = len(str(len(bases) - 1))
    for k, x in enumerate(bases):
        samples = engine.sample_curve(space, family, x, gammas)
        growth.append((k, engine.curve_growth_report(space, x, samples)))
        target = engine.project_fixed_set(space, F, x) if projectable else None
        b = max(s.d_from_base for s in samples)
        for e in eps:
            for g in gs:
                mc = engine.verify_curve_metastability(space, samples, e, g, b)
                meta[(e, g.label)].append((k, mc))
        if limit_eps is not None:
            ok, d = engine.verify_curve_limit(space, samples, target, limit_eps)
            limit.append((k, ok, d))
        if cont and b > 0:
            for e in cont["eps"]:
                rep = engine.verify_curve_continuity(
                    space, family, x, cont["Gamma"], b, e, seed + k, cont.get("count", 100),
                    gamma_max=gammas[-1],
                )
                conts[e].append((k, rep))
        path = out / f"{report.name}.curve-{k:0{width}d}.csv"
        write_csv(
            path,
            ["gamma", "d_from_base", "d_to_limit"],
            (
                (s.gamma, s.d_from_base, space.dist(s.point, target) if target is not None else None)
                for s in samples
            ),
        )
        report.files.append(path.name)

    k, worst = max(growth, key=lambda it: it[1].max_violation)
    report.add(
        "curve_growth",
        all(r.passed for _, r in growth),
        {"bases": len(growth), "worst_base": k, **worst.to_dict()},
    )
    for (e, gl), items in meta.items():
        bad = [k for k, mc in items if not mc.passed]
        worst = max(items, key=lambda it: ((it[1].witness or 0) / max(it[1].bound, 1), it[1].bound))
        report.add(
            _label("curve_metastability", eps=e, g=gl),
            not bad,
            {
                "bases": len(items),
                "failures": bad,
                "worst": {"base": worst[0], **worst[1].to_dict()},
            },
        )
    if limit_eps is not None:
        bad = [k for k, ok, _ in limit if not ok]
        report.add(
            _label("curve_limit", eps=float(limit_eps)),
            not bad,
            {"bases": len(limit), "failures": bad, "max_distance": max(d for _, _, d in limit),
             "gamma_max": gammas[-1]},
        )
    for e, items in conts.items():
        bad = [k for k, r in items if not r.passed]
        report.add(
            _label("curve_continuity", eps=float(e)),
            not bad,
            {
                "bases": len(items),
                "failures": bad,
                "max_violation": max((r.max_violation for _, r in items), default=None),
                "Gamma": cont["Gamma"],
            },
        )


# -- rates ------------------------------------------------------------------


def _qmcp_sequence(rng, kind, b, eps, length):
    if kind == 0:
        a = np.sort(rng.uniform(0.0, b, length))
    elif kind == 1:
        # staircase: jumps just above eps at random times
        jumps = np.zeros(length)
        times = rng.choice(np.arange(1, length), size=min(length - 1, int(b / eps) + 1), replace=False)
        jumps[times] = eps * (1.0 + 1e-3 + 0.5 * rng.random(len(times)))
        a = np.minimum(np.cumsum(jumps), b)
    else:
        inc = rng.exponential(1.0, length) * (rng.random(length) < 0.05)
        c = np.cumsum(inc)
        a = b * c / c[-1] if c[-1] > 0 else c
    return a


def _qmcp_sampling(q, seed):
    b_values = q.get("b_values", [q.get("b", 1.0)])
    g_list = [build_g(g) for g in q.get("g_list", [q["g"]] if "g" in q else [])]
    if not g_list:
        raise ConfigError("qmcp_sampling needs g_list")
    count = q.get("count", 1000)
    failures, worst = [], 0.0
    for i in range(count):
        rng = ck.sample_rng(seed, i)
        b = float(b_values[int(rng.integers(len(b_values)))])
        g = g_list[int(rng.integers(len(g_list)))]
        # eps = b / u with u in [1, 10] keeps the bound small
        eps = b / (1.0 + 9.0 * rng.random())
        bound = rates.qmcp_bound(b, eps, g)
        length = g.tilde(bound) + 1
        a = _qmcp_sequence(rng, int(rng.integers(3)), b, eps, length)
        n = rates.find_metastable_witness(a, eps, g, limit=bound)
        if n is None:
            failures.append({"index": i, "b": b, "eps": eps, "g": g.label, "bound": bound})
        else:
            worst = max(worst, n / bound if bound else 0.0)
    return {"count": count, "failures": failures[:10], "failure_count": len(failures),
            "max_witness_over_bound": worst}, not failures


def run_rates(cfg, space, seed, report: RunReport, out: Path):
    _require(cfg, "quantities")
    rows = []
    for q in cfg["quantities"]:
        name = q["quantity"]
        witness = None
        params = {k: v for k, v in q.items() if k not in ("quantity", "expect")}
        if name == "qmcp_sampling":
            data, ok = _qmcp_sampling(q, seed)
            value = data["failure_count"]
            report.add(name, ok, {"params": params, **data})
            rows.append((name, json.dumps(params, sort_keys=True), value, data["max_witness_over_bound"], ok))
            continue
        if name == "gtilde_iterate":
            value = rates.gtilde_iterate(build_g(q["g"]), q["k"])
        elif name == "qmcp_bound":
            g = build_g(q["g"])
            value = rates.qmcp_bound(q["b"], q["eps"], g)
            if "length" in q:
                rng = ck.sample_rng(seed, 0)
                a = np.sort(rng.uniform(0.0, q["b"], q["length"]))
                witness = rates.find_metastable_witness(a, q["eps"], g, limit=value)
        elif name == "kp_bound":
            value = rates.kp_bound(
                engine.theta_for_schedule(build_schedule(q["schedule"])), q["b"], build_phi(q.get("phi")), q["eps"]
            )
        elif name == "ppa_rate_bound":
            value = rates.ppa_rate_bound(
                engine.theta_for_schedule(build_schedule(q["schedule"])), q["b"], build_phi(q.get("phi")), q["eps"]
            )
        elif name == "curve_metastability_bound":
            value = rates.curve_metastability_bound(q["b"], q["eps"], build_g(q["g"]))
        elif name == "curve_continuity_delta":
            value = rates.curve_continuity_delta(q["Gamma"], q["b"], q["eps"])
        else:
            raise ConfigError(f"unknown quantity {name!r}")
        ok = True
        if "expect" in q:
            ok = math.isclose(value, q["expect"], rel_tol=1e-12, abs_tol=0.0) or value == q["expect"]
        if witness is not None or "length" in q:
            ok = ok and witness is not None and witness <= value
        report.add(
            _label(name, **{k: v for k, v in params.items() if not isinstance(v, (dict, list))}),
            ok,
            {"params": params, "value": value, "expect": q.get("expect"), "witness": witness},
        )
        rows.append((name, json.dumps(params, sort_keys=True), value, witness, ok))
    path = out / f"{report.name}.rates.csv"
    write_csv(path, ["quantity", "params", "value", "witness", "pass"], rows)
    report.files.append(path.name)


# -- driver -----------------------------------------------------------------

RUNNERS = {"check": run_check, "ppa": run_ppa_command, "curve": run_curve, "rates": run_rates}


def run_scenario(config_path, out_dir=None, seed: Optional[int] = None, command: Optional[str] = None):
    """Run one scenario file; returns the RunReport and writes CSV and JSON outputs."""
    cfg = load_config(config_path)
    if command is not None and command != cfg["command"]:
        raise ConfigError(f"config is a {cfg['command']!r} scenario, not {command!r}")
    if seed is None:
        seed = int(cfg.get("seed", 0))
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
    out = Path(out_dir if out_dir is not None else ".")
    out.mkdir(parents=True, exist_ok=True)
    space = build_space(cfg["space"])
    report = RunReport(cfg["name"], cfg["command"], seed)
    RUNNERS[cfg["command"]](cfg, space, seed, report, out)
    report.files.append(f"{report.name}.report.json")
    write_json(out / f"{report.name}.report.json", report.to_dict())
    return report


def _setup_logging():
    level = os.environ.get("PROXCAT_LOG", "off").lower()
    levels = {"off": logging.CRITICAL + 1, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        raise ConfigError(f"PROXCAT_LOG must be off, info or debug, got {level!r}")
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(levels[level])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="proxcat", description="Run a proxcat scenario.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="scenario JSON file")
    parser.add_argument("--out", default=None, help="output directory (default: current directory)")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_PASS
    try:
        _setup_logging()
        report = run_scenario(args.config, args.out, args.seed, args.command)
    except NumericFailure as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidInput, ProxcatError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    for e in report.entries:
        print(f"{'PASS' if e.passed else 'FAIL'} {report.name} {e.name}")
    print(f"{'PASS' if report.passed else 'FAIL'} {report.name}")
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
