"""Scenario runner and the ``warpform`` command line."""
from __future__ import annotations

import argparse
import csv
import inspect
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import gallery as G
from .ambient import AmbientSpace
from .classify import (Tag, b1_structure_check, b2_structure_check, classify_sample, type_c_consistency,
                       verify_pointwise_relations)
from .errors import ScenarioError, TypeInconsistencyError, WarpformError
from .expr import compile_expr, compile_matrix, compile_vector
from .immersion import Immersion, codazzi_residual, gauss_residual, isometry_residual, sample, second_ff, spherical_hull
from .warped import BlockDomain, FactorChart, Grid, WarpedDomain, check_distributions, eta_data, hv_split

SUITES = ("isometry", "gauss", "codazzi", "classify", "b1", "b2", "typec", "hull", "distributions")
POINT_SUITES = ("isometry", "gauss", "codazzi", "classify")
STENCIL_SUITES = ("codazzi", "b1", "b2")
DEFAULT_TOLERANCES = {
    "isometry": 1e-8,
    "gauss": 1e-6,
    "codazzi": 1e-5,
    "relations": 1e-8,
    "hull": 1e-6,
    "distributions": 1e-8,
    "classify_agreement": 0.99,
}


# ---------------------------------------------------------------- scenarios

@dataclass
class Scenario:
    instance: object
    params: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    suites: list = field(default_factory=lambda: ["isometry", "gauss", "classify"])
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    points: dict = field(default_factory=dict)
    hull: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        if not isinstance(d, dict) or "instance" not in d:
            raise ScenarioError("scenario must be an object with an 'instance' key")
        unknown = set(d) - {"instance", "params", "grid", "suites", "tolerances", "seed", "points", "hull"}
        if unknown:
            raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
        sc = cls(d["instance"], dict(d.get("params", {})), dict(d.get("grid", {})),
                 list(d.get("suites", ["isometry", "gauss", "classify"])),
                 dict(d.get("tolerances", {})), int(d.get("seed", 0)), dict(d.get("points", {})),
                 dict(d.get("hull", {})))
        bad = [s for s in sc.suites if s not in SUITES]
        if bad:
            raise ScenarioError(f"unknown suites {bad}; choose from {list(SUITES)}")
        for k, v in sc.tolerances.items():
            if not isinstance(v, (int, float)) or not v > 0:
                raise ScenarioError(f"tolerance {k!r} must be positive")
        return sc

    def to_dict(self) -> dict:
        return {"instance": self.instance, "params": self.params, "grid": self.grid, "suites": self.suites,
                "tolerances": self.tolerances, "seed": self.seed, "points": self.points, "hull": self.hull}

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    return Scenario.from_dict(data)


@dataclass
class Target:
    name: str
    dom: BlockDomain
    f: Immersion | None
    expected_type: str
    counts: tuple
    bounds: tuple


def _inline_target(inst: dict) -> Target:
    try:
        p, n = int(inst["p"]), int(inst["n"])
        names = list(inst.get("vars") or [f"z{i}" for i in range(p + n)])
        bounds = tuple(tuple(b) for b in inst["bounds"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"inline instance needs p, n and bounds ({exc})") from None
    if len(names) != p + n:
        raise ScenarioError("vars must list p + n names")
    if "rho" in inst:
        Lv, Mv = names[:p], names[p:]
        gL = compile_matrix(inst["gL"], Lv) if "gL" in inst else (lambda u, e=np.eye(p): e)
        gM = compile_matrix(inst["gM"], Mv) if "gM" in inst else (lambda u, e=np.eye(n): e)
        dom = WarpedDomain(FactorChart(p, bounds[:p], gL), FactorChart(n, bounds[p:], gM),
                           compile_expr(inst["rho"], Lv))
    elif "metric" in inst:
        dom = BlockDomain(p, n, bounds, compile_matrix(inst["metric"], names))
    else:
        raise ScenarioError("inline instance needs either rho or metric")
    f = None
    if "map" in inst:
        c = float(inst.get("c", 0.0))
        sp = AmbientSpace(c, int(inst.get("ambient_dim", len(inst["map"]) - (0 if c == 0 else 1))))
        f = Immersion(dom, sp, compile_vector(inst["map"], names), True, inst.get("name", "inline"))
    counts = tuple(inst.get("counts", (5,) * (p + n)))
    return Target(inst.get("name", "inline"), dom, f, inst.get("expected_type", "mixed"), counts, bounds)


def build_target(sc: Scenario) -> Target:
    if isinstance(sc.instance, dict):
        return _inline_target(sc.instance)
    name = str(sc.instance)
    if name not in G.REGISTRY:
        raise ScenarioError(f"unknown gallery instance {name!r}")
    ctor = G.REGISTRY[name]
    kwargs = dict(sc.params)
    if "seed" in inspect.signature(ctor).parameters and "seed" not in kwargs:
        kwargs["seed"] = sc.seed
    try:
        inst = ctor(**kwargs)
    except TypeError as exc:
        raise ScenarioError(f"bad parameters for {name}: {exc}") from None
    return Target(name, inst.f.dom, inst.f, inst.expected_type, inst.counts, inst.bounds)


def scenario_points(sc: Scenario, tg: Target) -> np.ndarray:
    bounds = tuple(tuple(b) for b in sc.grid.get("bounds", tg.bounds))
    counts = sc.grid.get("counts", tg.counts)
    if np.isscalar(counts):
        counts = (int(counts),) * tg.dom.dim
    if "random" in sc.points:
        rng = np.random.default_rng(sc.seed)
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])
        return lo + (hi - lo) * rng.random((int(sc.points["random"]), len(bounds)))
    if any(s in STENCIL_SUITES for s in sc.suites) and min(counts) < 5:
        raise ScenarioError("stencil-based suites need at least 5 grid points per axis")
    return Grid(bounds, counts).points()


# ---------------------------------------------------------------- per-point work

_CACHE: dict = {}


def _target_cached(sc_dict: dict) -> Target:
    key = json.dumps(sc_dict, sort_keys=True)
    if key not in _CACHE:
        _CACHE.clear()
        _CACHE[key] = build_target(Scenario.from_dict(sc_dict))
    return _CACHE[key]


def _is_product(tg: Target, pts) -> bool:
    dom = tg.dom
    if not isinstance(dom, WarpedDomain):
        return False
    ys = {tuple(z[: dom.p]) for z in pts}
    return all(np.linalg.norm(eta_data(dom, np.array(y)).eta) < 1e-12 for y in ys)


def point_record(tg: Target, z, suites, is_product: bool) -> dict:
    z = np.asarray(z, dtype=float)
    rec = {"params": z.tolist(), "residuals": {}}
    f = tg.f
    try:
        if "isometry" in suites:
            rec["residuals"]["isometry"] = isometry_residual(f, z)
        if "gauss" in suites:
            rec["residuals"]["gauss"] = gauss_residual(f, z)
        if "codazzi" in suites:
            rec["residuals"]["codazzi"] = codazzi_residual(f, z)
        if "classify" in suites:
            s = sample(f, z)
            split = hv_split(f.dom, z)
            try:
                pt = classify_sample(s, split)
            except TypeInconsistencyError as exc:
                rec.update(tag=Tag.INDETERMINATE.value, dim_alpha_hv=1, margin=0.0, note=str(exc))
            else:
                rec.update(tag=pt.tag.value, dim_alpha_hv=pt.dim_alpha_hv, margin=pt.margin)
                if pt.bdata is not None:
                    rec["b_data"] = pt.bdata.as_dict()
                    ed = eta_data(f.dom, z[: f.dom.p]) if isinstance(f.dom, WarpedDomain) else None
                    rel = verify_pointwise_relations(s, second_ff(s), pt.bdata, ed, is_product, split)
                    rec["relations"] = rel
                    rec["residuals"]["relations"] = max(rel.values()) if rel else 0.0
    except WarpformError as exc:
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec


def _chunk_worker(args):
    sc_dict, pts, suites, is_product = args
    tg = _target_cached(sc_dict)
    return [point_record(tg, z, suites, is_product) for z in pts]


def _map_points(sc: Scenario, tg: Target, pts, suites, jobs: int, is_product: bool) -> list:
    if jobs <= 1 or len(pts) < 2:
        return [point_record(tg, z, suites, is_product) for z in pts]
    nchunks = min(len(pts), jobs * 4)
    chunks = np.array_split(np.arange(len(pts)), nchunks)
    tasks = [(sc.to_dict(), pts[c], suites, is_product) for c in chunks if len(c)]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        parts = list(ex.map(_chunk_worker, tasks))
    return [r for part in parts for r in part]


# ---------------------------------------------------------------- summaries

def _residual_summary(records, key, tol) -> dict:
    vals = [r["residuals"][key] for r in records if key in r["residuals"]]
    errors = sum(1 for r in records if "error" in r)
    mx = max(vals) if vals else 0.0
    return {"max_residual": mx, "tolerance": tol, "points": len(vals), "errors": errors,
            "passed": bool(errors == 0 and mx < tol)}


def classify_summary(records, tg: Target, tol_rel: float, agreement: float) -> dict:
    counts: dict = {}
    for r in records:
        if "tag" in r:
            counts[r["tag"]] = counts.get(r["tag"], 0) + 1
    total = sum(counts.values())
    errors = sum(1 for r in records if "error" in r)
    rel = [r["residuals"]["relations"] for r in records if "relations" in r["residuals"]]
    max_rel = max(rel) if rel else 0.0
    passed = errors == 0 and max_rel < tol_rel
    checks = {}
    exp = tg.expected_type
    if exp in ("A", "B1", "B2", "C") and total:
        hit = counts.get(exp, 0)
        other = total - hit - counts.get(Tag.INDETERMINATE.value, 0)
        ok = hit >= agreement * total and other == 0
        checks["expected_type"] = {"expected": exp, "matching": hit, "total": total, "passed": ok}
        passed = passed and ok
    f = tg.f
    if f is not None and f.codim == 1 and f.dom.n >= 2:
        bad = counts.get("B2", 0) + counts.get("C", 0)
        checks["hypersurface"] = {"B2_or_C": bad, "passed": bad == 0}
        passed = passed and bad == 0
    return {"counts": dict(sorted(counts.items())), "points": total, "errors": errors,
            "max_relation_residual": max_rel, "tolerance": tol_rel, "checks": checks, "passed": bool(passed)}


def _structure_suite(name, tg: Target, pts) -> dict:
    fn = {"b1": b1_structure_check, "b2": b2_structure_check, "typec": type_c_consistency}[name]
    try:
        rep = fn(tg.f, pts)
    except WarpformError as exc:
        return {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    return rep.as_dict()


def _hull_suite(sc: Scenario, tg: Target, pts) -> dict:
    f = tg.f
    dom = f.dom
    tol = sc.tol("hull")
    leaf_y = sc.hull.get("leaf_y")
    try:
        if dom.n == 0:
            res = spherical_hull(f, pts, tol=tol)
        else:
            if leaf_y is None and isinstance(dom, WarpedDomain):
                y0 = np.array([(lo + hi) / 2 for lo, hi in dom.bounds[: dom.p]])
                if abs(dom.rho_value(y0) - 1.0) < 1e-12 and _is_product(tg, pts):
                    leaf_y = y0.tolist()
            if leaf_y is None:
                return {"mode": "undetermined", "passed": True, "note": "no leaf with rho = 1 given"}
            xs = np.unique(np.asarray(pts)[:, dom.p:], axis=0)
            res = spherical_hull(f, xs, leaf_y=leaf_y, tol=tol)
    except WarpformError as exc:
        return {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    out = {"mode": res.mode, "m": res.m, "ctilde": res.ctilde, "theta_norm_spread": res.theta_norm_spread,
           "passed": True}
    exp = sc.hull.get("expect")
    if exp:
        ok = res.m == exp.get("m") and res.ctilde is not None and abs(res.ctilde - exp["ctilde"]) < tol
        out.update(expected=exp, passed=bool(ok))
    return out


def _distribution_suite(sc: Scenario, tg: Target, pts) -> dict:
    if tg.dom.n == 0 or tg.dom.p == 0:
        return {"passed": True, "note": "vacuous: one factor is a point"}
    rep = check_distributions(tg.dom, pts)
    tol = sc.tol("distributions")
    vals = {"H_totally_geodesic": rep.H_totally_geodesic_residual, "V_umbilical": rep.V_umbilical_residual,
            "V_spherical": rep.V_spherical_residual, "eta_vertical": rep.eta_vertical_residual,
            "block_orthogonality": rep.block_orthogonality_residual}
    return {"residuals": vals, "tolerance": tol, "points": rep.points,
            "passed": bool(max(vals.values()) < tol)}


def run_scenario(sc: Scenario, jobs: int = 1) -> dict:
    tg = build_target(sc)
    needs_map = [s for s in sc.suites if s != "distributions"]
    if tg.f is None and needs_map:
        raise ScenarioError(f"suites {needs_map} need an immersion map")
    pts = scenario_points(sc, tg)
    product = _is_product(tg, pts)
    psuites = [s for s in sc.suites if s in POINT_SUITES]
    records = _map_points(sc, tg, pts, psuites, jobs, product) if psuites else \
        [{"params": z.tolist(), "residuals": {}} for z in pts]
    for i, r in enumerate(records):
        r["index"] = i
    summaries = {}
    for s in sc.suites:
        if s in ("isometry", "gauss", "codazzi"):
            summaries[s] = _residual_summary(records, s, sc.tol(s))
        elif s == "classify":
            summaries[s] = classify_summary(records, tg, sc.tol("relations"), sc.tol("classify_agreement"))
        elif s in ("b1", "b2", "typec"):
            summaries[s] = _structure_suite(s, tg, pts)
        elif s == "hull":
            summaries[s] = _hull_suite(sc, tg, pts)
        elif s == "distributions":
            summaries[s] = _distribution_suite(sc, tg, pts)
    return {
        "version": __version__,
        "scenario": sc.to_dict(),
        "instance": tg.name,
        "is_product": product,
        "points": records,
        "summaries": summaries,
        "passed": all(v.get("passed", False) for v in summaries.values()),
    }


def run(scenario_file: str, jobs: int = 1, seed: int | None = None) -> dict:
    sc = load_scenario(scenario_file)
    if seed is not None:
        sc.seed = int(seed)
    return run_scenario(sc, jobs)


# ---------------------------------------------------------------- emitters

def _clean(obj):
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _clean(obj.item())
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def to_json(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


CSV_B = ("beta", "lambda", "gamma", "beta_t0", "gamma_t0", "delta_t0")
CSV_RES = ("isometry", "gauss", "codazzi", "relations")


def to_csv(report: dict) -> str:
    pts = report["points"]
    dim = len(pts[0]["params"]) if pts else 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index"] + [f"z{i}" for i in range(dim)] + ["tag", "dim_alpha_hv", "margin"]
               + list(CSV_B) + list(CSV_RES) + ["error"])
    for r in pts:
        b = r.get("b_data") or {}
        res = r.get("residuals", {})
        row = [r["index"]] + [repr(float(x)) for x in r["params"]]
        row += [r.get("tag", ""), r.get("dim_alpha_hv", ""), _cell(r.get("margin"))]
        row += [_cell(b.get(k)) for k in CSV_B]
        row += [_cell(res.get(k)) for k in CSV_RES]
        row.append(r.get("error", ""))
        w.writerow(row)
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    v = _clean(float(v))
    return repr(v) if isinstance(v, float) else v


def report_emit(report: dict, out_dir: str, formats=("json",), stem: str = "report") -> list:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for fmt in formats:
        if fmt == "json":
            text = to_json(report)
        elif fmt == "csv":
            text = to_csv(report)
        else:
            raise ScenarioError(f"unknown format {fmt!r}")
        path = os.path.join(out_dir, f"{stem}.{fmt}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        written.append(path)
    return written


# ---------------------------------------------------------------- command line

def _summary_lines(report: dict) -> list:
    lines = [f"instance {report['instance']}: {len(report['points'])} points"]
    for name, s in report["summaries"].items():
        status = "PASS" if s.get("passed") else "FAIL"
        extra = ""
        if "max_residual" in s:
            extra = f"max {s['max_residual']:.3e} (tol {s['tolerance']:.0e})"
        elif "counts" in s:
            extra = " ".join(f"{k}={v}" for k, v in s["counts"].items())
        elif "mode" in s:
            extra = f"mode {s['mode']} m={s.get('m')} ctilde={s.get('ctilde')}"
        elif "points_checked" in s:
            extra = f"{s['points_checked']}/{s['points_total']} points checked"
        elif "residuals" in s:
            extra = " ".join(f"{k}={v:.2e}" for k, v in s["residuals"].items())
        lines.append(f"  {name:14s} {status}  {extra}")
    return lines


def cmd_gallery(args) -> int:
    if args.action == "list":
        if args.json:
            print(json.dumps(_clean(G.manifest()), indent=2, sort_keys=True))
        else:
            for m in G.manifest():
                print(f"{m['name']:22s} type={m['expected_type']:6s} c={m['c']:g} "
                      f"p={m['p']} n={m['n']} codim={m['codim']}")
    return 0


def cmd_run(args) -> int:
    try:
        report = run(args.scenario, jobs=args.jobs, seed=args.seed)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    if args.out:
        for path in report_emit(report, args.out, formats):
            print(f"wrote {path}")
    else:
        sys.stdout.write(to_json(report))
    for line in _summary_lines(report):
        print(line, file=sys.stderr if not args.out else sys.stdout)
    return 0 if report["passed"] else 1


def cmd_verify(args) -> int:
    suites = [s.strip() for s in args.suite.split(",") if s.strip()]
    bad = [s for s in suites if s not in SUITES]
    if bad:
        print(f"error: unknown suites {bad}", file=sys.stderr)
        return 2
    if args.all_gallery:
        names = G.names()
    elif args.instance:
        names = args.instance
    else:
        print("error: give --all-gallery or --instance NAME", file=sys.stderr)
        return 2
    ok = True
    for name in names:
        sc = Scenario(name, suites=suites, seed=args.seed)
        try:
            report = run_scenario(sc, jobs=args.jobs)
        except ScenarioError as exc:
            print(f"{name:22s} ERROR {exc}")
            ok = False
            continue
        ok = ok and report["passed"]
        for line in _summary_lines(report):
            print(line)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="warpform", description="Warped product immersion toolkit")
    ap.add_argument("--version", action="version", version=f"warpform {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gallery", help="list the certified example immersions")
    g.add_argument("action", choices=["list"])
    g.add_argument("--json", action="store_true", help="print the machine-readable manifest")
    g.set_defaults(func=cmd_gallery)

    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("scenario")
    r.add_argument("--out", help="output directory (default: JSON on stdout)")
    r.add_argument("--format", default="json", help="comma separated: json,csv")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="run suites over gallery instances")
    v.add_argument("--suite", required=True, help="suite name(s), comma separated")
    v.add_argument("--all-gallery", action="store_true")
    v.add_argument("--instance", action="append")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--jobs", type=int, default=1)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
