"""Command-line front end: ``oloid props | verify | mesh``.

Exit codes: 0 success / all checks pass, 1 computational failure or failed
check, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .core import MassProperties, OloidError, OloidSpec
from .elliptic import closed_form_properties
from .mesh import MeshConfig, export_mesh, mesh_mass_properties, tessellate
from .montecarlo import McConfig, mc_mass_properties
from .quadrature import QuadratureConfig, quadrature_mass_properties, reduced_moments

#: Reference values for the unit-radius, unit-density oloid.
REFERENCE_VALUES = {
    "volume": 3.05241846842437,
    "Ixx": 0.76535025749314262939,
    "Iyy": 1.45551287346920034498,
}

DEFAULT_TOLERANCES = {
    "closed_form": 1e-13,
    "quadrature": 1e-10,
    "m_exactness": 1e-12,
    "mc_abs": 0.01,
    "mc_sigmas": 4.0,
    "mc_ratio_sigmas": 3.0,
    "mesh": 1e-3,
    "mesh_convexity": 1e-6,
    "mesh_offdiag": 1e-9,
}

#: Below these sample counts the Monte Carlo checks lack statistical power.
MC_MIN_SAMPLES_SIGMA = 10_000
MC_MIN_SAMPLES_ABS = 1_000_000

METHODS = ("closed_form", "quadrature", "monte_carlo", "mesh")


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be finite and > 0, got {text}")
    return value


def _int_at_least(lo):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {value}")
        return value
    return parse


def _even_int(text):
    value = _int_at_least(4)(text)
    if value % 2:
        raise argparse.ArgumentTypeError(f"n_t must be even, got {value}")
    return value


def _seed(text):
    value = _int_at_least(0)(text)
    if value >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


# -- report -----------------------------------------------------------------

@dataclass
class ReportDocument:
    radius: float
    density: float
    methods: dict[str, MassProperties] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)

    def deviations(self) -> dict[str, dict[str, float]]:
        """Largest relative difference of volume and principal moments, per method pair."""
        names = list(self.methods)
        out = {a: {} for a in names}
        for a in names:
            for b in names:
                pa, pb = self.methods[a], self.methods[b]
                qa = [pa.volume, *np.diag(pa.inertia)]
                qb = [pb.volume, *np.diag(pb.inertia)]
                out[a][b] = max(abs(x - y) / max(abs(x), abs(y)) for x, y in zip(qa, qb))
        return out

    def as_dict(self) -> dict:
        doc = {
            "spec": {"radius": self.radius, "density": self.density},
            "methods": {k: v.as_dict() for k, v in self.methods.items()},
            "deviation": self.deviations(),
            "metadata": self.metadata,
        }
        if self.checks:
            doc["checks"] = self.checks
        return doc


def _fmt(value) -> str:
    return format(float(value) + 0.0, ".17g")


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise ValueError("report contains a non-finite number")
        return _fmt(obj)
    return json.dumps(str(obj))


def _print_text(report: ReportDocument, out):
    print(f"oloid  radius={report.radius:g}  density={report.density:g}", file=out)
    for name, mp in report.methods.items():
        I = mp.inertia
        print(f"\n[{name}]", file=out)
        if mp.area is not None:
            print(f"  area    = {_fmt(mp.area)}", file=out)
        print(f"  volume  = {_fmt(mp.volume)}", file=out)
        print(f"  mass    = {_fmt(mp.mass)}", file=out)
        print("  com     = (" + ", ".join(_fmt(v) for v in mp.center_of_mass) + ")", file=out)
        for label, (i, j) in (("I_xx", (0, 0)), ("I_yy", (1, 1)), ("I_zz", (2, 2)),
                              ("I_xy", (0, 1)), ("I_xz", (0, 2)), ("I_yz", (1, 2))):
            line = f"  {label}    = {_fmt(I[i, j])}"
            if mp.std_error and f"I{label[2:]}" in mp.std_error:
                line += f"  +- {mp.std_error['I' + label[2:]]:.2g}"
            print(line, file=out)
    if len(report.methods) > 1:
        print("\nmax relative deviation (volume, principal moments):", file=out)
        dev = report.deviations()
        names = list(report.methods)
        print("  " + " " * 12 + "".join(f"{n:>13}" for n in names), file=out)
        for a in names:
            print(f"  {a:<12}" + "".join(f"{dev[a][b]:13.2e}" for b in names), file=out)


# -- computation ------------------------------------------------------------

def _run_methods(args, methods, spec) -> tuple[dict, dict]:
    results, meta = {}, {}
    for name in methods:
        t0 = time.perf_counter()
        if name == "closed_form":
            results[name] = closed_form_properties(spec)
        elif name == "quadrature":
            cfg = QuadratureConfig(m_nodes=args.m_nodes, t_levels=args.t_levels)
            results[name] = quadrature_mass_properties(spec, cfg)
            meta["quadrature"] = {"m_nodes": cfg.m_nodes, "t_levels": cfg.t_levels,
                                  "t_tolerance": cfg.t_tolerance}
        elif name == "monte_carlo":
            cfg = McConfig(samples=args.mc_samples, seed=args.seed)
            results[name] = mc_mass_properties(spec, cfg, workers=getattr(args, "workers", 1))
            meta["monte_carlo"] = {"samples": cfg.samples, "seed": cfg.seed,
                                   "attempts": results[name].metadata["attempts"]}
        elif name == "mesh":
            mesh = tessellate(spec, MeshConfig(args.nm, args.nt))
            results[name] = mesh_mass_properties(mesh, spec.density)
            meta["mesh"] = {"n_m": args.nm, "n_t": args.nt, "triangles": mesh.n_triangles}
        meta.setdefault("durations", {})[name] = time.perf_counter() - t0
    return results, meta


def _build_report(args, methods) -> ReportDocument:
    spec = OloidSpec(args.radius, args.density)
    results, meta = _run_methods(args, methods, spec)
    meta["version"] = __version__
    if not getattr(args, "timings", False):
        meta.pop("durations", None)
    return ReportDocument(spec.radius, spec.density, results, meta)


def cmd_props(args, out=sys.stdout) -> int:
    methods = METHODS if args.method == "all" else (args.method,)
    report = _build_report(args, methods)
    if args.json:
        print(to_json(report.as_dict()), file=out)
    else:
        _print_text(report, out)
    return 0


def _rel(a, b):
    return abs(a - b) / abs(b)


def _check(checks, name, ok, value=None, limit=None, status=None):
    status = status or ("pass" if ok else "fail")
    checks.append({"name": name, "status": status, "value": value, "limit": limit})


def run_checks(report: ReportDocument, args, tol: dict) -> list[dict]:
    checks: list[dict] = []
    r, rho = report.radius, report.density
    s3, s5 = r**3, rho * r**5
    cf = report.methods["closed_form"]
    quad = report.methods["quadrature"]
    mc = report.methods["monte_carlo"]
    mesh_mp = report.methods["mesh"]

    ref = REFERENCE_VALUES
    for key, got, want in (("volume", cf.volume, ref["volume"] * s3),
                           ("Ixx", cf.inertia[0, 0], ref["Ixx"] * s5),
                           ("Iyy", cf.inertia[1, 1], ref["Iyy"] * s5),
                           ("Izz", cf.inertia[2, 2], ref["Iyy"] * s5)):
        e = _rel(got, want)
        _check(checks, f"closed_form.{key} vs reference", e <= tol["closed_form"], e, tol["closed_form"])
    _check(checks, "closed_form.area == 4 pi r^2", cf.area == 4 * math.pi * r * r, cf.area, 4 * math.pi * r * r)

    for key, a, b in (("volume", quad.volume, cf.volume), ("area", quad.area, cf.area),
                      ("Ixx", quad.inertia[0, 0], cf.inertia[0, 0]),
                      ("Iyy", quad.inertia[1, 1], cf.inertia[1, 1]),
                      ("Izz", quad.inertia[2, 2], cf.inertia[2, 2])):
        e = _rel(a, b)
        _check(checks, f"quadrature.{key} vs closed_form", e <= tol["quadrature"], e, tol["quadrature"])
    off = max(abs(quad.inertia[i, j]) for i, j in ((0, 1), (0, 2), (1, 2))) / s5
    _check(checks, "quadrature off-diagonals (per r^5)", off <= tol["quadrature"], off, tol["quadrature"])
    com = float(np.abs(quad.center_of_mass).max()) / r
    _check(checks, "quadrature centre of mass (per r)", com <= tol["quadrature"], com, tol["quadrature"])
    e = _rel(quad.inertia[1, 1], quad.inertia[2, 2])
    _check(checks, "quadrature Iyy == Izz", e <= tol["quadrature"], e, tol["quadrature"])

    red = reduced_moments()
    for key, idx in (("Ixx", 0), ("Iyy", 1)):
        e = _rel(red[key] * s5, quad.inertia[idx, idx])
        _check(checks, f"reduced integrand {key} vs flux route", e <= tol["quadrature"], e, tol["quadrature"])

    spec = OloidSpec(r, rho)
    q3 = quadrature_mass_properties(spec, QuadratureConfig(m_nodes=3, t_levels=args.t_levels))
    q8 = quadrature_mass_properties(spec, QuadratureConfig(m_nodes=8, t_levels=args.t_levels))
    e = max(_rel(q3.volume, q8.volume), *(_rel(q3.inertia[i, i], q8.inertia[i, i]) for i in range(3)))
    _check(checks, "m-rule exactness (3 vs 8 nodes)", e <= tol["m_exactness"], e, tol["m_exactness"])

    n_mc = mc.metadata["samples"]
    if n_mc < MC_MIN_SAMPLES_SIGMA:
        for name in ("monte_carlo within sigma bounds", "monte_carlo acceptance ratio",
                     "monte_carlo 2-decimal agreement"):
            _check(checks, name, True, None, None, status="skipped")
    else:
        worst = 0.0
        for key, idx in (("Ixx", 0), ("Iyy", 1), ("Izz", 2)):
            worst = max(worst, abs(mc.inertia[idx, idx] - cf.inertia[idx, idx]) / mc.std_error[key])
        _check(checks, "monte_carlo within sigma bounds", worst <= tol["mc_sigmas"], worst, tol["mc_sigmas"])
        p = cf.volume / (12 * s3)
        ratio = mc.metadata["acceptance_ratio"]
        sigma = math.sqrt(p * (1 - p) / mc.metadata["attempts"])
        z = abs(ratio - p) / sigma
        _check(checks, "monte_carlo acceptance ratio", z <= tol["mc_ratio_sigmas"], z, tol["mc_ratio_sigmas"])
        if n_mc < MC_MIN_SAMPLES_ABS:
            _check(checks, "monte_carlo 2-decimal agreement", True, None, None, status="skipped")
        else:
            d = max(abs(mc.inertia[i, i] - cf.inertia[i, i]) / s5 for i in range(2))
            _check(checks, "monte_carlo 2-decimal agreement", d < tol["mc_abs"], d, tol["mc_abs"])

    mesh = tessellate(spec, MeshConfig(args.nm, args.nt))
    _check(checks, "mesh watertight", mesh.is_watertight() and mesh.euler_characteristic() == 2,
           mesh.euler_characteristic(), 2)
    defect = mesh.convexity_defect() / r
    _check(checks, "mesh convex (per r)", defect <= tol["mesh_convexity"], defect, tol["mesh_convexity"])
    for key, a, b in (("volume", mesh_mp.volume, cf.volume), ("Ixx", mesh_mp.inertia[0, 0], cf.inertia[0, 0])):
        e = _rel(a, b)
        _check(checks, f"mesh.{key} vs closed_form", e <= tol["mesh"], e, tol["mesh"])
    coarse = mesh_mass_properties(tessellate(spec, MeshConfig(max(2, args.nm // 2), max(4, (args.nt // 4) * 2))), rho)
    _check(checks, "mesh volume increases towards closed form",
           coarse.volume < mesh_mp.volume < cf.volume, mesh_mp.volume, cf.volume)
    off = max(abs(mesh_mp.inertia[i, j]) for i, j in ((0, 1), (0, 2), (1, 2))) / s5
    _check(checks, "mesh off-diagonals (per r^5)", off <= tol["mesh_offdiag"], off, tol["mesh_offdiag"])
    e = _rel(mesh_mp.inertia[1, 1], mesh_mp.inertia[2, 2])
    _check(checks, "mesh Iyy == Izz", e <= tol["mesh_offdiag"], e, tol["mesh_offdiag"])
    return checks


def cmd_verify(args, out=sys.stdout) -> int:
    tol = dict(DEFAULT_TOLERANCES)
    for key in tol:
        override = getattr(args, f"tol_{key}", None)
        if override is not None:
            tol[key] = override
    report = _build_report(args, METHODS)
    report.checks = run_checks(report, args, tol)
    report.metadata["tolerances"] = tol
    failed = [c for c in report.checks if c["status"] == "fail"]
    if args.json:
        print(to_json(report.as_dict()), file=out)
    else:
        for c in report.checks:
            detail = "" if c["value"] is None else f"  ({c['value']:.3g} vs {c['limit']:.3g})"
            print(f"{c['status'].upper():7} {c['name']}{detail}", file=out)
        print(f"\n{len(report.checks) - len(failed)}/{len(report.checks)} checks not failing", file=out)
    return 1 if failed else 0


def cmd_mesh(args, out=sys.stdout) -> int:
    spec = OloidSpec(args.radius, args.density)
    mesh = tessellate(spec, MeshConfig(args.nm, args.nt))
    nbytes = export_mesh(mesh, args.format, args.output)
    watertight = mesh.is_watertight() and mesh.euler_characteristic() == 2
    volume = mesh_mass_properties(mesh, spec.density).volume if watertight else float("nan")
    print(f"wrote {args.output} ({nbytes} bytes): triangles={mesh.n_triangles} "
          f"watertight={'true' if watertight else 'false'} volume={_fmt(volume)}", file=out)
    return 0 if watertight else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oloid", description="Mass properties of the oloid.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def body_flags(p):
        p.add_argument("--radius", type=_positive_float, default=1.0)
        p.add_argument("--density", type=_positive_float, default=1.0)

    def method_flags(p, nm=256, nt=512):
        p.add_argument("--json", action="store_true", help="emit one JSON document")
        p.add_argument("--timings", action="store_true", help="include wall-clock durations")
        p.add_argument("--mc-samples", type=_int_at_least(1), default=1_000_000)
        p.add_argument("--seed", type=_seed, default=McConfig().seed)
        p.add_argument("--workers", type=_int_at_least(1), default=1,
                       help="sampling threads (results do not depend on it)")
        p.add_argument("--m-nodes", type=_int_at_least(3), default=5)
        p.add_argument("--t-levels", type=_int_at_least(3), default=10)
        p.add_argument("--nm", type=_int_at_least(2), default=nm)
        p.add_argument("--nt", type=_even_int, default=nt)

    p = sub.add_parser("props", help="compute mass properties")
    body_flags(p)
    p.add_argument("--method", choices=(*METHODS, "all"), default="closed_form")
    method_flags(p, nm=64, nt=128)
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("verify", help="cross-check all methods")
    body_flags(p)
    method_flags(p)
    for key in DEFAULT_TOLERANCES:
        p.add_argument(f"--tol-{key.replace('_', '-')}", dest=f"tol_{key}", type=_positive_float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mesh", help="export a triangulation")
    body_flags(p)
    p.add_argument("--nm", type=_int_at_least(2), default=64)
    p.add_argument("--nt", type=_even_int, default=128)
    p.add_argument("--format", choices=("stl", "stl_binary", "obj"), default="stl")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_mesh)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OloidError, OSError, ArithmeticError, ValueError) as exc:
        print(f"oloid: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
