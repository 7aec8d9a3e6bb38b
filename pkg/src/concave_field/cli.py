"""Command-line access to the samplers, integrals and acceptance checks."""

import argparse
import csv
import io
import json
import math
import sys
from importlib import metadata

import numpy as np

from . import duality, generators, portfolio, samplers, simplex, stokes, verify
from .models import parse_model
from .rng import map_replicas, replica_rng
from .stats import RunManifest, _plain


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _floats(text):
    return np.array([float(v) for v in text.split(",")])


def _points(args, n, interior=False):
    if args.at:
        pts = np.array([_floats(chunk) for chunk in args.at.split(";")])
        if pts.shape[1] != n:
            raise UsageError(f"--at points need {n} coordinates")
        return simplex.as_point(pts)
    per_edge = args.grid or 11
    pts = simplex.simplex_lattice(n, per_edge - 1)
    if interior:
        pts = pts[np.all(pts > 0, axis=1)]
        if pts.size == 0:
            raise UsageError("grid has no interior points; raise --grid")
    return pts


def _regime(text):
    kind, _, c = (text or "logshift:1").partition(":")
    return kind, float(c) if c else 1.0


def _point_rows(pts, values):
    rows = []
    for i, p in enumerate(pts):
        row = {f"p{j + 1}": float(v) for j, v in enumerate(p)}
        row.update(values(i))
        rows.append(row)
    return rows


def _replica_rows(pts, vals, label="value"):
    vals = np.asarray(vals).reshape(len(vals), -1)
    if len(pts) == 1:
        return [{"replica": r, label: float(v[0])} for r, v in enumerate(vals)]
    rows = []
    for r, v in enumerate(vals):
        for i, p in enumerate(pts):
            row = {"replica": r, "point": i}
            row.update({f"p{j + 1}": float(x) for j, x in enumerate(p)})
            row[label] = float(v[i])
            rows.append(row)
    return rows


def cmd_sample_hardmin(args, model):
    pts = _points(args, model.n)
    vals = map_replicas(lambda g: samplers.hardmin_values(model, args.K, pts, g), args.replicas, args.seed)
    return _replica_rows(pts, vals)


def cmd_sample_softmin(args, model):
    pts = _points(args, model.n)
    vals = map_replicas(
        lambda g: samplers.sample_softmin_fixed_lambda(model, args.K, args.lam, g)(pts), args.replicas, args.seed
    )
    return _replica_rows(pts, vals)


def cmd_sample_poisson(args, model):
    pts = _points(args, model.n, interior=True)
    vals = map_replicas(
        lambda g: samplers.sample_poisson_envelope(model, pts, g, max_box=args.box_max)(pts), args.replicas, args.seed
    )
    return _replica_rows(pts, vals)


def cmd_sample_diagonal(args, model):
    kind, c = _regime(args.regime)
    spec = samplers.DiagonalSpec(model, args.K, kind, c)
    pts = _points(args, model.n)
    vals = map_replicas(lambda g: samplers.sample_diagonal(spec, g)(pts), args.replicas, args.seed)
    return _replica_rows(pts, vals)


def cmd_limit_softmin(args, model):
    pts = _points(args, model.n)
    f = samplers.sample_softmin_fixed_lambda(model, args.K, args.lam, replica_rng(args.seed, 0))
    got = np.atleast_1d(f(pts))
    lim = np.atleast_1d(samplers.eval_deterministic_limit(model, args.lam, pts))
    return _point_rows(pts, lambda i: {"psi_K": float(got[i]), "psi_inf": float(lim[i]),
                                       "abs_err": float(abs(got[i] - lim[i]))})


def _region_spec(args, n):
    if not args.points or not args.levels:
        raise UsageError("need --points 'p;p;...' and --levels a,a,...")
    pts = np.array([_floats(chunk) for chunk in args.points.split(";")])
    if pts.shape[1] != n:
        raise UsageError(f"--points need {n} coordinates")
    return duality.RegionSpec(pts, _floats(args.levels))


def cmd_tail(args, model):
    rng = replica_rng(args.seed, 0)
    if args.psi:
        psi = generators.named(args.psi, model.n)
        t = duality.tail_probability(model, psi, args.mc_points, rng)
        return [{"quantity": "tail", "value": t.estimate, "stderr": t.stderr},
                {"quantity": "integral", "value": t.integral, "stderr": t.integral_stderr},
                {"quantity": "diverged", "value": float(t.diverged), "stderr": 0.0},
                {"quantity": "truncated", "value": float(t.truncated), "stderr": 0.0}]
    spec = _region_spec(args, model.n)
    integral, err = duality.union_integral(model, spec, rng, args.mc_points)
    return [{"quantity": "tail", "value": math.exp(-integral), "stderr": math.exp(-integral) * err},
            {"quantity": "integral", "value": integral, "stderr": err}]


def cmd_envelope(args, model):
    spec = _region_spec(args, model.n)
    env = duality.envelope_from_constraints(spec)
    pts = _points(args, model.n)

    def row(i):
        out = {"value": float(env(pts[i]))}
        out.update({f"x{j + 1}": float(v) for j, v in enumerate(env.gradient(pts[i]))})
        return out

    return _point_rows(pts, row)


def cmd_volume_stokes(args, model):
    f = generators.named(args.psi or "parabola", model.n)
    gen = stokes.C2Generator.from_simplex(f, hess=f.hess)
    res = stokes.stokes_volume(gen)
    rows = [{"method": "stokes", "value": res.value, "diverged": int(res.diverged)}]
    if model.n == 2:
        try:
            rows.append({"method": "stokes-1d", "value": stokes.stokes_volume_1d(gen), "diverged": 0})
        except stokes.PreconditionFailed:
            rows.append({"method": "stokes-1d", "value": math.nan, "diverged": int(res.diverged)})
    return rows


def _generator_or_sample(args, model):
    if args.psi:
        return generators.named(args.psi, model.n)
    return samplers.sample_hardmin_scaled(model, args.K, replica_rng(args.seed, 0))


def cmd_portfolio(args, model):
    f = _generator_or_sample(args, model)
    pts = _points(args, model.n, interior=True)
    pi = portfolio.fgp_map(f, pts)
    return _point_rows(pts, lambda i: {f"pi{j + 1}": float(v) for j, v in enumerate(pi[i])})


def cmd_weight_dist(args, model):
    p = _points(args, model.n, interior=True)[0]
    w = map_replicas(lambda g: portfolio.portfolio_weight_sample(model, p, g), args.replicas, args.seed)
    return [dict({"replica": r}, **{f"y{j + 1}": float(v) for j, v in enumerate(row)}) for r, row in enumerate(w)]


def cmd_transport(args, model):
    f = _generator_or_sample(args, model)
    pts = _points(args, model.n, interior=True)
    q = portfolio.dirichlet_transport(f, pts)
    return _point_rows(pts, lambda i: {f"q{j + 1}": float(v) for j, v in enumerate(q[i])})


COMMANDS = {
    "sample-hardmin": cmd_sample_hardmin,
    "sample-softmin": cmd_sample_softmin,
    "sample-poisson": cmd_sample_poisson,
    "sample-diagonal": cmd_sample_diagonal,
    "limit-softmin": cmd_limit_softmin,
    "tail": cmd_tail,
    "envelope": cmd_envelope,
    "volume-stokes": cmd_volume_stokes,
    "portfolio": cmd_portfolio,
    "weight-dist": cmd_weight_dist,
    "transport": cmd_transport,
    "verify": None,
}


def build_parser():
    parser = _Parser(prog="concave-field", description=__doc__)
    parser.add_argument("command", choices=list(COMMANDS))
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--model", default="uniform:scale=1.0")
    parser.add_argument("--K", type=int, default=1000)
    parser.add_argument("--lambda", dest="lam", type=float, default=10.0)
    parser.add_argument("--regime", default="logshift:1", help="superlog, logshift:c or linear:c")
    parser.add_argument("--replicas", type=int, default=100)
    parser.add_argument("--at", help="points 'p1,p2,...;p1,p2,...'")
    parser.add_argument("--grid", type=int, help="lattice points per simplex edge (default 11)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--box-max", type=float, default=1e8)
    parser.add_argument("--out", choices=["csv", "json"], default="csv")
    parser.add_argument("--output-path")
    parser.add_argument("--psi", choices=generators.NAMES)
    parser.add_argument("--points", help="anchor points 'p;p;...' for tail and envelope")
    parser.add_argument("--levels", help="levels 'a,a,...' for tail and envelope")
    parser.add_argument("--mc-points", type=int, default=200_000)
    parser.add_argument("--suite", default="all", help="comma-separated check names or 'all'")
    return parser


def _render(rows, fmt, manifest):
    if fmt == "json":
        return json.dumps({"manifest": _plain(manifest.__dict__), "rows": _plain(rows)}, indent=2) + "\n"
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def run_cli(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        manifest = RunManifest(
            command=args.command, model=args.model, n=args.n, K=args.K, lam=args.lam, regime=args.regime,
            replicas=args.replicas, seed=args.seed, grid=args.at or str(args.grid or 11),
            output_path=args.output_path, version=_version(), argv=argv,
        )
        if args.command == "verify":
            names = None if args.suite == "all" else args.suite.split(",")
            unknown = [n for n in names or [] if n not in verify.CHECKS]
            if unknown:
                raise UsageError(f"unknown checks {unknown}; choose from {list(verify.CHECKS)}")
            reports = verify.run_suite(names, seed=args.seed)
            for r in reports:
                print(r.line(), file=sys.stderr)
            text = json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
            _emit(text, args, manifest)
            return 0 if all(r.passed for r in reports) else 2
        model = parse_model(args.model, args.n)
        rows = COMMANDS[args.command](args, model)
        _emit(_render(rows, args.out, manifest), args, manifest)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, TypeError, NotImplementedError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _emit(text, args, manifest):
    if args.output_path:
        with open(args.output_path, "w") as fh:
            fh.write(text)
        manifest.dump(args.output_path + ".manifest.json")
    else:
        sys.stdout.write(text)


def main():
    sys.exit(run_cli())
