"""Command-line front end: ``isoprof <subcommand> [flags]`` writing CSV with ``#`` comment headers.

Exit codes: 0 on success, 2 when a check reports violations, 1 on usage,
input or numerical errors.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import sys

import numpy as np

from . import __version__
from .bodies import body_hash, load_body
from .errors import IsoprofError

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _floats(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".15g")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (tuple, list, np.ndarray)):
        return " ".join(_fmt(v) for v in x)
    return "" if x is None else str(x)


class Output:
    """Collects header comments and CSV rows, then writes them in one piece."""

    def __init__(self, args, command):
        self.args = args
        self.comments = [f"isoprof {__version__} {command}"]
        self.header = None
        self.rows = []

    def comment(self, text):
        self.comments.append(text)

    def table(self, header, rows):
        self.header = header
        self.rows = [[_fmt(v) for v in r] for r in rows]

    def render(self) -> str:
        buf = io.StringIO()
        lines = list(self.comments)
        if not self.args.no_timestamp:
            lines.append("generated " + _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
        for c in lines:
            buf.write(f"# {c}\n")
        if self.header is not None:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.header)
            w.writerows(self.rows)
        return buf.getvalue()


def _cfg(args, shortcuts=True):
    from .measure import MCConfig

    return MCConfig(args.samples, args.seed, shortcuts and not args.no_shortcuts)


def _body(args, out, key="body"):
    path = getattr(args, key)
    if path is None:
        raise UsageError(f"--{key} is required")
    body = load_body(path)
    out.comment(f"{key} {path} sha256={body_hash(body)} family={body.family}")
    return body


def _point(args, body, name="point"):
    p = getattr(args, name)
    if p is None:
        return body.structural_points()[0] if len(body.structural_points()) else body.project(body.interior_point())
    if len(p) != body.dim:
        raise UsageError(f"--{name} needs {body.dim} coordinates")
    return np.asarray(p)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_volume(args, out, perimeter=False):
    from .measure import ball_relative_perimeter, ball_volume

    body = _body(args, out)
    x = _point(args, body)
    out.comment(f"point {_fmt(x)}")
    fn = ball_relative_perimeter if perimeter else ball_volume
    cfg = _cfg(args)
    rows = []
    for r in args.radii or [1.0]:
        est = fn(body, x, r, cfg)
        rows.append([r, est.value, est.std_error, est.exact])
    out.table(["r", "perimeter" if perimeter else "volume", "stderr", "exact"], rows)


def cmd_angle(args, out):
    from .measure import solid_angle

    body = _body(args, out)
    a = solid_angle(body, _cfg(args))
    out.table(["alpha", "stderr", "exact", "fraction"], [[a.value, a.std_error, a.exact, a.value / a.full]])


def _radii(args):
    if args.radii:
        return np.asarray(args.radii)
    return np.geomspace(args.rmin, args.rmax, args.points)


def cmd_growth(args, out):
    from .growth import CenterConfig, b_table

    body = _body(args, out)
    table = b_table(body, _radii(args), CenterConfig(count=args.centers, seed=args.seed), _cfg(args))
    if table.note:
        out.comment(table.note)
    if table.cross_check:
        out.comment("cross_check " + " ".join(f"{k}={_fmt(v)}" for k, v in sorted(table.cross_check.items())
                                            if np.ndim(v) == 0))
    out.table(["r", "b_value", "b_stderr", "fast_path"],
              [[r, v.value, v.std_error, table.fast_path_used] for r, v in zip(table.radii, table.values)])


def _volumes(args):
    if not args.volumes:
        raise UsageError("--volumes is required")
    if any(v <= 0 for v in args.volumes):
        raise UsageError("volumes must be positive")
    return np.asarray(args.volumes)


def cmd_phi(args, out):
    from .growth import CenterConfig, ReciprocalFn
    from .profiles import growth_for_volumes

    body = _body(args, out)
    vols = _volumes(args)
    table = growth_for_volumes(body, vols, _cfg(args), CenterConfig(count=args.centers, seed=args.seed))
    rec = ReciprocalFn.from_table(table)
    out.table(["v", "phi_v"], [[v, rec(v)] for v in vols])


def cmd_profile(args, out):
    from .growth import CenterConfig
    from .profiles import UpperConfig, profile_bracket

    body = _body(args, out)
    vols = _volumes(args)
    br = profile_bracket(body, vols, _cfg(args), ucfg=UpperConfig(count=args.centers, seed=args.seed),
                         centers=CenterConfig(count=args.centers, seed=args.seed))
    for i, note in enumerate(br.rigidity):
        if note:
            out.comment(f"v={_fmt(vols[i])}: {note}")
    rows = [[v, lo, src, up, w.kind, w.param]
            for v, lo, src, up, w in zip(br.volumes, br.lower, br.lower_source, br.upper, br.witnesses)]
    out.table(["v", "lower", "lower_source", "upper", "witness_kind", "witness_param"], rows)


def cmd_icmin(args, out):
    from .profiles import icmin_profile

    body = _body(args, out)
    vols = _volumes(args)
    res = icmin_profile(body, vols, _cfg(args), seed=args.seed)
    out.comment(f"alpha={_fmt(res.alpha.value)} stderr={_fmt(res.alpha.std_error)} at {_fmt(res.point)} ({res.source})")
    out.table(["v", "icmin"], list(zip(vols, res.values)))


def cmd_dimension(args, out):
    from .dimension import fit_dimension
    from .growth import CenterConfig, b_table

    body = _body(args, out)
    table = b_table(body, _radii(args), CenterConfig(count=args.centers, seed=args.seed), _cfg(args))
    window = None if args.window is None else tuple(args.window)
    fit = fit_dimension(table, window)
    out.comment(f"m={fit.m:.6f} beta={fit.beta:.6f} stderr={fit.stderr:.3g} residual={fit.residual:.3g} "
                f"window=[{_fmt(fit.window[0])}, {_fmt(fit.window[1])}] points={fit.points}")
    lo, hi = fit.window
    sel = (table.radii >= lo * (1 - 1e-12)) & (table.radii <= hi * (1 + 1e-12))
    c = np.exp(np.mean(np.log(table.b[sel]) - fit.beta * np.log(table.radii[sel])))
    out.table(["r", "b_value", "fitted", "in_window"],
              [[r, b, c * r ** fit.beta, s] for r, b, s in zip(table.radii, table.b, sel)])


def cmd_smooth(args, out):
    from .smoothing import MollifierCfg, mollified_distance

    body = _body(args, out)
    if args.epsilon is None or not args.epsilon > 0:
        raise UsageError("--epsilon must be positive")
    x = _point(args, body, "probe")
    g = mollified_distance(body, x, MollifierCfg(args.epsilon, mc_samples=args.samples, seed=args.seed))
    out.table(["probe", "epsilon", "g", "distance", "in_smoothed"],
              [[x, args.epsilon, g, float(body.distance(x)), g <= args.epsilon]])


def cmd_hausdorff(args, out):
    from .measure import hausdorff

    A = _body(args, out)
    B = _body(args, out, "other")
    h = hausdorff(A, B, args.radius, _cfg(args))
    out.table(["radius", "hausdorff", "resolution"], [[args.radius, h.value, h.resolution]])


def cmd_check(args, out):
    from .checks import SUITE_CHECKS, run_suite

    names = None if args.suite == "all" else args.suite.split(",")
    if names is not None and set(names) - set(SUITE_CHECKS):
        raise UsageError(f"unknown suite; choose from all, {', '.join(SUITE_CHECKS)}")
    from .measure import MCConfig

    cfg = MCConfig(args.samples if args.samples_given else 20_000, args.seed)
    reports = run_suite(names, args.trials, args.seed, cfg)
    out.table(["check", "body", "trials", "violations", "worst_margin", "tolerance", "seed", "notes"],
              [[r.name, r.body, r.trials, r.violations, r.worst_margin, r.tolerance, r.seed, "; ".join(r.notes)]
               for r in reports])
    return EXIT_VIOLATION if any(r.violations for r in reports) else EXIT_OK


COMMANDS = {
    "volume": cmd_volume,
    "perimeter": lambda a, o: cmd_volume(a, o, perimeter=True),
    "angle": cmd_angle,
    "growth": cmd_growth,
    "phi": cmd_phi,
    "profile": cmd_profile,
    "icmin": cmd_icmin,
    "dimension": cmd_dimension,
    "smooth": cmd_smooth,
    "hausdorff": cmd_hausdorff,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--body", help="body specification (JSON)")
    common.add_argument("--samples", type=int, default=None, help="Monte-Carlo samples (default 100000)")
    common.add_argument("--seed", type=int, default=0x5EED)
    common.add_argument("--out", help="write CSV here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp comment")
    common.add_argument("--no-shortcuts", action="store_true", help="always sample, never use closed forms")
    common.add_argument("--centers", type=int, default=64, help="candidate centres for infima")

    p = _Parser(prog="isoprof", description="Isoperimetric quantities of unbounded convex bodies.")
    p.add_argument("--version", action="version", version=f"isoprof {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    for name in ("volume", "perimeter"):
        s = sub.add_parser(name, parents=[common], help=f"intrinsic-ball {name}")
        s.add_argument("--point", type=_floats)
        s.add_argument("--radii", type=_floats)
    sub.add_parser("angle", parents=[common], help="solid angle of a cone")
    for name in ("growth", "dimension"):
        s = sub.add_parser(name, parents=[common], help="growth table b(r)" if name == "growth" else "dimension fit")
        s.add_argument("--radii", type=_floats)
        s.add_argument("--rmin", type=float, default=1.0)
        s.add_argument("--rmax", type=float, default=1000.0 if name == "dimension" else 10.0)
        s.add_argument("--points", type=int, default=25 if name == "dimension" else 12)
        if name == "dimension":
            s.add_argument("--window", type=_floats, help="fit window rlo,rhi (default: top decade)")
    for name in ("phi", "profile", "icmin"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--volumes", type=_floats)
    s = sub.add_parser("smooth", parents=[common], help="mollified distance at a probe point")
    s.add_argument("--epsilon", type=float)
    s.add_argument("--probe", type=_floats)
    s = sub.add_parser("hausdorff", parents=[common])
    s.add_argument("--other", required=True, help="second body (JSON)")
    s.add_argument("--radius", type=float, default=3.0, help="window radius about the origin")
    s = sub.add_parser("check", parents=[common], help="property-check suite")
    s.add_argument("--suite", default="all")
    s.add_argument("--trials", type=int, default=100)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:   # --help / --version
        return int(exc.code or 0)
    args.samples_given = args.samples is not None
    if args.samples is None:
        args.samples = 100_000
    if args.samples <= 0 or args.seed < 0:
        print("isoprof: --samples must be positive and --seed non-negative", file=sys.stderr)
        return EXIT_ERROR
    out = Output(args, args.command)
    out.comment(f"seed={args.seed} samples={args.samples}")
    try:
        code = COMMANDS[args.command](args, out) or EXIT_OK
    except UsageError as exc:
        print(f"isoprof {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (IsoprofError, ValueError, OSError) as exc:
        print(f"isoprof {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = out.render()
    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"isoprof: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_ERROR
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
