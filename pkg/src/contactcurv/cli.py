"""Command-line front end.

Subcommands: curvature, profile, mesh, approx, verify.  Exit codes: 0 on
success, 1 on usage errors, 2 on domain or characteristic-point failures.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CharacteristicPointError, ContactCurvError, ParseError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2

_GROUP_ALIASES = {"heis": "heisenberg", "heisenberg": "heisenberg", "h": "heisenberg",
                  "aa": "affine_additive", "affine_additive": "affine_additive"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """Resolved options of one invocation."""

    command: str
    group: str | None = None
    surface: str | None = None
    family: str | None = None
    params: dict = field(default_factory=dict)
    points: list = field(default_factory=list)
    out: str = "-"
    fmt: str = "csv"
    eps: tuple = ()
    threads: int | None = None
    tolerances: dict = field(default_factory=dict)

    def validate(self):
        if self.command in ("curvature", "approx"):
            if (self.surface is None) == (self.family is None):
                raise UsageError("give exactly one of --surface or --family")
            for p in self.points:
                if len(p) != 3 or not all(math.isfinite(c) for c in p):
                    raise UsageError(f"points must be finite triples, got {p!r}")


def _triple(text):
    try:
        vals = tuple(float(v) for v in text.replace(" ", "").split(","))
    except ValueError:
        raise UsageError(f"cannot read point {text!r}") from None
    if len(vals) != 3:
        raise UsageError(f"point {text!r} needs three comma-separated numbers")
    return vals


def _kv(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"parameter {item!r} must look like key=value")
        k, v = item.split("=", 1)
        k, v = k.strip(), v.strip()
        try:
            out[k] = float(eval_number(v))
        except ValueError:
            out[k] = v
    return out


def eval_number(text):
    """A number, possibly written as a constant expression such as 2*pi."""
    from .expr import eval_value, is_constant, parse

    try:
        return float(text)
    except ValueError:
        pass
    try:
        ast = parse(text, ())
    except ParseError:
        raise ValueError(text) from None
    if not is_constant(ast):
        raise ValueError(text)
    return eval_value(ast, (0.0, 0.0, 0.0))


def _read_points(path):
    pts = []
    try:
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    pts.append(_triple(line))
                except UsageError:
                    if pts:
                        raise
                    # header row
    except OSError as exc:
        raise UsageError(f"cannot read points file {path!r}: {exc.strerror}") from None
    return pts


def _config_argv(path):
    argv = []
    try:
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"config line {raw.strip()!r} is not key=value")
                key, value = line.split("=", 1)
                argv += [f"--{key.strip()}", value.strip()]
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    return argv


def _build_parser():
    p = _Parser(prog="contactcurv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config")
        sp.add_argument("--out", default="-")
        sp.add_argument("--param", action="append", default=[])

    c = sub.add_parser("curvature")
    common(c)
    c.add_argument("--group")
    c.add_argument("--surface")
    c.add_argument("--family")
    c.add_argument("--points")
    c.add_argument("--point", action="append", default=[])
    c.add_argument("--threads", type=int)
    c.add_argument("--allow-characteristic", action="store_true")
    c.add_argument("--off-surface", action="store_true", help="skip the |u| < 1e-9 check")

    pr = sub.add_parser("profile")
    common(pr)
    pr.add_argument("--group", required=False)
    pr.add_argument("--kind")
    pr.add_argument("--target")
    pr.add_argument("--range")
    pr.add_argument("--samples", type=int, default=101)
    pr.add_argument("--inset", type=float, default=0.0)

    m = sub.add_parser("mesh")
    common(m)
    m.add_argument("--family")
    m.add_argument("--group")
    m.add_argument("--kind")
    m.add_argument("--target")
    m.add_argument("--range")
    m.add_argument("--samples", type=int, default=61)
    m.add_argument("--angular", type=int, default=48)
    m.add_argument("--inset", type=float, default=0.0)

    a = sub.add_parser("approx")
    common(a)
    a.add_argument("--group")
    a.add_argument("--surface")
    a.add_argument("--family")
    a.add_argument("--point", action="append", default=[])
    a.add_argument("--eps")

    v = sub.add_parser("verify")
    v.add_argument("--config")
    v.add_argument("--out", default=None)
    return p


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out!r}: {exc.strerror}") from None


def _group(name, default=None):
    if name is None:
        if default is None:
            raise UsageError("--group is required")
        return default
    try:
        return _GROUP_ALIASES[name.lower()]
    except KeyError:
        raise UsageError(f"unknown group {name!r} (use heis or aa)") from None


def _surface(cfg: RunConfig):
    from .groups import builtin_model
    from .jets import ScalarField
    from .revolution import model_surface

    if cfg.family is not None:
        try:
            ms = model_surface(cfg.family, cfg.params)
        except ContactCurvError as exc:
            raise UsageError(str(exc)) from None
        if ms.implicit is None:
            raise UsageError(f"family {cfg.family!r} has no implicit representation")
        if cfg.group is not None and cfg.group != ms.group:
            raise UsageError(f"family {cfg.family!r} lives in {ms.group}, not {cfg.group}")
        return builtin_model(ms.group), ms.implicit
    model = builtin_model(_group(cfg.group))
    try:
        return model, ScalarField.from_expr(cfg.surface, model.chart)
    except ParseError as exc:
        raise UsageError(f"malformed surface expression: {exc}") from None


def worker_count(flag=None):
    if flag is not None:
        return max(1, int(flag))
    env = os.environ.get("SRC_CURV_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"SRC_CURV_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _cmd_curvature(args, cfg):
    from .export import CURVATURE_COLUMNS, csv_text, curvature_rows
    from .surface import curvatures

    model, u = _surface(cfg)
    if not cfg.points:
        raise UsageError("give --point or --points")

    def one(p):
        try:
            return curvatures(model, u, p, on_surface=not args.off_surface), None
        except CharacteristicPointError as exc:
            return None, exc
        except ContactCurvError as exc:
            return None, exc

    with ThreadPoolExecutor(max_workers=worker_count(cfg.threads)) as pool:
        results = list(pool.map(one, cfg.points))
    reports = []
    for p, (rep, exc) in zip(cfg.points, results):
        if exc is not None:
            if isinstance(exc, CharacteristicPointError) and args.allow_characteristic:
                reports.append(None)
                continue
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
        reports.append(rep)
    _emit(csv_text(CURVATURE_COLUMNS, curvature_rows(cfg.points, reports)), cfg.out)
    return EXIT_OK


def _range(text):
    if not text:
        raise UsageError("--range a,b is required")
    try:
        a, b = (eval_number(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"cannot read range {text!r}") from None
    return a, b


def _profile_from(args, cfg):
    from .revolution import const_curvature_profile

    if args.kind is None or args.target is None:
        raise UsageError("--kind and --target are required")
    try:
        target = eval_number(args.target)
    except ValueError:
        raise UsageError(f"cannot read target {args.target!r}") from None
    a, b = _range(args.range)
    return const_curvature_profile(_group(cfg.group), args.kind, target, cfg.params, (a, b, args.samples),
                                   inset=getattr(args, "inset", 0.0))


def _cmd_profile(args, cfg):
    from .export import PROFILE_COLUMNS, csv_text, profile_rows

    prof = _profile_from(args, cfg)
    _emit(csv_text(PROFILE_COLUMNS, profile_rows(prof)), cfg.out)
    return EXIT_OK


def _cmd_mesh(args, cfg):
    from .export import obj_text, patch_mesh, revolve_profile
    from .revolution import model_surface

    if args.family is None:
        prof = _profile_from(args, cfg)
        mesh = revolve_profile(prof, args.angular)
        comment = f"{prof.group} constant {prof.kind}={prof.target:g} ({prof.branch})"
    else:
        try:
            ms = model_surface(args.family, cfg.params)
        except ContactCurvError as exc:
            raise UsageError(str(exc)) from None
        if ms.patch is None:
            raise UsageError(f"family {args.family!r} has no parametric patch")
        normal = None
        if ms.implicit is not None:
            normal = lambda q: ms.implicit(q).gradient  # noqa: E731
        elif ms.family == "cc_sphere_heis":
            normal = lambda q: np.asarray(q)  # noqa: E731
        (s0, s1), (p0, p1) = ms.patch_domain
        n_s = args.samples + (args.samples % 2)  # even: keeps k = 0 off the grid
        mesh = patch_mesh(ms.patch, (s0, s1), (p0, p1), n_s, args.angular, normal_at=normal)
        comment = f"{ms.family} {' '.join(f'{k}={v}' for k, v in sorted(cfg.params.items()))}".strip()
    _emit(obj_text(mesh, comment), cfg.out)
    return EXIT_OK


def _cmd_approx(args, cfg):
    from .approx import DEFAULT_EPS, ConvergenceTable, limit_table
    from .export import csv_text

    model, u = _surface(cfg)
    if len(cfg.points) != 1:
        raise UsageError("approx needs exactly one --point")
    table = limit_table(model, u, cfg.points[0], cfg.eps or DEFAULT_EPS)
    _emit(csv_text(ConvergenceTable.COLUMNS, table.rows), cfg.out)
    return EXIT_OK


def _cmd_verify(args, cfg):
    from .acceptance import run_all

    results = run_all()
    lines = [r.line() for r in results]
    text = "\n".join(lines) + "\n"
    if args.out:
        _emit(text, args.out)
    sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_DOMAIN


def _resolve(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    cfg.group = _group(args.group) if getattr(args, "group", None) else None
    cfg.surface = getattr(args, "surface", None)
    cfg.family = getattr(args, "family", None)
    cfg.params = _kv(getattr(args, "param", []))
    cfg.out = args.out if args.out is not None else "-"
    pts = [_triple(p) for p in getattr(args, "point", [])]
    if getattr(args, "points", None):
        pts += _read_points(args.points)
    cfg.points = pts
    if getattr(args, "eps", None):
        try:
            cfg.eps = tuple(float(e) for e in args.eps.split(","))
        except ValueError:
            raise UsageError(f"cannot read eps list {args.eps!r}") from None
        if not all(e > 0 for e in cfg.eps):
            raise UsageError("eps values must be positive")
    cfg.threads = getattr(args, "threads", None)
    cfg.fmt = "obj" if args.command == "mesh" else "csv"
    cfg.validate()
    return cfg


_COMMANDS = {
    "curvature": _cmd_curvature,
    "profile": _cmd_profile,
    "mesh": _cmd_mesh,
    "approx": _cmd_approx,
    "verify": _cmd_verify,
}


_VALUE_FLAGS = {"--range", "--target", "--point", "--eps", "--param", "--surface"}


def _glue_values(argv):
    """Attach values to their flags so a leading minus (--range -2,2) is not read as an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run_cli(argv) -> int:
    argv = _glue_values(list(argv))
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(_COMMANDS))
        if getattr(args, "config", None):
            # config values first, so explicit flags win
            args = parser.parse_args([args.command] + _glue_values(_config_argv(args.config)) + argv[1:])
        cfg = _resolve(args)
        return _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ContactCurvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
