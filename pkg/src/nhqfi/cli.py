"""``nhqfi`` command-line front end.

Exit status is 0 on success, 1 when an input violates a precondition and 2
when a numerical guard trips.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, checks, kernels, pseudo, pt
from .errors import NhqfiError, PreconditionError
from .oracle import DEFAULT_SEED

COLUMNS = ("model", "regime", "m", "phi", "n_label", "epsilon", "omega", "r", "s", "x_or_theta",
           "F_generic", "F_closed_form", "F_projected", "residual")

_ANGLE = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/((?:\d+(?:\.\d*)?|\.\d+)))?$")


class UsageError(PreconditionError):
    pass


def parse_angle(text: str) -> float:
    """Parse ``1.2``, ``pi``, ``-pi/2``, ``2pi/3`` or ``3*pi/4`` to radians."""
    t = text.strip().replace(" ", "")
    m = _ANGLE.match(t)
    if m:
        coef, den = m.groups()
        c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        value = c * math.pi / (float(den) if den else 1.0)
    else:
        try:
            value = float(t)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite angle: {text!r}")
    return value


def parse_angle_list(text: str) -> list[float]:
    return [parse_angle(part) for part in text.split(",") if part.strip()]


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def thread_count() -> int:
    raw = os.environ.get("NHQFI_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"NHQFI_THREADS must be an integer, got {raw!r}") from None


def ordered_map(fn, items):
    """``map`` that may run on ``NHQFI_THREADS`` workers but keeps input order."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, str):
        return v
    return format(float(v), ".12g")


def _at(point: str, fn):
    """Run ``fn`` and tag numerical failures with the grid point."""
    try:
        return fn()
    except PreconditionError:
        raise
    except NhqfiError as exc:
        raise type(exc)(f"{exc} [at {point}]") from exc


# --------------------------------------------------------------------------
# commands


def cmd_pseudo_sweep(args) -> tuple[list[dict], dict]:
    epsilons = args.epsilon or list(pseudo.DEFAULT_EPSILONS)
    xs = np.linspace(args.x_min, args.x_max, args.points)
    jobs = [(eps, label, p) for eps in epsilons for label, p in pseudo.curves(eps, args.omega)]

    def run(job):
        eps, label, p = job
        out = []
        for x in xs:
            x = float(x)
            if label == "dilated":
                closed, gen = _at(f"x={x!r}", lambda: (pseudo.qfi_Fxd(p, x), pseudo.fxd_generic(p, x)))
            else:
                closed, gen = _at(f"x={x!r}", lambda: (pseudo.qfi_Fx(p, x), pseudo.fx_generic(p, x)))
            out.append(dict(model="pseudo", n_label=label, epsilon=eps, omega=args.omega, x_or_theta=x,
                            F_generic=gen, F_closed_form=closed, residual=abs(closed - gen) / abs(gen)))
        return out

    rows = [r for chunk in ordered_map(run, jobs) for r in chunk]
    meta = {"epsilons": epsilons, "omega": args.omega, "x_range": [args.x_min, args.x_max],
            "points": args.points}
    return rows, meta


def _pt_params(args) -> pt.PtParams:
    return pt.PtParams(r=args.r, s=args.s, omega=args.omega)


def cmd_pt_sweep(args) -> tuple[list[dict], dict]:
    p = _pt_params(args)
    regime = p.regime()
    if regime == pt.Regime.EXCEPTIONAL_POINT:
        raise UsageError("parameters sit on the exceptional point; use ep-probe")
    thetas = np.linspace(args.theta_min, args.theta_max, args.points)
    phis = args.phi_list if args.phi_list is not None else [math.pi]

    def run(phi):
        init = pt.PtInitialState(args.m, phi)
        out = []
        for t in thetas:
            t = float(t)
            q = _at(f"theta={t!r}, phi={phi!r}", lambda: pt.qfi(p, init, t))
            out.append(dict(model="pt", regime=regime.value, m=args.m, phi=phi, omega=p.omega, r=p.r, s=p.s,
                            x_or_theta=t, F_generic=q.value, F_closed_form=q.closed_form,
                            F_projected=q.projected, residual=q.residual))
        return out

    rows = [r for chunk in ordered_map(run, phis) for r in chunk]
    meta = {"r": p.r, "s": p.s, "omega": p.omega, "m": args.m, "phis": phis, "regime": regime.value,
            "theta_range": [args.theta_min, args.theta_max], "points": args.points}
    return rows, meta


def cmd_optimal_state(args) -> tuple[list[dict], dict]:
    p = _pt_params(args)
    m_grid = (0.0, args.m_max, args.m_step)
    phi_grid = (0.0, 2 * math.pi, args.phi_step)
    thetas = args.theta

    def run(t):
        return t, _at(f"theta={t!r}", lambda: pt.optimal_initial_state(p, t, m_grid, phi_grid))

    rows = []
    for t, o in ordered_map(run, thetas):
        rows.append(dict(model="pt-optimal", regime=p.regime().value, m=o.m, phi=o.phi, omega=p.omega,
                         r=p.r, s=p.s, x_or_theta=t, F_generic=o.F))
    meta = {"r": p.r, "s": p.s, "omega": p.omega, "m_grid": list(m_grid), "phi_grid": list(phi_grid),
            "kernel_backend": kernels.BACKEND}
    return rows, meta


def cmd_ep_probe(args) -> tuple[list[dict], dict]:
    a = args.r * math.sin(args.omega)
    if not a > 0:
        raise UsageError("need r sin(omega) > 0 to place s on the exceptional point")
    ep = pt.PtParams(r=args.r, s=a, omega=args.omega)
    v = pt.ep_eigenvector(ep)
    rows = []
    thetas = np.linspace(args.theta_min, args.theta_max, args.points)
    for label, s in (("ep", a), ("offset", a + args.offset)):
        p = pt.PtParams(r=args.r, s=s, omega=args.omega)
        for t in thetas:
            t = float(t)
            gen = _at(f"s={s!r}, theta={t!r}", lambda: pt.qfi_generic(p, v, t))
            closed = pt.qfi_at_ep(ep, t) if label == "ep" else None
            rows.append(dict(model=f"pt-{label}", regime=p.regime().value, omega=p.omega, r=p.r, s=s,
                             x_or_theta=t, F_generic=gen.value, F_closed_form=closed,
                             F_projected=gen.projective_term / gen.norm_factor,
                             residual=abs(gen.value - closed) if closed is not None else None))
    meta = {"r": args.r, "omega": args.omega, "s_ep": a, "offset": args.offset}
    return rows, meta


def cmd_check(args) -> tuple[list[dict], dict]:
    result = checks.run_suite(args.suite, args.seed)
    rows = [dict(model=r.check, x_or_theta=r.point, F_generic=r.generic, F_closed_form=r.reference,
                 residual=r.residual) for r in result]
    summary: dict[str, dict] = {}
    for r in result:
        s = summary.setdefault(r.check, {"rows": 0, "max_residual": 0.0, "threshold": r.threshold,
                                         "pass": 0, "known": 0, "fail": 0})
        s["rows"] += 1
        s["max_residual"] = max(s["max_residual"], r.residual)
        s[r.status] += 1
    failed = sum(s["fail"] for s in summary.values())
    meta = {"suite": args.suite, "seed": args.seed, "checks": summary, "failed": failed,
            "known_discrepancies": sorted(checks.known_discrepancies())}
    return rows, meta


COMMANDS = {
    "pseudo-sweep": cmd_pseudo_sweep,
    "pt-sweep": cmd_pt_sweep,
    "optimal-state": cmd_optimal_state,
    "ep-probe": cmd_ep_probe,
    "check": cmd_check,
}


# --------------------------------------------------------------------------
# output


def render(rows: list[dict], meta: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        clean = [{k: r.get(k) for k in COLUMNS if r.get(k) is not None} for r in rows]
        doc = {"metadata": meta, "rows": clean}
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in COLUMNS])
    return buf.getvalue()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nhqfi", description="Quantum Fisher information for non-Hermitian qubits.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", default="-", help="output file, '-' for stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ps = sub.add_parser("pseudo-sweep", parents=[common], help="pseudo-Hermitian sensor QFI against x")
    ps.add_argument("--epsilon", type=float, action="append", help="repeatable; default 1, 1.5, 2")
    ps.add_argument("--omega", type=float, default=1.0)
    ps.add_argument("--x-min", type=float, default=0.0)
    ps.add_argument("--x-max", type=float, default=2.0)
    ps.add_argument("--points", type=int, default=401)

    def pt_args(p, r, s):
        p.add_argument("--r", type=float, default=r)
        p.add_argument("--s", type=float, default=s)
        p.add_argument("--omega", type=parse_angle, default=math.pi / 2)

    pts = sub.add_parser("pt-sweep", parents=[common], help="PT-symmetric qubit QFI against theta")
    pt_args(pts, 0.4, 1.0)
    pts.add_argument("--m", type=float, default=1.0)
    pts.add_argument("--phi-list", type=parse_angle_list, default=None, help="e.g. pi,2pi/3,pi/3,0")
    pts.add_argument("--theta-min", type=float, default=0.0)
    pts.add_argument("--theta-max", type=float, default=15.0)
    pts.add_argument("--points", type=int, default=1501)

    opt = sub.add_parser("optimal-state", parents=[common], help="maximize the QFI over (m, phi)")
    pt_args(opt, 0.4, 1.0)
    opt.add_argument("--theta", type=float, action="append", default=None)
    opt.add_argument("--m-max", type=float, default=3.0)
    opt.add_argument("--m-step", type=float, default=0.02)
    opt.add_argument("--phi-step", type=float, default=0.02)

    ep = sub.add_parser("ep-probe", parents=[common], help="QFI at and just off the exceptional point")
    ep.add_argument("--r", type=float, default=0.5)
    ep.add_argument("--omega", type=parse_angle, default=math.pi / 2)
    ep.add_argument("--offset", type=float, default=1e-3)
    ep.add_argument("--theta-min", type=float, default=0.0)
    ep.add_argument("--theta-max", type=float, default=2.0)
    ep.add_argument("--points", type=int, default=21)

    ck = sub.add_parser("check", parents=[common], help="closed forms against the oracle")
    ck.add_argument("--suite", choices=("all",) + checks.SUITES, default="all")
    return ap


def _validate(args) -> None:
    if getattr(args, "points", 2) < 2:
        raise UsageError("--points must be at least 2")
    if args.command == "optimal-state":
        args.theta = args.theta or [0.0]
        if args.m_step <= 0 or args.phi_step <= 0 or args.m_max <= 0:
            raise UsageError("grid steps and --m-max must be positive")
    if args.command in ("pt-sweep", "optimal-state"):
        _pt_params(args)
        if args.command == "pt-sweep" and args.m < 0:
            raise UsageError("--m must be nonnegative")
    if args.command == "pseudo-sweep":
        for eps in args.epsilon or ():
            pseudo.PseudoQubitParams(eps, args.omega)
        pseudo.PseudoQubitParams(1.0, args.omega)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return int(exc.code or 0)
    try:
        thread_count()
        _validate(args)
        rows, meta = COMMANDS[args.command](args)
    except PreconditionError as exc:
        print(f"nhqfi: error: {exc}", file=sys.stderr)
        return 1
    except NhqfiError as exc:
        print(f"nhqfi: numerical failure: {exc}", file=sys.stderr)
        return 2
    meta = {"command": args.command, "version": __version__, **meta}
    if any(isinstance(r.get("residual"), float) for r in rows):
        res = [r["residual"] for r in rows if isinstance(r.get("residual"), float)]
        meta["residual_max"] = max(res)
    text = render(rows, meta, args.format)
    try:
        if args.output == "-":
            sys.stdout.write(text)
        else:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"nhqfi: error: cannot write {args.output}: {exc}", file=sys.stderr)
        return 1
    if args.command == "check":
        for name, s in meta["checks"].items():
            print(f"{name:32s} {s['rows']:4d} rows  max residual {s['max_residual']:.3e}  "
                  f"pass {s['pass']} known {s['known']} fail {s['fail']}", file=sys.stderr)
        return 0 if meta["failed"] == 0 else 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
