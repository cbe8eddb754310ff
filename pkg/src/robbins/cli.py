"""Command-line entry point: ``robbins <command> [flags]``.

Exit codes: 0 success, 1 input error, 2 verification failure,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any

import numpy as np

from . import exact, memoryless, montecarlo, noinfo, verify
from .core import ConvergenceError, InputError

try:
    from importlib.metadata import version as _version

    VERSION = _version("artifact")
except Exception:  # pragma: no cover - running from a source tree
    VERSION = "0.1.0"

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3


def fmt(x: float) -> str:
    return format(x, ".12g")


def _round(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(fmt(float(obj)))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def envelope(command: str, params: dict, results: Any) -> str:
    doc = {"command": command, "params": params, "results": results, "artifact-version": VERSION}
    return dumps(doc)


def dumps(doc: Any) -> str:
    return json.dumps(_round(doc), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common(p, fmt_default):
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
    p.add_argument("--out", default="-", metavar="PATH", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robbins", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=VERSION)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("table1", help="optimal memoryless expected rank V(n), n = 1..N")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-9)
    _common(p, "csv")

    p = sub.add_parser("thresholds", help="closed-form optimal thresholds for n in {2, 3, 4}")
    p.add_argument("--n", type=int, default=4)
    _common(p, "json")

    p = sub.add_parser("h2-curve", help="samples of the n = 4 step-2 threshold")
    p.add_argument("--samples", type=int, default=1001)
    _common(p, "csv")

    p = sub.add_parser("regions", help="region labels of the n = 4 step-3 threshold on a grid")
    p.add_argument("--grid", type=int, default=64)
    _common(p, "csv")

    p = sub.add_parser("simulate", help="Monte Carlo mean rank of a policy")
    p.add_argument("policy", help=montecarlo.REGISTRY_HELP)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _common(p, "json")

    p = sub.add_parser("value", help="optimal expected rank v(n) by backward induction")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-depth", type=int, default=30, help="quadrature bisection depth limit")
    _common(p, "json")

    p = sub.add_parser("verify", help="run the cross-check suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--check", action="append", metavar="NAME", help="run only this check (repeatable)")
    _common(p, "json")

    p = sub.add_parser("noinfo", help="no-information value W(n), n = 1..N")
    p.add_argument("--n", type=int, default=100)
    _common(p, "csv")
    return parser


# --------------------------------------------------------------------------
# commands: each returns (params, results, csv header, csv rows)


def cmd_table1(args):
    if not 1 <= args.n <= 50:
        raise InputError("table1 supports 1 <= n <= 50")
    rows = []
    for n in range(1, args.n + 1):
        try:
            tv, value = memoryless.optimize(n, tol=args.tol)
            rows.append({"n": n, "V": value, "thresholds": list(tv.a)})
        except ConvergenceError as exc:
            tv, value = exc.best
            rows.append({"n": n, "V": value, "thresholds": list(tv.a), "error": str(exc)})
    failed = [r for r in rows if "error" in r]
    return ({"n": args.n, "tol": args.tol}, rows, ["n", "V"],
            [(r["n"], r["V"]) for r in rows], EXIT_NUMERIC if failed else EXIT_OK)


def cmd_thresholds(args):
    summary = exact.thresholds_summary(args.n)
    rows = []
    for key in sorted(summary):
        value = summary[key]
        if key == "n":
            continue
        if isinstance(value, float):
            rows.append((key, "", "", value, ""))
        elif key == "betas":
            rows.extend((f"beta{i + 1}", "", "", b, "") for i, b in enumerate(value))
        elif isinstance(value, list):
            rows.extend((key, p["interval"][0], p["interval"][1], "", f'{p["id"]}: {p["formula"]}') for p in value)
        elif isinstance(value, dict):
            rows.extend((key, "", "", "", f"{k}: {v}") for k, v in sorted(value.items()))
    return {"n": args.n}, summary, ["item", "lo", "hi", "value", "formula"], rows, EXIT_OK


def h2_grid(samples: int) -> np.ndarray:
    """Equally spaced points on [0, 1] plus every breakpoint."""
    if samples < 2:
        raise InputError("samples must be at least 2")
    return np.unique(np.concatenate([np.linspace(0.0, 1.0, samples), exact.BETAS]))


def cmd_h2_curve(args):
    xs = h2_grid(args.samples)
    ys = exact.h2_curve()(xs)
    rows = list(zip(xs.tolist(), ys.tolist()))
    results = [{"x1": x, "h2": y} for x, y in rows]
    return {"samples": args.samples}, results, ["x1", "h2"], rows, EXIT_OK


def cmd_regions(args):
    if args.grid < 2:
        raise InputError("grid must be at least 2")
    x1, x2, labels = verify.region_raster(args.grid)
    rows = list(zip(x1.ravel().tolist(), x2.ravel().tolist(), labels.ravel().tolist()))
    results = [{"x1": a, "x2": b, "region": r} for a, b, r in rows]
    return {"grid": args.grid}, results, ["x1", "x2", "region"], rows, EXIT_OK


def cmd_simulate(args):
    if args.trials < 1:
        raise InputError("trials must be at least 1")
    if args.workers < 1:
        raise InputError("workers must be at least 1")
    policy = montecarlo.resolve_policy(args.policy)
    r = montecarlo.evaluate(policy, args.trials, args.seed, workers=args.workers)
    # worker count is deliberately left out: it cannot change the result
    params = {"policy": policy.describe(), "trials": args.trials, "seed": args.seed}
    res = r.to_dict()
    header = ["policy_id", "trials", "seed", "mean", "stderr"]
    return params, res, header, [(r.policy_id, r.trials, r.seed, r.mean, r.stderr)], EXIT_OK


def cmd_value(args):
    from . import oracle
    from .numerics import QuadConfig

    try:
        cfg = QuadConfig(rel_tol=args.tol, max_depth=args.max_depth)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    v = oracle.value_v(args.n, cfg)
    res = {"n": args.n, "v": v, "best_effort": args.n >= 5}
    return {"n": args.n, "tol": args.tol, "max_depth": args.max_depth}, res, ["n", "v"], [(args.n, v)], EXIT_OK


def cmd_verify(args):
    checks = verify.run(args.level, args.check)
    res = {
        "passed": all(c.passed for c in checks),
        "checks": [c.to_dict() for c in checks],
        "failures": [c.name for c in checks if not c.passed],
    }
    rows = [(c.name, "pass" if c.passed else "FAIL",
             "" if c.achieved is None else float(c.achieved), float(c.required)) for c in checks]
    code = EXIT_OK if res["passed"] else EXIT_VERIFY
    return ({"level": args.level, "checks": args.check or []}, res,
            ["check", "status", "achieved", "required"], rows, code)


def cmd_noinfo(args):
    if not 1 <= args.n <= 10_000:
        raise InputError("noinfo supports 1 <= n <= 10000")
    table = noinfo.w_table(args.n)
    results = [{"n": n, "W": w} for n, w in table]
    return {"n": args.n}, results, ["n", "W"], table, EXIT_OK


COMMANDS = {
    "table1": cmd_table1,
    "thresholds": cmd_thresholds,
    "h2-curve": cmd_h2_curve,
    "regions": cmd_regions,
    "simulate": cmd_simulate,
    "value": cmd_value,
    "verify": cmd_verify,
    "noinfo": cmd_noinfo,
}


def run(argv=None) -> tuple[int, str, str]:
    """Parse and execute; returns (exit code, rendered output, output path)."""
    args = build_parser().parse_args(argv)
    try:
        params, results, header, rows, code = COMMANDS[args.command](args)
    except (InputError, KeyError) as exc:
        return EXIT_INPUT, f"error: {exc}\n", "-"
    except ConvergenceError as exc:
        return EXIT_NUMERIC, f"error: {exc} (achieved {exc.achieved})\n", "-"
    if args.format == "csv":
        text = to_csv(header, rows)
    else:
        text = envelope(args.command, params, results)
    return code, text, args.out


def main(argv=None) -> int:
    code, text, out = run(argv)
    if text.startswith("error:"):
        sys.stderr.write(text)
    elif out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
