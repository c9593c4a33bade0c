"""Command-line driver: ``verify``, ``expand``, ``numeric-check`` and ``list``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from math import gcd
from pathlib import Path

from . import __version__
from .modmatch import sl2z_basis
from .numeric import LAWS, ConvergenceError, NumericPoint, numeric_transform_check
from .qseries import STEP
from .theorems import IDS, REGISTRY, RunConfig, run_all
from .thetas import eisenstein, level_two_form, phi_series, theta_null

REPORT_VERSION = "1"
REPORT_DIR_ENV = "E8ANOMALY_REPORT_DIR"
EXPAND_NAMES = ("E2", "E4", "E6", "E4^2E6", "E4E6", "E4^2", "phi",
                "delta1", "delta2", "eps1", "eps2", "theta-nulls")
NUMERIC_VS = (0, 0.3, 0.3 + 0.1j)
DEFAULT_TAUS = ("1j", "1+1j", "2j")

EXIT_OK, EXIT_DISCREPANCY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- output helpers -----------------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _exponent(eighths: int) -> str:
    f = Fraction(eighths, STEP)
    return f"q^{f}"


def _coeff_lines(values) -> list[str]:
    """One line per exponent of the series' lattice ``offset + step * k`` (zeros included)."""
    support = [e for e, v in enumerate(values) if v]
    if not support:
        return [f"{_exponent(0)}: 0"]
    step = STEP
    for e in support:
        step = gcd(step, e - support[0])
    return [f"{_exponent(e)}: {Fraction(int(values[e].numerator), int(values[e].denominator))}"
            for e in range(support[0] % step, len(values), step)]


def render_text(doc: dict) -> str:
    lines = [f"report version {doc['version']}"]
    cfg = doc["config"]
    lines.append("config: " + ", ".join(f"{k}={cfg[k]}" for k in sorted(cfg)))
    for r in doc["reports"]:
        t = r["trials"]
        lines.append(f"{r['id']:<6} {r['status']:<26} {t['passed']}/{t['attempted']} trials")
        if r["residual_summary"]:
            lines.append("    residuals: " + ", ".join(f"{k}={v}" for k, v in sorted(r["residual_summary"].items())))
        if r.get("derived_identity"):
            lines.append(f"    derived: {r['derived_identity']}")
        if r.get("printed_identity"):
            held = r.get("printed_identity_holds")
            lines.append(f"    printed: {r['printed_identity']}  (holds in {held}/{t['attempted']})")
        disagree = sorted(k for k, v in r["agreement"].items() if not v)
        if disagree:
            lines.append("    differs from printed: " + ", ".join(disagree))
        for note in r.get("notes", []):
            lines.append(f"    note: {note}")
    return "\n".join(lines) + "\n"


# -- commands ---------------------------------------------------------------------------------


def _config_from(args) -> RunConfig:
    ids = None
    if args.theorem and "all" not in args.theorem:
        unknown = [i for i in args.theorem if i not in REGISTRY]
        if unknown:
            raise UsageError(f"unknown id: {', '.join(unknown)}")
        ids = tuple(dict.fromkeys(args.theorem))
    for name in ("trials", "modularity_trials", "qorder"):
        if getattr(args, name) < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be >= 1")
    if args.lbar < 0:
        raise UsageError("--lbar must be >= 0")
    if args.mode == "symbolic" and args.lbar > 2:
        raise UsageError("symbolic mode is limited to --lbar <= 2")
    return RunConfig(
        ids=ids,
        dim=args.dim,
        n_e8=args.ne8,
        lbar=args.lbar,
        order=args.qorder,
        mode="evaluated" if args.mode == "eval" else "symbolic",
        trials=args.trials,
        modularity_trials=args.modularity_trials,
        seed=args.seed,
        max_terms=args.max_terms,
    )


def cmd_verify(args) -> int:
    config = _config_from(args)
    reports = run_all(config)
    doc = {"version": REPORT_VERSION, "config": config.as_dict(), "reports": [r.to_dict() for r in reports]}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n" if args.format == "json" else render_text(doc)
    out = args.output
    if out is None and os.environ.get(REPORT_DIR_ENV):
        out = str(Path(os.environ[REPORT_DIR_ENV]) / f"report.{args.format}")
    if out:
        _atomic_write(Path(out), text)
    sys.stdout.write(text)
    return EXIT_OK if all(r.status == "verified" for r in reports) else EXIT_DISCREPANCY


def _expand_values(name: str, N: int) -> list[tuple[str, list]]:
    if name in ("E2", "E4", "E6"):
        return [(name, eisenstein(name, N).rationals())]
    if name in ("E4^2E6", "E4E6", "E4^2"):
        weight = {"E4^2": 8, "E4E6": 10, "E4^2E6": 14}[name]
        return [(name, list(sl2z_basis(weight, N)[1]))]
    if name == "phi":
        return [(name, phi_series(N).rationals())]
    if name in ("delta1", "delta2", "eps1", "eps2"):
        return [(name, level_two_form(name, N).rationals())]
    return [(f"theta{j}(0)", theta_null(f"theta{j}", N).rationals()) for j in (1, 2, 3)]


def cmd_expand(args) -> int:
    if args.name not in EXPAND_NAMES:
        raise UsageError(f"unknown series {args.name!r}; choose from {', '.join(EXPAND_NAMES)}")
    if args.qorder < 1:
        raise UsageError("--qorder must be >= 1")
    blocks = _expand_values(args.name, args.qorder)
    for label, values in blocks:
        if len(blocks) > 1:
            print(f"{label}:")
        for line in _coeff_lines(values[: STEP * args.qorder + 1]):
            print(line)
    return EXIT_OK


def _parse_tau(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse tau {text!r}") from exc


def cmd_numeric_check(args) -> int:
    taus = [_parse_tau(t) for t in (args.tau or DEFAULT_TAUS)]
    laws = args.law or list(LAWS)
    for law in laws:
        if law not in LAWS:
            raise UsageError(f"unknown law {law!r}; choose from {', '.join(LAWS)}")
    ok = True
    for tau in taus:
        for law in laws:
            try:
                worst = max(numeric_transform_check(law, NumericPoint(tau, v)) for v in NUMERIC_VS)
            except ConvergenceError as exc:
                print(f"tau={tau} {law:<12} error: {exc}")
                ok = False
                continue
            passed = worst < args.tolerance
            ok &= passed
            print(f"tau={tau} {law:<12} max residual {worst:.3e} {'pass' if passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_DISCREPANCY


def cmd_list(args) -> int:
    for ident in IDS:
        s = REGISTRY[ident]
        print(f"{ident:<6} {s.kind:<10} dim {s.dim:<2} E8x{s.n_e8} {s.group:<5} weight {s.weight:<2} "
              f"{s.family.name}{' (on the A=0 surface)' if s.constrained else ''}")
    return EXIT_OK


# -- entry point ----------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="e8anomaly", description="Exact checks of E8 anomaly cancellation formulas.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="verify theorems, corollaries and modularity checks")
    v.add_argument("--theorem", action="append", metavar="ID", help="id to run (repeatable) or 'all'")
    v.add_argument("--dim", type=int, choices=(10, 14), help="only ids of this dimension")
    v.add_argument("--ne8", type=int, choices=(1, 2), help="only ids with this many E8 bundles")
    v.add_argument("--lbar", type=int, default=2)
    v.add_argument("--qorder", type=int, default=5)
    v.add_argument("--mode", choices=("eval", "symbolic"), default="eval")
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--modularity-trials", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-terms", type=int, default=200_000, help="monomial cap in symbolic mode")
    v.add_argument("--output", help=f"report path (default: ${REPORT_DIR_ENV}/report.<format> if set)")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("expand", help="print a q-expansion")
    e.add_argument("name", help=", ".join(EXPAND_NAMES))
    e.add_argument("--qorder", type=int, default=5)
    e.set_defaults(func=cmd_expand)

    n = sub.add_parser("numeric-check", help="floating-point spot checks of the transformation laws")
    n.add_argument("--tau", action="append", help="point in the upper half plane, e.g. 1+1j (repeatable)")
    n.add_argument("--law", action="append", help=", ".join(LAWS))
    n.add_argument("--tolerance", type=float, default=1e-9)
    n.set_defaults(func=cmd_numeric_check)

    ls = sub.add_parser("list", help="list registered ids")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"e8anomaly: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
