"""Command-line front end.

Exit status: 0 on success, 2 for malformed input or configuration, 3 when the input
data breaks a physical invariant.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import certify as cert
from . import families as fam
from . import io
from . import metrics as mt
from . import witnesses as wt
from .errors import ConfigError, InvariantViolation, ParseError, QWitnessError, ZeroConditioningProbability

CERTIFY_FIELDS = ("command", "input", "verdict", "residual", "dlambda", "restarts", "seed", "heuristic")
GRID_CLOSED_FORMS = {
    "aligned": wt.closed_form_q_aligned,
    "steering-optimal": wt.closed_form_q_steering_optimal,
    "rac-optimal": wt.closed_form_q_rac_optimal,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _add_source(p, family_help="family name, name:value for parametrized ones"):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", help=family_help)
    src.add_argument("--input", help="JSON input document")


def _add_output(p, default):
    p.add_argument("--format", choices=("csv", "jsonl"), default=default)
    p.add_argument("--out", help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwitness", description="Dimension witnesses, randomness bounds and "
                     "bounded hidden-variable certification for two-input/two-output scenarios.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("witness", help="evaluate witnesses on one strategy or box")
    _add_source(p)
    p.add_argument("--metrics", help=f"comma separated subset of {','.join(mt.METRICS)} (default all)")
    _add_output(p, "csv")

    p = sub.add_parser("sweep", help="tabulate witnesses over a parameter range or state grid")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", choices=[n for n, (_, par) in fam.FAMILIES.items() if par])
    src.add_argument("--input", help="JSON grid document")
    p.add_argument("--range", dest="range_", metavar="A:B:N", help="N >= 2 evenly spaced points")
    p.add_argument("--threads", type=int, default=1)
    _add_output(p, "csv")

    p = sub.add_parser("certify", help="local / bounded-model certification of a box")
    p.add_argument("question", choices=("local", "superlocal", "unsteerable", "superunsteerable"))
    _add_source(p)
    p.add_argument("--dlambda", type=int, choices=(2, 3, 4))
    p.add_argument("--restarts", type=int, default=cert.SearchConfig.restarts)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--feas-tol", type=float, default=cert.FEAS_TOL)
    p.add_argument("--nomodel-tol", type=float, default=cert.NOMODEL_TOL)
    _add_output(p, "jsonl")

    p = sub.add_parser("family", help="named families")
    p.add_argument("action", choices=("list",))
    return parser


def _load_strategy(args) -> tuple:
    if args.family is not None:
        return args.family, fam.resolve_family(args.family)
    doc = io.read_document(args.input)
    if io.is_grid(doc):
        raise ParseError(f"{args.input}: a grid document only works with 'sweep'")
    return args.input, io.strategy_from_document(doc)


def parse_range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError(f"range {text!r} is not of the form a:b:n")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError(f"range {text!r} is not of the form a:b:n") from None
    if n < 2:
        raise ParseError(f"range {text!r} needs at least 2 points")
    return np.linspace(a, b, n)


def cmd_witness(args) -> list:
    source, strategy = _load_strategy(args)
    names = mt.parse_metrics(args.metrics)
    values = mt.evaluate(strategy, names)
    if args.format == "csv":
        lines = ["metric,value,exceeded"]
        for name in names:
            hit = ";".join(mt.thresholds_exceeded(name, values[name]))
            lines.append(io.csv_line([name, values[name], hit]))
        return lines
    return [io.dumps({"command": "witness", "input": source, "metric": name, "value": values[name],
                      "exceeded": mt.thresholds_exceeded(name, values[name])}) for name in names]


def _sweep_row(strategy):
    return mt.evaluate(strategy, mt.SWEEP_COLUMNS)


def cmd_sweep(args) -> list:
    if args.family is not None:
        if args.range_ is None:
            raise ParseError("sweep --family needs --range a:b:n")
        params = list(parse_range(args.range_))
        build = fam.family_constructor(args.family)
        strategies = [build(v) for v in params]
        closed = None
    else:
        if args.range_ is not None:
            raise ParseError("--range only applies to --family sweeps")
        doc = io.read_document(args.input)
        if not io.is_grid(doc):
            raise ParseError(f"{args.input}: sweep --input expects a grid document")
        construction = doc["construction"]
        params = list(range(len(doc["states"])))
        strategies = [fam.canonical_strategy(s["a"], s["b"], s["c"], construction)
                      for s in doc["states"]]
        closed_form = GRID_CLOSED_FORMS[construction]
        closed = [closed_form(s["a"], s["b"], s["c"]) for s in doc["states"]]
    if args.threads < 1:
        raise ConfigError("threads must be >= 1")
    if args.threads > 1:
        with ThreadPoolExecutor(args.threads) as pool:
            rows = list(pool.map(_sweep_row, strategies))
    else:
        rows = [_sweep_row(s) for s in strategies]

    columns = ["param", *mt.SWEEP_COLUMNS] + ([] if closed is None else ["Q_closed"])
    records = []
    for i, (param, row) in enumerate(zip(params, rows)):
        rec = {"param": param, **{c: row[c] for c in mt.SWEEP_COLUMNS}}
        if closed is not None:
            rec["Q_closed"] = closed[i]
        records.append(rec)
    if args.format == "csv":
        return [",".join(columns)] + [io.csv_line([r[c] for c in columns]) for r in records]
    return [io.dumps(r) for r in records]


def _require_box(strategy):
    box = strategy.joint_box()
    if box is None:
        raise ConfigError(f"{strategy.label!r} is a prepare-and-measure strategy; certify needs a box")
    return box


def _require_bob(strategy):
    if strategy.bob is None:
        raise ConfigError(f"{strategy.label!r} has no measurements for Bob; steering questions need them")
    return strategy.bob


def _record(command, source, verdict, main, extra=None, reports=None):
    rec = {"command": command, "input": source, "verdict": verdict,
           "residual": main.residual, "dlambda": main.dlambda, "restarts": main.restarts,
           "seed": main.seed, "heuristic": main.heuristic}
    rec.update(extra or {})
    rec["reports"] = {k: r.to_dict() for k, r in (reports or {}).items()}
    return rec


def cmd_certify(args) -> list:
    source, strategy = _load_strategy(args)
    cfg = cert.SearchConfig(restarts=args.restarts, seed=args.seed, threads=args.threads,
                            feas_tol=args.feas_tol, nomodel_tol=args.nomodel_tol)
    box = _require_box(strategy)
    command = f"certify {args.question}"
    if args.question == "local":
        if args.dlambda is not None:
            raise ConfigError("certify local is an exact LP; --dlambda does not apply")
        rep = cert.local_membership(box)
        rec = _record(command, source, rep.verdict.value, rep, reports={"local": rep})
    elif args.question == "superlocal":
        d = args.dlambda or 2
        res = cert.superlocality_verdict(box, d_a=d, cfg=cfg, d_b=d)
        main = res.reports.get("lhv", res.reports["local"])
        rec = _record(command, source, res.classification.value, main, reports=res.reports)
    elif args.question == "unsteerable":
        bob = _require_bob(strategy)
        d = args.dlambda or 2
        if d == 4:
            main = cert.bounded_lhs_search(box, bob, 4, cfg)
            implies = {cert.Verdict.MODEL_FOUND: "Unsteerable",
                       cert.Verdict.NO_MODEL_FOUND: cert.Classification.STEERABLE.value}.get(
                main.verdict, cert.Classification.INCONCLUSIVE.value)
            reports = {"lhs_4": main}
        else:
            res = cert.superunsteerability_verdict(box, bob, d_a=d, cfg=cfg)
            main = res.reports.get(f"lhs_{d}", res.reports["lhs_4"])
            implies, reports = res.classification.value, res.reports
        verdict = main.verdict.value
        if main.dlambda != d:
            # no model even with four hidden states, so none with fewer
            verdict = cert.Verdict.NO_MODEL_FOUND.value
        rec = _record(command, source, verdict, main, {"implies": implies}, reports)
    else:
        bob = _require_bob(strategy)
        d = args.dlambda or 2
        res = cert.superunsteerability_verdict(box, bob, d_a=d, cfg=cfg)
        main = res.reports.get(f"lhs_{d}", res.reports["lhs_4"])
        rec = _record(command, source, res.classification.value, main, reports=res.reports)

    if args.format == "csv":
        return [",".join(CERTIFY_FIELDS), io.csv_line([rec[k] if not isinstance(rec[k], bool)
                                                       else io.fmt(rec[k]) for k in CERTIFY_FIELDS])]
    return [io.dumps(rec)]


def cmd_family(args) -> list:
    lines = ["name,parameter,description"]
    for name, (desc, par) in fam.FAMILIES.items():
        lines.append(io.csv_line([name, "V" if par else "", desc]))
    return lines


COMMANDS = {"witness": cmd_witness, "sweep": cmd_sweep, "certify": cmd_certify, "family": cmd_family}


def _emit(lines, out):
    text = "".join(line + "\n" for line in lines)
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        lines = COMMANDS[args.command](args)
        _emit(lines, getattr(args, "out", None))
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ZeroConditioningProbability as exc:
        print(f"invariant violation: {exc} (index {exc.index})", file=sys.stderr)
        return 3
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    except QWitnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
