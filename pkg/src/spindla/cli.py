"""Command-line entry point: ``spindla --model xxz --n 4 --controls z1``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from .hamiltonians import CHAIN_KINDS, ModelSpec, parse_control_token
from .report import EXIT_FORMULA, run_analysis, verify_suite

EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spindla", description="Dynamical Lie algebra and symmetry analysis of spin chains.")
    p.add_argument("--model", choices=CHAIN_KINDS + ("network",))
    p.add_argument("--n", type=int, help="number of sites")
    p.add_argument("--controls", default="", help="comma list like z1,x2 or z1:linear:1:4:3")
    p.add_argument("--couplings", default="uniform", help="uniform, generic or @file.json")
    p.add_argument("--kappa", default="1", help="anisotropy as a rational, e.g. 1/2")
    p.add_argument("--seed", type=int, default=None, help="seed for generic couplings")
    p.add_argument("--spec", help="JSON model spec file")
    p.add_argument("--grade", action="store_true", help="include weight-graded dimensions")
    p.add_argument("--verify", type=int, metavar="N", help="run the verification suite up to N sites")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-dim", type=int, default=None, help="stop closure beyond this dimension")
    return p


def _couplings(text: str):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return json.load(fh)
    if text not in ("uniform", "generic"):
        raise ValueError(f"--couplings must be uniform, generic or @file, got {text!r}")
    return text


def spec_from_args(args) -> ModelSpec:
    if args.spec:
        with open(args.spec) as fh:
            return ModelSpec.from_json(fh.read())
    if args.model is None or args.n is None:
        raise ValueError("either --spec or both --model and --n are required")
    tokens = [t.strip() for t in args.controls.split(",") if t.strip()]
    coup = _couplings(args.couplings)
    d = {"model": args.model, "n": args.n, "couplings": coup, "kappa": str(Fraction(args.kappa)),
         "controls": tokens}
    if args.seed is not None:
        d["seed"] = args.seed
    for t in tokens:
        parse_control_token(t)
    return ModelSpec.from_dict(d)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _verify(args) -> int:
    records = verify_suite(args.verify, threads=args.threads)
    failed = [r for r in records if not r["pass"]]
    if args.format == "json":
        _emit(json.dumps(records, indent=2, sort_keys=True), args.out)
    else:
        lines = ["check,inputs,expected,got,pass"]
        for r in records:
            inputs = ";".join(f"{k}={v}" for k, v in sorted(r["inputs"].items()))
            lines.append(f"{r['check']},{inputs},{r['expected']},{r['got']},{'PASS' if r['pass'] else 'FAIL'}"
                         .replace("[", "").replace("]", "").replace(", ", " "))
        _emit("\n".join(lines), args.out)
    print(f"{len(records) - len(failed)}/{len(records)} checks passed", file=sys.stderr)
    return EXIT_FORMULA if failed else 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be positive")
    try:
        if args.verify is not None:
            return _verify(args)
        spec = spec_from_args(args)
        report = run_analysis(spec, grade=args.grade, threads=args.threads, max_dim=args.max_dim)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"spindla: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report.verdict_csv() if args.format == "csv" else report.to_json(), args.out)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
