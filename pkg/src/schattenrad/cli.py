"""Command-line interface.

Exit codes: 0 when every verdict passes, 1 on any FAIL or uncertified
outcome, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import ConfigError, SuiteConfig, run_checks, run_suite, sharpness_search
from .laws import LawDomainError, evaluate_law, get_law, list_laws
from .matrix import KINDS, MatrixFormatError, load_matrix, matrix_to_json
from .radius import OptimizerConfig, UncertifiedError, omega
from .spectral import PNorm, schatten


class UsageError(Exception):
    pass


def _pnorm(text: str) -> PNorm:
    try:
        return PNorm.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _opt(args) -> OptimizerConfig:
    try:
        return OptimizerConfig(eps=args.eps, max_evals=args.max_evals)
    except ValueError as exc:
        raise UsageError(f"--eps/--max-evals: {exc}") from None


def _load(path):
    try:
        return load_matrix(path)
    except OSError as exc:
        raise UsageError(f"--input {path}: {exc.strerror}") from None
    except MatrixFormatError as exc:
        raise UsageError(f"--input {path}: {exc}") from None


def _law(law_id: str):
    try:
        return get_law(law_id)
    except KeyError as exc:
        raise UsageError(f"--law: {exc.args[0]}") from None


def cmd_norm(args) -> int:
    print(repr(schatten(_load(args.input), args.p)))
    return 0


def cmd_radius(args) -> int:
    a = _load(args.input)
    if a.shape[0] != a.shape[1]:
        raise UsageError(f"--input {args.input}: matrix must be square, got {a.shape}")
    cv = omega(a, args.p, _opt(args))
    print(f"omega_{args.p} = {cv.value!r}")
    print(f"certified interval [{cv.value!r}, {cv.upper!r}]  eps={cv.eps:.3e}  "
          f"arg={cv.arg!r}  evals={cv.evals}")
    return 0


def _print_check(chk) -> None:
    print(f"{chk.law_id} p={chk.p} {json.dumps(chk.inputs, sort_keys=True)}: {chk.verdict} "
          f"slack={chk.slack:.6e} budget={chk.eps_budget:.3e}")


def cmd_check(args) -> int:
    law = _law(args.law)
    opt = _opt(args)
    try:
        if args.input:
            mats = [_load(f) for f in args.input]
            params = {"grid": args.grid} if args.grid else None
            chk = evaluate_law(law, mats, args.p, opt, params=params,
                               descriptor={"explicit": True, "files": list(args.input)},
                               exploratory=args.exploratory)
            _print_check(chk)
            if args.out:
                with open(args.out, "w") as fh:
                    json.dump(chk.to_dict(), fh, indent=2)
                    fh.write("\n")
            return 0 if chk.passed or chk.exploratory else 1
        if args.dim is None:
            raise UsageError("--dim is required unless --input is given")
        report = run_checks(law.id, args.p, args.dim, args.trials, args.seed, kind=args.kind,
                            opt=opt, exploratory=args.exploratory)
    except LawDomainError as exc:
        raise UsageError(f"--p: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for law_summary in report.laws:
        for cell in law_summary["cells"]:
            print(f"{cell['law_id']} p={cell['p']} dim={cell['dim']}: trials={cell['trials']} "
                  f"passes={cell['passes']} failures={cell['failures']} "
                  f"witnesses={cell['witnesses']} uncertified={cell['uncertified']} "
                  f"min_slack={cell['min_slack']}")
    for f in report.failures:
        print(f"FAIL slack={f['slack']:.6e} budget={f['eps_budget']:.3e}  reproduce: {f['reproduce']}")
    report.write(args.out)
    return 0 if report.ok else 1


def cmd_suite(args) -> int:
    try:
        cfg = SuiteConfig.load(args.config) if args.config else SuiteConfig()
    except OSError as exc:
        raise UsageError(f"--config {args.config}: {exc.strerror}") from None
    except (ConfigError, KeyError) as exc:
        raise UsageError(f"--config: {exc}") from None
    report = run_suite(cfg, workers=args.workers)
    for law in report.laws:
        mark = "ok  " if not law["failures"] and not law["uncertified"] else "FAIL"
        print(f"{mark} {law['law_id']:<9} trials={law['trials']:<6} failures={law['failures']:<5} "
              f"witnesses={law['witnesses']:<5} uncertified={law['uncertified']} "
              f"min_slack={law['min_slack']}")
    print(f"{len(report.failures)} failure(s), {len(report.uncertified)} uncertified, "
          f"{report.wall_clock_seconds:.1f}s")
    report.write(args.out, args.csv)
    return 0 if report.ok else 1


def cmd_sharpness(args) -> int:
    law = _law(args.law)
    if law.is_equality:
        raise UsageError(f"--law {law.id}: law is an equality")
    try:
        res = sharpness_search(law.id, args.p, args.dim, args.restarts, args.steps, args.seed,
                               _opt(args), link=args.link)
    except LawDomainError as exc:
        raise UsageError(f"--p: {exc}") from None
    _print_check(res.check)
    print(f"best objective {res.objective!r} at restart {res.restart}, step {res.step}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"check": res.check.to_dict(),
                       "inputs": [matrix_to_json(m) for m in res.inputs]}, fh, indent=2)
            fh.write("\n")
    return 0 if res.check.passed else 1


def cmd_laws(args) -> int:
    for law in list_laws():
        print(f"{law.id:<9} {law.kind:<10} p in {str(law.p_domain):<10} {law.anchor}")
        if args.verbose:
            print(f"          {law.description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schattenrad", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def opt_flags(sp):
        sp.add_argument("--eps", type=float, default=1e-6, help="certificate target (default 1e-6)")
        sp.add_argument("--max-evals", type=int, default=200_000)

    sp = sub.add_parser("norm", help="Schatten p-norm of a matrix file")
    sp.add_argument("--input", required=True)
    sp.add_argument("--p", type=_pnorm, required=True)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("radius", help="certified Schatten p-numerical radius")
    sp.add_argument("--input", required=True)
    sp.add_argument("--p", type=_pnorm, required=True)
    opt_flags(sp)
    sp.set_defaults(func=cmd_radius)

    sp = sub.add_parser("check", help="evaluate one law on seeded or explicit inputs")
    sp.add_argument("--law", required=True)
    sp.add_argument("--p", type=_pnorm, required=True)
    sp.add_argument("--dim", type=int)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--kind", choices=[k for k in KINDS if k != "scaled_ginibre"])
    sp.add_argument("--input", action="append", help="matrix file; repeat for each law input")
    sp.add_argument("--grid", type=int, help="block grid for BK laws with --input")
    sp.add_argument("--exploratory", action="store_true",
                    help="allow p outside the law's range; results are never FAIL")
    sp.add_argument("--out")
    opt_flags(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("suite", help="run the seeded law suite")
    sp.add_argument("--config")
    sp.add_argument("--out")
    sp.add_argument("--csv")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_suite)

    sp = sub.add_parser("sharpness", help="hill-climb towards a tight instance of an inequality")
    sp.add_argument("--law", required=True)
    sp.add_argument("--p", type=_pnorm, required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--restarts", type=int, default=4)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--link", type=int, help="index of the chain link to tighten")
    sp.add_argument("--out")
    opt_flags(sp)
    sp.set_defaults(func=cmd_sharpness)

    sp = sub.add_parser("laws", help="list the law catalog")
    sp.add_argument("-v", "--verbose", action="store_true")
    sp.set_defaults(func=cmd_laws)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UncertifiedError as exc:
        print(f"uncertified: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
