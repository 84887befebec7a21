"""Command-line interface.

Exit status is 0 on success (formula true or valid, proof accepted, no
countermodel), 1 when something is falsified or rejected, and 2 on usage or
input errors. Every command accepts ``--json`` for machine-readable output.

Formulas use the grammar documented in :mod:`admtl.grammar`. Model files
and proof scripts use the JSON layouts of :mod:`admtl.semantics` and
:mod:`admtl.derivations`.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import arithmetic, embedding
from .derivations import ScriptFormatError, load_script, shipped_script
from .grammar import parse_formula, print_formula
from .kernel import KernelError, check_proof, tiers_used
from .search import SearchBudgetExceeded, countermodel_search, DEFAULT_BUDGET
from .semantics import (
    ModelError, TimeFlow, close_family, falsifier, model_from_json, model_to_json, satisfies,
)
from .syntax import SyntaxError_, free_vars, normalize, symbols


class UsageError(Exception):
    pass


def _emit(args, data, text):
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _formula(args, sig=None):
    return parse_formula(args.formula, sig)


def _model(args):
    return model_from_json(_read_json(args.model))


def _assignment(pairs):
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"assignment {item!r} should look like x=a")
        x, a = item.split("=", 1)
        out[x.strip()] = a.strip()
    return out


# --- commands ----------------------------------------------------------------------

def cmd_parse(args):
    phi = _formula(args)
    if args.expand:
        phi = normalize(phi)
    text = print_formula(phi)
    _emit(args, {"formula": text, "free_vars": sorted(free_vars(phi)),
                 "signature": symbols(phi).to_json()}, text)
    return 0


def cmd_check_proof(args):
    script = shipped_script(args.shipped) if args.shipped else load_script(args.script)
    verdict = check_proof(script)
    data = {"accepted": verdict.accepted, "goal": print_formula(script.goal),
            "lines": len(script.lines)}
    if verdict.accepted:
        data["tiers"] = sorted(tiers_used(script))
        text = f"accepted: {data['goal']} ({len(script.lines)} lines, tiers {', '.join(data['tiers'])})"
    else:
        data.update(line=verdict.line, reason=verdict.reason)
        text = f"rejected at line {verdict.line}: {verdict.reason}"
    _emit(args, data, text)
    return 0 if verdict.accepted else 1


def cmd_eval(args):
    M = _model(args)
    phi = _formula(args, M.signature)
    f = _assignment(args.assign)
    missing = free_vars(phi) - set(f)
    if missing:
        raise UsageError(f"free variables {sorted(missing)} need --assign")
    value = satisfies(M, args.at, f, phi)
    _emit(args, {"value": value}, "true" if value else "false")
    return 0 if value else 1


def cmd_valid(args):
    M = _model(args)
    phi = _formula(args, M.signature)
    hit = falsifier(M, phi)
    if hit is None:
        _emit(args, {"valid": True}, "valid")
        return 0
    t, f = hit
    _emit(args, {"valid": False, "t": t, "assignment": f},
          f"falsified at {t}" + (f" under {f}" if f else ""))
    return 1


def cmd_countermodel(args):
    phi = _formula(args)
    found = countermodel_search(phi, args.tmax, args.umax, args.mode, seed=args.seed,
                                n=args.samples, tmin=args.tmin, budget=args.budget)
    if found is None:
        _emit(args, {"found": False}, "none found")
        return 0
    data = {"found": True, "model": model_to_json(found.model), "t": str(found.t),
            "assignment": {x: str(a) for x, a in found.f.items()}}
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(json.dumps(data["model"], indent=2))
        print(f"falsified at {found.t}" + (f" under {data['assignment']}" if found.f else ""))
    return 1


def cmd_closure(args):
    flow = TimeFlow.of_size(args.size)
    seed = []
    for text in args.set or []:
        pts = [int(p) for p in text.split(",") if p.strip()]
        if any(not 0 <= p < args.size for p in pts):
            raise UsageError(f"points must lie in 0..{args.size - 1}")
        seed.append(flow.mask(pts))
    fam = close_family(seed, flow)
    members = [flow.members(X) for X in fam]
    _emit(args, {"size": len(fam), "powerset": fam.is_powerset, "members": members},
          f"{len(fam)} sets" + (" (the full powerset)" if fam.is_powerset else "")
          + ("\n" + "\n".join(str(m) for m in members) if args.list else ""))
    return 0


def cmd_mu(args):
    parts = arithmetic.mu_bounded_conjuncts() if args.bounded else arithmetic.mu_conjuncts()
    texts = [print_formula(c) for c in parts]
    _emit(args, {"bounded": args.bounded, "conjuncts": texts}, "\n".join(texts))
    return 0


def cmd_window_model(args):
    M = arithmetic.build_window_model(args.N)
    print(json.dumps(model_to_json(M), indent=None if args.json else 1))
    return 0


def cmd_check_translation(args):
    if args.model:
        M = _model(args)
    else:
        M = arithmetic.build_window_model(args.window)
    phi = _formula(args)
    report = arithmetic.check_translation(phi, M)
    data = {"checked": report.checked, "agreed": report.agreed,
            "disagreements": [{"t": str(t), "assignment": {k: str(v) for k, v in f.items()}}
                              for t, f in report.disagreements]}
    _emit(args, data, f"{report.agreed}/{report.checked} agree")
    return 0 if report.ok else 1


def cmd_embed(args):
    emb = embedding.Embedding()
    data = {}
    lines = []
    if args.theta:
        vals = {}
        for text in args.theta:
            a = embedding.parse_element(text)
            vals[text] = str(emb.theta(a))
            lines.append(f"theta({text}) = {vals[text]}")
        data["theta"] = vals
    if args.interval is not None:
        node = embedding.interval_at(args.interval)
        data["interval"] = node.to_json()
        lines.append(f"interval({args.interval or 'root'}) = ({node.lo}, {node.hi})")
    if args.eta:
        vals = {}
        for text in args.eta:
            node = emb.eta(Fraction(text))
            vals[text] = node.to_json()
            lines.append(f"eta({text}) = {node.path or 'root'} ({node.lo}, {node.hi})")
        data["eta"] = vals
    if args.steps:
        for _ in range(args.steps):
            emb.iso.step()
    if args.dump or args.steps:
        data["pairs"] = emb.pairs_json()
        lines += [f"{p['galaxy']} -> {p['path'] or 'root'}" for p in data["pairs"]]
    if not lines:
        raise UsageError("embed needs --theta, --interval, --eta, --steps or --dump")
    _emit(args, data, "\n".join(lines))
    return 0


# --- argument parsing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    p = argparse.ArgumentParser(prog="admtl", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", parents=[common], help="parse and pretty-print a formula")
    s.add_argument("formula")
    s.add_argument("--print", action="store_true", help="print the canonical form (default)")
    s.add_argument("--expand", action="store_true", help="expand abbreviations first")
    s.set_defaults(run=cmd_parse)

    s = sub.add_parser("check-proof", parents=[common], help="check a proof script")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("script", nargs="?", help="proof script JSON file")
    g.add_argument("--shipped", choices=["barcan_g", "barcan_h"], help="use a bundled script")
    s.set_defaults(run=cmd_check_proof)

    s = sub.add_parser("eval", parents=[common], help="truth of a formula at a time")
    s.add_argument("--model", required=True)
    s.add_argument("--formula", required=True)
    s.add_argument("--at", required=True, help="time point name")
    s.add_argument("--assign", action="append", metavar="x=a")
    s.set_defaults(run=cmd_eval)

    s = sub.add_parser("valid", parents=[common], help="validity in a model")
    s.add_argument("--model", required=True)
    s.add_argument("--formula", required=True)
    s.set_defaults(run=cmd_valid)

    s = sub.add_parser("countermodel", parents=[common], help="search finite standard models")
    s.add_argument("--formula", required=True)
    s.add_argument("--tmax", type=int, default=3)
    s.add_argument("--tmin", type=int, default=1)
    s.add_argument("--umax", type=int, default=2)
    s.add_argument("--mode", choices=["exhaustive", "random"], default="exhaustive")
    s.add_argument("--seed", type=int, default=0, help="random mode seed (default 0)")
    s.add_argument("--samples", type=int, default=1000, help="random mode draws (default 1000)")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.set_defaults(run=cmd_countermodel)

    s = sub.add_parser("closure", parents=[common], help="close a family of subsets of 0..n-1")
    s.add_argument("--size", type=int, required=True)
    s.add_argument("--set", action="append", metavar="0,2", help="a seed set of point indices")
    s.add_argument("--list", action="store_true", help="list the members")
    s.set_defaults(run=cmd_closure)

    s = sub.add_parser("mu", parents=[common], help="print the arithmetic sentence")
    s.add_argument("--bounded", action="store_true", help="the variant for finite windows")
    s.set_defaults(run=cmd_mu)

    s = sub.add_parser("window-model", parents=[common], help="window model as model JSON")
    s.add_argument("N", type=int)
    s.set_defaults(run=cmd_window_model)

    s = sub.add_parser("check-translation", parents=[common],
                       help="compare U_q truth with the relativized formula")
    s.add_argument("--formula", required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--window", type=int, default=3)
    g.add_argument("--model")
    s.set_defaults(run=cmd_check_translation)

    s = sub.add_parser("embed", parents=[common], help="the order embedding")
    s.add_argument("--theta", action="append", metavar="ELEM",
                   help="'n' for a standard element, 'g:j' for a galaxy element")
    s.add_argument("--interval", metavar="PATH", help="path over L/R; '' for the root")
    s.add_argument("--eta", action="append", metavar="RATIONAL", help="galaxy index to map")
    s.add_argument("--steps", type=int, default=0, help="extra back-and-forth steps")
    s.add_argument("--dump", action="store_true", help="print committed pairs")
    s.set_defaults(run=cmd_embed)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args)
    except (OSError, json.JSONDecodeError, SyntaxError_, ModelError, KernelError,
            ScriptFormatError, SearchBudgetExceeded, UsageError, ValueError) as exc:
        print(f"admtl {args.command}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
