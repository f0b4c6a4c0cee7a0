"""Command-line interface.

Exit status: 0 when the question is answered yes, 1 when it is answered no,
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path

from . import certificate
from .decision import decide
from .dsl import Scenario, parse_allocation, parse_exchange, parse_scenario, print_scenario
from .encoder import check_transition_via_logic
from .errors import CelxError
from .model import Exchange, Rejection, apply_exchange, format_exchange
from .normalize import normalize_proof
from .policy import Coalition, PolicySet, agreement_transitions, coalition_name, is_agreement
from .proof import check_proof
from .syntax import parse_sequent, sequent_to_text
from .valuation import exchange_weight, is_deal, synthesize_rational_policy, unsound_rule

YES, NO, USAGE = 0, 1, 2


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 too, but keep it testable
        raise _Usage(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _Usage(f"cannot read {path}: {e.strerror}") from None


def _scenario(path: str) -> Scenario:
    return parse_scenario(_read(path))


def _coalition(sc: Scenario, name: str) -> Coalition:
    if name in sc.coalition_names:
        return sc.coalition_names[name]
    members = frozenset(x.strip() for x in name.split(",") if x.strip())
    for a in members:
        sc.environment.check_agent(a)
    if not members:
        raise _Usage("empty coalition")
    return members


def _write_proof(path: str | None, pf, cut: bool) -> None:
    if path and pf is not None:
        Path(path).write_text(certificate.dumps(pf, cut), encoding="utf-8")


def _witness_doc(exc: Exchange, policies: PolicySet) -> dict:
    w = is_agreement(policies, exc)
    return {
        "exchange": [str(t) for t in exc],
        "combinations": {
            coalition_name(c): [{"rule": str(r), "times": k} for r, k in sorted(combo.items())]
            for c, combo in sorted(w.combinations.items(), key=lambda kv: sorted(kv[0]))
        }
        if w
        else {},
    }


def cmd_check_transition(args, out) -> int:
    sc = _scenario(args.scenario)
    post = parse_allocation(args.to, sc.environment)
    v = check_transition_via_logic(sc.environment, sc.policies, sc.allocation, post, args.debts)
    if not v.holds:
        print(f"no agreement leads from {sc.allocation} to {post}", file=out)
        return NO
    print(f"agreement: {format_exchange(v.exchange)}", file=out)
    print(f"result: {apply_exchange(sc.environment, sc.allocation, v.exchange, args.debts)}", file=out)
    _write_proof(args.emit_proof, v.proof, args.debts)
    if args.witness:
        Path(args.witness).write_text(json.dumps(_witness_doc(v.exchange, sc.policies), indent=1) + "\n", encoding="utf-8")
    return YES


def cmd_agreement(args, out) -> int:
    sc = _scenario(args.scenario)
    exc = parse_exchange(args.exchange)
    w = is_agreement(sc.policies, exc)
    if w is None:
        print(f"not an agreement: {format_exchange(exc)}", file=out)
        return NO
    for c, combo in sorted(w.combinations.items(), key=lambda kv: sorted(kv[0])):
        for r, k in sorted(combo.items()):
            print(f"{coalition_name(c)} x{k}: {r}", file=out)
    post = apply_exchange(sc.environment, sc.allocation, exc, args.debts)
    if isinstance(post, Rejection):
        print(f"not enabled: {post}", file=out)
    else:
        print(f"result: {post}", file=out)
    return YES


def cmd_prove(args, out) -> int:
    s = parse_sequent(_read(args.sequent))
    d = decide(s, cut_allowed=args.cut)
    if not d.valid:
        print(f"not provable: {sequent_to_text(s)}", file=out)
        return NO
    pf = normalize_proof(d.proof)
    print(f"provable ({pf.size} rule applications)", file=out)
    if d.contract_delta is not None:
        print(f"contract elimination releases: {d.contract_delta}", file=out)
    _write_proof(args.emit_proof, pf, args.cut)
    return YES


def cmd_verify_proof(args, out) -> int:
    try:
        pf, cut = certificate.loads(_read(args.proof))
    except certificate.CertificateError as e:
        print(f"invalid certificate: {e}", file=out)
        return NO
    bad = check_proof(pf, cut_allowed=cut or args.cut)
    if bad is not None:
        print(f"invalid: {bad}", file=out)
        return NO
    print(f"valid: {sequent_to_text(pf.conclusion)}", file=out)
    return YES


def _need_values(sc: Scenario):
    if not sc.valuations:
        raise _Usage("the scenario declares no valuations")
    return sc.valuations


def cmd_deal(args, out) -> int:
    sc = _scenario(args.scenario)
    vals = _need_values(sc)
    members = _coalition(sc, args.coalition)
    exc = parse_exchange(args.exchange)
    for a in sorted(members):
        print(f"{a}: weight {exchange_weight(vals[a], exc)}", file=out)
    if is_deal(sc.environment, vals, members, exc):
        print("deal", file=out)
        return YES
    print("not a deal", file=out)
    return NO


def cmd_sound(args, out) -> int:
    sc = _scenario(args.scenario)
    vals = _need_values(sc)
    coalitions = [_coalition(sc, args.coalition)] if args.coalition else sorted(sc.policies, key=sorted)
    verdict = YES
    for c in coalitions:
        bad = unsound_rule(vals, sc.policies[c])
        if bad is None:
            print(f"{coalition_name(c)}: sound", file=out)
        else:
            print(f"{coalition_name(c)}: unsound, rule {bad[0]} hurts {bad[1]}", file=out)
            verdict = NO
    return verdict


def cmd_synth(args, out) -> int:
    sc = _scenario(args.scenario)
    vals = _need_values(sc)
    members = _coalition(sc, args.coalition)
    pol = synthesize_rational_policy(sc.environment, vals, members, args.bound)
    policies = PolicySet([*(sc.policies[c] for c in sc.policies if c != members), pol])
    text = print_scenario(Scenario(sc.environment, sc.allocation, policies, sc.valuations, sc.coalition_names))
    print(text, end="", file=out)
    return YES


def cmd_reach(args, out) -> int:
    sc = _scenario(args.scenario)
    found = agreement_transitions(sc.environment, sc.policies, sc.allocation, args.debts, args.bound)
    for exc, post in found:
        print(f"{format_exchange(exc)}  =>  {post}", file=out)
    if not found:
        print("no agreement transition within the bound", file=out)
    return YES if found else NO


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="celx", description="Policy-based resource exchanges decided in contract logic.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check-transition", help="is there an agreement from the scenario's allocation to --to?")
    c.add_argument("scenario")
    c.add_argument("--to", required=True, help='target allocation, e.g. "A{l} B{k}"')
    c.add_argument("--debts", action="store_true")
    c.add_argument("--emit-proof", metavar="FILE")
    c.add_argument("--witness", metavar="FILE", help="write the agreement and its rule combinations as JSON")
    c.set_defaults(run=cmd_check_transition)

    c = sub.add_parser("agreement", help="is the exchange an agreement of the scenario's policies?")
    c.add_argument("scenario")
    c.add_argument("--exchange", required=True, help='e.g. "A -k-> B, B -l-> A"')
    c.add_argument("--debts", action="store_true", help="apply the exchange allowing debts")
    c.set_defaults(run=cmd_agreement)

    c = sub.add_parser("prove", help="decide an initial sequent from a .cel file")
    c.add_argument("sequent")
    c.add_argument("--cut", action="store_true")
    c.add_argument("--emit-proof", metavar="FILE")
    c.set_defaults(run=cmd_prove)

    c = sub.add_parser("verify-proof", help="re-check a proof certificate")
    c.add_argument("proof")
    c.add_argument("--cut", action="store_true", help="permit Cut even if the certificate does not")
    c.set_defaults(run=cmd_verify_proof)

    c = sub.add_parser("deal", help="is the exchange a deal for a coalition?")
    c.add_argument("scenario")
    c.add_argument("--coalition", required=True, help="coalition name or comma-separated agents")
    c.add_argument("--exchange", required=True)
    c.set_defaults(run=cmd_deal)

    c = sub.add_parser("sound", help="are the policies sound for the scenario's valuations?")
    c.add_argument("scenario")
    c.add_argument("--coalition")
    c.set_defaults(run=cmd_sound)

    c = sub.add_parser("synth", help="print the scenario with a synthesized rational policy")
    c.add_argument("scenario")
    c.add_argument("--coalition", required=True)
    c.add_argument("--bound", type=int, default=2)
    c.set_defaults(run=cmd_synth)

    c = sub.add_parser("reach", help="list agreement transitions within a size bound")
    c.add_argument("scenario")
    c.add_argument("--bound", type=int, default=4)
    c.add_argument("--debts", action="store_true")
    c.set_defaults(run=cmd_reach)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.run(args, out)
    except _Usage as e:
        print(f"celx: {e}", file=sys.stderr)
        return USAGE
    except CelxError as e:
        print(f"celx: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
