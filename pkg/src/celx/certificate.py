"""Proof certificates: JSON trees of ``{rule, conclusion, premises}``.

Conclusions are stored as sequents in prefix syntax, so a certificate can be
re-checked without the prover that produced it.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import CelxError, ParseError
from .proof import InvalidNode, Proof, Rule, check_proof
from .syntax import parse_sequent, sequent_to_text

FORMAT = "celx-proof/1"


class CertificateError(CelxError):
    """A certificate that cannot even be read as a proof tree."""


def proof_to_tree(pf: Proof) -> dict[str, Any]:
    return {
        "rule": pf.rule.value,
        "conclusion": sequent_to_text(pf.conclusion),
        "premises": [proof_to_tree(p) for p in pf.premises],
    }


def tree_to_proof(tree: Any, path: tuple[int, ...] = ()) -> Proof:
    where = "root" + "".join(f".{i}" for i in path)
    if not isinstance(tree, dict) or not {"rule", "conclusion"} <= tree.keys():
        raise CertificateError(f"{where}: node needs 'rule' and 'conclusion'")
    try:
        rule = Rule(tree["rule"])
    except ValueError:
        raise CertificateError(f"{where}: unknown rule {tree['rule']!r}") from None
    try:
        conclusion = parse_sequent(tree["conclusion"])
    except ParseError as e:
        raise CertificateError(f"{where}: bad conclusion: {e}") from None
    premises = tree.get("premises", [])
    if not isinstance(premises, list):
        raise CertificateError(f"{where}: 'premises' must be a list")
    return Proof(rule, conclusion, tuple(tree_to_proof(p, path + (i,)) for i, p in enumerate(premises)))


def dumps(pf: Proof, cut: bool | None = None) -> str:
    cut = pf.uses(Rule.CUT) if cut is None else cut
    return json.dumps({"format": FORMAT, "cut": cut, "proof": proof_to_tree(pf)}, indent=1, ensure_ascii=False) + "\n"


def loads(text: str) -> tuple[Proof, bool]:
    """The proof and whether Cut is permitted in it."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CertificateError(f"not JSON: {e}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise CertificateError(f"expected a {FORMAT} document")
    return tree_to_proof(doc.get("proof")), bool(doc.get("cut", False))


def verify(text: str) -> InvalidNode | None:
    pf, cut = loads(text)
    return check_proof(pf, cut_allowed=cut)
