"""Proof trees, the rule checker and the normal-form shape predicate."""

from __future__ import annotations

import enum
from collections.abc import Iterator
from dataclasses import dataclass
from functools import cached_property

from .multiset import Multiset
from .syntax import (
    Bang,
    Contract,
    Implication,
    Prop,
    Sequent,
    Tensor,
    Unit,
    is_class,
    left_of,
    tensor,
)


class Rule(str, enum.Enum):
    CONT = "Cont"
    WEAK = "Weak"
    BANG_LEFT = "!-left"
    UNIT_LEFT = "I-left"
    UNIT_RIGHT = "I-right"
    AX = "Ax"
    TENSOR_LEFT = "*-left"
    TENSOR_RIGHT = "*-right"
    IMP_LEFT = "-o-left"
    CONTRACT_LEFT = ">>-left"
    CONTRACT_SPLIT = ">>-split"
    CUT = "Cut"

    def __str__(self) -> str:
        return self.value


ARITY = {
    Rule.CONT: 1,
    Rule.WEAK: 1,
    Rule.BANG_LEFT: 1,
    Rule.UNIT_LEFT: 1,
    Rule.UNIT_RIGHT: 0,
    Rule.AX: 0,
    Rule.TENSOR_LEFT: 1,
    Rule.TENSOR_RIGHT: 2,
    Rule.IMP_LEFT: 1,
    Rule.CONTRACT_LEFT: 3,
    Rule.CONTRACT_SPLIT: 1,
    Rule.CUT: 2,
}


@dataclass(frozen=True)
class Proof:
    rule: Rule
    conclusion: Sequent
    premises: tuple[Proof, ...] = ()

    @cached_property
    def size(self) -> int:
        return 1 + sum(p.size for p in self.premises)

    def nodes(self) -> Iterator[Proof]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.premises))

    def uses(self, rule: Rule) -> bool:
        return any(n.rule is rule for n in self.nodes())

    def rule_counts(self) -> dict[Rule, int]:
        out: dict[Rule, int] = {}
        for n in self.nodes():
            out[n.rule] = out.get(n.rule, 0) + 1
        return out


def node(rule: Rule, left, right: Prop, *premises: Proof) -> Proof:
    return Proof(rule, Sequent(left, right), tuple(premises))


# --- checking ---------------------------------------------------------------


@dataclass(frozen=True)
class InvalidNode:
    path: tuple[int, ...]
    rule: Rule | str
    reason: str

    def __str__(self) -> str:
        where = "root" if not self.path else "root." + ".".join(map(str, self.path))
        return f"{where} ({self.rule}): {self.reason}"


def _minus(ms: Multiset[Prop], p: Prop) -> Multiset[Prop] | None:
    if isinstance(p, Unit):
        return ms
    if ms.count(p) < 1:
        return None
    return ms.remove(p)


def _check_node(pf: Proof, cut_allowed: bool) -> str | None:
    rule = pf.rule
    if not isinstance(rule, Rule):
        return f"unknown rule {rule!r}"
    if len(pf.premises) != ARITY[rule]:
        return f"expects {ARITY[rule]} premise(s), got {len(pf.premises)}"
    c = pf.conclusion
    if not c.is_well_formed():
        return "conclusion is not a well-formed sequent"
    L, R = c.left, c.right
    ps = [p.conclusion for p in pf.premises]

    if rule is Rule.AX:
        if L == left_of(R):
            return None
        return "axiom needs identical sides"
    if rule is Rule.UNIT_RIGHT:
        return None if not L and isinstance(R, Unit) else "I-right concludes ⊢ I"
    if rule is Rule.UNIT_LEFT:
        p = ps[0]
        return None if p.left == L and p.right == R else "I-left must keep the context"
    if rule is Rule.CUT and not cut_allowed:
        return "Cut is not allowed"

    if rule in (Rule.CONT, Rule.WEAK, Rule.BANG_LEFT, Rule.TENSOR_LEFT, Rule.IMP_LEFT, Rule.CONTRACT_SPLIT):
        if ps[0].right != R and rule is not Rule.IMP_LEFT:
            return "right-hand side changed"

    if rule is Rule.CONT:
        p = ps[0]
        for b in L.distinct():
            if isinstance(b, Bang) and p.left == L.add(b):
                return None
        return "premise must duplicate one !-formula"
    if rule is Rule.WEAK:
        p = ps[0]
        for b in L.distinct():
            if isinstance(b, Bang) and p.left == L.remove(b):
                return None
        return "premise must drop one !-formula"
    if rule is Rule.BANG_LEFT:
        p = ps[0]
        for b in L.distinct():
            if isinstance(b, Bang) and p.left == L.remove(b) + left_of(b.inner):
                return None
        return "premise must strip one !"
    if rule is Rule.TENSOR_LEFT:
        p = ps[0]
        for t in L.distinct():
            if not isinstance(t, Tensor):
                continue
            rest = L.remove(t)
            if not rest <= p.left:
                continue
            added = p.left - rest
            if 1 <= len(added) <= 2 and tensor(*added) == t and added != Multiset([t]):
                return None
        return "premise must split one tensor"
    if rule is Rule.TENSOR_RIGHT:
        p1, p2 = ps
        if p1.left + p2.left != L:
            return "contexts of the premises must add up to the conclusion"
        if tensor(p1.right, p2.right) != R:
            return "right-hand side is not the tensor of the premises"
        return None
    if rule is Rule.IMP_LEFT:
        p = ps[0]
        for f in L.distinct():
            if isinstance(f, Implication) and f.dst == R:
                rest = L.remove(f)
                if p.left == rest and p.right == f.src and all(is_class(q, "sigma") for q in rest.distinct()):
                    return None
        return "no implication matches the premise"
    if rule is Rule.CONTRACT_LEFT:
        if not is_class(R, "sigma"):
            return "contract elimination needs a σ on the right"
        a, b, k = ps
        for f in L.distinct():
            if not isinstance(f, Contract):
                continue
            d, d2 = f.left, f.right
            if (
                a.left == left_of(d)
                and a.right == d2
                and b.left == left_of(d2)
                and b.right == d
                and k.left == L.remove(f) + left_of(d2)
                and k.right == R
            ):
                return None
        return "premises do not match any contract"
    if rule is Rule.CONTRACT_SPLIT:
        if not is_class(R, "sigma"):
            return "contract split needs a σ on the right"
        p = ps[0]
        cs = [f for f in L.distinct() if isinstance(f, Contract)]
        for i, c1 in enumerate(cs):
            for c2 in cs[i:]:
                if c1 == c2 and L.count(c1) < 2:
                    continue
                rest = L.remove(c1).remove(c2)
                merged = Contract(tensor(c1.left, c2.left), tensor(c1.right, c2.right))
                if p.left == rest.add(merged):
                    return None
        return "premise must merge two contracts"
    if rule is Rule.CUT:
        p1, p2 = ps
        s = p1.right
        if not is_class(s, "sigma"):
            return "cut formula must be a σ"
        rest2 = _minus(p2.left, s)
        if rest2 is None:
            return "cut formula missing from the second premise"
        if p1.left + rest2 != L or p2.right != R:
            return "contexts do not combine to the conclusion"
        return None
    return f"unhandled rule {rule}"


def check_proof(pf: Proof, cut_allowed: bool = False) -> InvalidNode | None:
    """``None`` if every node instantiates its rule, else the first bad node (pre-order)."""
    stack: list[tuple[Proof, tuple[int, ...]]] = [(pf, ())]
    seen: set[int] = set()
    while stack:
        n, path = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        err = _check_node(n, cut_allowed)
        if err is not None:
            return InvalidNode(path, n.rule, err)
        for i in range(len(n.premises) - 1, -1, -1):
            stack.append((n.premises[i], path + (i,)))
    return None


# --- normal-form shape ------------------------------------------------------

R1_RULES = frozenset({Rule.WEAK, Rule.CONT, Rule.BANG_LEFT, Rule.TENSOR_LEFT})
R3_RULES = frozenset({Rule.TENSOR_RIGHT, Rule.TENSOR_LEFT, Rule.AX, Rule.UNIT_RIGHT, Rule.UNIT_LEFT})
R4_RULES = R3_RULES | {Rule.IMP_LEFT}


def _is_outer_split(pf: Proof) -> bool:
    """A tensor split acting on a !-formula tensor or a contract tensor."""
    if pf.rule is not Rule.TENSOR_LEFT:
        return False
    below, above = pf.conclusion.left, pf.premises[0].conclusion.left
    removed = [t for t in below.distinct() if below.count(t) > above.count(t)]
    return any(isinstance(t, Tensor) and (is_class(t, "xi") or is_class(t, "omega") or is_class(t, "theta")) for t in removed)


def _only(pf: Proof, allowed: frozenset[Rule]) -> bool:
    return all(n.rule in allowed for n in pf.nodes())


def normal_form(pf: Proof) -> int | None:
    """1 or 2 when ``pf`` has one of the two layered normal shapes, else ``None``.

    Bottom up: a chain of structural rules for the ``!`` contexts, then either a
    tree built from ``⊸``/``⊗``/axiom rules (shape 1), or a chain of contract
    splits ending in a single contract elimination whose side premises are
    pure ``⊗``/axiom proofs and whose main premise is such a tree (shape 2).
    When the proof uses Cut, the structural layer may only split
    ``!``-formula and contract tensors, and the leaf layer may also use Cut.
    """
    with_cut = pf.uses(Rule.CUT)
    leaf_rules = R4_RULES | {Rule.CUT} if with_cut else R4_RULES

    def in_r1(n: Proof) -> bool:
        if n.rule not in R1_RULES:
            return False
        if with_cut and n.rule is Rule.TENSOR_LEFT:
            return _is_outer_split(n)
        return True

    cur = pf
    while in_r1(cur):
        cur = cur.premises[0]
    if _only(cur, leaf_rules):
        return 1
    while cur.rule is Rule.CONTRACT_SPLIT:
        cur = cur.premises[0]
    if cur.rule is not Rule.CONTRACT_LEFT:
        return None
    a, b, k = cur.premises
    if _only(a, R3_RULES) and _only(b, R3_RULES) and _only(k, leaf_rules):
        return 2
    return None
