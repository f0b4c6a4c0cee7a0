"""Translation of allocations, exchanges and policies into the logic."""

from __future__ import annotations

from dataclasses import dataclass

from .decision import Decision, decide, vectorize_delta
from .errors import CelxError, NotDecodable
from .model import Allocation, Environment, Exchange, Transfer, validate_allocation
from .multiset import Multiset
from .policy import Policy, PolicySet
from .proof import Proof
from .syntax import Atom, Bang, Contract, Implication, Prop, Sequent, tensor_of


def encode_state(alloc: Allocation) -> Prop:
    return tensor_of(Atom(r, a) for a, rs in alloc.holdings.items() for r in rs)


def encode_transfer(t: Transfer) -> Implication:
    return Implication(Atom(t.resource, t.giver), Atom(t.resource, t.receiver))


def encode_exchange(exc: Exchange) -> Prop:
    return tensor_of(encode_transfer(t) for t in exc)


def encode_policy(pol: Policy) -> Multiset[Prop]:
    """One replicable contract per rule, requested exchange on the left of ``↠``."""
    return Multiset(Bang(Contract(encode_exchange(r.want), encode_exchange(r.give))) for r in pol.rules)


def encode_policies(policies: PolicySet) -> Multiset[Prop]:
    out: Multiset[Prop] = Multiset()
    for c in policies:
        out = out + encode_policy(policies[c])
    return out


def decode_exchange(d: Prop) -> Exchange:
    transfers = []
    for e in vectorize_delta(d):
        if e.src.resource != e.dst.resource:
            raise NotDecodable(f"{e} changes the resource")
        if e.src.agent == e.dst.agent:
            raise NotDecodable(f"{e} does not move the resource")
        transfers.append(Transfer(e.src.agent, e.src.resource, e.dst.agent))
    return Multiset(transfers)


@dataclass(frozen=True)
class EncodedScenario:
    omega: Multiset[Prop]
    sigma_pre: Prop
    sigma_post: Prop

    def sequent(self) -> Sequent:
        return Sequent(self.omega.add(self.sigma_pre), self.sigma_post)


def encode_scenario(policies: PolicySet, pre: Allocation, post: Allocation) -> EncodedScenario:
    return EncodedScenario(encode_policies(policies), encode_state(pre), encode_state(post))


@dataclass(frozen=True)
class TransitionVerdict:
    holds: bool
    sequent: Sequent
    proof: Proof | None
    exchange: Exchange | None
    decision: Decision

    def __bool__(self) -> bool:
        return self.holds


def check_transition_via_logic(
    env: Environment,
    policies: PolicySet,
    pre: Allocation,
    post: Allocation,
    debts: bool = False,
    with_proof: bool = True,
) -> TransitionVerdict:
    """Decide whether an agreement leads from ``pre`` to ``post``."""
    for name, alloc in (("pre", pre), ("post", post)):
        problems = validate_allocation(env, alloc)
        if problems:
            raise CelxError(f"{name}-allocation invalid: {problems[0]}")
    seq = encode_scenario(policies, pre, post).sequent()
    d = decide(seq, cut_allowed=debts, with_proof=with_proof)
    exc = None
    if d.valid:
        gens = d.closure.generators
        exc = Multiset()
        for g, k in zip(gens, d.witness.counts):
            if k:
                exc = exc + decode_exchange(g.delta).scale(k)
    return TransitionVerdict(d.valid, seq, d.proof, exc, d)
