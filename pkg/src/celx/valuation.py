"""Additive valuations, exchange weights, deals and rational policies."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

from .errors import PreconditionError
from .model import Agent, Allocation, Environment, Exchange, Resource, Transfer, restrict_exchange
from .multiset import Multiset, sub_multisets
from .policy import (
    Coalition,
    ExchangeRule,
    Policy,
    PolicySet,
    agreement_transitions,
)


@dataclass(frozen=True)
class Valuation:
    """How much ``owner`` values resource ``r`` being held by agent ``a``."""

    owner: Agent
    table: Mapping[tuple[Agent, Resource], int] = field(default_factory=dict)

    def av(self, agent: Agent, resource: Resource) -> int:
        return self.table.get((agent, resource), 0)

    def __hash__(self) -> int:
        return hash((self.owner, frozenset(self.table.items())))

    def is_isolated(self, env: Environment) -> tuple[Agent, Resource] | None:
        """``None`` if the owner values every resource equally across all other agents.

        Otherwise returns the first table entry that breaks the condition.
        """
        others = [a for a in env.agents if a != self.owner]
        for r in env.resources:
            values = {self.av(a, r) for a in others}
            if len(values) > 1:
                first = others[0]
                for a in others:
                    if self.av(a, r) != self.av(first, r):
                        return (a, r)
        return None


class ValuationSet(Mapping[Agent, Valuation]):
    def __init__(self, valuations: Iterable[Valuation] = ()):
        self._by = {v.owner: v for v in sorted(valuations, key=lambda v: v.owner)}

    def __getitem__(self, a: Agent) -> Valuation:
        return self._by.get(a) or Valuation(a)

    def __iter__(self) -> Iterator[Agent]:
        return iter(self._by)

    def __len__(self) -> int:
        return len(self._by)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ValuationSet):
            return NotImplemented
        norm = lambda vs: {a: {k: n for k, n in v.table.items() if n} for a, v in vs._by.items()}  # noqa: E731
        strip = lambda d: {a: t for a, t in d.items() if t}  # noqa: E731
        return strip(norm(self)) == strip(norm(other))


def state_value(val: Valuation, alloc: Allocation) -> int:
    return sum(n * val.av(a, r) for a, rs in alloc.holdings.items() for r, n in rs.items())


def exchange_weight(val: Valuation, exc: Exchange) -> int:
    return sum(n * (val.av(t.receiver, t.resource) - val.av(t.giver, t.resource)) for t, n in exc.items())


def is_deal(env: Environment, vals: ValuationSet, members: Iterable[Agent], exc: Exchange) -> bool:
    members = sorted(set(members))
    local = restrict_exchange(exc, members)
    return all(exchange_weight(vals[a], local) >= 0 for a in members)


def unsound_rule(vals: ValuationSet, pol: Policy) -> tuple[ExchangeRule, Agent] | None:
    """The first rule with a member who loses by it, together with that member."""
    for rule in pol.rules:
        both = rule.give + rule.want
        for a in sorted(pol.coalition):
            if exchange_weight(vals[a], both) < 0:
                return rule, a
    return None


def is_sound_policy(env: Environment | None, vals: ValuationSet, pol: Policy) -> bool:
    return unsound_rule(vals, pol) is None


def bounded_exchanges(env: Environment, members: Iterable[Agent], max_transfers: int) -> list[Exchange]:
    """Exchanges touching ``members`` with at most ``max_transfers`` transfers.

    Each resource appears in at most ``q(r)`` transfers, which keeps the
    enumeration finite even for large bounds.
    """
    members = frozenset(members)
    transfers = [
        Transfer(a, r, b)
        for r in env.resources
        for a in env.agents
        for b in env.agents
        if a != b and (a in members or b in members)
    ]
    out: list[Exchange] = []

    def rec(i: int, acc: dict[Transfer, int], size: int, per_res: dict[Resource, int]) -> None:
        if i == len(transfers):
            out.append(Multiset(acc))
            return
        t = transfers[i]
        room = min(max_transfers - size, env.q(t.resource) - per_res.get(t.resource, 0))
        for k in range(room + 1):
            if k:
                acc[t] = k
            per_res[t.resource] = per_res.get(t.resource, 0) + k
            rec(i + 1, acc, size + k, per_res)
            per_res[t.resource] -= k
        acc.pop(t, None)

    rec(0, {}, 0, {})
    return sorted(set(out))


def coalition_splits(exc: Exchange, members: Coalition) -> Iterator[tuple[Exchange, Exchange]]:
    """Every ``(give, want)`` with ``give ⊎ want = exc`` obeying the coalition constraint."""
    for give in sub_multisets(exc):
        want = exc - give
        if all(t.giver in members for t in give.distinct()) and all(t.receiver in members for t in want.distinct()):
            yield give, want


def synthesize_rational_policy(
    env: Environment, vals: ValuationSet, members: Iterable[Agent], max_transfers: int
) -> Policy:
    members = frozenset(members)
    rules: list[ExchangeRule] = []
    for exc in bounded_exchanges(env, members, max_transfers):
        if not exc:
            continue
        if any(exchange_weight(vals[a], exc) < 0 for a in members):
            continue
        rules.extend(ExchangeRule(g, w) for g, w in coalition_splits(exc, members))
    return Policy(members, rules)


@dataclass(frozen=True)
class ParetoCounterexample:
    exchange: Exchange
    post: Allocation
    agent: Agent
    before: int
    after: int


def check_pareto(
    env: Environment,
    policies: PolicySet,
    vals: ValuationSet,
    alloc: Allocation,
    max_transfers: int,
    debts: bool = False,
) -> ParetoCounterexample | None:
    """``None`` if no bounded agreement transition lowers any agent's value."""
    for a in env.agents:
        bad = vals[a].is_isolated(env)
        if bad is not None:
            raise PreconditionError(f"valuation of {a} is not isolated at entry {bad[0]}.{bad[1]}")
    for c in policies:
        offending = unsound_rule(vals, policies[c])
        if offending is not None:
            raise PreconditionError(f"policy of {sorted(c)} is not sound: rule {offending[0]} hurts {offending[1]}")
    before = {a: state_value(vals[a], alloc) for a in env.agents}
    for exc, post in agreement_transitions(env, policies, alloc, debts, max_transfers):
        for a in env.agents:
            after = state_value(vals[a], post)
            if after < before[a]:
                return ParetoCounterexample(exc, post, a, before[a], after)
    return None


def bounded_valid_rules(env: Environment, members: Iterable[Agent], max_transfers: int) -> set[ExchangeRule]:
    """Every non-trivial rule within the bound whose endpoints respect the coalition."""
    members = frozenset(members)
    return {
        ExchangeRule(g, w)
        for exc in bounded_exchanges(env, members, max_transfers)
        if exc
        for g, w in coalition_splits(exc, members)
    }


__all__ = [
    "Valuation",
    "ValuationSet",
    "state_value",
    "exchange_weight",
    "is_deal",
    "is_sound_policy",
    "unsound_rule",
    "synthesize_rational_policy",
    "check_pareto",
    "ParetoCounterexample",
    "bounded_exchanges",
    "coalition_splits",
    "bounded_valid_rules",
]
