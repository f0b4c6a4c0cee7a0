"""Exchange rules, coalition policies, acceptance and agreements."""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

from .model import Agent, Allocation, Environment, Exchange, Rejection, Transfer, apply_exchange
from .multiset import Multiset, sum_multisets

Coalition = frozenset[Agent]


@dataclass(frozen=True, order=True)
class ExchangeRule:
    """``give ◁ want``: the coalition performs ``give`` provided it receives ``want``."""

    give: Exchange
    want: Exchange
    name: str = field(default="", compare=False)

    def __str__(self) -> str:
        from .model import format_exchange

        label = f"{self.name}: " if self.name else ""
        return f"{label}{format_exchange(self.give)} <= {format_exchange(self.want)}"

    def is_trivial(self) -> bool:
        return not self.give and not self.want


def coalition(*agents: Agent) -> Coalition:
    return frozenset(agents)


def coalition_name(c: Iterable[Agent]) -> str:
    return "{" + ",".join(sorted(c)) + "}"


@dataclass(frozen=True)
class Policy:
    coalition: Coalition
    rules: tuple[ExchangeRule, ...]

    def __init__(self, coalition: Iterable[Agent], rules: Iterable[ExchangeRule] = ()):
        object.__setattr__(self, "coalition", frozenset(coalition))
        # rules form a set: drop duplicates, keep a stable order
        uniq = sorted(set(rules), key=lambda r: (r.give.items(), r.want.items()))
        named = {}
        for r in rules:
            named.setdefault(r, r)
        object.__setattr__(self, "rules", tuple(named[r] for r in uniq))


@dataclass(frozen=True)
class PolicyViolationReport:
    rule: ExchangeRule
    transfer: Transfer | None
    reason: str

    def __str__(self) -> str:
        where = f" at {self.transfer}" if self.transfer else ""
        return f"rule {self.rule}{where}: {self.reason}"


def validate_policy(env: Environment | None, pol: Policy) -> PolicyViolationReport | None:
    """``None`` when the policy is well formed, otherwise the first offending rule."""
    if not pol.coalition:
        dummy = ExchangeRule(Multiset(), Multiset())
        return PolicyViolationReport(dummy, None, "empty coalition")
    if env is not None:
        for a in sorted(pol.coalition):
            if a not in env.agents:
                return PolicyViolationReport(ExchangeRule(Multiset(), Multiset()), None, f"unknown agent {a!r}")
    for rule in pol.rules:
        for t in rule.give.distinct() + rule.want.distinct():
            if env is not None:
                for a in (t.giver, t.receiver):
                    if a not in env.agents:
                        return PolicyViolationReport(rule, t, f"unknown agent {a!r}")
                if t.resource not in env.quantity:
                    return PolicyViolationReport(rule, t, f"unknown resource {t.resource!r}")
        for t in rule.give.distinct():
            if t.giver not in pol.coalition:
                return PolicyViolationReport(rule, t, f"giver {t.giver} is not in the coalition")
        for t in rule.want.distinct():
            if t.receiver not in pol.coalition:
                return PolicyViolationReport(rule, t, f"receiver {t.receiver} is not in the coalition")
    return None


class PolicySet(Mapping[Coalition, Policy]):
    """Policies indexed by coalition; undeclared coalitions have the empty policy."""

    def __init__(self, policies: Iterable[Policy] = ()):
        merged: dict[Coalition, list[ExchangeRule]] = {}
        for p in policies:
            merged.setdefault(p.coalition, []).extend(p.rules)
        self._by: dict[Coalition, Policy] = {
            c: Policy(c, rs) for c, rs in sorted(merged.items(), key=lambda kv: sorted(kv[0]))
        }

    def __getitem__(self, c: Coalition) -> Policy:
        return self._by.get(frozenset(c), Policy(c))

    def __iter__(self) -> Iterator[Coalition]:
        return iter(self._by)

    def __len__(self) -> int:
        return len(self._by)

    def __contains__(self, c: object) -> bool:
        return c in self._by

    def pairs(self) -> list[tuple[Coalition, ExchangeRule]]:
        """Every ``(coalition, rule)`` pair in deterministic order."""
        return [(c, r) for c, p in self._by.items() for r in p.rules]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolicySet):
            return NotImplemented
        return {c: set(p.rules) for c, p in self._by.items() if p.rules} == {
            c: set(p.rules) for c, p in other._by.items() if p.rules
        }

    def __repr__(self) -> str:
        return f"PolicySet({list(self._by.values())!r})"


# --- combination search -----------------------------------------------------


def _combination(
    rules: list[tuple[Exchange, Exchange]], give: Exchange, want: Exchange
) -> list[int] | None:
    """Multiplicities ``n`` with ``Σ n·give_i = give`` and ``Σ n·want_i = want``.

    Depth first over rules; each rule's multiplicity is capped by how often it
    fits into the residual target on both sides.  Failed ``(index, residual)``
    states are memoised.
    """
    active = [i for i, (g, w) in enumerate(rules) if g or w]
    n = [0] * len(rules)
    dead: set[tuple[int, Exchange, Exchange]] = set()

    def cap(g: Exchange, w: Exchange, rg: Exchange, rw: Exchange) -> int:
        k = None
        for side, res in ((g, rg), (w, rw)):
            for t, c in side.items():
                m = res.count(t) // c
                k = m if k is None else min(k, m)
        return k or 0

    def rec(j: int, rg: Exchange, rw: Exchange) -> bool:
        if not rg and not rw:
            return True
        if j == len(active):
            return False
        key = (j, rg, rw)
        if key in dead:
            return False
        i = active[j]
        g, w = rules[i]
        for k in range(cap(g, w, rg, rw), -1, -1):
            n[i] = k
            if rec(j + 1, rg - g.scale(k), rw - w.scale(k)):
                return True
        n[i] = 0
        dead.add(key)
        return False

    return list(n) if rec(0, give, want) else None


def accepts(pol: Policy, give: Exchange, want: Exchange) -> dict[ExchangeRule, int] | None:
    """A rule combination producing ``give ◁ want``, or ``None`` if not accepted."""
    combo = _combination([(r.give, r.want) for r in pol.rules], give, want)
    if combo is None:
        return None
    return {r: k for r, k in zip(pol.rules, combo) if k}


@dataclass(frozen=True)
class AgreementWitness:
    combinations: Mapping[Coalition, Mapping[ExchangeRule, int]]

    def gives(self) -> Exchange:
        return sum_multisets(r.give.scale(k) for combo in self.combinations.values() for r, k in combo.items())

    def wants(self) -> Exchange:
        return sum_multisets(r.want.scale(k) for combo in self.combinations.values() for r, k in combo.items())

    def contribution(self, c: Coalition) -> tuple[Exchange, Exchange]:
        combo = self.combinations.get(c, {})
        return (
            sum_multisets(r.give.scale(k) for r, k in combo.items()),
            sum_multisets(r.want.scale(k) for r, k in combo.items()),
        )


def is_agreement(policies: PolicySet, exc: Exchange) -> AgreementWitness | None:
    """A witness that ``exc`` is an agreement, or ``None``."""
    pairs = policies.pairs()
    combo = _combination([(r.give, r.want) for _, r in pairs], exc, exc)
    if combo is None:
        return None
    per: dict[Coalition, dict[ExchangeRule, int]] = {}
    for (c, r), k in zip(pairs, combo):
        if k:
            per.setdefault(c, {})[r] = k
    return AgreementWitness(per)


def check_witness(policies: PolicySet, exc: Exchange, witness: AgreementWitness) -> bool:
    for c, combo in witness.combinations.items():
        give, want = witness.contribution(c)
        if accepts(policies[c], give, want) is None:
            return False
        if any(r not in policies[c].rules for r in combo):
            return False
    return witness.gives() == exc and witness.wants() == exc


def enumerate_agreements(policies: PolicySet, max_transfers: int) -> list[Exchange]:
    """Every agreement with at most ``max_transfers`` transfers, sorted."""
    rules = [(r.give, r.want) for _, r in policies.pairs() if not r.is_trivial()]
    found: set[Exchange] = set()

    def rec(i: int, g: Exchange, w: Exchange) -> None:
        if i == len(rules):
            if g == w:
                found.add(g)
            return
        rg, rw = rules[i]
        while len(g) <= max_transfers and len(w) <= max_transfers:
            rec(i + 1, g, w)
            if not rg and not rw:
                break
            g, w = g + rg, w + rw

    rec(0, Multiset(), Multiset())
    return sorted(found)


def _enabled_exchanges(env: Environment, alloc: Allocation, max_transfers: int) -> list[Exchange]:
    """Exchanges of at most ``max_transfers`` transfers that need no debts."""
    slots = [(a, r) for a in env.agents for r in env.resources if alloc.of(a).count(r)]
    out: list[Exchange] = []

    def rec(i: int, acc: list[Transfer], room: int) -> None:
        if i == len(slots):
            out.append(Multiset(acc))
            return
        a, r = slots[i]
        receivers = [b for b in env.agents if b != a]
        for k in range(min(alloc.of(a).count(r), room) + 1):
            for split in itertools.combinations_with_replacement(receivers, k):
                rec(i + 1, acc + [Transfer(a, r, b) for b in split], room - k)

    rec(0, [], max_transfers)
    return sorted(out)


def agreement_transitions(
    env: Environment, policies: PolicySet, alloc: Allocation, debts: bool, max_transfers: int
) -> list[tuple[Exchange, Allocation]]:
    """Every ``(exc, post)`` with ``exc`` an agreement of at most ``max_transfers`` transfers."""
    if debts:
        candidates = enumerate_agreements(policies, max_transfers)
    else:
        # without debts the holdings bound every enabled exchange, so enumerate those instead
        candidates = [e for e in _enabled_exchanges(env, alloc, max_transfers) if is_agreement(policies, e)]
    out = []
    for exc in candidates:
        post = apply_exchange(env, alloc, exc, debts)
        if not isinstance(post, Rejection):
            out.append((exc, post))
    return out
