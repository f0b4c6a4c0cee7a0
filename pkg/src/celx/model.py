"""Agents, resources, allocations, transfers and the exchange transition."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Literal

from .errors import InvalidTransfer, UnknownIdentifier
from .multiset import Multiset

Agent = str
Resource = str


@dataclass(frozen=True)
class Environment:
    agents: tuple[Agent, ...]
    resources: tuple[Resource, ...]
    quantity: Mapping[Resource, int]

    def __init__(self, agents: Iterable[Agent], quantity: Mapping[Resource, int]):
        agents = tuple(agents)
        if not agents:
            raise ValueError("an environment needs at least one agent")
        if len(set(agents)) != len(agents):
            raise ValueError("duplicate agent identifiers")
        if not quantity:
            raise ValueError("an environment needs at least one resource")
        for r, q in quantity.items():
            if q < 0:
                raise ValueError(f"negative quantity for resource {r!r}")
        object.__setattr__(self, "agents", tuple(sorted(agents)))
        object.__setattr__(self, "resources", tuple(sorted(quantity)))
        object.__setattr__(self, "quantity", dict(sorted(quantity.items())))

    def __hash__(self) -> int:
        return hash((self.agents, tuple(self.quantity.items())))

    def q(self, resource: Resource) -> int:
        return self.quantity[resource]

    def check_agent(self, a: Agent) -> None:
        if a not in self.agents:
            raise UnknownIdentifier("agent", a)

    def check_resource(self, r: Resource) -> None:
        if r not in self.quantity:
            raise UnknownIdentifier("resource", r)


@dataclass(frozen=True, order=True)
class Transfer:
    """``giver`` hands one unit of ``resource`` to ``receiver``."""

    giver: Agent
    resource: Resource
    receiver: Agent

    def __post_init__(self):
        if self.giver == self.receiver:
            raise InvalidTransfer(f"self-transfer {self.giver} -{self.resource}-> {self.receiver}")

    def __str__(self) -> str:
        return f"{self.giver} -{self.resource}-> {self.receiver}"


Exchange = Multiset[Transfer]


def exchange(*transfers: Transfer | tuple[str, str, str]) -> Exchange:
    """Build an exchange from transfers or ``(giver, resource, receiver)`` triples."""
    return Multiset(t if isinstance(t, Transfer) else Transfer(*t) for t in transfers)


def format_exchange(exc: Exchange) -> str:
    if not exc:
        return "{}"
    return "{" + ", ".join(str(t) for t in exc) + "}"


@dataclass(frozen=True)
class Allocation:
    """Per-agent resource holdings.  Agents without holdings map to the empty multiset."""

    holdings: Mapping[Agent, Multiset[Resource]] = field(default_factory=dict)

    def __init__(self, holdings: Mapping[Agent, Iterable[Resource] | Multiset[Resource]] = ()):
        norm = {}
        for a, rs in dict(holdings).items():
            norm[a] = rs if isinstance(rs, Multiset) else Multiset(rs)
        object.__setattr__(self, "holdings", dict(sorted(norm.items())))

    @classmethod
    def empty(cls, env: Environment) -> Allocation:
        return cls({a: () for a in env.agents})

    def of(self, agent: Agent) -> Multiset[Resource]:
        return self.holdings.get(agent, Multiset())

    def tokens(self) -> Multiset[tuple[Resource, Agent]]:
        """The allocation as a multiset of ``(resource, agent)`` pairs."""
        out: dict[tuple[Resource, Agent], int] = {}
        for a, rs in self.holdings.items():
            for r, n in rs.items():
                out[(r, a)] = n
        return Multiset(out)

    @classmethod
    def from_tokens(cls, agents: Iterable[Agent], tokens: Multiset[tuple[Resource, Agent]]) -> Allocation:
        hold: dict[Agent, dict[Resource, int]] = {a: {} for a in agents}
        for (r, a), n in tokens.items():
            hold.setdefault(a, {})[r] = n
        return cls({a: Multiset(rs) for a, rs in hold.items()})

    def _key(self):
        return tuple((a, rs) for a, rs in self.holdings.items() if rs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Allocation):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __str__(self) -> str:
        parts = []
        for a, rs in self.holdings.items():
            parts.append(f"{a}{{{','.join(rs)}}}")
        return " ".join(parts)


@dataclass(frozen=True)
class Violation:
    kind: Literal["unknown-agent", "unknown-resource", "conservation"]
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} {self.subject}: {self.detail}"


def validate_allocation(env: Environment, alloc: Allocation) -> list[Violation]:
    """Empty list when ``alloc`` is a valid allocation of ``env``."""
    report: list[Violation] = []
    for a, rs in alloc.holdings.items():
        if a not in env.agents:
            report.append(Violation("unknown-agent", a, "not declared in the environment"))
        for r in rs.distinct():
            if r not in env.quantity:
                report.append(Violation("unknown-resource", r, f"held by {a}"))
    if report:
        return report
    for r, q in env.quantity.items():
        total = sum(alloc.of(a).count(r) for a in env.agents)
        if total != q:
            report.append(Violation("conservation", r, f"agents hold {total}, quantity is {q}"))
    return report


def flows(exc: Exchange) -> tuple[dict[tuple[Agent, Resource], int], dict[tuple[Agent, Resource], int]]:
    """Aggregate outgoing and incoming amounts per ``(agent, resource)``."""
    out: dict[tuple[Agent, Resource], int] = {}
    inc: dict[tuple[Agent, Resource], int] = {}
    for t, n in exc.items():
        out[(t.giver, t.resource)] = out.get((t.giver, t.resource), 0) + n
        inc[(t.receiver, t.resource)] = inc.get((t.receiver, t.resource), 0) + n
    return out, inc


@dataclass(frozen=True)
class Rejection:
    agent: Agent
    resource: Resource
    outflow: int
    bound: int

    def __str__(self) -> str:
        return f"{self.agent} gives {self.outflow} {self.resource} but may give at most {self.bound}"


def apply_exchange(env: Environment, alloc: Allocation, exc: Exchange, debts: bool = False) -> Allocation | Rejection:
    """Perform ``exc`` on ``alloc``.

    Without debts every agent must already own what it gives.  With debts the
    outflow may also be covered by what the agent receives in the same
    exchange.  The result is computed on aggregate flows, never per transfer.
    """
    for t in exc.distinct():
        env.check_agent(t.giver)
        env.check_agent(t.receiver)
        env.check_resource(t.resource)
    out, inc = flows(exc)
    for (a, r), n in sorted(out.items()):
        bound = alloc.of(a).count(r) + (inc.get((a, r), 0) if debts else 0)
        if n > bound:
            return Rejection(a, r, n, bound)
    new: dict[Agent, Multiset[Resource]] = {}
    for a in sorted(set(env.agents) | set(alloc.holdings)):
        counts = alloc.of(a).as_dict()
        for r in env.resources:
            counts[r] = counts.get(r, 0) - out.get((a, r), 0) + inc.get((a, r), 0)
        new[a] = Multiset(counts)
    return Allocation(new)


def restrict_exchange(exc: Exchange, coalition: Iterable[Agent]) -> Exchange:
    members = frozenset(coalition)
    return exc.filter(lambda t: t.giver in members or t.receiver in members)
