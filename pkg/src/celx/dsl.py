"""Scenario files (``.cex``): environment, allocation, policies and valuations.

Line-oriented; ``#`` starts a comment::

    resource k 1
    agent A
    alloc A : k
    coalition AC = { A, C }
    rule AC : C -l-> ?x <= ?x -k-> A
    rule B : B -k-> A <= _
    value A : A.k = 2, B.k = -1

A rule names a declared coalition or a single agent.  Variables ``?x`` range
over all agents; instances containing a self-transfer are dropped.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .errors import CelxError, ParseError
from .model import Allocation, Environment, Exchange, Transfer, validate_allocation
from .multiset import Multiset
from .policy import Coalition, ExchangeRule, Policy, PolicySet, validate_policy
from .valuation import Valuation, ValuationSet


class ScenarioError(CelxError):
    """Well-formed text that does not describe a valid scenario."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class Scenario:
    environment: Environment
    allocation: Allocation
    policies: PolicySet
    valuations: ValuationSet | None = None
    coalition_names: dict[str, Coalition] = field(default_factory=dict, compare=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            self.environment == other.environment
            and self.allocation == other.allocation
            and self.policies == other.policies
            and (self.valuations or ValuationSet()) == (other.valuations or ValuationSet())
        )

    __hash__ = None  # type: ignore[assignment]


_NAME = r"[A-Za-z_][A-Za-z0-9_']*"
_TRANSFER = re.compile(rf"^\s*(\??{_NAME})\s*-\s*({_NAME})\s*->\s*(\??{_NAME})\s*$")
_KEYWORDS = ("resource", "agent", "alloc", "coalition", "rule", "value")


def parse_transfers(text: str, line: int | None = None, column: int | None = None) -> list[tuple[str, str, str]]:
    """Parse ``a -r-> b, c -s-> d`` (or ``_`` for none) into raw triples."""
    text = text.strip()
    if text in ("_", ""):
        if text == "":
            raise ParseError("expected transfers or '_'", line, column)
        return []
    out = []
    for part in text.split(","):
        m = _TRANSFER.match(part)
        if not m:
            raise ParseError(f"malformed transfer {part.strip()!r} (expected 'giver -res-> receiver')", line, column)
        out.append((m.group(1), m.group(2), m.group(3)))
    return out


def parse_exchange(text: str) -> Exchange:
    """Parse a concrete exchange such as ``"A -k-> B, B -m-> C"``."""
    raw = parse_transfers(text or "_")
    for g, _, r in raw:
        if g.startswith("?") or r.startswith("?"):
            raise ParseError("variables are not allowed in a concrete exchange")
    return Multiset(Transfer(g, res, r) for g, res, r in raw)


_ALLOC_ITEM = re.compile(rf"({_NAME})\s*\{{([^}}]*)\}}")


def parse_allocation(text: str, env: Environment | None = None) -> Allocation:
    """Parse ``"A{l} B{k,k} C{}"``; agents not mentioned hold nothing."""
    pos = 0
    hold: dict[str, list[str]] = {a: [] for a in (env.agents if env else ())}
    text = text.strip()
    while pos < len(text):
        m = _ALLOC_ITEM.match(text, pos)
        if not m:
            raise ParseError(f"malformed allocation near {text[pos:]!r}", column=pos + 1)
        rs = [r for r in re.split(r"[\s,]+", m.group(2).strip()) if r]
        hold.setdefault(m.group(1), []).extend(rs)
        pos = m.end()
        while pos < len(text) and text[pos] in " ,\t":
            pos += 1
    return Allocation(hold)


def _expand(raw_give, raw_want, agents) -> list[tuple[Exchange, Exchange]]:
    names = sorted({x for g, _, r in raw_give + raw_want for x in (g, r) if x.startswith("?")})
    out = []
    for values in itertools.product(agents, repeat=len(names)):
        binding = dict(zip(names, values))

        def inst(raw):
            ts = []
            for g, res, r in raw:
                g, r = binding.get(g, g), binding.get(r, r)
                if g == r:
                    return None
                ts.append(Transfer(g, res, r))
            return Multiset(ts)

        give, want = inst(raw_give), inst(raw_want)
        if give is not None and want is not None:
            out.append((give, want))
    return out


def parse_scenario(text: str) -> Scenario:
    lines = text.splitlines()
    quantities: dict[str, int] = {}
    agents: list[str] = []
    allocs: dict[str, list[str]] = {}
    coalitions: dict[str, tuple[frozenset[str], int]] = {}
    rule_lines: list[tuple[int, str, list, list]] = []
    values: dict[str, dict[tuple[str, str], int]] = {}
    saw_any = False

    for lineno, raw in enumerate(lines, 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        saw_any = True
        kw, _, rest = body.partition(" ")
        rest = rest.strip()
        if kw not in _KEYWORDS:
            raise ParseError(f"unknown directive {kw!r}", lineno, 1)
        col = raw.index(rest) + 1 if rest else len(raw) + 1
        if kw == "resource":
            m = re.fullmatch(rf"({_NAME})\s+(\d+)", rest)
            if not m:
                raise ParseError("expected 'resource NAME QTY'", lineno, col)
            if m.group(1) in quantities:
                raise ScenarioError(f"resource {m.group(1)!r} declared twice", lineno)
            quantities[m.group(1)] = int(m.group(2))
        elif kw == "agent":
            names = rest.replace(",", " ").split()
            if not names or not all(re.fullmatch(_NAME, n) for n in names):
                raise ParseError("expected 'agent NAME'", lineno, col)
            for n in names:
                if n in agents:
                    raise ScenarioError(f"agent {n!r} declared twice", lineno)
                agents.append(n)
        elif kw == "alloc":
            m = re.fullmatch(rf"({_NAME})\s*:\s*(.*)", rest)
            if not m:
                raise ParseError("expected 'alloc AGENT : r r ...'", lineno, col)
            rs = m.group(2).replace(",", " ").split()
            if rs == ["_"]:
                rs = []
            allocs.setdefault(m.group(1), []).extend(rs)
        elif kw == "coalition":
            m = re.fullmatch(rf"({_NAME})\s*=\s*\{{([^}}]*)\}}", rest)
            if not m:
                raise ParseError("expected 'coalition NAME = { a, b, ... }'", lineno, col)
            members = frozenset(x.strip() for x in m.group(2).split(",") if x.strip())
            if not members:
                raise ScenarioError("empty coalition", lineno)
            coalitions[m.group(1)] = (members, lineno)
        elif kw == "rule":
            m = re.fullmatch(rf"({_NAME})\s*:\s*(.*?)\s*<=\s*(.*)", rest)
            if not m:
                raise ParseError("expected 'rule COALITION : give <= want'", lineno, col)
            give = parse_transfers(m.group(2), lineno, col)
            want = parse_transfers(m.group(3), lineno, col)
            rule_lines.append((lineno, m.group(1), give, want))
        elif kw == "value":
            m = re.fullmatch(rf"({_NAME})\s*:\s*(.*)", rest)
            if not m:
                raise ParseError("expected 'value AGENT : holder.res = INT, ...'", lineno, col)
            table = values.setdefault(m.group(1), {})
            for entry in m.group(2).split(","):
                e = re.fullmatch(rf"\s*({_NAME})\.({_NAME})\s*=\s*([+-]?\d+)\s*", entry)
                if not e:
                    raise ParseError(f"malformed valuation entry {entry.strip()!r}", lineno, col)
                table[(e.group(1), e.group(2))] = int(e.group(3))

    if not saw_any:
        raise ParseError("empty scenario", 1, 1)
    if not agents:
        raise ScenarioError("no agents declared")
    if not quantities:
        raise ScenarioError("no resources declared")
    env = Environment(agents, quantities)

    names: dict[str, Coalition] = {}
    for cname, (members, lineno) in coalitions.items():
        for a in sorted(members):
            if a not in env.agents:
                raise ScenarioError(f"coalition {cname} mentions unknown agent {a!r}", lineno)
        names[cname] = members

    rules: dict[Coalition, list[ExchangeRule]] = {}
    for lineno, cname, give, want in rule_lines:
        if cname in names:
            members = names[cname]
        elif cname in env.agents:
            members = frozenset({cname})
        else:
            raise ScenarioError(f"unknown coalition or agent {cname!r}", lineno)
        for g, res, r in give + want:
            for x in (g, r):
                if not x.startswith("?") and x not in env.agents:
                    raise ScenarioError(f"unknown agent {x!r}", lineno)
            if res not in env.quantity:
                raise ScenarioError(f"unknown resource {res!r}", lineno)
        bucket = rules.setdefault(members, [])
        for gx, wx in _expand(give, want, env.agents):
            rule = ExchangeRule(gx, wx, name=f"line {lineno}")
            bad = validate_policy(env, Policy(members, [rule]))
            if bad is not None:
                raise ScenarioError(f"rule violates the coalition constraint: {bad}", lineno)
            bucket.append(rule)
    policies = PolicySet(Policy(c, rs) for c, rs in rules.items())

    for a in allocs:
        if a not in env.agents:
            raise ScenarioError(f"allocation for unknown agent {a!r}")
    alloc = Allocation({a: allocs.get(a, []) for a in env.agents})
    problems = validate_allocation(env, alloc)
    if problems:
        raise ScenarioError("invalid allocation: " + "; ".join(map(str, problems)))

    vals = None
    if values:
        for owner, table in values.items():
            if owner not in env.agents:
                raise ScenarioError(f"valuation for unknown agent {owner!r}")
            for holder, res in table:
                if holder not in env.agents or res not in env.quantity:
                    raise ScenarioError(f"valuation of {owner} mentions unknown {holder}.{res}")
        vals = ValuationSet(Valuation(o, t) for o, t in values.items())
    return Scenario(env, alloc, policies, vals, names)


def _fmt_side(exc: Exchange) -> str:
    return ", ".join(str(t) for t in exc) if exc else "_"


def print_scenario(sc: Scenario) -> str:
    env = sc.environment
    out = [f"resource {r} {q}" for r, q in env.quantity.items()]
    out += [f"agent {a}" for a in env.agents]
    for a in env.agents:
        rs = list(sc.allocation.of(a))
        if rs:
            out.append(f"alloc {a} : {' '.join(rs)}")
    names = {c: n for n, c in sc.coalition_names.items()}
    counter = itertools.count(1)
    for c in sc.policies:
        if len(c) == 1 and c not in names:
            names[c] = next(iter(c))
        elif c not in names:
            while True:
                n = f"C{next(counter)}"
                if n not in env.agents and n not in sc.coalition_names:
                    break
            names[c] = n
    for c, n in sorted(names.items(), key=lambda kv: kv[1]):
        if not (len(c) == 1 and n in c):
            out.append(f"coalition {n} = {{ {', '.join(sorted(c))} }}")
    for c in sc.policies:
        for r in sc.policies[c].rules:
            out.append(f"rule {names[c]} : {_fmt_side(r.give)} <= {_fmt_side(r.want)}")
    if sc.valuations:
        for a in sc.valuations:
            table = sc.valuations[a].table
            entries = [f"{h}.{r} = {v}" for (h, r), v in sorted(table.items())]
            if entries:
                out.append(f"value {a} : {', '.join(entries)}")
    return "\n".join(out) + "\n"
