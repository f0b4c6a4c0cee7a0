"""Random generators and brute-force oracles shared by the test modules."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from celx.model import Allocation, Environment, Exchange, Rejection, Transfer, apply_exchange
from celx.multiset import Multiset
from celx.policy import ExchangeRule, Policy, PolicySet, enumerate_agreements
from celx.proof import ARITY, Proof, Rule, _check_node, check_proof

AGENTS = ("A", "B", "C")
RESOURCES = ("k", "l", "m")


@dataclass(frozen=True)
class RandomScenario:
    env: Environment
    policies: PolicySet
    pre: Allocation


def random_environment(rng: random.Random, max_agents: int = 3, max_resources: int = 3, max_q: int = 2) -> Environment:
    agents = AGENTS[: rng.randint(2, max_agents)]
    resources = RESOURCES[: rng.randint(1, max_resources)]
    return Environment(agents, {r: rng.randint(1, max_q) for r in resources})


def random_allocation(rng: random.Random, env: Environment) -> Allocation:
    hold: dict[str, list[str]] = {a: [] for a in env.agents}
    for r in env.resources:
        for _ in range(env.q(r)):
            hold[rng.choice(env.agents)].append(r)
    return Allocation(hold)


def _random_transfer(rng: random.Random, env: Environment, giver: str | None = None, receiver: str | None = None) -> Transfer:
    g = giver or rng.choice(env.agents)
    r = receiver or rng.choice([a for a in env.agents if a != g])
    if g == r:
        r = rng.choice([a for a in env.agents if a != g])
    return Transfer(g, rng.choice(env.resources), r)


def random_rule(rng: random.Random, env: Environment, members: frozenset[str]) -> ExchangeRule:
    while True:
        give = [_random_transfer(rng, env, giver=rng.choice(sorted(members))) for _ in range(rng.randint(0, 2))]
        want = []
        for _ in range(rng.randint(0, 2)):
            recv = rng.choice(sorted(members))
            giver = rng.choice([a for a in env.agents if a != recv])
            want.append(Transfer(giver, rng.choice(env.resources), recv))
        rule = ExchangeRule(Multiset(give), Multiset(want))
        if not rule.is_trivial():
            return rule


def random_policies(rng: random.Random, env: Environment, max_rules: int = 4) -> PolicySet:
    rules: dict[frozenset[str], list[ExchangeRule]] = {}
    for _ in range(rng.randint(1, max_rules)):
        if len(env.agents) > 2 and rng.random() < 0.2:
            members = frozenset(rng.sample(env.agents, 2))
        else:
            members = frozenset({rng.choice(env.agents)})
        rules.setdefault(members, []).append(random_rule(rng, env, members))
    return PolicySet(Policy(c, rs) for c, rs in rules.items())


def random_scenario(rng: random.Random) -> RandomScenario:
    env = random_environment(rng)
    return RandomScenario(env, random_policies(rng, env), random_allocation(rng, env))


def transfer_bound(env: Environment, debts: bool) -> int:
    tokens = sum(env.q(r) for r in env.resources)
    return tokens + 2 if debts else tokens


def brute_transition(
    env: Environment, policies: PolicySet, pre: Allocation, post: Allocation, debts: bool, bound: int | None = None
) -> Exchange | None:
    """An agreement of bounded size leading from ``pre`` to ``post``, by enumeration."""
    bound = transfer_bound(env, debts) if bound is None else bound
    for exc in enumerate_agreements(policies, bound):
        if apply_exchange(env, pre, exc, debts) == post:
            return exc
    return None


def reachable_posts(env: Environment, policies: PolicySet, pre: Allocation, debts: bool, bound: int) -> list[Allocation]:
    out = []
    for exc in enumerate_agreements(policies, bound):
        post = apply_exchange(env, pre, exc, debts)
        if not isinstance(post, Rejection) and post not in out:
            out.append(post)
    return out


def hilbert_oracle(matrix: list[list[int]], ncols: int, bound: int) -> list[tuple[int, ...]]:
    """Minimal nonzero solutions of ``M x = 0`` with every component at most ``bound``."""
    sols = []
    for x in itertools.product(range(bound + 1), repeat=ncols):
        if any(x) and all(sum(row[j] * x[j] for j in range(ncols)) == 0 for row in matrix):
            sols.append(x)
    sols.sort(key=sum)
    minimal: list[tuple[int, ...]] = []
    for x in sols:
        if not any(all(m[j] <= x[j] for j in range(ncols)) for m in minimal):
            minimal.append(x)
    return sorted(minimal)


# --- random sound permutations of proofs ------------------------------------

_LIFTABLE = frozenset({Rule.WEAK, Rule.CONT, Rule.BANG_LEFT, Rule.TENSOR_LEFT, Rule.CONTRACT_SPLIT, Rule.CONTRACT_LEFT})
_SINGLE = frozenset({Rule.WEAK, Rule.CONT, Rule.BANG_LEFT, Rule.TENSOR_LEFT, Rule.CONTRACT_SPLIT, Rule.UNIT_LEFT, Rule.CONTRACT_LEFT})


def _left_delta(upper: Multiset, lower: Multiset) -> tuple[Multiset, Multiset]:
    common = Multiset({p: min(upper.count(p), lower.count(p)) for p in lower.distinct()})
    return upper - common, lower - common


def _lift(n: Proof, branch: int) -> Proof | None:
    """Swap ``n`` with its main premise, moving ``n`` into premise ``branch``."""
    from celx.syntax import Sequent

    q = n.premises[-1]
    added, removed = _left_delta(q.conclusion.left, n.conclusion.left)
    side = n.premises[:-1]
    if q.rule in _SINGLE:
        if branch != ARITY[q.rule] - 1:
            return None
        inner = q.premises[-1]
        q_add, q_rem = _left_delta(inner.conclusion.left, q.conclusion.left)
        if not q_rem <= n.conclusion.left:
            return None
        mid_left = n.conclusion.left - q_rem + q_add
        if not removed <= mid_left:
            return None
        n2 = Proof(n.rule, Sequent(mid_left, inner.conclusion.right), side + (inner,))
        q2 = Proof(q.rule, Sequent(n.conclusion.left, q.conclusion.right), q.premises[:-1] + (n2,))
    elif q.rule in (Rule.TENSOR_RIGHT, Rule.CUT):
        target = q.premises[branch]
        if not added <= target.conclusion.left:
            return None
        n2 = Proof(n.rule, Sequent(target.conclusion.left - added + removed, target.conclusion.right), side + (target,))
        prem = list(q.premises)
        prem[branch] = n2
        q2 = Proof(q.rule, Sequent(n.conclusion.left, q.conclusion.right), tuple(prem))
    else:
        return None
    for node in (n2, q2):
        if _check_node(node, cut_allowed=True) is not None:
            return None
    return q2


def _paths(pf: Proof, path: tuple[int, ...] = ()):
    yield path, pf
    for i, p in enumerate(pf.premises):
        yield from _paths(p, path + (i,))


def _replace(pf: Proof, path: tuple[int, ...], new: Proof) -> Proof:
    if not path:
        return new
    prem = list(pf.premises)
    prem[path[0]] = _replace(prem[path[0]], path[1:], new)
    return Proof(pf.rule, pf.conclusion, tuple(prem))


def scramble(pf: Proof, rng: random.Random, steps: int = 20) -> Proof:
    """Apply up to ``steps`` random upward permutations, each preserving validity."""
    cut = pf.uses(Rule.CUT)
    for _ in range(steps):
        candidates = [(path, n) for path, n in _paths(pf) if n.rule in _LIFTABLE and n.premises]
        rng.shuffle(candidates)
        for path, n in candidates:
            q = n.premises[-1]
            branches = list(range(len(q.premises)))
            rng.shuffle(branches)
            lifted = next((x for b in branches if (x := _lift(n, b)) is not None), None)
            if lifted is not None:
                pf = _replace(pf, path, lifted)
                break
        else:
            break
    assert check_proof(pf, cut_allowed=cut) is None
    return pf


# --- valuations ---------------------------------------------------------------


def set_partitions(items: list[str]) -> list[list[frozenset[str]]]:
    if not items:
        return [[]]
    head, rest = items[0], items[1:]
    out = []
    for part in set_partitions(rest):
        out.append([frozenset({head}), *part])
        for i in range(len(part)):
            out.append(part[:i] + [part[i] | {head}] + part[i + 1 :])
    return out


def random_valuation(rng: random.Random, env: Environment, owner: str, isolated: bool = True):
    from celx.valuation import Valuation

    table = {}
    for r in env.resources:
        own, other = rng.randint(-3, 3), rng.randint(-3, 3)
        for a in env.agents:
            table[(a, r)] = own if a == owner else (other if isolated else rng.randint(-3, 3))
    return Valuation(owner, table)


def random_valuations(rng: random.Random, env: Environment, isolated: bool = True):
    from celx.valuation import ValuationSet

    return ValuationSet(random_valuation(rng, env, a, isolated) for a in env.agents)


# --- an independent decision oracle for initial sequents ---------------------


def _can_fire_all(marking: Multiset, imps: Multiset) -> bool:
    """Breadth-first search over (marking, unfired implications)."""
    from collections import deque

    start = (marking, imps)
    seen = {start}
    todo = deque([start])
    while todo:
        m, rest = todo.popleft()
        if not rest:
            return True
        for e in rest.distinct():
            if m.count(e.src):
                nxt = (m.remove(e.src).add(e.dst), rest.remove(e))
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
    return False


def oracle_decide(s, cut: bool, box: int = 3) -> bool:
    """Validity of an initial sequent by bounded enumeration of contract and δ uses."""
    from celx.syntax import Atom, Bang, factors

    thetas = sorted({f.inner for p in s.omega for f in factors(p) if isinstance(f, Bang)}, key=lambda p: p.key())
    deltas = sorted({f.inner for p in s.xi for f in factors(p) if isinstance(f, Bang)}, key=lambda p: p.key())
    sigma = Multiset(a for p in s.sigma for a in factors(p))
    goal = Multiset(factors(s.right))
    assert all(isinstance(a, Atom) for a in goal)

    def imps_of(d):
        return Multiset(factors(d))

    contract_choices = []
    for x in itertools.product(range(box + 1), repeat=len(thetas)):
        left, right = Multiset(), Multiset()
        for t, n in zip(thetas, x):
            for c in factors(t):
                left = left + imps_of(c.left).scale(n)
                right = right + imps_of(c.right).scale(n)
        if left == right:
            contract_choices.append(right)
    for released in contract_choices:
        for y in itertools.product(range(box + 1), repeat=len(deltas)):
            imps = released
            for d, n in zip(deltas, y):
                imps = imps + imps_of(d).scale(n)
            srcs = Multiset(e.src for e in imps)
            dsts = Multiset(e.dst for e in imps)
            if sigma + dsts != goal + srcs:
                continue
            if not cut:
                if srcs <= sigma:
                    return True
            elif _can_fire_all(sigma, imps):
                return True
    return False


def random_initial_sequent(rng: random.Random, cut_friendly: bool = False):
    from celx.syntax import Atom, Bang, Contract, Implication, Sequent, tensor

    atoms = [Atom(r, a) for r in ("k", "l") for a in ("A", "B")]

    def imp():
        r = rng.choice(("k", "l"))
        a, b = rng.sample(("A", "B"), 2) if rng.random() < 0.8 else ("A", "A")
        return Implication(Atom(r, a), Atom(r, b))

    def delta(n):
        return tensor(*[imp() for _ in range(n)])

    xi = [Bang(delta(rng.randint(1, 2))) for _ in range(rng.randint(0, 2))]
    omega = []
    for _ in range(rng.randint(0, 3)):
        omega.append(Bang(Contract(delta(rng.randint(0, 2)), delta(rng.randint(0, 2)))))
    if omega and rng.random() < 0.5:
        c = omega[0].inner
        omega.append(Bang(Contract(c.right, c.left)))
    sigma = [rng.choice(atoms) for _ in range(rng.randint(1, 3))]
    rhs = [rng.choice(atoms) for _ in range(len(sigma))]
    if rng.random() < 0.3:
        rhs = list(sigma)
    return Sequent([*xi, *omega, tensor(*sigma)], tensor(*rhs))
