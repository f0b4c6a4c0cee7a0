import random

import pytest
from conftest import load

from celx.dsl import Scenario, ScenarioError, parse_allocation, parse_exchange, parse_scenario, print_scenario
from celx.errors import ParseError
from celx.model import Allocation, Transfer
from celx.policy import PolicySet
from celx.valuation import synthesize_rational_policy
from support import random_allocation, random_environment, random_policies, random_valuations

EX9 = """
resource k 1
resource l 1
resource m 1
agent A
agent B
agent C
alloc A : k
alloc B : m
alloc C : l
rule A : A -k-> ?a <= ?b -l-> A
rule B : B -m-> ?a <= ?b -k-> B
rule C : C -l-> ?a <= ?b -m-> C
"""


def test_rule_families_expand_without_self_transfers():
    sc = parse_scenario(EX9)
    assert sc.environment.agents == ("A", "B", "C")
    for a in "ABC":
        rules = sc.policies[frozenset({a})].rules
        assert len(rules) == 4
        for r in rules:
            assert all(t.giver != t.receiver for t in r.give + r.want)


def test_empty_file_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_scenario("")
    with pytest.raises(ParseError):
        parse_scenario("# only a comment\n")


def test_syntax_errors_carry_positions():
    with pytest.raises(ParseError) as e:
        parse_scenario("resource k 1\nagent A\nfrobnicate\n")
    assert e.value.line == 3
    with pytest.raises(ParseError) as e:
        parse_scenario("resource k 1\nagent A B\nrule A : A -k B <= _\n")
    assert e.value.line == 3


def test_semantic_errors():
    base = "resource k 1\nagent A\nagent B\nalloc A : k\n"
    with pytest.raises(ScenarioError, match="coalition constraint"):
        parse_scenario(base + "rule A : B -k-> A <= A -k-> B\n")
    with pytest.raises(ScenarioError, match="unknown"):
        parse_scenario(base + "rule A : A -z-> B <= _\n")
    with pytest.raises(ScenarioError, match="unknown"):
        parse_scenario(base + "rule Q : A -k-> B <= _\n")
    with pytest.raises(ScenarioError, match="allocation"):
        parse_scenario("resource k 1\nagent A\n")


def test_allocation_and_exchange_text():
    assert parse_allocation("A{l} B{k,k} C{}") == Allocation({"A": ["l"], "B": ["k", "k"]})
    assert parse_exchange("A -k-> B, B -l-> A").count(Transfer("A", "k", "B")) == 1
    assert not parse_exchange("_")
    with pytest.raises(ParseError):
        parse_exchange("?x -k-> B")


@pytest.mark.parametrize("name", ["direct.cex", "ex9.cex", "coalition.cex", "ex7.cex", "debt.cex"])
def test_bundled_scenarios_round_trip(name):
    sc = load(name)
    assert parse_scenario(print_scenario(sc)) == sc


def test_random_scenarios_round_trip():
    rng = random.Random(0)
    for _ in range(100):
        env = random_environment(rng)
        vals = random_valuations(rng, env, isolated=False)
        pols = random_policies(rng, env)
        if rng.random() < 0.3:
            pols = PolicySet([*pols.values(), synthesize_rational_policy(env, vals, {env.agents[0]}, 1)])
        sc = Scenario(env, random_allocation(rng, env), pols, vals)
        assert parse_scenario(print_scenario(sc)) == sc
