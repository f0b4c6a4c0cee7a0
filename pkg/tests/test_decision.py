import random

from conftest import load

from celx.decision import (
    contract_closure,
    decide,
    decide_horn,
    delta_interprovable,
    hilbert_basis,
    lr_maps,
    sequential_firing,
    vectorize_delta,
)
from celx.encoder import encode_exchange, encode_policies, encode_scenario, encode_state
from celx.model import Allocation, exchange
from celx.multiset import Multiset
from celx.proof import Rule, check_proof, normal_form
from celx.syntax import I, Bang, Contract, Sequent, atom, imp, tensor
from support import oracle_decide, random_initial_sequent

CIRC = exchange(("A", "k", "B"), ("B", "m", "C"), ("C", "l", "A"))
EX9_THETAS = [
    Contract(imp("l@C", "l@A"), imp("k@A", "k@B")),
    Contract(imp("k@A", "k@B"), imp("m@B", "m@C")),
    Contract(imp("m@B", "m@C"), imp("l@C", "l@A")),
]


def test_delta_vectors():
    assert vectorize_delta(I) == Multiset()
    e = imp("k@A", "k@B")
    assert vectorize_delta(tensor(e, e)) == Multiset({e: 2})
    assert vectorize_delta(encode_exchange(CIRC)) == Multiset([imp("k@A", "k@B"), imp("m@B", "m@C"), imp("l@C", "l@A")])
    d1, d2 = imp("k@A", "k@B"), imp("l@A", "l@B")
    assert delta_interprovable(tensor(d1, d2), tensor(d2, d1))
    assert not delta_interprovable(d1, tensor(d1, d1))


def test_lr_maps_force_equal_multiplicities():
    maps = lr_maps(EX9_THETAS)
    assert len(maps.implications) == 3
    m = [[lv - rv for lv, rv in zip(lr, rr)] for lr, rr in zip(maps.L, maps.R)]
    assert hilbert_basis(m) == [(1, 1, 1)]
    assert lr_maps([Contract(I, I)]).L == ()


def test_hilbert_examples():
    assert hilbert_basis([[1, -1]]) == [(1, 1)]
    assert hilbert_basis([[1, 1]]) == []


def test_closure_of_example_policies():
    assert contract_closure([], [Bang(imp("k@A", "k@B"))]).xi_prime() == Multiset([Bang(imp("k@A", "k@B"))])
    cl = contract_closure([Bang(t) for t in EX9_THETAS], [])
    (g,) = cl.generators
    assert g.vector == vectorize_delta(encode_exchange(CIRC))
    assert g.thetas == (1, 1, 1)
    lonely = contract_closure([Bang(Contract(imp("k@A", "k@B"), imp("l@A", "l@B")))], [])
    assert lonely.generators == ()


def test_horn_layer_examples():
    sigma = Multiset([atom("k@A"), atom("m@B"), atom("l@C")])
    goal = tensor(atom("k@B"), atom("m@C"), atom("l@A"))
    assert decide_horn([encode_exchange(CIRC)], sigma, goal) is not None
    assert decide_horn([], sigma, tensor(*sigma)) is not None
    assert decide_horn([], sigma, goal) is None


def test_debt_horn_layer_needs_cut():
    debt = exchange(("C", "l", "A"), ("A", "l", "B"), ("B", "m", "A"), ("B", "m", "A"), ("A", "m", "C"))
    sigma = Multiset([atom("m@B"), atom("m@B"), atom("l@C")])
    goal = tensor(atom("m@A"), atom("l@B"), atom("m@C"))
    gens = [encode_exchange(debt)]
    assert decide_horn(gens, sigma, goal, cut_allowed=False) is None
    w = decide_horn(gens, sigma, goal, cut_allowed=True)
    assert w is not None and w.cut_needed


def test_sequential_firing_orders_tokens():
    e1, e2 = imp("k@A", "k@B"), imp("k@B", "k@C")
    assert sequential_firing(Multiset([atom("k@A")]), Multiset([e2, e1])) == (e1, e2)
    assert sequential_firing(Multiset([atom("l@A")]), Multiset([e1])) is None


def test_circular_exchange_sequent():
    sc = load("ex9.cex")
    s = encode_scenario(sc.policies, sc.allocation, Allocation({"A": ["l"], "B": ["k"], "C": ["m"]})).sequent()
    d = decide(s)
    assert d.valid and check_proof(d.proof) is None
    assert normal_form(d.proof) == 2
    assert vectorize_delta(d.contract_delta) == vectorize_delta(encode_exchange(CIRC))


def test_unit_goal():
    d = decide(Sequent([], I))
    assert d.valid and d.proof.rule is Rule.UNIT_RIGHT


def test_agrees_with_bounded_enumeration_oracle():
    rng = random.Random(0)
    for _ in range(300):
        s = random_initial_sequent(rng)
        for cut in (False, True):
            d = decide(s, cut)
            assert d.valid == oracle_decide(s, cut), (cut, s)
            if d.valid:
                assert check_proof(d.proof, cut_allowed=cut) is None
                assert d.proof.conclusion == s


def test_cut_only_widens():
    rng = random.Random(1)
    for _ in range(300):
        s = random_initial_sequent(rng)
        if decide(s, False, with_proof=False).valid:
            assert decide(s, True, with_proof=False).valid


def test_encoded_policies_only_stay_in_omega():
    sc = load("coalition.cex")
    omega = encode_policies(sc.policies)
    s = Sequent([*omega, encode_state(sc.allocation)], encode_state(sc.allocation))
    assert s.is_initial() and len(s.omega) == len(omega)
