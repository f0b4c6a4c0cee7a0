import random

import pytest

from celx.decision import decide, reconstruct
from celx.errors import NotInitial
from celx.normalize import normalize_proof
from celx.proof import Proof, Rule, check_proof, node, normal_form
from celx.syntax import Bang, Contract, Sequent, atom, imp, parse_sequent, tensor
from support import random_initial_sequent, scramble

DOUBLE_CIRCLE = parse_sequent(
    "(! (>> (-o l@C l@A) (-o k@A k@B))), (! (>> (-o k@A k@B) (-o m@B m@C))), (! (>> (-o m@B m@C) (-o l@C l@A))),"
    " (* k@A k@A l@C l@C m@B m@B) |- (* k@B k@B l@A l@A m@C m@C)"
)


def test_normal_proof_is_returned_unchanged():
    d = decide(DOUBLE_CIRCLE)
    assert normal_form(d.proof) == 2
    assert normalize_proof(d.proof) is d.proof


def test_stacked_eliminations_are_merged():
    d = decide(DOUBLE_CIRCLE)
    assert d.witness.counts == (2,)
    pf, _ = reconstruct(DOUBLE_CIRCLE, d.closure, d.witness, grouped=True)
    assert check_proof(pf) is None
    assert pf.rule_counts()[Rule.CONTRACT_LEFT] == 2 and normal_form(pf) is None
    out = normalize_proof(pf)
    assert out.conclusion == DOUBLE_CIRCLE
    assert normal_form(out) == 2 and out.rule_counts()[Rule.CONTRACT_LEFT] == 1
    assert not out.uses(Rule.CUT)


def test_weakening_moves_below_a_tensor():
    ka, kb = atom("k@A"), atom("k@B")
    unused = Bang(imp("l@A", "l@B"))
    s = Sequent([unused, tensor(ka, kb)], tensor(ka, kb))
    pair = node(Rule.TENSOR_RIGHT, [ka, kb], tensor(ka, kb), node(Rule.AX, [ka], ka), node(Rule.AX, [kb], kb))
    weak_high = node(Rule.TENSOR_RIGHT, [unused, ka, kb], tensor(ka, kb),
                     node(Rule.WEAK, [unused, ka], ka, node(Rule.AX, [ka], ka)), node(Rule.AX, [kb], kb))
    pf = node(Rule.TENSOR_LEFT, s.left, s.right, weak_high)
    assert check_proof(pf) is None and normal_form(pf) is None
    out = normalize_proof(pf)
    assert normal_form(out) == 1 and out.rule is Rule.WEAK
    assert out.premises[0].premises[0] == pair


def test_only_initial_sequents():
    e = Contract(imp("k@A", "k@B"), imp("k@B", "k@A"))
    pf = Proof(Rule.AX, Sequent([e], e))
    with pytest.raises(NotInitial):
        normalize_proof(pf)


@pytest.mark.parametrize("seed", range(3))
def test_scrambled_proofs_come_back_normal(seed):
    rng = random.Random(seed)
    done = 0
    while done < 15:
        s = random_initial_sequent(rng)
        d = decide(s, cut_allowed=rng.random() < 0.3)
        if not d.valid:
            continue
        cut = d.proof.uses(Rule.CUT)
        pf, _ = reconstruct(s, d.closure, d.witness, grouped=rng.random() < 0.5)
        pf = scramble(pf, rng)
        out = normalize_proof(pf)
        assert out.conclusion == s and normal_form(out) is not None
        assert check_proof(out, cut_allowed=cut) is None
        assert out.uses(Rule.CUT) == pf.uses(Rule.CUT)
        done += 1
