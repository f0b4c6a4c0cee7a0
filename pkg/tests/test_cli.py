import io
import json

import pytest
from conftest import SCENARIOS

from celx import certificate
from celx.cli import NO, USAGE, YES, main


def run(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    return main([str(a) for a in argv], out), out.getvalue()


def sc(name: str) -> str:
    return str(SCENARIOS / name)


def test_direct_swap():
    code, text = run("check-transition", sc("direct.cex"), "--to", "A{k} B{l}")
    assert code == YES and "A -l-> B" in text


def test_circular_swap():
    code, text = run("check-transition", sc("ex9.cex"), "--to", "A{l} B{k} C{m}")
    assert code == YES and "result: A{l} B{k} C{m}" in text


def test_debt_needs_the_flag():
    to = "A{m} B{l} C{m}"
    assert run("check-transition", sc("debt.cex"), "--to", to)[0] == NO
    assert run("check-transition", sc("debt.cex"), "--to", to, "--debts")[0] == YES


def test_emitted_proof_round_trip(tmp_path):
    cert = tmp_path / "p.json"
    code, _ = run("check-transition", sc("ex9.cex"), "--to", "A{l} B{k} C{m}", "--emit-proof", cert)
    assert code == YES
    assert run("verify-proof", cert)[0] == YES
    doc = json.loads(cert.read_text())
    doc["proof"]["premises"][0]["rule"] = "Weak"
    cert.write_text(json.dumps(doc))
    code, text = run("verify-proof", cert)
    assert code == NO and text.startswith("invalid: root.0")


def test_debt_certificate_allows_cut(tmp_path):
    cert = tmp_path / "d.json"
    run("check-transition", sc("debt.cex"), "--to", "A{m} B{l} C{m}", "--debts", "--emit-proof", cert)
    pf, cut = certificate.loads(cert.read_text())
    assert cut and certificate.verify(cert.read_text()) is None


def test_witness_is_an_agreement(tmp_path):
    w = tmp_path / "w.json"
    run("check-transition", sc("coalition.cex"), "--to", "A{k,m} B{l} C{}", "--witness", w)
    doc = json.loads(w.read_text())
    assert len(doc["combinations"]) == 2
    code, _ = run("agreement", sc("coalition.cex"), "--exchange", ", ".join(doc["exchange"]))
    assert code == YES


def test_prove_sequent_file(tmp_path):
    cert = tmp_path / "p.json"
    code, text = run("prove", sc("ex9.cel"), "--emit-proof", cert)
    assert code == YES and "releases" in text
    assert run("verify-proof", cert)[0] == YES


def test_unprovable_sequent(tmp_path):
    f = tmp_path / "s.cel"
    f.write_text("k@A |- k@B\n")
    assert run("prove", f)[0] == NO


def test_valuation_commands():
    assert run("deal", sc("valued.cex"), "--coalition", "A", "--exchange", "A -l-> B, B -k-> A")[0] == YES
    assert run("deal", sc("valued.cex"), "--coalition", "B", "--exchange", "B -k-> A")[0] == NO
    code, text = run("sound", sc("valued.cex"))
    assert code == NO and "{B}: unsound" in text
    assert run("sound", sc("valued.cex"), "--coalition", "A")[0] == YES


def test_synth_output_parses():
    from celx.dsl import parse_scenario
    from celx.valuation import is_sound_policy

    code, text = run("synth", sc("valued.cex"), "--coalition", "A")
    assert code == YES
    parsed = parse_scenario(text)
    a = frozenset({"A"})
    assert is_sound_policy(parsed.environment, parsed.valuations, parsed.policies[a])


def test_reach():
    code, text = run("reach", sc("ex9.cex"))
    assert code == YES and "A{l} B{k} C{m}" in text


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["check-transition", "missing.cex", "--to", "A{}"],
        ["deal", sc("direct.cex"), "--coalition", "A", "--exchange", "A -k-> B"],
        ["check-transition", sc("direct.cex"), "--to", "Z{k}"],
        [],
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == USAGE
