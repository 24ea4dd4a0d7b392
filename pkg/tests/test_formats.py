import pytest

from mtt_workbench.errors import ArityError, TransducerError, TreeSyntaxError, UnknownSymbolError
from mtt_workbench.formats import (
    format_rho, format_transducer, parse_brel, parse_mtt, parse_rho, parse_transducer, parse_trel, parse_tree,
)
from mtt_workbench.mtt import call
from mtt_workbench.relabel import brel_apply
from mtt_workbench.trees import RankedAlphabet, format_tree, leaf, node, param

def test_parse_tree():
    assert parse_tree(" #( a(e) ) ") == node("#", node("a", leaf("e")))


def test_parse_tree_with_comment_and_quotes():
    t = parse_tree('// input\n"q.{1}"(e)')
    assert t.label.name == "q.{1}"
    assert t.children == (leaf("e"),)


def test_syntax_error_reports_position():
    with pytest.raises(TreeSyntaxError) as info:
        parse_tree("f(a,")
    assert info.value.line == 1
    assert "line 1" in str(info.value)


def test_parse_tree_against_alphabet():
    alphabet = RankedAlphabet.of(("a", 1), ("e", 0))
    assert parse_tree("a(e)", alphabet) == node("a", leaf("e"))
    with pytest.raises(UnknownSymbolError):
        parse_tree("b(e)", alphabet)
    with pytest.raises(ArityError):
        parse_tree("a(e,e)", alphabet)


def test_parse_golden_mtt(abcd):
    assert abcd.name == "abcd"
    assert abcd.states == (("q0", 0), ("q1", 1), ("q2", 1))
    assert abcd.initial == "q0"
    assert abcd.rhs("q1", "a") == node("a", call("q1", 1, node("b", param(1))))
    assert abcd.rhs("q0", "#") == call("q1", 1, call("q2", 1, leaf("e")))


def test_parse_golden_att(mirror):
    assert mirror.syn == ("s",)
    assert mirror.inh == ("i",)
    assert mirror.output_attr == "s"
    assert str(mirror.rules["a"][("i", 1)]) == "a(i(pi))"


def test_parse_brel_and_run(parity):
    b = parity
    out, state = brel_apply(b, parse_tree("a(a(e))"))
    assert str(out) == "a1(a0(e))"
    assert state == "even"


def test_duplicate_rule_is_rejected():
    text = """
    mtt dup {
      input { e/0 } output { e/0 } states { q0/0 } initial q0
      rule q0 e -> e
      rule q0 e -> e
    }
    """
    with pytest.raises(TransducerError):
        parse_mtt(text)


def test_parameter_list_must_match_rank():
    text = """
    mtt bad {
      input { e/0 } output { e/0 } states { q0/0 q/2 } initial q0
      rule q0 e -> e
      rule q e(y1) -> y1
    }
    """
    with pytest.raises(TransducerError):
        parse_mtt(text)


def test_transducer_dispatch_skips_leading_comments(parity):
    item = parse_transducer(format_transducer(parity, ["comment"]))
    assert item.kind == "brel"
    with pytest.raises(TreeSyntaxError):
        parse_transducer("// nothing here\n")


@pytest.mark.parametrize("name", [
    "abcd.mtt", "abcd_padded.mtt", "loopy.mtt", "twins.mtt", "twins_nonerasing.mtt", "diverging.mtt",
    "crafted_circular.att", "mirror.att",
])
def test_writer_output_reparses(golden_dir, name):
    original = parse_transducer((golden_dir / name).read_text(encoding="utf-8"))
    text = format_transducer(original, ["regenerated"])
    assert text.startswith("// regenerated\n")
    again = parse_transducer(text)
    assert again.kind == original.kind
    assert again.name == original.name
    assert again.input_alphabet == original.input_alphabet
    assert again.output_alphabet == original.output_alphabet
    assert dict(again.rules) == dict(original.rules)


def test_writer_quotes_mangled_names(loopy):
    from mtt_workbench.constructions import nondeleting_nf

    result = nondeleting_nf(loopy)
    for stage in (result.lookahead, result.core):
        again = parse_transducer(format_transducer(stage))
        assert dict(again.rules) == dict(stage.rules)
        assert again.output_alphabet == stage.output_alphabet


def test_rho_files(golden_dir):
    rho = parse_rho((golden_dir / "abcd.rho").read_text(encoding="utf-8"))
    assert rho == {("q1", 1): 1, ("q2", 1): 2}
    assert format_rho(rho, ["q0", "q1", "q2"]) == "q1 1 -> 1\nq2 1 -> 2\n"
    assert parse_rho(format_rho({("q.{1}", 1): 1})) == {("q.{1}", 1): 1}


# ===== Nullary rules =====

NULLARY_MTT = """
mtt nullary {
  input { a/1 e/0 } output { a/1 e/0 } states { q0/0 q/1 } initial q0
  rule q0 a(x1) -> q[x1](e)
  RULES
}
"""


@pytest.mark.parametrize("rules", [
    "rule q0 e -> e\n rule q e(y1) -> y1\n rule q a(x1)(y1) -> a(y1)",
    "rule q0 e->e\n rule q e(y1)->y1\n rule q a(x1)(y1)->a(y1)",
    "rule q0 e() -> e\n rule q e()(y1) -> y1\n rule q a(x1)(y1) -> a(y1)",
])
def test_nullary_symbol_rules_parse(rules):
    m = parse_mtt(NULLARY_MTT.replace("RULES", rules))
    assert m.rhs("q0", "e") == leaf("e")
    assert m.rhs("q", "e") == param(1)
    assert m.apply(parse_tree("a(e)")) == leaf("e")


def test_nullary_rules_in_relabelings():
    b = parse_brel("brel p { input { e/0 } output { e/0 } states { s } rule e->s : e }")
    assert b.rules[("e", ())] == ("s", "e")
    t = parse_trel("trel k { input { e/0 } output { e/0 } states { k } initial k rule k e->e }")
    assert t.rules[("k", "e")] == ("e", ())


def test_nullary_rule_survives_writer():
    m = parse_mtt(NULLARY_MTT.replace("RULES", "rule q0 e -> e rule q e(y1) -> y1 rule q a(x1)(y1) -> y1"))
    again = parse_mtt(format_transducer(m))
    assert dict(again.rules) == dict(m.rules)


def test_names_with_hyphens_and_arrows():
    assert parse_tree("a-b(c-)") == node("a-b", leaf("c-"))
    assert parse_rho("q- 1 -> 1\n") == {("q-", 1): 1}
    assert parse_tree(format_tree(leaf("a->b"))) == leaf("a->b")
