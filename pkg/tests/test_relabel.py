import pytest

from mtt_workbench.errors import AlphabetMismatchError, StageError
from mtt_workbench.formats import parse_tree
from mtt_workbench.pipeline import Pipeline, convolution_relabeling, trrel
from mtt_workbench.relabel import (
    duplicating_brel, identity_brel, identity_trel, lift_stage, pairs_alphabet, trel_apply, validate_brel,
    validate_trel,
)
from mtt_workbench.trees import RankedAlphabet, leaf, node

ALPHABET = RankedAlphabet.of(("a", 1), ("e", 0))


def test_trel_relabels_top_down(alternate):
    assert str(trel_apply(alternate, parse_tree("#(a(a(a(e))))"))) == "#(a(#(a(e))))"
    assert validate_trel(alternate).ok


def test_identities(abcd):
    s = parse_tree("#(a(e))")
    assert identity_brel(abcd.input_alphabet).apply(s) == s
    assert identity_trel(abcd.input_alphabet).apply(s) == s


def test_brel_validation_finds_gap(parity):
    b = parity
    assert validate_brel(b).ok
    rules = dict(b.rules)
    del rules[("a", ("odd",))]
    from dataclasses import replace

    report = validate_brel(replace(b, rules=rules))
    assert report.violations == ["missing rule a(odd)"]


def test_duplicating_brel():
    dup = duplicating_brel(ALPHABET)
    assert dup.apply(parse_tree("a(e)")) == node("(a,a)", leaf("(e,e)"))
    assert "(a,e)" not in dup.output_alphabet


def test_pairs_alphabet_keeps_equal_ranks():
    pairs = pairs_alphabet(ALPHABET, RankedAlphabet.of(("b", 1), ("c", 0)))
    assert pairs.names() == ["(a,b)", "(e,c)"]


def test_convolution_lifts_left_stages(parity):
    conv = convolution_relabeling([parity], [], ALPHABET)
    assert conv.apply(parse_tree("a(e)")) == node("(a0,a)", leaf("(e,e)"))


def test_convolution_lifts_right_stages(parity):
    conv = convolution_relabeling([], [parity], ALPHABET)
    assert conv.apply(parse_tree("a(a(e))")) == node("(a,a1)", node("(a,a0)", leaf("(e,e)")))


def test_lift_trel(alternate):
    lifted = lift_stage(alternate, RankedAlphabet.of(("b", 1), ("c", 0)), 0)
    assert str(lifted.apply(parse_tree('"(a,b)"("(a,b)"("(e,c)"))'))) == '"(a,b)"("(#,b)"("(e,c)"))'


def test_pipeline_checks_alphabets(abcd, twins):
    with pytest.raises(AlphabetMismatchError):
        Pipeline.of(abcd, twins)


def test_pipeline_wraps_stage_errors(alternate, mirror):
    p = Pipeline.of(alternate)
    with pytest.raises(StageError) as info:
        p.apply(parse_tree("b(e)"))
    assert info.value.stage_index == 0


def test_pipeline_runs_left_to_right(alternate, abcd):
    p = Pipeline.of(alternate, abcd)
    s = parse_tree("#(a(a(e)))")
    assert p.apply(s) == abcd.apply(alternate.apply(s))
    assert len(p) == 2
    assert p.relabelings == [alternate]


def test_trrel(parity):
    marks = RankedAlphabet.of(("a0", 1), ("a1", 1), ("e", 0))
    look = trrel(parity, identity_trel(marks))
    assert str(look.apply(parse_tree("a(a(e))"))) == "a1(a0(e))"
