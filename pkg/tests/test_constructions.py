import pytest

from mtt_workbench.analysis import find_rho, is_consistent
from mtt_workbench.att import att_evaluate, att_is_circular, att_is_circular_on, validate_att
from mtt_workbench.constructions import (
    COMB_SYMBOL, ERASE_SYMBOL, att_to_consistent_mtt, bottom_symbol, expand_to_consistent, fv_to_att,
    nondeleting_nf, nonerasing_nf, omega, omega_direct, trel_mtt_product,
)
from mtt_workbench.difftest import equivalent_up_to
from mtt_workbench.dynfv import check_dynamic_fv, dynfv_pipeline
from mtt_workbench.errors import AlphabetMismatchError, ConstructionError, PreconditionError
from mtt_workbench.formats import parse_tree
from mtt_workbench.mtt import is_nondeleting, is_nonerasing, mtt_translate, validate_mtt
from mtt_workbench.pipeline import Pipeline
from mtt_workbench.relabel import identity_trel, validate_brel
from mtt_workbench.trees import AttrRef, RankedAlphabet, Tree, enumerate_trees

ABCD_RHO = {("q1", 1): 1, ("q2", 1): 2}


def assert_equivalent(p1, p2, bound=6):
    report = equivalent_up_to(p1, p2, bound)
    assert report.equal, str(report)


def test_bottom_symbol():
    alphabet = RankedAlphabet.of(("a", 1), ("e", 0))
    assert bottom_symbol(alphabet)[1].name == "e"
    extended, bot = bottom_symbol(alphabet, "@bot")
    assert bot.name == "@bot" and "@bot" in extended
    with pytest.raises(ConstructionError):
        bottom_symbol(alphabet, "a")
    with pytest.raises(ConstructionError):
        bottom_symbol(RankedAlphabet.of(("a", 1)))


def test_expansion_reproduces_padded_abcd(abcd, abcd_padded):
    expanded = expand_to_consistent(abcd, ABCD_RHO)
    assert expanded.name == "E(abcd)"
    assert expanded.states == abcd_padded.states
    assert dict(expanded.rules) == dict(abcd_padded.rules)
    assert is_consistent(expanded).consistent
    assert_equivalent(abcd, expanded, 7)


def test_expansion_requires_fv(abcd):
    with pytest.raises(PreconditionError):
        expand_to_consistent(abcd, {("q1", 1): 1, ("q2", 1): 1})


def test_fv_to_att(abcd):
    att = fv_to_att(abcd)
    assert att.name == "Omega(E(abcd))"
    assert att.inh == ("y1", "y2")
    assert validate_att(att).ok
    assert not att_is_circular(att).circular
    assert_equivalent(abcd, att, 7)


def test_direct_att(abcd):
    att = omega_direct(abcd, ABCD_RHO)
    assert att.inh == ("y1", "y2")
    assert att.rules["#"][("y1", 1)] == Tree(AttrRef("q2", 1))
    assert_equivalent(abcd, att, 7)


def test_omega_needs_uniform_ranks(abcd):
    with pytest.raises(PreconditionError):
        omega(abcd.with_rules(abcd.rules, states=(("q0", 0), ("q1", 1), ("q2", 2))))


def test_naive_att_of_loopy_is_circular(loopy):
    att = omega(loopy)
    assert att_is_circular(att).circular
    assert att_is_circular_on(att, parse_tree("sigma(e',e)")).circular


def test_nondeleting_normal_form_of_loopy(loopy):
    result = nondeleting_nf(loopy)
    lookahead, core = result.lookahead, result.core
    assert lookahead.states == ("p1", "p2", "p3")
    assert lookahead.rules[("e", ())] == ("p1", "e")
    assert lookahead.rules[("e'", ())] == ("p2", "e'")
    assert lookahead.rules[("sigma", ("p1", "p2"))] == ("p3", "[sigma,p1,p2]")
    assert core.state_names == ["q0.{}", "q.{}", "q.{1}", "q1.{}", "q2.{}", "q2.{1}"]
    assert core.initial == "q0.{}"
    assert result.renaming == {("q.{1}", 1): 1, ("q2.{1}", 1): 1}
    assert is_nondeleting(core)
    assert validate_brel(lookahead).ok
    assert validate_mtt(core).ok
    assert_equivalent(loopy, result.pipeline, 7)


def test_loopy_becomes_a_noncircular_att(loopy):
    result = nondeleting_nf(loopy)
    att = fv_to_att(result.core)
    block = att.rules["[sigma,p1,p1]"]
    assert block[("q0.{}", 0)] == Tree(AttrRef("q.{1}", 1))
    assert block[("y1", 1)] == Tree(AttrRef("q2.{1}", 2))
    assert block[("y1", 2)] == Tree(AttrRef("q1.{}", 1))
    assert_equivalent(loopy, Pipeline.of(result.lookahead, att), 7)


def test_comb_fills_wide_dummies():
    from mtt_workbench.formats import parse_mtt

    m = parse_mtt("""
    mtt wide {
      input { a/1 e/0 }
      output { g/2 e/0 }
      states { q0/0 q/2 }
      initial q0
      rule q0 a(x1) -> q[x1](e,e)
      rule q0 e -> e
      rule q a(x1)(y1,y2) -> e
      rule q e(y1,y2) -> g(y1,y2)
    }
    """)
    result = nondeleting_nf(m)
    assert COMB_SYMBOL in result.core.output_alphabet
    assert is_nondeleting(result.core)
    assert_equivalent(m, result.pipeline, 6)


def test_nonerasing_normal_form(twins):
    result = nonerasing_nf(twins)
    assert result.lookahead.name == "BE(twins)"
    assert is_nonerasing(result.core)
    assert_equivalent(twins, result.pipeline, 7)
    for s in enumerate_trees(twins.input_alphabet, 7):
        assert ERASE_SYMBOL not in {lab.name for lab in result.pipeline.apply(s).labels()}


def test_nonerasing_requires_nondeleting(loopy):
    with pytest.raises(PreconditionError):
        nonerasing_nf(loopy)


def test_att_to_mtt_on_mirror(mirror):
    m = att_to_consistent_mtt(mirror)
    assert m.states == (("s.root", 0), ("s", 1))
    assert m.initial == "s.root"
    assert validate_mtt(m).ok
    for s in enumerate_trees(mirror.input_alphabet, 7):
        if s.label.name == "#":
            assert mtt_translate(m, s) == att_evaluate(mirror, s)


def test_round_trip_through_att(abcd):
    back = att_to_consistent_mtt(fv_to_att(abcd))
    assert back.initial == "q0.root"
    assert back.states[0] == ("q0.root", 0)
    assert is_consistent(back).consistent
    assert_equivalent(abcd, back, 7)


def test_att_to_mtt_rejects_circular(crafted):
    with pytest.raises(PreconditionError):
        att_to_consistent_mtt(crafted)


def test_product_matches_pipeline(alternate, abcd):
    product = trel_mtt_product(alternate, abcd)
    assert product.initial == "k.q0"
    assert validate_mtt(product).ok
    assert_equivalent(Pipeline.of(alternate, abcd), product, 7)


def test_product_checks_alphabets(alternate, twins):
    with pytest.raises(AlphabetMismatchError):
        trel_mtt_product(alternate, twins)


def test_direct_att_of_loopy_core_on_sigma_rooted_inputs(loopy):
    result = nondeleting_nf(loopy)
    rho = {(q, 1): 1 for q, rank in result.core.states if rank == 1}
    att = omega_direct(result.core, rho)
    inputs = [s for s in enumerate_trees(loopy.input_alphabet, 7) if s.label.name == "sigma"]
    assert len(inputs) > 20
    for s in inputs:
        relabeled = result.lookahead.apply(s)
        assert att_evaluate(att, relabeled) == result.core.apply(relabeled), str(s)


# ===== Every construction on every golden MTT =====

GOLDEN_MTTS = ["abcd", "abcd_padded", "loopy", "twins", "twins_nonerasing", "diverging", "const_e", "const_delta"]


def _rho(m):
    rho = find_rho(m)
    if rho is None:
        raise PreconditionError(f"{m.name} has no parameter renaming with the FV property")
    return rho


def _nondeleting_fv(m):
    if not is_nondeleting(m):
        raise PreconditionError(f"{m.name} deletes parameters")
    return _rho(m)


def _omega(m):
    _rho(m)
    if not is_consistent(m).consistent:
        raise PreconditionError(f"{m.name} is not consistent")
    att = omega(m)
    if att_is_circular(att).circular:
        raise PreconditionError(f"{att.name} is circular")
    return att


def _dynfv(m):
    if not check_dynamic_fv(m, size_bound=6).ok:
        raise PreconditionError(f"{m.name} lacks the dynamic FV property")
    return dynfv_pipeline(m)


def _product(m, alternate):
    trel = alternate if alternate.output_alphabet.same_symbols(m.input_alphabet) else identity_trel(m.input_alphabet)
    return Pipeline.of(trel, m), trel_mtt_product(trel, m)


CONSTRUCTIONS = {
    "consistent": lambda m: expand_to_consistent(m, _rho(m)),
    "att": lambda m: fv_to_att(m, _nondeleting_fv(m)),
    "att-direct": lambda m: omega_direct(m, _nondeleting_fv(m)),
    "from-att": lambda m: att_to_consistent_mtt(fv_to_att(m, _nondeleting_fv(m))),
    "omega": _omega,
    "nondeleting": lambda m: nondeleting_nf(m).pipeline,
    "nondeleting-att": lambda m: Pipeline.of(nondeleting_nf(m).lookahead, fv_to_att(nondeleting_nf(m).core)),
    "nonerasing": lambda m: nonerasing_nf(m).pipeline,
    "dynfv": _dynfv,
}


@pytest.mark.parametrize("construction", sorted(CONSTRUCTIONS))
@pytest.mark.parametrize("name", GOLDEN_MTTS)
def test_construction_preserves_translation(request, name, construction):
    m = request.getfixturevalue(name)
    try:
        built = CONSTRUCTIONS[construction](m)
    except PreconditionError as exc:
        pytest.skip(str(exc))
    assert_equivalent(m, built, 6)


@pytest.mark.parametrize("name", GOLDEN_MTTS)
def test_product_on_golden(request, alternate, name):
    source, product = _product(request.getfixturevalue(name), alternate)
    assert validate_mtt(product).ok
    assert_equivalent(source, product, 6)
