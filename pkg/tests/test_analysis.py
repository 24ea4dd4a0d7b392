from itertools import product

import pytest

from mtt_workbench.analysis import (
    check_fv, find_rho, important_nodes, is_consistent, is_important, is_permanent, occurrence_profiles, top,
)
from mtt_workbench.errors import InvalidPathError, PreconditionError
from mtt_workbench.mtt import MttEvaluator
from mtt_workbench.trees import AttrRef, Symbol, Tree, enumerate_trees, leaf, node, replace_subtree, subtree

MARK = Symbol("@mark", 1)


def survives(m, q, sigma, v, bound=4):
    """Brute force: wrap node v in a marker and look for it in some output."""
    zeta = m.rhs(q, sigma)
    marked = m.with_rules({**m.rules, (q, sigma): replace_subtree(zeta, v, Tree(MARK, (subtree(zeta, v),)))})
    sym = m.input_alphabet.get(sigma)
    pool = list(enumerate_trees(m.input_alphabet, bound))
    for children in product(pool, repeat=sym.rank):
        out = MttEvaluator(marked).state(q, Tree(sym, children))
        if MARK in out.labels():
            return True
    return False


@pytest.mark.parametrize("fixture", ["abcd", "loopy", "abcd_padded", "twins"])
def test_importance_matches_brute_force(request, fixture):
    m = request.getfixturevalue(fixture)
    table = occurrence_profiles(m)
    for q in m.state_names:
        for sym in m.input_alphabet:
            expected = {v for v, _ in m.rhs(q, sym.name).iter_nodes() if survives(m, q, sym.name, v)}
            assert important_nodes(m, q, sym.name, table) == expected, (q, sym.name)


def test_profiles_of_loopy(loopy):
    table = occurrence_profiles(loopy)
    assert len(table.profiles) == 3
    p1, p2, p3 = table.profiles
    assert (p1.get("q"), p1.get("q1"), p1.get("q2")) == ({1}, set(), {1})
    assert (p2.get("q"), p2.get("q1"), p2.get("q2")) == (set(), {1}, {1})
    assert all(not p3.get(q) for q in ("q", "q1", "q2"))
    assert table.transitions[("e", ())] == 0
    assert table.transitions[("e'", ())] == 1
    assert table.transitions[("sigma", (0, 1))] == 2
    assert table.profile_name(2) == "p3"


def test_hidden_argument_of_loopy_is_not_important(loopy):
    assert is_important(loopy, "q0", "sigma", (1,))
    assert is_important(loopy, "q0", "sigma", (1, 1))
    assert not is_important(loopy, "q0", "sigma", (1, 1, 1))
    with pytest.raises(InvalidPathError):
        is_important(loopy, "q0", "sigma", (2,))


def test_top(abcd):
    assert top(abcd.rhs("q0", "#")) == Tree(AttrRef("q1", 1))
    assert top(abcd.rhs("q1", "a")) == node("a", Tree(AttrRef("q1", 1)))
    assert top(abcd.rhs("q1", "e")) == Tree(AttrRef("y1", 0))
    assert top(abcd.rhs("q1", "e"), lambda j: f"<q1,{j}>") == Tree(AttrRef("<q1,1>", 0))


def test_consistency(abcd, abcd_padded, loopy):
    result = is_consistent(abcd)
    assert not result.consistent
    assert result.violation.symbol == "#"
    assert result.violation.top1 == Tree(AttrRef("q2", 1))
    assert result.violation.top2 == leaf("e")
    assert is_consistent(abcd_padded).consistent
    assert is_consistent(loopy).consistent


def test_fv_with_golden_renaming(abcd):
    assert check_fv(abcd, {("q1", 1): 1, ("q2", 1): 2}).ok
    clash = check_fv(abcd, {("q1", 1): 1, ("q2", 1): 1})
    assert not clash.ok
    assert clash.violation.symbol == "#"


def test_find_rho(abcd, twins):
    assert find_rho(abcd) == {("q1", 1): 1, ("q2", 1): 2}
    assert find_rho(twins) is None


def test_find_rho_requires_nondeleting(loopy, abcd_padded):
    with pytest.raises(PreconditionError):
        find_rho(loopy)
    with pytest.raises(PreconditionError):
        find_rho(abcd_padded)


def test_renaming_must_be_total(abcd):
    with pytest.raises(PreconditionError):
        check_fv(abcd, {("q1", 1): 1})


def test_permanence(abcd, loopy):
    assert is_permanent(abcd, "q1", 1)
    assert is_permanent(abcd, "q2", 1)
    assert not is_permanent(loopy, "q1", 1)
    with pytest.raises(PreconditionError):
        is_permanent(abcd, "q1", 2)
