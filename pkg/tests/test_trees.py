import pytest
from hypothesis import given, strategies as st

from mtt_workbench.errors import AlphabetMismatchError, ArityError, InvalidPathError, UnknownSymbolError
from mtt_workbench.trees import (
    HOLE, Param, RankedAlphabet, Symbol, Tree, check_tree, count_trees, enumerate_trees, format_path,
    format_tree, leaf, node, node_set, param, parse_path, quote_name, replace_subtree, subst_params,
    subst_second_order, subtree, trees_of_size,
)

MONADIC = RankedAlphabet.of(("#", 1), ("a", 1), ("e", 0))
BINARY = RankedAlphabet.of(("f", 2), ("e", 0))
MIXED = RankedAlphabet.of(("sigma", 2), ("a", 1), ("e", 0), ("e'", 0))


@pytest.fixture
def sample():
    return node("f", node("a", leaf("e")), leaf("e"))


def test_tree_rank_must_match_children():
    with pytest.raises(ArityError):
        Tree(Symbol("a", 1))


def test_size_and_format(sample):
    assert sample.size == 4
    assert format_tree(sample) == "f(a(e),e)"
    assert str(sample) == "f(a(e),e)"


def test_node_set_is_preorder(sample):
    assert node_set(sample) == [(), (1,), (1, 1), (2,)]


def test_subtree_and_replace(sample):
    assert subtree(sample, (1, 1)) == leaf("e")
    replaced = replace_subtree(sample, (1, 1), node("a", leaf("e")))
    assert format_tree(replaced) == "f(a(a(e)),e)"
    assert replace_subtree(sample, (), leaf("e")) == leaf("e")


def test_invalid_paths(sample):
    with pytest.raises(InvalidPathError):
        subtree(sample, (3,))
    with pytest.raises(InvalidPathError):
        replace_subtree(sample, (2, 1), leaf("e"))
    with pytest.raises(InvalidPathError):
        parse_path("1.0")
    with pytest.raises(InvalidPathError):
        parse_path("1.x")


def test_path_text():
    assert parse_path("eps") == ()
    assert parse_path("1.2") == (1, 2)
    assert format_path(()) == "eps"
    assert format_path((2, 1)) == "2.1"


def test_subst_params():
    t = node("f", param(2), param(1))
    assert format_tree(subst_params(t, (leaf("a0"), leaf("b0")))) == "f(b0,a0)"


def test_second_order_substitution(sample):
    sub = {Symbol("a", 1): node("g", param(1), param(1))}
    assert format_tree(subst_second_order(sample, sub)) == "f(g(e,e),e)"


def test_check_tree():
    check_tree(node("#", node("a", leaf("e"))), MONADIC)
    with pytest.raises(UnknownSymbolError):
        check_tree(node("b", leaf("e")), MONADIC)
    with pytest.raises(ArityError):
        check_tree(node("a", leaf("e"), leaf("e")), MONADIC)
    with pytest.raises(UnknownSymbolError):
        check_tree(param(1), MONADIC)


def test_alphabet_rejects_duplicates():
    with pytest.raises(AlphabetMismatchError):
        RankedAlphabet.of(("a", 1), ("a", 0))
    with pytest.raises(AlphabetMismatchError):
        MONADIC.extended(Symbol("a", 2))
    assert MONADIC.extended(Symbol("a", 1)) == MONADIC


def test_quote_name():
    assert quote_name("a") == "a"
    assert quote_name("e'") == "e'"
    assert quote_name("x1") == '"x1"'
    assert quote_name("pi") == '"pi"'
    assert quote_name("q.{1}") == '"q.{1}"'
    assert str(Param(3)) == "y3"


def test_hole_is_fresh():
    assert HOLE.rank == 0
    assert HOLE.name not in MONADIC


def test_monadic_has_one_tree_per_size_chain():
    # #/1 and a/1 over e: 2^(n-1) trees of size n
    assert [count_trees(MONADIC, n) for n in range(1, 6)] == [1, 2, 4, 8, 16]


def test_binary_counts_are_catalan():
    assert [count_trees(BINARY, n) for n in range(1, 10)] == [1, 0, 1, 0, 2, 0, 5, 0, 14]


def test_enumeration_order_by_size_then_declaration():
    trees = [format_tree(t) for t in enumerate_trees(MONADIC, 3)]
    assert trees == ["e", "#(e)", "a(e)", "#(#(e))", "#(a(e))", "a(#(e))", "a(a(e))"]


def test_enumeration_needs_a_nullary_symbol():
    with pytest.raises(UnknownSymbolError):
        list(enumerate_trees(RankedAlphabet.of(("a", 1)), 3))


@given(size=st.integers(min_value=1, max_value=7),
       alphabet=st.sampled_from([MONADIC, BINARY, MIXED]))
def test_enumeration_is_complete_and_duplicate_free(size, alphabet):
    trees = trees_of_size(alphabet, size)
    assert len(trees) == count_trees(alphabet, size)
    assert len(set(trees)) == len(trees)
    for t in trees:
        assert t.size == size
        check_tree(t, alphabet)


@given(bound=st.integers(min_value=1, max_value=6))
def test_enumeration_sizes_never_decrease(bound):
    sizes = [t.size for t in enumerate_trees(MIXED, bound)]
    assert sizes == sorted(sizes)
    assert len(sizes) == sum(count_trees(MIXED, n) for n in range(1, bound + 1))
