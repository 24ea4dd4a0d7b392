import pytest

from mtt_workbench.difftest import COUNTEREXAMPLE, EQUAL, STAGE_ERROR, equivalent_up_to
from mtt_workbench.errors import AlphabetMismatchError
from mtt_workbench.formats import parse_tree
from mtt_workbench.pipeline import Pipeline
from mtt_workbench.workers import MIN_PARALLEL_ITEMS, ordered_map


def test_counterexample_on_smallest_input(const_e, const_delta):
    report = equivalent_up_to(const_e, const_delta, 5)
    assert report.outcome == COUNTEREXAMPLE
    assert not report.equal
    assert report.tested == 1
    assert report.input == parse_tree("e")
    assert report.out1 == parse_tree("e")
    assert report.out2 == parse_tree("delta(e,e)")
    assert "counterexample" in str(report)


def test_equal_reports_inputs_tested(abcd):
    report = equivalent_up_to(abcd, Pipeline.of(abcd), 6)
    assert report.outcome == EQUAL
    assert report.tested == 63
    assert str(report) == "equal on all 63 inputs up to size 6"


def test_stage_error_is_reported(crafted, const_e):
    report = equivalent_up_to(crafted, const_e, 4)
    assert report.outcome == STAGE_ERROR
    assert (report.side, report.stage) == (1, 0)
    assert report.input == parse_tree("e")
    assert report.tested == 1


def test_alphabet_mismatch(abcd, twins):
    with pytest.raises(AlphabetMismatchError):
        equivalent_up_to(abcd, twins, 3)


def test_parallel_run_matches_serial(abcd, abcd_padded):
    serial = equivalent_up_to(abcd, abcd_padded, 7)
    parallel = equivalent_up_to(abcd, abcd_padded, 7, workers=2)
    assert serial.outcome == parallel.outcome == EQUAL
    assert parallel.tested == 127


def test_ordered_map_keeps_order():
    assert ordered_map(abs, range(-100, 0), workers=2) == list(range(100, 0, -1))
    assert ordered_map(abs, [-1, 2], workers=4) == [1, 2]
    assert MIN_PARALLEL_ITEMS > 2


# ===== Verdict properties =====

PAIRS = [
    (("abcd",), ("abcd_padded",)),
    (("const_e",), ("const_delta",)),
    (("abcd",), ("alternate", "abcd")),
    (("crafted",), ("const_e",)),
]


def build(request, names):
    return Pipeline.of(*(request.getfixturevalue(name) for name in names))


@pytest.mark.parametrize("first, second", PAIRS)
def test_verdict_is_symmetric(request, first, second):
    p1, p2 = build(request, first), build(request, second)
    forward, backward = equivalent_up_to(p1, p2, 5), equivalent_up_to(p2, p1, 5)
    assert (forward.outcome, forward.tested, forward.input) == (backward.outcome, backward.tested, backward.input)
    assert (forward.out1, forward.out2) == (backward.out2, backward.out1)
    if forward.outcome == STAGE_ERROR:
        assert {forward.side, backward.side} == {1, 2}
        assert forward.stage == backward.stage


@pytest.mark.parametrize("first, second", PAIRS[1:3])
def test_counterexample_persists_at_larger_bounds(request, first, second):
    p1, p2 = build(request, first), build(request, second)
    found = equivalent_up_to(p1, p2, 6)
    assert found.outcome == COUNTEREXAMPLE
    for bound in range(1, 7):
        report = equivalent_up_to(p1, p2, bound)
        if bound < found.input.size:
            assert report.equal
        else:
            assert (report.outcome, report.input, report.tested) == (COUNTEREXAMPLE, found.input, found.tested)


def test_relabeling_changes_translation_late(abcd, alternate):
    report = equivalent_up_to(abcd, Pipeline.of(alternate, abcd), 6)
    assert report.input == parse_tree("#(a(a(e)))")
    assert report.out2 == parse_tree("a(b(c(d(e))))")
