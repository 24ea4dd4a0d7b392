#!/usr/bin/env python3
"""
Acceptance Run
Replays the golden examples end to end and prints one verdict per item
- Exact tree comparisons only
- Exit code 0 when every item passes, 1 otherwise
"""

import sys
from pathlib import Path

# Add parent directory to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from mtt_workbench.analysis import check_fv, find_rho, is_consistent
from mtt_workbench.att import att_dependency_graph, att_is_circular, shortest_cycle
from mtt_workbench.config import load_settings
from mtt_workbench.constructions import (
    att_to_consistent_mtt, expand_to_consistent, fv_to_att, nondeleting_nf, nonerasing_nf, omega_direct,
)
from mtt_workbench.difftest import equivalent_up_to
from mtt_workbench.dynfv import check_dynamic_fv, dynfv_pipeline, equivalence_gadget
from mtt_workbench.formats import load_transducer, parse_rho, parse_tree
from mtt_workbench.pipeline import Pipeline
from mtt_workbench.reporting import Verdict, summarize

GOLDEN = project_root / "golden"


def golden(name):
    return load_transducer(GOLDEN / name)


def monadic(prefix, n, leaf="e"):
    return prefix * n + leaf + ")" * n


def verdict(item, ok, detail=""):
    print(f"{'✅' if ok else '❌'} {item}" + (f" - {detail}" if detail else ""))
    return Verdict(item, ok, detail)


# ===== Items =====

def abcd_translation():
    abcd = golden("abcd.mtt")
    for n in range(7):
        s = parse_tree("#(" + monadic("a(", n) + ")")
        expected = parse_tree("a(" * n + "b(" * n + "c(" * n + "d(" * n + "e" + ")" * (4 * n))
        if abcd.apply(s) != expected:
            return verdict("abcd translates #(a^n(e))", False, f"n={n}: {abcd.apply(s)}")
    return verdict("abcd translates #(a^n(e))", True, "n = 0..6")


def abcd_expansion():
    abcd, abcd_padded = golden("abcd.mtt"), golden("abcd_padded.mtt")
    expanded = expand_to_consistent(abcd, parse_rho((GOLDEN / "abcd.rho").read_text(encoding="utf-8")))
    same = dict(expanded.rules) == dict(abcd_padded.rules)
    witness = is_consistent(abcd).violation
    ok = same and is_consistent(expanded).consistent and witness is not None
    return verdict("expansion of abcd is the padded consistent MTT", ok, f"abcd inconsistent: {witness}")


def loopy_normal_form():
    loopy = golden("loopy.mtt")
    result = nondeleting_nf(loopy)
    rho = {(q, 1): 1 for q, rank in result.core.states if rank == 1}
    fv = check_fv(result.core, rho)
    report = equivalent_up_to(loopy, result.pipeline, 7)
    ok = result.lookahead.states == ("p1", "p2", "p3") and fv.ok and report.equal
    return verdict("nondeleting normal form of loopy", ok, str(report))


def loopy_att():
    loopy = golden("loopy.mtt")
    result = nondeleting_nf(loopy)
    att = fv_to_att(result.core)
    circular = att_is_circular(att).circular
    annotated = result.lookahead.apply(parse_tree("sigma(e',e)"))
    cycle = shortest_cycle(att_dependency_graph(att, annotated).graph)
    report = equivalent_up_to(loopy, Pipeline.of(result.lookahead, att), 6)
    return verdict("ATT of loopy is non-circular", not circular and cycle is None and report.equal, str(annotated))


def twins_items():
    twins = golden("twins.mtt")
    records = [verdict("twins has no parameter renaming", find_rho(twins) is None)]
    dyn = check_dynamic_fv(twins, size_bound=8)
    records.append(verdict("twins has the dynamic FV property", dyn.ok, f"{dyn.tested} inputs up to size 8"))
    report = equivalent_up_to(twins, dynfv_pipeline(twins), 7)
    records.append(verdict("annotating relabeling and ATT match twins", report.equal, str(report)))
    ok = True
    for n in range(1, 5):
        t = "a(" * (n - 1) + "b(" * (n - 1) + "a(" * (2 * n - 2) + "e" + ")" * (4 * n - 4)
        ok = ok and twins.apply(parse_tree(monadic("a(", n))) == parse_tree(f"f({t},{t})")
    records.append(verdict("twins translates a^n(e) to f(t,t)", ok, "n = 1..4"))
    return records


def diverging_violation():
    found = check_dynamic_fv(golden("diverging.mtt"), size_bound=4)
    detail = str(found.violation) if found.violation else "no violation"
    return verdict("diverging MTT violates dynamic FV", not found.ok, detail)


def gadget_items():
    const_e, const_delta = golden("const_e.mtt"), golden("const_delta.mtt")
    conv, same = equivalence_gadget(Pipeline.of(const_e), Pipeline.of(const_e))
    records = [verdict("gadget of a pipeline with itself", check_dynamic_fv(same, conv, size_bound=6).ok)]
    conv, differ = equivalence_gadget(Pipeline.of(const_e), Pipeline.of(const_delta))
    found = check_dynamic_fv(differ, conv, size_bound=4)
    ok = not found.ok and str(found.violation.source) == "a(e)"
    records.append(verdict("gadget of two different pipelines", ok, str(found.violation)))
    return records


def construction_suite(bound):
    abcd, twins = golden("abcd.mtt"), golden("twins.mtt")
    rho = find_rho(abcd)
    pairs = [
        ("expand_to_consistent(abcd)", abcd, expand_to_consistent(abcd, rho)),
        ("fv_to_att(abcd)", abcd, fv_to_att(abcd, rho)),
        ("omega_direct(abcd)", abcd, omega_direct(abcd, rho)),
        ("att_to_consistent_mtt(fv_to_att(abcd))", abcd, att_to_consistent_mtt(fv_to_att(abcd, rho))),
        ("nonerasing_nf(twins)", twins, nonerasing_nf(twins).pipeline),
    ]
    records = []
    for item, source, built in pairs:
        report = equivalent_up_to(source, built, bound)
        records.append(verdict(f"{item} is equivalent", report.equal, str(report)))
    for name in ("abcd.mtt", "abcd_padded.mtt"):
        dyn = check_dynamic_fv(golden(name), size_bound=8)
        records.append(verdict(f"{name} has the dynamic FV property", dyn.ok, f"{dyn.tested} inputs"))
    return records


def main():
    settings = load_settings()
    print("\n📊 Acceptance run")
    print("=" * 60)
    records = [abcd_translation(), abcd_expansion(), loopy_normal_form(), loopy_att()]
    records += twins_items()
    records.append(diverging_violation())
    records += gadget_items()
    records += construction_suite(settings.bound)
    print("\n" + "=" * 60)
    print(summarize(records))
    return 0 if all(r.passed for r in records) else 1


if __name__ == "__main__":
    sys.exit(main())
