"""
Deterministic bottom-up (BREL) and top-down (TREL) finite-state relabelings
"""
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Mapping, Tuple

from .errors import TransducerError
from .stage import Stage, ValidationReport
from .trees import RankedAlphabet, Symbol, Tree, check_tree

# (input symbol, child states) -> (state, output symbol)
BrelKey = Tuple[str, Tuple[str, ...]]
# (state, input symbol) -> (output symbol, child states)
TrelKey = Tuple[str, str]


@dataclass(frozen=True, eq=False)
class Brel(Stage):
    """Total deterministic bottom-up relabeling; every state is final."""
    name: str
    input_alphabet: RankedAlphabet
    output_alphabet: RankedAlphabet
    states: Tuple[str, ...]
    rules: Mapping[BrelKey, Tuple[str, str]] = field(default_factory=dict)

    kind = "brel"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))

    def run(self, s: Tree) -> Tuple[Tree, str]:
        children = [self.run(c) for c in s.children]
        key = (s.label.name, tuple(state for _, state in children))
        try:
            state, out = self.rules[key]
        except KeyError:
            raise TransducerError(f"{self.name}: no rule for {key[0]}{key[1]}") from None
        return Tree(self.output_alphabet.get(out), tuple(t for t, _ in children)), state

    def apply(self, s: Tree) -> Tree:
        return brel_apply(self, s)[0]


@dataclass(frozen=True, eq=False)
class Trel(Stage):
    """Total deterministic top-down relabeling."""
    name: str
    input_alphabet: RankedAlphabet
    output_alphabet: RankedAlphabet
    states: Tuple[str, ...]
    initial: str
    rules: Mapping[TrelKey, Tuple[str, Tuple[str, ...]]] = field(default_factory=dict)

    kind = "trel"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))

    def run(self, q: str, s: Tree) -> Tree:
        try:
            out, child_states = self.rules[(q, s.label.name)]
        except KeyError:
            raise TransducerError(f"{self.name}: no rule for ({q},{s.label.name})") from None
        children = tuple(self.run(p, c) for p, c in zip(child_states, s.children))
        return Tree(self.output_alphabet.get(out), children)

    def apply(self, s: Tree) -> Tree:
        return trel_apply(self, s)


def brel_apply(b: Brel, s: Tree) -> Tuple[Tree, str]:
    """Relabel s bottom-up; returns the relabeled tree and the state reached at the root."""
    check_tree(s, b.input_alphabet)
    return b.run(s)


def trel_apply(t: Trel, s: Tree) -> Tree:
    check_tree(s, t.input_alphabet)
    return t.run(t.initial, s)


def _check_output(report: ValidationReport, alphabet: RankedAlphabet, sym: Symbol, out: str) -> None:
    if out not in alphabet:
        report.add(f"rule at {sym.name}: unknown output symbol {out}")
    elif alphabet.get(out).rank != sym.rank:
        report.add(f"rule at {sym.name}: relabeling to {out} changes the rank")


def validate_brel(b: Brel) -> ValidationReport:
    report = ValidationReport(f"brel {b.name}")
    for sym in b.input_alphabet:
        for states in product(b.states, repeat=sym.rank):
            rule = b.rules.get((sym.name, states))
            if rule is None:
                report.add(f"missing rule {sym.name}({','.join(states)})")
                continue
            target, out = rule
            if target not in b.states:
                report.add(f"rule {sym.name}({','.join(states)}): unknown state {target}")
            _check_output(report, b.output_alphabet, sym, out)
    return report


def validate_trel(t: Trel) -> ValidationReport:
    report = ValidationReport(f"trel {t.name}")
    if t.initial not in t.states:
        report.add(f"initial state {t.initial} is not declared")
    for q in t.states:
        for sym in t.input_alphabet:
            rule = t.rules.get((q, sym.name))
            if rule is None:
                report.add(f"missing rule ({q},{sym.name})")
                continue
            out, child_states = rule
            if len(child_states) != sym.rank:
                report.add(f"rule ({q},{sym.name}): {len(child_states)} child states for rank {sym.rank}")
            for p in child_states:
                if p not in t.states:
                    report.add(f"rule ({q},{sym.name}): unknown state {p}")
            _check_output(report, t.output_alphabet, sym, out)
    return report


# ===== Building blocks =====

def relabeled_name(sigma: str, parts: List[str]) -> str:
    """Name of the annotated symbol [sigma,part1,...]."""
    return "[" + ",".join([sigma] + parts) + "]"


def pair_name(left: str, right: str) -> str:
    return f"({left},{right})"


def identity_brel(alphabet: RankedAlphabet, name: str = "id") -> Brel:
    rules = {
        (sym.name, ("p",) * sym.rank): ("p", sym.name) for sym in alphabet
    }
    return Brel(name, alphabet, alphabet, ("p",), rules)


def identity_trel(alphabet: RankedAlphabet, name: str = "id") -> Trel:
    rules = {("r", sym.name): (sym.name, ("r",) * sym.rank) for sym in alphabet}
    return Trel(name, alphabet, alphabet, ("r",), "r", rules)


def pairs_alphabet(left: RankedAlphabet, right: RankedAlphabet) -> RankedAlphabet:
    """All (l, r) symbol pairs of equal rank."""
    return RankedAlphabet(tuple(
        Symbol(pair_name(l.name, r.name), l.rank)
        for l in left for r in right if l.rank == r.rank
    ))


def duplicating_brel(alphabet: RankedAlphabet, name: str = "dup") -> Brel:
    """sigma -> (sigma, sigma)."""
    output = pairs_alphabet(alphabet, alphabet)
    rules = {
        (sym.name, ("p",) * sym.rank): ("p", pair_name(sym.name, sym.name)) for sym in alphabet
    }
    return Brel(name, alphabet, output, ("p",), rules)


def lift_stage(stage: Stage, other: RankedAlphabet, side: int) -> Stage:
    """
    Let a relabeling act on one component of pair-labeled trees.

    Args:
        stage: Brel or Trel over the component alphabet
        other: Alphabet of the untouched component
        side: 0 to relabel the left component, 1 for the right one

    Returns:
        Relabeling of the same kind over pair symbols
    """
    def split(left: Symbol, right: Symbol) -> Tuple[Symbol, Symbol]:
        return (left, right) if side == 0 else (right, left)

    def pack(mine: str, theirs: str) -> str:
        return pair_name(mine, theirs) if side == 0 else pair_name(theirs, mine)

    if side == 0:
        source = pairs_alphabet(stage.input_alphabet, other)
        target = pairs_alphabet(stage.output_alphabet, other)
    else:
        source = pairs_alphabet(other, stage.input_alphabet)
        target = pairs_alphabet(other, stage.output_alphabet)
    combos = [
        split(a, b) for a in (stage.input_alphabet if side == 0 else other)
        for b in (other if side == 0 else stage.input_alphabet) if a.rank == b.rank
    ]

    if isinstance(stage, Brel):
        brel_rules: Dict[BrelKey, Tuple[str, str]] = {}
        for mine, theirs in combos:
            for states in product(stage.states, repeat=mine.rank):
                state, out = stage.rules[(mine.name, states)]
                brel_rules[(pack(mine.name, theirs.name), states)] = (state, pack(out, theirs.name))
        return Brel(f"{stage.name}@{side}", source, target, stage.states, brel_rules)
    if isinstance(stage, Trel):
        trel_rules: Dict[TrelKey, Tuple[str, Tuple[str, ...]]] = {}
        for mine, theirs in combos:
            for q in stage.states:
                out, child_states = stage.rules[(q, mine.name)]
                trel_rules[(q, pack(mine.name, theirs.name))] = (pack(out, theirs.name), child_states)
        return Trel(f"{stage.name}@{side}", source, target, stage.states, stage.initial, trel_rules)
    raise TransducerError(f"cannot lift a {stage.kind} stage onto pair symbols")
