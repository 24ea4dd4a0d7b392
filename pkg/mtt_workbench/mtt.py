"""
Macro tree transducers: definition, validation and semantics
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Set, Tuple

from .errors import TransducerError
from .stage import Stage, ValidationReport
from .trees import (
    HOLE, Call, Param, Path, RankedAlphabet, Symbol, Tree, check_tree, param,
    replace_subtree, subst_params, subtree,
)

logger = logging.getLogger(__name__)

RuleKey = Tuple[str, str]


@dataclass(frozen=True, eq=False)
class Mtt(Stage):
    """
    Total deterministic macro tree transducer.

    rules maps (state, input symbol name) to a right-hand side over the output
    alphabet, state calls Call(q', i) and parameter leaves Param(j).
    """
    name: str
    input_alphabet: RankedAlphabet
    output_alphabet: RankedAlphabet
    states: Tuple[Tuple[str, int], ...]
    initial: str
    rules: Mapping[RuleKey, Tree] = field(default_factory=dict)

    kind = "mtt"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "_ranks", dict(self.states))

    @property
    def state_names(self) -> List[str]:
        return [q for q, _ in self.states]

    def rank_of(self, q: str) -> int:
        try:
            return self._ranks[q]
        except KeyError:
            raise TransducerError(f"{self.name}: unknown state {q!r}") from None

    def has_state(self, q: str) -> bool:
        return q in self._ranks

    def rhs(self, q: str, sigma: str) -> Tree:
        try:
            return self.rules[(q, sigma)]
        except KeyError:
            raise TransducerError(f"{self.name}: missing rule ({q},{sigma})") from None

    def iter_rules(self) -> Iterator[Tuple[str, Symbol, Tree]]:
        """Rules in (input symbol, state) declaration order."""
        for sym in self.input_alphabet:
            for q in self.state_names:
                if (q, sym.name) in self.rules:
                    yield q, sym, self.rules[(q, sym.name)]

    @property
    def max_rank(self) -> int:
        return max((r for _, r in self.states), default=0)

    def apply(self, s: Tree) -> Tree:
        return mtt_translate(self, s)

    def with_rules(self, rules: Mapping[RuleKey, Tree], **changes) -> "Mtt":
        return replace(self, rules=dict(rules), **changes)


# ===== Rhs helpers =====

def state_calls(t: Tree) -> List[Tuple[Path, Call]]:
    """Preorder list of (path, label) for every state-call node of a rhs."""
    return [(p, s.label) for p, s in t.iter_nodes() if isinstance(s.label, Call)]


def params_in(t: Tree) -> Set[int]:
    return {lab.index for lab in t.labels() if isinstance(lab, Param)}


def call(state: str, var: int, *args: Tree) -> Tree:
    return Tree(Call(state, var, len(args)), args)


def rename_calls(t: Tree, fn: Callable[[Call], Call]) -> Tree:
    label = t.label
    if isinstance(label, Call):
        label = fn(label)
    return Tree(label, tuple(rename_calls(c, fn) for c in t.children))


# ===== Validation =====

def validate_mtt(m: Mtt) -> ValidationReport:
    """
    Check every structural requirement of an MTT.

    Returns:
        ValidationReport listing missing rules, arity errors and bad parameter indices
    """
    report = ValidationReport(f"mtt {m.name}")
    names = [q for q, _ in m.states]
    for q in sorted({q for q in names if names.count(q) > 1}):
        report.add(f"state {q} declared twice")
    if m.initial not in m._ranks:
        report.add(f"initial state {m.initial} is not declared")
    elif m.rank_of(m.initial) != 0:
        report.add(f"initial state {m.initial} has rank {m.rank_of(m.initial)}, expected 0")

    for sym in m.input_alphabet:
        for q, rank in m.states:
            rhs = m.rules.get((q, sym.name))
            if rhs is None:
                report.add(f"missing rule ({q},{sym.name})")
                continue
            _validate_rhs(m, q, rank, sym, rhs, report)

    for q, sigma in m.rules:
        if q not in m._ranks:
            report.add(f"rule for undeclared state ({q},{sigma})")
        elif sigma not in m.input_alphabet:
            report.add(f"rule for undeclared input symbol ({q},{sigma})")
    return report


def _validate_rhs(m: Mtt, q: str, rank: int, sym: Symbol, rhs: Tree, report: ValidationReport) -> None:
    where = f"rule ({q},{sym.name})"
    for _, sub in rhs.iter_nodes():
        label = sub.label
        if isinstance(label, Param):
            if not 1 <= label.index <= rank:
                report.add(f"{where}: parameter y{label.index} out of range for rank {rank}")
        elif isinstance(label, Call):
            if label.state not in m._ranks:
                report.add(f"{where}: call to undeclared state {label.state}")
            elif m.rank_of(label.state) != label.rank:
                report.add(
                    f"{where}: call to {label.state} has {label.rank} arguments, "
                    f"state rank is {m.rank_of(label.state)}"
                )
            if not 1 <= label.var <= sym.rank:
                report.add(f"{where}: input variable x{label.var} out of range for rank {sym.rank}")
        elif isinstance(label, Symbol):
            if label.name not in m.output_alphabet:
                report.add(f"{where}: unknown output symbol {label.name}")
            elif m.output_alphabet.get(label.name).rank != label.rank:
                report.add(f"{where}: arity error at output symbol {label.name}")
        else:
            report.add(f"{where}: unexpected node {label}")


def is_nondeleting(m: Mtt) -> bool:
    for q, rank in m.states:
        wanted = set(range(1, rank + 1))
        for sym in m.input_alphabet:
            rhs = m.rules.get((q, sym.name))
            if rhs is not None and not wanted <= params_in(rhs):
                return False
    return True


def is_nonerasing(m: Mtt) -> bool:
    return not any(isinstance(rhs.label, Param) for rhs in m.rules.values())


# ===== Semantics =====

class MttEvaluator:
    """
    Memoized evaluator for M_q(s); the memo table is private to the instance.

    The fresh input symbol HOLE evaluates to <q,x>(y1,...,ym).
    """

    def __init__(self, m: Mtt):
        self.m = m
        self._memo: Dict[Tuple[str, Tree], Tree] = {}

    def state(self, q: str, s: Tree) -> Tree:
        key = (q, s)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        rank = self.m.rank_of(q)
        if s.label == HOLE:
            result = Tree(Call(q, 0, rank), tuple(param(j) for j in range(1, rank + 1)))
        else:
            result = self._instantiate(self.m.rhs(q, s.label.name), s)
        self._memo[key] = result
        return result

    def _instantiate(self, t: Tree, s: Tree) -> Tree:
        label = t.label
        if isinstance(label, Call):
            if not 1 <= label.var <= len(s.children):
                raise TransducerError(f"{self.m.name}: x{label.var} out of range at {s.label}")
            value = self.state(label.state, s.children[label.var - 1])
            return subst_params(value, tuple(self._instantiate(c, s) for c in t.children))
        if not t.children:
            return t
        return Tree(label, tuple(self._instantiate(c, s) for c in t.children))


def mtt_state_semantics(m: Mtt, q: str, s: Tree) -> Tree:
    return MttEvaluator(m).state(q, s)


def mtt_translate(m: Mtt, s: Tree) -> Tree:
    """Output tree M_{q0}(s)."""
    check_tree(s, m.input_alphabet)
    return MttEvaluator(m).state(m.initial, s)


def mtt_context_semantics(m: Mtt, s: Tree, u: Path, evaluator: Optional[MttEvaluator] = None) -> Tree:
    """
    Evaluate M_{q0}(s[u <- x]).

    Subtrees rooted at <q,x> nodes carry the actual argument trees as children.
    """
    subtree(s, u)
    context = replace_subtree(s, u, Tree(HOLE))
    return (evaluator or MttEvaluator(m)).state(m.initial, context)


# ===== Reachability =====

def reachable_state_names(m: Mtt) -> List[str]:
    """States reachable from the initial state through rule bodies, in declaration order."""
    seen = {m.initial}
    frontier = [m.initial]
    while frontier:
        q = frontier.pop()
        for sym in m.input_alphabet:
            rhs = m.rules.get((q, sym.name))
            if rhs is None:
                continue
            for _, label in state_calls(rhs):
                if label.state not in seen:
                    seen.add(label.state)
                    frontier.append(label.state)
    return [q for q in m.state_names if q in seen]


def trim_unreachable_states(m: Mtt) -> Mtt:
    keep = set(reachable_state_names(m))
    states = tuple((q, r) for q, r in m.states if q in keep)
    rules = {key: rhs for key, rhs in m.rules.items() if key[0] in keep}
    dropped = len(m.states) - len(states)
    if dropped:
        logger.debug("%s: dropped %d unreachable states", m.name, dropped)
    return replace(m, states=states, rules=rules)


# ===== Building blocks =====

def constant_mtt(input_alphabet: RankedAlphabet, output: Tree, output_alphabet: RankedAlphabet,
                 name: str = "const") -> Mtt:
    """Single rank-0 state that ignores its input and emits `output`."""
    check_tree(output, output_alphabet)
    rules = {("q0", sym.name): output for sym in input_alphabet}
    return Mtt(name, input_alphabet, output_alphabet, (("q0", 0),), "q0", rules)


def identity_mtt(alphabet: RankedAlphabet, name: str = "id") -> Mtt:
    rules = {
        ("q", sym.name): Tree(sym, tuple(call("q", i) for i in range(1, sym.rank + 1)))
        for sym in alphabet
    }
    return Mtt(name, alphabet, alphabet, (("q", 0),), "q", rules)
