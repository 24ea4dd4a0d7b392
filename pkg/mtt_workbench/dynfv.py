"""
Dynamic FV machinery: reachable states, call trees, the bounded dynamic-FV
check, the state-annotating relabeling with its ATT, and the equivalence gadget
"""
import logging
from dataclasses import dataclass
from functools import partial
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .analysis import top
from .att import Att
from .constructions import bottom_symbol
from .errors import AlphabetMismatchError, ConstructionError, PreconditionError
from .mtt import (
    Mtt, MttEvaluator, is_nondeleting, is_nonerasing, mtt_context_semantics, rename_calls, state_calls,
)
from .pipeline import Pipeline, convolution_relabeling
from .relabel import Brel, Trel, relabeled_name
from .stage import Stage
from .trees import (
    HOLE, Call, Path, RankedAlphabet, Symbol, Tree, enumerate_trees, format_path, node_set,
    param, replace_subtree, subst_second_order, subtree,
)
from .workers import ordered_map

logger = logging.getLogger(__name__)


# ===== Reachable states and call trees =====

def reachable_states(m: Mtt, start: Sequence[str], s: Tree, u: Path,
                     evaluator: Optional[MttEvaluator] = None) -> Set[str]:
    """
    States q such that <q,x> occurs in M_q'(s[u <- x]) for some q' in start.

    Raises:
        InvalidPathError: u is not a node of s
    """
    evaluator = evaluator or MttEvaluator(m)
    found: Set[str] = set()
    for q in start:
        context = _context_for(m, q, s, u, evaluator)
        found |= {label.state for label in context.labels() if isinstance(label, Call)}
    return found


def _context_for(m: Mtt, q: str, s: Tree, u: Path, evaluator: MttEvaluator) -> Tree:
    if q == m.initial:
        return mtt_context_semantics(m, s, u, evaluator)
    subtree(s, u)
    return evaluator.state(q, replace_subtree(s, u, Tree(HOLE)))


@dataclass
class CallTreeSet:
    """Distinct <q,x>-rooted subtrees of M_q0(s[u <- x]), in order of first appearance."""
    state: str
    source: Tree
    path: Path
    trees: Tuple[Tree, ...] = ()

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self) -> Iterator[Tree]:
        return iter(self.trees)


def _group_call_trees(context: Tree) -> Dict[str, List[Tree]]:
    groups: Dict[str, List[Tree]] = {}
    for _, sub in context.iter_nodes():
        if isinstance(sub.label, Call):
            members = groups.setdefault(sub.label.state, [])
            if sub not in members:
                members.append(sub)
    return groups


def call_trees(m: Mtt, s: Tree, u: Path, q: str, evaluator: Optional[MttEvaluator] = None) -> CallTreeSet:
    context = mtt_context_semantics(m, s, u, evaluator)
    return CallTreeSet(q, s, u, tuple(_group_call_trees(context).get(q, ())))


def evaluate_argument(m: Mtt, t: Tree, s_u: Tree, evaluator: Optional[MttEvaluator] = None) -> Tree:
    """t[[<q',x> <- M_q'(s_u) | q' in Q]]."""
    evaluator = evaluator or MttEvaluator(m)
    holes = {label for label in t.labels() if isinstance(label, Call)}
    return subst_second_order(t, {label: evaluator.state(label.state, s_u) for label in holes})


# ===== Bounded dynamic FV check =====

@dataclass
class DynFvViolation:
    source: Tree
    tree: Tree
    path: Path
    state: str
    param: int
    first: Tree
    second: Tree
    first_value: Tree
    second_value: Tree

    def __str__(self) -> str:
        return (
            f"at {self.tree} node {format_path(self.path)}: argument {self.param} of {self.state} "
            f"evaluates to {self.first_value} in {self.first} but to {self.second_value} in {self.second}"
        )


@dataclass
class DynFvVerdict:
    """`ok` means no violation up to `bound`; it never claims the property holds."""
    ok: bool
    bound: int
    tested: int = 0
    violation: Optional[DynFvViolation] = None


def find_violation(m: Mtt, t: Tree, source: Optional[Tree] = None) -> Optional[DynFvViolation]:
    """First violation on the input t: nodes in preorder, states in declaration order."""
    evaluator = MttEvaluator(m)
    for u in node_set(t):
        groups = _group_call_trees(mtt_context_semantics(m, t, u, evaluator))
        s_u = subtree(t, u)
        for q in m.state_names:
            trees = groups.get(q, [])
            if len(trees) < 2:
                continue
            for j in range(1, m.rank_of(q) + 1):
                first = evaluate_argument(m, trees[0].children[j - 1], s_u, evaluator)
                for other in trees[1:]:
                    value = evaluate_argument(m, other.children[j - 1], s_u, evaluator)
                    if value != first:
                        return DynFvViolation(source or t, t, u, q, j, trees[0], other, first, value)
    return None


def _check_source(m: Mtt, lookaround: Optional[Pipeline], s: Tree) -> Optional[DynFvViolation]:
    t = lookaround.apply(s) if lookaround is not None else s
    return find_violation(m, t, s)


def check_dynamic_fv(m: Mtt, lookaround: Optional[Pipeline] = None, size_bound: int = 6,
                     workers: int = 1) -> DynFvVerdict:
    """
    Test the dynamic FV property on every source tree with at most size_bound nodes.

    Args:
        m: MTT under test
        lookaround: Relabelings applied first; m is checked on their image
        size_bound: Largest source tree size
        workers: Worker processes for the enumeration

    Returns:
        DynFvVerdict with the first violation in enumeration order, if any
    """
    if lookaround is not None and not lookaround.output_alphabet.same_symbols(m.input_alphabet):
        raise AlphabetMismatchError(f"{lookaround.name} does not produce the input alphabet of {m.name}")
    alphabet = lookaround.input_alphabet if lookaround is not None else m.input_alphabet
    sources = list(enumerate_trees(alphabet, size_bound))
    results = ordered_map(partial(_check_source, m, lookaround), sources, workers)
    for tested, found in enumerate(results, start=1):
        if found is not None:
            logger.info("%s: dynamic FV violated on %s", m.name, found.source)
            return DynFvVerdict(False, size_bound, tested, found)
    return DynFvVerdict(True, size_bound, len(sources))


# ===== State-annotating relabeling and its ATT =====

def state_set_name(states: Sequence[str], members: FrozenSet[str]) -> str:
    return "{" + ",".join(q for q in states if q in members) + "}"


def child_states(m: Mtt, current: FrozenSet[str], sigma: Symbol) -> Tuple[FrozenSet[str], ...]:
    """Sts(Q', sigma(x1..xk), i) for every child i."""
    found: List[Set[str]] = [set() for _ in range(sigma.rank)]
    for q in current:
        for _, label in state_calls(m.rhs(q, sigma.name)):
            found[label.var - 1].add(label.state)
    return tuple(frozenset(f) for f in found)


def reachable_state_sets(m: Mtt) -> List[FrozenSet[str]]:
    """State sets reachable from {q0} through child_states, breadth first."""
    order: List[FrozenSet[str]] = [frozenset({m.initial})]
    i = 0
    while i < len(order):
        current = order[i]
        i += 1
        for sym in m.input_alphabet:
            for target in child_states(m, current, sym):
                if target not in order:
                    order.append(target)
    return order


def build_state_annotating_trel(m: Mtt) -> Trel:
    """
    Top-down relabeling writing next to every node the set of states processing it.

    Only state sets reachable from {q0} become relabeling states; the output
    symbol for sigma under Q' is "[sigma,{..}]".
    """
    order = reachable_state_sets(m)
    rules: Dict[Tuple[str, str], Tuple[str, Tuple[str, ...]]] = {}
    symbols: List[Symbol] = []
    names = m.state_names
    for current in order:
        label = state_set_name(names, current)
        for sym in m.input_alphabet:
            targets = child_states(m, current, sym)
            out = relabeled_name(sym.name, [label])
            symbols.append(Symbol(out, sym.rank))
            rules[(label, sym.name)] = (out, tuple(state_set_name(names, t) for t in targets))
    states = tuple(state_set_name(names, q) for q in order)
    logger.debug("%s: %d reachable state sets", m.name, len(states))
    return Trel(f"E({m.name})", m.input_alphabet, RankedAlphabet(tuple(symbols)), states,
                state_set_name(names, order[0]), rules)


def inherited_name(q: str, j: int) -> str:
    return f"<{q},{j}>"


def _postorder(t: Tree, path: Path = ()) -> Iterator[Tuple[Path, Tree]]:
    for i, child in enumerate(t.children, start=1):
        yield from _postorder(child, path + (i,))
    yield path, t


def build_dynfv_att(m: Mtt, trel: Optional[Trel] = None, bottom: Optional[str] = None) -> Att:
    """
    ATT running on the output of build_state_annotating_trel(m).

    The inherited attribute <q,j> stands for the j-th parameter of q. Its rule
    below a node is copied from the first <q,x_i> call met in a post-order walk
    over the rules of the annotated states, taken in declaration order.

    Erasing rules are accepted; the equivalence argument is only known to hold
    for nonerasing MTTs, so they are reported as a warning.

    Raises:
        PreconditionError: m deletes parameters
    """
    if not is_nondeleting(m):
        raise PreconditionError(f"{m.name} must be nondeleting")
    if not is_nonerasing(m):
        logger.warning("%s has erasing rules; run nonerasing_nf first for a guaranteed equivalent ATT", m.name)
    trel = trel or build_state_annotating_trel(m)
    output, bot = bottom_symbol(m.output_alphabet, bottom)
    filler = Tree(bot)
    inh = tuple(inherited_name(q, j) for q, rank in m.states for j in range(1, rank + 1))

    sets = {state_set_name(m.state_names, p): p for p in reachable_state_sets(m)}
    rules: Dict[str, Dict[Tuple[str, int], Tree]] = {}
    for (label, sigma), (out, _) in trel.rules.items():
        sym = m.input_alphabet.get(sigma)
        members = [q for q in m.state_names if q in sets[label]]
        block: Dict[Tuple[str, int], Tree] = {}
        for q in m.state_names:
            if q in members:
                block[(q, 0)] = top(m.rhs(q, sigma), partial(inherited_name, q))
            else:
                block[(q, 0)] = filler
        seen: Set[Tuple[str, int]] = set()
        for q_nu in members:
            zeta = m.rhs(q_nu, sigma)
            for v, sub in _postorder(zeta):
                call = sub.label
                if not isinstance(call, Call) or (call.state, call.var) in seen:
                    continue
                seen.add((call.state, call.var))
                for j in range(1, call.rank + 1):
                    block[(inherited_name(call.state, j), call.var)] = top(
                        subtree(zeta, v + (j,)), partial(inherited_name, q_nu)
                    )
        for i in range(1, sym.rank + 1):
            for beta in inh:
                block.setdefault((beta, i), filler)
        rules[out] = block
    return Att(f"A({m.name})", trel.output_alphabet, output, tuple(m.state_names), inh, m.initial, rules)


def dynfv_pipeline(m: Mtt, bottom: Optional[str] = None) -> Pipeline:
    """The relabeling followed by its ATT; equivalent to m when m has the dynamic FV property."""
    trel = build_state_annotating_trel(m)
    return Pipeline.of(trel, build_dynfv_att(m, trel, bottom))


# ===== Equivalence gadget =====

GADGET_E = "@e"
GADGET_DELTA = "@delta"


def _split(p: Pipeline) -> Tuple[List[Stage], Mtt]:
    if not p.stages or not isinstance(p.last, Mtt):
        raise PreconditionError(f"{p.name} must end in an MTT")
    head = list(p.stages[:-1])
    for stage in head:
        if not isinstance(stage, (Brel, Trel)):
            raise PreconditionError(f"{p.name}: {stage.name} is not a relabeling")
    return head, p.last


def _prefixed(m: Mtt, prefix: str, side: int, pairs: RankedAlphabet) -> Dict[Tuple[str, str], Tree]:
    rules: Dict[Tuple[str, str], Tree] = {}
    for sym in pairs:
        component = _pair_parts(sym.name)[side]
        for q in m.state_names:
            rules[(prefix + q, sym.name)] = rename_calls(
                m.rhs(q, component), lambda c: Call(prefix + c.state, c.var, c.rank)
            )
    return rules


def _pair_parts(name: str) -> Tuple[str, str]:
    """Split "(l,r)" at the comma that sits at bracket depth one."""
    depth = 0
    for i, ch in enumerate(name):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == "," and depth == 1:
            return name[1:i], name[i + 1:-1]
    raise ConstructionError(f"{name} is not a pair symbol")


def _named_or_fresh(alphabet: RankedAlphabet, name: str, rank: int, fresh: str) -> Symbol:
    if name in alphabet and alphabet.get(name).rank == rank:
        return alphabet.get(name)
    return Symbol(fresh, rank)


def equivalence_gadget(p1: Pipeline, p2: Pipeline) -> Tuple[Pipeline, Mtt]:
    """
    MTT with regular look-around that has the dynamic FV property iff p1 and p2
    translate every input rooted at a unary symbol identically below that root.

    The states of the two MTTs are renamed with prefixes "L." and "R."; fresh
    states q0 and q' compare the two start calls as arguments of q'.

    Returns:
        (convolution relabeling, combined MTT)

    Raises:
        AlphabetMismatchError: The pipelines read different source alphabets
        ConstructionError: No unary pair symbol exists
    """
    if not p1.input_alphabet.same_symbols(p2.input_alphabet):
        raise AlphabetMismatchError(f"{p1.name} and {p2.name} read different alphabets")
    left, m1 = _split(p1)
    right, m2 = _split(p2)
    conv = convolution_relabeling(left, right, p1.input_alphabet, name=f"conv({p1.name},{p2.name})")
    pairs = conv.output_alphabet
    if not pairs.of_rank(1):
        raise ConstructionError("the gadget needs a unary input symbol")

    output = m1.output_alphabet.union(m2.output_alphabet)
    e = _named_or_fresh(output, "e", 0, GADGET_E)
    delta = _named_or_fresh(output, "delta", 2, GADGET_DELTA)
    output = output.extended(e, delta)

    rules = _prefixed(m1, "L.", 0, pairs)
    rules.update(_prefixed(m2, "R.", 1, pairs))
    start_left = Tree(Call("L." + m1.initial, 1, 0))
    start_right = Tree(Call("R." + m2.initial, 1, 0))
    for sym in pairs:
        if sym.rank == 1:
            rules[("q0", sym.name)] = Tree(delta, (
                Tree(Call("q'", 1, 1), (start_left,)),
                Tree(Call("q'", 1, 1), (start_right,)),
            ))
        else:
            rules[("q0", sym.name)] = Tree(e)
        rules[("q'", sym.name)] = param(1)
    states = (("q0", 0), ("q'", 1)) + tuple(("L." + q, r) for q, r in m1.states) \
        + tuple(("R." + q, r) for q, r in m2.states)
    gadget = Mtt(f"gadget({m1.name},{m2.name})", pairs, output, states, "q0", rules)
    return conv, gadget


# ===== Growth of argument trees =====

@dataclass
class GrowthRow:
    source: Tree
    size: int
    output_size: int
    distinct_subtrees: int
    max_distinct_arguments: int


def subtree_growth(m: Mtt, size_bound: int) -> List[GrowthRow]:
    """
    For every input up to size_bound: output size, number of distinct output
    subtrees, and the largest number of distinct evaluated arguments in one
    call-tree set.
    """
    rows: List[GrowthRow] = []
    for s in enumerate_trees(m.input_alphabet, size_bound):
        evaluator = MttEvaluator(m)
        out = evaluator.state(m.initial, s)
        widest = 0
        for u in node_set(s):
            groups = _group_call_trees(mtt_context_semantics(m, s, u, evaluator))
            s_u = subtree(s, u)
            for q, trees in groups.items():
                for j in range(1, m.rank_of(q) + 1):
                    values = {evaluate_argument(m, t.children[j - 1], s_u, evaluator) for t in trees}
                    widest = max(widest, len(values))
        distinct = len({sub for _, sub in out.iter_nodes()})
        rows.append(GrowthRow(s, s.size, out.size, distinct, widest))
    return rows
