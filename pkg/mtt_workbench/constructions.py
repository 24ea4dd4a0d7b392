"""
Transducer-to-transducer constructions: padding expansion, MTT to ATT,
ATT to MTT, look-ahead normal forms and the TREL x MTT product
"""
import logging
from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .analysis import (
    ParamRenaming, check_fv, find_rho, important_nodes, occurrence_profiles, top, validate_rho,
)
from .att import Att, att_is_circular
from .errors import AlphabetMismatchError, ConstructionError, PreconditionError
from .mtt import Mtt, is_nondeleting, rename_calls, state_calls, trim_unreachable_states
from .pipeline import Pipeline
from .relabel import Brel, Trel, relabeled_name
from .trees import AttrRef, Call, Param, RankedAlphabet, Symbol, Tree, subtree

logger = logging.getLogger(__name__)

COMB_SYMBOL = "@d"
ERASE_SYMBOL = "@erase"


@dataclass
class NormalFormResult:
    """A look-ahead relabeling and the core MTT running on its output."""
    lookahead: Brel
    core: Mtt
    renaming: Optional[ParamRenaming] = None

    @property
    def pipeline(self) -> Pipeline:
        return Pipeline.of(self.lookahead, self.core)


# ===== Helpers =====

def bottom_symbol(alphabet: RankedAlphabet, name: Optional[str] = None) -> Tuple[RankedAlphabet, Symbol]:
    """
    Pick the rank-0 filler symbol: the given name (added if absent) or the
    first rank-0 symbol in declaration order.

    Raises:
        ConstructionError: No name given and the alphabet has no rank-0 symbol
    """
    if name is not None:
        if name in alphabet:
            sym = alphabet.get(name)
            if sym.rank != 0:
                raise ConstructionError(f"filler symbol {name} must have rank 0")
            return alphabet, sym
        sym = Symbol(name, 0)
        return alphabet.extended(sym), sym
    sym = alphabet.first_nullary()
    if sym is None:
        raise ConstructionError("output alphabet has no rank-0 symbol to use as filler")
    return alphabet, sym


def _require_fv(m: Mtt, rho: Mapping[Tuple[str, int], int]) -> None:
    if not is_nondeleting(m):
        raise PreconditionError(f"{m.name} is not nondeleting")
    validate_rho(m, rho)
    result = check_fv(m, rho)
    if not result.ok:
        raise PreconditionError(f"{m.name} lacks the FV property with this renaming: {result.violation}")


def state_name(q: str, indices: Sequence[int]) -> str:
    """Mangled name q.{i1,i2} of a (state, index set) pair."""
    return f"{q}.{{{','.join(str(i) for i in sorted(indices))}}}"


def product_state(r: str, q: str) -> str:
    return f"{r}.{q}"


# ===== Padding expansion =====

def expand_to_consistent(m: Mtt, rho: Mapping[Tuple[str, int], int], bottom: Optional[str] = None) -> Mtt:
    """
    Promote every state of positive rank to the uniform rank max(rho) and
    rearrange arguments and parameters according to rho.

    Args:
        m: Nondeleting MTT with the FV property under rho
        rho: Parameter renaming
        bottom: Name of the filler symbol (defaults to the first rank-0 output symbol)

    Returns:
        Consistent MTT equivalent to m

    Raises:
        PreconditionError: m is deleting or rho does not witness the FV property
        ConstructionError: No rank-0 output symbol is available
    """
    _require_fv(m, rho)
    width = max(rho.values(), default=0)
    output, bot = bottom_symbol(m.output_alphabet, bottom)
    filler = Tree(bot)

    def expand(q: str, t: Tree) -> Tree:
        label = t.label
        if isinstance(label, Param):
            return Tree(Param(rho[(q, label.index)]))
        if isinstance(label, Call):
            if m.rank_of(label.state) == 0:
                return t
            slots = [filler] * width
            for i, child in enumerate(t.children, start=1):
                slots[rho[(label.state, i)] - 1] = expand(q, child)
            return Tree(Call(label.state, label.var, width), tuple(slots))
        return Tree(label, tuple(expand(q, c) for c in t.children))

    states = tuple((q, width if rank else 0) for q, rank in m.states)
    rules = {(q, sigma): expand(q, rhs) for (q, sigma), rhs in m.rules.items()}
    logger.info("expanded %s to uniform rank %d", m.name, width)
    return Mtt(f"E({m.name})", m.input_alphabet, output, states, m.initial, rules)


# ===== MTT to ATT =====

def _fill_dummies(a_syn: Sequence[str], a_inh: Sequence[str], sym: Symbol,
                  block: Dict[Tuple[str, int], Tree], filler: Tree) -> None:
    for alpha in a_syn:
        block.setdefault((alpha, 0), filler)
    for i in range(1, sym.rank + 1):
        for beta in a_inh:
            block.setdefault((beta, i), filler)


def _define(block: Dict[Tuple[str, int], Tree], key: Tuple[str, int], value: Tree, where: str) -> None:
    known = block.get(key)
    if known is not None and known != value:
        raise ConstructionError(f"{where}: conflicting definitions for {key[0]}(pi {key[1]}): {known} vs {value}")
    block[key] = value


def omega(m: Mtt, bottom: Optional[str] = None) -> Att:
    """
    ATT of a padded consistent MTT: states become synthesized attributes and the
    argument slots y1..ym become inherited attributes.

    Raises:
        PreconditionError: States of positive rank do not share one rank
        ConstructionError: Two important arguments define one inherited instance differently
    """
    ranks = {rank for _, rank in m.states if rank > 0}
    if len(ranks) > 1:
        raise PreconditionError(f"{m.name}: states of positive rank must share one rank, found {sorted(ranks)}")
    width = ranks.pop() if ranks else 0
    output, bot = bottom_symbol(m.output_alphabet, bottom)
    filler = Tree(bot)
    inh = tuple(f"y{j}" for j in range(1, width + 1))
    table = occurrence_profiles(m)

    rules: Dict[str, Dict[Tuple[str, int], Tree]] = {}
    for sym in m.input_alphabet:
        block: Dict[Tuple[str, int], Tree] = {}
        for q in m.state_names:
            zeta = m.rhs(q, sym.name)
            block[(q, 0)] = top(zeta)
            important = important_nodes(m, q, sym.name, table)
            for v, label in state_calls(zeta):
                if m.rank_of(label.state) == 0:
                    continue
                for j in range(1, width + 1):
                    if v + (j,) in important:
                        _define(block, (f"y{j}", label.var), top(subtree(zeta, v + (j,))), f"at {sym.name}")
        _fill_dummies(m.state_names, inh, sym, block, filler)
        rules[sym.name] = block
    return Att(f"Omega({m.name})", m.input_alphabet, output, tuple(m.state_names), inh, m.initial, rules)


def omega_direct(m: Mtt, rho: Mapping[Tuple[str, int], int], bottom: Optional[str] = None) -> Att:
    """ATT built straight from a nondeleting FV-MTT; inherited attributes are the values of rho."""
    _require_fv(m, rho)
    output, bot = bottom_symbol(m.output_alphabet, bottom)
    filler = Tree(bot)
    inh = tuple(f"y{l}" for l in sorted(set(rho.values())))

    rules: Dict[str, Dict[Tuple[str, int], Tree]] = {}
    for sym in m.input_alphabet:
        block: Dict[Tuple[str, int], Tree] = {}
        for q in m.state_names:
            zeta = m.rhs(q, sym.name)
            renamed = lambda j, q=q: f"y{rho[(q, j)]}"
            block[(q, 0)] = top(zeta, renamed)
            for v, label in state_calls(zeta):
                for j in range(1, label.rank + 1):
                    key = (f"y{rho[(label.state, j)]}", label.var)
                    _define(block, key, top(subtree(zeta, v + (j,)), renamed), f"at {sym.name}")
        _fill_dummies(m.state_names, inh, sym, block, filler)
        rules[sym.name] = block
    return Att(f"OmegaRho({m.name})", m.input_alphabet, output, tuple(m.state_names), inh, m.initial, rules)


def fv_to_att(m: Mtt, rho: Optional[Mapping[Tuple[str, int], int]] = None, bottom: Optional[str] = None) -> Att:
    """
    omega(expand_to_consistent(m, rho)), searching rho when not given.

    Raises:
        PreconditionError: No renaming gives m the FV property
        ConstructionError: The resulting ATT is circular
    """
    if rho is None:
        rho = find_rho(m)
        if rho is None:
            raise PreconditionError(f"{m.name} has no parameter renaming with the FV property")
    att = omega(expand_to_consistent(m, rho, bottom), bottom)
    result = att_is_circular(att)
    if result.circular:
        raise ConstructionError(f"{att.name} is circular on {result.witness}")
    return att


# ===== ATT to MTT =====

def att_to_consistent_mtt(a: Att, bottom: Optional[str] = None) -> Mtt:
    """
    Consistent MTT equivalent to a non-circular ATT.

    Every synthesized attribute becomes a state of rank |inh| and every inherited
    attribute a parameter (declaration order). When inherited attributes exist a
    fresh rank-0 state `<output_attr>.root` is the initial state. Inlining an
    inherited instance that is already being expanded yields the filler symbol.

    Raises:
        PreconditionError: The ATT is circular
    """
    circular = att_is_circular(a)
    if circular.circular:
        raise PreconditionError(f"{a.name} is circular on {circular.witness}")
    width = len(a.inh)
    position = {beta: j for j, beta in enumerate(a.inh, start=1)}
    output = a.output_alphabet
    needs_filler = False

    def filler() -> Tree:
        nonlocal needs_filler, output
        needs_filler = True
        output, bot = bottom_symbol(output, bottom)
        return Tree(bot)

    def solve(t: Tree, sym: Symbol, expanding: FrozenSet[Tuple[str, int]], at_root: bool) -> Tree:
        label = t.label
        if isinstance(label, AttrRef):
            if label.attr in position:
                return filler() if at_root else Tree(Param(position[label.attr]))
            args = []
            for beta in a.inh:
                key = (beta, label.child)
                if key in expanding:
                    args.append(filler())
                else:
                    args.append(solve(a.rule(sym.name, beta, label.child), sym, expanding | {key}, at_root))
            return Tree(Call(label.attr, label.child, width), tuple(args))
        return Tree(label, tuple(solve(c, sym, expanding, at_root) for c in t.children))

    rules: Dict[Tuple[str, str], Tree] = {}
    for sym in a.input_alphabet:
        for alpha in a.syn:
            rules[(alpha, sym.name)] = solve(a.rule(sym.name, alpha, 0), sym, frozenset(), False)
    states: List[Tuple[str, int]] = [(alpha, width) for alpha in a.syn]
    initial = a.output_attr
    if width:
        initial = f"{a.output_attr}.root"
        states.insert(0, (initial, 0))
        for sym in a.input_alphabet:
            rules[(initial, sym.name)] = solve(a.rule(sym.name, a.output_attr, 0), sym, frozenset(), True)
    if needs_filler:
        logger.debug("%s: filler symbol used while inlining inherited attributes", a.name)
    return Mtt(f"mtt({a.name})", a.input_alphabet, output, tuple(states), initial, rules)


# ===== Nondeleting normal form =====

def _subsets(rank: int) -> List[Tuple[int, ...]]:
    return [c for size in range(rank + 1) for c in combinations(range(1, rank + 1), size)]


def _comb(size: int, comb: Symbol) -> Tree:
    if size == 1:
        return Tree(Param(1))
    tail = Tree(Param(size))
    for j in range(size - 1, 0, -1):
        tail = Tree(comb, (Tree(Param(j)), tail))
    return tail


def nondeleting_nf(m: Mtt) -> NormalFormResult:
    """
    Regular look-ahead normal form without deleted parameters.

    The look-ahead relabeling annotates every node with the occurrence profiles
    of its children; state (q, I) of the core keeps exactly the parameters I.

    Returns:
        NormalFormResult with rho((q,I), j) = I(j)
    """
    table = occurrence_profiles(m)
    names = [table.profile_name(i) for i in range(len(table.profiles))]
    comb = Symbol(COMB_SYMBOL, 2)
    output = m.output_alphabet
    needs: Dict[str, bool] = {"comb": False, "bottom": False}

    relabeled: List[Symbol] = []
    brel_rules: Dict[Tuple[str, Tuple[str, ...]], Tuple[str, str]] = {}
    annotated: Dict[str, Tuple[Symbol, Tuple[int, ...]]] = {}
    for sym in m.input_alphabet:
        for combo in product(range(len(names)), repeat=sym.rank):
            label = sym.name if sym.rank == 0 else relabeled_name(sym.name, [names[i] for i in combo])
            relabeled.append(Symbol(label, sym.rank))
            annotated[label] = (sym, combo)
            brel_rules[(sym.name, tuple(names[i] for i in combo))] = (names[table.transitions[(sym.name, combo)]], label)
    sigma_prime = RankedAlphabet(tuple(relabeled))
    lookahead = Brel(f"B({m.name})", m.input_alphabet, sigma_prime, tuple(names), brel_rules)

    states: List[Tuple[str, int]] = []
    rho: ParamRenaming = {}
    for q, rank in m.states:
        for kept in _subsets(rank):
            name = state_name(q, kept)
            states.append((name, len(kept)))
            for j, original in enumerate(kept, start=1):
                rho[(name, j)] = original

    def theta(t: Tree, children) -> Tree:
        label = t.label
        if isinstance(label, Call):
            kept = sorted(children[label.var - 1].get(label.state))
            args = tuple(theta(t.children[j - 1], children) for j in kept)
            return Tree(Call(state_name(label.state, kept), label.var, len(kept)), args)
        return Tree(label, tuple(theta(c, children) for c in t.children))

    rules: Dict[Tuple[str, str], Tree] = {}
    for label, (sym, combo) in annotated.items():
        children = tuple(table.profiles[i] for i in combo)
        result = table.profiles[table.transitions[(sym.name, combo)]]
        for q, rank in m.states:
            main = tuple(sorted(result.get(q)))
            for kept in _subsets(rank):
                if kept == main:
                    body = theta(m.rhs(q, sym.name), children)
                    renumber = {Param(original): Tree(Param(j)) for j, original in enumerate(kept, start=1)}
                    body = _rename_params(body, renumber)
                elif not kept:
                    needs["bottom"] = True
                    body = None
                else:
                    needs["comb"] = needs["comb"] or len(kept) > 1
                    body = _comb(len(kept), comb)
                rules[(state_name(q, kept), label)] = body

    if needs["comb"]:
        output = output.extended(comb)
    if needs["bottom"]:
        output, bot = bottom_symbol(output)
        for key, body in rules.items():
            if body is None:
                rules[key] = Tree(bot)
    core = Mtt(f"ND({m.name})", sigma_prime, output, tuple(states), state_name(m.initial, ()), rules)
    core = trim_unreachable_states(core)
    kept_states = set(core.state_names)
    rho = {key: value for key, value in rho.items() if key[0] in kept_states}
    logger.info("nondeleting normal form of %s: %d profiles, %d core states",
                m.name, len(names), len(core.states))
    return NormalFormResult(lookahead, core, rho)


def _rename_params(t: Tree, mapping: Mapping[Param, Tree]) -> Tree:
    if isinstance(t.label, Param):
        return mapping.get(t.label, t)
    if not t.children:
        return t
    return Tree(t.label, tuple(_rename_params(c, mapping) for c in t.children))


# ===== Nonerasing normal form =====

def _set_name(states: Sequence[str], members: FrozenSet[str]) -> str:
    return "{" + ",".join(q for q in states if q in members) + "}"


def nonerasing_nf(m: Mtt, erase_symbol: str = ERASE_SYMBOL) -> NormalFormResult:
    """
    Regular look-ahead normal form in which no rule body is a bare parameter.

    The look-ahead state of a node is the set of rank-1 states that erase on it;
    calls to such states are replaced by their argument.

    Raises:
        PreconditionError: m deletes a parameter
    """
    if not is_nondeleting(m):
        raise PreconditionError(f"nonerasing_nf requires a nondeleting MTT; {m.name} deletes parameters")
    unary = [q for q, rank in m.states if rank == 1]
    y1 = Tree(Param(1))

    def theta(t: Tree, children: Sequence[FrozenSet[str]]) -> Tree:
        label = t.label
        if isinstance(label, Call) and label.state in children[label.var - 1]:
            return theta(t.children[0], children)
        return Tree(label, tuple(theta(c, children) for c in t.children))

    known: List[FrozenSet[str]] = []
    transitions: Dict[Tuple[str, Tuple[int, ...]], int] = {}
    while True:
        snapshot = len(known)
        for sym in m.input_alphabet:
            for combo in product(range(snapshot), repeat=sym.rank):
                if (sym.name, combo) in transitions:
                    continue
                children = [known[i] for i in combo]
                erasing = frozenset(q for q in unary if theta(m.rhs(q, sym.name), children) == y1)
                if erasing not in known:
                    known.append(erasing)
                transitions[(sym.name, combo)] = known.index(erasing)
        if len(known) == snapshot:
            break

    names = [_set_name(m.state_names, p) for p in known]
    relabeled: List[Symbol] = []
    brel_rules: Dict[Tuple[str, Tuple[str, ...]], Tuple[str, str]] = {}
    rules: Dict[Tuple[str, str], Tree] = {}
    output = m.output_alphabet
    erase = Symbol(erase_symbol, 1)
    for sym in m.input_alphabet:
        for combo in product(range(len(known)), repeat=sym.rank):
            label = sym.name if sym.rank == 0 else relabeled_name(sym.name, [names[i] for i in combo])
            relabeled.append(Symbol(label, sym.rank))
            brel_rules[(sym.name, tuple(names[i] for i in combo))] = (names[transitions[(sym.name, combo)]], label)
            children = [known[i] for i in combo]
            for q in m.state_names:
                body = theta(m.rhs(q, sym.name), children)
                if body == y1:
                    output = output.extended(erase)
                    body = Tree(erase, (y1,))
                rules[(q, label)] = body
    sigma_m = RankedAlphabet(tuple(relabeled))
    lookahead = Brel(f"BE({m.name})", m.input_alphabet, sigma_m, tuple(names), brel_rules)
    core = Mtt(f"NE({m.name})", sigma_m, output, m.states, m.initial, rules)
    core = trim_unreachable_states(core)
    logger.info("nonerasing normal form of %s: %d look-ahead states", m.name, len(known))
    return NormalFormResult(lookahead, core)


# ===== Product =====

def trel_mtt_product(e: Trel, m: Mtt) -> Mtt:
    """
    MTT equivalent to running the relabeling e and then m.

    State r.q on a node behaves like q on the node relabeled from state r.

    Raises:
        AlphabetMismatchError: e's output alphabet is not m's input alphabet
    """
    if not e.output_alphabet.same_symbols(m.input_alphabet):
        raise AlphabetMismatchError(f"{e.name} outputs {e.output_alphabet}, {m.name} reads {m.input_alphabet}")
    states = tuple((product_state(r, q), rank) for r in e.states for q, rank in m.states)
    rules: Dict[Tuple[str, str], Tree] = {}
    for r in e.states:
        for sym in e.input_alphabet:
            relabeled, child_states = e.rules[(r, sym.name)]
            for q in m.state_names:
                rules[(product_state(r, q), sym.name)] = rename_calls(
                    m.rhs(q, relabeled),
                    lambda c, cs=child_states: Call(product_state(cs[c.var - 1], c.state), c.var, c.rank),
                )
    result = Mtt(f"{e.name}x{m.name}", e.input_alphabet, m.output_alphabet, states,
                 product_state(e.initial, m.initial), rules)
    return trim_unreachable_states(result)
