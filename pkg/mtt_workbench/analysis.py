"""
Static analyses on MTTs: occurrence profiles, importance, Top, consistency,
the FV property with a parameter renaming, and permanence
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from .errors import InvalidPathError, PreconditionError
from .mtt import Mtt, is_nondeleting, state_calls
from .trees import AttrRef, Call, Param, Path, Symbol, Tree, format_path, subtree

logger = logging.getLogger(__name__)

ParamRenaming = Dict[Tuple[str, int], int]


# ===== Occurrence profiles =====

@dataclass(frozen=True)
class OccurrenceProfile:
    """For each state of positive rank, the parameters that survive in its output."""
    assignment: Tuple[Tuple[str, FrozenSet[int]], ...]

    def get(self, q: str) -> FrozenSet[int]:
        for state, params in self.assignment:
            if state == q:
                return params
        return frozenset()

    def __str__(self) -> str:
        parts = []
        for q, params in self.assignment:
            inner = ",".join(str(j) for j in sorted(params))
            parts.append(f"{q}:{{{inner}}}")
        return "{" + ", ".join(parts) + "}"


@dataclass
class ProfileTable:
    """Reachable profiles in discovery order plus the transition function h."""
    profiles: List[OccurrenceProfile] = field(default_factory=list)
    transitions: Dict[Tuple[str, Tuple[int, ...]], int] = field(default_factory=dict)

    @staticmethod
    def profile_name(index: int) -> str:
        return f"p{index + 1}"

    def index_of(self, profile: OccurrenceProfile) -> int:
        return self.profiles.index(profile)


def oc(t: Tree, children: Tuple[OccurrenceProfile, ...]) -> FrozenSet[int]:
    """Parameters occurring in t once every state call is evaluated on the given child profiles."""
    label = t.label
    if isinstance(label, Param):
        return frozenset({label.index})
    if isinstance(label, Call):
        kept = children[label.var - 1].get(label.state)
        found: Set[int] = set()
        for j in kept:
            found |= oc(t.children[j - 1], children)
        return frozenset(found)
    found = set()
    for c in t.children:
        found |= oc(c, children)
    return frozenset(found)


def _profile_for(m: Mtt, sym: Symbol, children: Tuple[OccurrenceProfile, ...]) -> OccurrenceProfile:
    return OccurrenceProfile(tuple(
        (q, oc(m.rhs(q, sym.name), children)) for q, rank in m.states if rank > 0
    ))


def occurrence_profiles(m: Mtt) -> ProfileTable:
    """
    Least set of reachable occurrence profiles, discovered round by round with
    input symbols in declaration order.

    Returns:
        ProfileTable whose transitions cover every (symbol, child profiles) tuple
    """
    table = ProfileTable()
    known: Dict[OccurrenceProfile, int] = {}
    rounds = 0
    while True:
        rounds += 1
        snapshot = len(table.profiles)
        for sym in m.input_alphabet:
            for combo in product(range(snapshot), repeat=sym.rank):
                if (sym.name, combo) in table.transitions:
                    continue
                profile = _profile_for(m, sym, tuple(table.profiles[i] for i in combo))
                if profile not in known:
                    known[profile] = len(table.profiles)
                    table.profiles.append(profile)
                table.transitions[(sym.name, combo)] = known[profile]
        if len(table.profiles) == snapshot:
            break
    logger.debug("%s: %d occurrence profiles after %d rounds", m.name, len(table.profiles), rounds)
    return table


# ===== Importance =====

def _requirements(zeta: Tree, v: Path) -> Dict[int, Set[Tuple[str, int]]]:
    required: Dict[int, Set[Tuple[str, int]]] = defaultdict(set)
    current = zeta
    for step in v:
        if not 1 <= step <= len(current.children):
            raise InvalidPathError(f"path {format_path(v)} is not a node of {zeta}")
        if isinstance(current.label, Call):
            required[current.label.var].add((current.label.state, step))
        current = current.children[step - 1]
    return required


def _important_in(zeta: Tree, v: Path, table: ProfileTable) -> bool:
    for reqs in _requirements(zeta, v).values():
        if not any(all(j in prof.get(p) for p, j in reqs) for prof in table.profiles):
            return False
    return True


def is_important(m: Mtt, q: str, sigma: str, v: Path, table: Optional[ProfileTable] = None) -> bool:
    """
    Decide whether node v of rhs(q, sigma) survives for some choice of input subtrees.

    Each child subtree is chosen independently, so it suffices that for every
    input variable some reachable profile keeps every argument position on the
    path from the root of the rhs to v.

    Raises:
        InvalidPathError: v is not a node of the rhs
    """
    table = table or occurrence_profiles(m)
    return _important_in(m.rhs(q, sigma), v, table)


def important_nodes(m: Mtt, q: str, sigma: str, table: Optional[ProfileTable] = None) -> Set[Path]:
    table = table or occurrence_profiles(m)
    zeta = m.rhs(q, sigma)
    return {v for v, _ in zeta.iter_nodes() if _important_in(zeta, v, table)}


# ===== Top =====

def _y_attr(j: int) -> str:
    return f"y{j}"


def top(zeta: Tree, param_attr: Callable[[int], str] = _y_attr) -> Tree:
    """
    Truncate a rhs at its outermost state calls.

    <q',x_i>(...) becomes q'(pi i), y_j becomes param_attr(j)(pi), output symbols are kept.
    """
    label = zeta.label
    if isinstance(label, Call):
        return Tree(AttrRef(label.state, label.var))
    if isinstance(label, Param):
        return Tree(AttrRef(param_attr(label.index), 0))
    return Tree(label, tuple(top(c, param_attr) for c in zeta.children))


# ===== Consistency =====

@dataclass
class ConsistencyViolation:
    symbol: str
    state1: str
    state2: str
    node1: Path
    node2: Path
    index: int
    top1: Tree
    top2: Tree

    def __str__(self) -> str:
        return (
            f"at {self.symbol}: {self.state1}@{format_path(self.node1)} vs "
            f"{self.state2}@{format_path(self.node2)}, argument {self.index}: {self.top1} != {self.top2}"
        )


@dataclass
class ConsistencyResult:
    consistent: bool
    violation: Optional[ConsistencyViolation] = None


def _ordered_pairs(states: List[str]) -> Iterable[Tuple[str, str]]:
    for i, q1 in enumerate(states):
        for q2 in states[i:]:
            yield q1, q2


def is_consistent(m: Mtt, table: Optional[ProfileTable] = None) -> ConsistencyResult:
    """
    Check that co-indexed state calls have equal Tops at shared important arguments.

    Returns:
        ConsistencyResult with the first violation in declaration order
    """
    table = table or occurrence_profiles(m)
    states = m.state_names
    for sym in m.input_alphabet:
        important = {q: important_nodes(m, q, sym.name, table) for q in states}
        for q1, q2 in _ordered_pairs(states):
            zeta1, zeta2 = m.rhs(q1, sym.name), m.rhs(q2, sym.name)
            for w1, c1 in state_calls(zeta1):
                for w2, c2 in state_calls(zeta2):
                    if c1.var != c2.var or (q1 == q2 and w1 >= w2):
                        continue
                    for j in range(1, min(c1.rank, c2.rank) + 1):
                        v1, v2 = w1 + (j,), w2 + (j,)
                        if v1 not in important[q1] or v2 not in important[q2]:
                            continue
                        t1, t2 = top(subtree(zeta1, v1)), top(subtree(zeta2, v2))
                        if t1 != t2:
                            return ConsistencyResult(
                                False, ConsistencyViolation(sym.name, q1, q2, w1, w2, j, t1, t2)
                            )
    return ConsistencyResult(True)


# ===== FV property =====

def validate_rho(m: Mtt, rho: Mapping[Tuple[str, int], int]) -> None:
    """
    Raises:
        PreconditionError: rho is undefined somewhere or not injective per state
    """
    for q, rank in m.states:
        values = []
        for j in range(1, rank + 1):
            if (q, j) not in rho:
                raise PreconditionError(f"renaming undefined for ({q},{j})")
            if rho[(q, j)] < 1:
                raise PreconditionError(f"renaming of ({q},{j}) must be positive")
            values.append(rho[(q, j)])
        if len(set(values)) != len(values):
            raise PreconditionError(f"renaming is not injective on state {q}")


def psi(t: Tree, q: str, rho: Mapping[Tuple[str, int], int]) -> Tree:
    """Rename every y_j in t to y_rho(q,j)."""
    label = t.label
    if isinstance(label, Param):
        return Tree(Param(rho[(q, label.index)]))
    if not t.children:
        return t
    return Tree(label, tuple(psi(c, q, rho) for c in t.children))


@dataclass
class FvViolation:
    symbol: str
    state1: str
    state2: str
    node1: Path
    node2: Path
    arg1: int
    arg2: int
    left: Tree
    right: Tree

    def __str__(self) -> str:
        return (
            f"at {self.symbol}: {self.state1}@{format_path(self.node1)}/{self.arg1} vs "
            f"{self.state2}@{format_path(self.node2)}/{self.arg2}: {self.left} != {self.right}"
        )


@dataclass
class FvResult:
    ok: bool
    violation: Optional[FvViolation] = None


@dataclass
class _Constraint:
    symbol: str
    state1: str
    state2: str
    node1: Path
    node2: Path
    key1: Tuple[str, int]
    key2: Tuple[str, int]
    sub1: Tree
    sub2: Tree
    needs: FrozenSet[Tuple[str, int]]

    def holds(self, rho: Mapping[Tuple[str, int], int]) -> bool:
        if rho[self.key1] != rho[self.key2]:
            return True
        return psi(self.sub1, self.state1, rho) == psi(self.sub2, self.state2, rho)

    def violation(self, rho: Mapping[Tuple[str, int], int]) -> FvViolation:
        return FvViolation(
            self.symbol, self.state1, self.state2, self.node1, self.node2,
            self.key1[1], self.key2[1],
            psi(self.sub1, self.state1, rho), psi(self.sub2, self.state2, rho),
        )


def _fv_constraints(m: Mtt) -> List[_Constraint]:
    constraints: List[_Constraint] = []
    states = m.state_names
    for sym in m.input_alphabet:
        for q1, q2 in _ordered_pairs(states):
            zeta1, zeta2 = m.rhs(q1, sym.name), m.rhs(q2, sym.name)
            for w1, c1 in state_calls(zeta1):
                for w2, c2 in state_calls(zeta2):
                    if c1.var != c2.var or (q1 == q2 and w1 >= w2):
                        continue
                    xi1, xi2 = subtree(zeta1, w1), subtree(zeta2, w2)
                    for j1 in range(1, c1.rank + 1):
                        for j2 in range(1, c2.rank + 1):
                            sub1, sub2 = xi1.children[j1 - 1], xi2.children[j2 - 1]
                            needs = {(c1.state, j1), (c2.state, j2)}
                            needs |= {(q1, l) for l in _params(sub1)}
                            needs |= {(q2, l) for l in _params(sub2)}
                            constraints.append(_Constraint(
                                sym.name, q1, q2, w1, w2, (c1.state, j1), (c2.state, j2),
                                sub1, sub2, frozenset(needs),
                            ))
    return constraints


def _params(t: Tree) -> Set[int]:
    return {lab.index for lab in t.labels() if isinstance(lab, Param)}


def _require_nondeleting(m: Mtt, operation: str) -> None:
    if not is_nondeleting(m):
        raise PreconditionError(f"{operation} requires a nondeleting MTT; {m.name} deletes parameters")


def check_fv(m: Mtt, rho: Mapping[Tuple[str, int], int]) -> FvResult:
    """
    Check the FV property of a nondeleting MTT with the renaming rho.

    Raises:
        PreconditionError: m deletes a parameter, or rho is not a valid renaming
    """
    _require_nondeleting(m, "check_fv")
    validate_rho(m, rho)
    for constraint in _fv_constraints(m):
        if not constraint.holds(rho):
            return FvResult(False, constraint.violation(rho))
    return FvResult(True)


def find_rho(m: Mtt) -> Optional[ParamRenaming]:
    """
    Search a parameter renaming under which m has the FV property.

    Backtracking over (state, index) pairs in declaration order, trying the
    smallest admissible value first; a constraint is checked as soon as all the
    pairs it mentions are assigned. Values never exceed the sum of state ranks.

    Returns:
        The canonical renaming, or None when none exists

    Raises:
        PreconditionError: m deletes a parameter
    """
    _require_nondeleting(m, "find_rho")
    variables = [(q, j) for q, rank in m.states for j in range(1, rank + 1)]
    if not variables:
        return {}
    cap = len(variables)
    position = {v: i for i, v in enumerate(variables)}
    due: Dict[int, List[_Constraint]] = defaultdict(list)
    for constraint in _fv_constraints(m):
        due[max(position[v] for v in constraint.needs)].append(constraint)

    rho: ParamRenaming = {}
    steps = 0

    def assign(i: int, highest: int) -> bool:
        nonlocal steps
        if i == len(variables):
            return True
        q, _ = variables[i]
        taken = {rho[(q, l)] for l in range(1, variables[i][1])}
        for value in range(1, min(cap, highest + 1) + 1):
            if value in taken:
                continue
            steps += 1
            rho[variables[i]] = value
            if all(c.holds(rho) for c in due[i]) and assign(i + 1, max(highest, value)):
                return True
            del rho[variables[i]]
        return False

    found = assign(0, 0)
    logger.debug("%s: renaming search %s after %d assignments", m.name, "succeeded" if found else "failed", steps)
    return dict(rho) if found else None


# ===== Permanence =====

def is_permanent(m: Mtt, q: str, j: int, table: Optional[ProfileTable] = None) -> bool:
    """
    True iff the j-th argument of every call of q in any rhs is important.

    Raises:
        PreconditionError: j is not a parameter index of q
    """
    rank = m.rank_of(q)
    if not 1 <= j <= rank:
        raise PreconditionError(f"state {q} has rank {rank}; no parameter {j}")
    table = table or occurrence_profiles(m)
    for p, sym, zeta in m.iter_rules():
        for w, label in state_calls(zeta):
            if label.state == q and not _important_in(zeta, w + (j,), table):
                return False
    return True
