"""
Attributed tree transducers: rules, dependency graphs, circularity and evaluation
"""
import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx
import pydot

from .errors import CircularityError, TransducerError, UndefinedInheritedError
from .stage import Stage, ValidationReport
from .trees import ROOT, AttrRef, Path, RankedAlphabet, Symbol, Tree, check_tree, format_path

logger = logging.getLogger(__name__)

# (attribute, 0) for a synthesized lhs attr(pi); (attribute, i) for an inherited lhs attr(pi i)
RuleKey = Tuple[str, int]
Vertex = Tuple[str, Path]


@dataclass(frozen=True, eq=False)
class Att(Stage):
    """
    Attributed tree transducer with synthesized attributes `syn`, inherited
    attributes `inh` and output attribute `output_attr`.

    rules[sigma][(attr, i)] is the right-hand side over the output alphabet and
    AttrRef leaves: AttrRef(alpha, j) for alpha(pi j), AttrRef(beta, 0) for beta(pi).
    """
    name: str
    input_alphabet: RankedAlphabet
    output_alphabet: RankedAlphabet
    syn: Tuple[str, ...]
    inh: Tuple[str, ...]
    output_attr: str
    rules: Mapping[str, Mapping[RuleKey, Tree]] = field(default_factory=dict)

    kind = "att"

    def __post_init__(self):
        object.__setattr__(self, "syn", tuple(self.syn))
        object.__setattr__(self, "inh", tuple(self.inh))

    @property
    def attributes(self) -> Tuple[str, ...]:
        return self.syn + self.inh

    def is_syn(self, attr: str) -> bool:
        return attr in self.syn

    def rule(self, sigma: str, attr: str, i: int) -> Tree:
        try:
            return self.rules[sigma][(attr, i)]
        except KeyError:
            where = "pi" if i == 0 else f"pi {i}"
            raise TransducerError(f"{self.name}: no rule {attr}({where}) at {sigma}") from None

    def required_keys(self, sym: Symbol) -> List[RuleKey]:
        keys: List[RuleKey] = [(alpha, 0) for alpha in self.syn]
        keys += [(beta, i) for i in range(1, sym.rank + 1) for beta in self.inh]
        return keys

    def apply(self, s: Tree) -> Tree:
        return att_evaluate(self, s)


def validate_att(a: Att) -> ValidationReport:
    report = ValidationReport(f"att {a.name}")
    overlap = set(a.syn) & set(a.inh)
    if overlap:
        report.add(f"attributes both synthesized and inherited: {sorted(overlap)}")
    if a.output_attr not in a.syn:
        report.add(f"output attribute {a.output_attr} is not synthesized")
    for sym in a.input_alphabet:
        rules = a.rules.get(sym.name, {})
        for key in a.required_keys(sym):
            if key not in rules:
                attr, i = key
                report.add(f"missing rule {attr}({'pi' if i == 0 else f'pi {i}'}) at {sym.name}")
        for (attr, i), rhs in rules.items():
            if (attr, i) not in a.required_keys(sym):
                report.add(f"unexpected rule for ({attr},{i}) at {sym.name}")
                continue
            for _, sub in rhs.iter_nodes():
                label = sub.label
                if isinstance(label, AttrRef):
                    if label.attr in a.syn and 1 <= label.child <= sym.rank:
                        continue
                    if label.attr in a.inh and label.child == 0:
                        continue
                    report.add(f"at {sym.name}: illegal attribute occurrence {label}")
                elif isinstance(label, Symbol):
                    if label.name not in a.output_alphabet or a.output_alphabet.get(label.name).rank != label.rank:
                        report.add(f"at {sym.name}: bad output symbol {label.name}/{label.rank}")
                else:
                    report.add(f"at {sym.name}: unexpected node {label}")
    for sigma in a.rules:
        if sigma not in a.input_alphabet:
            report.add(f"rules for undeclared input symbol {sigma}")
    return report


# ===== Dependency graphs =====

@dataclass
class DependencyGraph:
    """D_A(s): vertices are (attribute, path) instances."""
    graph: nx.DiGraph
    syn: Tuple[str, ...]
    inh: Tuple[str, ...]

    @property
    def vertices(self) -> List[Vertex]:
        return list(self.graph.nodes)

    @property
    def edges(self) -> Set[Tuple[Vertex, Vertex]]:
        return set(self.graph.edges)


def att_dependency_graph(a: Att, s: Tree) -> DependencyGraph:
    """
    Build D_A(s). A reference attr(pi) in a rule at node u names the instance at u.

    Edges whose endpoints are outside the vertex set (instances at the root other
    than the output attribute) are not part of the graph.
    """
    check_tree(s, a.input_alphabet)
    g = nx.DiGraph()
    g.add_node((a.output_attr, ROOT), kind="syn")
    nodes = list(s.iter_nodes())
    for u, _ in nodes:
        if u == ROOT:
            continue
        for attr in a.syn:
            g.add_node((attr, u), kind="syn")
        for attr in a.inh:
            g.add_node((attr, u), kind="inh")
    for u, sub in nodes:
        for (gamma, i), rhs in a.rules.get(sub.label.name, {}).items():
            target = (gamma, u + (i,) if i else u)
            if target not in g:
                continue
            for label in rhs.labels():
                if isinstance(label, AttrRef):
                    source = (label.attr, u + (label.child,) if label.child else u)
                    if source in g:
                        g.add_edge(source, target)
    return DependencyGraph(g, a.syn, a.inh)


def shortest_cycle(g: nx.DiGraph) -> Optional[Tuple[Vertex, ...]]:
    """A shortest directed cycle, rotated to start at its earliest-inserted vertex."""
    order = {v: i for i, v in enumerate(g.nodes)}
    best: Optional[List[Vertex]] = None
    for component in nx.strongly_connected_components(g):
        members = sorted(component, key=order.__getitem__)
        for x in members:
            for y in sorted(g.successors(x), key=order.__getitem__):
                if y not in component:
                    continue
                cycle = [x] if x == y else nx.shortest_path(g, y, x)
                if best is None or len(cycle) < len(best):
                    best = cycle
    if best is None:
        return None
    start = min(range(len(best)), key=lambda i: order[best[i]])
    return tuple(best[start:] + best[:start])


@dataclass
class CircularityResult:
    circular: bool
    cycle: Optional[Tuple[Vertex, ...]] = None
    witness: Optional[Tree] = None


def att_is_circular_on(a: Att, s: Tree) -> CircularityResult:
    graph = att_dependency_graph(a, s)
    cycle = shortest_cycle(graph.graph)
    return CircularityResult(cycle is not None, cycle, s if cycle is not None else None)


def format_cycle(cycle: Sequence[Vertex]) -> str:
    closed = list(cycle) + [cycle[0]]
    return " -> ".join(f"({attr},{format_path(u)})" for attr, u in closed)


def _local_graph(a: Att, sym: Symbol, child_relations: Sequence[FrozenSet[Tuple[str, str]]]) -> nx.DiGraph:
    g = nx.DiGraph()
    for i in range(sym.rank + 1):
        for attr in a.attributes:
            g.add_node((attr, i))
    for (gamma, i), rhs in a.rules.get(sym.name, {}).items():
        for label in rhs.labels():
            if isinstance(label, AttrRef):
                g.add_edge((label.attr, label.child), (gamma, i))
    for i, relation in enumerate(child_relations, start=1):
        for beta, alpha in relation:
            g.add_edge((beta, i), (alpha, i))
    return g


def att_is_circular(a: Att) -> CircularityResult:
    """
    Global circularity test by the classical fixpoint over induced
    inherited-to-synthesized relations.

    Returns:
        CircularityResult; when circular, witness is an input tree whose
        dependency graph has a cycle and cycle is a shortest cycle on it
    """
    relations: List[FrozenSet[Tuple[str, str]]] = []
    witnesses: Dict[FrozenSet[Tuple[str, str]], Tree] = {}
    processed: Set[Tuple[str, Tuple[int, ...]]] = set()
    rounds = 0
    while True:
        rounds += 1
        snapshot = len(relations)
        for sym in a.input_alphabet:
            for combo in product(range(snapshot), repeat=sym.rank):
                if (sym.name, combo) in processed:
                    continue
                processed.add((sym.name, combo))
                chosen = [relations[i] for i in combo]
                local = _local_graph(a, sym, chosen)
                tree = Tree(sym, tuple(witnesses[r] for r in chosen))
                if not nx.is_directed_acyclic_graph(local):
                    logger.debug("%s: local cycle at %s after %d rounds", a.name, sym.name, rounds)
                    return CircularityResult(True, att_is_circular_on(a, tree).cycle, tree)
                induced = frozenset(
                    (beta, alpha)
                    for beta in a.inh for alpha in a.syn
                    if nx.has_path(local, (beta, 0), (alpha, 0))
                )
                if induced not in witnesses:
                    witnesses[induced] = tree
                    relations.append(induced)
        if len(relations) == snapshot:
            break
    logger.debug("%s: non-circular, %d induced relations", a.name, len(relations))
    return CircularityResult(False)


# ===== Evaluation =====

class AttEvaluator:
    """Demand-driven evaluation of attribute instances on one input tree."""

    def __init__(self, a: Att, s: Tree):
        self.a = a
        self.nodes: Dict[Path, Tree] = dict(s.iter_nodes())
        self._memo: Dict[Vertex, Tree] = {}
        self._stack: List[Vertex] = []
        self._active: Set[Vertex] = set()

    def instance(self, attr: str, u: Path) -> Tree:
        key = (attr, u)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        if key in self._active:
            cycle = tuple(self._stack[self._stack.index(key):])
            raise CircularityError(f"{self.a.name}: circular dependency {format_cycle(cycle)}", cycle)
        if self.a.is_syn(attr):
            base = u
            rhs = self.a.rule(self.nodes[u].label.name, attr, 0)
        else:
            if u == ROOT:
                raise UndefinedInheritedError(f"{self.a.name}: undefined inherited at root: {attr}")
            base = u[:-1]
            rhs = self.a.rule(self.nodes[base].label.name, attr, u[-1])
        self._active.add(key)
        self._stack.append(key)
        try:
            value = self._instantiate(rhs, base)
        finally:
            self._stack.pop()
            self._active.discard(key)
        self._memo[key] = value
        return value

    def _instantiate(self, t: Tree, base: Path) -> Tree:
        label = t.label
        if isinstance(label, AttrRef):
            return self.instance(label.attr, base + (label.child,) if label.child else base)
        if not t.children:
            return t
        return Tree(label, tuple(self._instantiate(c, base) for c in t.children))


def att_evaluate(a: Att, s: Tree) -> Tree:
    """
    Output of the ATT on s, i.e. the value of the output attribute at the root.

    Raises:
        CircularityError: An instance depends on itself on this input
        UndefinedInheritedError: An inherited attribute was demanded at the root
    """
    check_tree(s, a.input_alphabet)
    return AttEvaluator(a, s).instance(a.output_attr, ROOT)


# ===== DOT export =====

def att_dependency_dot(dg: DependencyGraph, name: str = "dependencies") -> pydot.Dot:
    """Synthesized instances are boxes, inherited ones ellipses."""
    graph = pydot.Dot(name, graph_type="digraph", rankdir="BT")
    ids: Dict[Vertex, str] = {}
    for i, (attr, u) in enumerate(dg.graph.nodes):
        ids[(attr, u)] = f"v{i}"
        shape = "box" if dg.graph.nodes[(attr, u)].get("kind") == "syn" else "ellipse"
        graph.add_node(pydot.Node(f"v{i}", label=f'"{attr}@{format_path(u)}"', shape=shape))
    for source, target in dg.graph.edges:
        graph.add_edge(pydot.Edge(ids[source], ids[target]))
    return graph
