"""
Ranked alphabets, trees, node addressing, substitution and bounded enumeration
"""
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .errors import AlphabetMismatchError, ArityError, InvalidPathError, UnknownSymbolError

Path = Tuple[int, ...]
ROOT: Path = ()

_BARE_NAME = re.compile(r"(?:[A-Za-z0-9_#$'+]|-(?!>))+\Z")
_RESERVED_NAME = re.compile(r"(?:[xy]\d+|pi)\Z")
KEYWORDS = frozenset({
    "mtt", "att", "brel", "trel", "input", "output", "states", "initial", "rule",
    "syn", "inh", "root", "at", "pi",
})


# ===== Node labels =====

@dataclass(frozen=True, order=True)
class Symbol:
    """A ranked symbol of some alphabet."""
    name: str
    rank: int = 0

    def __post_init__(self):
        if not self.name:
            raise ValueError("symbol name must be non-empty")
        if self.rank < 0:
            raise ValueError(f"negative rank for {self.name!r}")

    def __str__(self) -> str:
        return quote_name(self.name)


@dataclass(frozen=True, order=True)
class Param:
    """Parameter leaf y_index."""
    index: int

    @property
    def rank(self) -> int:
        return 0

    def __str__(self) -> str:
        return f"y{self.index}"


@dataclass(frozen=True, order=True)
class Call:
    """State-call label <state, x_var>; var 0 is the context hole x."""
    state: str
    var: int
    rank: int = 0

    def __str__(self) -> str:
        variable = "x" if self.var == 0 else f"x{self.var}"
        return f"{quote_name(self.state)}[{variable}]"


@dataclass(frozen=True, order=True)
class AttrRef:
    """Attribute occurrence attr(pi child); child 0 denotes the current node."""
    attr: str
    child: int = 0

    @property
    def rank(self) -> int:
        return 0

    def __str__(self) -> str:
        where = "pi" if self.child == 0 else f"pi {self.child}"
        return f"{quote_name(self.attr)}({where})"


Label = Union[Symbol, Param, Call, AttrRef]

# fresh rank-0 input symbol standing for the context hole of s[u <- x]
HOLE = Symbol("@x", 0)


def quote_name(name: str) -> str:
    """Return name as it must be written in the concrete syntax."""
    if _BARE_NAME.match(name) and not _RESERVED_NAME.match(name) and name not in KEYWORDS:
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


# ===== Trees =====

@dataclass(frozen=True)
class Tree:
    """Immutable ranked tree; the number of children always equals the label's rank."""
    label: Label
    children: Tuple["Tree", ...] = ()
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) != self.label.rank:
            raise ArityError(
                f"{self.label} has rank {self.label.rank} but got {len(self.children)} children"
            )
        object.__setattr__(self, "_hash", hash((self.label, self.children)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return format_tree(self)

    @property
    def size(self) -> int:
        return sum(1 for _ in self.iter_nodes())

    def iter_nodes(self) -> Iterator[Tuple[Path, "Tree"]]:
        """Yield (path, subtree) pairs in preorder."""
        stack: List[Tuple[Path, Tree]] = [(ROOT, self)]
        while stack:
            path, current = stack.pop()
            yield path, current
            for i in range(len(current.children), 0, -1):
                stack.append((path + (i,), current.children[i - 1]))

    def labels(self) -> Iterator[Label]:
        for _, sub in self.iter_nodes():
            yield sub.label


def leaf(name: str) -> Tree:
    return Tree(Symbol(name, 0))


def node(name: str, *children: Tree) -> Tree:
    return Tree(Symbol(name, len(children)), children)


def param(index: int) -> Tree:
    return Tree(Param(index))


def format_tree(t: Tree) -> str:
    """Render a tree in the `name(t1,...,tk)` concrete syntax."""
    head = str(t.label)
    if not t.children:
        return head
    return head + "(" + ",".join(format_tree(c) for c in t.children) + ")"


# ===== Ranked alphabets =====

@dataclass(frozen=True)
class RankedAlphabet:
    """Symbols in declaration order; names are unique."""
    symbols: Tuple[Symbol, ...] = ()
    _by_name: Dict[str, Symbol] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        index: Dict[str, Symbol] = {}
        for sym in self.symbols:
            if sym.name in index:
                raise AlphabetMismatchError(f"symbol {sym.name!r} declared twice")
            index[sym.name] = sym
        object.__setattr__(self, "_by_name", index)

    @classmethod
    def of(cls, *pairs: Tuple[str, int]) -> "RankedAlphabet":
        return cls(tuple(Symbol(name, rank) for name, rank in pairs))

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Symbol):
            return self._by_name.get(item.name) == item
        return item in self._by_name

    def get(self, name: str) -> Symbol:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownSymbolError(f"unknown symbol {name!r}") from None

    def index(self, name: str) -> int:
        return self.symbols.index(self.get(name))

    def of_rank(self, rank: int) -> List[Symbol]:
        return [s for s in self.symbols if s.rank == rank]

    def first_nullary(self) -> Optional[Symbol]:
        nullary = self.of_rank(0)
        return nullary[0] if nullary else None

    def names(self) -> List[str]:
        return [s.name for s in self.symbols]

    def same_symbols(self, other: "RankedAlphabet") -> bool:
        return set(self.symbols) == set(other.symbols)

    def extended(self, *extra: Symbol) -> "RankedAlphabet":
        """Return a new alphabet with the extra symbols appended (existing ones kept)."""
        seen = dict(self._by_name)
        symbols = list(self.symbols)
        for sym in extra:
            known = seen.get(sym.name)
            if known is not None:
                if known.rank != sym.rank:
                    raise AlphabetMismatchError(
                        f"symbol {sym.name!r} has rank {known.rank}, not {sym.rank}"
                    )
                continue
            seen[sym.name] = sym
            symbols.append(sym)
        return RankedAlphabet(tuple(symbols))

    def union(self, other: "RankedAlphabet") -> "RankedAlphabet":
        return self.extended(*other.symbols)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{s}/{s.rank}" for s in self.symbols) + "}"


def check_tree(t: Tree, alphabet: RankedAlphabet) -> None:
    """
    Verify that every label of t is a symbol of the alphabet with the declared rank.

    Raises:
        UnknownSymbolError: A label is not declared
        ArityError: A label is declared with another rank
    """
    for _, sub in t.iter_nodes():
        label = sub.label
        if not isinstance(label, Symbol) or label.name not in alphabet:
            raise UnknownSymbolError(f"unknown symbol {label}")
        declared = alphabet.get(label.name)
        if declared.rank != label.rank:
            raise ArityError(f"{label.name} has rank {declared.rank}, used with {label.rank} children")


# ===== Node addressing =====

def node_set(t: Tree) -> List[Path]:
    """All node paths of t in preorder (the root is the empty path)."""
    return [path for path, _ in t.iter_nodes()]


def subtree(t: Tree, u: Path) -> Tree:
    current = t
    for step in u:
        if not 1 <= step <= len(current.children):
            raise InvalidPathError(f"path {format_path(u)} is not a node of {t}")
        current = current.children[step - 1]
    return current


def replace_subtree(t: Tree, u: Path, s: Tree) -> Tree:
    if not u:
        return s
    step = u[0]
    if not 1 <= step <= len(t.children):
        raise InvalidPathError(f"path {format_path(u)} is not a node of {t}")
    children = list(t.children)
    children[step - 1] = replace_subtree(children[step - 1], u[1:], s)
    return Tree(t.label, tuple(children))


def format_path(u: Path) -> str:
    return ".".join(str(i) for i in u) if u else "eps"


def parse_path(text: str) -> Path:
    text = text.strip()
    if text in ("", "eps", "ε"):
        return ROOT
    try:
        steps = tuple(int(part) for part in re.split(r"[.·]", text))
    except ValueError:
        raise InvalidPathError(f"malformed path {text!r}") from None
    if any(step < 1 for step in steps):
        raise InvalidPathError(f"path steps are 1-based: {text!r}")
    return steps


# ===== Substitution =====

def subst_leaves(t: Tree, sub: Mapping[Label, Tree]) -> Tree:
    """Simultaneously replace every leaf whose label is a key of sub."""
    if not sub:
        return t
    for key in sub:
        if key.rank != 0:
            raise ArityError(f"leaf substitution key {key} has rank {key.rank}")
    return _subst_leaves(t, sub)


def _subst_leaves(t: Tree, sub: Mapping[Label, Tree]) -> Tree:
    if not t.children:
        return sub.get(t.label, t)
    return Tree(t.label, tuple(_subst_leaves(c, sub) for c in t.children))


def subst_params(t: Tree, args: Tuple[Tree, ...]) -> Tree:
    """t[y_j <- args[j-1]]."""
    if not args:
        return t
    return _subst_leaves(t, {Param(j + 1): a for j, a in enumerate(args)})


def subst_second_order(t: Tree, sub: Mapping[Label, Tree]) -> Tree:
    """
    Second-order substitution t[[sigma_i <- t_i]].

    Each subtree sigma(s_1,...,s_m) with sigma a key becomes sub[sigma][y_j <- s_j'],
    where s_j' is the substituted s_j.
    """
    if not sub:
        return t
    return _subst_second_order(t, sub)


def _subst_second_order(t: Tree, sub: Mapping[Label, Tree]) -> Tree:
    children = tuple(_subst_second_order(c, sub) for c in t.children)
    replacement = sub.get(t.label)
    if replacement is None:
        return Tree(t.label, children)
    return subst_params(replacement, children)


def map_labels(t: Tree, fn: Callable[[Tree, Tuple[Tree, ...]], Tree]) -> Tree:
    """Bottom-up rebuild: fn receives the original node and its rebuilt children."""
    return fn(t, tuple(map_labels(c, fn) for c in t.children))


# ===== Enumeration =====

def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def trees_of_size(alphabet: RankedAlphabet, size: int,
                  cache: Optional[Dict[int, List[Tree]]] = None) -> List[Tree]:
    """All trees with exactly `size` nodes, ordered by preorder declaration index."""
    cache = {} if cache is None else cache
    if size in cache:
        return cache[size]
    order = {s.name: i for i, s in enumerate(alphabet.symbols)}
    found: List[Tree] = []
    for sym in alphabet.symbols:
        if sym.rank == 0:
            if size == 1:
                found.append(Tree(sym))
            continue
        for sizes in _compositions(size - 1, sym.rank):
            pools = [trees_of_size(alphabet, s, cache) for s in sizes]
            for combo in product(*pools):
                found.append(Tree(sym, combo))
    found.sort(key=lambda tree: tuple(order[lab.name] for lab in tree.labels()))
    cache[size] = found
    return found


def enumerate_trees(alphabet: RankedAlphabet, max_size: int) -> Iterator[Tree]:
    """
    Yield every tree with at most max_size nodes exactly once.

    Order is by size, then lexicographically by the preorder sequence of symbol
    declaration indices.

    Raises:
        UnknownSymbolError: If the alphabet has no rank-0 symbol
    """
    if not alphabet.of_rank(0):
        raise UnknownSymbolError("alphabet has no nullary symbol; its tree language is empty")
    cache: Dict[int, List[Tree]] = {}
    for size in range(1, max_size + 1):
        yield from trees_of_size(alphabet, size, cache)


def count_trees(alphabet: RankedAlphabet, size: int) -> int:
    """Number of trees with exactly `size` nodes, by independent recursion on counts."""
    counts: Dict[int, int] = {}

    def count(n: int) -> int:
        if n in counts:
            return counts[n]
        total = 0
        for sym in alphabet.symbols:
            if sym.rank == 0:
                total += 1 if n == 1 else 0
                continue
            for sizes in _compositions(n - 1, sym.rank):
                ways = 1
                for s in sizes:
                    ways *= count(s)
                total += ways
        counts[n] = total
        return total

    return count(size)


def collect(t: Tree, predicate: Callable[[Label], bool]) -> Iterable[Tuple[Path, Tree]]:
    return [(p, s) for p, s in t.iter_nodes() if predicate(s.label)]
