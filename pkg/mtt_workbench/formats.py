"""
Concrete syntax for trees and transducer files (lark LALR grammars) and writers
"""
import re
from functools import lru_cache
from pathlib import Path as FsPath
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from .att import Att
from .errors import TransducerError, TreeSyntaxError, WorkbenchError
from .mtt import Mtt
from .relabel import Brel, Trel
from .trees import AttrRef, Call, Param, RankedAlphabet, Symbol, Tree, check_tree, format_tree, quote_name

# ===== Grammars =====

COMMON = r"""
    name: NAME | STRING
    symdecl: name "/" INT
    alphabet_in: "input" "{" symdecl* "}"
    alphabet_out: "output" "{" symdecl* "}"

    NAME: /(?:[A-Za-z0-9_#$'+]|-(?!>))+/
    STRING: /"(\\.|[^"\\])*"/
    INT: /[0-9]+/
    COMMENT: /\/\/[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

TREE_GRAMMAR = r"""
    start: tree
    tree: name ("(" tree ("," tree)* ")")?
""" + COMMON

MTT_GRAMMAR = r"""
    start: "mtt" name "{" mtt_section* "}"
    ?mtt_section: alphabet_in | alphabet_out | states | initial | rule
    states: "states" "{" symdecl* "}"
    initial: "initial" name
    rule: "rule" name name xvars? yvars? "->" rhs
    xvars: "(" ")" | "(" XVAR ("," XVAR)* ")"
    yvars: "(" YVAR ("," YVAR)* ")"
    rhs: YVAR                       -> param
       | name "[" XVAR "]" args?    -> call
       | name args?                 -> out
    args: "(" rhs ("," rhs)* ")"

    XVAR.2: /x[0-9]+(?![A-Za-z0-9_#$'+]|-(?!>))/
    YVAR.2: /y[0-9]+(?![A-Za-z0-9_#$'+]|-(?!>))/
""" + COMMON

ATT_GRAMMAR = r"""
    start: "att" name "{" att_section* "}"
    ?att_section: alphabet_in | alphabet_out | syn | inh | root | at
    syn: "syn" "{" name* "}"
    inh: "inh" "{" name* "}"
    root: "root" name
    at: "at" name "/" INT "{" arule* "}"
    arule: name "(" "pi" INT? ")" "->" arhs ";"?
    arhs: name "(" "pi" INT? ")"    -> aref
        | name aargs?               -> aout
    aargs: "(" arhs ("," arhs)* ")"
""" + COMMON

BREL_GRAMMAR = r"""
    start: "brel" name? "{" brel_section* "}"
    ?brel_section: alphabet_in | alphabet_out | plain_states | brule
    plain_states: "states" "{" name* "}"
    brule: "rule" name names? "->" name ":" name
    names: "(" ")" | "(" name ("," name)* ")"
""" + COMMON

TREL_GRAMMAR = r"""
    start: "trel" name? "{" trel_section* "}"
    ?trel_section: alphabet_in | alphabet_out | plain_states | initial | trule
    plain_states: "states" "{" name* "}"
    initial: "initial" name
    trule: "rule" name name "->" name names?
    names: "(" ")" | "(" name ("," name)* ")"
""" + COMMON

RHO_GRAMMAR = r"""
    start: entry*
    entry: name INT "->" INT
""" + COMMON

_GRAMMARS = {
    "tree": TREE_GRAMMAR,
    "mtt": MTT_GRAMMAR,
    "att": ATT_GRAMMAR,
    "brel": BREL_GRAMMAR,
    "trel": TREL_GRAMMAR,
    "rho": RHO_GRAMMAR,
}


@lru_cache(maxsize=None)
def _parser(kind: str) -> Lark:
    return Lark(_GRAMMARS[kind], parser="lalr")


def _unescape(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text[1:-1])


def _parse(kind: str, text: str, transformer: Transformer):
    try:
        tree = _parser(kind).parse(text)
    except UnexpectedInput as exc:
        raise TreeSyntaxError(f"{kind} syntax error: {_describe(exc)}", exc.line, exc.column) from None
    try:
        return transformer.transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, WorkbenchError):
            raise exc.orig_exc from None
        raise


def _describe(exc: UnexpectedInput) -> str:
    token = getattr(exc, "token", None)
    if token is not None:
        return f"unexpected {token!r}"
    char = getattr(exc, "char", None)
    if char is not None:
        return f"unexpected character {char!r}"
    return "unexpected end of input"


# ===== Transformers =====

class _Common(Transformer):
    def name(self, children):
        token = children[0]
        return _unescape(str(token)) if token.type == "STRING" else str(token)

    def symdecl(self, children):
        return Symbol(children[0], int(children[1]))

    def alphabet_in(self, children):
        return ("input", RankedAlphabet(tuple(children)))

    def alphabet_out(self, children):
        return ("output", RankedAlphabet(tuple(children)))

    def initial(self, children):
        return ("initial", children[0])

    def plain_states(self, children):
        return ("states", tuple(children))

    def names(self, children):
        return tuple(children)


class _TreeBuilder(_Common):
    def tree(self, children):
        return Tree(Symbol(children[0], len(children) - 1), tuple(children[1:]))

    def start(self, children):
        return children[0]


def _sections(items, kind: str) -> Dict[str, object]:
    found: Dict[str, object] = {}
    for item in items:
        key = item[0]
        if key in ("rule", "at"):
            continue
        if key in found:
            raise TransducerError(f"{kind}: section {key!r} given twice")
        found[key] = item[1]
    for required in ("input", "output"):
        if required not in found:
            raise TransducerError(f"{kind}: missing {required} section")
    return found


class _MttBuilder(_Common):
    def states(self, children):
        return ("states", tuple((s.name, s.rank) for s in children))

    def xvars(self, children):
        return ("x", [int(str(t)[1:]) for t in children])

    def yvars(self, children):
        return ("y", [int(str(t)[1:]) for t in children])

    def args(self, children):
        return tuple(children)

    def param(self, children):
        return Tree(Param(int(str(children[0])[1:])))

    def call(self, children):
        state, var = children[0], int(str(children[1])[1:])
        args = children[2] if len(children) > 2 else ()
        return Tree(Call(state, var, len(args)), args)

    def out(self, children):
        args = children[1] if len(children) > 1 else ()
        return Tree(Symbol(children[0], len(args)), args)

    def rule(self, children):
        state, sigma = children[0], children[1]
        lists = {tag: values for tag, values in children[2:-1]}
        return ("rule", (state, sigma, lists.get("x", []), lists.get("y", []), children[-1]))

    def start(self, children):
        name, items = children[0], children[1:]
        found = _sections(items, "mtt")
        if "states" not in found or "initial" not in found:
            raise TransducerError("mtt: states and initial sections are required")
        sigma_in: RankedAlphabet = found["input"]
        ranks = dict(found["states"])
        rules: Dict[Tuple[str, str], Tree] = {}
        for tag, payload in items:
            if tag != "rule":
                continue
            state, sigma, xs, ys, rhs = payload
            where = f"rule ({state},{sigma})"
            if sigma in sigma_in and xs != list(range(1, sigma_in.get(sigma).rank + 1)):
                raise TransducerError(f"{where}: expected variables x1..x{sigma_in.get(sigma).rank}")
            if state in ranks and ys != list(range(1, ranks[state] + 1)):
                raise TransducerError(f"{where}: expected parameters y1..y{ranks[state]}")
            if (state, sigma) in rules:
                raise TransducerError(f"{where} defined twice")
            rules[(state, sigma)] = rhs
        return Mtt(name, sigma_in, found["output"], found["states"], found["initial"], rules)


class _AttBuilder(_Common):
    def syn(self, children):
        return ("syn", tuple(children))

    def inh(self, children):
        return ("inh", tuple(children))

    def root(self, children):
        return ("root", children[0])

    def aargs(self, children):
        return tuple(children)

    def aref(self, children):
        child = int(children[1]) if len(children) > 1 else 0
        return Tree(AttrRef(children[0], child))

    def aout(self, children):
        args = children[1] if len(children) > 1 else ()
        return Tree(Symbol(children[0], len(args)), args)

    def arule(self, children):
        attr = children[0]
        child = int(children[1]) if len(children) == 3 else 0
        return ((attr, child), children[-1])

    def at(self, children):
        sigma, rank = children[0], int(children[1])
        rules: Dict[Tuple[str, int], Tree] = {}
        for key, rhs in children[2:]:
            if key in rules:
                raise TransducerError(f"at {sigma}: rule for {key} given twice")
            rules[key] = rhs
        return ("at", (Symbol(sigma, rank), rules))

    def start(self, children):
        name, items = children[0], children[1:]
        found = _sections(items, "att")
        if "root" not in found:
            raise TransducerError("att: root section is required")
        sigma_in: RankedAlphabet = found["input"]
        rules: Dict[str, Dict[Tuple[str, int], Tree]] = {}
        for tag, payload in items:
            if tag != "at":
                continue
            sym, block = payload
            if sym.name in sigma_in and sigma_in.get(sym.name).rank != sym.rank:
                raise TransducerError(f"at {sym.name}/{sym.rank}: declared with rank {sigma_in.get(sym.name).rank}")
            if sym.name in rules:
                raise TransducerError(f"at {sym.name}: block given twice")
            rules[sym.name] = block
        return Att(name, sigma_in, found["output"], found.get("syn", ()), found.get("inh", ()),
                   found["root"], rules)


class _BrelBuilder(_Common):
    def brule(self, children):
        sigma = children[0]
        states = children[1] if len(children) == 4 else ()
        return ("rule", ((sigma, tuple(states)), (children[-2], children[-1])))

    def start(self, children):
        if children and isinstance(children[0], str):
            name, items = children[0], children[1:]
        else:
            name, items = "brel", children
        found = _sections(items, "brel")
        rules = {}
        for tag, payload in items:
            if tag == "rule":
                key, value = payload
                if key in rules:
                    raise TransducerError(f"brel: rule {key[0]}{key[1]} given twice")
                rules[key] = value
        return Brel(name, found["input"], found["output"], found.get("states", ()), rules)


class _TrelBuilder(_Common):
    def trule(self, children):
        state, sigma, out = children[0], children[1], children[2]
        states = children[3] if len(children) > 3 else ()
        return ("rule", ((state, sigma), (out, tuple(states))))

    def start(self, children):
        if children and isinstance(children[0], str):
            name, items = children[0], children[1:]
        else:
            name, items = "trel", children
        found = _sections(items, "trel")
        if "initial" not in found:
            raise TransducerError("trel: initial section is required")
        rules = {}
        for tag, payload in items:
            if tag == "rule":
                key, value = payload
                if key in rules:
                    raise TransducerError(f"trel: rule {key} given twice")
                rules[key] = value
        return Trel(name, found["input"], found["output"], found.get("states", ()), found["initial"], rules)


class _RhoBuilder(_Common):
    def entry(self, children):
        state, j, target = children
        return (state, int(j), int(target))

    def start(self, children):
        return list(children)


# ===== Public parsers =====

def parse_tree(text: str, alphabet: Optional[RankedAlphabet] = None) -> Tree:
    """
    Parse `name` | `name(t1,...,tk)`.

    Args:
        text: Tree in concrete syntax
        alphabet: When given, every symbol must be declared with matching rank

    Raises:
        TreeSyntaxError: Malformed text (with line and column)
        UnknownSymbolError: Undeclared symbol
        ArityError: Child count differs from the declared rank
    """
    tree = _parse("tree", text, _TreeBuilder())
    if alphabet is not None:
        check_tree(tree, alphabet)
    return tree


def parse_mtt(text: str) -> Mtt:
    return _parse("mtt", text, _MttBuilder())


def parse_att(text: str) -> Att:
    return _parse("att", text, _AttBuilder())


def parse_brel(text: str) -> Brel:
    return _parse("brel", text, _BrelBuilder())


def parse_trel(text: str) -> Trel:
    return _parse("trel", text, _TrelBuilder())


def parse_rho(text: str) -> Dict[Tuple[str, int], int]:
    return {(q, j): target for q, j, target in _parse("rho", text, _RhoBuilder())}


_PARSERS = {"mtt": parse_mtt, "att": parse_att, "brel": parse_brel, "trel": parse_trel}
_LEADING = re.compile(r"\A(?:\s|//[^\n]*)*(mtt|att|brel|trel)\b")

Transducer = Union[Mtt, Att, Brel, Trel]


def parse_transducer(text: str) -> Transducer:
    match = _LEADING.match(text)
    if not match:
        raise TreeSyntaxError("expected a transducer file starting with mtt, att, brel or trel", 1, 1)
    return _PARSERS[match.group(1)](text)


def load_transducer(path: Union[str, FsPath]) -> Transducer:
    """Read a transducer file, dispatching on its leading keyword."""
    return parse_transducer(FsPath(path).read_text(encoding="utf-8"))


# ===== Writers =====

def _header(lines: Optional[Sequence[str]]) -> List[str]:
    return [f"// {line}" for line in (lines or [])]


def _alphabet_line(keyword: str, alphabet: RankedAlphabet) -> str:
    return f"  {keyword} {{ " + " ".join(f"{quote_name(s.name)}/{s.rank}" for s in alphabet) + " }"


def format_mtt(m: Mtt, header: Optional[Sequence[str]] = None) -> str:
    lines = _header(header)
    lines.append(f"mtt {quote_name(m.name)} {{")
    lines.append(_alphabet_line("input", m.input_alphabet))
    lines.append(_alphabet_line("output", m.output_alphabet))
    lines.append("  states { " + " ".join(f"{quote_name(q)}/{r}" for q, r in m.states) + " }")
    lines.append(f"  initial {quote_name(m.initial)}")
    for q, sym, rhs in m.iter_rules():
        lhs = quote_name(sym.name)
        if sym.rank:
            lhs += "(" + ",".join(f"x{i}" for i in range(1, sym.rank + 1)) + ")"
        rank = m.rank_of(q)
        if rank:
            lhs += "(" + ",".join(f"y{j}" for j in range(1, rank + 1)) + ")"
        lines.append(f"  rule {quote_name(q)} {lhs} -> {format_tree(rhs)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_att(a: Att, header: Optional[Sequence[str]] = None) -> str:
    lines = _header(header)
    lines.append(f"att {quote_name(a.name)} {{")
    lines.append(_alphabet_line("input", a.input_alphabet))
    lines.append(_alphabet_line("output", a.output_alphabet))
    lines.append("  syn { " + " ".join(quote_name(x) for x in a.syn) + " }")
    lines.append("  inh { " + " ".join(quote_name(x) for x in a.inh) + " }")
    lines.append(f"  root {quote_name(a.output_attr)}")
    for sym in a.input_alphabet:
        block = a.rules.get(sym.name, {})
        lines.append(f"  at {quote_name(sym.name)}/{sym.rank} {{")
        for key in a.required_keys(sym) + [k for k in block if k not in a.required_keys(sym)]:
            if key in block:
                lines.append(f"    {AttrRef(key[0], key[1])} -> {format_tree(block[key])} ;")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_brel(b: Brel, header: Optional[Sequence[str]] = None) -> str:
    lines = _header(header)
    lines.append(f"brel {quote_name(b.name)} {{")
    lines.append(_alphabet_line("input", b.input_alphabet))
    lines.append(_alphabet_line("output", b.output_alphabet))
    lines.append("  states { " + " ".join(quote_name(p) for p in b.states) + " }")
    for (sigma, states), (target, out) in b.rules.items():
        lhs = quote_name(sigma)
        if states:
            lhs += "(" + ",".join(quote_name(p) for p in states) + ")"
        lines.append(f"  rule {lhs} -> {quote_name(target)} : {quote_name(out)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_trel(t: Trel, header: Optional[Sequence[str]] = None) -> str:
    lines = _header(header)
    lines.append(f"trel {quote_name(t.name)} {{")
    lines.append(_alphabet_line("input", t.input_alphabet))
    lines.append(_alphabet_line("output", t.output_alphabet))
    lines.append("  states { " + " ".join(quote_name(q) for q in t.states) + " }")
    lines.append(f"  initial {quote_name(t.initial)}")
    for (q, sigma), (out, states) in t.rules.items():
        rhs = quote_name(out)
        if states:
            rhs += "(" + ",".join(quote_name(p) for p in states) + ")"
        lines.append(f"  rule {quote_name(q)} {quote_name(sigma)} -> {rhs}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_transducer(item: Transducer, header: Optional[Sequence[str]] = None) -> str:
    writers = {"mtt": format_mtt, "att": format_att, "brel": format_brel, "trel": format_trel}
    return writers[item.kind](item, header)


def format_rho(rho: Mapping[Tuple[str, int], int], order: Optional[Sequence[str]] = None) -> str:
    """Lines `q j -> j'`, states in the given order (else sorted)."""
    position = {q: i for i, q in enumerate(order or [])}
    keys = sorted(rho, key=lambda k: (position.get(k[0], len(position)), k[0], k[1]))
    return "".join(f"{quote_name(q)} {j} -> {rho[(q, j)]}\n" for q, j in keys)
