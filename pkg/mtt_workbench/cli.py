"""
Command-line front end: evaluation, checks, conversions, difftest and DOT export
"""
import argparse
import json
import logging
import re
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .analysis import check_fv, find_rho, important_nodes, is_consistent, is_permanent
from .att import Att, att_dependency_dot, att_dependency_graph, att_is_circular, format_cycle, shortest_cycle, validate_att
from .config import Settings, load_settings
from .constructions import (
    att_to_consistent_mtt, expand_to_consistent, fv_to_att, nondeleting_nf, nonerasing_nf, omega_direct,
    trel_mtt_product,
)
from .difftest import COUNTEREXAMPLE, EQUAL, equivalent_up_to
from .dynfv import build_state_annotating_trel, build_dynfv_att, check_dynamic_fv, equivalence_gadget, subtree_growth
from .errors import ConfigError, TransducerError, TreeSyntaxError, WorkbenchError
from .formats import format_rho, format_transducer, load_transducer, parse_rho, parse_tree
from .mtt import Mtt, is_nondeleting, is_nonerasing, validate_mtt
from .pipeline import Pipeline
from .relabel import Brel, Trel, validate_brel, validate_trel
from .reporting import frame_rows, growth_frame
from .stage import Stage
from .trees import format_path, format_tree, parse_path

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_STAGE_ERROR = 2
EXIT_USAGE = 64
EXIT_SYNTAX = 65
EXIT_INTERNAL = 70

SCHEMA = 1
STAGE_KINDS = ("mtt", "att", "brel", "trel")
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

CONVERSIONS = (
    "consistent", "att", "att-direct", "from-att", "nondeleting", "nonerasing", "dynfv-att", "product", "gadget",
)


class UsageError(Exception):
    """Arguments parsed but do not fit the command."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


class _StageAction(argparse.Action):
    """Collects --mtt/--att/--brel/--trel in command-line order."""

    def __call__(self, parser, namespace, values, option_string=None):
        stages = list(getattr(namespace, self.dest, None) or [])
        stages.append((self.const, values))
        setattr(namespace, self.dest, stages)


# ===== Helpers =====

def _emit(args: argparse.Namespace, payload: Dict[str, Any], lines: Sequence[str]) -> None:
    if args.json:
        document = {"schema": SCHEMA, "command": args.command, **payload}
        print(json.dumps(document, indent=2, ensure_ascii=False, default=str))
    else:
        for line in lines:
            print(line)


def _load_stages(args: argparse.Namespace) -> List[Stage]:
    stages: List[Stage] = []
    for kind, path in args.stages:
        item = load_transducer(path)
        if item.kind != kind:
            raise TransducerError(f"{path} holds a {item.kind}, not a {kind}")
        stages.append(item)
    if not stages:
        raise UsageError("give at least one of --mtt/--att/--brel/--trel")
    return stages


def _single(args: argparse.Namespace, cls: type) -> Any:
    stages = _load_stages(args)
    if len(stages) != 1 or not isinstance(stages[0], cls):
        raise UsageError(f"this command takes exactly one --{cls.kind} file")
    return stages[0]


def _split_lookaround(args: argparse.Namespace) -> Tuple[Optional[Pipeline], Mtt]:
    """Look-around stages are the --lookaround files followed by the relabelings before the MTT."""
    stages = _load_stages(args)
    m = stages[-1]
    if not isinstance(m, Mtt):
        raise UsageError("the last stage must be an MTT")
    relabelings = [load_transducer(path) for path in getattr(args, "lookaround", None) or []] + stages[:-1]
    for stage in relabelings:
        if not isinstance(stage, (Brel, Trel)):
            raise UsageError(f"{stage.name}: look-around stages must be relabelings")
    return (Pipeline.of(*relabelings) if relabelings else None), m


def _pipeline_from_files(files: str) -> Pipeline:
    return Pipeline.of(*(load_transducer(path) for path in files.split(",") if path))


def _read_input(args: argparse.Namespace, pipeline: Pipeline):
    if args.input is not None:
        text = args.input
    elif args.input_file is not None:
        text = Path(args.input_file).read_text(encoding="utf-8")
    else:
        raise UsageError("give --input TREE or --input-file FILE")
    return parse_tree(text, pipeline.input_alphabet)


def _rho_for(args: argparse.Namespace, m: Mtt):
    if getattr(args, "rho", None):
        return parse_rho(Path(args.rho).read_text(encoding="utf-8"))
    rho = find_rho(m)
    if rho is None:
        raise WorkbenchError(f"{m.name} has no parameter renaming with the FV property")
    return rho


def _rho_rows(rho) -> List[Dict[str, Any]]:
    return [{"state": q, "param": j, "value": v} for (q, j), v in sorted(rho.items())]


def _verdict(ok: bool, good: str, bad: str) -> str:
    return f"✅ {good}" if ok else f"❌ {bad}"


# ===== eval =====

def cmd_eval(args: argparse.Namespace) -> int:
    pipeline = Pipeline.of(*_load_stages(args))
    s = _read_input(args, pipeline)
    out = pipeline.apply(s)
    _emit(args, {"input": format_tree(s), "output": format_tree(out)}, [format_tree(out)])
    return EXIT_OK


# ===== check =====

def check_fv_cmd(args: argparse.Namespace) -> int:
    m = _single(args, Mtt)
    if args.rho:
        rho = parse_rho(Path(args.rho).read_text(encoding="utf-8"))
        result = check_fv(m, rho)
        ok, violation = result.ok, result.violation
    else:
        rho = find_rho(m)
        ok, violation = rho is not None, None
    if ok:
        lines = [f"✅ {m.name} has the FV property with"] + format_rho(rho, m.state_names).splitlines()
    elif violation is not None:
        lines = [f"❌ {m.name} violates the FV property: {violation}"]
    else:
        lines = [f"❌ no parameter renaming gives {m.name} the FV property"]
    _emit(args, {"holds": ok, "rho": _rho_rows(rho) if ok else None,
                 "violation": str(violation) if violation else None}, lines)
    return EXIT_OK if ok else EXIT_FAIL


def check_consistency_cmd(args: argparse.Namespace) -> int:
    m = _single(args, Mtt)
    result = is_consistent(m)
    lines = [_verdict(result.consistent, f"{m.name} is consistent", f"{m.name} is not consistent: {result.violation}")]
    _emit(args, {"consistent": result.consistent,
                 "violation": str(result.violation) if result.violation else None}, lines)
    return EXIT_OK if result.consistent else EXIT_FAIL


def check_nondeleting_cmd(args: argparse.Namespace) -> int:
    m = _single(args, Mtt)
    ok = is_nondeleting(m)
    _emit(args, {"nondeleting": ok}, [_verdict(ok, f"{m.name} is nondeleting", f"{m.name} deletes parameters")])
    return EXIT_OK if ok else EXIT_FAIL


def check_nonerasing_cmd(args: argparse.Namespace) -> int:
    m = _single(args, Mtt)
    ok = is_nonerasing(m)
    _emit(args, {"nonerasing": ok}, [_verdict(ok, f"{m.name} is nonerasing", f"{m.name} has erasing rules")])
    return EXIT_OK if ok else EXIT_FAIL


def check_circular_cmd(args: argparse.Namespace) -> int:
    a = _single(args, Att)
    result = att_is_circular(a)
    if result.circular:
        lines = [f"❌ {a.name} is circular on {format_tree(result.witness)}"]
        if result.cycle:
            lines.append(f"🔍 cycle {format_cycle(result.cycle)}")
    else:
        lines = [f"✅ {a.name} is non-circular"]
    _emit(args, {
        "circular": result.circular,
        "witness": format_tree(result.witness) if result.witness is not None else None,
        "cycle": format_cycle(result.cycle) if result.cycle else None,
    }, lines)
    return EXIT_FAIL if result.circular else EXIT_OK


def check_dynfv_cmd(args: argparse.Namespace) -> int:
    lookaround, m = _split_lookaround(args)
    verdict = check_dynamic_fv(m, lookaround, args.bound, args.workers)
    if verdict.ok:
        lines = [f"✅ no dynamic FV violation on the {verdict.tested} inputs up to size {verdict.bound}"]
    else:
        lines = [f"❌ dynamic FV violated on input {format_tree(verdict.violation.source)}",
                 f"🔍 {verdict.violation}"]
    payload: Dict[str, Any] = {"outcome": "pass-up-to-bound" if verdict.ok else "violation",
                               "bound": verdict.bound, "tested": verdict.tested}
    if verdict.violation is not None:
        v = verdict.violation
        payload["violation"] = {
            "input": format_tree(v.source), "path": format_path(v.path), "state": v.state, "param": v.param,
            "first": format_tree(v.first), "second": format_tree(v.second),
            "first_value": format_tree(v.first_value), "second_value": format_tree(v.second_value),
        }
    _emit(args, payload, lines)
    return EXIT_OK if verdict.ok else EXIT_FAIL


def check_importance_cmd(args: argparse.Namespace) -> int:
    m = _single(args, Mtt)
    nodes = sorted(important_nodes(m, args.state, args.symbol))
    if args.path is not None:
        v = parse_path(args.path)
        ok = v in nodes
        lines = [_verdict(ok, f"node {format_path(v)} is important", f"node {format_path(v)} is not important")]
        _emit(args, {"path": format_path(v), "important": ok}, lines)
        return EXIT_OK if ok else EXIT_FAIL
    rendered = [format_path(v) for v in nodes]
    _emit(args, {"important": rendered}, [f"🔍 important nodes of ({args.state},{args.symbol}):"] + rendered)
    return EXIT_OK


def check_permanent_cmd(args: argparse.Namespace) -> int:
    m = _single(args, Mtt)
    ok = is_permanent(m, args.state, args.param)
    label = f"y{args.param} of {args.state}"
    _emit(args, {"permanent": ok}, [_verdict(ok, f"{label} is permanent", f"{label} is not permanent")])
    return EXIT_OK if ok else EXIT_FAIL


def check_lin_cmd(args: argparse.Namespace) -> int:
    m = _single(args, Mtt)
    df = growth_frame(subtree_growth(m, args.bound))
    _emit(args, {"rows": frame_rows(df)}, [df.to_string(index=False)])
    return EXIT_OK


def check_validate_cmd(args: argparse.Namespace) -> int:
    validators: Dict[str, Callable] = {
        "mtt": validate_mtt, "att": validate_att, "brel": validate_brel, "trel": validate_trel,
    }
    reports = [validators[stage.kind](stage) for stage in _load_stages(args)]
    ok = all(r.ok for r in reports)
    lines = [("✅ " if r.ok else "❌ ") + str(r) for r in reports]
    _emit(args, {"valid": ok, "reports": [{"subject": r.subject, "violations": r.violations} for r in reports]}, lines)
    return EXIT_OK if ok else EXIT_FAIL


# ===== convert =====

def _file_stem(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "out"


def cmd_convert(args: argparse.Namespace) -> int:
    to = args.to
    sources = [path for _, path in (args.stages or [])]
    header = [f"generated by convert --to {to}", f"source: {', '.join(sources) or '-'}"]
    outputs: List[Stage] = []
    rho = None
    if to in ("consistent", "att", "att-direct"):
        m = _single(args, Mtt)
        rho = _rho_for(args, m)
        build = {"consistent": expand_to_consistent, "att": fv_to_att, "att-direct": omega_direct}[to]
        outputs.append(build(m, rho))
    elif to == "from-att":
        outputs.append(att_to_consistent_mtt(_single(args, Att)))
    elif to in ("nondeleting", "nonerasing"):
        result = (nondeleting_nf if to == "nondeleting" else nonerasing_nf)(_single(args, Mtt))
        outputs += [result.lookahead, result.core]
        rho = result.renaming
    elif to == "dynfv-att":
        m = _single(args, Mtt)
        trel = build_state_annotating_trel(m)
        header.append("state order: declaration order; inherited rules from the first call in post-order")
        outputs += [trel, build_dynfv_att(m, trel)]
    elif to == "product":
        stages = _load_stages(args)
        if len(stages) != 2 or not isinstance(stages[0], Trel) or not isinstance(stages[1], Mtt):
            raise UsageError("product takes --trel FILE --mtt FILE")
        outputs.append(trel_mtt_product(stages[0], stages[1]))
    elif to == "gadget":
        if not args.left or not args.right:
            raise UsageError("gadget takes --left FILES and --right FILES")
        header[1] = f"source: {args.left} | {args.right}"
        conv, gadget = equivalence_gadget(_pipeline_from_files(args.left), _pipeline_from_files(args.right))
        outputs += list(conv.stages) + [gadget]

    texts = [(stage, format_transducer(stage, header)) for stage in outputs]
    if args.output_dir:
        target = Path(args.output_dir)
        target.mkdir(parents=True, exist_ok=True)
        for i, (stage, text) in enumerate(texts, start=1):
            (target / f"{i:02d}-{_file_stem(stage.name)}.{stage.kind}").write_text(text, encoding="utf-8")
        if rho is not None:
            (target / "renaming.rho").write_text(format_rho(rho), encoding="utf-8")
    payload = {
        "to": to,
        "outputs": [{"kind": stage.kind, "name": stage.name, "text": text} for stage, text in texts],
        "rho": _rho_rows(rho) if rho is not None else None,
    }
    if args.output_dir:
        lines = [f"✅ wrote {len(texts)} file(s) to {args.output_dir}"]
    else:
        lines = ["\n".join(text for _, text in texts).rstrip("\n")]
        if rho is not None:
            lines += ["// renaming"] + [f"// {line}" for line in format_rho(rho).splitlines()]
    _emit(args, payload, lines)
    return EXIT_OK


# ===== difftest =====

def cmd_difftest(args: argparse.Namespace) -> int:
    p1, p2 = _pipeline_from_files(args.first), _pipeline_from_files(args.second)
    report = equivalent_up_to(p1, p2, args.bound, args.workers)
    payload: Dict[str, Any] = {"outcome": report.outcome, "bound": report.bound, "tested": report.tested}
    if report.input is not None:
        payload["input"] = format_tree(report.input)
    if report.outcome == COUNTEREXAMPLE:
        payload.update(out1=format_tree(report.out1), out2=format_tree(report.out2))
    elif report.outcome != EQUAL:
        payload.update(side=report.side, stage=report.stage, error=report.error)
    if report.outcome == EQUAL:
        lines, code = [f"✅ {report}"], EXIT_OK
    elif report.outcome == COUNTEREXAMPLE:
        lines, code = [f"❌ {report}"], EXIT_FAIL
    else:
        lines, code = [f"⚠️ {report}"], EXIT_STAGE_ERROR
    _emit(args, payload, lines)
    return code


# ===== graph =====

def cmd_graph(args: argparse.Namespace) -> int:
    a = _single(args, Att)
    s = _read_input(args, Pipeline.of(a))
    dg = att_dependency_graph(a, s)
    dot = att_dependency_dot(dg, _file_stem(a.name))
    cycle = shortest_cycle(dg.graph)
    if args.dot:
        Path(args.dot).write_text(dot.to_string(), encoding="utf-8")
        lines = [f"✅ wrote {len(dg.vertices)} vertices and {len(dg.edges)} edges to {args.dot}"]
    else:
        lines = [dot.to_string().rstrip("\n")]
    if cycle:
        lines.append(f"⚠️ cycle {format_cycle(cycle)}")
    _emit(args, {
        "vertices": [[attr, format_path(u)] for attr, u in dg.vertices],
        "edges": sorted([[a1, format_path(u1)], [a2, format_path(u2)]] for (a1, u1), (a2, u2) in dg.edges),
        "cycle": format_cycle(cycle) if cycle else None,
    }, lines)
    return EXIT_OK


# ===== Parser =====

def _stage_flags(parser: argparse.ArgumentParser) -> None:
    for kind in STAGE_KINDS:
        parser.add_argument(f"--{kind}", dest="stages", action=_StageAction, const=kind, default=[],
                            metavar="FILE", help=f"{kind.upper()} file (repeatable, applied left to right)")


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    staged = _Parser(add_help=False, parents=[common])
    _stage_flags(staged)

    bounded = _Parser(add_help=False)
    bounded.add_argument("--bound", type=_positive_int, default=settings.bound, help="largest input size")
    bounded.add_argument("--workers", type=_positive_int, default=settings.workers, help="worker processes")

    with_input = _Parser(add_help=False)
    group = with_input.add_mutually_exclusive_group()
    group.add_argument("--input", help="input tree")
    group.add_argument("--input-file", help="file holding the input tree")

    parser = _Parser(prog="mtt-workbench", description="Macro and attributed tree transducer workbench")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = commands.add_parser("eval", parents=[staged, with_input], help="run a pipeline on one input")
    p.set_defaults(handler=cmd_eval)

    check = commands.add_parser("check", help="static and bounded checks")
    checks = check.add_subparsers(dest="check", required=True, parser_class=_Parser)
    p = checks.add_parser("fv", parents=[staged])
    p.add_argument("--rho", help="renaming file (searched when absent)")
    p.set_defaults(handler=check_fv_cmd)
    checks.add_parser("consistency", parents=[staged]).set_defaults(handler=check_consistency_cmd)
    checks.add_parser("nondeleting", parents=[staged]).set_defaults(handler=check_nondeleting_cmd)
    checks.add_parser("nonerasing", parents=[staged]).set_defaults(handler=check_nonerasing_cmd)
    checks.add_parser("circular", parents=[staged]).set_defaults(handler=check_circular_cmd)
    p = checks.add_parser("dynfv", parents=[staged, bounded])
    p.add_argument("--lookaround", action="append", default=[], metavar="FILE",
                   help="BREL or TREL file run before the MTT (repeatable)")
    p.set_defaults(handler=check_dynfv_cmd)
    p = checks.add_parser("importance", parents=[staged])
    p.add_argument("--state", required=True)
    p.add_argument("--symbol", required=True)
    p.add_argument("--path", help="single node to test, e.g. 1.2")
    p.set_defaults(handler=check_importance_cmd)
    p = checks.add_parser("permanent", parents=[staged])
    p.add_argument("--state", required=True)
    p.add_argument("--param", type=int, required=True)
    p.set_defaults(handler=check_permanent_cmd)
    checks.add_parser("lin", parents=[staged, bounded]).set_defaults(handler=check_lin_cmd)
    checks.add_parser("validate", parents=[staged]).set_defaults(handler=check_validate_cmd)

    p = commands.add_parser("convert", parents=[staged], help="build an equivalent transducer")
    p.add_argument("--to", required=True, choices=CONVERSIONS)
    p.add_argument("--rho", help="renaming file for consistent/att/att-direct")
    p.add_argument("--left", help="comma-separated files of the first gadget pipeline")
    p.add_argument("--right", help="comma-separated files of the second gadget pipeline")
    p.add_argument("--output-dir", help="write one file per produced transducer")
    p.set_defaults(handler=cmd_convert)

    p = commands.add_parser("difftest", parents=[common, bounded], help="bounded equivalence of two pipelines")
    p.add_argument("first", help="comma-separated transducer files")
    p.add_argument("second", help="comma-separated transducer files")
    p.set_defaults(handler=cmd_difftest)

    p = commands.add_parser("graph", parents=[staged, with_input], help="dependency graph of an ATT on one input")
    p.add_argument("--dot", help="write the DOT text to this file")
    p.set_defaults(handler=cmd_graph)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        settings = load_settings()
    except ConfigError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_FAIL
    logging.basicConfig(level=settings.log_level, format=LOG_FORMAT)
    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TreeSyntaxError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except (WorkbenchError, OSError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_FAIL
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
