"""Command line front end: ``propsplit simplify|stats|rules|match``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .evaluate import CorpusFormatError, EmptyOutput, NoReferences, evaluate_corpus, format_report, read_corpus
from .hierarchy import serialize_flat, serialize_structured, transform
from .parser_bridge import BridgeError, ExternalParser, load_trees, resolve_endpoint
from .ptb import PTBError, parse_bracketed, serialize_bracketed, yield_text
from .relations import CueTable, coarse_class
from .rules import get_rule, rule_catalog
from .tpattern import PatternError, TreeIndex, compile as compile_pattern, match_all

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_INPUT = 2


class InputError(Exception):
    pass


# ---------------------------------------------------------------- simplify
@lru_cache(maxsize=4)
def _table(cues: Optional[str], verbs: Optional[str], locations: Optional[str]) -> CueTable:
    return CueTable.load(cues, verbs, locations)


def _simplify_one(job: tuple) -> tuple[str, list[str]]:
    """Worker: bracketed tree in, rendered block and diagnostics out."""
    text, fmt, coarse, plain, order, resources = job
    tree = parse_bracketed(text)
    diags: list = []
    out = transform(tree, order=order, table=_table(*resources), diagnostics=diags)
    rename = (lambda r: coarse_class(r)) if coarse else None
    if fmt == "flat":
        block = serialize_flat(out, refine_elaboration=not plain, rename=rename)
    else:
        doc = {"input": yield_text(tree), **serialize_structured(out, rename=rename)}
        block = json.dumps(doc, ensure_ascii=False, sort_keys=False)
    lines = [f"{d.kind}\t{d.rule_id if d.rule_id is not None else '-'}\t{d.reason}\t{d.text}" for d in diags]
    return block, lines


def _read_inputs(args) -> list[str]:
    if args.trees:
        try:
            return [serialize_bracketed(t) for t in load_trees(args.trees)]
        except PTBError as exc:
            raise InputError(f"{args.trees}: {exc}") from None
    sentences = [ln.strip() for ln in Path(args.text).read_text(encoding="utf-8").splitlines() if ln.strip()]
    endpoint = resolve_endpoint(args.parser_cmd, args.parser_url)
    if not endpoint:
        raise InputError("--text needs --parser-cmd or --parser-url (or PROPSPLIT_PARSER_CMD/_URL)")
    cache = None if args.no_cache else args.cache_dir
    try:
        trees = ExternalParser(endpoint, cache, args.timeout).parse(sentences)
    except BridgeError as exc:
        raise InputError(str(exc)) from None
    return [serialize_bracketed(t) for t in trees]


def _order(spec: Optional[str]) -> Optional[tuple[int, ...]]:
    if not spec:
        return None
    try:
        order = tuple(int(x) for x in spec.split(","))
        rule_catalog(order)
    except ValueError as exc:
        raise InputError(f"--order: {exc}") from None
    return order


def cmd_simplify(args) -> int:
    trees = _read_inputs(args)
    order = _order(args.order)
    resources = (args.cues, args.verbs, args.locations)
    jobs = [(t, args.format, args.coarse, args.plain_elaboration, order, resources) for t in trees]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_simplify_one, jobs, chunksize=max(1, len(jobs) // (4 * args.jobs))))
    else:
        results = [_simplify_one(j) for j in jobs]

    out = sys.stdout
    if args.format == "flat":
        out.write("\n".join(block for block, _ in results))
    else:
        out.write("[\n" + ",\n".join(block for block, _ in results) + "\n]\n")
    diag = [f"{i}\t{line}" for i, (_, lines) in enumerate(results, 1) for line in lines]
    if diag:
        text = "\n".join(diag) + "\n"
        if args.diagnostics:
            Path(args.diagnostics).write_text(text, encoding="utf-8")
        else:
            sys.stderr.write(text)
    elif args.diagnostics:
        Path(args.diagnostics).write_text("", encoding="utf-8")
    return EXIT_OK


# ------------------------------------------------------------------- stats
def cmd_stats(args) -> int:
    try:
        corpus = read_corpus(args.corpus)
        report = evaluate_corpus(corpus, split_punct=args.split_punct)
    except CorpusFormatError as exc:
        raise InputError(f"{args.corpus}: {exc}") from None
    except (EmptyOutput, NoReferences) as exc:
        raise InputError(f"{args.corpus}: {exc}") from None
    if args.format == "json":
        doc = {k: (None if v is None else round(float(v), 6)) for k, v in report.items()}
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(format_report(report))
    return EXIT_OK


# ------------------------------------------------------------ rules/match
def cmd_rules(args) -> int:
    order = _order(args.order)
    if args.format == "json":
        rows = [
            {
                "id": r.id,
                "name": r.name,
                "construct": r.construct,
                "hierarchy": r.hierarchy,
                "relation_source": r.relation_source,
                "pattern": r.pattern_source,
            }
            for r in rule_catalog(order)
        ]
        sys.stdout.write(json.dumps(rows, indent=2) + "\n")
        return EXIT_OK
    for r in rule_catalog(order):
        sys.stdout.write(f"{r.id}\t{r.name}\t{r.construct}\t{r.hierarchy}\t{r.pattern_source or '-'}\n")
    return EXIT_OK


def cmd_match(args) -> int:
    if args.rule is not None:
        try:
            rule = get_rule(args.rule)
        except KeyError:
            raise InputError(f"no rule #{args.rule}") from None
        if rule.pattern_source is None:
            raise InputError(f"rule #{rule.id} has no tree pattern")
        pattern = rule.pattern
    else:
        try:
            pattern = compile_pattern(args.pattern)
        except PatternError as exc:
            raise InputError(f"pattern: {exc}") from None
    try:
        trees = load_trees(args.trees)
    except PTBError as exc:
        raise InputError(f"{args.trees}: {exc}") from None
    for i, tree in enumerate(trees, 1):
        for m in match_all(pattern, TreeIndex(tree)):
            sys.stdout.write(f"{i}\t{_show(m.root_match)}\n")
            for name, node in m.bindings.items():
                sys.stdout.write(f"\t{name}\t{_show(node)}\n")
    return EXIT_OK


def _show(node) -> str:
    """``[start,end)<TAB>label<TAB>words`` for a matched node."""
    pre = getattr(node, "preterminal", None)
    if pre is not None:  # a token
        start, end = pre.span
        return f"[{start},{end})\t{node.label}\t{node.label}"
    start, end = node.span
    return f"[{start},{end})\t{node.label}\t{' '.join(node.tokens())}"


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="propsplit", description="Split complex sentences into linked propositions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simplify", help="transform parse trees into proposition hierarchies")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--trees", help="bracketed tree file")
    src.add_argument("--text", help="one sentence per line (needs a parser)")
    s.add_argument("--parser-cmd", help="external parser command (stdin/stdout, one item per line)")
    s.add_argument("--parser-url", help="external parser HTTP endpoint")
    s.add_argument("--cache-dir", default=".propsplit-cache", help="parse cache directory")
    s.add_argument("--no-cache", action="store_true", help="disable the parse cache")
    s.add_argument("--timeout", type=float, default=30.0, help="parser timeout in seconds")
    s.add_argument("--format", choices=("flat", "structured"), default="flat")
    s.add_argument("--coarse", action="store_true", help="print coarse relation classes")
    s.add_argument("--plain-elaboration", action="store_true", help="print Elaboration variants as ELABORATION")
    s.add_argument("--diagnostics", help="write diagnostics here instead of stderr")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.add_argument("--order", help="comma-separated rule execution order")
    s.add_argument("--cues", help="cue phrase table (TSV)")
    s.add_argument("--verbs", help="attribution verb list")
    s.add_argument("--locations", help="location gazetteer")
    s.set_defaults(func=cmd_simplify)

    st = sub.add_parser("stats", help="corpus statistics")
    st.add_argument("corpus", help="TSV: input, outputs joined by ' <::> ', references...")
    st.add_argument("--split-punct", action="store_true", help="split punctuation off words")
    st.add_argument("--format", choices=("text", "json"), default="text")
    st.set_defaults(func=cmd_stats)

    r = sub.add_parser("rules", help="rule catalog")
    rsub = r.add_subparsers(dest="rules_command", required=True)
    rl = rsub.add_parser("list", help="list rules in execution order")
    rl.add_argument("--format", choices=("tsv", "json"), default="tsv")
    rl.add_argument("--order", help="comma-separated rule execution order")
    rl.set_defaults(func=cmd_rules)

    m = sub.add_parser("match", help="run a tree pattern over trees")
    which = m.add_mutually_exclusive_group(required=True)
    which.add_argument("--pattern", help="pattern source")
    which.add_argument("--rule", type=int, help="use this rule's pattern")
    m.add_argument("--trees", "--tree", dest="trees", required=True, help="bracketed tree file")
    m.set_defaults(func=cmd_match)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"propsplit: error: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        sys.stderr.write(f"propsplit: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
