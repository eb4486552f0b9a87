"""Recursive transformation into a linked proposition tree.

:func:`transform` keeps applying the rule catalog to the leaves of the
tree until none of them can be split further.  The result can be
inspected directly, flattened into proposition records with leaf-to-leaf
links (:func:`serialize_flat`), or dumped as a nested document
(:func:`serialize_structured`).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Optional, Sequence, Union

from .ptb import ParseTree, yield_text
from .relations import CueTable, Relation, default_table
from .rules import CONTEXT, CORE, RephraseFailure, apply_rule, resolve_relation, rule_catalog
from .tpattern import TreeIndex

__all__ = [
    "LinkedPropositionTree",
    "Inner",
    "Leaf",
    "Proposition",
    "LeafLink",
    "Diagnostic",
    "transform",
    "context_layers",
    "project_links",
    "serialize_flat",
    "serialize_structured",
    "parse_structured",
    "Simplifier",
]


@dataclass(frozen=True)
class Proposition:
    id: int
    text: str
    context_layer: int


class LinkedPropositionTree:
    """Base class of :class:`Inner` and :class:`Leaf` nodes."""

    def leaves(self) -> list["Leaf"]:
        return list(self._leaves())

    def _leaves(self) -> Iterator["Leaf"]:
        if isinstance(self, Leaf):
            yield self
        else:
            for _, c in self.children:
                yield from c._leaves()

    @property
    def propositions(self) -> list[Proposition]:
        return [lf.proposition for lf in self.leaves()]


@dataclass(frozen=True, eq=True)
class Leaf(LinkedPropositionTree):
    text: str
    tree: Optional[ParseTree] = field(default=None, compare=False, repr=False)
    proposition: Optional[Proposition] = None


@dataclass(frozen=True, eq=True)
class Inner(LinkedPropositionTree):
    relation: Relation
    arrangement: str
    children: tuple  # ((edge_label, subtree), ...)
    rule_id: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("inner nodes need at least two children")
        labels = [lab for lab, _ in self.children]
        if self.arrangement == "coordinate" and CONTEXT in labels:
            raise ValueError("coordinate nodes have core edges only")
        if self.arrangement == "subordinate" and labels.count(CONTEXT) != 1:
            raise ValueError("subordinate nodes have exactly one context edge")


@dataclass(frozen=True)
class LeafLink:
    from_id: int
    to_id: int
    relation: Relation
    directed: bool
    depth: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.from_id == self.to_id:
            raise ValueError("a link needs two distinct propositions")


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # "rephrase-failure" | "pass-limit"
    text: str
    rule_id: Optional[int] = None
    reason: str = ""


# --------------------------------------------------------------- transform
def _split(leaf: Leaf, rules, table, diagnostics) -> Optional[Inner]:
    tree = leaf.tree
    index = TreeIndex(tree)
    for rule in rules:
        try:
            out = apply_rule(rule, tree, table, index)
        except RephraseFailure as exc:
            if diagnostics is not None:
                diagnostics.append(Diagnostic("rephrase-failure", leaf.text, rule.id, exc.reason))
            continue
        if out is None:
            continue
        relation = resolve_relation(rule, out, table)
        arrangement = "subordinate" if CONTEXT in out.labels else "coordinate"
        kids = tuple((p.label, Leaf(p.text, p.tree)) for p in out.parts)
        return Inner(relation, arrangement, kids, rule.id)
    return None


def _pass(node, rules, table, diagnostics):
    if isinstance(node, Leaf):
        got = _split(node, rules, table, diagnostics)
        return (got, True) if got is not None else (node, False)
    changed = False
    kids = []
    for lab, c in node.children:
        c2, ch = _pass(c, rules, table, diagnostics)
        changed |= ch
        kids.append((lab, c2))
    return (replace(node, children=tuple(kids)) if changed else node), changed


def _number(node, counter, layer=0):
    if isinstance(node, Leaf):
        counter[0] += 1
        return replace(node, proposition=Proposition(counter[0], node.text, layer))
    kids = tuple((lab, _number(c, counter, layer + (lab == CONTEXT))) for lab, c in node.children)
    return replace(node, children=kids)


def transform(
    sentence: ParseTree,
    *,
    order: Optional[Sequence[int]] = None,
    table: Optional[CueTable] = None,
    max_passes: int = 100,
    diagnostics: Optional[list] = None,
) -> LinkedPropositionTree:
    """Split ``sentence`` into a hierarchy of minimal propositions.

    Each pass visits the current leaves left to right and applies the
    first rule (in catalog order) that fires on each.  Passes repeat until
    no leaf changes or ``max_passes`` is reached.  Rules that match but
    cannot rephrase are skipped and reported in ``diagnostics``.
    """
    table = table or default_table()
    rules = rule_catalog(order)
    root: LinkedPropositionTree = Leaf(yield_text(sentence), sentence)
    for _ in range(max_passes):
        root, changed = _pass(root, rules, table, diagnostics)
        if not changed:
            break
    else:
        if diagnostics is not None:
            diagnostics.append(Diagnostic("pass-limit", yield_text(sentence), None, f"{max_passes} passes"))
    return _number(root, [0])


# -------------------------------------------------------------- projection
def context_layers(tree: LinkedPropositionTree) -> dict[int, int]:
    return {p.id: p.context_layer for p in tree.propositions}


def _repset(node) -> list[int]:
    if isinstance(node, Leaf):
        return [node.proposition.id]
    if node.arrangement == "coordinate":
        return [i for _, c in node.children for i in _repset(c)]
    return [i for lab, c in node.children if lab == CORE for i in _repset(c)]


def project_links(tree: LinkedPropositionTree) -> list[LeafLink]:
    """Leaf-to-leaf links induced by the inner nodes (pre-order)."""
    out: list[LeafLink] = []

    def walk(node, depth):
        if isinstance(node, Leaf):
            return
        if node.arrangement == "coordinate":
            sets = [_repset(c) for _, c in node.children]
            for i, a_set in enumerate(sets):
                for b_set in sets[i + 1 :]:
                    for a in a_set:
                        for b in b_set:
                            out.append(LeafLink(a, b, node.relation, False, depth))
        else:
            core = [i for lab, c in node.children if lab == CORE for i in _repset(c)]
            ctx = [i for lab, c in node.children if lab == CONTEXT for i in _repset(c)]
            for a in core:
                for b in ctx:
                    out.append(LeafLink(a, b, node.relation, True, depth))
        for _, c in node.children:
            walk(c, depth + 1)

    walk(tree, 0)
    return out


def _outgoing(tree) -> dict[int, list[tuple[int, int, Relation]]]:
    per: dict = {p.id: [] for p in tree.propositions}
    for ln in project_links(tree):
        per[ln.from_id].append((ln.depth, ln.to_id, ln.relation))
        if not ln.directed:
            per[ln.to_id].append((ln.depth, ln.from_id, ln.relation))
    for v in per.values():
        v.sort(key=lambda t: (-t[0], t[1]))
    return per


_ELABORATIONS = (Relation.ELABORATION_DEFINING, Relation.ELABORATION_NON_DEFINING)


def _flat_name(rel: Relation, refine_elaboration: bool) -> str:
    if not refine_elaboration and rel in _ELABORATIONS:
        return Relation.ELABORATION.flat_name
    return rel.flat_name


def serialize_flat(
    tree: LinkedPropositionTree,
    refine_elaboration: bool = True,
    rename: Optional[Callable[[Relation], str]] = None,
) -> str:
    """One ``#id<TAB>layer<TAB>text`` block per proposition, links indented.

    Links of a block are listed deepest inducing node first, then by
    target id.  ``refine_elaboration=False`` prints the defining and
    non-defining variants as plain ELABORATION.  ``rename`` overrides the
    printed relation names (e.g. coarse classes).
    """
    per = _outgoing(tree)
    lines = []
    for p in tree.propositions:
        lines.append(f"#{p.id}\t{p.context_layer}\t{p.text}")
        for _, to, rel in per[p.id]:
            name = rename(rel) if rename else rel.value
            name = _flat_name(rel, refine_elaboration) if name == rel.value else name.upper()
            lines.append(f"\t{name}\t#{to}")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------- structured
def _node_doc(node, name) -> dict:
    if isinstance(node, Leaf):
        return {"kind": "leaf", "id": node.proposition.id}
    return {
        "kind": "inner",
        "relation": name(node.relation),
        "arrangement": node.arrangement,
        "rule": node.rule_id,
        "children": [{"edge": lab, "node": _node_doc(c, name)} for lab, c in node.children],
    }


def serialize_structured(
    tree: LinkedPropositionTree, rename: Optional[Callable[[Relation], str]] = None
) -> dict:
    """JSON-ready document: proposition records plus the nested tree.

    Schema::

        {"propositions": [{"id", "layer", "text",
                           "links": [{"rel", "target", "directed"}]}],
         "tree": {"kind": "leaf", "id"} |
                 {"kind": "inner", "relation", "arrangement", "rule",
                  "children": [{"edge": "core"|"context", "node"}]}}
    """
    name = rename or (lambda r: r.value)
    per: dict = {p.id: [] for p in tree.propositions}
    for ln in project_links(tree):
        per[ln.from_id].append((ln.depth, ln.to_id, ln.relation, ln.directed))
        if not ln.directed:
            per[ln.to_id].append((ln.depth, ln.from_id, ln.relation, False))
    props = []
    for p in tree.propositions:
        links = [
            {"rel": name(rel), "target": to, "directed": d}
            for _, to, rel, d in sorted(per[p.id], key=lambda t: (-t[0], t[1]))
        ]
        props.append({"id": p.id, "layer": p.context_layer, "text": p.text, "links": links})
    return {"propositions": props, "tree": _node_doc(tree, name)}


def parse_structured(doc: dict) -> LinkedPropositionTree:
    """Rebuild a tree from :func:`serialize_structured` output."""
    texts = {p["id"]: p for p in doc["propositions"]}

    def build(d, layer):
        if d["kind"] == "leaf":
            rec = texts[d["id"]]
            return Leaf(rec["text"], None, Proposition(rec["id"], rec["text"], layer))
        kids = tuple(
            (c["edge"], build(c["node"], layer + (c["edge"] == CONTEXT))) for c in d["children"]
        )
        return Inner(Relation.parse(d["relation"]), d["arrangement"], kids, d.get("rule"))

    return build(doc["tree"], 0)


# --------------------------------------------------------------- estimator
class Simplifier:
    """Estimator-style wrapper: ``fit`` is a no-op, ``transform`` maps trees.

    The system has no learned parameters; the wrapper exists so it can sit
    in pipelines that expect ``fit``/``transform``/``get_params``.
    """

    def __init__(self, order: Optional[Sequence[int]] = None, max_passes: int = 100):
        self.order = order
        self.max_passes = max_passes

    def get_params(self, deep: bool = True) -> dict:
        return {"order": self.order, "max_passes": self.max_passes}

    def set_params(self, **params) -> "Simplifier":
        for k, v in params.items():
            if k not in ("order", "max_passes"):
                raise ValueError(f"unknown parameter {k!r}")
            setattr(self, k, v)
        return self

    def fit(self, X=None, y=None) -> "Simplifier":
        rule_catalog(self.order)  # validates the order
        return self

    def transform(self, X: Sequence[ParseTree]) -> list[LinkedPropositionTree]:
        return [transform(t, order=self.order, max_passes=self.max_passes) for t in X]

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)


Node = Union[Inner, Leaf]
