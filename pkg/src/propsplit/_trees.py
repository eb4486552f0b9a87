"""Identity-based tree surgery used by the rule extractors.

Rules work on the matched tree itself: nodes are addressed by object
identity (``ParseTree`` equality is structural), subtrees are deleted or
replaced, and new sentences are assembled from original leaves plus a few
template tokens.  :func:`finish` turns a fragment into a stand-alone
sentence tree.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

from .ptb import ParseTree

_PUNCT_DROP = {",", ":", ";", "--", "-"}
_FINAL = {".", "?", "!"}
_KEEP_CASE = {"NNP", "NNPS"}


def leaf(label: str, token: str) -> ParseTree:
    return ParseTree(label, (), token, (-1, -1))


def node(label: str, children: Sequence[ParseTree]) -> ParseTree:
    return ParseTree(label, tuple(children), None, (-1, -1))


def edit(tree: ParseTree, edits: Mapping[int, Sequence[ParseTree]]) -> Optional[ParseTree]:
    """Apply ``{id(node): replacement list}``; an empty list deletes.

    Inner nodes left without children are pruned.  Unchanged subtrees are
    shared with the input.
    """

    def walk(n):
        rep = edits.get(id(n))
        if rep is not None:
            return list(rep)
        if n.is_leaf:
            return [n]
        kids = []
        changed = False
        for c in n.children:
            out = walk(c)
            if len(out) != 1 or out[0] is not c:
                changed = True
            kids.extend(out)
        if not changed:
            return [n]
        if not kids:
            return []
        return [ParseTree(n.label, kids, None, n.span)]

    out = walk(tree)
    if not out:
        return None
    if len(out) == 1:
        return out[0]
    return ParseTree(tree.label, out, None, tree.span)


def remove(tree: ParseTree, *nodes: Optional[ParseTree]) -> Optional[ParseTree]:
    return edit(tree, {id(n): () for n in nodes if n is not None})


def replace(tree: ParseTree, old: ParseTree, new: Sequence[ParseTree]) -> Optional[ParseTree]:
    return edit(tree, {id(old): tuple(new)})


def parent_map(tree: ParseTree) -> dict:
    out = {}
    for n in tree.preorder():
        for c in n.children:
            out[id(c)] = n
    return out


def ancestors(tree: ParseTree, target: ParseTree) -> list[ParseTree]:
    """Nodes from the root down to (excluding) ``target``; [] if absent."""
    path: list[ParseTree] = []

    def walk(n):
        if n is target:
            return True
        path.append(n)
        for c in n.children:
            if walk(c):
                return True
        path.pop()
        return False

    return path if walk(tree) else []


def sibling_before(tree, target, pmap=None):
    pmap = pmap or parent_map(tree)
    p = pmap.get(id(target))
    if p is None:
        return None
    kids = p.children
    for i, c in enumerate(kids):
        if c is target:
            return kids[i - 1] if i > 0 else None
    return None


def sibling_after(tree, target, pmap=None):
    pmap = pmap or parent_map(tree)
    p = pmap.get(id(target))
    if p is None:
        return None
    kids = p.children
    for i, c in enumerate(kids):
        if c is target:
            return kids[i + 1] if i + 1 < len(kids) else None
    return None


def is_comma(n: Optional[ParseTree]) -> bool:
    return n is not None and n.is_leaf and n.label == ","


def strip_sentence(tree: ParseTree) -> list[ParseTree]:
    """Children of the clause under ROOT (ROOT -> S -> children)."""
    n = tree
    while n.label == "ROOT" and len(n.children) == 1:
        n = n.children[0]
    return list(n.children) if not n.is_leaf else [n]


def _with_token(lf: ParseTree, token: str) -> ParseTree:
    return ParseTree(lf.label, (), token, lf.span)


def finish(
    parts: Iterable[ParseTree],
    initial: Optional[ParseTree] = None,
    label: str = "S",
) -> ParseTree:
    """Assemble a stand-alone sentence ``(ROOT (S parts... (. .)))``.

    Stray punctuation at either end and doubled commas are removed, the
    first word is capitalised, the original sentence-initial token is
    lowercased when it moved inside (unless it is a proper noun or "I"),
    and a final period is added (inside a closing quote).
    """
    parts = [p for p in parts if p is not None]
    if len(parts) == 1 and not parts[0].is_leaf and parts[0].label in ("S", "SINV", "SQ", "ROOT"):
        one = parts[0]
        while one.label == "ROOT" and len(one.children) == 1 and not one.children[0].is_leaf:
            one = one.children[0]
        label = one.label if one.label != "ROOT" else label
        parts = list(one.children)
    s = node(label, parts)

    leaves = s.leaves()
    edits: dict = {}
    # leading punctuation and conjunctions left over by deletions
    i = 0
    while i < len(leaves) and (leaves[i].label in _PUNCT_DROP or leaves[i].token in _PUNCT_DROP):
        edits[id(leaves[i])] = ()
        i += 1
    # trailing material: closing quote kept, punctuation before it dropped
    j = len(leaves) - 1
    close_quote = None
    while j >= i and (leaves[j].token in _PUNCT_DROP or leaves[j].token == "."):
        edits[id(leaves[j])] = ()
        j -= 1
    if j >= i and leaves[j].token in ("''", '"') and leaves[j].label in ("''", '"', "``"):
        close_quote = leaves[j]
        k = j - 1
        while k >= i and (leaves[k].token in _PUNCT_DROP or leaves[k].token == "."):
            edits[id(leaves[k])] = ()
            k -= 1
    # doubled commas
    prev_comma = False
    for lf in leaves[i : j + 1]:
        if id(lf) in edits:
            continue
        comma = lf.token == ","
        if comma and prev_comma:
            edits[id(lf)] = ()
        prev_comma = comma
    # casing
    words = [lf for lf in leaves[i : j + 1] if id(lf) not in edits]
    first = next((lf for lf in words if lf.token[:1].isalnum()), None)
    if initial is not None and first is not None and initial is not first:
        for lf in words:
            if lf is initial and lf.label not in _KEEP_CASE and lf.token != "I":
                edits[id(lf)] = (_with_token(lf, lf.token[:1].lower() + lf.token[1:]),)
    if first is not None and first.token[:1].islower():
        edits[id(first)] = (_with_token(first, first.token[:1].upper() + first.token[1:]),)
    ends = j >= i and leaves[j].token in _FINAL - {"."} and id(leaves[j]) not in edits
    if not ends:
        period = leaf(".", ".")
        if close_quote is not None:
            edits[id(close_quote)] = (period, close_quote)
    out = edit(s, edits)
    if out is None:
        out = node(label, [leaf(".", ".")])
    if not ends and close_quote is None:
        out = ParseTree(out.label, out.children + (leaf(".", "."),), None, out.span)
    return ParseTree.node("ROOT", [out])
