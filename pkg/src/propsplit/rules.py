"""The 35 transformation rules and single-rule application.

Each rule pairs a tree pattern with an extractor.  The extractor receives
the sentence tree and one match, and either returns a :class:`RuleOutcome`
(rephrased sentences labelled core/context plus cue material) or ``None``
when a guard rejects the match.  :func:`apply_rule` tries the matches in
pattern order and returns the first outcome.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

from . import _trees as T
from .ptb import ParseTree, yield_text
from .relations import (
    CueTable,
    Relation,
    classify_cue,
    classify_entities,
    default_table,
    is_attribution_verb,
    refine_temporal,
)
from .tpattern import TreeIndex, TreePattern, compile as compile_pattern

__all__ = [
    "TransformationRule",
    "RuleOutcome",
    "Part",
    "RephraseFailure",
    "MissingReferent",
    "DEFAULT_ORDER",
    "rule_catalog",
    "get_rule",
    "apply_rule",
    "resolve_relation",
    "select_copula",
    "rephrase_with_referent",
    "rephrase_canonical",
]

CORE = "core"
CONTEXT = "context"


class RephraseFailure(Exception):
    """A rule matched but one of its template slots could not be filled."""

    def __init__(self, rule_id: int, reason: str):
        super().__init__(f"rule #{rule_id}: {reason}")
        self.rule_id = rule_id
        self.reason = reason


class MissingReferent(RephraseFailure):
    pass


@dataclass(frozen=True)
class Part:
    tree: ParseTree
    label: str

    @property
    def text(self) -> str:
        return yield_text(self.tree)


@dataclass(frozen=True)
class RuleOutcome:
    parts: tuple
    cue: Optional[tuple] = None
    relation_hint: Optional[Relation] = None
    rule_id: int = 0
    scan: tuple = ()  # tagged tokens for entity-based relations

    @property
    def texts(self) -> list[str]:
        return [p.text for p in self.parts]

    @property
    def labels(self) -> list[str]:
        return [p.label for p in self.parts]


# ------------------------------------------------------------- grammar bits
_PAST_MODALS = {"would", "could", "might"}
_PLURAL_PRON = {"they", "we", "you", "these", "those", "them", "us", "both"}
_SUBJ_CASE = {"him": "he", "her": "she", "them": "they", "me": "I", "us": "we", "whom": "who"}
_OBJ_CASE = {v: k for k, v in _SUBJ_CASE.items() if k != "whom"}


def _verb_leaf(vp: ParseTree) -> Optional[ParseTree]:
    """First finite verb or modal along a VP chain."""
    n = vp
    while n is not None and not n.is_leaf:
        for c in n.children:
            if c.is_leaf and (c.label.startswith("VB") or c.label == "MD"):
                return c
        n = next((c for c in n.children if c.label == "VP"), None)
    return None


def _head_verb(vp: ParseTree) -> Optional[ParseTree]:
    """Lexical head of a VP: descend through auxiliary VP chains."""
    n = vp
    head = None
    while n is not None and not n.is_leaf:
        here = next((c for c in n.children if c.is_leaf and c.label.startswith("VB")), None)
        if here is not None:
            head = here
        n = next((c for c in n.children if c.label == "VP"), None)
    return head


def _clause(tree: ParseTree) -> ParseTree:
    n = tree
    while n.label == "ROOT" and len(n.children) == 1 and not n.children[0].is_leaf:
        n = n.children[0]
    return n


def tense_of(tree: ParseTree) -> str:
    """'past' or 'present' from the main clause's finite verb."""
    s = _clause(tree)
    seen = 0
    while s is not None and seen < 20:
        seen += 1
        vp = next((c for c in s.children if c.label == "VP"), None)
        if vp is not None:
            v = _verb_leaf(vp)
            if v is None:
                return "present"
            if v.label in ("VBD", "VBN"):
                return "past"
            if v.label == "MD" and v.token.lower() in _PAST_MODALS:
                return "past"
            return "present"
        s = next((c for c in s.children if c.label in ("S", "SINV", "SQ")), None)
    return "present"


def _is_plural(np: ParseTree) -> bool:
    if np.is_leaf:
        if np.label in ("NNS", "NNPS"):
            return True
        return np.label == "PRP" and np.token.lower() in _PLURAL_PRON
    kids = np.children
    if any(c.label == "CC" for c in kids) and sum(c.label.startswith("NP") for c in kids) >= 2:
        return True
    if kids and kids[0].label.startswith("NP") and not kids[0].is_leaf:
        return _is_plural(kids[0])
    nouns = [c for c in kids if c.is_leaf and (c.label.startswith("NN") or c.label == "PRP" or c.label == "CD")]
    if not nouns:
        return False
    return _is_plural(nouns[-1])


def select_copula(subject: ParseTree, tense: str = "present") -> str:
    """am / is / are / was / were agreeing with ``subject``."""
    plural = _is_plural(subject)
    if [t.lower() for t in subject.tokens()] == ["i"]:
        return "was" if tense == "past" else "am"
    if tense == "past":
        return "were" if plural else "was"
    return "are" if plural else "is"


def _have(subject: ParseTree, tense: str) -> str:
    if tense == "past":
        return "had"
    return "have" if _is_plural(subject) or [t.lower() for t in subject.tokens()] == ["i"] else "has"


def _be(subject: ParseTree, tense: str) -> ParseTree:
    tok = select_copula(subject, tense)
    return T.leaf("VBD" if tense == "past" else ("VBP" if tok in ("are", "am") else "VBZ"), tok)


def _this() -> ParseTree:
    return T.node("NP", [T.leaf("DT", "This")])


def _case(np: ParseTree, table: dict) -> ParseTree:
    """Pronoun case normalisation for a referent moved to a new slot."""
    lv = np.leaves()
    if len(lv) == 1 and lv[0].label in ("PRP", "WP"):
        low = lv[0].token.lower()
        new = table.get(low, low)
        if table is _OBJ_CASE or new != low:
            # object slots are sentence-internal, so only "I" keeps its capital
            tok = new if new == "I" else (new.capitalize() if table is _SUBJ_CASE and lv[0].token[:1].isupper() else new)
            return T.node("NP", [T.leaf("PRP", tok)])
    return np


def _demonstrative(np: ParseTree) -> ParseTree:
    lv = np.leaves()
    if lv and lv[0].label == "DT" and lv[0].token.lower() in ("a", "an"):
        return T.edit(np, {id(lv[0]): (T.leaf("DT", "This"),)})
    return np


def _possessive(np: ParseTree) -> list[ParseTree]:
    lv = np.leaves()
    last = lv[-1] if lv else None
    if last is not None and last.label in ("NNS", "NNPS") and last.token.endswith("s"):
        return [np, T.leaf("POS", "'")]
    return [np, T.leaf("POS", "'s")]


def _insert_object(s: ParseTree, ref: ParseTree, pp: Optional[ParseTree] = None) -> ParseTree:
    """Put ``ref`` into the gap of a clause that lost its object.

    A stranded preposition gets the referent as its object; otherwise the
    referent goes before ``pp`` (when given) or at the end of the lowest
    VP.
    """
    if pp is not None and len(pp.children) == 1 and pp.children[0].is_leaf:
        return T.replace(s, pp, [T.node(pp.label, [pp.children[0], ref])])
    if pp is not None:
        return T.replace(s, pp, [ref, pp])
    vp = next((c for c in s.children if c.label == "VP"), None)
    if vp is None:
        return T.node(s.label, list(s.children) + [ref])
    low = vp
    while True:
        nxt = next((c for c in low.children if c.label == "VP"), None)
        if nxt is None:
            break
        low = nxt
    kids = list(low.children)
    if kids and len(kids[-1].children) == 1 and kids[-1].label == "PP" and kids[-1].children[0].is_leaf:
        stranded = kids[-1]
        return T.replace(s, stranded, [T.node("PP", [stranded.children[0], ref])])
    return T.replace(s, low, [T.node(low.label, kids + [ref])])


def _has_subject(s: ParseTree) -> bool:
    return any(c.label.startswith("NP") for c in s.children) and any(c.label == "VP" for c in s.children)


def _attach_referent(s: ParseTree, ref: ParseTree, pp: Optional[ParseTree] = None) -> list[ParseTree]:
    """Referent as subject (gapped subject) or object (clause has one)."""
    if _has_subject(s):
        return [_insert_object(s, _case(ref, _OBJ_CASE), pp)]
    return [_case(ref, _SUBJ_CASE), *s.children]


def rephrase_with_referent(extracted: ParseTree, referent: ParseTree, mode: str = "direct", subject=None) -> str:
    """Stand-alone sentence for a relative clause given its referent.

    ``direct`` fills the relative-pronoun slot with the referent,
    ``demonstrative`` does the same after turning a/an into "This", and
    ``possessive`` builds referent + 's + ``subject`` + clause.
    """
    if referent is None or not referent.leaves():
        raise MissingReferent(0, "referent is unbound")
    if mode == "possessive":
        subj = list(subject or [])
        kids = _possessive(referent) + subj + list(extracted.children)
        return yield_text(T.finish(kids))
    ref = _demonstrative(referent) if mode == "demonstrative" else referent
    return yield_text(T.finish(_attach_referent(extracted, ref)))


def rephrase_canonical(extracted, subject_hint=None, frame: str = "THIS_BE", tense: str = "present", what=None) -> str:
    """Canonical-phrase sentences: This + BE (+ what), REF + (HAVE) + BE."""
    return yield_text(T.finish(_canonical(extracted, subject_hint, frame, tense, what)))


def _canonical(extracted, subject_hint, frame, tense, what=None) -> list[ParseTree]:
    ext = list(extracted) if isinstance(extracted, (list, tuple)) else [extracted]
    if frame in ("THIS_BE", "THIS_BE_WHAT"):
        subj = _this()
        vp = [_be(subj, tense)]
        if frame == "THIS_BE_WHAT":
            vp.append(T.node("SBAR", [T.node("WHNP", [T.leaf("WP", "what")]), T.node("S", list(what or []) + ext)]))
        else:
            vp.extend(ext)
        return [subj, T.node("VP", vp)]
    if subject_hint is None:
        raise MissingReferent(0, "canonical frame needs a subject")
    subj = _case(subject_hint, _SUBJ_CASE)
    if frame == "REF_HAVE_BE":
        first = ext[0].leaves()[0] if ext and ext[0].leaves() else None
        if first is not None and first.token.lower() == "having":
            rest = T.remove(ext[0], first)
            have = _have(subj, tense)
            tag = {"has": "VBZ", "have": "VBP"}.get(have, "VBD")
            return [subj, T.node("VP", [T.leaf(tag, have), *([rest] if rest else [])])]
        frame = "REF_BE"
    return [subj, T.node("VP", [_be(subj, tense), *ext])]


# --------------------------------------------------------------- extraction
class _Ctx:
    """Per-application state shared by the extractor helpers."""

    def __init__(self, rule, tree: ParseTree, table: CueTable):
        self.rule = rule
        self.tree = tree
        self.table = table
        lv = tree.leaves()
        self.initial = lv[0] if lv else None
        self.pmap = T.parent_map(tree)

    def parent(self, n):
        return self.pmap.get(id(n))

    def before(self, n):
        return T.sibling_before(self.tree, n, self.pmap)

    def after(self, n):
        return T.sibling_after(self.tree, n, self.pmap)

    def comma_before(self, n):
        b = self.before(n)
        return b if T.is_comma(b) else None

    def comma_after(self, n):
        a = self.after(n)
        return a if T.is_comma(a) else None

    def sentence(self, parts) -> ParseTree:
        return T.finish(parts, self.initial)

    def without(self, *nodes) -> ParseTree:
        out = T.remove(self.tree, *nodes)
        if out is None:
            raise RephraseFailure(self.rule.id, "nothing left after extraction")
        return self.sentence([out])

    def fail(self, reason):
        raise RephraseFailure(self.rule.id, reason)


def _need(ctx, m, *names):
    out = []
    for n in names:
        v = m.get(n)
        if v is None or not isinstance(v, ParseTree):
            raise MissingReferent(ctx.rule.id, f"capture {n!r} unbound")
        out.append(v)
    return out if len(out) > 1 else out[0]


def _words(nodes) -> tuple:
    out = []
    for n in nodes:
        out.extend(n.tokens())
    return tuple(out)


_SUBORD_WH = {"when", "whenever", "while", "once", "as", "before", "after", "until"}


def _subordinator(sbar: ParseTree) -> Optional[tuple]:
    """Cue words heading an adverbial SBAR, or None for other SBARs."""
    head = []
    for c in sbar.children:
        if c.label.startswith("S") and not c.is_leaf:
            break
        head.append(c)
    if not head:
        return None
    first = head[0]
    if first.label in ("IN", "RB"):
        words = _words(head)
        if len(words) == 1 and words[0].lower() == "that":
            return None
        return words
    if first.label == "WHADVP" and " ".join(first.tokens()).lower() in _SUBORD_WH:
        return _words(head)
    return None


def _subordinate(ctx, sbar, s, preposed):
    cue = _subordinator(sbar)
    if cue is None:
        return None
    core = ctx.without(sbar, ctx.comma_after(sbar) if preposed else ctx.comma_before(sbar))
    ext = ctx.sentence([s])
    rel = classify_cue(cue, "subordinate", ctx.table)
    if rel is Relation.CONTRAST:
        return [Part(core, CORE), Part(ext, CORE)], cue
    if preposed:
        return [Part(ext, CONTEXT), Part(core, CORE)], cue
    return [Part(core, CORE), Part(ext, CONTEXT)], cue


def _x_coord_clauses(ctx, m):
    top = _need(ctx, m, "top")
    conj = [c for c in top.children if c.label == "S" and not c.is_leaf]
    if len(conj) < 2:
        return None
    ccs = [c for c in top.children if c.label == "CC"]
    cue = tuple(ccs[0].tokens()) if ccs else None
    first, last = top.children.index(conj[0]), top.children.index(conj[-1])
    skip = {"CC", ",", ":", ";", "."}
    pre = [c for c in top.children[:first] if c.label not in skip]
    post = [c for c in top.children[last + 1 :] if c.label not in skip]
    parts = []
    for k, c in enumerate(conj):
        kids = (pre if k == 0 else []) + [c] + (post if k == len(conj) - 1 else [])
        parts.append(Part(ctx.sentence(kids if len(kids) > 1 else [c]), CORE))
    return parts, cue


def _x_adv_post(ctx, m):
    sbar, s = _need(ctx, m, "sbar", "s")
    return _subordinate(ctx, sbar, s, preposed=False)


def _x_adv_pre(ctx, m):
    sbar, s = _need(ctx, m, "sbar", "s")
    return _subordinate(ctx, sbar, s, preposed=True)


def _purpose(ctx, remove_node, s, preposed):
    if preposed:
        core = ctx.without(remove_node, ctx.comma_after(remove_node))
    else:
        core = ctx.without(remove_node, ctx.comma_before(remove_node))
    ext = ctx.sentence(_canonical([s], None, "THIS_BE", tense_of(core)))
    to = next((lf for lf in s.leaves() if lf.token.lower() == "to"), None)
    cue = tuple(lf.token for lf in remove_node.leaves()[: remove_node.leaves().index(to) + 1]) if to else ("to",)
    return [Part(core, CORE), Part(ext, CONTEXT)], cue


def _x_purpose_post(ctx, m):
    s = _need(ctx, m, "s")
    return _purpose(ctx, s, s, preposed=False)


def _x_purpose_pre(ctx, m):
    s = _need(ctx, m, "s")
    return _purpose(ctx, s, s, preposed=True)


def _x_purpose_post_sbar(ctx, m):
    sbar, s = _need(ctx, m, "sbar", "s")
    return _purpose(ctx, sbar, s, preposed=False)


def _x_purpose_pre_sbar(ctx, m):
    sbar, s = _need(ctx, m, "sbar", "s")
    return _purpose(ctx, sbar, s, preposed=True)


def _relative(ctx, m, make_context):
    sbar = _need(ctx, m, "sbar")
    c1, c2 = m.get("c1"), m.get("c2")
    core = ctx.without(c1, sbar, c2)
    ext = ctx.sentence(make_context())
    return [Part(core, CORE), Part(ext, CONTEXT)], None


def _x_rel_prep(ctx, m):
    ref, s, prep = _need(ctx, m, "ref", "s", "prep")
    return _relative(ctx, m, lambda: [s, T.node("PP", [prep, _case(ref, _OBJ_CASE)])])


def _x_rel_where(ctx, m):
    s = _need(ctx, m, "s")
    return _relative(ctx, m, lambda: [s])


def _x_rel_whom(ctx, m):
    ref, s = _need(ctx, m, "ref", "s")
    return _relative(ctx, m, lambda: [_insert_object(s, _case(ref, _OBJ_CASE), m.get("pp"))])


def _x_rel_whose(ctx, m):
    ref, s, wh = _need(ctx, m, "ref", "s", "wh")
    subj = list(wh.children[1:])
    return _relative(ctx, m, lambda: _possessive(ref) + subj + list(s.children))


def _x_rel_who(ctx, m):
    ref, s = _need(ctx, m, "ref", "s")
    return _relative(ctx, m, lambda: _attach_referent(s, ref))


def _x_rel_who_restrictive(ctx, m):
    ref, s = _need(ctx, m, "ref", "s")
    return _relative(ctx, m, lambda: _attach_referent(s, _demonstrative(ref)))


def _x_rel_reduced(ctx, m):
    ref, s = _need(ctx, m, "ref", "s")
    if not _has_subject(s):
        return None
    return _relative(ctx, m, lambda: [_insert_object(s, _case(ref, _OBJ_CASE), m.get("pp"))])


# attribution -------------------------------------------------------------
def _quoted(ctx, n) -> bool:
    b = ctx.before(n)
    lv = n.leaves()
    return (b is not None and b.is_leaf and b.label == "``") or (bool(lv) and lv[0].label == "``")


def _statement(s: ParseTree) -> list[ParseTree]:
    if s.label == "SBAR":
        inner = [c for c in s.children if not c.is_leaf or c.label in ("``", "''")]
        if any(c.label == "S" for c in inner):
            return inner
    return [s]


def _ordered(ctx, *nodes):
    leaves = ctx.tree.leaves()
    pos = {id(lf): i for i, lf in enumerate(leaves)}
    return sorted(nodes, key=lambda n: pos[id(n.leaves()[0])])


def _x_attr_post(ctx, m):
    stmt, np, vp = _need(ctx, m, "stmt", "np", "vp")
    head = _head_verb(vp)
    if head is None or not is_attribution_verb(head.token, ctx.table) or _quoted(ctx, stmt):
        return None
    core = ctx.sentence(_statement(stmt))
    ext = ctx.sentence(_canonical([], None, "THIS_BE_WHAT", tense_of(core), what=_ordered(ctx, np, vp)))
    return [Part(core, CORE), Part(ext, CONTEXT)], (head.token,)


def _x_attr_direct_pre(ctx, m):
    np, vp, sbar, start, end = _need(ctx, m, "np", "vp", "sbar", "start", "end")
    start = start if isinstance(start, ParseTree) else start
    inside = start in sbar.leaves() if start.is_leaf else False
    quote = list(sbar.children) if inside else [start, *sbar.children, end]
    if not inside:
        vp_rest = T.remove(vp, sbar, start, end)
    else:
        vp_rest = T.remove(vp, sbar)
    core = ctx.sentence(quote)
    ext = ctx.sentence(_canonical([], None, "THIS_BE_WHAT", tense_of(T.node("S", [np, vp])), what=[np, vp_rest]))
    return [Part(core, CORE), Part(ext, CONTEXT)], ("``", "''")


def _x_attr_direct_post(ctx, m):
    stmt, np, vp, start, end = _need(ctx, m, "stmt", "np", "vp", "start", "end")
    inside = start in stmt.leaves()
    quote = [stmt] if inside else [start, stmt, end]
    core = ctx.sentence(quote)
    what = _ordered(ctx, np, vp)
    ext = ctx.sentence(_canonical([], None, "THIS_BE_WHAT", tense_of(T.node("S", [np, vp])), what=what))
    return [Part(core, CORE), Part(ext, CONTEXT)], ("``", "''")


def _x_attr_pre(ctx, m):
    np, vp, sbar, s = _need(ctx, m, "np", "vp", "sbar", "s")
    host = ctx.parent(sbar)
    head = _head_verb(host) if host is not None else None
    if head is None or not is_attribution_verb(head.token, ctx.table):
        return None
    core = ctx.sentence([s])
    vp_rest = T.remove(vp, sbar)
    ext = ctx.sentence(_canonical([], None, "THIS_BE_WHAT", tense_of(core), what=[np, vp_rest]))
    return [Part(core, CORE), Part(ext, CONTEXT)], (head.token,)


# coordination --------------------------------------------------------------
_LIST_SHAPE = re.compile(r"(NP)(,NP)*,?(and|or)(.+)")


def _list_shape(np: ParseTree) -> bool:
    sym = []
    for c in np.children:
        if c.label == "NP":
            sym.append("NP")
        elif c.label == "CC":
            sym.append(c.token.lower() if c.is_leaf else " ".join(c.tokens()).lower())
        else:
            sym.append(c.label)
    return _LIST_SHAPE.fullmatch("".join(sym)) is not None


def _topmost(ctx, np) -> bool:
    n = ctx.parent(np)
    while n is not None and n.label != "ROOT":
        if n.label.startswith("NP"):
            return False
        n = ctx.parent(n)
    return True


def _x_coord_vp(ctx, m):
    v1 = _need(ctx, m, "v1")
    coord = ctx.parent(v1)
    conj = [c for c in coord.children if c.label == "VP"]
    ccs = [c for c in coord.children if c.label == "CC"]
    cue = tuple(ccs[0].tokens()) if ccs else None
    drop = {"CC", ",", ":", ";"}
    parts = []
    for k in conj:
        keep = [c for c in coord.children if (c is k) or (c.label != "VP" and c.label not in drop)]
        parts.append(Part(ctx.sentence([T.replace(ctx.tree, coord, keep)]), CORE))
    return parts, cue


_THIRD = {"are": "is", "were": "was", "have": "has", "do": "does", "go": "goes"}


def _third_singular(tok: str) -> str:
    low = tok.lower()
    if low in _THIRD:
        return _THIRD[low]
    if re.search(r"(s|sh|ch|x|z|o)$", low):
        return tok + "es"
    if re.search(r"[^aeiou]y$", low):
        return tok[:-1] + "ies"
    return tok + "s"


def _x_coord_np(ctx, m, subject=False):
    np1 = _need(ctx, m, "np1")
    if not _list_shape(np1) or not _topmost(ctx, np1):
        return None
    conj = [c for c in np1.children if c.label == "NP"]
    ccs = [c for c in np1.children if c.label == "CC"]
    cue = tuple(ccs[0].tokens()) if ccs else None
    verb = _verb_leaf(m["vp"]) if subject and m.get("vp") is not None else None
    parts = []
    for c in conj:
        edits = {id(np1): (c,)}
        if verb is not None and verb.label == "VBP" and not _is_plural(c):
            edits[id(verb)] = (ParseTree("VBZ", (), _third_singular(verb.token), verb.span),)
        parts.append(Part(ctx.sentence([T.edit(ctx.tree, edits)]), CORE))
    return parts, cue


def _x_coord_np_subject(ctx, m):
    return _x_coord_np(ctx, m, subject=True)


# participial phrases ------------------------------------------------------
def _x_part_embedded(ctx, m):
    ref, part = _need(ctx, m, "ref", "part")
    c1, c2 = m.get("c1"), m.get("c2")
    subj = [ref] + ([m["refpp"]] if m.get("refpp") is not None else [])
    subj_np = T.node("NP", subj) if len(subj) > 1 else ref
    core = ctx.without(c1, part, c2)
    ext = ctx.sentence(_canonical([part], subj_np, "REF_HAVE_BE", tense_of(core)))
    return [Part(core, CORE), Part(ext, CONTEXT)], None


def _x_part_restrictive(ctx, m):
    ref, part = _need(ctx, m, "ref", "part")
    core = ctx.without(part)
    ext = ctx.sentence(_canonical([part], _demonstrative(ref), "REF_HAVE_BE", tense_of(core)))
    return [Part(core, CORE), Part(ext, CONTEXT)], None


def _participial(ctx, m, preposed):
    ref, node_, part = _need(ctx, m, "ref", "node", "part")
    if preposed:
        core = ctx.without(node_, ctx.comma_after(node_))
    else:
        core = ctx.without(node_, ctx.comma_before(node_))
    cue = None
    if node_.label in ("PP", "ADVP"):
        head = [c for c in node_.children if c.is_leaf]
        cue = tuple(lf.token for lf in head) or None
    ext = ctx.sentence(_canonical([part], ref, "REF_HAVE_BE", tense_of(core)))
    return [Part(core, CORE), Part(ext, CONTEXT)], cue


def _x_part_post(ctx, m):
    return _participial(ctx, m, preposed=False)


def _x_part_pre(ctx, m):
    return _participial(ctx, m, preposed=True)


# appositions --------------------------------------------------------------
def _proper(np: ParseTree) -> bool:
    lv = [lf for lf in np.leaves() if lf.label != "DT"]
    return bool(lv) and all(lf.label in ("NNP", "NNPS") for lf in lv)


def _x_appos(ctx, m):
    ref, app = _need(ctx, m, "ref", "app")
    c1, c2 = m.get("c1"), m.get("c2")
    n = ctx.after(app)
    while n is not None:  # scan ahead for a coordinating conjunction
        if n.label == "CC" or (n.is_leaf and n.token.lower() in ("and", "or")):
            return None
        n = ctx.after(n)
    core = ctx.without(c1, app, c2)
    subj, pred = (app, ref) if _proper(app) and not _proper(ref) else (ref, app)
    ext = ctx.sentence(_canonical([pred], subj, "REF_BE", tense_of(core)))
    return [Part(core, CORE), Part(ext, CONTEXT)], None


_APPOS_TAGS = re.compile(
    r"(((PRP\$|DT) )*(JJ )*((NN|NNS|NNP|NNPS) ))+"
    r"(((CC|IN) )((PRP\$|DT) )*(JJ )*((NN|NNS|NNP|NNPS) ))*"
)


def _restrictive_appos(ctx):
    """Flat NP = descriptor + trailing proper-name run, first in pre-order."""
    top = _clause(ctx.tree)
    for n in top.preorder():
        if n.is_leaf or not n.label.startswith("NP") or not all(c.is_leaf for c in n.children):
            continue
        kids = list(n.children)
        k = len(kids)
        while k > 0 and kids[k - 1].label in ("NNP", "NNPS") and kids[k - 1].token[:1].isupper():
            k -= 1
        if k == 0 or k == len(kids):
            continue
        tags = "".join(c.label + " " for c in kids[:k])
        if not _APPOS_TAGS.fullmatch(tags) or not kids[k - 1].label.startswith("NN"):
            continue
        if kids[k - 1].label in ("NNP", "NNPS"):
            continue
        return n, kids[:k], kids[k:]
    return None


def _x_appos_restrictive(ctx, m):
    hit = _restrictive_appos(ctx)
    if hit is None:
        return None
    n, desc, name = hit
    core = ctx.sentence([T.replace(ctx.tree, n, [T.node(n.label, name)])])
    ne = T.node("NP", name)
    ext = ctx.sentence(_canonical([T.node("NP", desc)], ne, "REF_BE", tense_of(core)))
    return [Part(core, CORE), Part(ext, CONTEXT)], None


# prepositional, adjectival/adverbial and lead phrases -------------------
def _object_left(ctx, phrase) -> bool:
    host = ctx.parent(phrase)
    if host is None or host.label != "VP":
        return True
    return any(
        c is not phrase and not c.is_leaf and c.label.split("-")[0] in ("NP", "PP", "ADJP", "S", "SBAR")
        for c in host.children
    )


def _this_be(ctx, phrase, *deleted, guard=False):
    if guard and not _object_left(ctx, phrase):
        return None
    core = ctx.without(phrase, *deleted)
    ext = ctx.sentence(_canonical([phrase], None, "THIS_BE", tense_of(core)))
    return [Part(core, CORE), Part(ext, CONTEXT)], None, tuple(phrase.tagged())


def _x_pp_vp(ctx, m):
    pp = _need(ctx, m, "pp")
    return _this_be(ctx, pp, guard=True)


def _x_pp_pre(ctx, m):
    pp = _need(ctx, m, "pp")
    return _this_be(ctx, pp, m.get("c1"))


def _x_pp_offset(ctx, m):
    pp = _need(ctx, m, "pp")
    return _this_be(ctx, pp, m.get("c1"), m.get("c2"), guard=True)


def _x_adv_phrase_pre(ctx, m):
    adv = _need(ctx, m, "adv")
    return _this_be(ctx, adv, m.get("c1"))


def _x_adv_phrase_offset(ctx, m):
    adv = _need(ctx, m, "adv")
    return _this_be(ctx, adv, m.get("c1"), m.get("c2"))


def _x_lead_np(ctx, m):
    np = _need(ctx, m, "np")
    return _this_be(ctx, np, m.get("c1"))


# ------------------------------------------------------------------ catalog
@dataclass(frozen=True)
class TransformationRule:
    id: int
    name: str
    construct: str
    hierarchy: str
    pattern_source: Optional[str]
    relation_source: str
    relation: Optional[Relation] = None
    template: str = ""
    extractor: Callable = field(default=None, repr=False, compare=False)

    @property
    def pattern(self) -> Optional[TreePattern]:
        return _compiled(self.pattern_source) if self.pattern_source else None


@lru_cache(maxsize=None)
def _compiled(src: str) -> TreePattern:
    return compile_pattern(src)


_PARTICIPIAL = "(__=node [== S=s | == (PP|ADVP <+(PP|ADVP) S=s)])"
_PART_CONSTRAINT = "(=s <: (VP=part <<, VBG|VBN))"

E = Relation
_RULES = [
    (1, "CoordinationExtractor", "coordinate-clause", "coordinate",
     "ROOT <<: (S=top < (S ?$.. CC & $.. S))", "cue", None, "S / S", _x_coord_clauses),
    (2, "SubordinationPostExtractor", "adverbial-clause", "subordinate",
     "ROOT <<: (S=top < (NP $.. (VP <+(VP) (SBAR=sbar < (S=s < (NP $.. VP))))))", "cue", None, "S", _x_adv_post),
    (3, "SubordinationPreExtractor", "adverbial-clause", "subordinate",
     "ROOT <<: (S=top < (SBAR=sbar < (S=s < (NP $.. VP)) $.. (NP $.. VP)))", "cue", None, "S", _x_adv_pre),
    (4, "SubordinationPostPurposeExtractor", "adverbial-clause", "subordinate",
     "ROOT <<: (S=top < (NP $.. (VP <+(VP) (NP|PP $.. (S=s <<, (VP <<, /(T|t)o/))))))", "fixed", E.PURPOSE,
     "This + BE + S", _x_purpose_post),
    (5, "SubordinationPrePurposeExtractor", "adverbial-clause", "subordinate",
     "ROOT <<: (S=top < (S=s <<, (VP <<, /(T|t)o/) $.. (NP $.. VP)))", "fixed", E.PURPOSE,
     "This + BE + S", _x_purpose_pre),
    (6, "SubordinationPostInOrderToExtractor", "adverbial-clause", "subordinate",
     "ROOT <<: (S=top < (NP $.. (VP <+(VP) (SBAR=sbar < (S=s <<, (VP <<, /(T|t)o/))))))", "fixed", E.PURPOSE,
     "This + BE + S", _x_purpose_post_sbar),
    (7, "SubordinationPreInOrderToExtractor", "adverbial-clause", "subordinate",
     "ROOT <<: (S=top < (SBAR=sbar < (S=s <<, (VP <<, /(T|t)o/)) $.. (NP $.. VP)))", "fixed", E.PURPOSE,
     "This + BE + S", _x_purpose_pre_sbar),
    (8, "NonRestrictiveRelativeClausePrepWhichExtractor", "relative-clause-nonrestrictive", "subordinate",
     "ROOT <<: (S=top << (NP <, NP=ref & < (/,/=c1 $+ (SBAR=sbar <, (WHPP $+ S=s & <, IN=prep & <- WHNP) & ?$+ /,/=c2))))",
     "fixed", E.ELABORATION_NON_DEFINING, "S + IN + NP", _x_rel_prep),
    (9, "NonRestrictiveRelativeClauseWhereExtractor", "relative-clause-nonrestrictive", "subordinate",
     "ROOT <<: (S=top << (__ < (NP|PP=ref $+ (/,/=c1 $+ (SBAR=sbar <, (WHADVP $+ S=s & <<: WRB) & ?$+ /,/=c2)))))",
     "fixed", E.SPATIAL, "S", _x_rel_where),
    (10, "NonRestrictiveRelativeClauseWhomExtractor", "relative-clause-nonrestrictive", "subordinate",
     "ROOT <<: (S=top << (NP <, NP=ref & < (/,/=c1 $+ (SBAR=sbar <, (WHNP $+ (S=s <, NP & <- (VP ?<+(VP) PP=pp)) "
     "& <<: (WP <: whom)) & ?$+ /,/=c2))))",
     "fixed", E.ELABORATION_NON_DEFINING, "np_rel + vp_rel + NP + PP", _x_rel_whom),
    (11, "NonRestrictiveRelativeClauseWhoseExtractor", "relative-clause-nonrestrictive", "subordinate",
     "ROOT <<: (S=top << (NP < (NP=ref $+ (/,/=c1 $+ (SBAR=sbar <, (WHNP=wh $+ S=s & <, (/WP\\$/ $+ __)) & ?$+ /,/=c2)))))",
     "fixed", E.ELABORATION_NON_DEFINING, "NP + 's + subject + S", _x_rel_whose),
    (12, "NonRestrictiveRelativeClauseWhoWhichExtractor", "relative-clause-nonrestrictive", "subordinate",
     "ROOT <<: (S=top << (NP <, NP=ref & < (/,/=c1 $+ (SBAR=sbar <, (WHNP $+ S=s & <<: WP|WDT) & ?$+ /,/=c2))))",
     "fixed", E.ELABORATION_NON_DEFINING, "NP + S", _x_rel_who),
    (13, "RestrictiveRelativeClauseWhomExtractor", "relative-clause-restrictive", "subordinate",
     "ROOT <<: (S=top << (NP <, NP=ref & < (SBAR=sbar <, (WHNP $+ (S=s <, NP & <- (VP ?<+(VP) PP=pp)) & <<: (WP <: whom)))))",
     "fixed", E.ELABORATION_DEFINING, "S + NP", _x_rel_whom),
    (14, "RestrictiveRelativeClauseWhoseExtractor", "relative-clause-restrictive", "subordinate",
     "ROOT <<: (S=top << (NP < (NP=ref $+ (SBAR=sbar <, (WHNP=wh $+ S=s & <, (/WP\\$/ $+ __))))))",
     "fixed", E.ELABORATION_DEFINING, "NP + 's + subject + S", _x_rel_whose),
    (15, "RestrictiveRelativeClauseWhoWhichThatExtractor", "relative-clause-restrictive", "subordinate",
     "ROOT <<: (S=top << (NP <, (NP=ref $++ (SBAR=sbar <, (WHNP $+ S=s & <<: WP|WDT) & ?$+ /,/=c2))))",
     "fixed", E.ELABORATION_DEFINING, "NP + S", _x_rel_who_restrictive),
    (16, "ReducedRelativeClauseExtractor", "relative-clause-restrictive", "subordinate",
     "ROOT <<: (S=top << (NP <, (NP=ref $++ (SBAR=sbar <: (S=s < (VP ?< (PP=pp ?<: IN)))))))",
     "fixed", E.ELABORATION_DEFINING, "S + NP", _x_rel_reduced),
    (17, "ReportedSpeechPostAttributionExtractor", "reported-speech", "subordinate",
     "ROOT <<: (S=top < (S|SBAR|SBARQ=stmt $.. (NP=np [$,, VP=vp | $.. VP=vp])))",
     "attribution", E.ATTRIBUTION, "This + BE + what + NP VP", _x_attr_post),
    (18, "DirectSpeechPreAttributionExtractor", "reported-speech", "subordinate",
     "ROOT <<: (S=top < (NP=np $.. (VP=vp <+(VP) (SBAR=sbar [,, /``/=start | <<, /``/=start] [.. /''/=end | <<- /''/=end]))))",
     "attribution", E.ATTRIBUTION, "This + BE + what + NP VP", _x_attr_direct_pre),
    (19, "DirectSpeechPostAttributionExtractor", "reported-speech", "subordinate",
     "ROOT <<: (S=top < (S|SBAR|SBARQ=stmt [,, /``/=start | <<, /``/=start] [.. /''/=end | <<- /''/=end] "
     "$.. (NP=np [$,, VP=vp | $.. VP=vp])))",
     "attribution", E.ATTRIBUTION, "This + BE + what + NP VP", _x_attr_direct_post),
    (20, "SubordinationPostAttributionExtractor", "reported-speech", "subordinate",
     "ROOT <<: (S=top < (NP=np $.. (VP=vp <+(VP) (SBAR=sbar < S=s))))",
     "attribution", E.ATTRIBUTION, "This + BE + what + NP VP", _x_attr_pre),
    (21, "CoordinateVerbPhraseExtractor", "coordinate-VP", "coordinate",
     "ROOT <<: (S=top < (NP $.. (VP <+(VP) (VP=v1 > VP ?$.. CC & $.. VP))))", "cue", None, "NP + VP", _x_coord_vp),
    (22, "CoordinateNounPhraseObjectExtractor", "coordinate-NP", "coordinate",
     "ROOT <<: (S=top < (NP $.. (VP << (NP=np1 < (NP ?$.. CC & $.. NP)))))", "cue", None, "S[np1 := NP]", _x_coord_np),
    (23, "CoordinateNounPhraseSubjectExtractor", "coordinate-NP", "coordinate",
     "ROOT <<: (S=top < (NP=np1 < (NP ?$.. CC & $.. NP) $.. VP=vp))", "cue", None, "NP + VP", _x_coord_np_subject),
    (24, "NonRestrictiveEmbeddedParticipialExtractor", "participial", "subordinate",
     "ROOT <<: (S=top < VP & << (NP|PP <, (NP=ref ?$+ PP=refpp & $++ (/,/=c1 $+ (VP=part "
     "[<, (ADVP|PP $+ VBG|VBN) | <, VBG|VBN] & ?$+ /,/=c2)))))",
     "fixed", E.ELABORATION_NON_DEFINING, "NP + BE + VP", _x_part_embedded),
    (25, "RestrictivePostParticipialExtractor", "participial", "subordinate",
     "ROOT <<: (S=top < VP & << (NP|PP <, (NP=ref $+ (VP=part [<, (ADVP|PP $+ VBG|VBN) | <, VBG|VBN])) "
     "& [> (PP !> S) | > (VP > S)]))",
     "fixed", E.ELABORATION_DEFINING, "NP + BE + VP", _x_part_restrictive),
    (26, "NonRestrictivePostParticipialExtractor", "participial", "subordinate",
     "ROOT <<: (S=top < (NP=ref $.. (VP <+(VP) (NP|PP $.. " + _PARTICIPIAL + ")))) : " + _PART_CONSTRAINT,
     "cue", E.ELABORATION_NON_DEFINING, "NP + (HAVE) + BE + participle", _x_part_post),
    (27, "NonRestrictivePreParticipialExtractor", "participial", "subordinate",
     "ROOT <<: (S=top < " + _PARTICIPIAL + ") : " + _PART_CONSTRAINT + " : (=node $.. (NP=ref $.. VP))",
     "cue", E.ELABORATION_NON_DEFINING, "NP + (HAVE) + BE + participle", _x_part_pre),
    (28, "NonRestrictiveAppositionExtractor", "apposition-nonrestrictive", "subordinate",
     "ROOT <<: (S=top < VP & << (NP=ref $+ (/,/=c1 $+ (NP=app !$ CC & ?$+ /,/=c2))))",
     "fixed", E.ELABORATION, "NP + BE + NP", _x_appos),
    (29, "RestrictiveAppositionExtractor", "apposition-restrictive", "subordinate",
     None, "fixed", E.ELABORATION, "named entity + BE + descriptor", _x_appos_restrictive),
    (30, "VerbPhrasePrepositionalPhraseExtractor", "prepositional", "subordinate",
     "ROOT <<: (S=top <+(S|VP) (VP < (PP=pp $- NP|PP)) & < VP)", "entity", E.ELABORATION, "This + BE + PP", _x_pp_vp),
    (31, "PrePrepositionalPhraseExtractor", "prepositional", "subordinate",
     "ROOT <<: (S=top <, (PP=pp ?$+ /,/=c1 & $++ VP))", "entity", E.ELABORATION, "This + BE + PP", _x_pp_pre),
    (32, "OffsetPrepositionalPhraseExtractor", "prepositional", "subordinate",
     "ROOT <<: (S=top < VP & << (/,/=c1 $+ (PP=pp ?$+ /,/=c2)))", "entity", E.ELABORATION, "This + BE + PP", _x_pp_offset),
    (33, "PreAdjectivalAdverbialPhraseExtractor", "adjectival-adverbial", "subordinate",
     "ROOT <<: (S=top <, (ADJP|ADVP=adv $+ (/,/=c1 $++ VP)))", "entity", E.ELABORATION, "This + BE + ADJP|ADVP",
     _x_adv_phrase_pre),
    (34, "OffsetAdjectivalAdverbialPhraseExtractor", "adjectival-adverbial", "subordinate",
     "ROOT <<: (S=top < VP & << (/,/=c1 $+ (ADJP|ADVP=adv ?$+ /,/=c2)))", "entity", E.ELABORATION,
     "This + BE + ADJP|ADVP", _x_adv_phrase_offset),
    (35, "LeadNounPhraseExtractor", "lead-NP", "subordinate",
     "ROOT <<: (S=top <, (NP-TMP|NP=np $+ (/,/=c1 $+ NP & $++ VP)))", "entity", E.ELABORATION,
     "This + BE + NP", _x_lead_np),
]

_BY_ID = {
    r[0]: TransformationRule(r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8]) for r in _RULES
}

#: Execution order (see the README for why it differs from numeric order).
DEFAULT_ORDER = (
    17, 18, 19, 20,
    1,
    3, 2, 4, 5, 6, 7,
    8, 9, 10, 11, 12,
    28,
    13, 14, 15, 16,
    24, 25, 26, 27,
    21, 22, 23,
    29,
    31, 32, 33, 34, 35,
    30,
)


def get_rule(rule_id: int) -> TransformationRule:
    return _BY_ID[rule_id]


def rule_catalog(order: Optional[Sequence[int]] = None) -> list[TransformationRule]:
    """The 35 rules in execution order."""
    order = tuple(order) if order is not None else DEFAULT_ORDER
    if sorted(order) != sorted(_BY_ID):
        raise ValueError("order must list each rule id 1..35 exactly once")
    return [_BY_ID[i] for i in order]


# ---------------------------------------------------------------- applying
def _iter(pattern, index):
    from .tpattern import _iter_matches

    return _iter_matches(pattern, index)


def apply_rule(
    rule: TransformationRule,
    tree: ParseTree,
    table: Optional[CueTable] = None,
    index: Optional[TreeIndex] = None,
) -> Optional[RuleOutcome]:
    """Apply one rule to a ROOT sentence tree.

    Returns ``None`` when the pattern does not match or every match is
    rejected by the rule's guards.  Raises :class:`RephraseFailure` when
    matches exist but none could be rephrased.
    """
    table = table or default_table()
    ctx = _Ctx(rule, tree, table)
    failure = None
    matches = [None] if rule.pattern is None else _iter(rule.pattern, index or TreeIndex(tree))
    for m in matches:
        try:
            got = rule.extractor(ctx, m)
        except RephraseFailure as exc:
            if exc.rule_id == 0:
                exc = type(exc)(rule.id, exc.reason)
            failure = failure or exc
            continue
        if got is None:
            continue
        parts, cue, *rest = got
        scan = rest[0] if rest else ()
        if len(parts) < 2 or any(not p.tree.leaves() for p in parts):
            failure = failure or RephraseFailure(rule.id, "split produced an empty part")
            continue
        hint = rule.relation if rule.relation_source in ("fixed", "attribution") else None
        return RuleOutcome(tuple(parts), tuple(cue) if cue else None, hint, rule.id, tuple(scan))
    if failure is not None:
        raise failure
    return None


def resolve_relation(rule: TransformationRule, outcome: RuleOutcome, table: Optional[CueTable] = None) -> Relation:
    """Relation for the node created by ``outcome``."""
    table = table or default_table()
    src = rule.relation_source
    if src in ("fixed", "attribution"):
        return outcome.relation_hint or rule.relation
    if src == "entity":
        return classify_entities(outcome.scan, table) or rule.relation or Relation.ELABORATION
    cue = outcome.cue
    rel = table.lookup(" ".join(cue)) if cue else None
    if rel is None:
        if rule.relation is not None:
            return rule.relation
        rel = classify_cue(None, rule.hierarchy, table)
    if rule.hierarchy == "subordinate":
        rel = refine_temporal(rel, cue)
    return rel
