"""Tregex-style tree pattern compiler and matcher.

Supported relations (``A op B``, A is the described node)::

    <    A is the parent of B          >    A is a child of B
    <<   A dominates B                 <<:  unary chain from A down to B
    <:   B is A's only child           <,   B is A's first child
    <-   B is A's last child           <<,  B is a leftmost descendant of A
    <<-  B is a rightmost descendant   <+(C) A dominates B via C nodes
    $    A and B are sisters           $.. / $++  A is a left sister of B
    $+   A immediately precedes B      $-   A immediately follows B
    $,,  A is a right sister of B      ..   A precedes B
    ,,   A follows B                   ==   A is B

plus ``!`` (negation), ``?`` (optional), ``[a | b]`` (disjunction), ``&``
(conjunction, also implicit), ``=name`` captures and ``: (=name ...)``
constraints.  Tokens are visible as their own nodes below each
preterminal, as in Tregex.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .ptb import ParseTree

__all__ = [
    "PatternError",
    "PatternSyntaxError",
    "UnknownOperator",
    "DuplicateCapture",
    "NodeDesc",
    "Relation",
    "Conj",
    "Disj",
    "NodeExpr",
    "TreePattern",
    "TokenNode",
    "TreeIndex",
    "MatchBinding",
    "compile",
    "match_first",
    "match_all",
    "RELATIONS",
]


class PatternError(ValueError):
    pass


class PatternSyntaxError(PatternError):
    def __init__(self, position, expected, pattern=""):
        super().__init__(f"at {position}: expected {expected}" + (f" in {pattern!r}" if pattern else ""))
        self.position = position
        self.expected = expected


class UnknownOperator(PatternError):
    def __init__(self, op, position=None):
        super().__init__(f"unsupported relation {op!r}")
        self.op = op
        self.position = position


class DuplicateCapture(PatternError):
    def __init__(self, name):
        super().__init__(f"capture {name!r} declared twice")
        self.name = name


RELATIONS = frozenset(
    ["<", ">", "<<", "<<:", "<:", "<,", "<-", "<<,", "<<-", "<+", "$", "$..", "$++",
     "$+", "$-", "$,,", "..", ",,", "=="]
)


# --------------------------------------------------------------------- AST
@dataclass(frozen=True)
class NodeDesc:
    kind: str  # "labels" | "regex" | "any" | "ref"
    value: Union[tuple, str, None] = None
    name: Optional[str] = None

    def test(self, label: str) -> bool:
        if self.kind == "any":
            return True
        if self.kind == "labels":
            return label in self.value
        if self.kind == "regex":
            return _regex(self.value).fullmatch(label) is not None
        raise AssertionError("back references are resolved by the matcher")

    def __str__(self):
        if self.kind == "any":
            body = "__"
        elif self.kind == "labels":
            body = "|".join(self.value)
        elif self.kind == "regex":
            body = f"/{self.value}/"
        else:
            return f"={self.name}"
        return body + (f"={self.name}" if self.name else "")


@dataclass(frozen=True)
class NodeExpr:
    desc: NodeDesc
    rels: "Conj"


@dataclass(frozen=True)
class Relation:
    op: str
    target: NodeExpr
    chain: Optional[NodeDesc] = None  # for <+(C)
    negated: bool = False
    optional: bool = False


@dataclass(frozen=True)
class Conj:
    items: tuple = ()
    negated: bool = False
    optional: bool = False


@dataclass(frozen=True)
class Disj:
    branches: tuple = ()
    negated: bool = False
    optional: bool = False


_RE_CACHE: dict = {}


def _regex(src):
    r = _RE_CACHE.get(src)
    if r is None:
        r = _RE_CACHE[src] = re.compile(src)
    return r


@dataclass(frozen=True)
class TreePattern:
    source: str
    root: NodeExpr
    constraints: tuple = ()
    captures: frozenset = field(default_factory=frozenset)

    def __str__(self):
        return self.source


# ------------------------------------------------------------------ parser
_LABEL = r"(?:``|''|[A-Za-z0-9_\-]+\$?)"
_LABEL_RE = re.compile(_LABEL + r"(?:\|" + _LABEL + r")*")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_OP_RE = re.compile(r"[<>$,.=+\-:]+")


class _Parser:
    def __init__(self, text):
        self.s = text
        self.i = 0

    def err(self, expected):
        raise PatternSyntaxError(self.i, expected, self.s)

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self):
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def eat(self, ch):
        if self.peek() != ch:
            self.err(repr(ch))
        self.i += 1

    def pattern(self):
        root = self.node_expr(top=True)
        constraints = []
        while self.peek() == ":":
            self.i += 1
            self.eat("(")
            expr = self.node_expr()
            if expr.desc.kind != "ref":
                self.err("a back reference '=name' opening the constraint")
            constraints.append(expr)
            self.eat(")")
        if self.peek():
            self.err("end of pattern")
        return root, tuple(constraints)

    def node_expr(self, top=False):
        desc = self.node_desc()
        rels = self.conj(stop=")" if not top else ":")
        return NodeExpr(desc, rels)

    def node_desc(self):
        c = self.peek()
        if not c:
            self.err("node description")
        if c == "=":
            self.i += 1
            m = _NAME_RE.match(self.s, self.i)
            if not m:
                self.err("capture name")
            self.i = m.end()
            return NodeDesc("ref", None, m.group())
        if c == "/":
            j = self.i + 1
            while j < len(self.s) and self.s[j] != "/":
                j += 2 if self.s[j] == "\\" else 1
            if j >= len(self.s):
                self.err("closing '/'")
            src = self.s[self.i + 1:j]
            try:
                re.compile(src)
            except re.error:
                self.err("valid regular expression")
            self.i = j + 1
            desc = NodeDesc("any") if src == ".*" else NodeDesc("regex", src)
        elif self.s.startswith("__", self.i) and not _LABEL_RE.match(self.s, self.i + 2):
            self.i += 2
            desc = NodeDesc("any")
        else:
            m = _LABEL_RE.match(self.s, self.i)
            if not m:
                self.err("node label")
            self.i = m.end()
            desc = NodeDesc("labels", tuple(m.group().split("|")))
        if self.i < len(self.s) and self.s[self.i] == "=" and not self.s.startswith("==", self.i):
            self.i += 1
            m = _NAME_RE.match(self.s, self.i)
            if not m:
                self.err("capture name")
            self.i = m.end()
            desc = NodeDesc(desc.kind, desc.value, m.group())
        return desc

    def conj(self, stop):
        items = []
        while True:
            c = self.peek()
            if not c or c in ")]|" or (c == ":" and stop == ":" and self._bare_colon()):
                break
            if c == "&":
                if not items:
                    self.err("relation before '&'")
                self.i += 1
                continue
            items.append(self.item())
        return Conj(tuple(items))

    def _bare_colon(self):
        j = self.i + 1
        return j >= len(self.s) or self.s[j].isspace() or self.s[j] == "("

    def item(self):
        neg = opt = False
        c = self.peek()
        if c == "!":
            neg = True
            self.i += 1
            c = self.peek()
        elif c == "?":
            opt = True
            self.i += 1
            c = self.peek()
        if c == "[":
            self.i += 1
            branches = [self.conj(stop="]")]
            while self.peek() == "|":
                self.i += 1
                branches.append(self.conj(stop="]"))
            self.eat("]")
            for b in branches:
                if not b.items:
                    self.err("relation inside '[...]'")
            if len(branches) == 1:
                return Conj(branches[0].items, neg, opt)
            return Disj(tuple(branches), neg, opt)
        return self.relation(neg, opt)

    def relation(self, neg, opt):
        self.ws()
        start = self.i
        m = _OP_RE.match(self.s, self.i)
        if not m:
            self.err("relation operator")
        op = m.group()
        chain = None
        if op == "<+":
            self.i = m.end()
            if self.i >= len(self.s) or self.s[self.i] != "(":
                self.err("'(' after <+")
            self.i += 1
            chain = self.node_desc()
            if chain.name or chain.kind == "ref":
                self.err("plain label in <+(...)")
            self.eat(")")
        else:
            if op not in RELATIONS:
                raise UnknownOperator(op, start)
            self.i = m.end()
        if self.peek() == "(":
            self.i += 1
            target = self.node_expr()
            self.eat(")")
        else:
            if not self.peek() or self.peek() in ")]|&":
                self.err("node after relation")
            target = NodeExpr(self.node_desc(), Conj())
        if op == "$++":
            op = "$.."
        return Relation(op, target, chain, neg, opt)


def _captures(expr, declared: set, refs: set):
    """Collect capture names, rejecting duplicates outside disjunctions."""

    def node(n, acc):
        if n.desc.kind == "ref":
            refs.add(n.desc.name)
        elif n.desc.name:
            if n.desc.name in acc:
                raise DuplicateCapture(n.desc.name)
            acc.add(n.desc.name)
        group(n.rels, acc)

    def group(g, acc):
        if isinstance(g, Relation):
            node(g.target, acc)
        elif isinstance(g, Conj):
            for it in g.items:
                group(it, acc)
        else:
            union = set()
            for b in g.branches:
                local = set(acc)
                group(b, local)
                union |= local - acc
            acc |= union

    node(expr, declared)


def compile(pattern: str) -> TreePattern:
    """Compile a pattern string; raises PatternError subclasses."""
    if not isinstance(pattern, str) or not pattern.strip():
        raise PatternSyntaxError(0, "non-empty pattern", pattern or "")
    root, constraints = _Parser(pattern).pattern()
    declared: set = set()
    refs: set = set()
    _captures(root, declared, refs)
    for c in constraints:
        _captures(c, declared, refs)
    missing = refs - declared
    if missing:
        raise PatternSyntaxError(0, f"declared capture for ={sorted(missing)[0]}", pattern)
    return TreePattern(pattern, root, constraints, frozenset(declared))


# ------------------------------------------------------------------- index
class TokenNode:
    """A token seen as a node: the only child of its preterminal."""

    __slots__ = ("preterminal",)

    def __init__(self, preterminal):
        self.preterminal = preterminal

    @property
    def label(self):
        return self.preterminal.token

    @property
    def span(self):
        return self.preterminal.span

    def __repr__(self):
        return f"TokenNode({self.label!r})"


class TreeIndex:
    """Pre-order arrays over a tree, tokens included as nodes."""

    def __init__(self, tree: ParseTree):
        self.tree = tree
        self.nodes: list = []
        self.labels: list = []
        self.parent: list = []
        self.children: list = []
        self.spans: list = []
        self.end: list = []  # pre-order index one past the subtree

        def visit(n, par):
            i = len(self.nodes)
            self.nodes.append(n)
            self.labels.append(n.label)
            self.parent.append(par)
            self.children.append([])
            self.spans.append(n.span)
            self.end.append(None)
            if par >= 0:
                self.children[par].append(i)
            if isinstance(n, ParseTree):
                if n.is_leaf:
                    visit(TokenNode(n), i)
                else:
                    for c in n.children:
                        visit(c, i)
            self.end[i] = len(self.nodes)

        visit(tree, -1)
        self.pos = [0] * len(self.nodes)
        for kids in self.children:
            for k, c in enumerate(kids):
                self.pos[c] = k

    def __len__(self):
        return len(self.nodes)

    def index_of(self, node) -> int:
        for i, n in enumerate(self.nodes):
            if n is node:
                return i
        raise KeyError(node)

    # witness generators: yield indices in pre-order
    def witnesses(self, op, a, chain=None):
        kids = self.children
        par = self.parent
        if op == "<":
            yield from kids[a]
        elif op == ">":
            if par[a] >= 0:
                yield par[a]
        elif op == "<<":
            yield from range(a + 1, self.end[a])
        elif op == "<<:":
            n = a
            while len(kids[n]) == 1:
                n = kids[n][0]
                yield n
        elif op == "<:":
            if len(kids[a]) == 1:
                yield kids[a][0]
        elif op == "<,":
            if kids[a]:
                yield kids[a][0]
        elif op == "<-":
            if kids[a]:
                yield kids[a][-1]
        elif op == "<<,":
            n = a
            while kids[n]:
                n = kids[n][0]
                yield n
        elif op == "<<-":
            out = []
            n = a
            while kids[n]:
                n = kids[n][-1]
                out.append(n)
            yield from out
        elif op == "<+":
            # zero or more intermediate nodes matching chain, then a child
            out = []
            stack = [a]
            seen = set()
            while stack:
                n = stack.pop()
                for c in kids[n]:
                    if c not in seen:
                        seen.add(c)
                        out.append(c)
                        if chain.test(self.labels[c]):
                            stack.append(c)
            yield from sorted(out)
        elif op in ("$", "$..", "$+", "$-", "$,,"):
            p = par[a]
            if p < 0:
                return
            sis = kids[p]
            k = self.pos[a]
            if op == "$":
                yield from (s for s in sis if s != a)
            elif op == "$..":
                yield from sis[k + 1:]
            elif op == "$,,":
                yield from sis[:k]
            elif op == "$+":
                if k + 1 < len(sis):
                    yield sis[k + 1]
            elif op == "$-":
                if k > 0:
                    yield sis[k - 1]
        elif op == "..":
            s_end = self.spans[a][1]
            for j in range(len(self.nodes)):
                if self.spans[j][0] >= s_end:
                    yield j
        elif op == ",,":
            s_start = self.spans[a][0]
            for j in range(len(self.nodes)):
                if self.spans[j][1] <= s_start:
                    yield j
        elif op == "==":
            yield a
        else:  # pragma: no cover - compile rejects unknown ops
            raise UnknownOperator(op)


# ----------------------------------------------------------------- matcher
@dataclass(frozen=True, eq=False)
class MatchBinding:
    root_match: object
    bindings: dict
    key: tuple = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, MatchBinding) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __getitem__(self, name):
        return self.bindings[name]

    def get(self, name, default=None):
        return self.bindings.get(name, default)


def _match_node(ix, expr: NodeExpr, a, env) -> Iterator[dict]:
    d = expr.desc
    if d.kind == "ref":
        if env.get(d.name) != a:
            return
    else:
        if not d.test(ix.labels[a]):
            return
        if d.name:
            prev = env.get(d.name)
            if prev is not None and prev != a:
                return
            env = dict(env)
            env[d.name] = a
    yield from _match_group(ix, expr.rels, a, env)


def _match_group(ix, g, a, env) -> Iterator[dict]:
    if g.negated:
        inner = _strip(g)
        for _ in _match_group(ix, inner, a, env):
            return
        yield env
        return
    if g.optional:
        inner = _strip(g)
        found = False
        for e in _match_group(ix, inner, a, env):
            found = True
            yield e
        if not found:
            yield env
        return
    if isinstance(g, Relation):
        for b in ix.witnesses(g.op, a, g.chain):
            yield from _match_node(ix, g.target, b, env)
    elif isinstance(g, Conj):
        yield from _match_seq(ix, g.items, 0, a, env)
    else:
        for br in g.branches:
            yield from _match_group(ix, br, a, env)


def _match_seq(ix, items, k, a, env):
    if k == len(items):
        yield env
        return
    for e in _match_group(ix, items[k], a, env):
        yield from _match_seq(ix, items, k + 1, a, e)


def _strip(g):
    if isinstance(g, Relation):
        return Relation(g.op, g.target, g.chain)
    if isinstance(g, Conj):
        return Conj(g.items)
    return Disj(g.branches)


def _iter_matches(pattern: TreePattern, tree) -> Iterator[MatchBinding]:
    ix = tree if isinstance(tree, TreeIndex) else TreeIndex(tree)
    seen = set()
    for r in range(len(ix)):
        for env in _match_node(ix, pattern.root, r, {}):
            for env2 in _match_constraints(ix, pattern.constraints, 0, env):
                key = (r, tuple(sorted(env2.items())))
                if key in seen:
                    continue
                seen.add(key)
                yield MatchBinding(
                    ix.nodes[r], {k: ix.nodes[v] for k, v in sorted(env2.items())}, key
                )


def _match_constraints(ix, cons, k, env):
    if k == len(cons):
        yield env
        return
    c = cons[k]
    a = env.get(c.desc.name)
    if a is None:
        return
    for e in _match_node(ix, c, a, env):
        yield from _match_constraints(ix, cons, k + 1, e)


def _as_pattern(p):
    return compile(p) if isinstance(p, str) else p


def match_first(pattern, tree) -> Optional[MatchBinding]:
    """First match in deterministic order, or None."""
    for m in _iter_matches(_as_pattern(pattern), tree):
        return m
    return None


def match_all(pattern, tree) -> list[MatchBinding]:
    """All distinct matches: roots in pre-order, witnesses in pre-order."""
    return list(_iter_matches(_as_pattern(pattern), tree))
