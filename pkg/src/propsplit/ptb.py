"""Penn Treebank bracketed trees: reading, writing and surface text.

A tree is made of immutable :class:`ParseTree` nodes.  Preterminals are
leaves: ``(NN dog)`` is a single node with label ``NN`` and token ``dog``.
"""

from __future__ import annotations

import re
from typing import Iterator, Sequence

__all__ = [
    "ParseTree",
    "PTBError",
    "UnbalancedBrackets",
    "EmptyLabel",
    "EmptyTree",
    "parse_bracketed",
    "serialize_bracketed",
    "yield_text",
    "detokenize",
    "split_bracketed",
]


class PTBError(ValueError):
    """Base class for malformed bracketed input."""

    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} at offset {position}")
        self.position = position


class UnbalancedBrackets(PTBError):
    pass


class EmptyLabel(PTBError):
    pass


class EmptyTree(PTBError):
    pass


class ParseTree:
    """Labelled ordered tree node.

    ``span`` is the half-open interval of token indices covered by the
    node.  Nodes are immutable; rewriting code builds new trees with
    :meth:`node` and :meth:`leaf` and the spans are recomputed.
    """

    __slots__ = ("label", "children", "token", "span", "_hash")

    def __init__(self, label, children=(), token=None, span=(0, 0)):
        if not label:
            raise EmptyLabel("empty node label")
        children = tuple(children)
        if (token is None) == (not children):
            raise ValueError("a node is a leaf iff it has a token and no children")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "token", token)
        object.__setattr__(self, "span", tuple(span))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("ParseTree is immutable")

    # construction --------------------------------------------------------
    @classmethod
    def leaf(cls, label: str, token: str) -> "ParseTree":
        return cls(label, (), token, (0, 1))

    @classmethod
    def node(cls, label: str, children: Sequence["ParseTree"]) -> "ParseTree":
        """Build an inner node, re-spanning the children from 0."""
        return _respan(cls(label, tuple(children), None, (0, 0)), 0)

    def relabel(self, label: str) -> "ParseTree":
        return ParseTree(label, self.children, self.token, self.span)

    # navigation -----------------------------------------------------------
    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    def leaves(self) -> list["ParseTree"]:
        if self.is_leaf:
            return [self]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out

    def tokens(self) -> list[str]:
        return [lf.token for lf in self.leaves()]

    def tagged(self) -> list[tuple[str, str]]:
        return [(lf.token, lf.label) for lf in self.leaves()]

    def preorder(self) -> Iterator["ParseTree"]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def __len__(self):
        return self.span[1] - self.span[0]

    def __bool__(self):
        return True

    def size(self) -> int:
        return sum(1 for _ in self.preorder())

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(c.depth() for c in self.children)

    # equality is structural (labels, tokens, shape), spans follow from shape
    def _key(self):
        if self.is_leaf:
            return (self.label, self.token)
        return (self.label, tuple(c._key() for c in self.children))

    def __eq__(self, other):
        if not isinstance(other, ParseTree):
            return NotImplemented
        return self is other or self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self._key()))
        return self._hash

    def __repr__(self):
        return f"ParseTree({serialize_bracketed(self)!r})"

    def __str__(self):
        return serialize_bracketed(self)

    def __reduce__(self):
        return (parse_bracketed, (serialize_bracketed(self),))


def _respan(t: ParseTree, start: int) -> ParseTree:
    if t.is_leaf:
        return ParseTree(t.label, (), t.token, (start, start + 1))
    kids = []
    pos = start
    for c in t.children:
        c2 = _respan(c, pos)
        kids.append(c2)
        pos = c2.span[1]
    return ParseTree(t.label, kids, None, (start, pos))


_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def parse_bracketed(text: str) -> ParseTree:
    """Parse one bracketed tree; wrap it in ROOT when the root is not ROOT.

    An unlabelled outermost bracket with a single child, as in WSJ files
    ``( (S ...) )``, is read as the ROOT wrapper.  ``-NONE-`` subtrees are
    dropped together with any node they leave empty.
    """
    toks = [(m.group(), m.start()) for m in _TOKEN_RE.finditer(text)]
    if not toks:
        raise EmptyTree("no tree in input", 0)
    pos = 0

    def parse_node(depth):
        nonlocal pos
        tok, off = toks[pos]
        if tok != "(":
            raise UnbalancedBrackets(f"expected '(' but found {tok!r}", off)
        pos += 1
        if pos >= len(toks):
            raise UnbalancedBrackets("unexpected end of input", len(text))
        label = None
        tok, loff = toks[pos]
        if tok not in "()":
            label = tok
            pos += 1
        kids = []
        token = None
        while True:
            if pos >= len(toks):
                raise UnbalancedBrackets("unexpected end of input", len(text))
            tok, off2 = toks[pos]
            if tok == ")":
                pos += 1
                break
            if tok == "(":
                kids.append(parse_node(depth + 1))
            else:
                if token is not None or kids:
                    raise UnbalancedBrackets(f"unexpected token {tok!r}", off2)
                token = tok
                pos += 1
        if token is not None and kids:
            raise UnbalancedBrackets("node mixes a token and subtrees", off)
        if label is None:
            if depth == 0 and len([k for k in kids if k is not None]) == 1 and token is None:
                label = "ROOT"
            else:
                raise EmptyLabel("bracket without a label", loff)
        if label == "-NONE-":
            return None
        if token is not None:
            return ParseTree(label, (), token, (0, 1))
        kids = [k for k in kids if k is not None]
        if not kids:
            if depth == 0 and label != "-NONE-":
                raise EmptyTree(f"node {label!r} has no content", off)
            return None
        return ParseTree(label, kids, None, (0, 0))

    root = parse_node(0)
    if pos != len(toks):
        raise UnbalancedBrackets("trailing material after tree", toks[pos][1])
    if root is None:
        raise EmptyTree("tree is empty after removing empty categories", 0)
    if root.label != "ROOT":
        root = ParseTree("ROOT", (root,), None, (0, 0))
    return _respan(root, 0)


def serialize_bracketed(tree: ParseTree) -> str:
    """Canonical one-line bracketed form."""
    parts: list[str] = []

    def walk(n):
        if n.is_leaf:
            parts.append(f"({n.label} {n.token})")
            return
        parts.append(f"({n.label}")
        for c in n.children:
            parts.append(" ")
            walk(c)
        parts.append(")")

    walk(tree)
    return "".join(parts)


_NO_SPACE_BEFORE = {",", ".", ";", ":", "'", "''", "?", "!", "%", "n't", "N'T", "-RRB-", ")", "..."}
_NO_SPACE_AFTER = {"``", "-LRB-", "(", "$", "#"}
_CLITICS = re.compile(r"^'(s|S|re|RE|ll|LL|ve|VE|d|D|m|M)$")
_RENDER = {"-LRB-": "(", "-RRB-": ")", "-LSB-": "[", "-RSB-": "]", "-LCB-": "{", "-RCB-": "}"}


def detokenize(tokens: Sequence[str]) -> str:
    """Join tokens with single spaces, attaching punctuation and clitics."""
    out: list[str] = []
    glue_next = False
    open_dq = False
    for tok in tokens:
        text = _RENDER.get(tok, tok)
        attach = glue_next
        glue_next = False
        if tok == '"':
            if open_dq:
                attach = True
            else:
                glue_next = True
            open_dq = not open_dq
        elif tok in _NO_SPACE_BEFORE or _CLITICS.match(tok):
            attach = True
        if tok in _NO_SPACE_AFTER:
            glue_next = True
        if out and not attach:
            out.append(" ")
        out.append(text)
    return "".join(out).strip()


def yield_text(tree: ParseTree) -> str:
    """Surface string of the tree's tokens."""
    return detokenize(tree.tokens())


def split_bracketed(text: str) -> Iterator[tuple[int, str]]:
    """Split a file body into bracketed trees.

    Yields ``(line_number, chunk)`` pairs.  A tree ends when its brackets
    balance, so both one-tree-per-line and pretty-printed files work.
    """
    buf: list[str] = []
    depth = 0
    start = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not buf and not stripped:
            continue
        if not buf:
            start = lineno
        buf.append(line)
        for m in _TOKEN_RE.finditer(line):
            if m.group() == "(":
                depth += 1
            elif m.group() == ")":
                depth -= 1
                if depth < 0:
                    raise UnbalancedBrackets(f"line {lineno}: unexpected ')'", m.start())
        if depth == 0:
            chunk = "\n".join(buf).strip()
            buf = []
            if chunk:
                yield start, chunk
    if buf and "\n".join(buf).strip():
        raise UnbalancedBrackets(f"line {start}: tree is not closed", None)
