"""Corpus statistics for simplification output.

All count-based metrics are computed with exact fractions; BLEU needs a
geometric mean and is a float.  Tokenisation is whitespace splitting of
already tokenised text unless ``split_punct`` is set.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence, Union

__all__ = [
    "EmptyOutput",
    "NoReferences",
    "CorpusFormatError",
    "CorpusLine",
    "SariScore",
    "OUTPUT_SEP",
    "tokenize",
    "tokens_per_sentence",
    "sentences_per_input",
    "percent_same",
    "levenshtein_words",
    "mean_levenshtein",
    "bleu",
    "sari",
    "corpus_sari",
    "read_corpus",
    "evaluate_corpus",
    "format_report",
]

OUTPUT_SEP = " <::> "


class EmptyOutput(ValueError):
    pass


class NoReferences(ValueError):
    pass


class CorpusFormatError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


_PUNCT = re.compile(r"\w+(?:[-']\w+)*|[^\w\s]")


def tokenize(text: str, split_punct: bool = False) -> list[str]:
    return _PUNCT.findall(text) if split_punct else text.split()


def _norm(text: str) -> str:
    return " ".join(text.split())


# ------------------------------------------------------------------ counts
def tokens_per_sentence(outputs: Sequence[str], split_punct: bool = False) -> Fraction:
    """Mean token count of the output sentences (#T/S)."""
    if not outputs:
        raise EmptyOutput("no output sentences")
    return Fraction(sum(len(tokenize(s, split_punct)) for s in outputs), len(outputs))


def sentences_per_input(pairs: Sequence[tuple[str, Sequence[str]]]) -> Fraction:
    """Mean number of output sentences per input (#S/C)."""
    if not pairs:
        raise EmptyOutput("no inputs")
    return Fraction(sum(len(outs) for _, outs in pairs), len(pairs))


def percent_same(pairs: Sequence[tuple[str, Sequence[str]]]) -> Fraction:
    """Percentage of inputs returned unchanged as a single sentence."""
    if not pairs:
        raise EmptyOutput("no inputs")
    same = sum(1 for src, outs in pairs if len(outs) == 1 and _norm(outs[0]) == _norm(src))
    return Fraction(100 * same, len(pairs))


def levenshtein_words(a: str, b: str, split_punct: bool = False) -> int:
    """Word-level edit distance with unit costs."""
    x, y = tokenize(a, split_punct), tokenize(b, split_punct)
    if len(x) < len(y):
        x, y = y, x
    prev = list(range(len(y) + 1))
    for i, wx in enumerate(x, 1):
        cur = [i]
        for j, wy in enumerate(y, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (wx != wy)))
        prev = cur
    return prev[-1]


def mean_levenshtein(pairs: Sequence[tuple[str, Sequence[str]]], split_punct: bool = False) -> Fraction:
    """LD_SC: distance between each input and its joined outputs, averaged."""
    if not pairs:
        raise EmptyOutput("no inputs")
    total = sum(levenshtein_words(src, " ".join(outs), split_punct) for src, outs in pairs)
    return Fraction(total, len(pairs))


# -------------------------------------------------------------------- BLEU
def _ngrams(toks: Sequence[str], n: int) -> Counter:
    return Counter(tuple(toks[i : i + n]) for i in range(len(toks) - n + 1))


def bleu(
    candidates: Sequence[str],
    reference_sets: Sequence[Sequence[str]],
    max_n: int = 4,
    split_punct: bool = False,
) -> float:
    """Corpus BLEU with clipped counts, uniform weights and brevity penalty."""
    if len(candidates) != len(reference_sets):
        raise ValueError("one reference set per candidate required")
    match = [0] * max_n
    total = [0] * max_n
    c_len = r_len = 0
    for cand, refs in zip(candidates, reference_sets):
        if not refs:
            raise NoReferences("candidate without references")
        c = tokenize(cand, split_punct)
        rs = [tokenize(r, split_punct) for r in refs]
        c_len += len(c)
        r_len += min((abs(len(r) - len(c)), len(r)) for r in rs)[1]
        for n in range(1, max_n + 1):
            cg = _ngrams(c, n)
            best: Counter = Counter()
            for r in rs:
                best |= _ngrams(r, n)
            match[n - 1] += sum(min(k, best[g]) for g, k in cg.items())
            total[n - 1] += sum(cg.values())
    if c_len == 0 or any(m == 0 for m in match):
        return 0.0
    log_p = sum(math.log(m / t) for m, t in zip(match, total)) / max_n
    bp = 1.0 if c_len > r_len else math.exp(1 - r_len / c_len)
    return bp * math.exp(log_p)


# -------------------------------------------------------------------- SARI
@dataclass(frozen=True)
class SariScore:
    sari: Fraction
    precision_add: Fraction
    recall_add: Fraction
    precision_keep: Fraction
    recall_keep: Fraction
    precision_delete: Fraction

    def as_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in self.__dataclass_fields__}


def _ratio(num, den) -> Fraction:
    # an empty operation set is a perfect score for that operation
    return Fraction(1) if den == 0 else Fraction(num) / den


def _f1(p: Fraction, r: Fraction) -> Fraction:
    return Fraction(0) if p + r == 0 else 2 * p * r / (p + r)


def _sari_n(src: Counter, cand: Counter, refs: list[Counter]):
    k = len(refs)
    ref_all: Counter = Counter()
    for r in refs:
        ref_all.update(r)
    src_rep = Counter({g: c * k for g, c in src.items()})
    cand_rep = Counter({g: c * k for g, c in cand.items()})

    keep = src_rep & cand_rep
    keep_good = keep & ref_all
    keep_all = src_rep & ref_all
    p_keep = sum(Fraction(keep_good[g], keep[g]) for g in keep) / len(keep) if keep else Fraction(1)
    r_keep = (
        sum(Fraction(keep_good[g], keep_all[g]) for g in keep_all) / len(keep_all) if keep_all else Fraction(1)
    )

    dele = src_rep - cand_rep
    del_good = dele - ref_all
    p_del = sum(Fraction(del_good[g], dele[g]) for g in dele) / len(dele) if dele else Fraction(1)

    add = set(cand) - set(src)
    add_good = add & set(ref_all)
    add_all = set(ref_all) - set(src)
    p_add = _ratio(len(add_good), len(add))
    r_add = _ratio(len(add_good), len(add_all))
    return p_add, r_add, p_keep, r_keep, p_del


def sari(
    source: str,
    candidate: str,
    references: Sequence[str],
    max_n: int = 4,
    split_punct: bool = False,
) -> SariScore:
    """Sentence-level SARI and its five sub-scores, averaged over n = 1..max_n."""
    if not references:
        raise NoReferences("SARI needs at least one reference")
    s = tokenize(source, split_punct)
    c = tokenize(candidate, split_punct)
    rs = [tokenize(r, split_punct) for r in references]
    subs = [_sari_n(_ngrams(s, n), _ngrams(c, n), [_ngrams(r, n) for r in rs]) for n in range(1, max_n + 1)]
    p_add, r_add, p_keep, r_keep, p_del = (sum(col) / max_n for col in zip(*subs))
    add_f = sum(_f1(x[0], x[1]) for x in subs) / max_n
    keep_f = sum(_f1(x[2], x[3]) for x in subs) / max_n
    score = (add_f + keep_f + p_del) / 3
    return SariScore(score, p_add, r_add, p_keep, r_keep, p_del)


def corpus_sari(
    sources: Sequence[str], candidates: Sequence[str], reference_sets: Sequence[Sequence[str]], **kw
) -> Fraction:
    if not sources:
        raise EmptyOutput("no inputs")
    scores = [sari(s, c, r, **kw).sari for s, c, r in zip(sources, candidates, reference_sets)]
    return sum(scores, Fraction(0)) / len(scores)


# ------------------------------------------------------------------ corpus
@dataclass(frozen=True)
class CorpusLine:
    source: str
    outputs: tuple[str, ...]
    references: tuple[str, ...]


def _parse_corpus(lines: Iterable[str]) -> list[CorpusLine]:
    out = []
    for n, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) < 2 or not cols[0].strip() or not cols[1].strip():
            raise CorpusFormatError(n, "expected 'input<TAB>outputs[<TAB>reference...]'")
        outs = tuple(o.strip() for o in cols[1].split(OUTPUT_SEP.strip()) if o.strip())
        out.append(CorpusLine(cols[0].strip(), outs, tuple(r.strip() for r in cols[2:] if r.strip())))
    return out


def read_corpus(path: Union[str, Path]) -> list[CorpusLine]:
    """Read the TSV corpus: input, outputs joined by ``<::>``, references."""
    with open(path, encoding="utf-8") as fh:
        return _parse_corpus(fh)


def evaluate_corpus(corpus: Sequence[CorpusLine], split_punct: bool = False) -> dict:
    """All statistics as a dict; BLEU and SARI are None without references."""
    if not corpus:
        raise EmptyOutput("empty corpus")
    pairs = [(c.source, c.outputs) for c in corpus]
    report = {
        "T/S": tokens_per_sentence([o for c in corpus for o in c.outputs], split_punct),
        "S/C": sentences_per_input(pairs),
        "%SAME": percent_same(pairs),
        "LD_SC": mean_levenshtein(pairs, split_punct),
        "BLEU": None,
        "SARI": None,
        "SAMSA": None,
        "SAMSA_abl": None,
    }
    if all(c.references for c in corpus):
        joined = [" ".join(c.outputs) for c in corpus]
        refs = [c.references for c in corpus]
        report["BLEU"] = bleu(joined, refs, split_punct=split_punct)
        report["SARI"] = corpus_sari([c.source for c in corpus], joined, refs, split_punct=split_punct)
    return report


_COLUMNS = ("#T/S", "#S/C", "%SAME", "LD_SC", "BLEU", "SARI", "SAMSA", "SAMSA_abl")
_KEYS = ("T/S", "S/C", "%SAME", "LD_SC", "BLEU", "SARI", "SAMSA", "SAMSA_abl")


def format_report(report: dict) -> str:
    """Aligned two-line table; BLEU and SARI on a 0-100 scale."""
    cells = []
    for key in _KEYS:
        v = report.get(key)
        if v is None:
            cells.append("n/a")
        elif key in ("BLEU", "SARI"):
            cells.append(f"{100 * float(v):.2f}")
        else:
            cells.append(f"{float(v):.2f}")
    widths = [max(len(h), len(c)) for h, c in zip(_COLUMNS, cells)]
    head = "  ".join(h.rjust(w) for h, w in zip(_COLUMNS, widths))
    row = "  ".join(c.rjust(w) for c, w in zip(cells, widths))
    return head + "\n" + row + "\n"
