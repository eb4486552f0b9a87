"""Rhetorical relations and the lexical resources used to pick them."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

__all__ = [
    "Relation",
    "CueTable",
    "default_table",
    "classify_cue",
    "refine_temporal",
    "is_attribution_verb",
    "lemmatize_verb",
    "classify_entities",
    "coarse_class",
    "COARSE",
]


class Relation(str, enum.Enum):
    CONTRAST = "Contrast"
    LIST = "List"
    DISJUNCTION = "Disjunction"
    CAUSE = "Cause"
    RESULT = "Result"
    BACKGROUND = "Background"
    CONDITION = "Condition"
    ELABORATION = "Elaboration"
    ELABORATION_DEFINING = "ElaborationDefining"
    ELABORATION_NON_DEFINING = "ElaborationNonDefining"
    ATTRIBUTION = "Attribution"
    PURPOSE = "Purpose"
    TEMPORAL_BEFORE = "TemporalBefore"
    TEMPORAL_AFTER = "TemporalAfter"
    TEMPORAL = "Temporal"
    SPATIAL = "Spatial"
    UNKNOWN_COORDINATION = "UnknownCoordination"
    UNKNOWN_SUBORDINATION = "UnknownSubordination"

    @property
    def flat_name(self) -> str:
        """Upper-case name used in the flat output, e.g. ELABORATION_DEFINING."""
        return self.name

    @classmethod
    def parse(cls, text: str) -> "Relation":
        key = re.sub(r"[\s_\-]", "", text).lower()
        for r in cls:
            if r.value.lower() == key:
                return r
        raise ValueError(f"unknown relation {text!r}")

    def __str__(self):
        return self.value


COARSE = {
    Relation.LIST: "Joint",
    Relation.DISJUNCTION: "Joint",
    Relation.RESULT: "Cause",
    Relation.TEMPORAL_BEFORE: "Temporal",
    Relation.TEMPORAL_AFTER: "Temporal",
    Relation.PURPOSE: "Enablement",
}


def coarse_class(rel: Union[Relation, str]) -> str:
    """Map a relation onto its coarse class; other names pass through."""
    if isinstance(rel, Relation):
        return COARSE.get(rel, rel.value)
    try:
        r = Relation.parse(rel)
    except ValueError:
        return rel
    return COARSE.get(r, r.value)


# ----------------------------------------------------------------- lexicon
def _read_lines(path: Optional[Union[str, Path]], default_name: str) -> list[str]:
    if path is None:
        text = resources.files("propsplit.data").joinpath(default_name).read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].rstrip()
        if line.strip():
            out.append(line)
    return out


def _norm(phrase: str) -> str:
    return " ".join(phrase.lower().split())


@dataclass(frozen=True)
class CueTable:
    entries: dict
    attribution_verbs: frozenset
    locations: frozenset
    ambiguous: dict = field(default_factory=dict)

    @classmethod
    def load(cls, cues=None, verbs=None, locations=None) -> "CueTable":
        entries: dict = {}
        ambiguous: dict = {}
        for n, line in enumerate(_read_lines(cues, "cues.tsv"), 1):
            cols = line.split("\t")
            if len(cols) < 2:
                raise ValueError(f"cues line {n}: expected 'phrase<TAB>relation'")
            phrase, rel = _norm(cols[0]), Relation.parse(cols[1].strip())
            if phrase in entries:
                ambiguous.setdefault(phrase, [entries[phrase]]).append(rel)
                continue
            entries[phrase] = rel
        verbs_set = frozenset(v.strip().lower() for v in _read_lines(verbs, "attribution_verbs.txt"))
        locs = frozenset(v.strip() for v in _read_lines(locations, "locations.txt"))
        return cls(entries, verbs_set, locs, ambiguous)

    def lookup(self, cue: Union[str, Sequence[str]]) -> Optional[Relation]:
        """Whole-cue match first, then the longest listed phrase prefixing it."""
        words = (cue.split() if isinstance(cue, str) else [w for t in cue for w in t.split()])
        words = [w.lower() for w in words]
        for k in range(len(words), 0, -1):
            rel = self.entries.get(" ".join(words[:k]))
            if rel is not None:
                return rel
        return None


@lru_cache(maxsize=1)
def default_table() -> CueTable:
    return CueTable.load()


def classify_cue(cue, hierarchy: str = "subordinate", table: Optional[CueTable] = None) -> Relation:
    """Relation signalled by ``cue`` or the Unknown-* fallback."""
    table = table or default_table()
    rel = table.lookup(cue or "") if cue else None
    if rel is not None:
        return rel
    if hierarchy == "coordinate":
        return Relation.UNKNOWN_COORDINATION
    return Relation.UNKNOWN_SUBORDINATION


def refine_temporal(rel: Relation, cue) -> Relation:
    """Directional temporal links for subordinated 'before'/'after' clauses.

    The link runs from the main clause to the extracted one: "after X"
    places X before the main event, "before X" places it after.
    """
    if rel is not Relation.TEMPORAL or not cue:
        return rel
    words = (cue.split() if isinstance(cue, str) else list(cue))
    head = words[-1].lower() if words else ""
    if head == "after":
        return Relation.TEMPORAL_BEFORE
    if head == "before":
        return Relation.TEMPORAL_AFTER
    return rel


# ------------------------------------------------------------- lemmatizer
_IRREGULAR = {
    "am": "be", "is": "be", "are": "be", "was": "be", "were": "be", "been": "be", "being": "be",
    "'s": "be", "'re": "be", "'m": "be",
    "has": "have", "had": "have", "having": "have", "'ve": "have", "'d": "have",
    "does": "do", "did": "do", "done": "do",
    "said": "say", "says": "say",
    "went": "go", "gone": "go", "goes": "go",
    "made": "make", "took": "take", "taken": "take", "came": "come",
    "saw": "see", "seen": "see", "knew": "know", "known": "know",
    "got": "get", "gotten": "get", "gave": "give", "given": "give",
    "found": "find", "thought": "think", "told": "tell",
    "became": "become", "left": "leave", "felt": "feel", "brought": "bring",
    "began": "begin", "begun": "begin", "kept": "keep", "held": "hold",
    "wrote": "write", "written": "write", "stood": "stand", "heard": "hear",
    "meant": "mean", "met": "meet", "ran": "run", "paid": "pay", "sat": "sit",
    "spoke": "speak", "spoken": "speak", "led": "lead", "grew": "grow", "grown": "grow",
    "lost": "lose", "fell": "fall", "fallen": "fall", "sent": "send", "built": "build",
    "understood": "understand", "drew": "draw", "drawn": "draw", "broke": "break",
    "broken": "break", "spent": "spend", "rose": "rise", "risen": "rise",
    "drove": "drive", "driven": "drive", "bought": "buy", "wore": "wear", "worn": "wear",
    "chose": "choose", "chosen": "choose", "sought": "seek", "threw": "throw",
    "thrown": "throw", "caught": "catch", "dealt": "deal", "won": "win",
    "forgot": "forget", "forgotten": "forget", "sold": "sell", "taught": "teach",
    "fought": "fight", "ate": "eat", "eaten": "eat", "sang": "sing", "sung": "sing",
    "flew": "fly", "flown": "fly", "swore": "swear", "sworn": "swear", "hid": "hide",
    "hidden": "hide", "shook": "shake", "shaken": "shake", "rode": "ride", "ridden": "ride",
    "stole": "steal", "stolen": "steal", "fed": "feed", "fled": "flee", "bore": "bear",
    "borne": "bear", "born": "bear", "lit": "light", "dug": "dig", "hung": "hang",
    "struck": "strike", "tore": "tear", "torn": "tear", "woke": "wake", "woken": "wake",
    "shot": "shoot", "slept": "sleep", "wept": "weep", "swept": "sweep", "bent": "bend",
    "lent": "lend", "stuck": "stick", "swung": "swing", "spun": "spin", "froze": "freeze",
    "frozen": "freeze", "forbade": "forbid", "forbidden": "forbid", "forgave": "forgive",
    "forgiven": "forgive", "undertook": "undertake", "undertaken": "undertake",
    "overcame": "overcome", "withdrew": "withdraw", "withdrawn": "withdraw",
    "arose": "arise", "arisen": "arise", "awoke": "awake", "bled": "bleed", "bred": "breed",
    "clung": "cling", "crept": "creep", "dove": "dive", "dreamt": "dream", "drank": "drink",
    "drunk": "drink", "fit": "fit", "knelt": "kneel", "laid": "lay", "lay": "lie", "lain": "lie",
    "leapt": "leap", "learnt": "learn", "mistook": "mistake", "mistaken": "mistake",
    "rang": "ring", "rung": "ring", "sank": "sink", "sunk": "sink", "shrank": "shrink",
    "slid": "slide", "smelt": "smell", "sped": "speed", "spelt": "spell", "sprang": "spring",
    "stung": "sting", "stank": "stink", "strove": "strive", "striven": "strive",
    "swam": "swim", "swum": "swim", "wound": "wind", "wrung": "wring", "wove": "weave",
    "woven": "weave", "beaten": "beat", "bitten": "bite", "bit": "bite", "blew": "blow",
    "blown": "blow", "shone": "shine", "sprung": "spring", "stridden": "stride",
    "strode": "stride", "thrust": "thrust", "upheld": "uphold", "withheld": "withhold",
    "died": "die", "dies": "die", "dying": "die", "tied": "tie", "ties": "tie", "tying": "tie",
    "lied": "lie", "lies": "lie", "lying": "lie", "added": "add", "adding": "add",
    "created": "create", "creating": "create", "treated": "treat", "treating": "treat",
    "eyed": "eye", "dyed": "dye", "seeing": "see", "sees": "see", "fleeing": "flee",
    "agreeing": "agree", "freeing": "free", "canoeing": "canoe",
    "escaped": "escape", "escaping": "escape", "focused": "focus", "focusing": "focus",
    "banged": "bang", "hanged": "hang", "biased": "bias",
}

_VOWELS = set("aeiou")

# stems that regain a final "e" once -ed/-ing is removed
_NEEDS_E = [
    re.compile(p)
    for p in (
        r"(u|v|c|dg|rg|lg)$",          # argu, believ, announc, judg, emerg
        r"[bcdfgkpstz]l$",             # enabl, settl, handl
        r"[^aeiou][aiu]r$",            # declar, requir, secur
        r"[aeiou][sz]$",               # us, rais, realiz
        r"[^aeio]at$",                 # indicat, graduat
        r"let$|um$|com$|ag$",          # complet, assum, becom, manag
    )
]
_NEEDS_E_MULTI = [re.compile(p) for p in (r"[^aeiou][aeiou]d$", r"[^aeiou]in$", r"ut$")]


def _vowel_groups(s: str) -> int:
    return len(re.findall(r"[aeiou]+", s))


def _restore(stem: str, suffix: str) -> str:
    """Undo the spelling changes made before -ed/-ing."""
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in "aeioulsfzwy":
        return stem[:-1]  # stopped, planned
    if any(p.search(stem) for p in _NEEDS_E):
        return stem + "e"
    groups = _vowel_groups(stem)
    if groups >= 2 and any(p.search(stem) for p in _NEEDS_E_MULTI):
        return stem + "e"  # conclud, combin, contribut
    if re.search(r"[aeu]ng$", stem) or (suffix == "ed" and stem.endswith("ing")):
        return stem + "e"  # chang, challeng, hing
    if (
        groups == 1
        and stem[-1] not in _VOWELS | set("wxy")
        and stem[-2] in _VOWELS
        and (len(stem) == 2 or stem[-3] not in _VOWELS)
    ):
        return stem + "e"  # hop(e), mak(e), not(e)
    return stem


def lemmatize_verb(token: str) -> str:
    """Base form of an English verb token."""
    w = token.lower()
    if w in _IRREGULAR:
        return _IRREGULAR[w]
    if len(w) <= 3:
        return w
    if w.endswith("ied") or (w.endswith("ies") and len(w) > 4):
        return w[:-3] + "y"
    if w.endswith("ed"):
        stem = w[:-2]
        if stem.endswith("e"):  # agreed, freed
            return stem + "e"
        return _restore(stem, "ed")
    if w.endswith("ing") and len(w) > 4:
        return _restore(w[:-3], "ing")
    if w.endswith("es") and w[:-2].endswith(("ch", "sh", "ss", "x", "zz", "o")):
        return w[:-2]
    if w.endswith("s") and not w.endswith(("ss", "us", "is")):
        return w[:-1]
    return w


def is_attribution_verb(token: str, table: Optional[CueTable] = None) -> bool:
    table = table or default_table()
    return lemmatize_verb(token) in table.attribution_verbs


# ----------------------------------------------------------------- entities
_MONTHS = {
    "january", "february", "march", "april", "may", "june", "july", "august",
    "september", "october", "november", "december", "jan.", "feb.", "mar.", "apr.",
    "aug.", "sept.", "sep.", "oct.", "nov.", "dec.",
}
_WEEKDAYS = {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"}
_YEAR = re.compile(r"^(1\d{3}|2\d{3})s?$")
_ORDINAL = re.compile(r"^\d+(st|nd|rd|th)$|^(first|second|third|fourth|fifth|sixth|seventh|eighth|ninth|tenth|eleventh|twelfth|thirteenth|fourteenth|fifteenth|sixteenth|seventeenth|eighteenth|nineteenth|twentieth|twenty-first)$", re.I)
_LOC_PREP = {"in", "at", "near"}
_UNITS = {"second", "minute", "hour", "day", "week", "month", "year", "decade", "century"}
_RELATIVE = {"later", "earlier", "ago"}


def classify_entities(
    tagged: Iterable,
    table: Optional[CueTable] = None,
    ne_tags: Optional[Sequence[Optional[str]]] = None,
) -> Optional[Relation]:
    """TEMPORAL for date evidence, SPATIAL for location evidence, else None.

    ``tagged`` holds ``(token, pos)`` pairs or bare tokens.  ``ne_tags``
    optionally carries external named-entity labels per token (DATE,
    TIME, LOCATION, GPE ...); they add to the built-in evidence.
    """
    table = table or default_table()
    pairs = [(t, "") if isinstance(t, str) else (t[0], t[1]) for t in tagged]
    toks = [t for t, _ in pairs]
    date = loc = False
    if ne_tags:
        tags = {(x or "").upper() for x in ne_tags}
        date = bool(tags & {"DATE", "TIME"})
        loc = bool(tags & {"LOCATION", "GPE", "LOC"})
    for i, (tok, pos) in enumerate(pairs):
        low = tok.lower()
        if _YEAR.match(tok) or low in _WEEKDAYS:
            date = True
        elif low in _MONTHS and (tok[0].isupper() or pos == "NNP"):
            if low != "may" or pos == "NNP":
                date = True
        elif _ORDINAL.match(tok) and i + 1 < len(toks) and toks[i + 1].lower() in {"century", "centuries"}:
            date = True
        elif low in _RELATIVE and i >= 1 and toks[i - 1].lower().rstrip("s") in _UNITS:
            date = True  # "six days later", "two years ago"
        if tok in table.locations:
            loc = True
        if low in _LOC_PREP and i + 1 < len(pairs):
            j = i + 1
            while j < len(pairs) and pairs[j][1] in ("DT",) and pairs[j][0].lower() == "the":
                j += 1
            if j < len(pairs) and pairs[j][1] in ("NNP", "NNPS") and pairs[j][0][:1].isupper():
                if not (pairs[j][0].lower() in _MONTHS or pairs[j][0].lower() in _WEEKDAYS):
                    loc = True
    if date:
        return Relation.TEMPORAL
    if loc:
        return Relation.SPATIAL
    return None
