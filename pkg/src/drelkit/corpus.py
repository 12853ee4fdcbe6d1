"""Corpus ingestion and normalization for discourse relation experiments.

Three sources are supported: PDTB-style pipe files (the column layout is
supplied through a small JSON map because release layouts differ and are
licensed), the canonical JSONL interchange format that every parser
normalizes into, and in-memory relation lists. The module also provides
top-level sense normalization with the first-label rule, implicit-relation
filtering, and WSJ-section based train/dev/test assignment.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import Iterable

IMPLICIT = "Implicit"
EXPLICIT = "Explicit"
ENTREL = "EntRel"
ALTLEX = "AltLex"
HYPOPHORA = "Hypophora"
KNOWN_REL_TYPES = (IMPLICIT, EXPLICIT, ENTREL, ALTLEX, HYPOPHORA)

# Canonical JSONL: one object per line, UTF-8, exactly these keys (extras
# are preserved or dropped depending on the parse flag).
JSONL_KEYS = ("id", "corpus", "lang", "doc_id", "rel_type", "senses", "arg1", "arg2")


class ParseError(Exception):
    """Malformed input; carries the source path and 1-based line number."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = "" if path is None else str(path)
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class SenseError(ValueError):
    """A sense string whose first segment is not one of the four top-level senses."""

    def __init__(self, raw: str):
        self.raw = raw
        super().__init__(f"not a top-level sense: {raw!r}")


class SenseTop(enum.Enum):
    """The four top-level senses; anything else is rejected."""

    COMPARISON = "Comparison"
    CONTINGENCY = "Contingency"
    EXPANSION = "Expansion"
    TEMPORAL = "Temporal"

    def __str__(self) -> str:
        return self.value


def normalize_rel_type(raw: str) -> str:
    """Map a raw relation-type string to its canonical spelling.

    Unknown labels come back stripped but otherwise untouched, so
    nonstandard types survive parsing instead of being silently dropped.
    """
    s = raw.strip()
    for known in KNOWN_REL_TYPES:
        if s.lower() == known.lower():
            return known
    return s


@dataclass
class DiscourseRelation:
    """One annotated discourse relation: two argument spans plus labels.

    ``senses`` keeps the source annotation order; the first entry is the
    authoritative label. ``extra`` holds unknown JSONL keys when the parser
    is asked to preserve them.
    """

    id: str
    corpus: str
    lang: str
    doc_id: str
    rel_type: str
    senses: tuple[str, ...]
    arg1: str
    arg2: str
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.senses = tuple(self.senses)
        if self.rel_type == IMPLICIT:
            if not self.senses:
                raise ValueError(f"implicit relation {self.id!r} has no senses")
            if not self.arg1 or not self.arg2:
                raise ValueError(f"implicit relation {self.id!r} has an empty argument")


def top_sense(rel: DiscourseRelation) -> SenseTop:
    """First-label rule: the first segment of the first sense string decides."""
    if rel.rel_type != IMPLICIT:
        raise ValueError(f"top_sense is defined for implicit relations, got {rel.rel_type!r}")
    first = rel.senses[0].split(".")[0].strip()
    for sense in SenseTop:
        if first == sense.value:
            return sense
    raise SenseError(rel.senses[0])


def select_implicit(rels: Iterable[DiscourseRelation]) -> list[DiscourseRelation]:
    """Keep implicit relations only; EntRel and all explicit types are excluded."""
    return [r for r in rels if r.rel_type == IMPLICIT]


def sense_histogram(rels: Iterable[DiscourseRelation]) -> dict[SenseTop, int]:
    """Implicit-relation counts per top-level sense.

    Relations whose first label does not resolve are not counted here; pair
    with sense_violations, which reports them explicitly.
    """
    counts = {sense: 0 for sense in SenseTop}
    for rel in select_implicit(rels):
        try:
            counts[top_sense(rel)] += 1
        except SenseError:
            pass
    return counts


def sense_violations(rels: Iterable[DiscourseRelation]) -> list[tuple[str, str]]:
    """(id, raw sense) pairs of implicit relations with unresolvable first labels."""
    out = []
    for rel in select_implicit(rels):
        try:
            top_sense(rel)
        except SenseError as err:
            out.append((rel.id, err.raw))
    return out


# ---------------------------------------------------------------------------
# Canonical JSONL


def parse_jsonl(
    data: bytes | str,
    *,
    keep_extras: bool = True,
    path: str | None = None,
) -> list[DiscourseRelation]:
    """Parse canonical JSONL into relations.

    Every line must carry the eight canonical keys; a missing key is an
    error naming the key and line. With keep_extras=False unknown keys are
    dropped instead of preserved.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    rels: list[DiscourseRelation] = []
    seen: set[str] = set()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise ParseError(f"invalid JSON ({err.msg})", path=path, line=line_no) from err
        if not isinstance(obj, dict):
            raise ParseError("expected a JSON object", path=path, line=line_no)
        missing = [k for k in JSONL_KEYS if k not in obj]
        if missing:
            raise ParseError(f"missing key {missing[0]!r}", path=path, line=line_no)
        if not isinstance(obj["senses"], list):
            raise ParseError("'senses' must be an array", path=path, line=line_no)
        extra = {k: obj[k] for k in obj if k not in JSONL_KEYS} if keep_extras else {}
        try:
            rel = DiscourseRelation(
                id=str(obj["id"]),
                corpus=str(obj["corpus"]),
                lang=str(obj["lang"]),
                doc_id=str(obj["doc_id"]),
                rel_type=normalize_rel_type(str(obj["rel_type"])),
                senses=tuple(str(s) for s in obj["senses"]),
                arg1=str(obj["arg1"]),
                arg2=str(obj["arg2"]),
                extra=extra,
            )
        except ValueError as err:
            raise ParseError(str(err), path=path, line=line_no) from err
        if rel.id in seen:
            raise ParseError(f"duplicate id {rel.id!r}", path=path, line=line_no)
        seen.add(rel.id)
        rels.append(rel)
    return rels


def write_jsonl(rels: Iterable[DiscourseRelation]) -> bytes:
    """Serialize relations as canonical JSONL (UTF-8, fixed key order).

    Extras, when present, follow the canonical keys in sorted order, so
    write_jsonl(parse_jsonl(f)) is byte-stable.
    """
    lines = []
    for rel in rels:
        obj = {
            "id": rel.id,
            "corpus": rel.corpus,
            "lang": rel.lang,
            "doc_id": rel.doc_id,
            "rel_type": rel.rel_type,
            "senses": list(rel.senses),
            "arg1": rel.arg1,
            "arg2": rel.arg2,
        }
        for key in sorted(rel.extra):
            obj[key] = rel.extra[key]
        lines.append(json.dumps(obj, ensure_ascii=False))
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


# ---------------------------------------------------------------------------
# Pipe files


@dataclass(frozen=True)
class PipeColumnMap:
    """Field indices for one pipe-file layout.

    Layouts differ between corpus releases, so the toolkit never hard-codes
    one; a small JSON config declares where the relation type, sense(s) and
    argument texts live.
    """

    field_count_min: int
    rel_type_idx: int
    sense_idxs: tuple[int, ...]
    arg1_idx: int
    arg2_idx: int

    def __post_init__(self):
        object.__setattr__(self, "sense_idxs", tuple(int(i) for i in self.sense_idxs))
        if not self.sense_idxs:
            raise ValueError("column map needs at least one sense index")
        low = min(self.rel_type_idx, self.arg1_idx, self.arg2_idx, *self.sense_idxs)
        if low < 0:
            raise ValueError("column indices must be non-negative")

    @property
    def max_idx(self) -> int:
        return max(self.rel_type_idx, self.arg1_idx, self.arg2_idx, *self.sense_idxs)

    @classmethod
    def from_dict(cls, d: dict) -> "PipeColumnMap":
        try:
            return cls(
                field_count_min=int(d["field_count_min"]),
                rel_type_idx=int(d["rel_type_idx"]),
                sense_idxs=tuple(int(i) for i in d["sense_idxs"]),
                arg1_idx=int(d["arg1_idx"]),
                arg2_idx=int(d["arg2_idx"]),
            )
        except KeyError as err:
            raise ValueError(f"column map missing key {err.args[0]!r}") from None

    @classmethod
    def from_json(cls, text: str | bytes) -> "PipeColumnMap":
        return cls.from_dict(json.loads(text))


def parse_pipe_file(
    data: bytes | str,
    column_map: PipeColumnMap,
    *,
    doc_id: str,
    corpus: str = "",
    lang: str = "en",
    path: str | None = None,
) -> list[DiscourseRelation]:
    """Parse a pipe-separated annotation file, one relation per non-empty line.

    Ids are synthesized as "<doc_id>#<line-number>". Lines with fewer fields
    than the layout requires are rejected with their line number; unknown
    relation-type strings are kept verbatim rather than dropped.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as err:
            raise ParseError(f"not valid UTF-8: {err}", path=path) from err
    else:
        text = data
    required = max(column_map.field_count_min, column_map.max_idx + 1)
    rels: list[DiscourseRelation] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("|")
        if len(fields) < required:
            raise ParseError(
                f"expected at least {required} fields, got {len(fields)}",
                path=path,
                line=line_no,
            )
        senses = tuple(
            fields[i].strip() for i in column_map.sense_idxs if fields[i].strip()
        )
        try:
            rel = DiscourseRelation(
                id=f"{doc_id}#{line_no}",
                corpus=corpus,
                lang=lang,
                doc_id=doc_id,
                rel_type=normalize_rel_type(fields[column_map.rel_type_idx]),
                senses=senses,
                arg1=fields[column_map.arg1_idx].strip(),
                arg2=fields[column_map.arg2_idx].strip(),
            )
        except ValueError as err:
            raise ParseError(str(err), path=path, line=line_no) from err
        rels.append(rel)
    return rels


# ---------------------------------------------------------------------------
# Split schemes


@dataclass(frozen=True)
class SplitScheme:
    """Named train/dev/test assignment over two-digit WSJ section numbers."""

    name: str
    train_sections: frozenset[int]
    dev_sections: frozenset[int]
    test_sections: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "train_sections", frozenset(self.train_sections))
        object.__setattr__(self, "dev_sections", frozenset(self.dev_sections))
        object.__setattr__(self, "test_sections", frozenset(self.test_sections))
        a, b, c = self.train_sections, self.dev_sections, self.test_sections
        if a & b or a & c or b & c:
            raise ValueError(f"split scheme {self.name!r} has overlapping section sets")


# The conventional WSJ split: train 2-20, dev 0-1 and 23-24, test 21-22.
PDTB_STANDARD = SplitScheme(
    name="pdtb2-standard",
    train_sections=frozenset(range(2, 21)),
    dev_sections=frozenset((0, 1, 23, 24)),
    test_sections=frozenset((21, 22)),
)

SPLIT_SCHEMES = {PDTB_STANDARD.name: PDTB_STANDARD}

_SECTION_RE = re.compile(r"_(\d{2})")


def doc_section(doc_id: str) -> int:
    """Two-digit section encoded in a document id such as "wsj_2102" -> 21."""
    m = _SECTION_RE.search(doc_id)
    if m is None:
        raise ValueError(f"no section digits in doc_id {doc_id!r}")
    return int(m.group(1))


def assign_split(rel: DiscourseRelation, scheme: SplitScheme) -> str:
    """Bucket a relation into train/dev/test by its document section.

    Returns "excluded" when the section belongs to none of the scheme's
    sets. Only PDTB-style doc_ids are supported; corpora without section
    digits get their split membership from file-level configuration instead.
    """
    section = doc_section(rel.doc_id)
    if section in scheme.train_sections:
        return "train"
    if section in scheme.dev_sections:
        return "dev"
    if section in scheme.test_sections:
        return "test"
    return "excluded"
