"""Sense-annotated corpus ingestion and multi-sense vocabulary selection.

A corpus is normalized to a flat occurrence table: one row per token, with
lemma, coarse POS and an optional sense key. Metrics group over this table,
so occ_ids are dense and positionally stable.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import ConfigError, DataError

TSV_COLUMNS = ["corpus_id", "sentence_idx", "token_idx", "surface", "lemma", "pos", "sense_key"]


class Pos(str, Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    OTHER = "OTHER"


class CorpusFormat(str, Enum):
    TSV = "TSV"
    UFSAC_XML_LIKE = "UFSAC_XML_LIKE"


@dataclass(frozen=True)
class Occurrence:
    """One token instance in a sentence; the row unit of every layer matrix."""

    occ_id: int
    corpus_id: str
    sentence_idx: int
    token_idx: int
    surface: str
    lemma: str
    pos: Pos
    sense_key: str | None
    frequency_rank: int


@dataclass
class SenseInventory:
    """Multi-sense vocabulary after filtering.

    ``by_sense`` keeps every retained sense; senses with fewer than two
    occurrences stay listed but are excluded from ``eligible_senses``
    (no pairs exist for a cohesion average).
    """

    by_lemma: dict[str, set[str]]
    by_sense: dict[str, list[int]]
    m_counts: dict[str, int]
    sense_lemma: dict[str, str]
    eligible_senses: set[str] = field(default_factory=set)

    @property
    def n_occurrences(self) -> int:
        return sum(self.m_counts.values())

    def senses_of(self, lemma: str) -> list[str]:
        return sorted(self.by_lemma[lemma])


def _coarse_pos(tag: str) -> Pos:
    """Map a raw POS tag (coarse name or Penn-style) to the coarse enum."""
    t = tag.strip().upper()
    if t in Pos.__members__:
        return Pos[t]
    if t.startswith("N"):
        return Pos.NOUN
    if t.startswith("V"):
        return Pos.VERB
    if t.startswith("J") or t.startswith("ADJ"):
        return Pos.ADJ
    return Pos.OTHER


def _assign_ranks(lemmas: list[str]) -> dict[str, int]:
    """Rank lemmas by descending count, lexicographic tie-break; 1 = most frequent."""
    counts = Counter(lemmas)
    ordered = sorted(counts, key=lambda lem: (-counts[lem], lem))
    return {lem: rank for rank, lem in enumerate(ordered, start=1)}


def _finalize(rows: list[dict]) -> list[Occurrence]:
    seen: set[tuple[str, int, int]] = set()
    for row in rows:
        triple = (row["corpus_id"], row["sentence_idx"], row["token_idx"])
        if triple in seen:
            raise DataError(f"duplicate (corpus, sentence, token) triple: {triple}")
        seen.add(triple)
    ranks = _assign_ranks([row["lemma"] for row in rows])
    return [
        Occurrence(occ_id=i, frequency_rank=ranks[row["lemma"]], **row)
        for i, row in enumerate(rows)
    ]


def _load_tsv(path: Path) -> list[Occurrence]:
    rows: list[dict] = []
    with open(path, encoding="utf-8") as f:
        header = f.readline()
        if not header:
            return []
        names = header.rstrip("\n").split("\t")
        if names != TSV_COLUMNS:
            raise DataError(f"{path}: bad header, expected {TSV_COLUMNS}, got {names}")
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(TSV_COLUMNS):
                raise DataError(
                    f"{path}:{lineno}: expected {len(TSV_COLUMNS)} fields, got {len(parts)}"
                )
            corpus_id, sent, tok, surface, lemma, pos, sense_key = parts
            try:
                sentence_idx = int(sent)
                token_idx = int(tok)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: non-integer sentence/token index") from exc
            if sentence_idx < 0 or token_idx < 0:
                raise DataError(f"{path}:{lineno}: negative sentence/token index")
            rows.append(
                dict(
                    corpus_id=corpus_id,
                    sentence_idx=sentence_idx,
                    token_idx=token_idx,
                    surface=surface,
                    lemma=lemma,
                    pos=_coarse_pos(pos),
                    sense_key=sense_key or None,
                )
            )
    return _finalize(rows)


def _load_ufsac(path: Path) -> list[Occurrence]:
    """Parse the unified XML-like layout: corpus/document/.../sentence/word
    elements with surface_form, lemma, pos and wn30_key attributes."""
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise DataError(f"{path}: XML parse failure: {exc}") from exc
    root = tree.getroot()
    corpus_id = root.get("id") or root.get("name") or path.stem
    rows: list[dict] = []
    for sentence_idx, sentence in enumerate(root.iter("sentence")):
        for token_idx, word in enumerate(sentence.iter("word")):
            surface = word.get("surface_form") or word.get("surface") or ""
            lemma = word.get("lemma") or surface.lower()
            sense_key = word.get("wn30_key") or word.get("sense_key") or None
            rows.append(
                dict(
                    corpus_id=corpus_id,
                    sentence_idx=sentence_idx,
                    token_idx=token_idx,
                    surface=surface,
                    lemma=lemma,
                    pos=_coarse_pos(word.get("pos") or ""),
                    sense_key=sense_key,
                )
            )
    return _finalize(rows)


def load_corpus(path: str | Path, fmt: CorpusFormat = CorpusFormat.TSV) -> list[Occurrence]:
    """Load a corpus file into document-ordered occurrences.

    frequency_rank is computed from lemma counts over the loaded file;
    unannotated tokens carry sense_key = None.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"corpus file not found: {path}")
    if fmt is CorpusFormat.TSV:
        return _load_tsv(path)
    return _load_ufsac(path)


def save_occurrences(occs: list[Occurrence], path: str | Path) -> None:
    """Write the occurrence table in the canonical TSV interchange layout."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\t".join(TSV_COLUMNS) + "\n")
        for o in occs:
            f.write(
                "\t".join(
                    [
                        o.corpus_id,
                        str(o.sentence_idx),
                        str(o.token_idx),
                        o.surface,
                        o.lemma,
                        o.pos.value,
                        o.sense_key or "",
                    ]
                )
                + "\n"
            )


def build_inventory(
    occs: list[Occurrence],
    restrict_pos: set[Pos] = frozenset({Pos.NOUN, Pos.VERB, Pos.ADJ}),
) -> SenseInventory:
    """Select the multi-sense vocabulary.

    Drops occurrences without a sense key or outside restrict_pos, then
    drops lemmas observed under fewer than two distinct senses. Senses
    with a single occurrence remain in the inventory but are flagged
    ineligible for cohesion scoring.
    """
    if not restrict_pos:
        raise ConfigError("restrict_pos must be nonempty")
    by_lemma: dict[str, set[str]] = defaultdict(set)
    by_sense: dict[str, list[int]] = defaultdict(list)
    sense_lemma: dict[str, str] = {}
    for o in occs:
        if o.sense_key is None or o.pos not in restrict_pos:
            continue
        by_lemma[o.lemma].add(o.sense_key)
        by_sense[o.sense_key].append(o.occ_id)
        sense_lemma[o.sense_key] = o.lemma

    multi = {lem: keys for lem, keys in by_lemma.items() if len(keys) >= 2}
    kept_senses = {key for keys in multi.values() for key in keys}
    by_sense = {key: sorted(ids) for key, ids in by_sense.items() if key in kept_senses}
    m_counts = {key: len(ids) for key, ids in by_sense.items()}
    return SenseInventory(
        by_lemma={lem: set(keys) for lem, keys in multi.items()},
        by_sense=by_sense,
        m_counts=m_counts,
        sense_lemma={key: lem for key, lem in sense_lemma.items() if key in kept_senses},
        eligible_senses={key for key, m in m_counts.items() if m >= 2},
    )


def inventory_summary(inv: SenseInventory, occs: list[Occurrence] | None = None) -> dict:
    """Size summary, plus per-POS counts when occurrences are supplied.

    Per-POS numbers are reported both as lemma types and as occurrences so
    external corpus statistics can be reconciled under either reading.
    """
    out = {
        "n_lemmas": len(inv.by_lemma),
        "n_senses": len(inv.by_sense),
        "n_occurrences": inv.n_occurrences,
        "n_eligible_senses": len(inv.eligible_senses),
    }
    if occs is not None:
        retained = {i for ids in inv.by_sense.values() for i in ids}
        lemma_types: dict[str, set[str]] = defaultdict(set)
        occ_counts: Counter = Counter()
        for o in occs:
            if o.occ_id in retained:
                lemma_types[o.pos.value].add(o.lemma)
                occ_counts[o.pos.value] += 1
        out["per_pos"] = {
            pos: {"lemma_types": len(lemma_types[pos]), "occurrences": occ_counts[pos]}
            for pos in sorted(lemma_types)
        }
    return out
