"""Per-layer hidden-state extraction for sense-annotated tokens.

Sentences are reconstructed from the occurrence TSV, run through a
pretrained transformer once each, and the hidden states at every layer
are gathered for the annotated token positions. Multi-subword tokens are
pooled per the configured mode. Output is the laserkit interchange triple,
so the analysis toolkit loads it with no shims.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from laserkit.corpus import Occurrence, _assign_ranks, load_corpus
from laserkit.errors import ConfigError, DataError
from laserkit.store import EmbeddingDataset, LayerMatrix, save_dataset

log = logging.getLogger(__name__)


class Pooling(str, Enum):
    MEAN = "mean"
    FIRST = "first"
    LAST = "last"


@dataclass
class ExtractionSpec:
    model_id: str
    corpus_paths: list[str]
    subword_pooling: Pooling = Pooling.MEAN
    max_sentence_tokens: int = 512
    device: str = "cpu"
    batch_size: int = 8
    annotated_only: bool = True

    def __post_init__(self):
        self.subword_pooling = Pooling(self.subword_pooling)
        if self.max_sentence_tokens < 8:
            raise ConfigError("max_sentence_tokens too small")
        if not self.corpus_paths:
            raise ConfigError("no corpus paths given")


@dataclass
class ExtractionStats:
    n_sentences: int = 0
    n_occurrences: int = 0
    dropped_alignment: int = 0
    dropped_truncation: int = 0
    truncated_sentences: int = 0
    extra: dict = field(default_factory=dict)


def _group_sentences(occs: list[Occurrence]) -> dict[tuple[str, int], list[Occurrence]]:
    sentences: dict[tuple[str, int], list[Occurrence]] = {}
    for o in occs:
        sentences.setdefault((o.corpus_id, o.sentence_idx), []).append(o)
    for toks in sentences.values():
        toks.sort(key=lambda o: o.token_idx)
    return sentences


def _pool(states: torch.Tensor, positions: list[int], mode: Pooling) -> torch.Tensor:
    if mode is Pooling.FIRST:
        return states[positions[0]]
    if mode is Pooling.LAST:
        return states[positions[-1]]
    return states[positions].mean(dim=0)


def extract(spec: ExtractionSpec, out_dir: str | Path) -> ExtractionStats:
    """Run extraction and write the dataset; returns drop/truncation stats."""
    torch.manual_seed(0)
    tokenizer = AutoTokenizer.from_pretrained(spec.model_id)
    model = AutoModel.from_pretrained(spec.model_id, output_hidden_states=True)
    model.to(spec.device)
    model.eval()

    occs: list[Occurrence] = []
    for path in spec.corpus_paths:
        batch = load_corpus(path)
        offset = len(occs)
        occs.extend(
            Occurrence(**{**o.__dict__, "occ_id": o.occ_id + offset}) for o in batch
        )
    def wanted(o: Occurrence) -> bool:
        return not spec.annotated_only or o.sense_key is not None

    if not any(wanted(o) for o in occs):
        raise DataError("no occurrences to extract")

    # group over the full token stream so each sentence is reconstructed
    # intact; the annotated-only filter only selects which rows are emitted
    sentences = {
        key: toks
        for key, toks in _group_sentences(occs).items()
        if any(wanted(o) for o in toks)
    }
    stats = ExtractionStats(n_sentences=len(sentences))
    kept: list[Occurrence] = []
    vectors: list[np.ndarray] = []  # per occurrence: (L, D)

    with torch.no_grad():
        for (corpus_id, sent_idx), toks in sentences.items():
            words = [o.surface for o in toks]
            enc = tokenizer(
                words,
                is_split_into_words=True,
                return_tensors="pt",
                truncation=True,
                max_length=spec.max_sentence_tokens,
            )
            if enc["input_ids"].shape[1] >= spec.max_sentence_tokens:
                stats.truncated_sentences += 1
                log.warning(
                    "sentence (%s, %d) truncated at %d tokens",
                    corpus_id, sent_idx, spec.max_sentence_tokens,
                )
            word_ids = enc.word_ids(0)
            positions: dict[int, list[int]] = {}
            for pos, wid in enumerate(word_ids):
                if wid is not None:
                    positions.setdefault(wid, []).append(pos)
            out = model(**{k: v.to(spec.device) for k, v in enc.items()})
            # hidden_states: (L+1) tensors of (1, T, D); stack to (L+1, T, D)
            hidden = torch.stack(out.hidden_states, dim=0)[:, 0]
            for word_pos, o in enumerate(toks):
                if not wanted(o):
                    continue
                subwords = positions.get(word_pos)
                if not subwords:
                    if len(enc["input_ids"][0]) >= spec.max_sentence_tokens:
                        stats.dropped_truncation += 1
                    else:
                        stats.dropped_alignment += 1
                    log.warning("dropping occurrence %d: no aligned subwords", o.occ_id)
                    continue
                pooled = torch.stack(
                    [_pool(hidden[layer], subwords, spec.subword_pooling)
                     for layer in range(hidden.shape[0])]
                )
                kept.append(o)
                vectors.append(pooled.cpu().numpy().astype(np.float32))

    if not kept:
        raise DataError("every occurrence was dropped during alignment")
    kept_sorted = sorted(range(len(kept)), key=lambda i: kept[i].occ_id)
    kept = [kept[i] for i in kept_sorted]
    vectors = [vectors[i] for i in kept_sorted]

    # re-key occ_ids densely and recompute frequency ranks over kept rows
    ranks = _assign_ranks([o.lemma for o in kept])
    table = [
        Occurrence(**{**o.__dict__, "occ_id": i, "frequency_rank": ranks[o.lemma]})
        for i, o in enumerate(kept)
    ]
    stack = np.stack(vectors)  # (n, L, D)
    n_layers, dim = stack.shape[1], stack.shape[2]
    layers = [
        LayerMatrix(layer=k, data=np.ascontiguousarray(stack[:, k]))
        for k in range(n_layers)
    ]
    ds = EmbeddingDataset(
        manifest={
            "model_name": spec.model_id,
            "n_layers": n_layers,
            "dim": dim,
            "n_occurrences": len(table),
            "dtype": "f32le",
            "pooling": spec.subword_pooling.value,
            "tokenizer": tokenizer.__class__.__name__,
        },
        occurrences=table,
        layers=layers,
    )
    save_dataset(ds, out_dir)
    stats.n_occurrences = len(table)
    return stats
