"""Sense cohesion and separation metrics over occurrence embeddings.

For each sense at each layer: the mean pairwise cosine among its
occurrences (cohesion). For each lemma: the mean cross-sense cosine
averaged over sense pairs (separation), and the gap delta between mean
cohesion and separation. Adjusted variants subtract the layer's
random-pair baseline; the baseline cancels in delta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import SenseInventory
from .errors import DataError
from .store import EmbeddingDataset, LayerMatrix

SKIP_NO_ELIGIBLE_SENSE = "no_eligible_sense"
SKIP_SINGLE_GROUP = "fewer_than_two_senses"


@dataclass
class SenseScore:
    layer: int
    sense_key: str
    m: int
    sen_sim: float
    sen_sim_adjusted: float


@dataclass
class WordScore:
    layer: int
    lemma: str
    inter_sim: float
    inter_sim_adjusted: float
    mean_sen_sim: float
    mean_sen_sim_adjusted: float
    delta: float


@dataclass
class LayerSummary:
    layer: int
    baseline_b: float
    macro_sen_sim: float
    macro_sen_sim_adjusted: float
    micro_sen_sim: float
    macro_word_sen_sim: float
    macro_inter_sim: float
    macro_inter_sim_adjusted: float
    macro_delta: float
    n_senses: int
    n_words: int
    skipped: dict[str, str] = field(default_factory=dict)


@dataclass
class MetricsReport:
    sense_scores: list[SenseScore]
    word_scores: list[WordScore]
    layer_summaries: list[LayerSummary]


def _unit_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0.0):
        raise DataError("zero-norm embedding row")
    return mat / norms[:, None]


def sense_similarity(layer: LayerMatrix, occ_ids: list[int], literal_norm: bool = False) -> float:
    """Mean cosine over all unordered pairs of the listed occurrences.

    literal_norm divides the ordered-pair sum by m instead (compatibility
    mode; values can exceed 1).
    """
    m = len(occ_ids)
    if m < 2:
        raise DataError(f"sense similarity needs >= 2 occurrences, got {m}")
    u = _unit_rows(layer.as_f64()[sorted(occ_ids)])
    gram = u @ u.T
    iu = np.triu_indices(m, k=1)
    pair_sum = float(np.sum(np.clip(gram[iu], -1.0, 1.0)))
    if literal_norm:
        return 2.0 * pair_sum / m
    return pair_sum / (m * (m - 1) / 2)


def inter_sense_similarity(layer: LayerMatrix, groups: list[list[int]]) -> float:
    """Unweighted mean over unordered sense pairs of the mean cross-pair cosine."""
    if len(groups) < 2:
        raise DataError("inter-sense similarity needs >= 2 sense groups")
    if any(not g for g in groups):
        raise DataError("empty sense group")
    x = layer.as_f64()
    units = [_unit_rows(x[sorted(g)]) for g in groups]
    vals = []
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            cross = np.clip(units[a] @ units[b].T, -1.0, 1.0)
            vals.append(float(np.mean(cross)))
    return float(np.mean(vals))


def adjust(value: float, baseline_b: float) -> float:
    """Subtract the layer anisotropy baseline from a cosine-scale metric."""
    return value - baseline_b


def word_delta(
    layer: LayerMatrix,
    inventory: SenseInventory,
    lemma: str,
    baseline_b: float = 0.0,
) -> WordScore | str:
    """Score one lemma at one layer; returns a skip reason code when no
    sense has enough occurrences for a cohesion average."""
    sense_keys = inventory.senses_of(lemma)
    if len(sense_keys) < 2:
        return SKIP_SINGLE_GROUP
    eligible = [k for k in sense_keys if k in inventory.eligible_senses]
    if not eligible:
        return SKIP_NO_ELIGIBLE_SENSE
    sims = [sense_similarity(layer, inventory.by_sense[k]) for k in eligible]
    mean_sen = float(np.mean(sims))
    inter = inter_sense_similarity(layer, [inventory.by_sense[k] for k in sense_keys])
    return WordScore(
        layer=layer.layer,
        lemma=lemma,
        inter_sim=inter,
        inter_sim_adjusted=adjust(inter, baseline_b),
        mean_sen_sim=mean_sen,
        mean_sen_sim_adjusted=adjust(mean_sen, baseline_b),
        delta=mean_sen - inter,
    )


def layer_report(
    ds: EmbeddingDataset,
    inventory: SenseInventory,
    baselines: dict[int, float],
) -> MetricsReport:
    """Full per-sense / per-word / per-layer report.

    Layer summaries carry three cohesion aggregations (macro over senses,
    occurrence-weighted micro, macro over words) since each is a defensible
    reading of a per-layer average.
    """
    missing = [lm.layer for lm in ds.layers if lm.layer not in baselines]
    if missing:
        raise DataError(f"baselines missing for layers {missing}")
    sense_scores: list[SenseScore] = []
    word_scores: list[WordScore] = []
    summaries: list[LayerSummary] = []
    lemmas = sorted(inventory.by_lemma)
    for lm in ds.layers:
        b = baselines[lm.layer]
        layer_sense: list[SenseScore] = []
        for key in sorted(inventory.eligible_senses):
            val = sense_similarity(lm, inventory.by_sense[key])
            layer_sense.append(
                SenseScore(
                    layer=lm.layer,
                    sense_key=key,
                    m=inventory.m_counts[key],
                    sen_sim=val,
                    sen_sim_adjusted=adjust(val, b),
                )
            )
        layer_words: list[WordScore] = []
        skipped: dict[str, str] = {}
        for lemma in lemmas:
            res = word_delta(lm, inventory, lemma, baseline_b=b)
            if isinstance(res, str):
                skipped[lemma] = res
            else:
                layer_words.append(res)
        weights = np.array([sc.m for sc in layer_sense], dtype=np.float64)
        sen_vals = np.array([sc.sen_sim for sc in layer_sense])
        summaries.append(
            LayerSummary(
                layer=lm.layer,
                baseline_b=b,
                macro_sen_sim=float(np.mean(sen_vals)) if layer_sense else float("nan"),
                macro_sen_sim_adjusted=(
                    float(np.mean([sc.sen_sim_adjusted for sc in layer_sense]))
                    if layer_sense
                    else float("nan")
                ),
                micro_sen_sim=(
                    float(np.average(sen_vals, weights=weights)) if layer_sense else float("nan")
                ),
                macro_word_sen_sim=(
                    float(np.mean([w.mean_sen_sim for w in layer_words]))
                    if layer_words
                    else float("nan")
                ),
                macro_inter_sim=(
                    float(np.mean([w.inter_sim for w in layer_words]))
                    if layer_words
                    else float("nan")
                ),
                macro_inter_sim_adjusted=(
                    float(np.mean([w.inter_sim_adjusted for w in layer_words]))
                    if layer_words
                    else float("nan")
                ),
                macro_delta=(
                    float(np.mean([w.delta for w in layer_words]))
                    if layer_words
                    else float("nan")
                ),
                n_senses=len(layer_sense),
                n_words=len(layer_words),
                skipped=skipped,
            )
        )
        sense_scores.extend(layer_sense)
        word_scores.extend(layer_words)
    return MetricsReport(
        sense_scores=sense_scores, word_scores=word_scores, layer_summaries=summaries
    )
