"""Synthetic dataset generation with known ground-truth structure.

A synth spec declares sense clusters (lemma, sense key, count, mean,
spread), an optional shared spike direction, dimensionality, layer count
and a seed. The generator emits a regular dataset directory plus a
ground_truth.json recording the construction, so acceptance checks can
assert against known geometry.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .corpus import Occurrence, Pos
from .errors import ConfigError
from .store import EmbeddingDataset, LayerMatrix, make_manifest

_POS_OF_KEY = {"n": Pos.NOUN, "v": Pos.VERB, "a": Pos.ADJ}


def default_spec(
    n_senses: int = 2,
    occurrences_per_sense: int = 20,
    dim: int = 16,
    noise: float = 0.1,
    spike_magnitude: float = 0.0,
    seed: int = 0,
) -> dict:
    """Two-lemma template spec used by tests and the CLI when no file is given."""
    clusters = [
        {
            "lemma": "alpha" if s < max(2, n_senses) else "beta",
            "sense_key": f"alpha.n.{s:02d}",
            "count": occurrences_per_sense,
            "mean_axis": s,
            "spread": noise,
        }
        for s in range(n_senses)
    ]
    return {
        "dim": dim,
        "n_layers": 1,
        "seed": seed,
        "spike_magnitude": spike_magnitude,
        "clusters": clusters,
    }


def generate(spec: dict) -> tuple[EmbeddingDataset, dict]:
    """Build a dataset from a synth spec; returns (dataset, ground_truth)."""
    dim = int(spec["dim"])
    n_layers = int(spec.get("n_layers", 1))
    seed = int(spec.get("seed", 0))
    spike_mag = float(spec.get("spike_magnitude", 0.0))
    clusters = spec["clusters"]
    if not clusters:
        raise ConfigError("synth spec needs at least one cluster")
    for c in clusters:
        if int(c["count"]) < 1:
            raise ConfigError("cluster count must be >= 1")
        if int(c["mean_axis"]) >= dim:
            raise ConfigError("mean_axis out of range for dim")

    rng = np.random.default_rng(seed)
    occs: list[Occurrence] = []
    blocks: list[np.ndarray] = []
    # The spike is a shared direction with per-row varying strength
    # (coefficient M*(sqrt(D) + eps_i)): it dominates both the mean offset
    # and the covariance, so it drives the random-pair baseline up AND is
    # removable as the top principal component. A strictly constant offset
    # would vanish under mean centering and never reach the PCA.
    spike_dir = np.zeros(dim)
    if spike_mag != 0.0:
        raw = rng.standard_normal(dim)
        spike_dir = raw / np.linalg.norm(raw)

    occ_id = 0
    for ci, c in enumerate(clusters):
        count = int(c["count"])
        mean = np.zeros(dim)
        mean[int(c["mean_axis"])] = float(c.get("mean_scale", 1.0))
        spread = float(c.get("spread", 0.0))
        pts = mean + spread * rng.standard_normal((count, dim))
        if spike_mag != 0.0:
            coeffs = spike_mag * (np.sqrt(dim) + rng.standard_normal(count))
            pts = pts + coeffs[:, None] * spike_dir
        blocks.append(pts)
        key = c["sense_key"]
        pos = _POS_OF_KEY.get(key.split(".")[1] if "." in key else "n", Pos.NOUN)
        for j in range(count):
            occs.append(
                Occurrence(
                    occ_id=occ_id,
                    corpus_id="synth",
                    sentence_idx=ci,
                    token_idx=j,
                    surface=c["lemma"],
                    lemma=c["lemma"],
                    pos=pos,
                    sense_key=key,
                    frequency_rank=0,  # recomputed below
                )
            )
            occ_id += 1

    # Frequency ranks over the generated table, same rule as the loader.
    from .corpus import _assign_ranks

    ranks = _assign_ranks([o.lemma for o in occs])
    occs = [
        Occurrence(**{**o.__dict__, "frequency_rank": ranks[o.lemma]}) for o in occs
    ]

    base = np.vstack(blocks)
    layers = []
    for k in range(n_layers):
        # Layers beyond 0 get independent noise so multi-layer paths are exercised.
        mat = base if k == 0 else base + 0.01 * rng.standard_normal(base.shape)
        layers.append(LayerMatrix(layer=k, data=mat.astype(np.float32)))

    ds = EmbeddingDataset(
        manifest=make_manifest("synthetic", layers, len(occs)),
        occurrences=occs,
        layers=layers,
    )
    truth = {
        "spec": spec,
        "spike_direction": spike_dir.tolist(),
        "cluster_sizes": [int(c["count"]) for c in clusters],
    }
    return ds, truth


def write_ground_truth(truth: dict, out_dir: str | Path) -> None:
    with open(Path(out_dir) / "ground_truth.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(truth, f, indent=2, sort_keys=True)
        f.write("\n")
