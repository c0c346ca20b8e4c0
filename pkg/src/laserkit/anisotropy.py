"""Per-layer anisotropy measurement.

Three views: the random-pair cosine baseline (expected cosine between
randomly sampled occurrence vectors; 0 for an isotropic space), the
explained-variance spectrum of the top principal components, and a 2D
projection for frequency-coded scatter data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Occurrence
from .errors import ConfigError, DataError
from .store import LayerMatrix

_RANK_TOL = 1e-12


@dataclass
class AnisotropyProfile:
    layer: int
    baseline_b: float
    sample_size: int
    seed: int
    explained_variance: np.ndarray  # (d_top,) descending ratios
    top2_projection: np.ndarray  # (n, 2)


def cosine(x: np.ndarray, y: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DataError(f"dimension mismatch: {x.shape} vs {y.shape}")
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        raise DataError("cosine undefined for zero-norm vector")
    return float(np.clip(np.dot(x, y) / (nx * ny), -1.0, 1.0))


def _unit_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0.0):
        raise DataError("zero-norm row in sampled matrix")
    return mat / norms[:, None]


def random_pair_baseline(
    layer: LayerMatrix,
    k: int,
    seed: int,
    pairing: str = "all_pairs",
) -> float:
    """Mean cosine between randomly sampled occurrence vectors.

    all_pairs: sample k distinct rows, average over all k(k-1)/2 pairs.
    k_pairs: sample k independent distinct-index pairs and average those.
    """
    if k < 2:
        raise ConfigError("k must be >= 2")
    n = layer.n
    rng = np.random.default_rng(seed)
    x = layer.as_f64()
    if pairing == "all_pairs":
        if k > n:
            raise DataError(f"k={k} exceeds row count {n}")
        idx = rng.choice(n, size=k, replace=False)
        u = _unit_rows(x[idx])
        gram = u @ u.T
        iu = np.triu_indices(k, k=1)
        return float(np.clip(np.mean(gram[iu]), -1.0, 1.0))
    if pairing == "k_pairs":
        if n < 2:
            raise DataError("need at least 2 rows to sample pairs")
        total = 0.0
        for _ in range(k):
            i, j = rng.choice(n, size=2, replace=False)
            total += cosine(x[i], x[j])
        return total / k
    raise ConfigError(f"unknown pairing mode: {pairing!r}")


def _svd_components(centered: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """SVD of the centered matrix with a fixed sign convention.

    Each principal direction is flipped so its largest-magnitude coordinate
    is positive, removing eigenvector sign ambiguity.
    """
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    for j in range(vt.shape[0]):
        pivot = np.argmax(np.abs(vt[j]))
        if vt[j, pivot] < 0:
            vt[j] = -vt[j]
    return s, vt


def pca_profile(layer: LayerMatrix, d_top: int) -> tuple[np.ndarray, np.ndarray]:
    """Explained-variance ratios of the top components and the 2D projection.

    Works on a mean-centered copy; ratios are component variance over total
    variance, descending. Raises on rank-0 input (nothing to decompose).
    """
    n = layer.n
    if n < 2:
        raise DataError("need at least 2 rows for a variance decomposition")
    if d_top < 1 or d_top > min(n, layer.dim):
        raise ConfigError(f"d_top must be in 1..{min(n, layer.dim)}")
    centered = layer.as_f64()
    centered -= centered.mean(axis=0)
    s, vt = _svd_components(centered)
    total = float(np.sum(s**2))
    if total <= _RANK_TOL * n:
        raise DataError("rank-0 matrix: all rows identical, no variance to decompose")
    ratios = (s**2 / total)[:d_top]
    projection = centered @ vt[:2].T
    if projection.shape[1] < 2:
        projection = np.hstack([projection, np.zeros((n, 2 - projection.shape[1]))])
    return ratios, projection


def profile_layer(
    layer: LayerMatrix,
    occs: list[Occurrence] | None = None,
    k: int = 1000,
    seed: int = 0,
    d_top: int = 10,
    pairing: str = "all_pairs",
) -> AnisotropyProfile:
    """Full per-layer profile: baseline, spectrum and projection."""
    k_eff = min(k, layer.n)
    ratios, projection = pca_profile(layer, min(d_top, min(layer.n, layer.dim)))
    baseline = random_pair_baseline(layer, k_eff, seed, pairing=pairing)
    return AnisotropyProfile(
        layer=layer.layer,
        baseline_b=baseline,
        sample_size=k_eff,
        seed=seed,
        explained_variance=ratios,
        top2_projection=projection,
    )


def frequency_bands(occs: list[Occurrence], n_bands: int) -> dict[int, int]:
    """Band per occurrence by lemma frequency-rank quantile.

    Band 0 holds the most frequent lemmas. With r distinct ranks, rank q
    falls in band floor((q-1) * n_bands / r).
    """
    if n_bands < 2:
        raise ConfigError("n_bands must be >= 2")
    ranks = sorted({o.frequency_rank for o in occs})
    r = len(ranks)
    if r == 0:
        return {}
    position = {rank: i for i, rank in enumerate(ranks)}
    return {
        o.occ_id: min(position[o.frequency_rank] * n_bands // r, n_bands - 1)
        for o in occs
    }
