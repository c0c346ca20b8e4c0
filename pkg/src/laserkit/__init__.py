"""Toolkit for anisotropy and word-sense geometry in contextual embeddings."""

__version__ = "0.1.0"

from .anisotropy import cosine, frequency_bands, pca_profile, random_pair_baseline
from .corpus import (
    CorpusFormat,
    Occurrence,
    Pos,
    SenseInventory,
    build_inventory,
    load_corpus,
)
from .laser import (
    BetaScheme,
    LaserConfig,
    LaserOutput,
    SenseGraph,
    UpdateMode,
    build_sense_graph,
    laser,
    remove_top_components,
    retrofit,
)
from .metrics import (
    MetricsReport,
    adjust,
    inter_sense_similarity,
    layer_report,
    sense_similarity,
    word_delta,
)
from .store import EmbeddingDataset, LayerMatrix, load_dataset, save_dataset

__all__ = [
    "BetaScheme",
    "CorpusFormat",
    "EmbeddingDataset",
    "LaserConfig",
    "LaserOutput",
    "LayerMatrix",
    "MetricsReport",
    "Occurrence",
    "Pos",
    "SenseGraph",
    "SenseInventory",
    "UpdateMode",
    "adjust",
    "build_inventory",
    "build_sense_graph",
    "cosine",
    "frequency_bands",
    "inter_sense_similarity",
    "laser",
    "layer_report",
    "load_corpus",
    "load_dataset",
    "pca_profile",
    "random_pair_baseline",
    "remove_top_components",
    "retrofit",
    "save_dataset",
    "sense_similarity",
    "word_delta",
]
