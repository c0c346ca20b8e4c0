"""On-disk interchange format for occurrence-aligned layer embeddings.

A dataset directory holds manifest.json, occurrences.tsv and one
layer_<k>.f32 file per layer (raw row-major little-endian 32-bit floats).
Row i of every layer corresponds to occ_id i. This triple is the contract
between the extractor and the analysis toolkit; round-trips are bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Occurrence, load_corpus, save_occurrences
from .errors import DataError

DTYPE_TAG = "f32le"
_F32 = np.dtype("<f4")


@dataclass
class LayerMatrix:
    """Embeddings of every occurrence at one model layer."""

    layer: int
    data: np.ndarray  # (n_occurrences, D) float32

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def as_f64(self) -> np.ndarray:
        """Promote to float64 for computation; on-disk precision stays f32."""
        return self.data.astype(np.float64)


@dataclass
class EmbeddingDataset:
    manifest: dict
    occurrences: list[Occurrence]
    layers: list[LayerMatrix]

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def dim(self) -> int:
        return self.layers[0].dim


def make_manifest(model_name: str, layers: list[LayerMatrix], n_occurrences: int) -> dict:
    return {
        "model_name": model_name,
        "n_layers": len(layers),
        "dim": layers[0].dim if layers else 0,
        "n_occurrences": n_occurrences,
        "dtype": DTYPE_TAG,
    }


def _validate(ds: EmbeddingDataset) -> None:
    man = ds.manifest
    n = len(ds.occurrences)
    if man["n_occurrences"] != n:
        raise DataError(
            f"manifest n_occurrences={man['n_occurrences']} but table has {n} rows"
        )
    if man["n_layers"] != len(ds.layers):
        raise DataError(f"manifest n_layers={man['n_layers']} but got {len(ds.layers)}")
    if man.get("dtype") != DTYPE_TAG:
        raise DataError(f"unsupported dtype {man.get('dtype')!r}, expected {DTYPE_TAG!r}")
    for expected, lm in enumerate(ds.layers):
        if lm.layer != expected:
            raise DataError(f"layer indices must be 0..L-1 without gaps; got {lm.layer}")
        if lm.data.shape != (n, man["dim"]):
            raise DataError(
                f"layer {lm.layer}: shape {lm.data.shape} != ({n}, {man['dim']})"
            )
        bad = ~np.isfinite(lm.data)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise DataError(f"layer {lm.layer}: non-finite value at row {r}, column {c}")
    ids = [o.occ_id for o in ds.occurrences]
    if ids != list(range(n)):
        raise DataError("occ_id values must be dense 0..n-1 in table order")


def save_dataset(ds: EmbeddingDataset, out_dir: str | Path) -> None:
    """Write the interchange triple; byte-identical across repeated saves."""
    _validate(ds)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "manifest.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(ds.manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    save_occurrences(ds.occurrences, out / "occurrences.tsv")
    for lm in ds.layers:
        np.ascontiguousarray(lm.data, dtype=_F32).tofile(out / f"layer_{lm.layer}.f32")


def load_dataset(dir_path: str | Path) -> EmbeddingDataset:
    """Load and validate a dataset directory; floats decoded little-endian."""
    root = Path(dir_path)
    man_path = root / "manifest.json"
    if not man_path.is_file():
        raise DataError(f"missing manifest.json in {root}")
    with open(man_path, encoding="utf-8") as f:
        manifest = json.load(f)
    occs = load_corpus(root / "occurrences.tsv")
    n, dim = manifest["n_occurrences"], manifest["dim"]
    layers = []
    for k in range(manifest["n_layers"]):
        path = root / f"layer_{k}.f32"
        if not path.is_file():
            raise DataError(f"missing layer file: {path}")
        expected = n * dim * 4
        actual = path.stat().st_size
        if actual != expected:
            raise DataError(
                f"{path}: truncated layer file, expected {expected} bytes, got {actual}"
            )
        data = np.fromfile(path, dtype=_F32).reshape(n, dim)
        layers.append(LayerMatrix(layer=k, data=data))
    ds = EmbeddingDataset(manifest=manifest, occurrences=occs, layers=layers)
    _validate(ds)
    return ds


def dataset_equal(a: EmbeddingDataset, b: EmbeddingDataset) -> bool:
    """Bit-exact equality, distinguishing signed zeros and preserving subnormals."""
    if a.manifest != b.manifest or a.occurrences != b.occurrences:
        return False
    return all(
        la.layer == lb.layer and la.data.tobytes() == lb.data.tobytes()
        for la, lb in zip(a.layers, b.layers)
    )
