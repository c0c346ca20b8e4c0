"""Post-processing pipeline: mean centering, top principal component
removal, and sense retrofitting over the same-sense clique graph.

Stage 1 strips the dominant common directions that make random vectors
look alike. Stage 2 pulls each annotated occurrence toward the other
occurrences of its sense while anchoring to its stage-1 vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .corpus import SenseInventory
from .errors import ConfigError, DataError
from .store import LayerMatrix

_RANK_TOL = 1e-10


class BetaScheme(str, Enum):
    INVERSE_DEGREE = "inverse_degree"
    UNIFORM_ONE = "uniform_one"


class UpdateMode(str, Enum):
    GAUSS_SEIDEL = "gauss_seidel"
    JACOBI = "jacobi"
    SINGLE_PASS = "single_pass"


@dataclass
class SenseGraph:
    """Same-sense clique graph over occ_ids.

    Edges are not materialized: each sense group of size m logically
    contributes m(m-1)/2 edges, and neighbor sums use per-group running
    totals (identical algebra since the edge weight is constant per node).
    """

    groups: list[list[int]]  # sense groups, each sorted
    degree: dict[int, int]
    group_of: dict[int, int]

    @property
    def n_edges(self) -> int:
        return sum(len(g) * (len(g) - 1) // 2 for g in self.groups)

    @property
    def nodes(self) -> list[int]:
        return sorted(self.degree)


@dataclass
class LaserConfig:
    d_remove: int = 1
    iterations: int = 10
    alpha: float = 1.0
    beta_scheme: BetaScheme = BetaScheme.INVERSE_DEGREE
    update_mode: UpdateMode = UpdateMode.GAUSS_SEIDEL
    seed: int = 0  # reserved; the core pipeline is deterministic

    def __post_init__(self):
        if self.d_remove < 0:
            raise ConfigError("d_remove must be >= 0")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.alpha < 0:
            raise ConfigError("alpha must be nonnegative")
        self.beta_scheme = BetaScheme(self.beta_scheme)
        self.update_mode = UpdateMode(self.update_mode)

    @classmethod
    def from_dict(cls, d: dict) -> "LaserConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return {
            "d_remove": self.d_remove,
            "iterations": self.iterations,
            "alpha": self.alpha,
            "beta_scheme": self.beta_scheme.value,
            "update_mode": self.update_mode.value,
            "seed": self.seed,
        }


@dataclass
class LaserOutput:
    v_prime: LayerMatrix
    q: LayerMatrix
    removed_components: np.ndarray  # (d_remove, D)
    mean_vector: np.ndarray  # (D,)
    convergence: list[float] = field(default_factory=list)


def remove_top_components(
    layer: LayerMatrix, d_remove: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Center rows and project out the top principal directions.

    Returns (v_prime, removed_components, mean_vector) in float64;
    d_remove = 0 returns the centered matrix unchanged.
    """
    n, dim = layer.n, layer.dim
    if n < 2:
        raise DataError("need at least 2 rows")
    if d_remove > min(n - 1, dim):
        raise ConfigError(f"d_remove={d_remove} exceeds min(n-1, D)={min(n - 1, dim)}")
    x = layer.as_f64()
    mu = x.mean(axis=0)
    centered = x - mu
    if d_remove == 0:
        return centered, np.zeros((0, dim)), mu
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(s > _RANK_TOL * max(s[0], 1.0)))
    if d_remove > rank:
        raise DataError(f"d_remove={d_remove} exceeds effective rank {rank}")
    for j in range(d_remove):
        pivot = np.argmax(np.abs(vt[j]))
        if vt[j, pivot] < 0:
            vt[j] = -vt[j]
    components = vt[:d_remove]
    v_prime = centered - (centered @ components.T) @ components
    return v_prime, components, mu


def build_sense_graph(inventory: SenseInventory) -> SenseGraph:
    """Clique per sense; node degree is its group size minus one."""
    groups = [sorted(ids) for _, ids in sorted(inventory.by_sense.items())]
    degree: dict[int, int] = {}
    group_of: dict[int, int] = {}
    for gi, g in enumerate(groups):
        for i in g:
            if i in degree:
                raise DataError(f"occ_id {i} appears in more than one sense group")
            degree[i] = len(g) - 1
            group_of[i] = gi
    return SenseGraph(groups=groups, degree=degree, group_of=group_of)


def retrofit(
    v_prime: np.ndarray,
    graph: SenseGraph,
    cfg: LaserConfig,
    convergence: list[float] | None = None,
) -> np.ndarray:
    """Iterative neighbor-averaging update anchored at the input rows.

    Each sweep sets q_i to the beta-weighted neighbor mean blended with
    the anchor: (sum_j beta_i q_j + alpha v'_i) / (beta_i * deg(i) + alpha).
    Sweeps run in ascending occ_id; nodes outside the graph (or with
    degree 0) keep their input rows exactly.
    """
    if not np.all(np.isfinite(v_prime)):
        raise DataError("non-finite input to retrofit")
    q = v_prime.copy()
    groups = [g for g in graph.groups if len(g) >= 2]
    if not groups:
        return q

    def beta_for(deg: int) -> float:
        if cfg.beta_scheme is BetaScheme.INVERSE_DEGREE:
            return 1.0 / deg
        return 1.0

    if cfg.update_mode is UpdateMode.SINGLE_PASS:
        # One literal application with neighbors read from the input.
        for g in groups:
            deg = len(g) - 1
            beta = beta_for(deg)
            gsum = v_prime[g].sum(axis=0)
            for i in g:
                num = beta * (gsum - v_prime[i]) + cfg.alpha * v_prime[i]
                q[i] = num / (beta * deg + cfg.alpha)
        if convergence is not None:
            convergence.append(float(np.max(np.linalg.norm(q - v_prime, axis=1))))
        return q

    # Per-group running sums make neighbor sums O(D) per node: the sum over
    # clique neighbors of q_j is gsum - q_i because beta is constant per node.
    gauss_seidel = cfg.update_mode is UpdateMode.GAUSS_SEIDEL
    gsums = [q[g].sum(axis=0) for g in groups]
    for _ in range(cfg.iterations):
        max_disp = 0.0
        if not gauss_seidel:
            q_prev = q.copy()
            gsums = [q_prev[g].sum(axis=0) for g in groups]
        for gi, g in enumerate(groups):
            deg = len(g) - 1
            beta = beta_for(deg)
            denom = beta * deg + cfg.alpha
            for i in g:
                old = q[i] if gauss_seidel else q_prev[i]
                neighbor_sum = gsums[gi] - old
                new = (beta * neighbor_sum + cfg.alpha * v_prime[i]) / denom
                disp = float(np.linalg.norm(new - q[i]))
                if disp > max_disp:
                    max_disp = disp
                if gauss_seidel:
                    gsums[gi] = gsums[gi] + (new - q[i])
                q[i] = new
        if convergence is not None:
            convergence.append(max_disp)
    return q


def laser(layer: LayerMatrix, inventory: SenseInventory, cfg: LaserConfig) -> LaserOutput:
    """Run both stages on one layer and keep every stage artifact."""
    v_prime, components, mu = remove_top_components(layer, cfg.d_remove)
    graph = build_sense_graph(inventory)
    convergence: list[float] = []
    q = retrofit(v_prime, graph, cfg, convergence=convergence)
    return LaserOutput(
        v_prime=LayerMatrix(layer=layer.layer, data=v_prime.astype(np.float32)),
        q=LayerMatrix(layer=layer.layer, data=q.astype(np.float32)),
        removed_components=components,
        mean_vector=mu,
        convergence=convergence,
    )
