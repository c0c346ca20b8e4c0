import numpy as np
import pytest

from laserkit.corpus import Occurrence, Pos
from laserkit.store import EmbeddingDataset, LayerMatrix, make_manifest


def make_layer(rows, layer=0):
    return LayerMatrix(layer=layer, data=np.asarray(rows, dtype=np.float32))


def make_occurrence(occ_id, lemma="w", sense_key=None, pos=Pos.NOUN, rank=1,
                    corpus_id="t", sentence_idx=0, token_idx=None):
    return Occurrence(
        occ_id=occ_id,
        corpus_id=corpus_id,
        sentence_idx=sentence_idx,
        token_idx=occ_id if token_idx is None else token_idx,
        surface=lemma,
        lemma=lemma,
        pos=pos,
        sense_key=sense_key,
        frequency_rank=rank,
    )


def make_dataset(matrix, occs, model_name="test"):
    layers = [LayerMatrix(layer=0, data=np.asarray(matrix, dtype=np.float32))]
    return EmbeddingDataset(
        manifest=make_manifest(model_name, layers, len(occs)),
        occurrences=occs,
        layers=layers,
    )


# --- independent oracles, kept naive on purpose -------------------------


def cosine_oracle(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(np.dot(x, y) / (np.linalg.norm(x) * np.linalg.norm(y)))


def pairwise_mean_cosine_oracle(mat):
    """Mean cosine over all unordered pairs via an explicit double loop."""
    mat = np.asarray(mat, dtype=np.float64)
    n = len(mat)
    vals = []
    for i in range(n):
        for j in range(i + 1, n):
            vals.append(cosine_oracle(mat[i], mat[j]))
    return float(np.mean(vals))


def cross_mean_cosine_oracle(a, b):
    vals = []
    for x in a:
        for y in b:
            vals.append(cosine_oracle(x, y))
    return float(np.mean(vals))


def inter_sim_oracle(groups):
    """Triple loop over sense pairs and their cross pairs."""
    vals = []
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            vals.append(cross_mean_cosine_oracle(groups[i], groups[j]))
    return float(np.mean(vals))


def covariance_eig_oracle(mat):
    """Explained-variance ratios via a dense covariance eigendecomposition."""
    mat = np.asarray(mat, dtype=np.float64)
    centered = mat - mat.mean(axis=0)
    cov = centered.T @ centered / len(mat)
    eig = np.linalg.eigvalsh(cov)[::-1]
    eig = np.clip(eig, 0.0, None)
    return eig / eig.sum()


def retrofit_dense_solve_oracle(v_prime, groups, alpha, inverse_degree=True):
    """Direct solve of the retrofit fixed-point linear system."""
    v_prime = np.asarray(v_prime, dtype=np.float64)
    n = len(v_prime)
    m_mat = np.zeros((n, n))
    rhs = v_prime.copy()
    in_group = {}
    for g in groups:
        for i in g:
            in_group[i] = g
    for i in range(n):
        g = in_group.get(i)
        if g is None or len(g) < 2:
            m_mat[i, i] = 1.0
            continue
        deg = len(g) - 1
        beta = 1.0 / deg if inverse_degree else 1.0
        m_mat[i, i] = beta * deg + alpha
        for j in g:
            if j != i:
                m_mat[i, j] = -beta
        rhs[i] = alpha * v_prime[i]
    return np.linalg.solve(m_mat, rhs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
