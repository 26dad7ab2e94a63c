"""Neighbor selection, affinity construction, and symmetric normalization.

The affinity between two nodes is a base term derived from the configured
distance measure, optionally multiplied by the path-density factor. The
matrix is symmetrized as (M + M^T) / 2 and normalized as
D^(-1/2) W D^(-1/2) with D the diagonal of row sums, which keeps the
spectral radius at or below one and makes the propagation contraction
converge. Scaling W by any positive constant leaves the normalized matrix
unchanged.
"""

from dataclasses import dataclass

import numpy as np

from .core import AffinityMatrix, DataError, FeatureMatrix, NumericalError
from .density import batch_path_density_info

__all__ = [
    "EPS_DISTANCE",
    "NeighborSet",
    "build_affinity",
    "knn_edges",
    "knn_select",
    "normalize_symmetric",
]

# Floor applied to a Euclidean distance before inversion, guarding against
# coincident points.
EPS_DISTANCE = 1e-12


@dataclass(frozen=True)
class NeighborSet:
    """Nearest neighbors of one center row, closest first.

    Distances are ascending; exact ties are resolved toward the smaller
    row index. The center itself never appears.
    """

    center: int
    indices: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        self.indices.setflags(write=False)
        self.distances.setflags(write=False)

    def __len__(self):
        return self.indices.size


def knn_select(features, center, count):
    """The ``count`` rows nearest to ``center``, excluding the center."""
    if not isinstance(features, FeatureMatrix):
        features = FeatureMatrix(features)
    center, count = int(center), int(count)
    if not 0 <= center < features.n_rows:
        raise DataError("center row out of range")
    if count < 1:
        raise DataError("neighbor count must be >= 1")
    if count >= features.n_rows:
        raise DataError(
            "neighbor count %d must be smaller than the %d rows"
            % (count, features.n_rows)
        )
    d2 = np.sum((features.data - features.data[center]) ** 2, axis=1)
    d2[center] = -np.inf  # sorts first; dropped below
    order = np.argsort(d2, kind="stable")
    idx = order[1 : count + 1]
    return NeighborSet(
        center=center, indices=idx, distances=np.sqrt(d2[idx])
    )


def knn_edges(features, count):
    """Directed nearest-neighbor edges (i -> each of i's ``count`` nearest).

    Returns an (N * count, 2) index array using the same distance and
    tie-breaking rules as ``knn_select``.
    """
    if not isinstance(features, FeatureMatrix):
        features = FeatureMatrix(features)
    count = int(count)
    if count < 1 or count >= features.n_rows:
        raise DataError(
            "neighbor count %d must lie in [1, %d)" % (count, features.n_rows)
        )
    pool = features.data
    n, dim = pool.shape
    neighbors = np.empty((n, count), dtype=int)
    chunk = max(1, 8_000_000 // (n * dim))
    for start in range(0, n, chunk):
        block = pool[start : start + chunk]
        d2 = np.sum((block[:, None, :] - pool[None, :, :]) ** 2, axis=2)
        rows = np.arange(start, start + block.shape[0])
        d2[rows - start, rows] = -np.inf
        order = np.argsort(d2, axis=1, kind="stable")
        neighbors[start : start + block.shape[0]] = order[:, 1 : count + 1]
    sources = np.repeat(np.arange(n), count)
    return np.column_stack([sources, neighbors.reshape(-1)])


def _base_affinity(left, right, mode):
    """Base affinity values for paired feature rows (vectorized)."""
    if mode == "euclidean_inverse":
        dist = np.sqrt(np.sum((left - right) ** 2, axis=1))
        return 1.0 / np.maximum(dist, EPS_DISTANCE)
    if mode == "first_order_similarity":
        return np.maximum(np.sum(left * right, axis=1), 0.0)
    if mode == "cosine_similarity":
        norm_l = np.sqrt(np.sum(left**2, axis=1))
        norm_r = np.sqrt(np.sum(right**2, axis=1))
        if np.any(norm_l == 0.0) or np.any(norm_r == 0.0):
            raise DataError("cosine similarity is undefined for a zero-norm vector")
        sim = np.sum(left * right, axis=1) / (norm_l * norm_r)
        return np.maximum(sim, 0.0)
    raise DataError("unknown distance mode: %r" % (mode,))


def build_affinity(features, node_set, cfg, edges=None):
    """Affinity matrix over ``node_set``, densified and symmetrized.

    With ``edges=None`` every off-diagonal pair receives an entry. When a
    directed (E, 2) array of positions into ``node_set`` is given, only
    those pairs do, and the (M + M^T) / 2 symmetrization assigns half
    weight to edges present in a single direction. In "pmlp" mode each
    entry is multiplied by the pair's path-density factor; in
    "classical_lpa" mode the factor is identically one.
    """
    if not isinstance(features, FeatureMatrix):
        features = FeatureMatrix(features)
    node = np.asarray(node_set, dtype=int)
    if node.ndim != 1 or node.size < 2:
        raise DataError("node_set needs at least 2 indices")
    if np.unique(node).size != node.size:
        raise DataError("node_set contains duplicate indices")
    if np.any(node < 0) or np.any(node >= features.n_rows):
        raise DataError("node_set index out of range")
    m = node.size

    if edges is None:
        iu, ju = np.triu_indices(m, k=1)
        weight = np.ones(iu.size)
    else:
        edges = np.asarray(edges, dtype=int)
        if edges.ndim != 2 or edges.shape[1] != 2 or edges.shape[0] < 1:
            raise DataError("edges must be a nonempty (E, 2) position array")
        if np.any(edges < 0) or np.any(edges >= m):
            raise DataError("edge position out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise DataError("self loops are not allowed")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        keys, inverse = np.unique(lo * m + hi, return_inverse=True)
        forward = np.zeros(keys.size, dtype=bool)
        backward = np.zeros(keys.size, dtype=bool)
        forward[inverse[edges[:, 0] < edges[:, 1]]] = True
        backward[inverse[edges[:, 0] > edges[:, 1]]] = True
        weight = np.where(forward & backward, 1.0, 0.5)
        iu = keys // m
        ju = keys % m

    gi = node[iu]
    gj = node[ju]
    values = _base_affinity(features.data[gi], features.data[gj], cfg.distance_mode)
    if cfg.mode == "pmlp":
        values = values * batch_path_density_info(
            features, np.column_stack([gi, gj]), cfg
        )
    values = weight * values

    matrix = np.zeros((m, m))
    matrix[iu, ju] = values
    matrix[ju, iu] = values
    return AffinityMatrix(matrix)


def normalize_symmetric(affinity):
    """Symmetrically normalized matrix S = D^(-1/2) W D^(-1/2).

    D is the diagonal matrix of row sums of W. Every row must have a
    positive sum; an isolated node is reported by index rather than
    silently patched (enlarging the neighbor count usually fixes it).
    """
    if not isinstance(affinity, AffinityMatrix):
        affinity = AffinityMatrix(affinity)
    degrees = affinity.data.sum(axis=1)
    dead = np.flatnonzero(degrees <= 0.0)
    if dead.size:
        raise NumericalError(
            "row %d has zero degree (isolated node); "
            "enlarge neighbor_count or check the affinity inputs" % int(dead[0])
        )
    inv_sqrt = 1.0 / np.sqrt(degrees)
    # The outer product is exactly symmetric, so S is too.
    return np.outer(inv_sqrt, inv_sqrt) * affinity.data
