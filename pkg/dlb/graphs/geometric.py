#!python3

## Import General Tools
import logging

import numpy as np
from scipy.spatial import cKDTree
from scipy.sparse.csgraph import connected_components
from scipy import sparse

from ..graph import Graph, GraphError


log = logging.getLogger(__name__)


def default_radius(n):
    return np.log2(n)**0.25


def random_geometric(n, radius=None, seed=0):
    '''Random geometric graph on n points in the [0, sqrt(n)]^2 square.

    Points closer than `radius` (default: fourth root of log2 n) are joined.
    The result is made connected by wiring every node outside the largest
    component to its nearest node inside it.
    '''
    n = int(n)
    if n < 2:
        raise GraphError(f'Need at least 2 nodes, got {n}')
    if radius is None:
        radius = default_radius(n)
    if radius <= 0:
        raise GraphError(f'Radius must be positive, got {radius}')
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0, np.sqrt(n), size=(n, 2))
    tree = cKDTree(coords)
    pairs = tree.query_pairs(radius, output_type='ndarray').astype(np.int64)

    adj = sparse.coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
                            shape=(n, n))
    ncomp, labels = connected_components(adj, directed=False)
    if ncomp > 1:
        giant = np.argmax(np.bincount(labels))
        inside = np.flatnonzero(labels == giant)
        outside = np.flatnonzero(labels != giant)
        _, nearest = cKDTree(coords[inside]).query(coords[outside])
        extra = np.column_stack([outside, inside[nearest]])
        log.info(f'Connected {ncomp-1} minor components with {len(extra)} '
                 f'extra edges')
        pairs = np.vstack([pairs, extra])

    return Graph(n, pairs, name=f'random_geometric n={n} r={radius:.4f}',
                 family='random_geometric', coords=coords,
                 params={'n': n, 'radius': float(radius), 'seed': seed})
