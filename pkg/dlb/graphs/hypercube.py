#!python3

## Import General Tools
import numpy as np

from ..graph import Graph, GraphError


def hypercube(dimension):
    '''The d-dimensional hypercube on 2^d nodes; i ~ j iff they differ in one bit.'''
    d = int(dimension)
    if d < 1 or d > 30:
        raise GraphError(f'Hypercube dimension must be in 1..30, got {d}')
    n = 2**d
    nodes = np.arange(n, dtype=np.int64)
    edges = []
    for b in range(d):
        low = nodes[(nodes >> b) & 1 == 0]
        edges.append(np.column_stack([low, low | (1 << b)]))
    return Graph(n, np.vstack(edges), name=f'hypercube d={d}',
                 family='hypercube', params={'dimension': d})
