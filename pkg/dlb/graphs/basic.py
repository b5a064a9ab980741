#!python3

## Import General Tools
import numpy as np

from ..graph import Graph, GraphError


def cycle(n):
    n = int(n)
    if n < 3:
        raise GraphError(f'A cycle needs at least 3 nodes, got {n}')
    u = np.arange(n)
    return Graph(n, np.column_stack([u, (u+1) % n]), name=f'cycle {n}',
                 family='cycle', params={'n': n})


def path(n):
    n = int(n)
    if n < 2:
        raise GraphError(f'A path needs at least 2 nodes, got {n}')
    u = np.arange(n-1)
    return Graph(n, np.column_stack([u, u+1]), name=f'path {n}',
                 family='path', params={'n': n})


def complete2():
    '''The single edge K2.'''
    return Graph(2, [[0, 1]], name='K2', family='k2', params={})
