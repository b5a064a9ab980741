#!python3

## Import General Tools
import numpy as np

from ..graph import Graph, GraphError


def torus2d(width, height):
    '''Two-dimensional width x height torus.

    Node (col, row) has id row*width + col and is wired to its four
    neighbors with wraparound.  Both sides must be at least 3 so that the
    four neighbors are distinct.
    '''
    width, height = int(width), int(height)
    if width < 3 or height < 3:
        raise GraphError(f'Torus sides must be >= 3, got {width}x{height}')
    ids = np.arange(width*height).reshape(height, width)
    right = np.roll(ids, -1, axis=1)
    down = np.roll(ids, -1, axis=0)
    edges = np.vstack([np.column_stack([ids.ravel(), right.ravel()]),
                       np.column_stack([ids.ravel(), down.ravel()])])
    return Graph(width*height, edges, name=f'torus2d {width}x{height}',
                 family='torus2d', params={'width': width, 'height': height})
