#!python3

## Import General Tools
import logging

import numpy as np

from ..graph import Graph, GraphError


log = logging.getLogger(__name__)

methods = ['auto', 'resample', 'repair']


def _pair_stubs(stubs, rng):
    stubs = rng.permutation(stubs)
    u = np.minimum(stubs[0::2], stubs[1::2])
    v = np.maximum(stubs[0::2], stubs[1::2])
    return u, v


def _try_resample(n, d, rng):
    '''Pair all stubs at once; reject the pairing on any loop or multi-edge.'''
    u, v = _pair_stubs(np.repeat(np.arange(n), d), rng)
    if np.any(u == v):
        return None
    keys = u*n + v
    if len(np.unique(keys)) != len(keys):
        return None
    return np.column_stack([u, v])


def _try_repair(n, d, rng, max_passes=1000):
    '''Keep the good pairs and re-pair the stubs of bad ones.

    Works like the networkx stub-pairing loop: every pass shuffles the
    leftover stubs, keeps pairs that are neither loops nor repeats of an
    accepted edge, and returns the rest to the pool.  Returns None when a
    pass makes no progress for too long.
    '''
    accepted = np.empty(0, dtype=np.int64)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    stalled = 0
    for _ in range(max_passes):
        if len(stubs) == 0:
            keys = np.sort(accepted)
            return np.column_stack([keys // n, keys % n])
        u, v = _pair_stubs(stubs, rng)
        keys = u*n + v
        ok = (u != v) & ~np.isin(keys, accepted)
        # Only the first copy of a key repeated within this pass survives
        _, first = np.unique(keys, return_index=True)
        is_first = np.zeros(len(keys), dtype=bool)
        is_first[first] = True
        ok &= is_first
        if not np.any(ok):
            stalled += 1
            if stalled > 20:
                return None
            continue
        stalled = 0
        accepted = np.concatenate([accepted, keys[ok]])
        stubs = np.concatenate([u[~ok], v[~ok]])
    return None


def random_regular(n, d, seed=0, method='auto', max_attempts=10000):
    '''Uniform-ish random d-regular graph from the configuration model.

    Parameters
    ----------
    method : str
        ``resample`` rejects the whole pairing whenever it contains a
        self-loop or a parallel edge.  ``repair`` re-pairs only the bad
        stubs.  ``auto`` uses ``resample`` for d <= 5 and ``repair`` above,
        where a whole pairing is almost never simple.

    max_attempts : int
        Number of pairings tried before giving up with GraphError.
        Disconnected results also count as a failed attempt.
    '''
    n, d = int(n), int(d)
    if d < 1 or d >= n:
        raise GraphError(f'Degree must satisfy 1 <= d < n, got d={d} n={n}')
    if (n*d) % 2 != 0:
        raise GraphError(f'n*d must be even, got n={n} d={d}')
    if method not in methods:
        raise GraphError(f'Unknown method "{method}". Use one of {methods}')
    if method == 'auto':
        # Whole-pairing resampling stays the default for small d; at d=19
        # the chance of a simple pairing is around exp(-90).
        method = 'resample' if d <= 5 else 'repair'
    attempt = {'resample': _try_resample, 'repair': _try_repair}[method]

    rng = np.random.default_rng(seed)
    for i in range(max_attempts):
        edges = attempt(n, d, rng)
        if edges is None:
            continue
        try:
            g = Graph(n, edges, name=f'random_regular n={n} d={d}',
                      family='random_regular',
                      params={'n': n, 'd': d, 'seed': seed})
        except GraphError as e:
            log.debug(f'Attempt {i+1} rejected: {e}')
            continue
        log.debug(f'random_regular n={n} d={d} took {i+1} attempt(s)')
        return g
    raise GraphError(f'No simple connected {d}-regular graph on {n} nodes '
                     f'after {max_attempts} attempts')
