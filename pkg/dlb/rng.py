#!python3

## Import General Tools
import hashlib

import numpy as np


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def _hash_to_u64(text):
    digest = hashlib.sha256(text.encode('ascii')).digest()
    return int.from_bytes(digest[:8], 'big', signed=False)


def _splitmix64(z):
    '''SplitMix64 finalizer applied elementwise to a uint64 array.'''
    with np.errstate(over='ignore'):
        z = z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


##-------------------------------------------------------------------------
## SubstreamRNG
##-------------------------------------------------------------------------
class SubstreamRNG():
    '''Counter-based random numbers, one independent substream per (round, node).

    The k-th draw of node i in round t is a pure function of
    (seed, t, i, k), so the values a node sees do not depend on how the
    nodes are split across workers or in which order they are visited.

    Attributes
    ----------
    seed : int
        Master seed.
    '''
    def __init__(self, seed=0):
        self.seed = int(seed) & _MASK
        self._key = np.uint64(_hash_to_u64(f'{self.seed}:substreams'))


    def bits(self, round, nodes, counters):
        nodes = np.asarray(nodes, dtype=np.uint64)
        counters = np.asarray(counters, dtype=np.uint64)
        with np.errstate(over='ignore'):
            h = _splitmix64(np.full(nodes.shape, self._key) ^ np.uint64(round))
            h = _splitmix64(h ^ nodes)
            return _splitmix64(h + counters)


    def uniform(self, round, nodes, counters):
        '''Uniform doubles in [0, 1) for draw `counters` of `nodes` in `round`.'''
        h = self.bits(round, nodes, counters)
        return (h >> np.uint64(11)).astype(np.float64) * 2.0**-53


    def __str__(self):
        return f'SubstreamRNG(seed={self.seed})'


    def __repr__(self):
        return str(self)
