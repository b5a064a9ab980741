#!python3

## Import General Tools
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class MetricsError(Exception): pass


def balanced_load(x, speeds=None):
    '''The balanced load vector: the average, or m*s_i/s with speeds.'''
    x = np.asarray(x, dtype=float)
    total = x.sum()
    if speeds is None:
        return np.full(len(x), total/len(x))
    speeds = np.asarray(speeds, dtype=float)
    return total * speeds / speeds.sum()


def max_local_difference(x, graph):
    '''Largest |x_u - x_v| over all edges.'''
    if graph.m == 0:
        return 0.0
    return float(np.abs(graph.edge_difference(np.asarray(x, dtype=float))).max())


def max_above_average(x, speeds=None):
    x = np.asarray(x, dtype=float)
    return float((x - balanced_load(x, speeds)).max())


def linf_deviation(x, speeds=None):
    '''Largest |x_i - balanced_i|; used as the initial deviation in bounds.'''
    x = np.asarray(x, dtype=float)
    return float(np.abs(x - balanced_load(x, speeds)).max())


def potential(x, speeds=None):
    '''Return (phi, phi/n) with phi = sum of squared deviations from balance.'''
    x = np.asarray(x, dtype=float)
    phi = float(((x - balanced_load(x, speeds))**2).sum())
    return phi, phi/len(x)


def min_transient(transient):
    return float(np.min(transient))


##-------------------------------------------------------------------------
## Remaining imbalance
##-------------------------------------------------------------------------
@dataclass(frozen=True)
class ImbalanceVerdict:
    converged_at: int = None
    remaining_imbalance: float = None

    @property
    def converged(self):
        return self.converged_at is not None


def remaining_imbalance(series, window=100, tol=1.0, rounds=None):
    '''Detect where a max-above-average series stops improving.

    The series has converged at position r when the best value seen in
    [r, r+window) improves on the best value seen up to r by less than
    `tol`.  The remaining imbalance is the median over that window.

    Parameters
    ----------
    series : array or Trajectory
        A max_above_avg series, or a trajectory to take it from.

    rounds : array
        Round numbers matching the series.  Taken from the trajectory when
        one is given, else the positions are used.
    '''
    if hasattr(series, 'column'):
        rounds = series.column('round')
        series = series.column('max_above_avg')
    series = np.asarray(series, dtype=float)
    if len(series) < window:
        raise MetricsError(f'Series of length {len(series)} is shorter than '
                           f'the window {window}')
    best_so_far = np.minimum.accumulate(series)
    window_best = sliding_window_view(series, window).min(axis=1)
    improvement = best_so_far[:len(window_best)] - window_best
    hits = np.flatnonzero(improvement < tol)
    if len(hits) == 0:
        return ImbalanceVerdict()
    r = int(hits[0])
    at = int(rounds[r]) if rounds is not None else r
    return ImbalanceVerdict(converged_at=at,
                            remaining_imbalance=float(np.median(series[r:r+window])))
