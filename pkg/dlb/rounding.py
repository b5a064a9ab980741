#!python3

## Import General Tools
import logging
from concurrent.futures import ThreadPoolExecutor
from functools import partial

import numpy as np

from .flows import EdgeFlows, RoundingErrors


log = logging.getLogger(__name__)


class RoundingError(Exception): pass


def _to_edges(graph, arc_flow, positive):
    '''Collapse per-arc flows on positive arcs back to oriented edge values.'''
    values = np.zeros(graph.m, dtype=np.int64)
    arcs = np.flatnonzero(positive)
    values[graph.arc_edge[arcs]] = arc_flow[arcs] * graph.arc_sign[arcs]
    return values


def round_floor(schedule):
    '''Round every scheduled flow toward zero.

    The realized flow on each edge is the floor of the amount scheduled in
    its positive direction, so every error lies in [0, 1) in that direction.
    '''
    y = schedule.values
    realized = (np.sign(y) * np.floor(np.abs(y))).astype(np.int64)
    flows = EdgeFlows(schedule.graph, realized)
    return flows, RoundingErrors(schedule.graph, y - realized)


def _draw_tokens(graph, pos_arcs, csum, r, tokens, rng, round, lo, hi):
    '''Token destinations for the nodes lo..hi-1.

    Returns the arc index chosen by every token that leaves its node.
    '''
    counts = tokens[lo:hi]
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    owner = np.repeat(np.arange(lo, hi), counts)
    first = np.concatenate([[0], np.cumsum(counts)[:-1]])
    k = np.arange(total) - np.repeat(first, counts)

    u_leave = rng.uniform(round, owner, 2*k)
    u_dest = rng.uniform(round, owner, 2*k + 1)
    leaves = u_leave < r[owner] / tokens[owner]
    owner = owner[leaves]
    u_dest = u_dest[leaves]

    # Search the global prefix sums, clamped to the owner's positive arcs
    src = graph.arc_src[pos_arcs]
    start = np.searchsorted(src, owner, side='left')
    stop = np.searchsorted(src, owner, side='right')
    target = csum[start] + u_dest*r[owner]
    pick = np.searchsorted(csum[1:], target, side='right')
    pick = np.clip(pick, start, stop - 1)
    return pos_arcs[pick]


def round_randomized(schedule, rng, round=0, workers=1):
    '''Randomized rounding with independent tokens.

    Every node floors its outgoing flows and collects the fractional parts,
    r = sum of {y(i,j)}.  It then draws ceil(r) tokens; each token leaves
    with probability r/ceil(r) and goes to neighbor j with probability
    {y(i,j)}/r, independently of the other tokens.  Draw 2k of node i in
    this round decides whether token k leaves, draw 2k+1 where it goes.

    Parameters
    ----------
    rng : SubstreamRNG
        Counter-based substreams; node i only ever reads its own.

    workers : int
        Number of threads drawing tokens.  The result does not depend on it.
    '''
    graph = schedule.graph
    y_arc = schedule.directed()
    positive = y_arc > 0
    floor_arc = np.floor(np.where(positive, y_arc, 0.0))
    frac = np.where(positive, y_arc - floor_arc, 0.0)
    r = np.bincount(graph.arc_src, frac, minlength=graph.n)
    tokens = np.ceil(r).astype(np.int64)

    pos_arcs = np.flatnonzero(frac > 0)
    csum = np.concatenate([[0.0], np.cumsum(frac[pos_arcs])])

    workers = max(1, int(workers))
    bounds = np.linspace(0, graph.n, workers + 1).astype(int)
    chunks = [(bounds[w], bounds[w+1]) for w in range(workers)]
    draw = partial(_draw_tokens, graph, pos_arcs, csum, r, tokens, rng, round)
    if workers == 1:
        picked = [draw(lo, hi) for lo, hi in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            picked = list(pool.map(lambda c: draw(*c), chunks))
    picked = np.concatenate(picked) if len(picked) > 0 else np.empty(0, int)
    Z = np.bincount(picked, minlength=len(y_arc))
    log.debug(f'Round {round}: {int(tokens.sum())} tokens, {len(picked)} sent')

    arc_flow = floor_arc.astype(np.int64) + Z
    realized = _to_edges(graph, arc_flow, positive)
    flows = EdgeFlows(graph, realized)
    return flows, RoundingErrors(graph, schedule.values - realized)
