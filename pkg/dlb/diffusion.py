#!python3

## Import General Tools
import logging
from dataclasses import dataclass
from pathlib import Path
from warnings import warn

import numpy as np

from .flows import EdgeFlows, fos_flows, sos_flows, apply_flows
from .rounding import round_floor, round_randomized
from .rng import SubstreamRNG
from .record import RoundRecord, Trajectory
from . import metrics


log = logging.getLogger(__name__)


class DiffusionError(Exception): pass


class DiffusionWarning(UserWarning): pass


##-------------------------------------------------------------------------
## LoadState
##-------------------------------------------------------------------------
@dataclass
class LoadState:
    '''Load vector at the start of a round plus the previous round's flows.

    ``y_prev`` holds one value per undirected edge (u -> v, u < v) and is
    None before the first round and after a switch to FOS.
    '''
    x: np.ndarray
    y_prev: np.ndarray = None
    round: int = 0
    switched: bool = False

    @property
    def total(self):
        return self.x.sum()


@dataclass
class RoundResult:
    state: LoadState
    transient: np.ndarray
    schedule: object
    flows: EdgeFlows
    errors: object
    scheme: str


def active_scheme(state, config, graph):
    '''The scheme a round uses, taking switching into account.'''
    if config.scheme == 'FOS' or state.switched is True:
        return 'FOS'
    if config.switch_at is not None and state.round >= config.switch_at:
        return 'FOS'
    if config.switch_local_below is not None:
        if metrics.max_local_difference(state.x, graph) <= config.switch_local_below:
            return 'FOS'
    return 'SOS'


def advance(state, config, graph, beta=1.0, rng=None, workers=1):
    '''Execute one round and return a RoundResult.

    The schedule is computed from the current load (the discrete load for
    discrete schemes), rounded per the configuration and applied as flows.
    The first SOS round has no previous flows and runs FOS.
    '''
    scheme = active_scheme(state, config, graph)
    if scheme == 'SOS' and state.y_prev is not None:
        schedule = sos_flows(state.x, state.y_prev, beta, graph)
    else:
        schedule = fos_flows(state.x, graph)

    if config.rounding == 'none':
        flows, errors = schedule, None
    elif config.rounding == 'floor':
        flows, errors = round_floor(schedule)
    elif config.rounding == 'randomized':
        if rng is None:
            raise DiffusionError('Randomized rounding needs an rng')
        flows, errors = round_randomized(schedule, rng, round=state.round,
                                         workers=workers)
    else:
        raise DiffusionError(f'Unknown rounding "{config.rounding}"')

    x_next, transient = apply_flows(state.x, flows)
    switched = scheme == 'FOS' and config.scheme == 'SOS'
    if switched and state.switched is False:
        log.info(f'Switching to FOS at round {state.round}')
    new = LoadState(x=x_next,
                    y_prev=None if switched else np.array(flows.values),
                    round=state.round + 1, switched=switched)
    return RoundResult(state=new, transient=transient, schedule=schedule,
                       flows=flows, errors=errors, scheme=scheme)


def record(result, graph):
    x = result.state.x
    speeds = graph.speeds if graph.heterogeneous else None
    return RoundRecord(round=result.state.round,
                       total_load=x.sum(),
                       max_above_avg=metrics.max_above_average(x, speeds),
                       max_local_diff=metrics.max_local_difference(x, graph),
                       potential_over_n=metrics.potential(x, speeds)[1],
                       min_load=x.min(),
                       min_transient=metrics.min_transient(result.transient),
                       scheme=result.scheme)


def step(state, config, graph, rng=None, beta=None, workers=1):
    '''One round: returns (new state, RoundRecord).'''
    if beta is None:
        beta = config.resolved_beta(graph)
    result = advance(state, config, graph, beta=beta, rng=rng, workers=workers)
    return result.state, record(result, graph)


def run(x0, config, graph, rng=None, beta=None, workers=1, keep_states=False,
        keep_errors=False, callback=None, progress_every=None):
    '''Run config.rounds rounds from x0.

    Parameters
    ----------
    keep_states : bool
        Attach x(0), ..., x(T) to the trajectory as ``states``.

    keep_errors : bool
        Attach the rounding errors of every round as ``errors``.

    callback : callable
        Called as callback(state, record) after every round, e.g. to write
        frames or snapshots.
    '''
    config.validate()
    x0 = np.asarray(x0)
    if len(x0) != graph.n:
        raise DiffusionError(f'Initial load has {len(x0)} entries, graph has '
                             f'{graph.n} nodes')
    if config.discrete:
        if not np.all(np.equal(np.mod(x0, 1), 0)):
            raise DiffusionError('A discrete run needs an integral initial load')
        x0 = x0.astype(np.int64)
    else:
        x0 = x0.astype(float)
    if beta is None:
        beta = config.resolved_beta(graph)
    if rng is None and config.rounding == 'randomized':
        rng = SubstreamRNG(config.seed)

    state = LoadState(x=x0)
    trajectory = Trajectory(integer_loads=config.discrete)
    if keep_states:
        trajectory.states.append(x0.copy())
    warned = False
    for t in range(int(config.rounds)):
        result = advance(state, config, graph, beta=beta, rng=rng,
                         workers=workers)
        state = result.state
        rec = record(result, graph)
        trajectory.append(rec)
        if keep_states:
            trajectory.states.append(state.x.copy())
        if keep_errors:
            trajectory.errors.append(result.errors)
        if config.discrete is False and warned is False and rec.min_transient < 0:
            warn(f'Negative transient load {rec.min_transient:.4g} in round '
                 f'{t}', category=DiffusionWarning)
            warned = True
        if callback is not None:
            callback(state, rec)
        if progress_every and (t+1) % progress_every == 0:
            log.info(f'Round {t+1}: max-avg={rec.max_above_avg:.3f} '
                     f'local={rec.max_local_diff:.3f} '
                     f'potential/n={rec.potential_over_n:.4g}')
    trajectory.final_state = state
    return trajectory


##-------------------------------------------------------------------------
## Initial loads
##-------------------------------------------------------------------------
init_kinds = ['corner', 'uniform', 'file']


def initial_load(kind, graph, discrete=True):
    '''Initial load vector from a spec such as "corner:1000", "uniform:5"
    or "file:loads.txt".

    corner:F puts F*n tokens on node 0, so the average load is F.
    '''
    if isinstance(kind, (tuple, list)):
        name, arg = kind
    else:
        name, _, arg = str(kind).partition(':')
    name = name.strip().lower()
    if name not in init_kinds:
        raise DiffusionError(f'Unknown initial load "{name}". '
                             f'Use one of {init_kinds}')
    dtype = np.int64 if discrete else float

    if name == 'file':
        p = Path(arg).expanduser().absolute()
        if p.exists() is False:
            raise FileNotFoundError(f'{p}')
        x = np.loadtxt(p, dtype=float, ndmin=1)
        if len(x) != graph.n:
            raise DiffusionError(f'Load file {p.name} has {len(x)} entries, '
                                 f'expected {graph.n}')
    else:
        try:
            value = float(arg)
        except ValueError:
            raise DiffusionError(f'Could not parse "{kind}"')
        x = np.zeros(graph.n)
        if name == 'corner':
            x[0] = value*graph.n
        else:
            x[:] = value

    if discrete and not np.all(np.equal(np.mod(x, 1), 0)):
        raise DiffusionError(f'Initial load "{kind}" is not integral')
    return x.astype(dtype)
