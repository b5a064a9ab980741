#!python3

## Import General Tools
import logging
from dataclasses import dataclass, field
from warnings import warn

import numpy as np

from .graph import dense_diffusion_matrix
from .spectral import lambda2, beta_opt, DenseEigenBasis
from .flows import EdgeFlows
from .diffusion import run


log = logging.getLogger(__name__)


class TheoryError(Exception): pass


class TheoryWarning(UserWarning): pass


##-------------------------------------------------------------------------
## Q series
##-------------------------------------------------------------------------
@dataclass
class QSeries:
    '''Q(0..T): Q(0) = I, Q(1) = beta M, Q(t) = beta M Q(t-1) + (1-beta) Q(t-2).'''
    matrices: np.ndarray
    beta: float

    @property
    def T(self):
        return len(self.matrices) - 1

    def __getitem__(self, t):
        return self.matrices[t]

    def column_sums(self, t):
        return self.matrices[t].sum(axis=0)

    def q(self, t):
        '''The common column sum of Q(t).'''
        return float(self.column_sums(t).mean())

    def column_sum_spread(self):
        '''Largest max - min column sum over all t.'''
        sums = self.matrices.sum(axis=1)
        return float((sums.max(axis=1) - sums.min(axis=1)).max())


def q_series(graph, beta, T, cap=4096):
    if T < 0:
        raise TheoryError(f'T must be >= 0, got {T}')
    M = dense_diffusion_matrix(graph, cap=cap)
    n = graph.n
    Q = np.empty((T+1, n, n))
    Q[0] = np.eye(n)
    if T >= 1:
        Q[1] = beta*M
    for t in range(2, T+1):
        Q[t] = beta*(M @ Q[t-1]) + (1 - beta)*Q[t-2]
    return QSeries(matrices=Q, beta=beta)


def gamma_recursion(lambda_j, beta, t):
    '''gamma(t) = beta lambda_j gamma(t-1) + (1-beta) gamma(t-2), gamma(0)=1.'''
    g_prev, g = 1.0, beta*lambda_j
    if t == 0:
        return g_prev
    for _ in range(t-1):
        g_prev, g = g, beta*lambda_j*g + (1 - beta)*g_prev
    return g


def gamma_closed_form(lambda_j, lambda_, beta, t, tol=1e-9):
    '''Closed form of the eigenvalue of Q(t) belonging to eigenvalue lambda_j.

    Three cases, with r = sqrt(beta-1):

    - lambda_j = 1: (1 - (beta-1)^(t+1)) / (2 - beta)
    - |lambda_j| = lambda: r^t (t+1), with sign (-1)^t for lambda_j = -lambda
    - otherwise: r^t sin((t+1) theta) / sin(theta), cos(theta) = lambda_j/lambda

    All but the first case require beta = beta_opt(lambda).
    '''
    if t < 0:
        raise TheoryError(f't must be >= 0, got {t}')
    if abs(lambda_j - 1) <= tol:
        return (1 - (beta - 1)**(t+1))/(2 - beta)
    if abs(lambda_j) > lambda_ + tol:
        raise TheoryError(f'|lambda_j|={abs(lambda_j)} exceeds lambda={lambda_}')
    if abs(beta - beta_opt(lambda_)) > 1e-9:
        raise TheoryError(f'beta={beta} is not beta_opt({lambda_})')
    r = np.sqrt(max(beta - 1, 0.0))
    if abs(abs(lambda_j) - lambda_) <= tol:
        value = r**t * (t + 1)
        return -value if (lambda_j < 0 and t % 2 == 1) else value
    theta = np.arctan2(np.sqrt(lambda_**2 - lambda_j**2), lambda_j)
    return r**t * np.sin((t + 1)*theta)/np.sin(theta)


def q_spectral(graph, t, cap=4096):
    '''Q(t) for beta = beta_opt assembled from the closed-form gammas.'''
    basis = DenseEigenBasis(graph, cap=cap)
    mu = basis.values
    lam = float(np.abs(mu[1:]).max()) if len(mu) > 1 else 0.0
    beta = beta_opt(lam)
    gammas = np.array([gamma_closed_form(m, lam, beta, t) for m in mu])
    U = basis.U
    r = basis.root_speeds
    return r[:, np.newaxis] * ((U * gammas) @ U.T) / r[np.newaxis, :]


##-------------------------------------------------------------------------
## Contributions
##-------------------------------------------------------------------------
def _responses(graph, scheme, T, beta=None, cap=4096):
    '''Yield (s, P) where node k gains P[k,i] - P[k,j] from a unit moved i -> j.

    FOS: P(s) = M^s.  SOS: P(0) = 0, P(s) = Q(s-1).
    '''
    M = dense_diffusion_matrix(graph, cap=cap)
    n = graph.n
    if scheme == 'FOS':
        P = np.eye(n)
        for s in range(T+1):
            yield s, P
            P = M @ P
    elif scheme == 'SOS':
        if beta is None:
            raise TheoryError('SOS contributions need beta')
        yield 0, np.zeros((n, n))
        Q_prev, Q = None, np.eye(n)
        for s in range(1, T+1):
            yield s, Q
            if Q_prev is None:
                Q_prev, Q = Q, beta*M
            else:
                Q_prev, Q = Q, beta*(M @ Q) + (1 - beta)*Q_prev
    else:
        raise TheoryError(f'Unknown scheme "{scheme}"')


@dataclass
class ContributionTable:
    '''Contributions of every edge (u -> v, u < v) on node k for s = 0..T.'''
    graph: object
    scheme: str
    k: int
    values: np.ndarray

    @property
    def T(self):
        return len(self.values) - 1

    def at(self, s, i, j):
        e = self.graph.edge_index(i, j)
        v = self.values[s, e]
        return v if i < j else -v

    def response(self, s):
        '''Per-edge weight of an error made s rounds before the observation.

        An error made in round tau first shows in x(tau+1), so the lag s
        uses the contribution s-1 rounds after the impulse.
        '''
        index = s - 1 if self.scheme == 'FOS' else s
        if index < 0 or index > self.T:
            raise TheoryError(f'Lag {s} outside the table (T={self.T})')
        return self.values[index]


def contributions(graph, scheme, k, T, beta=None, cap=4096):
    if k < 0 or k >= graph.n:
        raise TheoryError(f'Node {k} not in {graph.name}')
    if graph.n > cap:
        raise TheoryError(f'{graph.name} exceeds the dense cap of {cap}')
    values = np.empty((T+1, graph.m))
    for s, P in _responses(graph, scheme, T, beta=beta, cap=cap):
        values[s] = P[k, graph.eu] - P[k, graph.ev]
    return ContributionTable(graph=graph, scheme=scheme, k=k, values=values)


def deviation_rhs(errors, table, t):
    '''Sum over s = 1..t of e(t-s) weighted by the contributions on node k.

    `errors` is the per-round list of RoundingErrors (or per-edge arrays)
    recorded by the discrete run.
    '''
    if len(errors) < t:
        raise TheoryError(f'Error history has {len(errors)} rounds, need {t}')
    total = 0.0
    for s in range(1, t+1):
        e = errors[t-s]
        e = e.values if isinstance(e, EdgeFlows) else np.asarray(e)
        total += float(e @ table.response(s))
    return total


##-------------------------------------------------------------------------
## Paired runs
##-------------------------------------------------------------------------
@dataclass
class DeviationPair:
    '''A discrete run and its continuous twin from the same initial load.'''
    graph: object
    config: object
    beta: float
    discrete: object
    continuous: object

    @property
    def rounds(self):
        return len(self.discrete)

    def deviation(self):
        '''x^D(t) - x^C(t) as a (rounds+1, n) array.'''
        D = np.array(self.discrete.states, dtype=float)
        C = np.array(self.continuous.states, dtype=float)
        if D.shape != C.shape:
            raise TheoryError(f'Run lengths differ: {D.shape} vs {C.shape}')
        return D - C


def paired_runs(x0, config, graph, beta=None, rng=None):
    if config.discrete is False:
        raise TheoryError('The first run of a pair must be discrete')
    if beta is None:
        beta = config.resolved_beta(graph)
    discrete = run(x0, config, graph, rng=rng, beta=beta, keep_states=True,
                   keep_errors=True)
    continuous = run(np.asarray(x0, dtype=float), config.continuous(), graph,
                     beta=beta, keep_states=True)
    return DeviationPair(graph=graph, config=config, beta=beta,
                         discrete=discrete, continuous=continuous)


def identity_residual(pair, t=None, cap=4096):
    '''Largest |x^D_k(t) - x^C_k(t) - rhs_k(t)| over all nodes k.'''
    t = pair.rounds if t is None else t
    if pair.config.switch_at is not None or pair.config.switch_local_below is not None:
        raise TheoryError('The deviation identity does not cover switching runs')
    observed = pair.deviation()[t]
    worst = 0.0
    for k in range(pair.graph.n):
        table = contributions(pair.graph, pair.config.scheme, k, t,
                              beta=pair.beta, cap=cap)
        rhs = deviation_rhs(pair.discrete.errors, table, t)
        worst = max(worst, abs(observed[k] - rhs))
    return worst


##-------------------------------------------------------------------------
## Refined local divergence
##-------------------------------------------------------------------------
@dataclass(frozen=True)
class UpsilonResult:
    value: float
    truncated_at: int
    converged: bool


def upsilon(graph, scheme, beta=None, tol=1e-12, T_max=None, cap=4096,
            strict=False):
    '''Refined local divergence of a scheme on a graph.

    max over k of the square root of
    sum_s sum_i max_{j in N(i)} (contribution of i -> j on k after s)^2,
    truncated once a round adds less than `tol` times the accumulated
    value, or at T_max (default ceil(50/(1-lambda))).
    '''
    if graph.n > cap:
        raise TheoryError(f'{graph.name} exceeds the dense cap of {cap}')
    lam = lambda2(graph, cap=cap).lambda_
    if scheme == 'SOS' and beta is None:
        beta = beta_opt(lam)
    if T_max is None:
        T_max = int(np.ceil(50/(1 - lam)))
    acc = np.zeros(graph.n)
    converged = False
    starts = graph.indptr[:-1]
    s = 0
    for s, P in _responses(graph, scheme, T_max, beta=beta, cap=cap):
        D = P[:, graph.arc_src] - P[:, graph.arc_dst]
        term = np.maximum.reduceat(D**2, starts, axis=1).sum(axis=1)
        acc += term
        if s >= 1 and acc.max() > 0 and term.max() < tol*acc.max():
            converged = True
            break
    if converged is False:
        msg = (f'Upsilon for {scheme} on {graph.name} still growing after '
               f'T_max={T_max} rounds')
        if strict is True:
            raise TheoryError(msg)
        warn(msg, category=TheoryWarning)
    return UpsilonResult(value=float(np.sqrt(acc.max())), truncated_at=s,
                         converged=converged)


def upsilon_fos_bound(d, lambda_, s_max=1.0):
    '''Explicit upper bound on the FOS refined local divergence.'''
    log_s = np.log(s_max)
    return float(np.sqrt(4*d*np.ceil(log_s/(2*(1 - lambda_)))
                         + 8*d/(1 - lambda_)))


def upsilon_sos_expression(d, lambda_, s_max=1.0):
    '''Growth expression of the SOS refined local divergence (no constant).'''
    return float(np.sqrt(d)*max(1.0, np.log(s_max))/(1 - lambda_)**0.75)


##-------------------------------------------------------------------------
## Bounds
##-------------------------------------------------------------------------
@dataclass
class BoundReport:
    '''Observed value against a bound.

    Monitored reports carry a bound expression without a known constant;
    their ratio is of interest rather than the pass/fail flag.
    '''
    name: str
    bound: float
    observed: float
    satisfied: bool = field(init=False)
    instance: str = ''
    monitored: bool = False

    def __post_init__(self):
        self.satisfied = bool(self.observed <= self.bound)

    @property
    def ratio(self):
        if self.bound == 0:
            return np.inf if self.observed > 0 else 0.0
        return self.observed/self.bound

    def to_dict(self):
        return {'name': self.name, 'instance': self.instance,
                'observed': self.observed, 'bound': self.bound,
                'satisfied': self.satisfied, 'monitored': self.monitored}

    def __str__(self):
        status = 'monitor' if self.monitored else ('pass' if self.satisfied
                                                   else 'FAIL')
        return (f'{self.name:24s}|{self.instance:28s}|{self.observed:14.6g}|'
                f'{self.bound:14.6g}|{status}')


variants = ['end_of_round', 'transient_continuous', 'transient_discrete']


def negative_load_floor(n, delta0, lambda_, variant='end_of_round', d=None):
    '''Lower bound on loads of an SOS run with initial deviation delta0.

    end_of_round:         -sqrt(n) delta0
    transient_continuous: -(sqrt(n) delta0 + 16 sqrt(n) delta0 / sqrt(1-lambda))
    transient_discrete:   -(sqrt(n) delta0 + 16 (sqrt(n) delta0 + d^2) / sqrt(1-lambda))
    '''
    if not 0 <= lambda_ < 1:
        raise TheoryError(f'lambda must lie in [0, 1), got {lambda_}')
    if delta0 < 0:
        raise TheoryError(f'delta0 must be >= 0, got {delta0}')
    root_n = np.sqrt(n)
    gap = np.sqrt(1 - lambda_)
    if variant == 'end_of_round':
        return float(-root_n*delta0)
    if variant == 'transient_continuous':
        return float(-(root_n*delta0 + 16*root_n*delta0/gap))
    if variant == 'transient_discrete':
        if d is None:
            raise TheoryError('transient_discrete needs the maximum degree d')
        return float(-(root_n*delta0 + 16*(root_n*delta0 + d**2)/gap))
    raise TheoryError(f'Unknown variant "{variant}". Use one of {variants}')


def negload_premise(n, d, lambda_, s_max=1.0):
    '''Finite check of the discrete negative-load premise:
    s_max <= n^2 and d/(1-lambda)^(3/4) <= sqrt(n).
    '''
    return bool(s_max <= n**2 and d/(1 - lambda_)**0.75 <= np.sqrt(n))


def sosdet_bound(d, n, s_max, lambda_):
    return float(16*d*np.sqrt(2*n*s_max)/(1 - lambda_))


def fosrand_expression(d, n, s_max, lambda_):
    return float(d*np.sqrt(np.log(n)*max(1.0, np.log(s_max))/(1 - lambda_)))


def sosrand_expression(d, n, s_max, lambda_):
    return float(d*max(1.0, np.log(s_max))*np.sqrt(np.log(n))
                 /(1 - lambda_)**0.75)


bound_kinds = ['sosdet', 'fosrand', 'sosrand']


def deviation_bound_check(pair, kind, lambda_=None):
    '''Compare the largest observed |x^D_k(t) - x^C_k(t)| against a bound.

    ``sosdet`` has an explicit constant and is pass/fail; ``fosrand`` and
    ``sosrand`` are growth expressions and the report is monitored.
    '''
    if kind not in bound_kinds:
        raise TheoryError(f'Unknown bound "{kind}". Use one of {bound_kinds}')
    g = pair.graph
    if lambda_ is None:
        lambda_ = lambda2(g).lambda_
    observed = float(np.abs(pair.deviation()).max())
    d, n, s_max = g.max_degree, g.n, g.s_max
    if kind == 'sosdet':
        return BoundReport('sosdet', sosdet_bound(d, n, s_max, lambda_),
                           observed, instance=g.name)
    if kind == 'fosrand':
        return BoundReport('fosrand', fosrand_expression(d, n, s_max, lambda_),
                           observed, instance=g.name, monitored=True)
    return BoundReport('sosrand', sosrand_expression(d, n, s_max, lambda_),
                       observed, instance=g.name, monitored=True)
