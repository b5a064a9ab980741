#!python3

## Import General Tools
import logging
from fractions import Fraction
from pathlib import Path
from warnings import warn

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from astropy.io import fits


log = logging.getLogger(__name__)


class GraphError(Exception): pass


class GraphWarning(UserWarning): pass


##-------------------------------------------------------------------------
## Graph
##-------------------------------------------------------------------------
class Graph():
    '''An immutable undirected load balancing network.

    The adjacency is stored twice: once as a list of undirected edges
    (``eu[e] < ev[e]``), which is the orientation every per-edge quantity
    (flows, rounding errors, edge weights) uses, and once as a CSR list of
    directed arcs sorted by (source, target) so that ``neighbors(i)`` is
    sorted.  Arc ``a`` belongs to undirected edge ``arc_edge[a]`` and carries
    ``arc_sign[a] = +1`` if it points along the edge orientation.

    Attributes
    ----------
    n : int
        The number of nodes.  Node ids are dense, 0..n-1.

    speeds : numpy.ndarray
        Per-node processor speed.  Defaults to 1.0 everywhere.

    alpha_num, alpha_den : numpy.ndarray
        Edge weights alpha(i,j) as exact rationals, one per undirected edge.
        Defaults to 1/(max(d_i, d_j) + 1).

    family : str
        Name of the generator family (``torus2d``, ``hypercube``, ...) or
        None.  Spectral code uses this to select closed forms.

    params : dict
        Generator parameters, e.g. ``{'width': 100, 'height': 100}``.
    '''
    def __init__(self, n, edges, speeds=None, alpha=None, name=None,
                 family=None, params=None, coords=None, check=True):
        self.n = int(n)
        self.family = family
        self.params = dict(params) if params is not None else {}
        self.name = name if name is not None else f'Graph n={self.n}'

        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        eu = np.minimum(edges[:, 0], edges[:, 1])
        ev = np.maximum(edges[:, 0], edges[:, 1])
        order = np.lexsort((ev, eu))
        self.eu = eu[order]
        self.ev = ev[order]
        self.m = len(self.eu)

        # Directed arcs in CSR order
        src = np.concatenate([self.eu, self.ev])
        dst = np.concatenate([self.ev, self.eu])
        edge_id = np.concatenate([np.arange(self.m), np.arange(self.m)])
        sign = np.concatenate([np.ones(self.m, dtype=np.int64),
                               -np.ones(self.m, dtype=np.int64)])
        arc_order = np.lexsort((dst, src))
        self.arc_src = src[arc_order]
        self.arc_dst = dst[arc_order]
        self.arc_edge = edge_id[arc_order]
        self.arc_sign = sign[arc_order]
        self.degree = np.bincount(self.eu, minlength=self.n)\
                    + np.bincount(self.ev, minlength=self.n)
        self.indptr = np.concatenate([[0], np.cumsum(self.degree)])

        if speeds is None:
            self.speeds = np.ones(self.n)
        else:
            self.speeds = np.asarray(speeds, dtype=float).copy()

        if alpha is None:
            self.alpha_num = np.ones(self.m, dtype=np.int64)
            self.alpha_den = np.maximum(self.degree[self.eu],
                                        self.degree[self.ev]) + 1
        else:
            num, den = alpha
            self.alpha_num = np.asarray(num, dtype=np.int64)[order]
            self.alpha_den = np.asarray(den, dtype=np.int64)[order]
        self.alpha = self.alpha_num / self.alpha_den
        self.coords = None if coords is None else np.asarray(coords, dtype=float)

        for arr in [self.eu, self.ev, self.arc_src, self.arc_dst,
                    self.arc_edge, self.arc_sign, self.degree, self.indptr,
                    self.speeds, self.alpha_num, self.alpha_den, self.alpha]:
            arr.setflags(write=False)

        if check is True:
            self.validate()


    def validate(self):
        '''Check the graph invariants.

        Check:
        - node ids are in range, no self-loops, no parallel edges
        - all speeds are at least 1
        - every alpha is in (0, 1) and sums to at most 1 around every node
        - the graph is connected
        '''
        if self.n < 1:
            raise GraphError('A graph needs at least one node')
        if self.m > 0:
            if self.eu.min() < 0 or self.ev.max() >= self.n:
                raise GraphError('Edge endpoint out of range')
        if np.any(self.eu == self.ev):
            raise GraphError('Self-loops are not allowed')
        if self.m > 1:
            dup = (np.diff(self.eu) == 0) & (np.diff(self.ev) == 0)
            if np.any(dup):
                raise GraphError('Parallel edges are not allowed')
        if len(self.speeds) != self.n:
            raise GraphError(f'Expected {self.n} speeds, got {len(self.speeds)}')
        if np.any(self.speeds < 1):
            raise GraphError('The minimum speed is 1')
        if np.any(self.alpha_num <= 0) or np.any(self.alpha_num >= self.alpha_den):
            raise GraphError('Edge weights must lie in (0, 1)')
        weight_sum = np.bincount(self.eu, self.alpha, minlength=self.n)\
                   + np.bincount(self.ev, self.alpha, minlength=self.n)
        if np.any(weight_sum > 1 + 1e-12):
            raise GraphError('Edge weights around a node sum to more than 1')
        if self.n > 1 and self.components()[0] != 1:
            raise GraphError(f'{self.name} is not connected')


    ##-------------------------------------------------------------------------
    ## Structure
    ##-------------------------------------------------------------------------
    def neighbors(self, i):
        return self.arc_dst[self.indptr[i]:self.indptr[i+1]]


    def alpha_exact(self, i, j):
        '''Return alpha(i,j) as a `fractions.Fraction`.'''
        e = self.edge_index(i, j)
        return Fraction(int(self.alpha_num[e]), int(self.alpha_den[e]))


    def edge_index(self, i, j):
        u, v = min(i, j), max(i, j)
        lo = np.searchsorted(self.eu, u, side='left')
        hi = np.searchsorted(self.eu, u, side='right')
        k = lo + np.searchsorted(self.ev[lo:hi], v)
        if k >= hi or self.ev[k] != v:
            raise GraphError(f'({i}, {j}) is not an edge of {self.name}')
        return int(k)


    def components(self):
        adj = self.adjacency()
        return connected_components(adj, directed=False)


    def adjacency(self):
        data = np.ones(2*self.m)
        return sparse.csr_matrix((data, (self.arc_src, self.arc_dst)),
                                 shape=(self.n, self.n))


    @property
    def max_degree(self):
        return int(self.degree.max()) if self.n > 0 else 0


    @property
    def heterogeneous(self):
        return bool(np.any(self.speeds != 1.0))


    @property
    def s_total(self):
        return float(self.speeds.sum())


    @property
    def s_max(self):
        return float(self.speeds.max())


    def with_speeds(self, speeds):
        '''Return a copy of this graph carrying the given speeds.'''
        edges = np.column_stack([self.eu, self.ev])
        return Graph(self.n, edges, speeds=speeds,
                     alpha=(self.alpha_num, self.alpha_den),
                     name=f'{self.name} (heterogeneous)', family=self.family,
                     params=self.params, coords=self.coords)


    ##-------------------------------------------------------------------------
    ## Per-edge helpers
    ##-------------------------------------------------------------------------
    def scaled_difference(self, x):
        '''Return x_u/s_u - x_v/s_v for every undirected edge (u, v).'''
        x = np.asarray(x)
        if self.heterogeneous:
            z = x / self.speeds
            return z[self.eu] - z[self.ev]
        return x[self.eu] - x[self.ev]


    def edge_difference(self, x):
        x = np.asarray(x)
        return x[self.eu] - x[self.ev]


    def net_outflow(self, y):
        '''Net load leaving every node for per-edge flows `y` (u -> v positive).'''
        y = np.asarray(y, dtype=float)
        return np.bincount(self.eu, y, minlength=self.n)\
             - np.bincount(self.ev, y, minlength=self.n)


    def gross_outflow(self, y):
        '''Load every node sends out, ignoring what it receives.'''
        y = np.asarray(y, dtype=float)
        return np.bincount(self.eu, np.maximum(y, 0), minlength=self.n)\
             + np.bincount(self.ev, np.maximum(-y, 0), minlength=self.n)


    def to_header(self):
        h = fits.Header()
        h['GNAME'] = (self.name, 'Graph name')
        h['GFAMILY'] = (str(self.family), 'Graph family')
        h['GNODES'] = (self.n, 'Number of nodes')
        h['GEDGES'] = (self.m, 'Number of edges')
        h['GHETERO'] = (self.heterogeneous, 'Heterogeneous speeds?')
        return h


    def __str__(self):
        return f'{self.name}'


    def __repr__(self):
        return (f'{self.name} (n={self.n}, m={self.m}, '
                f'degree {self.degree.min()}..{self.degree.max()})')


##-------------------------------------------------------------------------
## Diffusion matrix
##-------------------------------------------------------------------------
def diffusion_row(graph, i):
    '''Return (M_ii, [(j, M_ij), ...]) for row i of the diffusion matrix.

    Homogeneous networks use M_ij = alpha(i,j).  Heterogeneous networks use
    the row of I - L S^-1, i.e. M_ij = alpha(i,j)/s_j and
    M_ii = 1 - sum_j alpha(i,j)/s_i.
    '''
    if i < 0 or i >= graph.n:
        raise GraphError(f'Node {i} not in {graph.name}')
    lo, hi = graph.indptr[i], graph.indptr[i+1]
    nbrs = graph.arc_dst[lo:hi]
    alphas = graph.alpha[graph.arc_edge[lo:hi]]
    s = graph.speeds
    row = [(int(j), float(a/s[j])) for j, a in zip(nbrs, alphas)]
    diag = 1.0 - float(alphas.sum())/s[i]
    return diag, row


def laplacian(graph):
    '''The alpha-weighted Laplacian as a sparse matrix.'''
    w = graph.alpha[graph.arc_edge]
    off = sparse.csr_matrix((-w, (graph.arc_src, graph.arc_dst)),
                            shape=(graph.n, graph.n))
    diag = np.bincount(graph.arc_src, w, minlength=graph.n)
    return (off + sparse.diags(diag)).tocsr()


def diffusion_matrix(graph):
    '''M = I - L S^-1 as a sparse CSR matrix (M = I - L when homogeneous).'''
    L = laplacian(graph)
    Sinv = sparse.diags(1.0/graph.speeds)
    return (sparse.identity(graph.n, format='csr') - L @ Sinv).tocsr()


def dense_diffusion_matrix(graph, cap=4096):
    if graph.n > cap:
        raise GraphError(f'{graph.name} has {graph.n} nodes, over the dense '
                         f'cap of {cap}')
    return diffusion_matrix(graph).toarray()


##-------------------------------------------------------------------------
## File interfaces
##-------------------------------------------------------------------------
def read_speeds(file, n=None):
    '''Read a speed file: one decimal per line, line k = speed of node k.'''
    p = Path(file).expanduser().absolute()
    if p.exists() is False:
        raise FileNotFoundError(f'{p}')
    speeds = np.loadtxt(p, dtype=float, ndmin=1)
    if n is not None and len(speeds) != n:
        raise GraphError(f'Speed file {p.name} has {len(speeds)} entries, '
                         f'expected {n}')
    if np.any(speeds < 1):
        warn(f'Speed file {p.name} has speeds below 1', category=GraphWarning)
    return speeds


def write_edgelist(graph, file):
    '''Write the edge list, one "i j" pair per line with i < j.'''
    p = Path(file).expanduser().absolute()
    if p.exists(): p.unlink()
    np.savetxt(p, np.column_stack([graph.eu, graph.ev]), fmt='%d')
