#!python3

## Import General Tools
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg
from scipy import sparse
from astropy.table import Table

from .graph import diffusion_matrix, dense_diffusion_matrix


log = logging.getLogger(__name__)


class SpectralError(Exception): pass


sources = ['closed_form', 'dense', 'iterative']


@dataclass(frozen=True)
class Spectrum:
    lambda_: float
    source: str

    @property
    def beta(self):
        return beta_opt(self.lambda_)


def torus_eigenvalues(width, height):
    '''All eigenvalues of the torus diffusion matrix as a (height, width) array.

    Entry [b, a] belongs to the Fourier mode with horizontal frequency a and
    vertical frequency b.
    '''
    ca = np.cos(2*np.pi*np.arange(width)/width)
    cb = np.cos(2*np.pi*np.arange(height)/height)
    return (1 + 2*ca[np.newaxis, :] + 2*cb[:, np.newaxis])/5


def hypercube_eigenvalues(dimension):
    '''Distinct eigenvalues 1 - 2k/(d+1), k = 0..d.'''
    k = np.arange(dimension+1)
    return 1 - 2*k/(dimension+1)


def _symmetrized(graph, M):
    '''S^-1/2 M S^1/2, which is symmetric for M = I - L S^-1.'''
    if graph.heterogeneous is False:
        return M
    r = np.sqrt(graph.speeds)
    if sparse.issparse(M):
        return (sparse.diags(1/r) @ M @ sparse.diags(r)).tocsr()
    return M / r[:, np.newaxis] * r[np.newaxis, :]


def _closed_form(graph):
    if graph.heterogeneous is True:
        return None
    if graph.family == 'torus2d':
        mu = torus_eigenvalues(graph.params['width'], graph.params['height'])
        mu = mu.ravel()[1:]
        return float(np.abs(mu).max())
    if graph.family == 'hypercube':
        mu = hypercube_eigenvalues(graph.params['dimension'])[1:]
        return float(np.abs(mu).max())
    return None


def _power_iteration(graph, tol=1e-12, max_sweeps=100000):
    A = _symmetrized(graph, diffusion_matrix(graph))
    top = np.sqrt(graph.speeds)
    top /= np.linalg.norm(top)
    rng = np.random.default_rng(0)
    v = rng.normal(size=graph.n)
    v -= top * (top @ v)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for sweep in range(max_sweeps):
        w = A @ v
        w -= top * (top @ w)
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0
        if abs(norm - estimate) < tol*norm:
            log.debug(f'Power iteration converged after {sweep+1} sweeps')
            return float(norm)
        estimate = norm
        v = w / norm
    raise SpectralError(f'Power iteration on {graph.name} did not converge '
                        f'in {max_sweeps} sweeps')


def lambda2(graph, cap=4096, tol=1e-12, max_sweeps=100000):
    '''Second-largest eigenvalue in magnitude of the diffusion matrix.

    Torus and hypercube use their closed-form spectra, graphs up to `cap`
    nodes a dense symmetric eigensolve, and larger ones power iteration
    deflated against the stationary direction.
    '''
    if graph.n < 2:
        raise SpectralError('A spectrum needs at least two nodes')
    lam = _closed_form(graph)
    if lam is not None:
        source = 'closed_form'
    elif graph.n <= cap:
        A = _symmetrized(graph, dense_diffusion_matrix(graph, cap=cap))
        mu = linalg.eigh(A, eigvals_only=True)
        # Drop the stationary eigenvalue (the largest, equal to 1)
        lam = float(np.abs(mu[:-1]).max())
        source = 'dense'
    else:
        lam = _power_iteration(graph, tol=tol, max_sweeps=max_sweeps)
        source = 'iterative'
    log.info(f'lambda({graph.name}) = {lam:.12f} [{source}]')
    return Spectrum(lambda_=lam, source=source)


def beta_opt(lambda_):
    '''Optimal over-relaxation parameter 2/(1 + sqrt(1 - lambda^2)).'''
    if lambda_ < 0 or lambda_ >= 1:
        raise SpectralError(f'lambda must lie in [0, 1), got {lambda_}')
    return 2/(1 + np.sqrt(1 - lambda_**2))


def _sort_order(values, keys):
    '''Sort by |mu| descending, then mu descending, then by `keys`.'''
    return np.lexsort((keys, -values, -np.abs(values)))


##-------------------------------------------------------------------------
## EigenBasis
##-------------------------------------------------------------------------
class EigenBasis():
    '''Eigenvectors of the diffusion matrix with eigenvalues sorted by magnitude.

    Column 0 is always the stationary direction (eigenvalue 1).
    '''
    def __init__(self, values, n):
        self.values = np.asarray(values)
        self.n = n


    def coefficients(self, x):
        raise NotImplementedError


    def reconstruct(self, a):
        raise NotImplementedError


    @property
    def vectors(self):
        raise NotImplementedError


    def __len__(self):
        return len(self.values)


    def __repr__(self):
        return f'{self.__class__.__name__} (n={self.n})'


class DenseEigenBasis(EigenBasis):
    '''Eigenbasis from a dense symmetric eigensolve.

    For heterogeneous graphs the solve runs on S^-1/2 M S^1/2 with
    orthonormal eigenvectors U; the eigenvectors of M are then S^1/2 U and
    the coefficients of x are U^T S^-1/2 x.
    '''
    def __init__(self, graph, cap=4096):
        if graph.n > cap:
            raise SpectralError(f'{graph.name} has {graph.n} nodes, over the '
                                f'dense cap of {cap}')
        A = _symmetrized(graph, dense_diffusion_matrix(graph, cap=cap))
        mu, U = linalg.eigh(A)
        order = _sort_order(mu, np.arange(len(mu)))
        mu = mu[order]
        U = U[:, order]
        # Fix signs so each vector's largest entry is positive
        peak = np.argmax(np.abs(U), axis=0)
        signs = np.sign(U[peak, np.arange(U.shape[1])])
        signs[signs == 0] = 1
        self.U = U * signs[np.newaxis, :]
        self.root_speeds = np.sqrt(graph.speeds)
        super().__init__(mu, graph.n)


    def coefficients(self, x):
        return self.U.T @ (np.asarray(x, dtype=float) / self.root_speeds)


    def reconstruct(self, a):
        return self.root_speeds * (self.U @ np.asarray(a, dtype=float))


    @property
    def vectors(self):
        return self.root_speeds[:, np.newaxis] * self.U


class TorusEigenBasis(EigenBasis):
    '''Real Fourier basis of a homogeneous width x height torus.

    Every pair of conjugate frequencies contributes a cosine and a sine
    column; self-conjugate frequencies only a cosine.  Coefficients and
    reconstruction go through the 2D FFT, so this works at any size.
    '''
    def __init__(self, width, height):
        self.width, self.height = width, height
        n = width*height
        mu_grid = torus_eigenvalues(width, height)
        bb, aa = np.meshgrid(np.arange(height), np.arange(width), indexing='ij')
        key = (bb*width + aa).ravel()
        ckey = (((-bb) % height)*width + (-aa) % width).ravel()
        selfconj = key == ckey
        canon = key < ckey

        cos_keys = key[selfconj | canon]
        sin_keys = key[canon]
        keys = np.concatenate([cos_keys, sin_keys])
        kinds = np.concatenate([np.zeros(len(cos_keys), dtype=int),
                                np.ones(len(sin_keys), dtype=int)])
        values = mu_grid.ravel()[keys]
        order = _sort_order(values, 2*keys + kinds)
        self.keys = keys[order]
        self.kinds = kinds[order]
        self.selfconj = (selfconj.reshape(-1))[self.keys]
        super().__init__(values[order], n)


    def _scale(self):
        n = self.n
        return np.where(self.selfconj & (self.kinds == 0),
                        1/np.sqrt(n), np.sqrt(2/n))


    def coefficients(self, x):
        F = np.fft.fft2(np.asarray(x, dtype=float).reshape(self.height,
                                                           self.width)).ravel()
        F = F[self.keys]
        return self._scale() * np.where(self.kinds == 0, F.real, -F.imag)


    def reconstruct(self, a):
        a = np.asarray(a, dtype=float) * self._scale()
        C = np.zeros(self.n, dtype=complex)
        np.add.at(C, self.keys, np.where(self.kinds == 0, a, -1j*a))
        C = C.reshape(self.height, self.width)
        return (self.n * np.fft.ifft2(C)).real.ravel()


    @property
    def vectors(self):
        '''Dense n x n matrix of basis columns (small tori only).'''
        if self.n > 4096:
            raise SpectralError(f'Refusing to materialize {self.n}^2 entries')
        return np.column_stack([self.reconstruct(np.eye(1, self.n, j).ravel())
                                for j in range(self.n)])


def eigenbasis(graph, cap=4096):
    if graph.family == 'torus2d' and graph.heterogeneous is False:
        return TorusEigenBasis(graph.params['width'], graph.params['height'])
    if graph.n > cap:
        raise SpectralError(f'No analytic eigenbasis for {graph.name} and '
                            f'n={graph.n} exceeds the cap of {cap}')
    return DenseEigenBasis(graph, cap=cap)


def load_coefficients(basis, x):
    x = np.asarray(x)
    if len(x) != basis.n:
        raise SpectralError(f'Load vector has {len(x)} entries, basis has '
                            f'{basis.n}')
    return basis.coefficients(x)


def leading_coefficient(a):
    '''1-based index of the largest |a_i| over i >= 2, smallest index on ties.'''
    a = np.abs(np.asarray(a, dtype=float))
    if len(a) == 0:
        raise SpectralError('Empty coefficient vector')
    if len(a) == 1:
        return 1
    return int(np.argmax(a[1:])) + 2


##-------------------------------------------------------------------------
## Coefficient trace
##-------------------------------------------------------------------------
def coefficient_trace(basis, loads):
    '''Build the coefficient trace table from (round, x) pairs.'''
    rows = []
    for round, x in loads:
        a = load_coefficients(basis, x)
        rest = np.abs(a[1:]) if len(a) > 1 else np.zeros(1)
        rows.append((int(round), leading_coefficient(a), float(rest.max()),
                     float(a[3]) if len(a) > 3 else np.nan))
    names = ('round', 'leading_index', 'max_abs_coefficient', 'a4')
    if len(rows) == 0:
        return Table(names=names, dtype=(int, int, float, float))
    return Table(rows=rows, names=names)


def write_coefficient_trace(table, file):
    p = Path(file).expanduser().absolute()
    if p.exists(): p.unlink()
    table.write(p, format='ascii.csv')
