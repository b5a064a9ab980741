#!python3

## Import General Tools
import logging

from ..graph import GraphError, read_speeds
from .torus import torus2d
from .hypercube import hypercube
from .random_regular import random_regular
from .geometric import random_geometric, default_radius
from .basic import cycle, path, complete2


log = logging.getLogger(__name__)


families = ['torus2d', 'hypercube', 'random_regular', 'random_geometric',
            'cycle', 'path', 'k2']


def _ints(text, count, spec):
    try:
        values = [int(v) for v in text.split(',')]
    except ValueError:
        raise GraphError(f'Could not parse integers in "{spec}"')
    if len(values) != count:
        raise GraphError(f'Expected {count} value(s) in "{spec}"')
    return values


def from_spec(spec, seed=0):
    '''Build a graph from a compact spec string.

    Examples: ``torus2d:100x100``, ``hypercube:20``,
    ``random_regular:1000000,19``, ``random_geometric:10000``,
    ``random_geometric:1000,2.5``, ``cycle:8``, ``path:4``, ``k2``.
    A trailing ``@file`` loads heterogeneous speeds from that file.
    '''
    spec = str(spec).strip()
    speedfile = None
    if '@' in spec:
        spec, speedfile = spec.split('@', 1)
    family, _, args = spec.partition(':')
    family = family.strip().lower()

    if family == 'torus2d':
        w, h = _ints(args.lower().replace('x', ','), 2, spec)
        g = torus2d(w, h)
    elif family == 'hypercube':
        g = hypercube(*_ints(args, 1, spec))
    elif family == 'random_regular':
        n, d = _ints(args, 2, spec)
        g = random_regular(n, d, seed=seed)
    elif family == 'random_geometric':
        parts = args.split(',')
        if len(parts) not in [1, 2]:
            raise GraphError(f'Expected N[,R] in "{spec}"')
        try:
            n = int(parts[0])
            radius = float(parts[1]) if len(parts) == 2 else None
        except ValueError:
            raise GraphError(f'Could not parse "{spec}"')
        g = random_geometric(n, radius=radius, seed=seed)
    elif family == 'cycle':
        g = cycle(*_ints(args, 1, spec))
    elif family == 'path':
        g = path(*_ints(args, 1, spec))
    elif family == 'k2':
        g = complete2()
    else:
        raise GraphError(f'Unknown graph family "{family}". '
                         f'Use one of {families}')

    if speedfile is not None:
        g = g.with_speeds(read_speeds(speedfile, n=g.n))
    log.debug(f'Built {repr(g)}')
    return g


##-------------------------------------------------------------------------
## Benchmark instances with their published beta values
##-------------------------------------------------------------------------
benchmark_betas = {'torus2d:1000x1000': 1.9920836447,
                   'torus2d:100x100': 1.9235874877,
                   'hypercube:20': 1.4026054847,
                   'random_regular:1000000,19': 1.0651965147,
                   'random_geometric:10000': 1.9554636334,
                   }


def benchmark_instances():
    '''Return {spec: reported beta} for the five benchmark instances.

    The random regular and random geometric betas depend on the sampled
    instance and only match approximately.
    '''
    return dict(benchmark_betas)
