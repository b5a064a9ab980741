#!python3

## Import General Tools
from pathlib import Path

import yaml
from astropy.io import fits

from .scheme_config import SchemeConfig, SchemeConfigError
from .graph import GraphError
from .render import modes as frame_modes


class RunConfigError(Exception): pass


run_modes = ['discrete', 'continuous']


##-------------------------------------------------------------------------
## RunConfig
##-------------------------------------------------------------------------
class RunConfig():
    '''Everything needed to reproduce one simulation run.

    Attributes
    ----------
    graph : str
        Compact graph spec, e.g. ``torus2d:100x100`` or ``path:4@speeds.txt``.

    graph_seed : int
        Seed for the random graph families.

    scheme : SchemeConfig
        The diffusion scheme.

    init : str
        Initial load spec: ``corner:F``, ``uniform:V`` or ``file:PATH``.

    mode : str
        ``discrete`` or ``continuous``.  Continuous runs ignore the rounding
        of the scheme.

    out : str
        Output directory; every file of the run is written below it.

    frames_every : int
        Render a frame every this many rounds (torus only).  None for none.

    snapshot_every : int or str
        Write a load snapshot every this many rounds.  ``auto`` means every
        round for graphs of at most 10^4 nodes and no snapshots above that.
    '''
    def __init__(self, graph='torus2d:100x100', graph_seed=0, scheme=None,
                 init='corner:1000', mode='discrete', out='.',
                 metrics='metrics.csv', frames_every=None,
                 frame_mode='adaptive', cutoff=10, snapshot_every=None,
                 workers=1, name=None):
        self.graph = graph
        self.graph_seed = graph_seed
        self.scheme = scheme if scheme is not None else SchemeConfig()
        self.init = init
        self.mode = mode
        self.out = out
        self.metrics = metrics
        self.frames_every = frames_every
        self.frame_mode = frame_mode
        self.cutoff = cutoff
        self.snapshot_every = snapshot_every
        self.workers = workers
        if self.mode == 'continuous':
            self.scheme = self.scheme.continuous()
        self.name = name if name is not None else f'{self.graph} {self.scheme}'


    def validate(self):
        if self.mode not in run_modes:
            raise RunConfigError(f'Mode "{self.mode}" not in {run_modes}')
        try:
            self.scheme.validate()
        except SchemeConfigError as e:
            raise RunConfigError(str(e))
        if self.mode == 'discrete' and self.scheme.rounding == 'none':
            raise RunConfigError('A discrete run needs floor or randomized '
                                 'rounding')
        if self.frame_mode not in frame_modes:
            raise RunConfigError(f'Frame mode "{self.frame_mode}" not in '
                                 f'{frame_modes}')
        if self.cutoff <= 0:
            raise RunConfigError('cutoff must be positive')
        for key in ['frames_every', 'snapshot_every']:
            value = getattr(self, key)
            if value is None or value == 'auto':
                continue
            if int(value) != value or value < 1:
                raise RunConfigError(f'{key} must be a positive integer')
        if self.workers < 1:
            raise RunConfigError('workers must be >= 1')
        if self.frames_every is not None and\
           not self.graph.strip().lower().startswith('torus2d'):
            raise RunConfigError('Frames can only be rendered for torus2d graphs')


    def build_graph(self):
        from .graphs import from_spec
        try:
            return from_spec(self.graph, seed=self.graph_seed)
        except GraphError as e:
            raise RunConfigError(str(e))


    def snapshot_stride(self, graph):
        if self.snapshot_every == 'auto':
            return 1 if graph.n <= 10**4 else None
        return self.snapshot_every


    @property
    def out_path(self):
        return Path(self.out).expanduser().absolute()


    def to_header(self):
        h = fits.Header()
        h['RCNAME'] = (self.name, 'Run Config Name')
        h['RCGRAPH'] = (self.graph, 'Graph spec')
        h['RCGSEED'] = (self.graph_seed, 'Graph seed')
        h['RCINIT'] = (self.init, 'Initial load spec')
        h['RCMODE'] = (self.mode, 'discrete or continuous')
        h.extend(self.scheme.to_header())
        return h


    def to_dict(self):
        return {'name': self.name,
                'graph': self.graph,
                'graph_seed': self.graph_seed,
                'scheme': self.scheme.to_dict(),
                'init': self.init,
                'mode': self.mode,
                'out': self.out,
                'metrics': self.metrics,
                'frames_every': self.frames_every,
                'frame_mode': self.frame_mode,
                'cutoff': self.cutoff,
                'snapshot_every': self.snapshot_every,
                'workers': self.workers}


    def to_yaml(self):
        return yaml.dump(self.to_dict())


    def to_DB(self):
        return {'RunConfigs': [self.to_dict()]}


    def write(self, file):
        self.validate()
        p = Path(file).expanduser().absolute()
        if p.exists(): p.unlink()
        with open(p, 'w') as FO:
            FO.write(yaml.dump([self.to_DB()]))


    def __str__(self):
        return f'{self.name}'


    def __repr__(self):
        return f'{self.name}'
