#!python3

## Import General Tools
from pathlib import Path

import yaml

from .graph import Graph, GraphError, diffusion_row, diffusion_matrix
from .graphs import from_spec
from .scheme_config import SchemeConfig, SchemeConfigError
from .run_config import RunConfig, RunConfigError
from .diffusion import LoadState, step, run, initial_load
from .spectral import lambda2, beta_opt, eigenbasis


scheme_keys = ['scheme', 'beta', 'rounding', 'switch_at', 'switch_local_below',
               'rounds', 'seed']
run_keys = ['graph', 'graph_seed', 'init', 'mode', 'out', 'metrics',
            'frames_every', 'frame_mode', 'cutoff', 'snapshot_every', 'workers']


def _normalize(entry):
    return {str(k).replace('-', '_'): v for k,v in entry.items()}


def run_config_from_dict(entry):
    '''Build a RunConfig from a flat or nested mapping.

    The scheme may be given as a nested mapping under "scheme" or through
    the flat keys (scheme: sos, beta: auto, ...).
    '''
    entry = _normalize(entry)
    unknown = set(entry.keys()) - set(scheme_keys) - set(run_keys) - {'name'}
    if len(unknown) > 0:
        raise RunConfigError(f'Unknown configuration keys: {sorted(unknown)}')
    if isinstance(entry.get('scheme', None), dict):
        sc = SchemeConfig(**_normalize(entry.pop('scheme')))
    else:
        sc = SchemeConfig(**{k: entry.pop(k) for k in scheme_keys if k in entry})
    return RunConfig(scheme=sc, name=entry.get('name', None),
                     **{k: entry[k] for k in run_keys if k in entry})


##-------------------------------------------------------------------------
## parse_yaml
##-------------------------------------------------------------------------
def parse_yaml(contents):
    '''Parse the YAML documents written by RunConfig.write and
    SchemeConfig.write.

    Returns (run configs, scheme configs).
    '''
    rcs = [] # List of output RunConfigs
    scs = [] # List of output SchemeConfigs
    for entry in contents:
        if 'RunConfigs' in entry.keys():
            for rc_dict in entry['RunConfigs']:
                rcs.append(run_config_from_dict(rc_dict))
        elif 'scheme' in entry.keys() and 'graph' not in entry.keys():
            scs.append(SchemeConfig(**_normalize(entry)))
    return rcs, scs


def read_config(file):
    '''Read a YAML configuration file into a mapping of RunConfig settings.

    The file is either a flat mapping of option names or the list written
    by RunConfig.write, in which case the first run configuration is used.
    '''
    p = Path(file).expanduser().absolute()
    if p.exists() is False:
        raise RunConfigError(f'No configuration file {p}')
    with open(p, 'r') as FI:
        contents = yaml.safe_load(FI)
    if contents is None:
        return {}
    if isinstance(contents, dict):
        return _normalize(contents)
    if isinstance(contents, list):
        for entry in contents:
            if isinstance(entry, dict) and 'RunConfigs' in entry:
                return _normalize(entry['RunConfigs'][0])
    raise RunConfigError(f'{p.name} holds no run configuration')
