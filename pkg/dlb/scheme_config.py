#!python3

## Import General Tools
from pathlib import Path
from warnings import warn

import yaml
from astropy.io import fits


class SchemeConfigError(Exception): pass


class SchemeConfigWarning(UserWarning): pass


schemes = ['FOS', 'SOS']
roundings = ['none', 'floor', 'randomized']


##-------------------------------------------------------------------------
## SchemeConfig
##-------------------------------------------------------------------------
class SchemeConfig():
    '''An object to hold the description of a diffusion scheme.

    Attributes
    ----------
    scheme : str
        FOS or SOS.

    beta : float or str
        The over-relaxation parameter in (0, 2), or "auto" to use the
        optimal value for the graph.  Ignored by FOS.

    rounding : str
        One of "none" (continuous loads), "floor" or "randomized".

    switch_at : int
        Optional round at which an SOS run switches to FOS.

    switch_local_below : float
        Optional threshold: the first round whose maximum local load
        difference is at or below this value switches SOS to FOS.

    rounds : int
        The number of rounds to execute.

    seed : int
        Master seed for the rounding substreams.
    '''
    def __init__(self, scheme='SOS', beta='auto', rounding='randomized',
                 switch_at=None, switch_local_below=None, rounds=1000, seed=0,
                 name=None):
        self.scheme = scheme.upper() if isinstance(scheme, str) else scheme
        self.beta = beta
        self.rounding = 'none' if rounding in ['continuous', None] else rounding
        self.switch_at = switch_at
        self.switch_local_below = switch_local_below
        self.rounds = rounds
        self.seed = seed
        if name is None:
            self.set_name()
        else:
            self.name = name


    def set_name(self):
        beta = self.beta if isinstance(self.beta, str) else f'{self.beta:.4f}'
        name = f'{self.scheme}'
        if self.scheme == 'SOS':
            name += f' beta={beta}'
        name += f' ({self.rounding}) x{self.rounds}'
        if self.switch_at is not None:
            name += f' switch@{self.switch_at}'
        if self.switch_local_below is not None:
            name += f' switch<={self.switch_local_below}'
        self.name = name


    def validate(self):
        if self.scheme not in schemes:
            raise SchemeConfigError(f'Scheme "{self.scheme}" not in {schemes}')
        if self.rounding not in roundings:
            raise SchemeConfigError(f'Rounding "{self.rounding}" not in {roundings}')
        if isinstance(self.beta, str):
            if self.beta != 'auto':
                raise SchemeConfigError(f'beta must be a number or "auto"')
        elif not 0 < self.beta < 2:
            raise SchemeConfigError(f'beta must be in (0, 2), got {self.beta}')
        if int(self.rounds) != self.rounds or self.rounds < 0:
            raise SchemeConfigError(f'rounds must be a non-negative integer')
        if self.switch_at is not None and self.switch_at < 0:
            raise SchemeConfigError(f'switch_at must be >= 0')
        if self.switch_local_below is not None and self.switch_local_below < 0:
            raise SchemeConfigError(f'switch_local_below must be >= 0')
        if self.scheme == 'FOS':
            if self.switch_at is not None or self.switch_local_below is not None:
                warn('Switching has no effect on a FOS run',
                     category=SchemeConfigWarning)


    @property
    def discrete(self):
        return self.rounding != 'none'


    def resolved_beta(self, graph=None):
        '''Numerical beta; "auto" computes beta_opt from the graph spectrum.'''
        if self.scheme == 'FOS':
            return 1.0
        if isinstance(self.beta, str):
            if graph is None:
                raise SchemeConfigError('beta=auto needs a graph')
            from .spectral import lambda2
            return lambda2(graph).beta
        return float(self.beta)


    def resolve(self, graph):
        '''Return a copy with beta="auto" replaced by its numerical value.'''
        output = SchemeConfig(**self.to_dict())
        if self.scheme == 'SOS':
            output.beta = self.resolved_beta(graph)
        output.set_name()
        return output


    def continuous(self):
        '''Return a copy of this configuration with rounding switched off.'''
        output = SchemeConfig(**self.to_dict())
        output.rounding = 'none'
        output.set_name()
        return output


    def to_header(self):
        h = fits.Header()
        h['SCNAME'] = (self.name, 'Scheme Config Name')
        h['SCHEME'] = (self.scheme, 'Diffusion scheme')
        h['BETA'] = (str(self.beta) if isinstance(self.beta, str) else self.beta,
                     'Over-relaxation parameter')
        h['ROUNDING'] = (self.rounding, 'Rounding mode')
        h['SWITCHAT'] = (self.switch_at, 'Round at which SOS switches to FOS')
        h['SWITCHLD'] = (self.switch_local_below,
                         'Local difference at which SOS switches to FOS')
        h['NROUNDS'] = (self.rounds, 'Round budget')
        h['SEED'] = (self.seed, 'Master seed')
        return h


    def to_dict(self):
        return {'name': self.name,
                'scheme': self.scheme,
                'beta': self.beta,
                'rounding': self.rounding,
                'switch_at': self.switch_at,
                'switch_local_below': self.switch_local_below,
                'rounds': self.rounds,
                'seed': self.seed}


    def to_yaml(self):
        return yaml.dump(self.to_dict())


    def write(self, file):
        self.validate()
        p = Path(file).expanduser().absolute()
        if p.exists(): p.unlink()
        with open(p, 'w') as FO:
            FO.write(yaml.dump([self.to_dict()]))


    def __str__(self):
        return self.name


    def __repr__(self):
        return self.name


##-------------------------------------------------------------------------
## Presets
##-------------------------------------------------------------------------
def FOS(rounding='randomized', rounds=1000, seed=0):
    return SchemeConfig(scheme='FOS', beta=1.0, rounding=rounding,
                        rounds=rounds, seed=seed)


def SOS(beta='auto', rounding='randomized', rounds=1000, seed=0):
    return SchemeConfig(scheme='SOS', beta=beta, rounding=rounding,
                        rounds=rounds, seed=seed)


def SOSThenFOS(switch_at, beta='auto', rounding='randomized', rounds=1000,
               seed=0):
    '''SOS for `switch_at` rounds, then FOS for the rest of the budget.'''
    return SchemeConfig(scheme='SOS', beta=beta, rounding=rounding,
                        switch_at=switch_at, rounds=rounds, seed=seed)
