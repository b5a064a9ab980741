#!python3

## Import General Tools
from collections import UserList
from pathlib import Path

import numpy as np
from astropy.table import Table


class RecordError(Exception): pass


columns = ['round', 'total_load', 'max_above_avg', 'max_local_diff',
           'potential_over_n', 'min_load', 'min_transient']


##-------------------------------------------------------------------------
## RoundRecord
##-------------------------------------------------------------------------
class RoundRecord():
    '''Quality metrics of the load after one round.

    Attributes
    ----------
    round : int
        Number of completed rounds; the metrics describe x(round).

    min_transient : float
        Smallest load seen between sending and receiving during the round
        that produced x(round).
    '''
    def __init__(self, round=0, total_load=0, max_above_avg=0,
                 max_local_diff=0, potential_over_n=0, min_load=0,
                 min_transient=0, scheme=None):
        self.round = int(round)
        self.total_load = total_load
        self.max_above_avg = max_above_avg
        self.max_local_diff = max_local_diff
        self.potential_over_n = potential_over_n
        self.min_load = min_load
        self.min_transient = min_transient
        self.scheme = scheme


    def to_dict(self):
        return {c: getattr(self, c) for c in columns}


    def to_tuple(self):
        return tuple(getattr(self, c) for c in columns)


    def __str__(self):
        return (f'{self.round:8d}|{self.total_load:14.6g}|'
                f'{self.max_above_avg:12.4f}|{self.max_local_diff:12.4f}|'
                f'{self.potential_over_n:14.6g}|{self.min_load:12.4f}|'
                f'{self.min_transient:12.4f}')


    def __repr__(self):
        return str(self)


##-------------------------------------------------------------------------
## Trajectory
##-------------------------------------------------------------------------
class Trajectory(UserList):
    '''An ordered list of RoundRecords, one per executed round.

    Runs may attach the load vectors they kept (``states``) and the rounding
    errors of every round (``errors``).
    '''
    def __init__(self, initlist=None, integer_loads=False):
        super().__init__(initlist)
        self.integer_loads = integer_loads
        self.states = []
        self.errors = []


    def validate(self):
        for i,r in enumerate(self.data):
            if not isinstance(r, RoundRecord):
                raise RecordError(f'A Trajectory must be made up of '
                                  f'RoundRecords. Element {i} is {type(r)}.')
        rounds = self.column('round')
        if len(rounds) > 1 and np.any(np.diff(rounds) <= 0):
            raise RecordError('Rounds must be strictly increasing')
        if self.integer_loads is True and len(self.data) > 1:
            totals = self.column('total_load')
            if np.any(totals != totals[0]):
                raise RecordError('Total load changed during a discrete run')


    def column(self, name):
        if name not in columns:
            raise RecordError(f'Unknown column "{name}"')
        return np.array([getattr(r, name) for r in self.data])


    def total_load_drift(self):
        '''Largest |total(t) - total(first)| over the run.'''
        if len(self.data) == 0:
            return 0.0
        totals = self.column('total_load').astype(float)
        return float(np.abs(totals - totals[0]).max())


    def min_transient_ever(self):
        if len(self.data) == 0:
            return None
        return float(self.column('min_transient').min())


    def to_table(self):
        dtype = [int, int if self.integer_loads else float, float, float,
                 float, int if self.integer_loads else float,
                 int if self.integer_loads else float]
        if len(self.data) == 0:
            return Table(names=columns, dtype=dtype)
        return Table(rows=[r.to_tuple() for r in self.data], names=columns,
                     dtype=dtype)


    def write(self, file):
        '''Write the metrics CSV, one row per round.'''
        p = Path(file).expanduser().absolute()
        if p.exists(): p.unlink()
        self.to_table().write(p, format='ascii.csv')


    def __str__(self):
        output = [(f'{"round":8s}|{"total_load":14s}|{"max-avg":12s}|'
                   f'{"local diff":12s}|{"potential/n":14s}|{"min load":12s}|'
                   f'{"min transient":12s}'),
                  (f'{"-"*8:8s}|{"-"*14:14s}|{"-"*12:12s}|{"-"*12:12s}|'
                   f'{"-"*14:14s}|{"-"*12:12s}|{"-"*12:12s}')]
        for item in self.data:
            output.append(str(item))
        return "\n".join(output)


    def __repr__(self):
        return f'Trajectory ({len(self.data)} rounds)'
