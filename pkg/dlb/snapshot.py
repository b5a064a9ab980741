#!python3

## Import General Tools
from pathlib import Path

import numpy as np
from astropy.io import fits


class SnapshotError(Exception): pass


def snapshot_filename(round):
    return f'snapshot_{round:08d}.fits'


def write_snapshot(x, file, round, scheme=None, beta=None, graph=None):
    '''Write a load vector as a FITS image with N and ROUND header cards.'''
    x = np.asarray(x)
    hdu = fits.PrimaryHDU(data=x)
    hdu.header['N'] = (len(x), 'Number of nodes')
    hdu.header['ROUND'] = (int(round), 'Completed rounds')
    if scheme is not None:
        hdu.header['SCHEME'] = (str(scheme), 'Scheme of the round ending here')
    if beta is not None:
        hdu.header['BETA'] = (float(beta), 'Over-relaxation parameter')
    if graph is not None:
        hdu.header.extend(graph.to_header())
    p = Path(file).expanduser().absolute()
    if p.exists(): p.unlink()
    hdu.writeto(p)


def read_snapshot(file):
    '''Return (round, x, header) from a snapshot file.'''
    p = Path(file).expanduser().absolute()
    if p.exists() is False:
        raise FileNotFoundError(f'{p}')
    with fits.open(p) as hdul:
        header = hdul[0].header.copy()
        x = np.array(hdul[0].data)
    for key in ['N', 'ROUND']:
        if key not in header:
            raise SnapshotError(f'{p.name} has no {key} card')
    if len(x) != header['N']:
        raise SnapshotError(f'{p.name}: N={header["N"]} but {len(x)} values')
    return int(header['ROUND']), x, header


def list_snapshots(directory):
    '''Snapshot files in a directory, ordered by round.'''
    p = Path(directory).expanduser().absolute()
    if p.is_dir() is False:
        raise SnapshotError(f'{p} is not a directory')
    return sorted(p.glob('snapshot_*.fits'))
