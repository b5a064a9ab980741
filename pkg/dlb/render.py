#!python3

## Import General Tools
from pathlib import Path

import numpy as np


class RenderError(Exception): pass


modes = ['adaptive', 'threshold']


##-------------------------------------------------------------------------
## Frame
##-------------------------------------------------------------------------
class Frame():
    '''A grayscale raster, row-major, one byte per pixel.'''
    def __init__(self, width, height, pixels):
        self.width = int(width)
        self.height = int(height)
        self.pixels = np.asarray(pixels, dtype=np.uint8).reshape(-1)
        self.validate()


    def validate(self):
        if self.width < 1 or self.height < 1:
            raise RenderError(f'Empty frame ({self.width}x{self.height})')
        if len(self.pixels) != self.width*self.height:
            raise RenderError(f'{len(self.pixels)} pixels do not fill a '
                              f'{self.width}x{self.height} frame')


    def to_array(self):
        return self.pixels.reshape(self.height, self.width)


    def __eq__(self, other):
        return (self.width, self.height) == (other.width, other.height)\
               and np.array_equal(self.pixels, other.pixels)


    def __repr__(self):
        return f'Frame ({self.width}x{self.height})'


def _round_half_up(v):
    return np.floor(v + 0.5).astype(np.uint8)


def _deviation(x, width, height):
    x = np.asarray(x, dtype=float)
    if len(x) != width*height:
        raise RenderError(f'{len(x)} loads do not fit a {width}x{height} torus')
    return np.abs(x - x.mean())


def render_adaptive(x, width, height):
    '''Light pixels are close to the average, dark ones far from it.

    The scale is the largest deviation in this frame, so the most deviating
    node is black.  A balanced load renders all white.
    '''
    dev = _deviation(x, width, height)
    scale = dev.max()
    if scale == 0:
        return Frame(width, height, np.full(len(dev), 255))
    return Frame(width, height, 255 - _round_half_up(255*dev/scale))


def render_threshold(x, width, height, cutoff=10):
    '''Black at `cutoff` tokens from the average or more, linear ramp below.'''
    if cutoff <= 0:
        raise RenderError(f'cutoff must be positive, got {cutoff}')
    dev = np.minimum(_deviation(x, width, height), cutoff)
    return Frame(width, height, _round_half_up(255*(1 - dev/cutoff)))


def render(x, width, height, mode='adaptive', cutoff=10):
    if mode == 'adaptive':
        return render_adaptive(x, width, height)
    if mode == 'threshold':
        return render_threshold(x, width, height, cutoff=cutoff)
    raise RenderError(f'Unknown mode "{mode}". Use one of {modes}')


##-------------------------------------------------------------------------
## PGM files
##-------------------------------------------------------------------------
def frame_filename(round):
    return f'frame_{round:08d}.pgm'


def write_pgm(frame, file):
    '''Write a binary (P5) PGM file.'''
    frame.validate()
    p = Path(file).expanduser().absolute()
    if p.exists(): p.unlink()
    with open(p, 'wb') as FO:
        FO.write(f'P5\n{frame.width} {frame.height}\n255\n'.encode('ascii'))
        FO.write(frame.pixels.tobytes())


def read_pgm(file):
    p = Path(file).expanduser().absolute()
    with open(p, 'rb') as FI:
        tag = FI.readline().decode('ascii').strip()
        if tag != 'P5':
            raise RenderError(f'{p.name} is not a binary PGM file')
        width, height = [int(v) for v in FI.readline().split()]
        maxval = int(FI.readline())
        if maxval != 255:
            raise RenderError(f'Only 8-bit PGM files are supported')
        buf = FI.read(width*height)
    return Frame(width, height, np.frombuffer(buf, dtype=np.uint8))
