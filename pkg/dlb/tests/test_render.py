import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlb.render import RenderError, Frame, render, render_adaptive,\
                       render_threshold, write_pgm, read_pgm, frame_filename


def test_adaptive_extremes():
    frame = render_adaptive([0, 0, 0, 8], 2, 2)
    # mean 2: deviations 2, 2, 2, 6
    assert list(frame.pixels) == [170, 170, 170, 0]


def test_adaptive_balanced_is_white():
    frame = render_adaptive(np.full(9, 7), 3, 3)
    assert np.all(frame.pixels == 255)


def test_threshold_ramp():
    cutoff = 10
    x = np.array([5.0, -5.0, 0.0, 0.0, 20.0, -20.0])
    x = x - x.mean()
    frame = render_threshold(x, 3, 2, cutoff=cutoff)
    assert list(frame.pixels) == [128, 128, 255, 255, 0, 0]


def test_threshold_needs_positive_cutoff():
    with pytest.raises(RenderError):
        render_threshold([0, 1, 2, 3], 2, 2, cutoff=0)


def test_size_mismatch():
    with pytest.raises(RenderError):
        render([1, 2, 3], 2, 2)
    with pytest.raises(RenderError):
        render([1, 2, 3, 4], 2, 2, mode='colour')


def test_frame_layout_is_row_major():
    frame = render_threshold([0, 0, 0, 10, 10, 10], 3, 2, cutoff=5)
    assert frame.to_array().shape == (2, 3)
    assert np.all(frame.to_array()[0] == 0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), dx=st.integers(0, 3), dy=st.integers(0, 3),
       mode=st.sampled_from(['adaptive', 'threshold']))
def test_render_commutes_with_torus_shifts(seed, dx, dy, mode):
    x = np.random.default_rng(seed).integers(0, 30, size=16)
    grid = x.reshape(4, 4)
    shifted = np.roll(grid, (dy, dx), axis=(0, 1))
    a = render(grid.ravel(), 4, 4, mode=mode).to_array()
    b = render(shifted.ravel(), 4, 4, mode=mode).to_array()
    assert np.array_equal(np.roll(a, (dy, dx), axis=(0, 1)), b)


def test_single_pixel_pgm(tmp_path):
    p = tmp_path / frame_filename(0)
    write_pgm(render_adaptive([3], 1, 1), p)
    assert p.read_bytes() == b'P5\n1 1\n255\n\xff'


def test_pgm_round_trip(tmp_path):
    frame = Frame(3, 2, [0, 10, 20, 30, 40, 255])
    p = tmp_path / 'frame.pgm'
    write_pgm(frame, p)
    assert p.stat().st_size == len(b'P5\n3 2\n255\n') + 6
    assert read_pgm(p) == frame


def test_frame_filename():
    assert frame_filename(42) == 'frame_00000042.pgm'


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), c=st.integers(-1000, 1000))
def test_adaptive_ignores_constant_offset(seed, c):
    x = np.random.default_rng(seed).integers(0, 30, size=16)
    assert render_adaptive(x + c, 4, 4) == render_adaptive(x, 4, 4)
