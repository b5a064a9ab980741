import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlb.metrics import MetricsError, balanced_load, max_local_difference,\
                        max_above_average, linf_deviation, potential,\
                        remaining_imbalance
from dlb.record import RecordError, RoundRecord, Trajectory, columns
from dlb.scheme_config import SchemeConfig
from dlb.diffusion import run, initial_load
from dlb.graphs import torus2d


def test_balanced_load():
    assert list(balanced_load([3, 0])) == [1.5, 1.5]
    assert np.allclose(balanced_load([10, 0], speeds=[1, 4]), [2, 8])


def test_local_difference(cycle4):
    assert max_local_difference([0, 3, 1, 1], cycle4) == 3.0


def test_deviation_measures():
    x = [4, 0, 0, 0]
    assert max_above_average(x) == 3.0
    assert linf_deviation(x) == 3.0
    phi, per_node = potential(x)
    assert phi == pytest.approx(12.0)
    assert per_node == pytest.approx(3.0)


def test_heterogeneous_deviation():
    assert max_above_average([1, 4], speeds=[1, 4]) == pytest.approx(0.0)


def test_constant_series_converges_at_start():
    verdict = remaining_imbalance(np.full(150, 0.5))
    assert verdict.converged
    assert verdict.converged_at == 0
    assert verdict.remaining_imbalance == 0.5


def test_series_settles():
    series = np.concatenate([np.linspace(1000, 10, 200), np.full(300, 10.0)])
    verdict = remaining_imbalance(series)
    assert verdict.converged
    assert verdict.remaining_imbalance == pytest.approx(10.0)
    assert 100 < verdict.converged_at <= 200


def test_series_still_improving():
    verdict = remaining_imbalance(np.linspace(1000, 0, 300))
    assert verdict.converged is False
    assert verdict.remaining_imbalance is None


def test_short_series():
    with pytest.raises(MetricsError):
        remaining_imbalance(np.ones(10))


def _records(totals):
    return [RoundRecord(round=i+1, total_load=t, max_above_avg=1.0,
                        max_local_diff=2.0, potential_over_n=0.5, min_load=0,
                        min_transient=-1) for i, t in enumerate(totals)]


def test_trajectory_validate():
    Trajectory(_records([10, 10, 10]), integer_loads=True).validate()
    with pytest.raises(RecordError):
        Trajectory(_records([10, 11]), integer_loads=True).validate()
    with pytest.raises(RecordError):
        Trajectory(_records([10]) + ['not a record']).validate()


def test_trajectory_columns():
    traj = Trajectory(_records([10.0, 10.5]))
    assert list(traj.column('round')) == [1, 2]
    assert traj.total_load_drift() == pytest.approx(0.5)
    assert traj.min_transient_ever() == -1
    with pytest.raises(RecordError):
        traj.column('nope')


def test_trajectory_csv(tmp_path):
    p = tmp_path / 'metrics.csv'
    Trajectory(_records([10, 10]), integer_loads=True).write(p)
    lines = p.read_text().splitlines()
    assert lines[0] == ','.join(columns)
    assert len(lines) == 3


def test_empty_trajectory():
    traj = Trajectory()
    assert len(traj.to_table()) == 0
    assert traj.min_transient_ever() is None


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32), scheme=st.sampled_from(['FOS', 'SOS']))
def test_per_round_metric_sanity(seed, scheme):
    g = torus2d(5, 5)
    config = SchemeConfig(scheme=scheme, rounds=40, seed=seed)
    traj = run(initial_load('corner:20', g), config, g, keep_states=True)
    for x in traj.states:
        linf = linf_deviation(x)
        assert max_local_difference(x, g) <= 2*linf + 1e-9
        assert potential(x)[1] <= linf**2 + 1e-9
