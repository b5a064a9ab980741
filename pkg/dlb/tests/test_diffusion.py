import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlb.scheme_config import SchemeConfig, FOS, SOS, SOSThenFOS
from dlb.diffusion import DiffusionError, DiffusionWarning, LoadState,\
                          advance, record, step, run, initial_load
from dlb.metrics import remaining_imbalance, potential, min_transient
from dlb.flows import sos_flows, apply_flows
from dlb.graph import dense_diffusion_matrix
from dlb.graphs import torus2d, cycle, hypercube


def test_k2_fos_floor_settles(k2):
    config = SchemeConfig(scheme='FOS', rounding='floor', rounds=200)
    traj = run([3, 0], config, k2)
    assert list(traj.final_state.x) == [2, 1]
    verdict = remaining_imbalance(traj)
    assert verdict.converged
    assert verdict.remaining_imbalance == 0.5


def test_k2_fos_randomized_settles(k2):
    config = SchemeConfig(scheme='FOS', rounding='randomized', rounds=200,
                          seed=3)
    traj = run([3, 0], config, k2)
    assert np.all(traj.column('max_above_avg')[1:] == 0.5)


def test_first_sos_round_is_fos(torus3):
    x0 = initial_load('corner:5', torus3)
    sos = SchemeConfig(scheme='SOS', beta=1.5, rounding='floor', rounds=1)
    fos = SchemeConfig(scheme='FOS', rounding='floor', rounds=1)
    a = run(x0, sos, torus3, beta=1.5)
    b = run(x0, fos, torus3)
    assert np.array_equal(a.final_state.x, b.final_state.x)
    assert a[0].scheme == 'SOS'


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), scheme=st.sampled_from(['FOS', 'SOS']),
       rounding=st.sampled_from(['floor', 'randomized']))
def test_discrete_runs_conserve_tokens(seed, scheme, rounding):
    g = torus2d(4, 5)
    x0 = np.random.default_rng(seed).integers(0, 200, size=g.n)
    config = SchemeConfig(scheme=scheme, rounding=rounding, rounds=30,
                          seed=seed)
    traj = run(x0, config, g)
    traj.validate()
    assert np.all(traj.column('total_load') == x0.sum())
    assert traj.final_state.x.dtype == np.int64


def test_continuous_fos_balances(torus3):
    config = SchemeConfig(scheme='FOS', rounding='none', rounds=300)
    traj = run(initial_load('corner:10', torus3, discrete=False), config,
               torus3)
    assert np.allclose(traj.final_state.x, 10.0)
    assert traj.total_load_drift() <= 1e-6*90


def test_continuous_heterogeneous_balances(hetero_path):
    config = SchemeConfig(scheme='SOS', rounding='none', rounds=500)
    traj = run([100.0, 0, 0, 0], config, hetero_path)
    assert np.allclose(traj.final_state.x, [10, 20, 30, 40], atol=1e-6)


def test_switch_at(torus3):
    config = SOSThenFOS(3, rounds=6, rounding='floor')
    traj = run(initial_load('corner:20', torus3), config, torus3)
    assert [r.scheme for r in traj] == ['SOS', 'SOS', 'SOS', 'FOS', 'FOS',
                                        'FOS']
    assert traj.final_state.switched


def test_switch_local_below(torus3):
    config = SchemeConfig(scheme='SOS', rounding='floor', rounds=100,
                          switch_local_below=10)
    traj = run(initial_load('corner:20', torus3), config, torus3)
    schemes = [r.scheme for r in traj]
    first = schemes.index('FOS')
    assert all(s == 'FOS' for s in schemes[first:])
    assert traj[first-1].max_local_diff <= 10


def test_same_seed_same_run():
    g = torus2d(6, 6)
    config = SchemeConfig(scheme='SOS', rounding='randomized', rounds=40,
                          seed=9)
    x0 = initial_load('corner:30', g)
    a = run(x0, config, g, keep_states=True)
    b = run(x0, config, g, workers=4, keep_states=True)
    assert np.array_equal(np.array(a.states), np.array(b.states))


def test_continuous_negative_transient_warns():
    g = torus2d(10, 10)
    config = SchemeConfig(scheme='SOS', rounding='none', rounds=5)
    with pytest.warns(DiffusionWarning):
        traj = run(initial_load('corner:1', g, discrete=False), config, g)
    assert traj.min_transient_ever() < 0


def test_step(torus3):
    config = FOS(rounding='floor')
    state = LoadState(x=initial_load('corner:2', torus3))
    state, rec = step(state, config, torus3)
    assert state.round == 1
    assert rec.round == 1
    assert rec.total_load == 18
    assert list(state.x[:4]) == [6, 3, 3, 3]


def test_randomized_needs_rng(torus3):
    config = SOS(rounding='randomized')
    state = LoadState(x=initial_load('corner:2', torus3))
    with pytest.raises(DiffusionError):
        advance(state, config, torus3, beta=1.2, rng=None)


def test_run_rejects_fractional_discrete_load(k2):
    with pytest.raises(DiffusionError):
        run([1.5, 0], SchemeConfig(scheme='FOS', rounding='floor', rounds=1),
            k2)


def test_initial_loads(torus3, tmp_path):
    assert initial_load('corner:5', torus3)[0] == 45
    assert np.all(initial_load('uniform:2', torus3) == 2)
    p = tmp_path / 'loads.txt'
    p.write_text('\n'.join(str(i) for i in range(9)))
    assert list(initial_load(f'file:{p}', torus3)) == list(range(9))
    with pytest.raises(DiffusionError):
        initial_load('corner:0.5', cycle(3))
    with pytest.raises(DiffusionError):
        initial_load('spike:1', torus3)
    with pytest.raises(FileNotFoundError):
        initial_load(f'file:{tmp_path}/missing.txt', torus3)


def test_callback_sees_every_round(k2):
    seen = []
    config = SchemeConfig(scheme='FOS', rounding='floor', rounds=4)
    run([3, 0], config, k2, callback=lambda state, rec: seen.append(rec.round))
    assert seen == [1, 2, 3, 4]


def _sos_round(x, y, beta, graph):
    flows = sos_flows(x, y, beta, graph)
    x_next, _ = apply_flows(x, flows)
    return np.concatenate([x_next, flows.values])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_sos_round_is_linear(seed, a, b):
    g = torus2d(3, 4)
    rng = np.random.default_rng(seed)
    x, x2 = rng.uniform(-50, 50, (2, g.n))
    y, y2 = rng.uniform(-5, 5, (2, g.m))
    combined = _sos_round(a*x + b*x2, a*y + b*y2, 1.4, g)
    separate = a*_sos_round(x, y, 1.4, g) + b*_sos_round(x2, y2, 1.4, g)
    assert np.allclose(combined, separate, rtol=0, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), beta=st.floats(1.0, 1.95))
def test_continuous_rounds_match_the_diffusion_matrix(seed, beta):
    g = cycle(4)
    M = dense_diffusion_matrix(g)
    x0 = np.random.default_rng(seed).uniform(0, 100, g.n)

    state, rec = step(LoadState(x=x0), FOS(rounding='none'), g)
    assert np.allclose(state.x, M @ x0, rtol=0, atol=1e-10)

    config = SchemeConfig(scheme='SOS', beta=beta, rounding='none', rounds=6)
    xs = run(x0, config, g, keep_states=True).states
    assert np.allclose(xs[1], M @ xs[0], rtol=0, atol=1e-10)
    for t in range(1, 6):
        expected = beta*(M @ xs[t]) + (1 - beta)*xs[t-1]
        assert np.allclose(xs[t+1], expected, rtol=0, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(z=st.lists(st.integers(-3, 3), min_size=8, max_size=8),
       offset=st.integers(0, 100), rounds=st.integers(1, 4),
       scheme=st.sampled_from(['FOS', 'SOS']),
       beta=st.sampled_from([1.0, 1.25, 1.5, 1.75]),
       rounding=st.sampled_from(['floor', 'randomized']))
def test_integral_dynamics_match_continuous(z, offset, rounds, scheme, beta,
                                            rounding):
    # alpha = 1/4 on the 3-cube; load differences divisible by 16^(T+1)
    # keep every scheduled flow integral for T rounds
    g = hypercube(3)
    x0 = offset + 16**(rounds + 1)*np.array(z, dtype=np.int64)
    config = SchemeConfig(scheme=scheme, beta=beta, rounding=rounding,
                          rounds=rounds, seed=1)
    discrete = run(x0, config, g, keep_states=True)
    continuous = run(x0.astype(float), config.continuous(), g,
                     keep_states=True)
    for xd, xc in zip(discrete.states, continuous.states):
        assert np.array_equal(xd.astype(float), xc)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32),
       graph=st.sampled_from([cycle(7), torus2d(4, 5), hypercube(3)]))
def test_continuous_fos_potential_never_grows(seed, graph):
    x0 = np.random.default_rng(seed).uniform(0, 100, graph.n)
    traj = run(x0, FOS(rounding='none', rounds=30), graph)
    phi = np.concatenate([[potential(x0)[1]], traj.column('potential_over_n')])
    assert np.all(np.diff(phi) <= 1e-9*phi[:-1] + 1e-12)


def test_record_reports_min_transient(k2):
    result = advance(LoadState(x=np.array([3, 0])), FOS(rounding='floor'), k2)
    rec = record(result, k2)
    assert list(result.transient) == [2, 0]
    assert rec.min_transient == min_transient(result.transient) == 0.0
    assert isinstance(rec.min_transient, float)
