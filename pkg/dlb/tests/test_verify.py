import numpy as np
import pytest

from dlb import verify
from dlb.theory import BoundReport
from dlb.graphs import cycle, torus2d
from dlb.scheme_config import SchemeConfig
from dlb.diffusion import run, initial_load


def test_canonical_graphs():
    names = [g.name for g in verify.canonical_graphs()]
    assert len(names) == 4
    assert verify.canonical_graphs()[-1].heterogeneous


def test_gamma_suite():
    reports = verify.gamma(cases=30)
    assert verify.passed(reports)


def test_small_deviation_identity_suite():
    reports = verify.lemma_deterministic(seeds=2, rounds=6)
    assert len(reports) == 4*2*2
    assert verify.passed(reports)


def test_small_q_series_suite():
    assert verify.passed(verify.q_series(instances=3, T=10))


def test_coefficient_suite():
    assert verify.passed(verify.coefficients(rounds=5))


def test_sosdet_suite():
    reports = verify.sosdet(rounds=30)
    assert len(reports) == 4
    assert verify.passed(reports)


@pytest.mark.slow
def test_negative_load_suite():
    assert verify.passed(verify.negative_load(runs=14, rounds=100))


@pytest.mark.slow
def test_all_suites():
    assert verify.passed(verify.run_suites())


def test_unknown_suite():
    with pytest.raises(verify.VerifyError):
        verify.run_suites(['everything'])


def test_monitored_reports_do_not_fail():
    reports = [BoundReport('a', 1.0, 0.5),
               BoundReport('b', 1.0, 5.0, monitored=True)]
    assert verify.passed(reports)
    assert not verify.passed(reports + [BoundReport('c', 1.0, 2.0)])


def test_write_report(tmp_path):
    p = tmp_path / 'verify.csv'
    verify.write_report(verify.gamma(cases=5), p)
    lines = p.read_text().splitlines()
    assert lines[0] == 'name,instance,observed,bound,satisfied,monitored'
    assert len(lines) == 2
    assert len(verify.report_table([])) == 0


def test_negative_load_suite_records_premise():
    reports = verify.negative_load(runs=7, rounds=30)
    names = {r.name for r in reports}
    assert names == {'negative-load-end', 'negative-load-transient',
                     'negative-load-transient-disc', 'negload-premise'}
    premise = [r for r in reports if r.name == 'negload-premise']
    disc = [r for r in reports if r.name == 'negative-load-transient-disc']
    assert len(premise) == len(disc) == 7
    for p, d in zip(premise, disc):
        assert p.monitored
        holds = p.instance.endswith('holds')
        assert holds or p.instance.endswith('fails')
        assert holds == p.satisfied
        assert d.monitored is not holds
    assert verify.passed(reports)


def test_upsilon_suite():
    reports = verify.upsilon(graphs=[cycle(8), torus2d(4, 4)])
    fos = [r for r in reports if r.name == 'upsilon-fos']
    sos = [r for r in reports if r.name == 'upsilon-sos']
    assert len(fos) == len(sos) == 2
    assert all(r.satisfied and not r.monitored for r in fos)
    assert all(r.monitored and np.isfinite(r.ratio) for r in sos)


class _Series():
    def __init__(self, values):
        self.values = values

    def column(self, name):
        return np.array(self.values, dtype=float)


def test_wavefront_report():
    series = _Series([5, 4, 3, 2, 6, 2] + [1]*14)
    report = verify.wavefront_report(series, 7, instance='toy')
    assert report.monitored
    assert report.observed == 2
    assert 'arrival=7' in report.instance
    assert verify.wavefront_report(series, None).observed == np.inf


def test_arrival_monitor():
    g = cycle(8)
    monitor = verify.ArrivalMonitor(4)
    x0 = initial_load('corner:10', g, discrete=False)
    run(x0, SchemeConfig(scheme='FOS', rounding='none', rounds=6), g,
        callback=monitor)
    assert monitor.round == 4
    assert verify.center_node(1000, 1000) == 500*1000 + 500


def test_small_wavefront_suite():
    reports = verify.wavefront(width=20, rounds=80)
    assert len(reports) == 1
    assert reports[0].monitored
    assert 'arrival=None' not in reports[0].instance
    assert verify.passed(reports)


@pytest.mark.slow
def test_wavefront_suite():
    assert verify.passed(verify.wavefront())
