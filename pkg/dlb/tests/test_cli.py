import pytest

from dlb.cli import main
from dlb.render import read_pgm
from dlb.snapshot import list_snapshots, read_snapshot


def _summary(capsys):
    return capsys.readouterr().out.strip().splitlines()[-1]


def test_spectral_k2(capsys):
    assert main(['spectral', 'k2']) == 0
    out = _summary(capsys)
    assert 'lambda=0.0000000000' in out
    assert 'beta=1.0000000000' in out


@pytest.mark.parametrize('spec, beta', [
    ('torus2d:100x100', '1.9235874877'),
    pytest.param('hypercube:20', '1.4026054847', marks=pytest.mark.slow),
    ('torus2d:1000x1000', '1.9920836447'),
    ])
def test_spectral_benchmarks(capsys, spec, beta):
    assert main(['spectral', spec]) == 0
    assert f'beta={beta}' in _summary(capsys)


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / 'run'
    code = main(['run', '--graph', 'torus2d:10x10', '--scheme', 'sos',
                 '--rounding', 'randomized', '--init', 'corner:100',
                 '--rounds', '150', '--seed', '7', '--out', str(out),
                 '--frames-every', '50', '--snapshot-every', '50'])
    assert code == 0
    summary = _summary(capsys)
    assert summary.startswith('rounds=150 beta=')
    assert 'min_transient=' in summary
    lines = (out / 'metrics.csv').read_text().splitlines()
    assert lines[0].startswith('round,total_load')
    assert len(lines) == 151
    assert all(line.split(',')[1] == '10000' for line in lines[1:])
    frames = sorted(p.name for p in out.glob('frame_*.pgm'))
    assert frames == [f'frame_{r:08d}.pgm' for r in [0, 50, 100, 150]]
    assert read_pgm(out / frames[0]).width == 10
    assert len(list_snapshots(out)) == 4
    assert (out / 'run.yaml').exists()


def test_runs_are_reproducible(tmp_path, capsys):
    args = ['run', '--graph', 'torus2d:8x8', '--rounds', '40', '--seed', '3',
            '--init', 'corner:50']
    main(args + ['--out', str(tmp_path / 'a')])
    main(args + ['--out', str(tmp_path / 'b'), '--workers', '3'])
    a = (tmp_path / 'a' / 'metrics.csv').read_bytes()
    b = (tmp_path / 'b' / 'metrics.csv').read_bytes()
    assert a == b


def test_k2_summary_reports_remaining_imbalance(tmp_path, capsys):
    code = main(['run', '--graph', 'k2', '--scheme', 'fos', '--rounding',
                 'floor', '--init', 'file:' + str(_loads(tmp_path, [3, 0])),
                 '--rounds', '200', '--out', str(tmp_path)])
    assert code == 0
    assert 'remaining_imbalance=0.5' in _summary(capsys)


def _loads(tmp_path, values):
    p = tmp_path / 'loads.txt'
    p.write_text('\n'.join(str(v) for v in values))
    return p


def test_continuous_mode(tmp_path, capsys):
    code = main(['run', '--graph', 'cycle:8', '--mode', 'continuous',
                 '--init', 'corner:10', '--rounds', '20', '--out',
                 str(tmp_path)])
    assert code == 0
    assert 'not-converged' in _summary(capsys)


def test_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / 'config.yaml'
    config.write_text('graph: cycle:8\nscheme: fos\nrounding: floor\n'
                      'rounds: 12\ninit: corner:4\n')
    code = main(['run', '--config', str(config), '--rounds', '5', '--out',
                 str(tmp_path)])
    assert code == 0
    assert _summary(capsys).startswith('rounds=5 beta=1.0000000000')


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(['run', '--graph', 'lattice:5', '--out', str(tmp_path)]) == 2
    assert main(['run', '--graph', 'cycle:5', '--frames-every', '2',
                 '--out', str(tmp_path)]) == 2
    assert main(['spectral', 'torus2d:2x2']) == 2


def test_usage_errors_exit_2(tmp_path):
    assert main(['verify', 'everything', '--out', str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as e:
        main(['run', '--scheme', 'tos'])
    assert e.value.code == 2


def test_verify_command(tmp_path, capsys):
    assert main(['verify', 'gamma', '--out', str(tmp_path)]) == 0
    assert (tmp_path / 'verify.csv').exists()
    assert 'gamma-closed-form' in capsys.readouterr().out


def test_trace_and_render(tmp_path, capsys):
    run_dir = tmp_path / 'run'
    main(['run', '--graph', 'torus2d:6x6', '--rounds', '10', '--init',
          'corner:20', '--snapshot-every', '1', '--out', str(run_dir)])
    assert main(['spectral', 'torus2d:6x6', '--trace', str(run_dir),
                 '--out', str(tmp_path / 'trace')]) == 0
    lines = (tmp_path / 'trace' / 'coefficients.csv').read_text().splitlines()
    assert lines[0] == 'round,leading_index,max_abs_coefficient,a4'
    assert len(lines) == 12
    assert main(['render', str(run_dir), '--graph', 'torus2d:6x6',
                 '--frame-mode', 'threshold', '--out',
                 str(tmp_path / 'frames')]) == 0
    assert len(list((tmp_path / 'frames').glob('frame_*.pgm'))) == 11


@pytest.mark.slow
def test_benchmark_torus_run(tmp_path, capsys):
    code = main(['run', '--graph', 'torus2d:100x100', '--scheme', 'sos',
                 '--beta', 'auto', '--rounding', 'randomized', '--init',
                 'corner:1000', '--rounds', '2000', '--seed', '7', '--out',
                 str(tmp_path)])
    assert code == 0
    assert 'beta=1.9235874877' in _summary(capsys)
    lines = (tmp_path / 'metrics.csv').read_text().splitlines()
    assert len(lines) == 2001


def test_zero_rounds(tmp_path, capsys):
    assert main(['run', '--graph', 'torus2d:5x5', '--rounds', '0', '--out',
                 str(tmp_path)]) == 0
    lines = (tmp_path / 'metrics.csv').read_text().splitlines()
    assert lines == ['round,total_load,max_above_avg,max_local_diff,'
                     'potential_over_n,min_load,min_transient']
    assert 'min_transient=n/a' in _summary(capsys)


def test_frames_identical_across_workers(tmp_path, capsys):
    args = ['run', '--graph', 'torus2d:12x12', '--rounds', '30', '--seed', '5',
            '--frames-every', '10', '--frame-mode', 'threshold']
    for w in ['1', '2', '8']:
        main(args + ['--workers', w, '--out', str(tmp_path / w)])
    for name in ['metrics.csv'] + [f'frame_{r:08d}.pgm' for r in [0, 10, 20, 30]]:
        reference = (tmp_path / '1' / name).read_bytes()
        for w in ['2', '8']:
            assert (tmp_path / w / name).read_bytes() == reference


def test_snapshots_record_active_scheme(tmp_path, capsys):
    code = main(['run', '--graph', 'torus2d:4x4', '--scheme', 'sos',
                 '--switch-at', '2', '--init', 'corner:100', '--rounds', '4',
                 '--snapshot-every', '1', '--out', str(tmp_path)])
    assert code == 0
    schemes = [read_snapshot(p)[2]['SCHEME'] for p in list_snapshots(tmp_path)]
    assert schemes == ['SOS', 'SOS', 'SOS', 'FOS', 'FOS']
