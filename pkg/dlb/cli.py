#!python3

## Import General Tools
import sys
import argparse
import logging
from pathlib import Path

from . import read_config, run_config_from_dict
from .graph import GraphError
from .graphs import from_spec
from .scheme_config import SchemeConfigError
from .run_config import RunConfigError
from .spectral import SpectralError, lambda2, eigenbasis, coefficient_trace,\
                      write_coefficient_trace
from .diffusion import DiffusionError, LoadState, active_scheme, run,\
                       initial_load
from .metrics import remaining_imbalance
from .rng import SubstreamRNG
from .render import RenderError, render, write_pgm, frame_filename
from .snapshot import SnapshotError, write_snapshot, read_snapshot,\
                      list_snapshots, snapshot_filename
from .theory import TheoryError
from . import verify


log = logging.getLogger('dlb')

usage_errors = (GraphError, SchemeConfigError, RunConfigError, SpectralError,
                DiffusionError, RenderError, SnapshotError, TheoryError,
                verify.VerifyError, FileNotFoundError)


def _beta(value):
    if value == 'auto':
        return value
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f'beta must be a number or "auto"')


def _stride(value):
    return value if value == 'auto' else int(value)


##-------------------------------------------------------------------------
## Parser
##-------------------------------------------------------------------------
def build_parser():
    p = argparse.ArgumentParser(prog='dlb',
            description='Discrete diffusion load balancing simulator.')
    p.add_argument('-v', '--verbose', action='store_true',
                   help='Print debug messages')
    sub = p.add_subparsers(dest='command', required=True)

    ## run
    r = sub.add_parser('run', help='Simulate a diffusion scheme')
    r.add_argument('--config', type=str, default=None,
                   help='YAML configuration file (flags win on conflict)')
    r.add_argument('--graph', type=str, default=None,
                   help='Graph spec, e.g. torus2d:100x100')
    r.add_argument('--graph-seed', type=int, default=None)
    r.add_argument('--scheme', type=str.upper, choices=['FOS', 'SOS'],
                   default=None)
    r.add_argument('--beta', type=_beta, default=None)
    r.add_argument('--rounding', choices=['floor', 'randomized', 'none'],
                   default=None)
    r.add_argument('--switch-at', type=int, default=None)
    r.add_argument('--switch-local-below', type=float, default=None)
    r.add_argument('--init', type=str, default=None,
                   help='corner:F, uniform:V or file:PATH')
    r.add_argument('--rounds', type=int, default=None)
    r.add_argument('--seed', type=int, default=None)
    r.add_argument('--mode', choices=['discrete', 'continuous'], default=None)
    r.add_argument('--out', type=str, default=None)
    r.add_argument('--metrics', type=str, default=None,
                   help='Name of the metrics CSV inside --out')
    r.add_argument('--frames-every', type=int, default=None)
    r.add_argument('--frame-mode', choices=['adaptive', 'threshold'],
                   default=None)
    r.add_argument('--cutoff', type=float, default=None)
    r.add_argument('--snapshot-every', type=_stride, default=None)
    r.add_argument('--workers', type=int, default=None)

    ## verify
    v = sub.add_parser('verify', help='Run the verification suites')
    v.add_argument('suites', nargs='*', default=[],
                   help=f'Suites to run: {", ".join(verify.suites)} or all')
    v.add_argument('--out', type=str, default='.')

    ## spectral
    s = sub.add_parser('spectral', help='Print lambda and the optimal beta')
    s.add_argument('graph', type=str)
    s.add_argument('--graph-seed', type=int, default=0)
    s.add_argument('--trace', type=str, default=None,
                   help='Directory of load snapshots to trace coefficients of')
    s.add_argument('--out', type=str, default='.')

    ## render
    d = sub.add_parser('render', help='Render frames from load snapshots')
    d.add_argument('snapshots', type=str)
    d.add_argument('--graph', type=str, required=True,
                   help='torus2d:WxH spec of the snapshots')
    d.add_argument('--frame-mode', choices=['adaptive', 'threshold'],
                   default='adaptive')
    d.add_argument('--cutoff', type=float, default=10)
    d.add_argument('--out', type=str, default='.')
    return p


def config_from_args(args):
    '''Merge a configuration file with command line flags.'''
    settings = read_config(args.config) if args.config is not None else {}
    if isinstance(settings.get('scheme', None), dict):
        nested = settings.pop('scheme')
        nested.pop('name', None)
        settings.update({k.replace('-', '_'): v for k,v in nested.items()})
    for key, value in vars(args).items():
        if key in ['config', 'command', 'verbose'] or value is None:
            continue
        settings[key] = value
    if settings.get('rounding', None) == 'none' and 'mode' not in settings:
        settings['mode'] = 'continuous'
    return run_config_from_dict(settings)


##-------------------------------------------------------------------------
## Commands
##-------------------------------------------------------------------------
def _torus_dims(graph):
    if graph.family != 'torus2d':
        raise RenderError(f'Frames need a torus2d graph, not {graph.name}')
    return graph.params['width'], graph.params['height']


def cmd_run(config):
    config.validate()
    graph = config.build_graph()
    scheme = config.scheme.resolve(graph)
    beta = scheme.resolved_beta(graph)
    out = config.out_path
    out.mkdir(parents=True, exist_ok=True)
    config.write(out / 'run.yaml')

    x0 = initial_load(config.init, graph, discrete=config.mode == 'discrete')
    stride = config.snapshot_stride(graph)
    frames = config.frames_every
    dims = _torus_dims(graph) if frames is not None else None

    def emit(round, x, active):
        if stride is not None and round % stride == 0:
            write_snapshot(x, out / snapshot_filename(round), round,
                           scheme=active, beta=beta)
        if frames is not None and round % frames == 0:
            frame = render(x, *dims, mode=config.frame_mode,
                           cutoff=config.cutoff)
            write_pgm(frame, out / frame_filename(round))

    emit(0, x0, active_scheme(LoadState(x=x0), scheme, graph))
    rng = SubstreamRNG(scheme.seed) if scheme.rounding == 'randomized' else None
    trajectory = run(x0, scheme, graph, rng=rng, beta=beta,
                     workers=config.workers,
                     callback=lambda state, rec: emit(state.round, state.x,
                                                      rec.scheme),
                     progress_every=100)
    trajectory.write(out / config.metrics)

    if len(trajectory) >= 100:
        verdict = remaining_imbalance(trajectory)
    else:
        verdict = None
    if verdict is not None and verdict.converged:
        imbalance = (f'remaining_imbalance={verdict.remaining_imbalance:g} '
                     f'converged_at={verdict.converged_at}')
    else:
        imbalance = 'remaining_imbalance=not-converged'
    min_transient = trajectory.min_transient_ever()
    min_transient = 'n/a' if min_transient is None else f'{min_transient:g}'
    print(f'rounds={len(trajectory)} beta={beta:.10f} {imbalance} '
          f'min_transient={min_transient}')
    return 0


def cmd_verify(names, out='.'):
    reports = verify.run_suites(names)
    for r in reports:
        print(str(r))
    out = Path(out).expanduser().absolute()
    out.mkdir(parents=True, exist_ok=True)
    verify.write_report(reports, out / 'verify.csv')
    return 0 if verify.passed(reports) else 1


def cmd_spectral(spec, graph_seed=0, trace=None, out='.'):
    graph = from_spec(spec, seed=graph_seed)
    spectrum = lambda2(graph)
    print(f'lambda={spectrum.lambda_:.10f} beta={spectrum.beta:.10f} '
          f'source={spectrum.source}')
    if trace is not None:
        basis = eigenbasis(graph)
        loads = [read_snapshot(f)[:2] for f in list_snapshots(trace)]
        out = Path(out).expanduser().absolute()
        out.mkdir(parents=True, exist_ok=True)
        write_coefficient_trace(coefficient_trace(basis, loads),
                                out / 'coefficients.csv')
        log.info(f'Traced {len(loads)} snapshots')
    return 0


def cmd_render(snapshots, spec, mode='adaptive', cutoff=10, out='.'):
    graph = from_spec(spec)
    dims = _torus_dims(graph)
    out = Path(out).expanduser().absolute()
    out.mkdir(parents=True, exist_ok=True)
    files = list_snapshots(snapshots)
    for f in files:
        round, x, header = read_snapshot(f)
        write_pgm(render(x, *dims, mode=mode, cutoff=cutoff),
                  out / frame_filename(round))
    log.info(f'Rendered {len(files)} frames')
    return 0


##-------------------------------------------------------------------------
## main
##-------------------------------------------------------------------------
def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        if args.command == 'run':
            return cmd_run(config_from_args(args))
        if args.command == 'verify':
            return cmd_verify(args.suites, out=args.out)
        if args.command == 'spectral':
            return cmd_spectral(args.graph, graph_seed=args.graph_seed,
                                trace=args.trace, out=args.out)
        if args.command == 'render':
            return cmd_render(args.snapshots, args.graph, mode=args.frame_mode,
                              cutoff=args.cutoff, out=args.out)
    except usage_errors as e:
        print(f'dlb: error: {e}', file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
