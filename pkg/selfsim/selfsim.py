#!/usr/bin/env python3
"""
selfsim: construct, continue and check self-similar profiles of the focusing
supercritical wave equation from the command line.

Global tuning flags come before the subcommand (--c-lo, --c-hi and --s-max
may be repeated after it); their defaults live in
~/.config/selfsim/config.ini and may be saved with -S/--save-defaults.
"""
# pylint: disable=invalid-name,broad-exception-caught,too-many-locals
# pylint: disable=too-many-statements,too-many-branches
import sys
import argparse
from pathlib import Path
from .Errors import SelfSimError, NoRootInBracket, DomainError
from .Models import RunConfig, INCONCLUSIVE, COMPLETED
from .Params import derive_params, Regime
from .IniManager import IniManager
from .Shooting import find_profile, assemble, stitched_columns, scan, c_grid
from .Continuation import (extend_and_classify, threshold_bracket, first_certified,
                           monotone_frame, h_positivity)
from .GroundState import solve_Q, limit_report, rescaling_check
from .Verify import Verifier
from . import IoFormats as io
from .RotatingLogger import RotatingLogger

lg = RotatingLogger('selfsim')

EXIT_OK = 0
EXIT_NO_RESULT = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64

DEFAULTS = dict(tol=1e-10,
                shoot_tol=1e-8,
                rho0=0.9,
                delta0=1e-4,
                delta1=1e-5,
                s_max=25.0,
                grid_per_decade=64,
                c_lo=0.05,
                c_hi=1e4,
                u_max=1e8,
                blowup_u_max=1e4,
                jobs=1,
                keep_backup=False,
                output_dir='.',
                method='DOP853',
                )


class UsageParser(argparse.ArgumentParser):
    """ ArgumentParser whose usage errors exit with EXIT_USAGE """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def float_list(text):
    """ '1,10,100' -> [1.0, 10.0, 100.0] """
    try:
        return [float(tok) for tok in text.split(',') if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f'bad number list {text!r}') from exc


def build_parser(vals):
    """ Parser for all subcommands; defaults from the ini/env values """
    parser = UsageParser(prog='selfsim',
        description='Self-similar profiles of the supercritical wave equation by shooting')
    parser.add_argument('--tol', default=vals.tol, type=float,
                help=f'integrator relative tolerance [dflt={vals.tol}]')
    parser.add_argument('--shoot-tol', default=vals.shoot_tol, type=float,
                help=f'accepted matching mismatch (relative) [dflt={vals.shoot_tol}]')
    parser.add_argument('--rho0', default=vals.rho0, type=float,
                help=f'match radius in (0.5, 1) [dflt={vals.rho0}]')
    parser.add_argument('--delta0', default=vals.delta0, type=float,
                help=f'origin offset [dflt={vals.delta0}]')
    parser.add_argument('--delta1', default=vals.delta1, type=float,
                help=f'offset from rho=1 [dflt={vals.delta1}]')
    parser.add_argument('--s-max', default=vals.s_max, type=float,
                help=f'exterior end point in s=log(rho) [dflt={vals.s_max}]')
    parser.add_argument('--grid-per-decade', default=vals.grid_per_decade, type=int,
                help=f'c-grid points per decade [dflt={vals.grid_per_decade}]')
    parser.add_argument('--c-lo', default=vals.c_lo, type=float,
                help=f'low end of the c search [dflt={vals.c_lo}]')
    parser.add_argument('--c-hi', default=vals.c_hi, type=float,
                help=f'high end of the c search [dflt={vals.c_hi}]')
    parser.add_argument('--u-max', default=vals.u_max, type=float,
                help=f'|u| guard on (0,1) [dflt={vals.u_max}]')
    parser.add_argument('--blowup-u-max', default=vals.blowup_u_max, type=float,
                help=f'|u| guard declaring exterior blow-up [dflt={vals.blowup_u_max}]')
    parser.add_argument('-j', '--jobs', default=vals.jobs, type=int,
                help=f'worker processes for scans and threshold search [dflt={vals.jobs}]')
    parser.add_argument('-B', '--keep-backup',
                action='store_false' if vals.keep_backup else 'store_true',
                help='if true, rename old outputs to ORIG.{name} rather than recycle'
                     + f' [dflt={vals.keep_backup}]')
    parser.add_argument('-o', '--out-dir', dest='output_dir', default=vals.output_dir,
                help=f'directory for output files [dflt={vals.output_dir}]')
    parser.add_argument('--method', default=vals.method, choices=('DOP853', 'RK45'),
                help=f'solve_ivp method [dflt={vals.method}]')
    parser.add_argument('-S', '--save-defaults', action='store_true',
                help='save the options above as defaults and exit')

    # subcommand copies of the search/exterior flags; SUPPRESS keeps the
    # global value unless the flag is given after the subcommand
    search = argparse.ArgumentParser(add_help=False)
    search.add_argument('--c-lo', type=float, default=argparse.SUPPRESS,
                help='low end of the c search [dflt: global --c-lo]')
    search.add_argument('--c-hi', type=float, default=argparse.SUPPRESS,
                help='high end of the c search [dflt: global --c-hi]')
    exterior = argparse.ArgumentParser(add_help=False)
    exterior.add_argument('--s-max', type=float, default=argparse.SUPPRESS,
                help='exterior end point in s=log(rho) [dflt: global --s-max]')

    sub = parser.add_subparsers(dest='command', metavar='COMMAND', parser_class=UsageParser)

    def physics(name, text, parents=()):
        sp = sub.add_parser(name, help=text, description=text, parents=list(parents))
        sp.add_argument('--N', type=int, required=True, help='space dimension (>= 3)')
        sp.add_argument('--p', type=float, required=True, help='exponent (> 1)')
        return sp

    sp = physics('solve', 'locate the profile with n+1 zeros of u/u_inf - 1 on (0,1)', [search])
    sp.add_argument('--n', type=int, required=True, dest='n_index', help='profile index (>= 0)')
    sp.add_argument('--no-profile', action='store_true', help='skip the profile CSV')

    sp = physics('scan', 'tabulate u(1,c), zero count and angle over a c-grid', [search])
    sp.add_argument('--c-grid', type=float_list, default=None,
                help='comma list of c values [dflt: geometric grid on --c-lo..--c-hi]')
    sp.add_argument('--format', dest='output_format', choices=('csv', 'json'), default='csv',
                help='table format [dflt=csv]')

    sp = physics('extend', 'continue a right-family profile past rho=1 and classify it', [exterior])
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument('--b', type=float, help='U(1) of the subcritical right family')
    grp.add_argument('--a', type=float, help="U'(1) of the critical right family")
    grp.add_argument('--from-json', help='take the right parameter from a solve result')

    sp = physics('threshold', 'bisect the blow-up boundary in the right parameter', [exterior])
    sp.add_argument('--lo', type=float, required=True, help='one end of the bracket')
    sp.add_argument('--hi', type=float, required=True, help='other end of the bracket')
    sp.add_argument('--iters', type=int, default=40, help='bisection rounds [dflt=40]')

    sp = physics('ground-state', 'solve the rescaled limit Q and report its limits')
    sp.add_argument('--r-max', type=float, default=1e4, help='end of the r mesh [dflt=1e4]')
    sp.add_argument('--rescale-c', type=float_list, default=None,
                help='comma list of c >= 10 for the rescaling deviation')

    physics('verify', 'run the invariant checks for one (N, p)', [exterior])
    sub.add_parser('logs', help='print the log file paths')
    return parser


def run_config(opts, N=0, p=0.0):
    """ RunConfig from parsed options """
    return RunConfig(N=N, p=p, tol=opts.tol, rho0=opts.rho0, delta0=opts.delta0,
                     delta1=opts.delta1, s_max=opts.s_max,
                     output_format=getattr(opts, 'output_format', 'csv'),
                     output_path=opts.output_dir, grid_per_decade=opts.grid_per_decade,
                     u_max=opts.u_max, blowup_u_max=opts.blowup_u_max, method=opts.method,
                     jobs=opts.jobs, keep_backup=opts.keep_backup, shoot_tol=opts.shoot_tol)


def out_path(cfg, name):
    """ Output file under the configured directory """
    return Path(cfg.output_path) / name


def do_solve(opts, cfg, params):
    """ solve: ShootResult JSON plus stitched profile CSV """
    solver = cfg.solver_options()
    stem = f'{params.tag()}_n{opts.n_index}'
    try:
        result = find_profile(params, opts.n_index, opts.c_lo, opts.c_hi,
                              cfg.rho0, cfg.tol, solver)
    except NoRootInBracket as exc:
        if exc.table:
            meta = io.profile_meta(params, tol=cfg.tol, n=opts.n_index)
            path = io.write_scan(out_path(cfg, f'{stem}_scan.csv'), exc.table, meta,
                                 cfg.keep_backup)
            print(f'scan table: {path}', file=sys.stderr)
        raise
    text = io.result_to_json(result)
    io.write_text(out_path(cfg, f'{stem}.json'), text, cfg.keep_backup)
    if not opts.no_profile:
        profile = assemble(params, result, cfg.tol, solver)
        cols = stitched_columns(profile)
        meta = io.profile_meta(params, tol=cfg.tol, c=result.c,
                               right_param=result.right_param,
                               max_residual=profile.max_residual,
                               zero_count=profile.zero_count)
        io.write_profile(out_path(cfg, f'{stem}_profile.csv'),
                         io.profile_columns(params, cols['rho'], cols['u'], cols['du'],
                                            cols['theta']), meta, cfg.keep_backup)
    sys.stdout.write(text)
    return EXIT_OK


def do_scan(opts, cfg, params):
    """ scan: one row per c in CSV or JSON """
    grid = opts.c_grid if opts.c_grid else c_grid(opts.c_lo, opts.c_hi, cfg.grid_per_decade)
    rows = scan(params, grid, cfg.rho0, cfg.tol, cfg.solver_options(), cfg.jobs)
    meta = io.profile_meta(params, tol=cfg.tol, rho0=cfg.rho0)
    if cfg.output_format == 'json':
        text = io.dumps({**meta, 'rows': [{'c': r.c, 'u1': r.u1, 'zeros': r.zeros if r.ok else None,
                                           'theta': r.theta, 'hv_floor': r.hv_floor,
                                           'error': r.error} for r in rows]})
        io.write_text(out_path(cfg, f'{params.tag()}_scan.json'), text, cfg.keep_backup)
    else:
        text = io.scan_text(rows, meta)
        io.write_scan(out_path(cfg, f'{params.tag()}_scan.csv'), rows, meta, cfg.keep_backup)
    sys.stdout.write(text)
    return EXIT_OK if all(r.ok for r in rows) else EXIT_NUMERICAL


def _right_param(opts, params):
    """ (right_param, recorded u_at_one or None) from --b / --a / --from-json """
    if opts.from_json:
        result = io.result_from_json(Path(opts.from_json).read_text(encoding='utf-8'))
        if result.regime != params.regime.value:
            raise DomainError(f'{opts.from_json}: regime {result.regime} does not match'
                              f' {params.tag()} ({params.regime.value})')
        return result.right_param, result.u_at_one
    if params.regime == Regime.CRITICAL:
        if opts.a is None:
            raise DomainError(f'{params.tag()} is critical: give --a')
        return opts.a, None
    if opts.b is None:
        raise DomainError(f'{params.tag()} is not critical: give --b')
    return opts.b, None


def do_extend(opts, cfg, params):
    """ extend: AsymptoticsReport JSON plus exterior CSV """
    right_param, recorded = _right_param(opts, params)
    traj, report = extend_and_classify(params, right_param, cfg.s_max, cfg.tol,
                                       cfg.solver_options())
    u_one = right_param if params.regime == Regime.SUBCRITICAL else params.b0
    extra = {'u_at_one': u_one}
    if recorded is not None:
        extra['recorded_u_at_one'] = recorded
    certified = first_certified(params, traj)
    extra['barrier_rho'] = certified.rho if certified is not None else None
    if traj.status == COMPLETED:
        frame = monotone_frame(params, traj)
        extra['frame'] = {'increasing': frame.increasing, 'decreasing': frame.decreasing,
                          'above_one': frame.above_one, 'below_one': frame.below_one,
                          'v_first': frame.v_first, 'v_last': frame.v_last}
        if params.N == 3:
            extra['h_min'] = h_positivity(params, traj)
    text = io.report_to_json(report, params, right_param, extra)
    stem = f'{params.tag()}_ext_{right_param:.10g}'
    io.write_text(out_path(cfg, f'{stem}.json'), text, cfg.keep_backup)
    io.write_profile(out_path(cfg, f'{stem}.csv'), io.trajectory_columns(params, traj),
                     io.exterior_meta(params, right_param, cfg.tol), cfg.keep_backup)
    sys.stdout.write(text)
    return EXIT_NO_RESULT if report.classification == INCONCLUSIVE else EXIT_OK


def do_threshold(opts, cfg, params):
    """ threshold: observed Blowup / non-Blowup bracket as YAML """
    br = threshold_bracket(params, opts.lo, opts.hi, opts.iters, cfg.s_max, cfg.tol,
                           cfg.solver_options(), cfg.jobs)
    text = io.yaml_dump({'N': params.N, 'p': params.p, 'regime': params.regime.value,
                         'lo': br.lo, 'hi': br.hi, 'class_lo': br.class_lo,
                         'class_hi': br.class_hi, 'iterations': br.iterations})
    io.write_text(out_path(cfg, f'{params.tag()}_threshold.yaml'), text, cfg.keep_backup)
    sys.stdout.write(text)
    return EXIT_OK


def do_ground_state(opts, cfg, params):
    """ ground-state: CSV of Q, V, E plus a YAML limit report """
    gs = solve_Q(params, opts.r_max, cfg.tol)
    report = limit_report(params, gs)
    if opts.rescale_c:
        report['rescaling'] = [{'c': c, 'deviation': rescaling_check(
            params, c, tol=min(cfg.tol, 1e-12), opts=cfg.solver_options(), gs=gs)}
                               for c in opts.rescale_c]
    meta = io.profile_meta(params, tol=cfg.tol, r_max=float(opts.r_max))
    io.write_ground_state(out_path(cfg, f'{params.tag()}_ground_state.csv'), gs, meta,
                          cfg.keep_backup)
    text = io.yaml_dump(report)
    io.write_text(out_path(cfg, f'{params.tag()}_ground_state.yaml'), text, cfg.keep_backup)
    sys.stdout.write(text)
    return EXIT_OK


def do_verify(_opts, cfg, params):
    """ verify: every applicable check, YAML report, exit 0 only if all pass """
    verifier = Verifier(params, cfg.tol, cfg.solver_options(), cfg.s_max)
    verifier.run()
    text = verifier.report()
    io.write_text(out_path(cfg, f'{params.tag()}_verify.yaml'), text, cfg.keep_backup)
    sys.stdout.write(text)
    return EXIT_OK if verifier.passed else EXIT_NUMERICAL


COMMANDS = {'solve': do_solve, 'scan': do_scan, 'extend': do_extend,
            'threshold': do_threshold, 'ground-state': do_ground_state,
            'verify': do_verify}


def main(args=None):
    """
    Entry point; returns the exit code
    (0 ok, 2 no root / inconclusive, 3 numerical failure, 64 usage).
    """
    cfg_mgr = IniManager('selfsim', **DEFAULTS)
    vals = cfg_mgr.vals
    parser = build_parser(vals)
    try:
        opts = parser.parse_args(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    if opts.save_defaults:
        print('Setting new defaults:')
        for key in vars(vals):
            new_value = getattr(opts, key)
            print(f'- {key} {new_value}')
            setattr(vals, key, new_value)
        cfg_mgr.write()
        return EXIT_OK

    if opts.command == 'logs':
        for path in lg.paths:
            print(path)
        return EXIT_OK
    if opts.command is None:
        parser.print_usage(sys.stderr)
        print('selfsim: error: a COMMAND is required', file=sys.stderr)
        return EXIT_USAGE

    try:
        params = derive_params(opts.N, opts.p)
    except DomainError as exc:
        parser.print_usage(sys.stderr)
        lg.err(f'{opts.command}: {exc}')
        return EXIT_USAGE
    try:
        cfg = run_config(opts, params.N, params.p)
        lg.lg(f'{opts.command} {params.tag()} regime={params.regime.value}'
              f' tol={cfg.tol:g} rho0={cfg.rho0:g}')
        return COMMANDS[opts.command](opts, cfg, params)
    except NoRootInBracket as exc:
        lg.err(f'{opts.command}: {exc}')
        return EXIT_NO_RESULT
    except DomainError as exc:
        lg.err(f'{opts.command}: {exc}')
        return EXIT_USAGE
    except (SelfSimError, ArithmeticError) as exc:
        lg.err(f'{opts.command}: {type(exc).__name__}: {exc}')
        return EXIT_NUMERICAL
    except OSError as exc:
        lg.err(f'{opts.command}: {exc}')
        return EXIT_NUMERICAL


if __name__ == '__main__':
    sys.exit(main())
