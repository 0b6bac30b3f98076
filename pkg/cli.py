"""
Command-line front end.

    python cli.py steady --omega 4.5
    python cli.py evolve --omega 10 --stride 10 --output traj.csv
    python cli.py sweep --linspace 0 10 101 --workers 4
    python cli.py repro --output-dir repro_output

Frequencies are angular, in rad/ns (labelled GHz); times are in ns.
Single-point queries print YAML, trajectories and sweeps print CSV.
"""

import argparse
import logging
import sys

import numpy as np

from analysis import check_fit_grid, fit_decay_constant, sweep
from config import configure_logging, get_settings, load_config, validate_config
from errors import InsufficientSignalError, InvalidParameterError, LambdaSystemError
from fullsystem import FullState, decoupling_residual, evolve_full, hermiticity_drift, trace_drift
from integrator import DEFAULT_DT, evolve, exact_solution
from model import STATE_ORDER, build_generator
from output import (
    dump_yaml,
    render_table,
    sweep_rows,
    SWEEP_HEADER,
    to_string,
    trajectory_rows,
    TRAJECTORY_HEADER,
    write_sweep_csv,
    write_text,
    write_trajectory_csv,
)
from repro import run_repro
from spectrum import complex_onset, eigenvalues, trace_residual
from steady_state import crossover_omega, steady_state

logger = logging.getLogger(__name__)

FULL_AGREEMENT_TOL = 1e-6
DECOUPLING_TOL = 1e-10

# Keys a subcommand flag may override in the scenario; everything else is CLI-only.
SCENARIO_KEYS = ('t1', 't2', 'k21', 'k02', 'omega', 'omegas', 't_end', 'dt', 'stride',
                 'init', 'output', 'format', 'bracket', 'tol')


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', action='store_true', help='log progress (INFO)')
    common.add_argument('--debug', action='store_true', help='log everything (DEBUG)')
    common.add_argument('--config', metavar='PATH', help='scenario file of key = value lines')
    common.add_argument('--t1', type=float, help='level-1 to level-0 decay time (ns)')
    common.add_argument('--t2', type=float, help='dephasing time (ns)')
    common.add_argument('--k21', type=float, help='level-1 to level-2 rate (1/ns)')
    common.add_argument('--k02', type=float, help='level-2 to level-0 rate (1/ns)')
    return common


def _time_options(parser):
    parser.add_argument('--omega', type=float, help='drive strength (GHz)')
    parser.add_argument('--t-end', dest='t_end', type=float, help='final time (ns), default 14')
    parser.add_argument('--dt', type=float, help=f"integrator step (ns), default {DEFAULT_DT:g}")
    parser.add_argument('--stride', type=int, help='internal steps per output sample')
    parser.add_argument('--init', help="'excited' (all in level 1, default), 'ground', or four numbers a,b,c,d")


def _output_options(parser):
    parser.add_argument('--output', help='write to this file instead of stdout')
    parser.add_argument('--format', choices=('csv', 'yaml'), help='output format (default csv)')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='cli.py',
        description='Driven three-level lambda system: steady states, spectra and time evolution.',
    )
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True
    common = _common_options()

    p = sub.add_parser('steady', parents=[common], help='closed-form steady state')
    p.add_argument('--omega', type=float, help='drive strength (GHz)')

    p = sub.add_parser('spectrum', parents=[common], help='eigenvalues of the generator')
    p.add_argument('--omega', type=float, help='drive strength (GHz)')
    p.add_argument('--onset', action='store_true', help='also locate the complex-pair onset')
    p.add_argument('--bracket', help='lo,hi bracket for --onset (GHz)')

    p = sub.add_parser('evolve', parents=[common], help='RK4 time evolution')
    _time_options(p)
    _output_options(p)

    p = sub.add_parser('exact', parents=[common], help='eigen-expansion solution on the RK4 grid')
    _time_options(p)
    _output_options(p)

    p = sub.add_parser('sweep', parents=[common], help='steady state and spectrum over many omegas')
    grid = p.add_mutually_exclusive_group()
    grid.add_argument('--omegas', help='comma-separated drive strengths (GHz)')
    grid.add_argument('--linspace', nargs=3, type=float, metavar=('LO', 'HI', 'N'),
                      help='evenly spaced grid')
    p.add_argument('--workers', type=int, help='worker threads (rows stay in input order)')
    p.add_argument('--table', action='store_true', help='print a human-readable table')
    _output_options(p)

    p = sub.add_parser('crossover', parents=[common], help='omega where rho22(inf) overtakes rho00(inf)')
    p.add_argument('--bracket', help='lo,hi: cross-check the closed form by bisection')
    p.add_argument('--tol', type=float, help='agreement tolerance for the cross-check')

    p = sub.add_parser('decay-fit', parents=[common], help='two-point decay times at t = 11 and 14 ns')
    _time_options(p)
    p.add_argument('--component', choices=STATE_ORDER, help='fit one component (default all)')

    p = sub.add_parser('verify-full', parents=[common], help='compare against the full 3x3 evolution')
    _time_options(p)

    p = sub.add_parser('repro', parents=[common], help='regenerate every data set and check it')
    p.add_argument('--output-dir', help='directory for data files (default $LAMBDA3_OUTPUT_DIR)')
    p.add_argument('--workers', type=int, help='worker threads for sweeps')
    return parser


def _linspace(values):
    lo, hi, n = values
    if not (n.is_integer() and n >= 1):
        raise InvalidParameterError('linspace', f"N must be a positive integer, got {n:g}")
    return ','.join('%.17g' % w for w in np.linspace(lo, hi, int(n)))


def scenario_from_args(args, settings):
    """Defaults, then the config file, then flags; validated once at the end."""
    overrides = {key: getattr(args, key, None) for key in SCENARIO_KEYS}
    if getattr(args, 'linspace', None):
        overrides['omegas'] = _linspace(args.linspace)
    if args.config:
        scenario = load_config(args.config, **overrides)
    else:
        scenario = validate_config({k: v for k, v in overrides.items() if v is not None})
    if overrides['dt'] is None and 'dt' not in scenario.model_fields_set:
        scenario = scenario.model_copy(update={'dt': settings.dt})
    return scenario


def _emit(scenario, text):
    if scenario.output is None:
        sys.stdout.write(text)
    else:
        write_text(scenario.output, lambda f: f.write(text))


def _trajectory_text(scenario, traj):
    if scenario.format == 'yaml':
        return dump_yaml([dict(zip(TRAJECTORY_HEADER, row)) for row in trajectory_rows(traj)])
    return to_string(write_trajectory_csv, traj)


def cmd_steady(args, scenario, settings):
    params = scenario.params()
    x = steady_state(params)
    _emit(scenario, dump_yaml({
        'omega': params.omega,
        **x.as_dict(),
        'pop_sum': x.population_sum,
        'rho22_exceeds_rho00': x.rho22 > x.rho00,
    }))
    return 0


def cmd_spectrum(args, scenario, settings):
    params = scenario.params()
    gen = build_generator(params)
    spec = eigenvalues(gen)
    summary = {
        'omega': params.omega,
        'gammas': list(spec.gammas),
        'taus': list(spec.taus),
        'complex_pair': spec.complex_pair,
        'discriminant': spec.discriminant,
        'trace': gen.trace,
        'trace_residual': trace_residual(gen, spec),
    }
    if args.onset:
        bracket = scenario.bracket or (1.0, 3.0)
        summary['complex_onset'] = complex_onset(params, bracket, scenario.tol)
    _emit(scenario, dump_yaml(summary))
    return 0


def _run_trajectory(scenario, exact=False):
    params = scenario.params()
    init = scenario.initial_condition()
    traj = evolve(params, init, scenario.t_end, scenario.dt, scenario.stride)
    if exact:
        traj = exact_solution(params, init, traj.times)
    return traj


def cmd_evolve(args, scenario, settings):
    _emit(scenario, _trajectory_text(scenario, _run_trajectory(scenario)))
    return 0


def cmd_exact(args, scenario, settings):
    _emit(scenario, _trajectory_text(scenario, _run_trajectory(scenario, exact=True)))
    return 0


def cmd_sweep(args, scenario, settings):
    omegas = scenario.omegas if scenario.omegas is not None else [scenario.omega]
    workers = args.workers or settings.workers
    rows = sweep(scenario.params(), omegas, workers=workers)
    if args.table:
        text = render_table(list(sweep_rows(rows)), SWEEP_HEADER) + '\n'
    elif scenario.format == 'yaml':
        text = dump_yaml([dict(zip(SWEEP_HEADER, row)) for row in sweep_rows(rows)])
    else:
        text = to_string(write_sweep_csv, rows)
    _emit(scenario, text)
    return 0


def cmd_crossover(args, scenario, settings):
    params = scenario.params()
    omega_star = crossover_omega(params, bracket=scenario.bracket, tol=scenario.tol)
    _emit(scenario, dump_yaml({
        'k21': params.k21,
        'k02': params.k02,
        'omega_star': omega_star,
        'checked_by_bisection': scenario.bracket is not None,
    }))
    return 0


def cmd_decay_fit(args, scenario, settings):
    params = scenario.params()
    check_fit_grid(scenario.dt, scenario.stride)
    t_end = max(scenario.t_end, 14.0)
    traj = evolve(params, scenario.initial_condition(), t_end, scenario.dt, scenario.stride)
    target = steady_state(params)
    spec = eigenvalues(build_generator(params))

    fits = {}
    for component in [args.component] if args.component else STATE_ORDER:
        try:
            fit = fit_decay_constant(traj, target, component)
            fits[component] = {'tau': fit.tau, 'residuals': list(fit.residuals)}
        except InsufficientSignalError as e:
            logger.warning("No fit for %s: %s", component, e)
            fits[component] = {'tau': None, 'reason': str(e)}
    _emit(scenario, dump_yaml({'omega': params.omega, 'tau3': spec.tau3, 'fits': fits}))
    return 0


def cmd_verify_full(args, scenario, settings):
    params = scenario.params()
    reduced_init = scenario.initial_condition()
    numeric = evolve(params, reduced_init, scenario.t_end, scenario.dt, scenario.stride)
    full = evolve_full(params, FullState.from_density_vector(reduced_init),
                       scenario.t_end, scenario.dt, scenario.stride)
    disagreement = float(np.max(np.abs(full.reduced().states - numeric.states)))
    decoupling = decoupling_residual(full)
    passed = disagreement <= FULL_AGREEMENT_TOL and decoupling <= DECOUPLING_TOL
    _emit(scenario, dump_yaml({
        'omega': params.omega,
        'max_reduced_difference': disagreement,
        'decoupling_residual': decoupling,
        'hermiticity_drift': hermiticity_drift(full),
        'trace_drift': trace_drift(full),
        'passed': passed,
    }))
    return 0 if passed else 1


def cmd_repro(args, scenario, settings):
    output_dir = args.output_dir or settings.output_dir
    result = run_repro(output_dir, workers=args.workers or settings.workers, dt=scenario.dt)
    sys.stdout.write(result.table() + '\n')
    if result.failures:
        sys.stderr.write(f"error: {len(result.failures)} check(s) failed\n")
        return 1
    return 0


COMMANDS = {
    'steady': cmd_steady,
    'spectrum': cmd_spectrum,
    'evolve': cmd_evolve,
    'exact': cmd_exact,
    'sweep': cmd_sweep,
    'crossover': cmd_crossover,
    'decay-fit': cmd_decay_fit,
    'verify-full': cmd_verify_full,
    'repro': cmd_repro,
}


def run(argv=None):
    """
    Parse arguments, run one subcommand and return the exit status.

    Returns:
        0 on success, 1 on a domain or numerical error, 2 on a usage error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        settings = get_settings()
        level = 'DEBUG' if args.debug else 'INFO' if args.verbose else settings.log_level
        configure_logging(level)
        scenario = scenario_from_args(args, settings)
        logger.info("Running %s", args.command)
        return COMMANDS[args.command](args, scenario, settings)
    except LambdaSystemError as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    except Exception:
        logger.exception("Unexpected failure in %s", args.command)
        return 1


if __name__ == '__main__':
    sys.exit(run(sys.argv[1:]))
