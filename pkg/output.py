"""Deterministic CSV, YAML and table writers for trajectories, sweeps and summaries."""

import csv
import io
import logging
from pathlib import Path

import numpy as np
import yaml
from tabulate import tabulate

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = ['t', 'rho00', 'rhoB', 'rho11', 'rho22', 'pop_sum']
DEVIATION_HEADER = ['t', 'd_rho00', 'd_rhoB', 'd_rho11', 'd_rho22']
SWEEP_HEADER = ['omega', 'rho00_inf', 'rhoB_inf', 'rho11_inf', 'rho22_inf',
                'gamma1_re', 'gamma1_im', 'gamma2_re', 'gamma2_im', 'gamma3', 'tau3']


def fmt(value):
    """17 significant digits: every double re-parses to itself."""
    return '%.17g' % float(value)


def plain(value):
    """Convert numpy scalars, tuples and complex numbers into YAML-safe builtins."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': float(value.real), 'im': float(value.imag)}
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def write_rows(stream, header, rows):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def trajectory_rows(traj):
    sums = traj.population_sums()
    for t, state, total in zip(traj.times, traj.states, sums):
        yield (t, *state, total)


def write_trajectory_csv(stream, traj):
    """Header `t,rho00,rhoB,rho11,rho22,pop_sum`, one row per sample."""
    write_rows(stream, TRAJECTORY_HEADER, trajectory_rows(traj))


def write_deviation_csv(stream, traj, deviations):
    write_rows(stream, DEVIATION_HEADER,
               ((t, *d) for t, d in zip(traj.times, deviations)))


def sweep_rows(rows):
    for row in rows:
        g1, g2, g3 = row.spectrum.gammas[:3]
        s = row.steady
        yield (row.omega, s.rho00, s.rhoB, s.rho11, s.rho22,
               g1.real, g1.imag, g2.real, g2.imag, g3.real, row.tau3)


def write_sweep_csv(stream, rows):
    write_rows(stream, SWEEP_HEADER, sweep_rows(rows))


def dump_yaml(data, stream=None):
    """YAML in insertion order; returns the text when no stream is given."""
    return yaml.safe_dump(plain(data), stream, sort_keys=False, default_flow_style=False)


def render_table(rows, headers):
    return tabulate(rows, headers=headers, tablefmt='github', floatfmt='.6g')


def write_text(path, writer, *args):
    """Run `writer(stream, *args)` into a file, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer(f, *args)
    logger.info("Wrote %s", path)
    return path


def to_string(writer, *args):
    buffer = io.StringIO()
    writer(buffer, *args)
    return buffer.getvalue()
