"""Physical parameters, reduced state and the 4x4 generator of the driven lambda system.

Units throughout: time in ns, rates in 1/ns, Rabi frequency in rad/ns (printed
as GHz). The reduced state is always ordered (rho00, rhoB, rho11, rho22).
Resonant drive only; there is no detuning parameter.
"""

from dataclasses import dataclass, fields, replace
import math

import numpy as np

from errors import InvalidParameterError

STATE_ORDER = ('rho00', 'rhoB', 'rho11', 'rho22')
POPULATION_INDICES = (0, 2, 3)

# Left null vector of every generator: d/dt (rho00 + rho11 + rho22) = 0.
CONSERVATION_ROW = np.array([1.0, 0.0, 1.0, 1.0])


@dataclass(frozen=True)
class SystemParams:
    """Relaxation times, rates and drive strength of the lambda system."""

    t1: float
    t2: float
    k21: float
    k02: float
    omega: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidParameterError(f.name, f"not a number: {value!r}")
            if not math.isfinite(value):
                raise InvalidParameterError(f.name, 'must be finite')
            object.__setattr__(self, f.name, value)

        if self.t1 <= 0:
            raise InvalidParameterError('t1', f"must be > 0, got {self.t1:g}")
        if self.t2 <= 0:
            raise InvalidParameterError('t2', f"must be > 0, got {self.t2:g}")
        if self.k21 < 0:
            raise InvalidParameterError('k21', f"must be >= 0, got {self.k21:g}")
        if self.k02 <= 0:
            raise InvalidParameterError('k02', f"must be > 0, got {self.k02:g}")
        if self.omega < 0:
            raise InvalidParameterError('omega', f"must be >= 0, got {self.omega:g}")

    @property
    def k01(self):
        """Level 1 -> 0 relaxation rate, always 1/t1."""
        return 1.0 / self.t1

    @property
    def level1_loss_rate(self):
        """Total relaxation rate out of level 1 (1/t1 + k21)."""
        return 1.0 / self.t1 + self.k21

    def with_omega(self, omega):
        """Return a copy driven at a different Rabi frequency."""
        return replace(self, omega=omega)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class DensityVector:
    """Reduced state (rho00, rhoB, rho11, rho22) at one instant."""

    rho00: float
    rhoB: float
    rho11: float
    rho22: float

    def __post_init__(self):
        for name in STATE_ORDER:
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_array(cls, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (4,):
            raise ValueError(f"expected 4 components, got shape {values.shape}")
        return cls(*values)

    def as_array(self):
        return np.array([self.rho00, self.rhoB, self.rho11, self.rho22])

    def as_dict(self):
        return {name: getattr(self, name) for name in STATE_ORDER}

    def __getitem__(self, name):
        if name not in STATE_ORDER:
            raise KeyError(name)
        return getattr(self, name)

    @property
    def population_sum(self):
        return self.rho00 + self.rho11 + self.rho22


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """The real 4x4 matrix L with dx/dt = L x for x = (rho00, rhoB, rho11, rho22)."""

    entries: np.ndarray
    params: SystemParams = None

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.shape != (4, 4):
            raise ValueError(f"generator must be 4x4, got shape {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def trace(self):
        return float(np.trace(self.entries))

    @property
    def omega(self):
        return self.params.omega if self.params is not None else float('nan')

    def __matmul__(self, other):
        return self.entries @ other


def rabi_frequency(e_field, dipole, hbar):
    """
    Rabi frequency of the 0 <-> 1 drive.

    Args:
        e_field: Magnitude of the laser's electric field
        dipole: Transition dipole moment between levels 0 and 1
        hbar: Reduced Planck constant in the same unit system

    Returns:
        E * mu / hbar; this is rad/ns when the inputs are chosen consistently
    """
    for name, value in (('e_field', e_field), ('dipole', dipole), ('hbar', hbar)):
        if not value > 0:
            raise InvalidParameterError(name, f"must be > 0, got {value!r}")
    return e_field * dipole / hbar


def default_params(omega=0.0):
    """Reference parameter set; the caller supplies the drive strength."""
    return SystemParams(t1=0.0923333, t2=0.132, k21=1.0, k02=0.1, omega=omega)


def drive_matrix():
    """Constant D such that L(omega) = L(0) + omega * D."""
    return np.array([
        [0.0, -1.0, 0.0, 0.0],
        [0.5, 0.0, -0.5, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ])


def build_generator(params):
    """
    Assemble the generator of the reduced equations of motion.

    Args:
        params: SystemParams

    Returns:
        GeneratorMatrix in (rho00, rhoB, rho11, rho22) order
    """
    a = params.k01
    relaxation = np.array([
        [0.0, 0.0, a, params.k02],
        [0.0, -1.0 / params.t2, 0.0, 0.0],
        [0.0, 0.0, -a - params.k21, 0.0],
        [0.0, 0.0, params.k21, -params.k02],
    ])
    return GeneratorMatrix(relaxation + params.omega * drive_matrix(), params)
