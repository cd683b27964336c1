#!/usr/bin/env python3
"""
Data models for selfsim profiles, traces and reports
"""
# pylint: disable=too-many-instance-attributes,invalid-name
import sys
import math
from dataclasses import dataclass, field
from typing import Optional, Callable
import numpy as np

# Dataclass configuration for Python 3.10+ slots support
_dataclass_kwargs = {'slots': True} if sys.version_info >= (3, 10) else {}

RHO_CHART = 'RhoChart'
LOG_CHART = 'LogChart'

COMPLETED = 'Completed'
BLOWUP_GUARD = 'BlowupGuard'
STEP_UNDERFLOW = 'StepUnderflow'

W_SIGN = 'WSignChange'
U_SIGN = 'USignChange'
DU_SIGN = 'DerivativeSignChange'
GUARD = 'Guard'

BLOWUP = 'Blowup'
GLOBAL_ALPHA = 'GlobalAlpha'
GLOBAL_ALPHA_PLUS_ONE = 'GlobalAlphaPlusOne'
INCONCLUSIVE = 'Inconclusive'


@dataclass(**_dataclass_kwargs)
class State:
    """ A point (rho, u, u') of a profile in the rho chart """
    rho: float
    u: float
    du: float


@dataclass(**_dataclass_kwargs)
class LogState:
    """ A point (s, z, dz/ds) in the exterior chart s = log(rho) """
    s: float
    z: float
    dz: float


@dataclass(**_dataclass_kwargs)
class Diagnostics:
    """ Lyapunov values and the scaled variables at one state """
    H: float
    Hv: float
    v: float
    w: float


@dataclass(**_dataclass_kwargs)
class Event:
    """ A sign change located inside one accepted integrator step """
    kind: str
    location: float
    value_before: float
    value_after: float


@dataclass(**_dataclass_kwargs)
class Trajectory:
    """
    Accepted integrator samples in one chart.

    For the log chart x is s, u holds z and du holds dz/ds; use rho/u_rho/du_rho
    for the rho-chart view. dense, when present, maps x (scalar or array) to a
    (2, n) array of (u, du) in the trajectory's own chart.
    """
    chart: str
    x: np.ndarray
    u: np.ndarray
    du: np.ndarray
    events: list = field(default_factory=list)
    status: str = COMPLETED
    status_at: float = math.nan
    dense: Optional[Callable] = None

    def __len__(self):
        return len(self.x)

    @property
    def rho(self):
        """ Sample radii """
        return np.exp(self.x) if self.chart == LOG_CHART else self.x

    @property
    def du_rho(self):
        """ Sample u' in the rho chart """
        return self.du / self.rho if self.chart == LOG_CHART else self.du

    @property
    def span(self):
        """ (min, max) of the independent variable """
        if not len(self.x):
            return (math.nan, math.nan)
        return (float(np.min(self.x)), float(np.max(self.x)))

    def states(self):
        """ Samples as State or LogState records """
        if self.chart == LOG_CHART:
            return [LogState(float(s), float(z), float(dz))
                    for s, z, dz in zip(self.x, self.u, self.du)]
        return [State(float(r), float(u), float(du))
                for r, u, du in zip(self.x, self.u, self.du)]

    def rho_at(self, rho):
        """ (u, u') at radius rho via dense output (rho-chart values) """
        if self.dense is None:
            raise ValueError('trajectory has no dense output')
        if self.chart == LOG_CHART:
            y = self.dense(np.log(rho))
            return y[0], y[1] / rho
        y = self.dense(rho)
        return y[0], y[1]


@dataclass(**_dataclass_kwargs)
class PrueferTrace:
    """
    Lifted angle Theta(rho) of (w, rho w') and amplitude R along a trajectory.

    rho is increasing. angle_fn, when present, returns the unlifted
    atan2 angle at arbitrary rho from the trajectory's dense output.
    """
    rho: np.ndarray
    theta: np.ndarray
    R: np.ndarray
    zero_count: int
    branch_origin: float
    angle_fn: Optional[Callable] = None

    @property
    def span(self):
        """ (first rho, last rho) """
        return (float(self.rho[0]), float(self.rho[-1]))


@dataclass(**_dataclass_kwargs)
class BoundarySeed:
    """ Which family to seed near a singular point, and how far off it """
    family: str        # 'OriginC' | 'OneSubcritical' | 'OneCritical'
    value: float       # c, b or a
    offset: float
    direction: str     # 'TowardOne' | 'TowardZero' | 'TowardInfinity'


@dataclass(**_dataclass_kwargs)
class SolverOptions:
    """ Numerical knobs shared by the probes; defaults suit desk runs """
    delta0: float = 1e-4
    delta1: float = 1e-5
    delta_min: float = 1e-8
    u_max: float = 1e8
    blowup_u_max: float = 1e4
    method: str = 'DOP853'
    grid_per_decade: int = 64
    mismatch_tol: float = 1e-8
    origin_trust: float = 1e-3


@dataclass(**_dataclass_kwargs)
class LeftProbe:
    """ Left family u(., c) evaluated at the match radius """
    c: float
    state: State
    trace: PrueferTrace
    u_at_one: float
    du_near_one: float
    zero_count: int
    traj: Trajectory


@dataclass(**_dataclass_kwargs)
class RightProbe:
    """ Right family U(., b) or U(., a) integrated back to the match radius """
    right_param: float
    state: State
    trace: PrueferTrace
    traj: Trajectory


@dataclass(**_dataclass_kwargs)
class ShootResult:
    """ A located regular profile on [0, 1] """
    regime: str
    n_index: int
    zero_count: int
    c: float
    right_param: float
    u_at_one: float
    mismatch_norm: float
    rho0: float
    tol: float = math.nan
    grid_per_decade: int = 0
    c_lo: float = math.nan
    c_hi: float = math.nan
    other_roots: list = field(default_factory=list)


@dataclass(**_dataclass_kwargs)
class ScanRow:
    """ One row of a c-scan """
    c: float
    u1: float
    zeros: int
    theta: float
    hv_floor: float
    ok: bool = True
    error: str = ''


@dataclass(**_dataclass_kwargs)
class AssembledProfile:
    """
    Left and right pieces stitched at rho0, with their certificates.
    The left piece runs from the origin offset to 1-delta1; only rho <= rho0
    of it belongs to the profile.
    """
    left: Trajectory
    right: Trajectory
    rho0: float
    jump_u: float
    jump_du: float
    max_residual: float
    zero_count: int
    left_trace: Optional[PrueferTrace] = None
    right_trace: Optional[PrueferTrace] = None


@dataclass(**_dataclass_kwargs)
class AsymptoticsReport:
    """ Exterior classification of a right-family profile """
    classification: str
    L: float = math.nan
    rho_plus_estimate: float = math.nan
    fit_window: tuple = (math.nan, math.nan)
    fit_residual: float = math.nan
    secondary_check: float = math.nan
    note: str = ''


@dataclass(**_dataclass_kwargs)
class BarrierData:
    """ Barrier quantities evaluated at one radius """
    B_tilde: float
    beta: float
    rho_NP: float
    T_value: float
    slope: float


@dataclass(**_dataclass_kwargs)
class ThresholdBracket:
    """ Observed Blowup/Global boundary in the right parameter """
    lo: float
    hi: float
    class_lo: str
    class_hi: str
    iterations: int


@dataclass(**_dataclass_kwargs)
class FrameReport:
    """ Monotonicity of V = U/u_inf over exterior samples """
    increasing: bool
    decreasing: bool
    above_one: bool
    below_one: bool
    v_first: float
    v_last: float


@dataclass(**_dataclass_kwargs)
class GroundStateTrace:
    """ Ground state Q on a log mesh with V = r^alpha Q/b_inf and energy E """
    r: np.ndarray
    Q: np.ndarray
    dQ: np.ndarray
    V: np.ndarray
    E: np.ndarray
    r_max: float
    dense: Optional[Callable] = None


@dataclass(**_dataclass_kwargs)
class OracleResult:
    """ Fixed-step reference value with its step-halving error estimate """
    value: State
    error_estimate: float


@dataclass(**_dataclass_kwargs)
class CheckResult:
    """ One verification check """
    name: str
    value: float
    limit: float
    passed: bool
    detail: str = ''


@dataclass(**_dataclass_kwargs)
class RunConfig:
    """ Everything a CLI run needs beyond the subcommand arguments """
    N: int
    p: float
    tol: float = 1e-10
    rho0: float = 0.9
    delta0: float = 1e-4
    delta1: float = 1e-5
    s_max: float = 25.0
    output_format: str = 'csv'
    output_path: str = '.'
    grid_per_decade: int = 64
    u_max: float = 1e8
    blowup_u_max: float = 1e4
    method: str = 'DOP853'
    jobs: int = 1
    keep_backup: bool = False
    shoot_tol: float = 1e-8

    def solver_options(self):
        """ The SolverOptions slice of this config """
        return SolverOptions(delta0=self.delta0, delta1=self.delta1,
                             u_max=self.u_max, blowup_u_max=self.blowup_u_max,
                             method=self.method,
                             grid_per_decade=self.grid_per_decade,
                             mismatch_tol=self.shoot_tol)


@dataclass(**_dataclass_kwargs)
class ProfileFile:
    """ Parsed profile CSV: '#' header metadata plus named columns """
    meta: dict
    columns: dict

    def column(self, name):
        """ Column as a float array (blank cells are NaN) """
        return self.columns[name]
