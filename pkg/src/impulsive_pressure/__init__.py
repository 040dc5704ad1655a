"""Topological pressure estimators for impulsive semiflows.

The package simulates impulsive dynamical systems (a flow, a finite jump set
and an impulse map), evaluates time-shift pseudometrics along their orbits and
estimates pressures from separated and spanning sets.
"""
from .dynmetrics import EquivalenceSample, MetricKind, PseudoMetricParams, d_bar, d_hat, dyn_dist, quotient_distance
from .errors import DomainError, ImpulsivePressureError, InvalidInputError, SpacingViolationError, UnsupportedSystemError
from .flows import OdeField, RotationCircle, SuspensionDoubling, TranslationInterval, evaluate, sample_orbit
from .geometry import CandidateGrid, Space, distance, regular_grid, section_grid
from .impulsive import ImpulsiveSystem, Region, classify_region, first_hitting_time, impulsive_trajectory, psi
from .kernels import BACKEND
from .potentials import (Constant, FourierCircle, Tabulated, check_jump_compatible, eval_potential,
                         probe_bounded_distortion)
from .pressure import (EstimatorKind, PressureEstimator, PressureTable, Schedule, birkhoff_integral,
                       build_separated, build_spanning, estimate_pressure, partition_function,
                       variational_oracle)
from .systems import get_system

__version__ = "0.1.0"
