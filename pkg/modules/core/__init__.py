"""
modules.core: engine for Gaussian-state intensity-moment witnesses.

Modules and their main entry points:
  config_manager  →  ConfigManager
  errors          →  WitnessToolError and subclasses (carry CLI exit codes)
  state           →  GaussianState, NormalCovariance, CoherentVector
  dynamics        →  ProcessParams, BogoliubovPair, shg_state, twin_state
  transforms      →  BeamSplitterParams, SymplecticMatrix, beam_splitter, apply
  jets            →  Jet2, jet_linear_solve, jet_det
  moments         →  MomentTable, moments_of, wick_moment
  witnesses       →  WitnessReport, witness_R, witness_M, shape_factor
  sweep           →  Scenario, Axis, SweepResult, grid_sweep, zero_contour
  pipeline        →  WitnessPipeline  (orchestrates the above for the CLI)
"""

from .config_manager import ConfigManager
from .errors import ConfigurationError, NoSignChangeError, NumericalError, WitnessToolError
from .state import CoherentVector, GaussianState, NormalCovariance, make_vacuum
from .dynamics import BogoliubovPair, ProcessParams, shg_state, twin_state
from .transforms import BeamSplitterParams, SymplecticMatrix, apply, beam_splitter
from .jets import Jet2
from .moments import MomentTable, moments_of, wick_moment
from .witnesses import WitnessReport, shape_factor, witness_M, witness_R
from .sweep import Axis, Scenario, SweepResult, grid_sweep, zero_contour
from .pipeline import WitnessPipeline

__all__ = [
    "ConfigManager",
    "ConfigurationError",
    "NoSignChangeError",
    "NumericalError",
    "WitnessToolError",
    "CoherentVector",
    "GaussianState",
    "NormalCovariance",
    "make_vacuum",
    "BogoliubovPair",
    "ProcessParams",
    "shg_state",
    "twin_state",
    "BeamSplitterParams",
    "SymplecticMatrix",
    "apply",
    "beam_splitter",
    "Jet2",
    "MomentTable",
    "moments_of",
    "wick_moment",
    "WitnessReport",
    "shape_factor",
    "witness_M",
    "witness_R",
    "Axis",
    "Scenario",
    "SweepResult",
    "grid_sweep",
    "zero_contour",
    "WitnessPipeline",
]
