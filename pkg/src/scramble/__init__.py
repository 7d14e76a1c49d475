"""Exact simulation of information scrambling in kicked Ising chains.

State-vector dynamics for the periodically kicked transverse-field
Ising ring and its continuous-time limit, with subsystem entropies,
tripartite mutual information, late-time averages, and power-law fits
of the early growth.  Hot loops run in a compiled extension when it is
available; a pure-numpy fallback keeps results identical without it
(see `scramble.kernels.BACKEND`).
"""

from .dynamics import ModelParams, tfim_energy, tfim_propagate
from .errors import (CsvFormatError, FitWindowError,
                     NumericalConsistencyError, ResourceLimitError,
                     ScrambleError)
from .experiments import (ExperimentSpec, SweepResult, extract_minima,
                          presets, run_sweep, self_dual_report)
from .kernels import BACKEND
from .scrambling import (EntropyTable, FitResult, InitialState, Partition,
                         averaged_tmi, averaged_tmi_continuous,
                         entropy_table, fit_power_law, tmi_time_series,
                         tripartite_mi)
from .tau import EPS, SELF_DUAL, TauSpec, parse_tau

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CsvFormatError", "EPS", "EntropyTable", "ExperimentSpec",
    "FitResult", "FitWindowError", "InitialState", "ModelParams",
    "NumericalConsistencyError", "Partition", "ResourceLimitError",
    "SELF_DUAL", "ScrambleError", "SweepResult", "TauSpec", "averaged_tmi",
    "averaged_tmi_continuous", "entropy_table", "extract_minima",
    "fit_power_law", "parse_tau", "presets", "run_sweep",
    "self_dual_report", "tfim_energy", "tfim_propagate", "tmi_time_series",
    "tripartite_mi", "__version__",
]
