"""Simulator for an all-optical switch and memory built from a toroidal
microresonator with a cross two-photon-absorbing vapor."""

from .model import (CONST, ConfigError, LossModel, ParameterBundle,
                    PhysConstants, ResonatorParams, ValidationError,
                    VaporParams, default_bundle, dump_config, load_config,
                    validate)
from .quasistatic import (OutputPowers, SteadySolution, find_symmetric_solution,
                          intracavity_response, output_fields, response_curve,
                          solve_fixed_point)
from .dynamics import (CavityState, DriveSignal, Segment, TimeSeries,
                       memory_sequence, simulate, step, switching_times)
from .rubidium import (FluxQuantities, RateResult, density_from_temperature,
                       effective_alpha, scaled_rates, self_tpa_ratio,
                       single_atom_1pa_rate, single_atom_tpa_rate,
                       temperature_for_density, vapor_pressure)
from .performance import (PerfReport, balance_power, critical_coupling,
                          enhancement_factor, gamma_from_Q, perf_report,
                          switch_quality)

__version__ = "0.1.0"
