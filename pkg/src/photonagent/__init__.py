"""Seedable simulator of an optical learning agent.

An agent probes a single unknown optical element with shaped light
pulses (one-photon or weak coherent), learns the element's linewidth
and detuning by gradient descent on a sampled detector error rate, and
tracks the work, free energy, and heat exchanged while it learns.
Closed-form detection probabilities are validated against numerical
master-equation oracles.
"""

__version__ = "0.1.0"

from .detector import (DetectionModel, DetectorParams, error_prob, pg_classical,
                       pg_quantum, pg_time_dependent_quadrature, scaled_control,
                       thermal_floor)
from .errors import ConfigError, IntegrationError, ValidationError
from .fock_oracle import (CavityMEState, FockHierarchyState, check_block_invariants,
                          dump_trajectory, integrate_driven_cavity_me,
                          integrate_fock_hierarchy)
from .learner import (AgentConfig, GradientBackend, LearningRecord, ParamBounds,
                      WorldConfig, estimate_gradient, gd_step, normalize,
                      normalized_distance, run_learning, sample_error_rate)
from .modes import (ModeParams, Overlap, TemporalMode, make_exponential_mode,
                    overlap_exponential_closed_form, overlap_gradient_exponential,
                    overlap_quadrature)
from .source import (BathParams, ControlEnvelope, ground_population_source,
                     mean_output_field, output_flux, polarization, tau_source)
from .thermo import (JarzynskiEstimate, ThermoSummary, WorkSample,
                     absorption_probability, average_work, dissipated_heat,
                     free_energy_change, jarzynski_monte_carlo, scaled_summary,
                     thermo_summary)
