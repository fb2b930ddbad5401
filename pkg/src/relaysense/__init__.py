"""Green cognitive relaying: closed forms, Monte Carlo checks, and the
sensing-time optimiser for an RF-harvesting AF relay network."""

from .fading import (LinkSet, PrimaryModel, active_count_pmf, hypoexp_cdf,
                     hypoexp_pdf, max_exp_expectation, max_exp_pdf,
                     mean_channel_gain)
from .sensing import (ReportGain, SecondaryPolicy, avg_clipped_gain,
                      build_report_gain, detection_probability,
                      fixed_gain_report, report_e2e_cdf, report_power,
                      solve_saturation_gain)
from .harvest import HarvestReport, avg_harvested_power
from .transmission import (CsiModel, TransCoeffs, build_trans_coeffs,
                           outage_probability, relay_selection_prob,
                           rho_from_doppler, trans_e2e_cdf, trans_powers)
from .energy_opt import (EnergyBreakdown, EnergyModel, FrameTiming,
                         InfeasibleDataError, SensingOptimum, ecg,
                         energy_breakdown, expected_data,
                         necessary_condition, optimize_sensing_time,
                         total_energy, total_energy_nonharvesting,
                         transformed_constraint)
from .mcsim import (MCEstimate, mc_clipped_gain, mc_detection, mc_ecg,
                    mc_frame_energy, mc_harvest, mc_outage)
from .scenario import Scenario, preset, scenario_from_conf

__version__ = "0.1.0"
