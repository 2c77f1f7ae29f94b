"""Sobolev-Gevrey analysis toolkit for periodic Navier-Stokes.

Spectral fields on the torus, Sobolev-Gevrey norms, executable functional
inequalities, a mild-formulation solver with smallness certificates, and
blow-up diagnostics (horizons, explicit constants, envelope fits).
"""

from .blowup import (GRONWALL_C, EnvelopeParams, HorizonReport, c_a_sigma, energy_ledger,
                     energy_residuals, envelope, envelope_constants, fit_profile, h_function,
                     horizon, horizon_consistency, infimum_B,
                     trajectory_consistency)
from .inequalities import InequalityVerdict, run_suite
from .mild import (K_DEFAULT, Certificate, PicardTrace, Trajectory, WindowPolicy, continue_until,
                   duhamel_bilinear, picard_solve, smallness_certificate, timestep_integrate)
from .norms import NormReport, norm, norm_report
from .params import GevreyParams
from .spectral import (NumericalFailure, bilinear_term, convolve_oracle, leray_project, make_grid,
                       nonlinear_term, product, random_divergence_free_field, taylor_green,
                       to_physical, to_spectral)

__version__ = "0.1.0"
