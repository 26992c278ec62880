"""Parametric subharmonic instability of internal gravity waves."""
from .wavefield import (FloquetPoint, Mode, PrimaryWave, d_coeff, eigvec_coeff, omega,
                        phase_speed, symplectic_pair, w_freq)
from .resonance import (Branch, GapReport, ResonantPoint, gap_alpha, kink_expansion,
                        param_mu_large, param_mu_small, residual_F, solve_branch)
from .bloch import TruncatedOperator, apply, assemble, band_project, l0_block, l1_block
from .entanglement import (Coefficient, EntCoefficient, Kind, closed_form, ent_coeff_bruteforce,
                           jet_action, residue_coeff)
from .reduced import (InstabilityPrediction, ReducedMatrix, b_coeffs, beta_gamma_combos, e_mu,
                      iota0, lambda_pm, physics_I, reduced_matrix, w_underline)
from .spectral import (GrowthFit, SpectrumReport, convergence_study, eig_all, growth_sim,
                       unstable_pair)

__version__ = "0.1.0"
