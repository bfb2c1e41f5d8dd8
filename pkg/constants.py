"""
Physical constants and default parameters for the NOMA Semi-ISaC analysis.
"""

import numpy as np

# Physical constants
k_B = 1.380649e-23  # Boltzmann constant (J/K)
c_light = 3.0e8  # Speed of light (m/s), fixed value used by the path-loss intercepts
euler_gamma = 0.5772156649015329  # Euler-Mascheroni constant C_γ

# Spectral-shape factor of a flat spectrum: γ² = (2π)²/12
gamma_sq = (2.0 * np.pi) ** 2 / 12.0

# Reference distance of both path-loss laws (m)
d_reference = 1.0

# Default deployment
d_c_default = 800.0  # Near communication transmitter distance (m)
d_r_default = 1300.0  # Far radar target distance (m)
bandwidth_default = 10e6  # Total bandwidth B (Hz)
t_temp_default = 724.0  # Noise temperature (K)
gamma_th_default = 1.0  # Transmission SINR threshold
gamma_sic_default = 0.4  # SIC SINR threshold
f_c_default = 1e9  # Carrier frequency (Hz)
sigma_rcs_default = 0.1  # Radar cross section (m^2)
t_pulse_default = 1e-6  # Pulse duration T (s)
alpha_r_default = 4.5  # Radar path-loss exponent
alpha_c_default = 2.5  # Communication path-loss exponent
delta_duty_default = 0.01  # Radar duty factor δ
m_default = 3.0  # Nakagami-m shape

# Values the deployment description leaves open
# σ_τ = 10 ns is roughly 3 m of range uncertainty for a vehicle target
sigma_tau_default = 10e-9  # Time-delay fluctuation std dev (s)
beta_semi_default = 0.5  # Fraction of B shared by radar and communication
g_c_default = 1.0  # Communication link gain
g_r_default = 1.0  # Radar round-trip gain

# Transmit SNRs ρ = P/σ² (dB)
# Communication links lose ~105-110 dB and the radar round trip ~208 dB at the
# default geometry, so the operating points sit well above 100 dB.
rho_c_db_default = 130.0
rho_r_db_default = 120.0
rho_bs_db_default = 200.0

# Quadrature defaults (scipy.integrate.quad)
quad_rel_tol = 1e-9
quad_abs_tol = 1e-12
quad_max_subdivisions = 200

# Truncation order of the E_n series approximation
en_series_terms = 30

# Above this argument e^z E_n(z) switches from the direct product to the
# asymptotic series (exp overflows near z = 709)
scaled_en_switch = 500.0
scaled_en_asymptotic_terms = 12

# Closed-form probabilities may leave [0, 1] by this much before it is an error
probability_slack = 1e-9

# Monte Carlo defaults
mc_trials_default = 100_000
mc_seed_default = 20220527
mc_block_trials = 65_536  # Trials per random block; results do not depend on worker count
ci_z95 = 1.959963984540054  # Two-sided 95% normal quantile

# Environment variable overriding the worker count
workers_env_var = "SEMI_ISAC_WORKERS"

# Figure presets (transmit SNR grids in dB)
fig1_rho_c_db = np.arange(110.0, 150.0 + 1e-9, 5.0)
fig2_rho_bs_db = np.arange(160.0, 240.0 + 1e-9, 10.0)
fig2_d_r_values = [800.0, 1300.0]
fig3_rho_bs_db = np.arange(180.0, 260.0 + 1e-9, 10.0)
fig3_duty_pulse_pairs = [(0.02, 1e-6), (0.01, 1e-6), (0.01, 2e-6)]

# Agreement thresholds used by the selftest suite
closed_vs_integral_rtol = 1e-8
mc_sigma_band = 3.0
reir_mc_rtol = 0.01

# BS transmit-SNR offsets (dB above the configured ρ_BS) of the diversity-slope grid
diversity_offsets_db = np.arange(0.0, 60.0 + 1e-9, 10.0)

# Default output directory of the command-line tools
output_dir_default = "outputs"
