"""Independent reference values frozen into the C++ unit tests.

Run with `python3 tests/oracles/oracles.py`. Nothing here imports the C++
code; every value is evaluated straight from the model formulas.
"""

import math

import numpy as np


def header(name):
    print(f"\n# {name}")


def show(label, value):
    print(f"{label} = {value!r}")


# Pathloss, PL = A + B log10(d / 1 km).
header("pathloss")
show("sbs_user_40m_db", 140.7 + 36.7 * math.log10(0.040))
show("sbs_user_40m_gain", 10 ** (-(140.7 + 36.7 * math.log10(0.040)) / 10))
show("user_user_10m_db", 145.4 + 37.5 * math.log10(0.010))
show("sbs_sbs_100m_db", 169.36 + 41.1 * math.log10(0.100))
show("sbs_user_1m_db", 140.7 + 36.7 * math.log10(0.001))
show("sbs_user_40m_shadow3_gain", 10 ** (-(140.7 + 36.7 * math.log10(0.040) + 3.0) / 10))

# Receiver noise over 10 MHz with a 9 dB figure.
header("noise and bounds")
noise = 10 ** ((-174 + 9 + 10 * math.log10(10e6)) / 10) / 1e3
show("noise_w", noise)
r_max = 10e6 * 1e-3 * math.log2(1 + 10 ** 3.0)
show("r_max_bits", r_max)

# Two-cell instance: SBS0 runs FD (UL user 0, DL user 1), SBS1 runs DL NOMA
# over users 2 and 3.
header("two-cell sinr")
g_su = {(0, 0): 1e-9, (0, 1): 2e-10, (0, 2): 3e-12, (0, 3): 5e-13,
        (1, 0): 4e-12, (1, 1): 6e-13, (1, 2): 8e-10, (1, 3): 1.5e-10}
g_uu = {(0, 1): 1e-11, (0, 2): 2e-13, (0, 3): 3e-13, (1, 2): 4e-13, (1, 3): 5e-13,
        (2, 3): 7e-12}
g_bb = 2e-14
zeta = 1e11
p_ul0, p_dl1, p_dl2, p_dl3 = 0.08, 0.12, 0.05, 0.1
dl_sbs0 = p_dl1
dl_sbs1 = p_dl2 + p_dl3

sinr_ul0 = p_ul0 * g_su[0, 0] / (noise + dl_sbs1 * g_bb + dl_sbs0 / zeta)
sinr_dl1 = p_dl1 * g_su[0, 1] / (noise + p_ul0 * g_uu[0, 1] + dl_sbs1 * g_su[1, 1])
inter2 = p_ul0 * g_uu[0, 2] + dl_sbs0 * g_su[0, 2]
inter3 = p_ul0 * g_uu[0, 3] + dl_sbs0 * g_su[0, 3]
sinr_dl2 = p_dl2 * g_su[1, 2] / (noise + inter2)
sinr_dl3 = p_dl3 * g_su[1, 3] / (noise + inter3 + p_dl2 * g_su[1, 3])
show("sinr_ul0", sinr_ul0)
show("sinr_dl1", sinr_dl1)
show("sinr_dl2", sinr_dl2)
show("sinr_dl3", sinr_dl3)
decode = p_dl3 * g_su[1, 2] / (noise + inter2 + p_dl2 * g_su[1, 2])
show("sic_margin_3_by_2", decode - sinr_dl3)

# Estimated utility of a lone SBS with two UL NOMA users at the matching
# powers (delta_ul each), Q+H weights and Z terms given below.
header("matching utility")
cfg_bw, tau = 10e6, 1e-3
delta_ul = 0.05
g0, g1 = 3e-10, 5e-11
learned = 1e-13
w0, w1 = 4000.0 + 1000.0, 2500.0
z0, z1 = 0.02, 0.0
sinr0 = delta_ul * g0 / (noise + learned + delta_ul * g1)
sinr1 = delta_ul * g1 / (noise + learned)
psi0 = w0 * cfg_bw * tau * math.log2(1 + sinr0)
psi1 = w1 * cfg_bw * tau * math.log2(1 + sinr1)
show("psi_user0", psi0)
show("psi_user1", psi1)
show("omega_user0", z0 * (delta_ul - delta_ul))
show("utility_total", psi0 + psi1)

# Single-link power problem max c ln(1 + p s / N0) + Z (delta - p) on [0, P].
header("single-link optimum")
w, z, s, p_max, delta = 2e4, 1e10, 2e-10, 0.1, 0.05
c = w * cfg_bw * tau / math.log(2)
p_star = min(max(c / z - noise / s, 0.0), p_max)
show("p_star", p_star)
show("objective_star", c * math.log1p(p_star * s / noise) + z * (delta - p_star))

# Two mutually interfering UL links (two SBSs), grid oracle over [0, P]^2.
header("2x2 grid oracle")
h = np.array([[8e-10, 3e-11], [5e-11, 6e-10]])  # h[b][u]: SBS b, user u
wts = np.array([3e4, 2e4])
zs = np.array([5e9, 2e9])
cs = wts * cfg_bw * tau / math.log(2)
grid = np.linspace(0.0, p_max, 200)
P0, P1 = np.meshgrid(grid, grid, indexing="ij")
obj = (cs[0] * np.log1p(P0 * h[0, 0] / (noise + P1 * h[0, 1]))
       + cs[1] * np.log1p(P1 * h[1, 1] / (noise + P0 * h[1, 0]))
       + zs[0] * (delta - P0) + zs[1] * (delta - P1))
i, j = np.unravel_index(np.argmax(obj), obj.shape)
show("grid_best", float(obj[i, j]))
show("grid_argmax", (float(grid[i]), float(grid[j])))

# Arrival process mean: lambda / mu bits per second.
header("traffic")
show("mean_bits_per_subframe", 5 * 100e3 * 1e-3)
show("drift_constant_unit", 0.5 * (1 + 1 + 2 + 3 + 3) + 2)
