"""
Continuous stimuli: Fisher-information asymptotics
==================================================

For a continuous stimulus the large-population information is approximated
by

    I_G = 1/2 E[ln det(G(x) / 2 pi e)] + H(X),   G = J + P,

with J the Fisher information and P the curvature of the log prior.  For a
linear-Gaussian channel this is exact, which makes it a handy sanity check.
"""

import math

import numpy as np

from popinfo.fisher import (
    GaussianBump,
    i_F,
    i_G,
    i_gamma,
    linear_gaussian_field,
    linear_gaussian_mi,
    poisson_1d_field,
)

for n in (1, 10, 100):
    field = linear_gaussian_field(sigma=1.0, noise_sd=0.5, num_obs=n)
    print(f"linear-Gaussian n={n:>3}: I_G={i_G(field):.8f}  exact={linear_gaussian_mi(1.0, 0.5, n):.8f}")

###############################################################################
# A population of Poisson neurons with Gaussian-bump tuning under a Gaussian
# prior.  I_F ignores the prior curvature and is therefore smaller; I_gamma at
# beta = 1/2 sits a fixed (1/2) ln(4/e) below I_G.

grid = np.linspace(-12, 12, 2401)
for N in (5, 20, 80):
    tunings = [GaussianBump(c, 1.5, 20.0, baseline=0.5) for c in np.linspace(-6, 6, N)]
    field = poisson_1d_field(tunings, grid, sigma=3.0)
    gap = i_G(field) - i_gamma(field, 0.5)
    print(f"N={N:>3}: I_G={i_G(field):.4f}  I_F={i_F(field):.4f}  I_G-I_gamma={gap:.6f} (= {0.5 * math.log(4 / math.e):.6f})")
