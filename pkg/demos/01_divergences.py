"""
Divergences between Poisson population responses
=================================================

Every closed-form metric in ``popinfo`` is built from a matrix of pairwise
divergences between the response distributions of a population of
independent Poisson neurons.  This demo computes them for a small pair of
stimuli and checks them against direct summation over response vectors.
"""

import math

import numpy as np
from scipy import stats

from popinfo import population_from_rates
from popinfo.divergence import (
    bhattacharyya_matrix,
    chernoff_coefficient_matrix,
    chernoff_information,
    hellinger_sq,
    kl_matrix,
)

# Two stimuli, three neurons.  Column m holds the mean spike counts under
# stimulus m; the middle neuron is silent under the first stimulus.
rates = np.array([[2.0, 6.0], [0.0, 3.0], [4.0, 1.0]])
pop = population_from_rates(rates, [0.5, 0.5])

###############################################################################
# KL divergence has a closed form per neuron: ``a ln(a/b) + b - a``.
# A neuron that fires under x_1 but is silent under x_2 makes D(1||2) infinite.

D = kl_matrix(pop).values
print("KL matrix (nats):\n", D)

###############################################################################
# The scaled Renyi exponent ``beta * D_beta`` stays finite and gives the lower
# bounds; at beta = 1/2 it is the Bhattacharyya distance.

for beta in (0.25, 0.5, 0.75):
    print(f"beta={beta}: beta*D_beta(1||2) = {chernoff_coefficient_matrix(pop, beta).values[0, 1]:.6f}")
B = bhattacharyya_matrix(pop).values[0, 1]
print(f"Bhattacharyya distance {B:.6f}, Hellinger^2 {hellinger_sq(pop, 0, 1):.6f}")

###############################################################################
# The Chernoff information maximizes the exponent over beta.

result = chernoff_information(pop, 0, 1)
print(f"Chernoff information {result.value:.6f} at beta={result.beta:.6f}")

###############################################################################
# Brute-force check: sum over the product support of the response space.

support = [np.arange(40)] * 3
grid = np.stack(np.meshgrid(*support, indexing="ij"), axis=-1).reshape(-1, 3)
logp = stats.poisson.logpmf(grid, rates[:, 0]).sum(axis=1)
logq = stats.poisson.logpmf(grid, rates[:, 1]).sum(axis=1)
# responses where the silent neuron fires have p = 0 and drop out
finite = np.isfinite(logp)
kl12 = math.fsum(np.exp(logp[finite]) * (logp[finite] - logq[finite]))
bhat = -math.log(math.fsum(np.exp(0.5 * (logp + logq))))
print(f"D(1||2): closed form {D[0, 1]:.12f}, summation {kl12:.12f}")
print(f"Bhattacharyya: closed form {B:.12f}, summation {bhat:.12f}")
