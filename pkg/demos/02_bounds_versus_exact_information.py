"""
Bounds and approximations against exact mutual information
============================================================

For a population of at most three neurons the mutual information between a
discrete stimulus and the spike-count vector can be computed exactly by
enumerating the (truncated) response space.  Here we place the closed-form
quantities around it:

    I_beta_alpha  <=  I  <=  I_u,      and  I_e  as an approximation.
"""

import numpy as np

from popinfo import population_from_rates
from popinfo.divergence import chernoff_coefficient_matrix, kl_matrix
from popinfo.metrics import i_beta_alpha, i_d, i_e, i_u, neighbor_sets
from popinfo.montecarlo import exact_mi
from popinfo.stimulus import entropy

rng = np.random.default_rng(3)
rates = rng.uniform(0, 5, size=(3, 5))
prior = rng.dirichlet(np.ones(5))
pop = population_from_rates(rates, prior)

D = kl_matrix(pop)
exact = exact_mi(pop)
print(f"H(X)            = {entropy(prior):.6f} nats")
print(f"I_u   (upper)   = {i_u(D, prior):.6f}")
print(f"I     (exact)   = {exact.value:.6f}   (neglected tail mass {exact.tail_bound:.1e})")
print(f"I_e             = {i_e(D, prior):.6f}")
print(f"I_d             = {i_d(D, neighbor_sets(D), prior):.6f}")

###############################################################################
# The lower bound holds for every beta in (0, 1) and every alpha > 0.

for beta in (0.25, 0.5, 0.75):
    C = chernoff_coefficient_matrix(pop, beta)
    row = "  ".join(f"alpha={a}: {i_beta_alpha(C, prior, a):.6f}" for a in (0.5, 1.0, 2.0))
    print(f"I_beta_alpha beta={beta}:  {row}")
