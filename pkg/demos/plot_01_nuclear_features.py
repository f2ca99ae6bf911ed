"""
Nuclear features of a single trial
==================================

Walk one synthetic trial through normalization, the channel Gram matrix
and its spectrum, and check the two facts the features rest on: the
spectrum sums to ``n * d`` and the all-ones vector is a null direction.
"""

import numpy as np

from nucleeg import GeneratorConfig, generate_dataset, normalize, nuclear_matrix, singular_values

trials, manifest = generate_dataset(GeneratorConfig(trials_per_class=3, subjects=3, seed=1))
low_rank, high_rank = trials[0], trials[-1]
print(low_rank.trial_id, low_rank.label, low_rank.samples.shape)

# %%
# Normalize across channels: every time sample becomes zero-mean, unit
# (population) variance over the 16 electrodes.
phi = normalize(low_rank).phi
print("row sums ~ 0:", np.abs(phi.sum(axis=1)).max())
print("row energy = n:", (phi ** 2).sum(axis=1)[:3])

# %%
# The nuclear matrix is the 16 x 16 Gram matrix of the normalized channels.
N = nuclear_matrix(normalize(low_rank)).entries
print("trace:", np.trace(N), "= n * d =", 16 * 150)
print("|N @ 1|:", np.linalg.norm(N @ np.ones(16)))

# %%
# Class A trials come from 2 latent sources, class B from 8. The spectrum of
# class A concentrates in the first two values; class B spreads out.
np.set_printoptions(precision=1, suppress=True)
for t in (low_rank, high_rank):
    print(t.label, singular_values(nuclear_matrix(normalize(t))))

# %%
# The two largest values are the default nuclear features.
from nucleeg import extract_features  # noqa: E402

for t in trials:
    print(t.trial_id, t.label, extract_features(t, k=2).features)
