"""
Singular value shrinkage baseline
=================================

Under homogeneous noise a low-rank network can be cleaned by shrinking
its singular values. Values below the noise edge ``2 sqrt(v) sigma`` are
dropped and the rest pulled towards their clean size.
"""

import numpy as np

from netwf.datagen import add_gaussian_noise, planted_lowrank
from netwf.evaluation import mse
from netwf.shrinker import optimal_shrink, shrink_singular_values

# The rule on its own, for v = 4 and unit noise (edge at 4).
print(shrink_singular_values(np.array([5.0, 4.0, 3.9]), v=4, sigma2=1.0))

# A planted rank-2 directed network of 60 nodes.
truth = planted_lowrank(60, [40.0, 25.0], seed=1)
inst = add_gaussian_noise(truth, sigma=1.0, seed=2)
den, report = optimal_shrink(inst.noisy, sigma2=1.0)

print("noise edge: %.2f" % (2 * np.sqrt(60)))
print("top singular values before:", np.round(report.original_singular_values[:4], 2))
print("after:                     ", np.round(report.shrunk_singular_values[:4], 2))
print("retained rank:", report.retained_rank)

off = ~np.eye(60, dtype=bool)
print("MSE noisy %.4f, shrunk %.4f" % (mse(inst.noisy.weights, truth.weights, off),
                                      mse(den.weights, truth.weights, off)))
