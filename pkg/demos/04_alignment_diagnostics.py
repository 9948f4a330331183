"""Compare replicate-specific and fixed orthogonal alignments.

Embeddings of two graphs are only comparable up to an orthogonal
transformation. The statistic computed from embedded positions tracks the
true-position statistic aligned by the realized second-moment rotations
(one per replicate) more closely than the one aligned by the fixed
population-level rotation; the gap is what makes the limiting law of the
embedded statistic hard to characterize, and why calibration here is by
permutation instead.
"""

import numpy as np

from rdpgtest import GaussianKernel, PointMassMixture, w_comparison_experiment

mixture = PointMassMixture([[0.7, 0.1], [0.1, 0.7]], [0.45, 0.55])
result = w_comparison_experiment(
    mixture, mixture, n=300, d=2, spec=GaussianKernel(0.5),
    replicates=60, master_seed=4,
)

for name, deltas in (("replicate-specific", result.delta_random),
                     ("fixed population", result.delta_fixed)):
    print(f"{name} alignment: median |difference| "
          f"{np.median(np.abs(deltas)):.3f}, 90th pct {np.percentile(np.abs(deltas), 90):.3f}")

result.to_csv("alignment_demo.csv")
print("\npaired differences written to alignment_demo.csv (histogram-ready)")
