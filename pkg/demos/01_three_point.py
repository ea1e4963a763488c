# A three-point instance, end to end.
#
# Data v in {0, 0.5, 1} with f = 2, 1, 0.  A seed u is drawn uniformly from
# (0, 1] and v is revealed when u <= v; otherwise we only learn that v < u.

import numpy as np

from mepcomp import build_instance, lower_bound_fn, opt_square, v_optimal_estimator
from mepcomp.estimators import alpha_l_estimator
from mepcomp.optsearch import optimal_ratio

inst = build_instance([0, 0.5, 1], [2, 1, 0])
print("seed boundaries:", inst.boundaries)

# The lower-bound profile of each datum: what f could still be, given the outcome.

for j, v in enumerate(inst.values):
    prof = lower_bound_fn(inst, j)
    print(f"v={v:g}: pieces {prof.boundaries} values {prof.values}")

# The v-optimal estimator minimizes E[est^2] for one datum and sets the
# per-datum floor OPT(v) against which every other estimator is judged.

for j, v in enumerate(inst.values):
    est = v_optimal_estimator(inst, j)
    print(f"v={v:g}: OPT={opt_square(inst, j):.4f} estimate values {np.round(est.values, 4)}")

# L* (alpha = 1) is a single estimator for all data.  Its worst ratio here is 1.25.

for j, v in enumerate(inst.values):
    form = alpha_l_estimator(inst, j, 1.0)
    print(f"v={v:g}: E[L*^2]={form.square():.4f}")

# The instance-optimal ratio: no unbiased nonnegative estimator does better than 10/9.

res = optimal_ratio(inst, 1e-6)
print(f"c* = {res.c_star:.6f} (10/9 = {10 / 9:.6f})")
print("shared values y:", np.round(res.table.y, 6))
print("revealed values z:", np.round(res.table.z, 6))
print("per-datum ratios:", np.round(res.ratios, 6))
