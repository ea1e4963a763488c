# The alpha-L* family on a random instance, against its guarantees.
#
# alpha = 1 is L*.  Larger alpha pulls estimates toward small seeds; alpha = 1.5
# minimizes the universal bound 4 a^3 / (2a - 1)^2.

import numpy as np

from mepcomp import build_instance, universal_upper, worstcase_lower
from mepcomp.bounds import convex_bound, optimal_alpha
from mepcomp.estimators import alpha_l_family, alpha_l_truncated, max_ratio
from mepcomp.hull import opt_squares, ratio_value

rng = np.random.default_rng(7)
v = np.concatenate(([0.0], np.sort(rng.choice(np.arange(1, 50), 6, replace=False)) / 50, [1.0]))
f = np.round(rng.exponential(1, len(v)), 3)
inst = build_instance(v, f)
print("values:", inst.values)
print("f:     ", inst.f)

opts = opt_squares(inst)
print(f"\nbest alpha for the universal bound: {optimal_alpha():.4f}")
print(" alpha  max ratio  at v   universal  worst-case  convex")
for a in (1.0, 1.25, optimal_alpha(), 2.0, 3.0):
    r, j = max_ratio(inst, alpha_l_family(inst, a), opts)
    print(f"{a:6.3f}  {r:9.4f}  {inst.values[j]:4.2f}  {universal_upper(a):9.4f}  "
          f"{worstcase_lower(a):10.4f}  {convex_bound(a):6.4f}")

# The truncated variant keeps every estimate inside the admissible range.  It
# usually helps, but not for every datum.

print("\nper-datum E[est^2]/OPT at alpha = 2, closed form vs truncated:")
fam = alpha_l_family(inst, 2.0)
for j, vj in enumerate(inst.values):
    full = ratio_value(fam(j).square(), opts[j])
    trunc = ratio_value(alpha_l_truncated(inst, j, 2.0).square_integral(), opts[j])
    print(f"v={vj:4.2f}: {full:7.4f}  {trunc:7.4f}")
