# Continuous power families and their discretizations.
#
# For f(v) = 1 - v^p the v = 0 ratio of alpha-L* has a closed form.  Discrete
# instances on i/n converge to it, slowly when p is near 1/2.

from mepcomp import family_instance, opt_square, power_alphal_ratio, worstcase_lower
from mepcomp.estimators import alpha_l_estimator

for p in (0.6, 0.75, 1.0):
    print(f"p={p}")
    for a in (1.0, 1.5, 2.0):
        row = [f"  alpha={a}: limit {power_alphal_ratio(a, p):.4f}"]
        for n in (250, 1000, 4000):
            inst = family_instance("one_minus_pow", p, n)
            row.append(f"n={n}: {alpha_l_estimator(inst, 0, a).square() / opt_square(inst, 0):.4f}")
        print("  ".join(row))

# As p falls to 1/2 the limit approaches the worst case 4 a^2 / (2a - 1)^2.

for a in (1.0, 1.5, 2.0):
    print(f"alpha={a}: p=0.51 limit {power_alphal_ratio(a, 0.51):.4f}, worst case {worstcase_lower(a):.4f}")
