# Estimating sum_h |v1h - v2h|^p from coordinated samples.
#
# Each key gets one hashed seed u shared by both rows; an entry is sampled
# when its value is at least u.  A key where only the larger entry is seen
# is a one-datum estimation problem, and alpha-L* solves it unbiasedly.

import numpy as np

from mepcomp.coordsim import KeyedDataset, coordinated_sample, empirical_bias, estimate_lpp

rng = np.random.default_rng(3)
keys = [f"user{i}" for i in range(200)]
ds = KeyedDataset(keys, rng.beta(2, 5, 200), rng.beta(2, 5, 200))

recs = coordinated_sample(ds, salt=1)
both = sum(all(r.included) for r in recs)
one = sum(r.included[0] != r.included[1] for r in recs)
print(f"{both} keys fully seen, {one} with one entry, {len(recs) - both - one} unseen")

for p in (1.0, 2.0):
    truth = float(np.sum(np.abs(ds.v1 - ds.v2) ** p))
    print(f"\np={p:g}: truth {truth:.4f}, one sample (salt 1) {estimate_lpp(ds, 1, p, 1.0):.4f}")
    for a in (1.0, 1.5, 2.0):
        rep = empirical_bias(ds, p, a, 2000, 0)
        print(f"  alpha={a}: mean {rep.mean:.4f} +/- {rep.stderr:.4f}")
