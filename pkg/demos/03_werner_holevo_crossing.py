"""The Werner-Holevo map on C^3 breaks multiplicativity for large p.

Feeding a maximally entangled state into WH(3) (x) WH(3) gives a lower bound
on nu_p of the product. Dividing by nu_p(WH)^2 gives a ratio that passes 1
just below p = 4.79, so nu_p is not multiplicative above that point.
"""

import numpy as np

from cpnorm import OptimizerConfig, bell_crossing, bell_crossing_bracket, sweep, werner_holevo

wh = werner_holevo(3)
cfg = OptimizerConfig(restarts=16)
grid = np.round(np.arange(4.0, 5.2001, 0.1), 10)
rows = sweep(wh, wh, grid, cfg, joint=False)
for r in rows:
    print(f"p = {r.p:.1f}  nu_p(WH) = {r.nu_A:.9f}  entangled-input ratio = {r.bell_ratio:.9f}")

lo, hi = bell_crossing_bracket(rows)
root = bell_crossing(wh, wh, lo, hi, cfg, xtol=1e-10)
print(f"ratio crosses 1 between p = {lo} and p = {hi}; root p = {root:.6f}")
