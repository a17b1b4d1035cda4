"""Where the conditional rate comes from.

A half-wave plate on the signal arm, then 45 degree analyzers on both arms.
We push the two-crystal state through the Jones matrices and compare with the
closed-form rate.
"""
# %%
import math

import numpy as np

from condpattern import polarization as pol
from condpattern.biphoton import (
    ANALYZER_45,
    apply_signal_hwp,
    coherent_rate,
    concurrence,
    make_two_crystal_state,
    project_analyzers,
)
from condpattern.coincidence import rate_eq2

# %% The waveplate swaps H and V at 45 degrees and flips V at 0.
print("HWP(0)  =\n", pol.hwp(0.0).array())
print("HWP(45) =\n", np.round(pol.hwp(math.pi / 4).array(), 12))

# %% A balanced state, one crystal per polarization.
state = make_two_crystal_state(math.sqrt(0.5), math.sqrt(0.5))
print("concurrence of the balanced state:", concurrence(math.sqrt(0.5), math.sqrt(0.5)))

for deg in (0, 22.5, 45):
    theta = math.radians(deg)
    c1, c2 = project_analyzers(apply_signal_hwp(state, theta), ANALYZER_45, ANALYZER_45)
    print(f"theta = {deg:5.1f} deg   crystal-1 amp {c1.real:+.4f}   crystal-2 amp {c2.real:+.4f}")

# %% The Jones route agrees with the closed form when the paths are fully coherent.
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(1000):
    mix, theta, phi = rng.uniform(0, math.pi / 2), rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
    a, b = math.cos(mix), math.sin(mix)
    worst = max(worst, abs(coherent_rate(a, b, theta, phi) - rate_eq2(a, b, theta, phi, 1.0)))
print(f"largest disagreement over 1000 random settings: {worst:.2e}")

# %% Partial coherence only scales the cross term.
theta = np.linspace(0, math.pi / 2, 7)
for gamma in (1.0, 0.5, 0.0):
    print(f"gamma={gamma:.1f}", np.round(rate_eq2(math.sqrt(0.5), math.sqrt(0.5), theta, 0.0, gamma), 4))
