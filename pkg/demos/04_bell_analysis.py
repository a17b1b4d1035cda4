"""From fringe visibility to a CHSH value.

The visibility heuristic says S = 2 sqrt(2) V, so V above 1/sqrt(2) violates
the classical bound. Under the partial-coherence model the state itself gives
S = sqrt(2) (1 + gamma) at the standard angles, a different number.
"""
# %%
import math

import numpy as np

from condpattern.bell import BellSettings, chsh_from_state, chsh_from_visibility, correlation_E
from condpattern.config import RunConfig
from condpattern.coincidence import scan_waveplate
from condpattern.fitting import FitModel, fit, visibility_from_fit

R = math.sqrt(0.5)

# %% A waveplate scan at the reference point, fitted with a cosine.
cfg = RunConfig(gamma=0.75)
thetas = np.linspace(0, math.pi, 91)
scan = scan_waveplate(cfg.layout, cfg.state(), 6.3, thetas, 4000.0, noise=True, seed=2, gamma=cfg.gamma)
model = FitModel("fringe")
res = fit(model, scan)
v = visibility_from_fit(res, model)
s_vis, violated = chsh_from_visibility(v)
print(f"fitted visibility {v:.3f}, S from visibility {s_vis:.3f}, violated: {violated}")
print(f"S from the state at gamma = {cfg.gamma}: {chsh_from_state(R, R, 0.0, cfg.gamma):.3f}")

# %% The two estimators cross at gamma = 1.
for gamma in np.linspace(0, 1, 6):
    print(f"gamma {gamma:.1f}:  2 sqrt2 gamma = {chsh_from_visibility(gamma)[0]:.3f}"
          f"   state = {chsh_from_state(R, R, 0.0, gamma):.3f}")

# %% Random analyzer angles never beat the quantum bound.
rng = np.random.default_rng(3)
best = max(abs(chsh_from_state(R, R, 0.0, 1.0, BellSettings(*rng.uniform(0, math.pi, 4)))) for _ in range(5000))
print(f"best of 5000 random settings: {best:.4f} (bound {2 * math.sqrt(2):.4f})")
print("E(pi/8, pi/8) at gamma 0.75:", correlation_E(R, R, 0.0, 0.75, math.pi / 8, math.pi / 8))
