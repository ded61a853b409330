# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Tactile templates
#
# Two parts per whisk: a 125-bin histogram of pairwise contact geometry
# (normal-normal angle, normal-chord angle, relative distance) and the
# deflections divided by their maximum.

# %%
import math

import numpy as np

from vitaslam.config import Config
from vitaslam.simulator import Simulator
from vitaslam.tactile import (TactileTemplate, compute_pfh, estimate_normals, tactile_distance,
                              tactile_features)

# %% [markdown]
# ## The histogram ignores where the contacts are

# %%
rng = np.random.default_rng(0)
pts = rng.uniform(-0.2, 0.2, (12, 2))
nrm = estimate_normals(pts, head=(0.0, 0.5))
h = compute_pfh(pts, nrm)
a = 1.1
rot = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
print("bins used", np.count_nonzero(h), "| unchanged after rigid motion:",
      np.array_equal(h, compute_pfh(pts @ rot.T + (3.0, -1.0), nrm @ rot.T)))

# %% [markdown]
# ## Cylinder against cube
#
# Tighten the cube lap so the whiskers reach it, then compare the second
# cylinder lap with both earlier laps.

# %%
sim = Simulator(Config().replace(orbit2_radius=0.56), seed=42)
laps = {"orbit_1": [], "orbit_2": [], "orbit_1b": []}
for k, phase in enumerate(sim.script.phases):
    if phase in laps:
        f = sim.frame(k)
        if len(f.whisk.contacts_head) >= 2:
            laps[phase].append(TactileTemplate(k, *tactile_features(f.whisk, f.truth)))
print({k: len(v) for k, v in laps.items()})

# %%
print("cycle  cylinder  cube")
for t in laps["orbit_1b"]:
    d_cyl = min(tactile_distance(t, s) for s in laps["orbit_1"])
    d_cube = min(tactile_distance(t, s) for s in laps["orbit_2"])
    print(f"{t.id:>5}  {d_cyl:8.4f}  {d_cube:.4f}")
