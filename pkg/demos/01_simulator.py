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
# # The simulated arena
#
# An 8 m x 5 m room with a bright cylinder and a dark cube. The robot carries
# a forward camera and 24 whiskers, and follows a fixed script: lap the
# cylinder, lap the cube, drive back underneath both, lap the cylinder again.

# %%
import math

import numpy as np

from vitaslam.config import Config
from vitaslam.geometry import transform_point
from vitaslam.simulator import Simulator, dead_reckon

cfg = Config()
sim = Simulator(cfg, seed=42)
print(len(sim), "cycles")

# %%
phases = sim.script.phases
for name in dict.fromkeys(phases):
    idx = [k for k, p in enumerate(phases) if p == name]
    print(f"{name:>11}: cycles {idx[0]:>3}-{idx[-1]:>3}")

# %% [markdown]
# ## One sensor frame
#
# The camera is a ray per column; grey level fades toward the background with
# distance. Column 0 is the left edge of the view.

# %%
f = sim.frame(0)
gray = f.rgb.pixels.mean(axis=2)[16]
print("truth", f.truth)
print("mid-row grey:", np.round(gray[::4]).astype(int))

# %% [markdown]
# ## Whisking
#
# During a lap of the cylinder the outermost whiskers on the inside of the
# turn reach the surface. Contacts go to the world frame through the true pose.

# %%
lap = [k for k, p in enumerate(phases) if p == "orbit_1"]
contacts = []
for k in lap:
    fr = sim.frame(k)
    contacts += [transform_point(fr.truth, p) for _, p in fr.whisk.contacts_head]
r = [math.hypot(p.x - cfg.cylinder_x, p.y - cfg.cylinder_y) for p in contacts]
print(len(contacts), "contacts, radius from centre", round(min(r), 6), "to", round(max(r), 6))

# %%
busy = max(lap, key=lambda k: len(sim.frame(k).whisk.contacts_head))
print("deflections at cycle", busy, np.round(sim.frame(busy).whisk.deflections, 3))

# %% [markdown]
# ## Odometry
#
# Forward and turn readings carry Gaussian noise; integrating them drifts.

# %%
frames = list(sim.frames())
odo = dead_reckon(frames[0].truth, [fr.odom for fr in frames[:-1]])
drift = [math.dist((a.x, a.y), (b.x, b.y)) for a, b in zip(odo, sim.script.poses)]
print(f"peak drift {max(drift):.3f} m at cycle {int(np.argmax(drift))}, final {drift[-1]:.3f} m")
