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
# # Pose cells
#
# A 21 x 21 x 36 torus over (x, y, heading). Each step: shift by odometry,
# add energy where matched templates were learned, blur with a Gaussian,
# subtract a constant, renormalise.

# %%
import numpy as np

from vitaslam.geometry import Pose, Twist, integrate
from vitaslam.posecells import (PoseCellGrid, cell_distance, decode_peak, inject, path_integrate,
                                step_attractor)

g = PoseCellGrid.at_pose(Pose(5.0, 5.0, 0.0))
for k in range(60):
    g = step_attractor(g)
    if k in (0, 9, 59):
        print(f"step {k + 1:>2}: peak {g.activity.max():.5f}")

# %% [markdown]
# The packet settles to a fixed width instead of spreading out.
#
# ## Following odometry

# %%
rng = np.random.default_rng(1)
pose = g.cell_to_pose(decode_peak(g).cell_coords)
for _ in range(100):
    tw = Twist(rng.normal(0, 0.075), rng.normal(0, 0.1))
    g = step_attractor(path_integrate(g, tw))
    pose = integrate(pose, tw)
print("decoded ", np.round(decode_peak(g).cell_coords, 2))
print("odometry", np.round(g.pose_to_cell(pose), 2))

# %% [markdown]
# ## Pulling the packet somewhere else
#
# Repeated small injections away from the packet win after a dozen steps.

# %%
target = (3.0, 15.0, 30.0)
for step in range(1, 31):
    g = step_attractor(inject(g, target, 0.02))
    d = cell_distance(decode_peak(g).cell_coords, target, g.dims)
    if step % 3 == 0:
        print(f"step {step:>2}: {d:6.2f} cells from target")
