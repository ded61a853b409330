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
# # Experience map and relaxation
#
# Nodes store a pose and template ids; links store odometry between nodes.
# Relaxation nudges each node toward what its links predict.

# %%
import math

import numpy as np

from vitaslam.expmap import Link, ate, link_energy, relax_poses
from vitaslam.geometry import Pose, between

n = 16
truth = [Pose(2 * math.cos(2 * math.pi * i / n), 2 * math.sin(2 * math.pi * i / n),
              2 * math.pi * i / n + math.pi / 2) for i in range(n)]

# odometry along the loop, with a steady turn bias so the chain fails to close
rng = np.random.default_rng(0)
links, est = [], [truth[0]]
for i in range(n - 1):
    d = between(truth[i], truth[i + 1])
    d = Pose(d.x + rng.normal(0, 0.02), d.y, d.theta + 0.03)
    links.append(Link(i, i + 1, d, i))
    c, s = math.cos(est[-1].theta), math.sin(est[-1].theta)
    est.append(Pose(est[-1].x + c * d.x - s * d.y, est[-1].y + s * d.x + c * d.y,
                    est[-1].theta + d.theta))
print(f"gap at closure {math.dist((est[-1].x, est[-1].y), (truth[-1].x, truth[-1].y)):.3f} m")

# %% [markdown]
# Closing the loop adds one link from the last node back to the first.

# %%
links.append(Link(n - 1, 0, between(truth[-1], truth[0]), n))
print(f"energy {link_energy(est, links):.4f}")
relaxed, hist = relax_poses(est, links, 2000)
print(f"after 2000 sweeps {hist[-1]:.2e}")
print(f"ATE before {ate(est, truth)['rmse_position']:.3f} m, "
      f"after {ate(relaxed, truth)['rmse_position']:.3f} m")
