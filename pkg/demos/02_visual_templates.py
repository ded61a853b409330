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
# # View templates
#
# A frame becomes a 60-sample column-mean profile, mean-centred and rescaled
# into [0, 1]. Matching slides it by up to 10 samples against every stored
# profile and takes the smallest mean absolute difference.

# %%
import numpy as np

from vitaslam.config import Config
from vitaslam.simulator import Simulator
from vitaslam.visual import ViewTemplateStore, extract_view_template, to_grayscale

cfg = Config()
sim = Simulator(cfg, seed=42)
profile = extract_view_template(to_grayscale(sim.frame(0).rgb), cfg.profile_len)
print(np.round(profile[::5], 2))

# %% [markdown]
# Brightness offsets do not change the profile.

# %%
gray = to_grayscale(sim.frame(0).rgb)
print(np.abs(extract_view_template(gray + 0.1, 60) - profile).max())

# %% [markdown]
# ## Novelty over the whole script
#
# With a tight threshold, noise and slow drift along the low-contrast walls
# push almost every frame past it, so the store grows nearly once per cycle.

# %%
store = ViewTemplateStore(cfg.view_threshold, cfg.view_max_shift)
kinds = []
for f in sim.frames():
    r = store.observe(extract_view_template(to_grayscale(f.rgb), cfg.profile_len), (0, 0, 0))
    kinds.append(r.kind.value)
print(len(store), "templates;", kinds.count("matched"), "matches out of", len(kinds))

# %%
for thr in (0.02, 0.03, 0.05, 0.08):
    s = ViewTemplateStore(thr, cfg.view_max_shift)
    for f in sim.frames():
        s.observe(extract_view_template(to_grayscale(f.rgb), cfg.profile_len), (0, 0, 0))
    print(f"threshold {thr:.2f}: {len(s)} templates")
