# %% [markdown]
# # Small versions of the bundled experiments
#
# Each runner returns plain rows.  The CLI ``experiment`` command writes the
# same rows to CSV.  The grids below are cut down so the script runs in
# seconds.

# %%
import numpy as np

from lasekit.experiments import (eigendecay_gap_check, run_coordinate_regression,
                                 run_eigendecay, run_reconstruction_sweep, run_shapes,
                                 regression_summary, summarise_long, synthetic_spatial_graph)

# %% [markdown]
# ## Eigenvalue decay as the latent measure concentrates

# %%
rows = run_eigendecay(dims=(2,), n=100, seed=0)
for tau in (0.25, 4.0, 64.0):
    vals = [ev for d, t, seed, k, ev in rows if t == tau]
    print(tau, np.round(vals, 3))
print(eigendecay_gap_check(rows, 2))

# %% [markdown]
# ## Soft weights against hard subgraphs

# %%
long = run_reconstruction_sweep(n=300, trials=2, tau_grid=[1, 2, 3], widths=[1.5, 2.5],
                                profiles=["shifted"], seed=0)
for metric, param, mean, se, trials in summarise_long(long):
    print(f"{metric:<14} {param:>5}  {mean:.4f} +/- {se:.4f}")

# %% [markdown]
# ## Planted shapes

# %%
metrics, _ = run_shapes(n_background=800, shape_points=60, radius_grid=[1.5, 2.5],
                        tau_grid=[0.4, 0.8], seed=0)
for shape, method, param, rmse, fidelity in metrics:
    print(f"{shape:<9} {method:<13} {param:>5} {rmse:.4f} {fidelity:.3f}")

# %% [markdown]
# ## Recovering coordinates from local embeddings
#
# The neighbour-mean baseline has no fitted model, so only its MSE is defined.

# %%
g, coords = synthetic_spatial_graph(n=800, seed=3)
rows = run_coordinate_regression(g, coords, centers=3, m_grid=[100], dims=[3],
                                 k_grid=[0, 20], tau_grid=[0.0, 0.1], n_test=5, seed=0)
for (d, m, method), s in regression_summary(rows).items():
    print(f"d={d} m={m} {method:<13} R2 {s['r2']:.3f}  MSE {s['mse']:.4g}")
