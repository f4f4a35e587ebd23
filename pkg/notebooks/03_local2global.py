# %% [markdown]
# # From overlapping patches to a global distance matrix
#
# Each m-hop patch is embedded separately.  Distances inside patches are
# averaged and exported as a square matrix for downstream manifold learning.

# %%
import tempfile
from pathlib import Path

import numpy as np

from lasekit import (KernelSpec, UniformBox, assemble_distances, build_cover, embed_cover,
                     export_precomputed, latent_position_graph, read_precomputed)

sample, P, g = latent_position_graph(UniformBox(0, 10, 2), 800, KernelSpec("gaussian_half"), seed=4)
cover = build_cover(g, m=1, seed=0)
patches = embed_cover(g, cover, r=3, jobs=2)
print(len(cover), "patches;", sum(p.reduced for p in patches), "reduced")

# %%
asm = assemble_distances(patches, g.n)
seen = asm.counts > 0
print("pairs observed:", int(seen.sum()) // 2, "fill value:", round(asm.fill_value, 3))

# %%
out = Path(tempfile.mkdtemp()) / "dist.raw64"
export_precomputed(asm, out, fmt="raw64", meta={"m": 1, "r": 3})
print(np.array_equal(read_precomputed(out), asm.D))
