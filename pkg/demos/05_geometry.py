"""The prepared Bloch vectors form a hypercube inscribed in the unit sphere."""
# %%
from itertools import combinations
from pathlib import Path
import tempfile

import numpy as np

from pomcert import BitString
from pomcert.io import write_geometry
from pomcert.optimal import bloch_vector, hamming, hypercube_distance_sq

# %%
n = 4
xs = [BitString.from_delta(k, n) for k in range(2**n)]
r = np.array([bloch_vector(x) for x in xs])
print("norms:", np.unique(np.round(np.linalg.norm(r, axis=1), 12)))

# %% [markdown]
# Squared distance depends on the Hamming distance only: 4h/n.

# %%
by_h = {}
for a, b in combinations(xs, 2):
    by_h.setdefault(hamming(a, b), set()).add(round(hypercube_distance_sq(a, b), 12))
for h, d2 in sorted(by_h.items()):
    print(f"h={h}: dist^2 {sorted(d2)}  (4h/n = {4 * h / n})")

# %%
out = Path(tempfile.mkdtemp())
for path in write_geometry(n, out):
    print(path, "-", len(path.read_text().splitlines()) - 1, "rows")
