"""Complex conjugation shows up as a sector signature (J+, J-)."""
# %%
import numpy as np

from pomcert import certify, extract_unitary, sector_observables
from pomcert.operators import SIGMA_X, SIGMA_Y, SIGMA_Z, conjugate, random_unitary
from pomcert.optimal import bloch_states, make_rng
from pomcert.protocol import Strategy

# %% [markdown]
# For three bits, {sz, sy, -sx} is the complex conjugate of the canonical
# triple.  No unitary maps one onto the other, and the extractor says so.

# %%
print("{sz, sy, -sx}:", extract_unitary([SIGMA_Z, SIGMA_Y, -SIGMA_X]).sectors)

# %% [markdown]
# A direct sum of two canonical copies and three conjugate copies, scrambled,
# still certifies, and the split is recovered.

# %%
obs = sector_observables(3, 2, 3)
v = random_unitary(obs.shape[1], make_rng(1))
so = np.array([conjugate(v, b) for b in obs])
ss = np.array([conjugate(v, r) for r in bloch_states(obs)])
so = 0.5 * (so + so.conj().transpose(0, 2, 1))
ss = 0.5 * (ss + ss.conj().transpose(0, 2, 1))
rep = certify(Strategy.from_arrays(ss, so))
print("mixed n=3:", rep.extraction.sectors, "passed:", rep.passed)

# %% [markdown]
# For five bits the conjugate representation is unitarily equivalent to the
# canonical one, so conjugation leaves no trace.  Negating the last
# observable gives the genuinely different irreducible representation.

# %%
for flavour in ("conjugate", "negated"):
    f = extract_unitary(sector_observables(5, 2, 1, flavour))
    print(f"n=5 {flavour}: sectors {f.sectors}")
