"""Building the optimal quantum strategy from anticommuting observables."""
# %%
import numpy as np

from pomcert import canonical_observables, check_parity_oblivious, optimal_strategy, success_probability
from pomcert.optimal import anticommutation_residuals

# %% [markdown]
# The measurements are Pauli tensor products that pairwise anticommute.
# For five bits they live on two qubits.

# %%
obs = canonical_observables(5)
print("n=5 acts on d =", obs.d_star)
print("anticommutation residuals:\n", anticommutation_residuals(obs.observables))

# %% [markdown]
# Each preparation puts its Bloch vector on a hypercube vertex.  Its spectrum
# is {0, 2/d}: half the space is empty, so the complement state is orthogonal.

# %%
s = optimal_strategy(5)
rho = s.preparations.states
print("spectrum of rho_00000:", np.round(np.linalg.eigvalsh(rho[0]), 12))
print("|rho_00000 rho_11111|_max =", np.abs(rho[0] @ rho[-1]).max())

# %%
rep = check_parity_oblivious(s.preparations)
print(f"parity residual {rep.max_residual:.1e} over {len(rep.per_s_residuals)} parity strings")
print(f"success probability {success_probability(s):.10f}")
