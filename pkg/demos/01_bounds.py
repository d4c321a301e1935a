"""Classical versus quantum: how much does parity obliviousness cost a classical sender?

Run with ``python3 demos/01_bounds.py``.
"""
# %%
from fractions import Fraction
import math
import time

from pomcert import classical_bound, classical_optimum, quantum_bound, verify_model

# %% [markdown]
# The noncontextual optimum is a linear program over deterministic response
# functions.  We solve it in exact rationals, so the printed value is the
# optimum itself rather than a float close to it.

# %%
for n in (2, 3, 4):
    t0 = time.perf_counter()
    sol = classical_optimum(n)
    report = verify_model(sol.model)
    print(f"n={n}: LP optimum {sol.value} in {sol.iterations} pivots "
          f"({time.perf_counter() - t0:.2f}s), closed form {classical_bound(n)}, "
          f"witness feasible: {report.feasible}")

# %% [markdown]
# The quantum optimum grows like 1/sqrt(n) above one half, the classical one
# like 1/n, so the gap closes slowly.

# %%
print(f"{'n':>3} {'classical':>10} {'quantum':>9} {'gap':>9}")
for n in range(2, 11):
    c = classical_bound(n)
    q = quantum_bound(n)
    print(f"{n:>3} {str(c):>10} {q:9.6f} {q - float(c):9.6f}")

assert classical_bound(8) == Fraction(9, 16)
assert math.isclose(quantum_bound(4), 0.75)
