"""Optimal quantum strategies, Clifford-Bloch geometry and scrambling.

Canonical observables
---------------------
``canonical_observables(n)`` is built by the recursion::

    B'(n) = [sz (x) 1, sy (x) 1] + [sx (x) C for C in B'(n - 2)]

with ``B'(1) = [1]`` (the 1x1 identity) and ``B'(0) = []`` in dimension 1.
The dimension is ``2**m`` with ``m = ceil((n - 1) / 2)``.  For n = 5 this gives
``sz1, sy1, sx sz, sx sy, sx sx``.

Entries are products of 0, +-1 and +-i, so anticommutation holds exactly
in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DimensionMismatch, NotAnticommuting, UnsupportedN
from .operators import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    anticommutator,
    conjugate,
    max_abs,
    random_unitary,
)
from .protocol import (
    BitString,
    MeasurementSet,
    PreparationEnsemble,
    Strategy,
    bit_table,
)

MAX_N_OBSERVABLES = 12
MAX_N_PREPARATIONS = 8


def qubit_count(n: int) -> int:
    """``m = ceil((n - 1) / 2)``; the canonical set acts on ``2**m`` dimensions."""
    return max(0, -(-(n - 1) // 2))


@dataclass(frozen=True, eq=False)
class CanonicalObservables:
    n: int
    observables: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return qubit_count(self.n)

    @property
    def d_star(self) -> int:
        return 2**self.m

    def __getitem__(self, i):
        return self.observables[i]

    def __len__(self):
        return self.n


def _canonical_list(n: int) -> list[np.ndarray]:
    if n == 0:
        return []
    if n == 1:
        return [np.ones((1, 1), dtype=complex)]
    inner = _canonical_list(n - 2)
    k = inner[0].shape[0] if inner else 1
    eye = np.eye(k, dtype=complex)
    return [np.kron(SIGMA_Z, eye), np.kron(SIGMA_Y, eye)] + [np.kron(SIGMA_X, c) for c in inner]


def canonical_observables(n: int, *, allow_large: bool = False) -> CanonicalObservables:
    if n < 2:
        raise UnsupportedN(f"n must be >= 2 (got {n})")
    if n > MAX_N_OBSERVABLES and not allow_large:
        raise UnsupportedN(f"n={n} exceeds the default cap {MAX_N_OBSERVABLES}")
    obs = np.array(_canonical_list(n))
    obs.flags.writeable = False
    return CanonicalObservables(n, obs)


def anticommutation_residuals(observables) -> np.ndarray:
    """``R[y, y'] = max|{B_y, B_y'} - 2 delta_{yy'} 1|``."""
    obs = np.asarray(observables)
    n, d = obs.shape[0], obs.shape[1]
    eye = np.eye(d)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            target = 2 * eye if i == j else 0
            out[i, j] = out[j, i] = max_abs(anticommutator(obs[i], obs[j]) - target)
    return out


def bloch_states(observables, signs=None) -> np.ndarray:
    """``(1/d)(1 + sum_y (-1)^{x_y} B_y / sqrt(n))`` for every string ``x``.

    ``signs`` defaults to the full ``(2**n, n)`` table of ``(-1)**x_y``.
    """
    obs = np.asarray(observables)
    n, d = obs.shape[0], obs.shape[1]
    if signs is None:
        signs = 1 - 2 * bit_table(n)
    bloch = np.einsum("ky,yij->kij", signs, obs) / math.sqrt(n)
    return (np.eye(d)[None] + bloch) / d


def optimal_preparations(observables, n: int | None = None, tol: float = 1e-9) -> PreparationEnsemble:
    """Hypercube ensemble over a set of pairwise anticommuting observables."""
    obs = np.asarray(observables)
    if n is not None and n != obs.shape[0]:
        raise DimensionMismatch(f"expected {n} observables, got {obs.shape[0]}")
    res = anticommutation_residuals(obs)
    off = res - np.diag(np.diag(res))
    if off.max() > tol:
        i, j = np.unravel_index(np.argmax(off), off.shape)
        raise NotAnticommuting(
            f"B_{i + 1} and B_{j + 1} anticommute only to {off[i, j]:.3e} (tol {tol:.1e})"
        )
    return PreparationEnsemble(bloch_states(obs))


def optimal_strategy(n: int, *, allow_large: bool = False) -> Strategy:
    if n > MAX_N_PREPARATIONS and not allow_large:
        raise UnsupportedN(f"n={n}: preparations capped at n <= {MAX_N_PREPARATIONS} by default")
    obs = canonical_observables(n, allow_large=allow_large)
    return Strategy(
        optimal_preparations(obs.observables),
        MeasurementSet(obs.observables),
        label=f"optimal n={n}",
    )


# -- geometry ------------------------------------------------------------------


def bloch_vector(x: BitString) -> np.ndarray:
    return (1 - 2 * np.asarray(x.bits, dtype=float)) / math.sqrt(x.n)


def hypercube_distance_sq(x: BitString, x_tilde: BitString) -> float:
    if x.n != x_tilde.n:
        raise DimensionMismatch("bit strings of different length")
    diff = bloch_vector(x) - bloch_vector(x_tilde)
    return float(diff @ diff)


def hamming(x: BitString, x_tilde: BitString) -> int:
    return sum(a != b for a, b in zip(x.bits, x_tilde.bits))


# -- adversarial instances -----------------------------------------------------


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator; outputs are reproducible per seed."""
    return np.random.Generator(np.random.Philox(int(seed)))


def embed(strategy: Strategy, J: int) -> tuple[np.ndarray, np.ndarray]:
    """States as ``rho (x) 1_J / J`` and observables as ``B (x) 1_J``."""
    if J < 1:
        raise ValueError("junk dimension J must be >= 1")
    eye = np.eye(J)
    states = np.array([np.kron(r, eye) / J for r in strategy.preparations.states])
    obs = np.array([np.kron(b, eye) for b in strategy.measurements.observables])
    return states, obs


def scramble(strategy: Strategy, J: int, seed: int) -> tuple[Strategy, np.ndarray]:
    """Embed with junk dimension ``J`` and conjugate by a seeded Haar unitary.

    Returns the scrambled strategy and the hiding unitary ``V`` (so that the
    scrambled objects are ``V (. (x) 1_J) V^dagger``).
    """
    states, obs = embed(strategy, J)
    v = random_unitary(states.shape[1], make_rng(seed))
    states = np.array([conjugate(v, r) for r in states])
    obs = np.array([conjugate(v, b) for b in obs])
    # Conjugation leaves O(eps) anti-Hermitian noise; symmetrise it away.
    states = 0.5 * (states + states.conj().transpose(0, 2, 1))
    obs = 0.5 * (obs + obs.conj().transpose(0, 2, 1))
    label = f"{strategy.label} scrambled J={J} seed={seed}".strip()
    return Strategy.from_arrays(states, obs, label=label), v


def direct_sum(*blocks) -> np.ndarray:
    """Block-diagonal matrix of the given square blocks."""
    blocks = [np.asarray(b, dtype=complex) for b in blocks if np.asarray(b).size]
    d = sum(b.shape[0] for b in blocks)
    out = np.zeros((d, d), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = b
        i += k
    return out


def sector_observables(n: int, j_plus: int, j_minus: int, flavour: str = "conjugate") -> np.ndarray:
    """Observables on ``J+`` copies of the canonical set plus ``J-`` copies of a partner.

    ``flavour="conjugate"`` uses the complex conjugate of the canonical set;
    ``flavour="negated"`` flips the sign of the last observable (the other
    irreducible representation for odd n).
    """
    canon = canonical_observables(n).observables
    if flavour == "conjugate":
        partner = canon.conj()
    elif flavour == "negated":
        partner = canon.copy()
        partner[-1] = -partner[-1]
    else:
        raise ValueError(f"unknown flavour {flavour!r}")
    eye_p, eye_m = np.eye(j_plus), np.eye(j_minus)
    return np.array(
        [direct_sum(np.kron(a, eye_p), np.kron(b, eye_m)) for a, b in zip(canon, partner)]
    )
