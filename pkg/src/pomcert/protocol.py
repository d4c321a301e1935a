"""The n-bit parity-oblivious multiplexing task.

Conventions
-----------
* A string ``x`` of length ``n`` is indexed by ``delta`` in big-endian
  order: ``x_1`` is the most significant bit, so ``delta = 1`` is
  ``00...01``.
* Bob's bit ``b`` in {0, 1} maps to the projector ``(1 + (-1)**b B) / 2``;
  the round is won when ``b`` equals the requested bit ``x_y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import math

import numpy as np

from .errors import DimensionMismatch, ResidualExceeded, StructuralError, UnsupportedN
from .operators import STRUCTURAL_TOL, dichotomic_from_matrix, max_abs


# -- bit strings ---------------------------------------------------------------


@dataclass(frozen=True)
class BitString:
    n: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1 or len(self.bits) != self.n or any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"invalid bit string {self.bits!r} for n={self.n}")

    @classmethod
    def from_delta(cls, delta: int, n: int) -> "BitString":
        if not 0 <= delta < 2**n:
            raise ValueError(f"delta={delta} out of range for n={n}")
        return cls(n, tuple((delta >> (n - 1 - i)) & 1 for i in range(n)))

    @classmethod
    def parse(cls, text: str) -> "BitString":
        return cls(len(text), tuple(int(c) for c in text))

    @property
    def delta(self) -> int:
        v = 0
        for b in self.bits:
            v = (v << 1) | b
        return v

    @property
    def delta_bar(self) -> int:
        return (2**self.n - 1) ^ self.delta

    @property
    def weight(self) -> int:
        return sum(self.bits)

    def complement(self) -> "BitString":
        return BitString(self.n, tuple(1 - b for b in self.bits))

    def dot(self, other: "BitString") -> int:
        """Parity ``x . s`` (XOR of bitwise products)."""
        if other.n != self.n:
            raise DimensionMismatch("bit strings of different length")
        return sum(a & b for a, b in zip(self.bits, other.bits)) & 1

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@lru_cache(maxsize=None)
def bit_table(n: int) -> np.ndarray:
    """``(2**n, n)`` int array; row ``delta`` holds the bits of ``x^delta``."""
    deltas = np.arange(2**n)
    shifts = np.arange(n - 1, -1, -1)
    table = (deltas[:, None] >> shifts[None, :]) & 1
    table.flags.writeable = False
    return table


def parity(delta: int, s: int) -> int:
    return bin(delta & s).count("1") & 1


@dataclass(frozen=True)
class ParitySet:
    n: int
    members: tuple[BitString, ...]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def parity_set(n: int) -> ParitySet:
    """All strings of Hamming weight >= 2, sorted by ``delta``."""
    _require_n(n)
    members = tuple(
        BitString.from_delta(s, n) for s in range(2**n) if bin(s).count("1") >= 2
    )
    return ParitySet(n, members)


def _require_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise UnsupportedN(f"n must be an integer >= 2 (got {n!r}); the parity set is empty for n < 2")


# -- strategies ----------------------------------------------------------------


def _stack(mats, what: str) -> np.ndarray:
    arr = np.asarray([np.asarray(m, dtype=complex) for m in mats])
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise StructuralError(f"{what}: expected a stack of square matrices, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StructuralError(f"{what}: non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PreparationEnsemble:
    """``2**n`` density matrices indexed by ``delta``.

    Construction validates Hermiticity, trace one and positivity (minimum
    eigenvalue >= -tol) of every state.
    """

    states: np.ndarray = field(repr=False)
    tol: float = STRUCTURAL_TOL

    def __post_init__(self):
        states = _stack(self.states, "preparations")
        object.__setattr__(self, "states", states)
        count = states.shape[0]
        n = count.bit_length() - 1
        if count < 4 or 2**n != count:
            raise StructuralError(f"need 2**n states with n >= 2, got {count}")
        for delta, rho in enumerate(states):
            herm = max_abs(rho - rho.conj().T)
            if herm > self.tol:
                raise ResidualExceeded(f"state delta={delta}: hermiticity", herm, self.tol)
            tr = np.trace(rho)
            if abs(tr - 1) > self.tol:
                raise ResidualExceeded(
                    f"state delta={delta}: trace {tr.real:.6g} != 1", abs(tr - 1), self.tol
                )
            lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
            if lo < -self.tol:
                raise ResidualExceeded(f"state delta={delta}: negative eigenvalue {lo:.3e}", -lo, self.tol)

    @property
    def n(self) -> int:
        return self.states.shape[0].bit_length() - 1

    @property
    def d(self) -> int:
        return self.states.shape[1]

    def __len__(self):
        return self.states.shape[0]

    def __getitem__(self, delta):
        return self.states[delta]


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """``n`` traceless dichotomic observables ``B_1 .. B_n`` (stored 0-based)."""

    observables: np.ndarray = field(repr=False)
    tol: float = STRUCTURAL_TOL

    def __post_init__(self):
        obs = _stack(self.observables, "measurements")
        object.__setattr__(self, "observables", obs)
        for y, b in enumerate(obs, start=1):
            try:
                dichotomic_from_matrix(b, self.tol)
            except ResidualExceeded as exc:
                raise StructuralError(f"observable B_{y}: {exc}") from exc

    @property
    def n(self) -> int:
        return self.observables.shape[0]

    @property
    def d(self) -> int:
        return self.observables.shape[1]

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return self.observables[i]


@dataclass(frozen=True, eq=False)
class Strategy:
    preparations: PreparationEnsemble
    measurements: MeasurementSet
    label: str = ""

    def __post_init__(self):
        p, m = self.preparations, self.measurements
        if p.n != m.n:
            raise DimensionMismatch(f"{len(p)} states need n={p.n} observables, got {m.n}")
        if p.d != m.d:
            raise DimensionMismatch(f"states have d={p.d}, observables d={m.d}")

    @classmethod
    def from_arrays(cls, states, observables, label: str = "", tol: float = STRUCTURAL_TOL) -> "Strategy":
        return cls(PreparationEnsemble(states, tol), MeasurementSet(observables, tol), label)

    @property
    def n(self) -> int:
        return self.measurements.n

    @property
    def d(self) -> int:
        return self.measurements.d


# -- task functionals ----------------------------------------------------------


def projector(b: int, observable) -> np.ndarray:
    if b not in (0, 1):
        raise ValueError("outcome bit must be 0 or 1")
    B = np.asarray(observable)
    return 0.5 * (np.eye(B.shape[0]) + (-1) ** b * B)


@dataclass(frozen=True)
class ParityReport:
    max_residual: float
    per_s_residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def parity_signs(n: int) -> np.ndarray:
    """``(|P_n|, 2**n)`` array of ``(-1)**(x^delta . s)`` for every ``s`` in the parity set."""
    svals = [s.delta for s in parity_set(n)]
    return np.array([[(-1) ** parity(d, s) for d in range(2**n)] for s in svals], dtype=float)


def check_parity_oblivious(prep: PreparationEnsemble, tol: float = 1e-12) -> ParityReport:
    """Max-entry norm of ``sum_{x.s=0} rho_x - sum_{x.s=1} rho_x`` for every ``s``."""
    n = prep.n
    signs = parity_signs(n)
    diffs = np.einsum("sk,kij->sij", signs, prep.states)
    per_s = {
        str(s): float(np.max(np.abs(diff))) for s, diff in zip(parity_set(n), diffs)
    }
    return ParityReport(max(per_s.values()), per_s, tol)


def success_probability(strategy: Strategy) -> float:
    n, N = strategy.n, 2**strategy.n
    rho = strategy.preparations.states
    B = strategy.measurements.observables
    # Tr[rho_delta Pi^{x_y}_{B_y}] = (Tr rho + (-1)^{x_y} Tr[rho B_y]) / 2
    tr_rho = np.einsum("kii->k", rho).real
    tr_rho_b = np.einsum("kij,yji->ky", rho, B).real
    signs = 1 - 2 * bit_table(n)
    terms = 0.5 * (tr_rho[:, None] + signs * tr_rho_b)
    return float(np.sum(terms) / (N * n))


def classical_bound(n: int) -> Fraction:
    """Preparation-noncontextual optimum ``(1 + 1/n) / 2``."""
    _require_n(n)
    return Fraction(n + 1, 2 * n)


def quantum_bound(n: int) -> float:
    """Quantum optimum ``(1 + 1/sqrt(n)) / 2``."""
    _require_n(n)
    return 0.5 * (1 + 1 / math.sqrt(n))
