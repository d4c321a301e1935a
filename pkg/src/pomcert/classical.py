"""Exact classical (preparation-noncontextual) optimum of the POM task.

The ontic space is the set of ``2**n`` deterministic response functions
``lambda`` (Bob answers ``lambda_y`` to question ``y``).  Mixed response
functions add nothing: the success probability is linear in them, so
every model is dominated by one on deterministic vertices.

The program's variables are ``mu[lambda][delta]``, the probability of ontic
state ``lambda`` given preparation ``x^delta`` (column ``lambda * 2**n +
delta``), constrained by

* normalisation: ``sum_lambda mu[lambda][delta] = 1`` for every ``delta``;
* parity obliviousness at the ontic level: for every ``s`` in the parity
  set and every ``lambda``,
  ``sum_{x.s=0} mu[lambda][x] = sum_{x.s=1} mu[lambda][x]``.

The objective is the average winning probability, so the column
``(lambda, delta)`` carries ``#{y : lambda_y = x^delta_y} / (2**n n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import warnings

from . import simplex
from .errors import DimensionMismatch, UnsupportedN
from .protocol import bit_table, parity, parity_set

MAX_N_DEFAULT = 5


@dataclass(frozen=True)
class ResponseVertex:
    n: int
    outputs: tuple[int, ...]

    @property
    def index(self) -> int:
        v = 0
        for b in self.outputs:
            v = (v << 1) | b
        return v


def response_vertices(n: int) -> list[ResponseVertex]:
    return [ResponseVertex(n, tuple(int(b) for b in row)) for row in bit_table(n)]


@dataclass(frozen=True)
class LinearProgram:
    n: int
    num_vars: int
    rows: tuple[dict[int, int], ...] = field(repr=False)
    rhs: tuple[int, ...] = field(repr=False)
    objective: dict[int, Fraction] = field(repr=False)
    num_normalization: int
    num_parity: int

    @property
    def num_equalities(self) -> int:
        return len(self.rows)


def variable_index(lam: int, delta: int, n: int) -> int:
    return lam * 2**n + delta


def win_count(lam: int, delta: int, n: int) -> int:
    """Number of questions ``y`` the response ``lam`` answers correctly on ``x^delta``."""
    return n - bin(lam ^ delta).count("1")


def _check_cap(n: int, allow_large: bool) -> None:
    if n < 2:
        raise UnsupportedN(f"n must be >= 2 (got {n})")
    if n > MAX_N_DEFAULT:
        if not allow_large:
            raise UnsupportedN(
                f"n={n} exceeds the oracle cap n <= {MAX_N_DEFAULT}; pass allow_large=True to force"
            )
        warnings.warn(
            f"exact LP for n={n} has {4**n} variables and may run for a long time",
            RuntimeWarning,
            stacklevel=3,
        )


def build_lp(n: int, *, parity_constraints: bool = True, allow_large: bool = False) -> LinearProgram:
    _check_cap(n, allow_large)
    N = 2**n
    rows: list[dict[int, int]] = []
    rhs: list[int] = []
    for delta in range(N):
        rows.append({variable_index(lam, delta, n): 1 for lam in range(N)})
        rhs.append(1)
    num_parity = 0
    if parity_constraints:
        for s in parity_set(n):
            signs = [1 - 2 * parity(delta, s.delta) for delta in range(N)]
            for lam in range(N):
                rows.append({variable_index(lam, delta, n): signs[delta] for delta in range(N)})
                rhs.append(0)
                num_parity += 1
    scale = N * n
    objective = {
        variable_index(lam, delta, n): Fraction(win_count(lam, delta, n), scale)
        for lam in range(N)
        for delta in range(N)
        if win_count(lam, delta, n)
    }
    return LinearProgram(n, N * N, tuple(rows), tuple(rhs), objective, N, num_parity)


@dataclass(frozen=True)
class NoncontextualModel:
    """Epistemic weights ``weights[lambda][delta]``."""

    n: int
    weights: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        N = 2**self.n
        if len(self.weights) != N or any(len(r) != N for r in self.weights):
            raise DimensionMismatch(f"weights must be {N}x{N} for n={self.n}")

    @classmethod
    def uniform(cls, n: int) -> "NoncontextualModel":
        N = 2**n
        w = Fraction(1, N)
        return cls(n, tuple((w,) * N for _ in range(N)))

    @classmethod
    def from_vector(cls, n: int, x) -> "NoncontextualModel":
        N = 2**n
        return cls(n, tuple(tuple(Fraction(x[lam * N + d]) for d in range(N)) for lam in range(N)))


def model_value(model: NoncontextualModel) -> Fraction:
    n, N = model.n, 2**model.n
    total = sum(
        (model.weights[lam][d] * win_count(lam, d, n) for lam in range(N) for d in range(N)),
        Fraction(0),
    )
    return total / (N * n)


@dataclass(frozen=True)
class ModelReport:
    value: Fraction
    negative_entries: list[tuple[int, int]]
    normalization_violations: list[int]
    parity_violations: list[tuple[str, int]]  # (s, lambda)

    @property
    def feasible(self) -> bool:
        return not (self.negative_entries or self.normalization_violations or self.parity_violations)


def verify_model(model: NoncontextualModel) -> ModelReport:
    """Check a model exactly against every constraint and score it."""
    n, N = model.n, 2**model.n
    w = model.weights
    negative = [(lam, d) for lam in range(N) for d in range(N) if w[lam][d] < 0]
    norm = [d for d in range(N) if sum((w[lam][d] for lam in range(N)), Fraction(0)) != 1]
    par = []
    for s in parity_set(n):
        for lam in range(N):
            balance = sum(
                (w[lam][d] if parity(d, s.delta) == 0 else -w[lam][d] for d in range(N)),
                Fraction(0),
            )
            if balance != 0:
                par.append((str(s), lam))
    return ModelReport(model_value(model), negative, norm, par)


@dataclass(frozen=True)
class LPSolution:
    value: Fraction
    model: NoncontextualModel
    iterations: int


def solve_exact(lp: LinearProgram, *, max_bits: int = simplex.DEFAULT_MAX_BITS) -> LPSolution:
    res = simplex.solve(lp.rows, lp.rhs, lp.objective, lp.num_vars, max_bits=max_bits)
    return LPSolution(res.value, NoncontextualModel.from_vector(lp.n, res.x), res.iterations)


def classical_optimum(n: int, *, allow_large: bool = False) -> LPSolution:
    return solve_exact(build_lp(n, allow_large=allow_large))
