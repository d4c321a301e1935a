"""Exact rational simplex (two-phase, Bland's rule) on a sparse tableau.

Problems are given in standard form::

    maximize    c . x
    subject to  A x = b,  x >= 0

with ``A`` supplied as a list of sparse rows (``{column: coefficient}``).
All arithmetic is done in :class:`fractions.Fraction`, so the returned
optimum is exact.  Tableau rows are kept as dicts; the POM programs this
solves have a block structure that keeps them sparse.
"""

from __future__ import annotations

from dataclasses import dataclass
import numbers
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InfeasibleLP, NumericOverflow

DEFAULT_MAX_BITS = 4096


@dataclass(frozen=True)
class SimplexResult:
    value: Fraction
    x: tuple[Fraction, ...]
    iterations: int
    phase1_iterations: int
    dropped_rows: tuple[int, ...]


class _Tableau:
    def __init__(self, rows, rhs, ncols, max_bits):
        self.rows: list[dict[int, Fraction]] = rows
        self.rhs: list[Fraction] = rhs
        self.ncols = ncols
        # basis[i] is the column basic in row i, or None for an artificial
        self.basis: list[int | None] = [None] * len(rows)
        self.max_bits = max_bits
        self.iterations = 0
        for b in rhs:
            self._check_size(b)

    def _check_size(self, value: Fraction):
        if max(value.numerator.bit_length(), value.denominator.bit_length()) > self.max_bits:
            raise NumericOverflow(
                f"rational entry exceeds {self.max_bits} bits during pivoting"
            )

    def pivot(self, r: int, q: int, obj: dict[int, Fraction], obj_val: list[Fraction]):
        prow = self.rows[r]
        p = prow[q]
        if p != 1:
            inv = 1 / p
            for j in prow:
                prow[j] *= inv
            self.rhs[r] *= inv
            self._check_size(self.rhs[r])
        prhs = self.rhs[r]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row.get(q)
            if f is None:
                continue
            _axpy(row, prow, -f)
            self.rhs[i] -= f * prhs
            self._check_size(self.rhs[i])
        f = obj.get(q)
        if f is not None:
            _axpy(obj, prow, -f)
            obj_val[0] += f * prhs
        self.basis[r] = q
        self.iterations += 1

    def run(self, obj, obj_val, allowed=None) -> None:
        """Pivot until no improving column remains (maximisation)."""
        while True:
            q = _bland_entering(obj, allowed)
            if q is None:
                return
            r = self._ratio_test(q)
            if r is None:
                raise InfeasibleLP("objective is unbounded")
            self.pivot(r, q, obj, obj_val)

    def _ratio_test(self, q: int) -> int | None:
        best = None
        best_ratio = None
        best_key = None
        for i, row in enumerate(self.rows):
            a = row.get(q)
            if a is None or a <= 0:
                continue
            ratio = self.rhs[i] / a
            # Bland: ties go to the smallest basic variable index; artificials
            # (None) are ranked before every real column so they leave first.
            key = -1 if self.basis[i] is None else self.basis[i]
            if best is None or ratio < best_ratio or (ratio == best_ratio and key < best_key):
                best, best_ratio, best_key = i, ratio, key
        return best


def _frac(v) -> Fraction:
    # Fraction(np.int64) keeps a fixed-width numerator; go through int.
    if isinstance(v, numbers.Integral):
        return Fraction(int(v))
    return Fraction(v)


def _axpy(dst: dict[int, Fraction], src: Mapping[int, Fraction], f: Fraction) -> None:
    for j, v in src.items():
        nv = dst.get(j, 0) + f * v
        if nv:
            dst[j] = nv
        else:
            dst.pop(j, None)


def _bland_entering(obj: Mapping[int, Fraction], allowed) -> int | None:
    best = None
    for j, v in obj.items():
        if v > 0 and (allowed is None or j < allowed) and (best is None or j < best):
            best = j
    return best


def solve(
    rows: Sequence[Mapping[int, object]],
    rhs: Sequence[object],
    objective: Mapping[int, object],
    ncols: int,
    *,
    max_bits: int = DEFAULT_MAX_BITS,
) -> SimplexResult:
    """Maximise ``objective . x`` subject to ``rows x = rhs``, ``x >= 0``.

    Raises :class:`InfeasibleLP` for infeasible or unbounded programs and
    :class:`NumericOverflow` when an intermediate rational grows beyond
    ``max_bits`` bits.
    """
    trows = []
    trhs = []
    for row, b in zip(rows, rhs):
        r = {int(j): _frac(v) for j, v in row.items() if v}
        b = _frac(b)
        if b < 0:
            r = {j: -v for j, v in r.items()}
            b = -b
        trows.append(r)
        trhs.append(b)
    tab = _Tableau(trows, trhs, ncols, max_bits)

    # Phase I: maximise -(sum of artificials).  Reduced cost of column j is
    # the column sum over rows whose basic variable is still artificial.
    obj1: dict[int, Fraction] = {}
    for r in trows:
        _axpy(obj1, r, Fraction(1))
    val1 = [-sum(trhs, Fraction(0))]
    tab.run(obj1, val1)
    phase1_iterations = tab.iterations
    if val1[0] != 0:
        raise InfeasibleLP(f"phase I optimum {val1[0]} < 0")

    # Drive remaining (zero-level) artificials out of the basis; rows that
    # are identically zero over the real columns are redundant.
    dropped = []
    for i in range(len(tab.rows) - 1, -1, -1):
        if tab.basis[i] is not None:
            continue
        if tab.rows[i]:
            q = min(tab.rows[i])
            tab.pivot(i, q, {}, [Fraction(0)])
        else:
            dropped.append(i)
            del tab.rows[i]
            del tab.rhs[i]
            del tab.basis[i]

    # Phase II
    obj2 = {int(j): _frac(v) for j, v in objective.items() if v}
    val2 = [Fraction(0)]
    for i, q in enumerate(tab.basis):
        c = obj2.get(q)
        if c:
            _axpy(obj2, tab.rows[i], -c)
            val2[0] += c * tab.rhs[i]
    tab.run(obj2, val2)

    x = [Fraction(0)] * ncols
    for i, q in enumerate(tab.basis):
        x[q] = tab.rhs[i]
    value = sum((Fraction(objective.get(j, 0)) * x[j] for j in range(ncols)), Fraction(0))
    assert value == val2[0]
    return SimplexResult(
        value=value,
        x=tuple(x),
        iterations=tab.iterations,
        phase1_iterations=phase1_iterations,
        dropped_rows=tuple(sorted(dropped)),
    )
