"""Device-independent certification by recursive unitary extraction.

Given black-box observables ``B_1 .. B_n`` in an unknown dimension ``d``,
:func:`extract_unitary` builds ``U`` with ``U B_y U^dagger = B'_y (x) 1_J``,
where ``B'`` is :func:`pomcert.optimal.canonical_observables`.  Each level
of the recursion fixes one qubit factor:

1. rotate ``B_1`` to ``diag(1, -1) (x) 1`` (+1 eigenvectors first);
2. every other observable is then block off-diagonal with top-right
   block ``X_y``; ``U_2 = diag(1, i X_2)`` sends ``B_2`` to ``sy (x) 1``
   and every remaining ``B_y`` to ``sx (x) (-i X_y X_2^dagger)``;
3. recurse on the reduced operators ``-i X_y X_2^dagger``.

For odd n a single reduced operator ``C`` survives at the bottom.  It is a
dichotomic operator on the junk space and is diagonalised to
``diag(1_{J+}, -1_{J-})``; the pair ``(J+, J-)`` is the sector signature.
``J- > 0`` marks blocks carrying the inequivalent partner representation
(for n = 3 mod 4 this is the complex conjugate of the reference set).
Reference observables are compared in *sector-signed* form: the last
observable picks up the sign of the sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    AnticommutationLost,
    DiagonalLeakage,
    DimensionMismatch,
    DimensionNotDivisible,
    ExtractionError,
    HermiticityLost,
    NonDichotomic,
    NonUnitaryBlock,
    UnbalancedSpectrum,
    UnsupportedN,
)
from .operators import (
    EIGEN_CLASS_TOL,
    STRUCTURAL_TOL,
    conjugate,
    eig_hermitian,
    is_unitary,
    max_abs,
)
from .optimal import anticommutation_residuals, bloch_states, canonical_observables, qubit_count
from .protocol import (
    PreparationEnsemble,
    Strategy,
    check_parity_oblivious,
    classical_bound,
    quantum_bound,
    success_probability,
)

CERT_TOL = 1e-7


@dataclass(frozen=True)
class Tolerances:
    structural: float = STRUCTURAL_TOL
    certification: float = CERT_TOL
    eigen: float = EIGEN_CLASS_TOL

    def __post_init__(self):
        for name in ("structural", "certification", "eigen"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name!r} must be positive")


# -- single steps --------------------------------------------------------------


def _classify(w: np.ndarray, eig_tol: float) -> np.ndarray:
    """+1 / -1 labels for eigenvalues; raise if any is not near +-1."""
    plus = np.abs(w - 1) <= eig_tol
    minus = np.abs(w + 1) <= eig_tol
    bad = ~(plus | minus)
    if bad.any():
        raise NonDichotomic(f"eigenvalue {w[bad][0]:.9g} is not within {eig_tol:g} of +-1")
    return np.where(plus, 1, -1)


def diagonalizing_step(b1, eig_tol: float = EIGEN_CLASS_TOL) -> tuple[np.ndarray, int]:
    """Unitary ``U1`` with ``U1 B1 U1^dagger = diag(1_{d/2}, -1_{d/2})``."""
    w, v = eig_hermitian(b1)
    labels = _classify(w, eig_tol)
    n_plus = int((labels == 1).sum())
    n_minus = len(labels) - n_plus
    if n_plus != n_minus:
        raise UnbalancedSpectrum(
            f"spectrum has {n_plus} eigenvalues +1 and {n_minus} eigenvalues -1; "
            "no anticommuting partner exists"
        )
    order = np.concatenate([np.flatnonzero(labels == 1), np.flatnonzero(labels == -1)])
    return v[:, order].conj().T, n_plus


@dataclass(frozen=True, eq=False)
class BlockSplit:
    """Quadrants of a ``2h x 2h`` matrix in the ``2 x h`` block basis."""

    top_left: np.ndarray
    top_right: np.ndarray
    bottom_left: np.ndarray
    bottom_right: np.ndarray

    @classmethod
    def of(cls, matrix) -> "BlockSplit":
        b = np.asarray(matrix)
        h = b.shape[0] // 2
        if b.ndim != 2 or b.shape[0] != b.shape[1] or 2 * h != b.shape[0]:
            raise DimensionNotDivisible(f"matrix of shape {b.shape} has no 2x2 block split")
        return cls(b[:h, :h].copy(), b[:h, h:].copy(), b[h:, :h].copy(), b[h:, h:].copy())

    def reassemble(self) -> np.ndarray:
        return np.block([[self.top_left, self.top_right], [self.bottom_left, self.bottom_right]])


def offdiagonal_block(b_rotated, tol: float = CERT_TOL) -> np.ndarray:
    """Top-right block ``X`` of an observable that anticommutes with ``diag(1, -1)``."""
    blocks = BlockSplit.of(b_rotated)
    leak = max(max_abs(blocks.top_left), max_abs(blocks.bottom_right))
    if leak > tol:
        raise DiagonalLeakage(f"diagonal blocks of size {leak:.3e} (tol {tol:.1e})")
    x = blocks.top_right
    herm = max_abs(blocks.bottom_left - x.conj().T)
    if herm > tol:
        raise HermiticityLost(f"bottom-left block differs from X^dagger by {herm:.3e}")
    return x


def _nearest_unitary(x: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(x)
    return u @ vh


def second_step_unitary(x2, tol: float = CERT_TOL) -> np.ndarray:
    """``U2 = diag(1, i X2)``; leaves ``diag(1, -1)`` alone and maps ``B2`` to ``sy (x) 1``.

    ``X2`` is replaced by its polar unitary factor once it is certified
    unitary within ``tol``, so ``U2`` is unitary to machine precision.
    """
    x2 = np.asarray(x2, dtype=complex)
    ok, res = is_unitary(x2, tol)
    if not ok:
        raise NonUnitaryBlock(f"X2 deviates from unitarity by {res:.3e} (tol {tol:.1e})")
    h = x2.shape[0]
    u2 = np.zeros((2 * h, 2 * h), dtype=complex)
    u2[:h, :h] = np.eye(h)
    u2[h:, h:] = 1j * _nearest_unitary(x2)
    return u2


def reduce_observables(x_list, x2, tol: float = CERT_TOL) -> list[np.ndarray]:
    """Reduced operators ``-i X_y X2^dagger`` for ``y >= 3``.

    Each must be a Hermitian involution and the set must pairwise
    anticommute; the results are symmetrised before being returned.
    """
    x2 = np.asarray(x2)
    out = []
    for k, x in enumerate(x_list):
        c = -1j * np.asarray(x) @ x2.conj().T
        herm = max_abs(c - c.conj().T)
        if herm > tol:
            raise HermiticityLost(f"reduced operator {k} is non-Hermitian by {herm:.3e}")
        c = 0.5 * (c + c.conj().T)
        sq = max_abs(c @ c - np.eye(c.shape[0]))
        if sq > tol:
            raise NonDichotomic(f"reduced operator {k} squares to identity only to {sq:.3e}")
        out.append(c)
    if len(out) > 1:
        res = anticommutation_residuals(out)
        bad = [(i, j) for i in range(len(out)) for j in range(i + 1, len(out)) if res[i, j] > tol]
        if bad:
            raise AnticommutationLost(f"reduced operators fail to anticommute: {bad}", bad)
    return out


# -- recursion -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UnitaryFactorization:
    U: np.ndarray = field(repr=False)
    n: int
    m: int
    J: int
    canonical: np.ndarray = field(repr=False)
    sectors: tuple[int, int]
    residuals: np.ndarray = field(repr=False)
    unitarity_residual: float
    depth: int

    @property
    def d(self) -> int:
        return self.U.shape[0]

    def sector_signs(self) -> np.ndarray:
        j_plus, j_minus = self.sectors
        return np.concatenate([np.ones(j_plus), -np.ones(j_minus)])

    def reference_observables(self, signs=None) -> np.ndarray:
        """``B'_y (x) 1_J`` with the last observable carrying the sector signs."""
        signs = self.sector_signs() if signs is None else np.asarray(signs, dtype=float)
        eye = np.eye(self.J)
        ref = [np.kron(b, eye) for b in self.canonical]
        ref[-1] = np.kron(self.canonical[-1], np.diag(signs))
        return np.array(ref)

    def reference_states(self, signs=None) -> np.ndarray:
        """``rho'_x (x) 1_J / J`` for every string, sector-signed like the observables."""
        return bloch_states(self.reference_observables(signs))

    def observable_residuals(self, observables, signs=None) -> np.ndarray:
        ref = self.reference_observables(signs)
        return np.array([max_abs(conjugate(self.U, b) - r) for b, r in zip(observables, ref)])


def _terminal(c: np.ndarray, eig_tol: float) -> tuple[np.ndarray, tuple[int, int]]:
    w, v = eig_hermitian(c)
    labels = _classify(w, eig_tol)
    order = np.concatenate([np.flatnonzero(labels == 1), np.flatnonzero(labels == -1)])
    j_plus = int((labels == 1).sum())
    return v[:, order].conj().T, (j_plus, len(labels) - j_plus)


def _extract(obs: list[np.ndarray], dim: int, tol: Tolerances, depth: int):
    if not obs:
        return np.eye(dim, dtype=complex), depth, (dim, 0)
    if len(obs) == 1:
        v, sectors = _terminal(obs[0], tol.eigen)
        return v, depth, sectors
    u1, half = diagonalizing_step(obs[0], tol.eigen)
    xs = [offdiagonal_block(conjugate(u1, b), tol.certification) for b in obs[1:]]
    u2 = second_step_unitary(xs[0], tol.certification)
    x2u = u2[half:, half:] / 1j
    reduced = reduce_observables(xs[1:], x2u, tol.certification)
    v, depth, sectors = _extract(reduced, half, tol, depth + 1)
    return np.kron(np.eye(2), v) @ u2 @ u1, depth, sectors


def extract_unitary(observables, tol: Tolerances | None = None) -> UnitaryFactorization:
    """Map anticommuting observables onto the canonical Pauli forms.

    Raises :class:`~pomcert.errors.ExtractionError` subclasses when a
    step's precondition fails (anticommutation, balanced spectrum,
    divisibility of ``d`` by ``2**m``).
    """
    tol = tol or Tolerances()
    obs = np.asarray(observables, dtype=complex)
    if obs.ndim != 3 or obs.shape[1] != obs.shape[2]:
        raise DimensionMismatch(f"expected a stack of square matrices, got {obs.shape}")
    n, d = obs.shape[0], obs.shape[1]
    if n < 2:
        raise UnsupportedN(f"n must be >= 2 (got {n})")
    m = qubit_count(n)
    if d % 2**m:
        raise DimensionNotDivisible(f"d={d} is not a multiple of 2**m = {2**m}")
    res = anticommutation_residuals(obs)
    off = res - np.diag(np.diag(res))
    bad = [(i + 1, j + 1) for i in range(n) for j in range(i + 1, n) if off[i, j] > tol.certification]
    if bad:
        raise AnticommutationLost(f"observable pairs fail to anticommute: {bad}", bad)
    u, depth, sectors = _extract(list(obs), d, tol, 0)
    fact = UnitaryFactorization(
        U=u,
        n=n,
        m=m,
        J=d // 2**m,
        canonical=canonical_observables(n, allow_large=True).observables,
        sectors=sectors,
        residuals=np.zeros(n),
        unitarity_residual=is_unitary(u)[1],
        depth=depth,
    )
    object.__setattr__(fact, "residuals", fact.observable_residuals(obs))
    return fact


def certify_states(prep: PreparationEnsemble, fact: UnitaryFactorization, signs=None) -> np.ndarray:
    """Per-``delta`` residual ``max|U rho U^dagger - rho'_delta (x) 1_J / J|``."""
    if prep.d != fact.d or prep.n != fact.n:
        raise DimensionMismatch(
            f"ensemble (n={prep.n}, d={prep.d}) vs factorization (n={fact.n}, d={fact.d})"
        )
    ref = fact.reference_states(signs)
    return np.array([max_abs(conjugate(fact.U, r) - t) for r, t in zip(prep.states, ref)])


# -- full pipeline -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CertificationReport:
    n: int
    d: int
    success_probability: float
    classical_bound: Fraction
    quantum_bound: float
    parity_residual: float
    anticommutation_residuals: np.ndarray = field(repr=False)
    extraction: UnitaryFactorization | None
    failure_reason: str | None
    state_map_residuals: np.ndarray | None = field(repr=False)
    tolerances: Tolerances = Tolerances()

    @property
    def checks(self) -> dict[str, bool]:
        t = self.tolerances.certification
        off = self.anticommutation_residuals.copy()
        np.fill_diagonal(off, 0)
        diag = np.diag(self.anticommutation_residuals)
        fact = self.extraction
        return {
            "optimal_success": self.success_probability >= self.quantum_bound - t,
            "parity_oblivious": self.parity_residual <= t,
            "dichotomic": bool(np.all(diag <= t)),
            "anticommuting": bool(np.all(off <= t)),
            "extraction": fact is not None and bool(np.all(fact.residuals <= t)),
            "unitary": fact is not None and fact.unitarity_residual <= t,
            "state_map": self.state_map_residuals is not None
            and bool(np.all(self.state_map_residuals <= t)),
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def exceeds_classical(self) -> bool:
        return self.success_probability > float(self.classical_bound)


def certify(strategy: Strategy, tol: Tolerances | None = None) -> CertificationReport:
    """Score, check and (if possible) extract; failures become report entries."""
    tol = tol or Tolerances()
    n = strategy.n
    obs = strategy.measurements.observables
    fact = None
    reason = None
    state_res = None
    try:
        fact = extract_unitary(obs, tol)
    except ExtractionError as exc:
        reason = f"{type(exc).__name__}: {exc}"
    if fact is not None:
        state_res = certify_states(strategy.preparations, fact)
    return CertificationReport(
        n=n,
        d=strategy.d,
        success_probability=success_probability(strategy),
        classical_bound=classical_bound(n),
        quantum_bound=quantum_bound(n),
        parity_residual=check_parity_oblivious(strategy.preparations).max_residual,
        anticommutation_residuals=anticommutation_residuals(obs),
        extraction=fact,
        failure_reason=reason,
        state_map_residuals=state_res,
        tolerances=tol,
    )
