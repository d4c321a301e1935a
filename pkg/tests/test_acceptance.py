"""End-to-end acceptance checks, one test (and one printed verdict line) per criterion."""

import math
import time
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from pomcert.classical import classical_optimum, verify_model
from pomcert.operators import SIGMA_X, SIGMA_Y, SIGMA_Z, conjugate, random_unitary
from pomcert.optimal import (
    anticommutation_residuals,
    bloch_states,
    bloch_vector,
    canonical_observables,
    hamming,
    hypercube_distance_sq,
    make_rng,
    optimal_strategy,
    scramble,
    sector_observables,
)
from pomcert.protocol import (
    BitString,
    PreparationEnsemble,
    Strategy,
    check_parity_oblivious,
    classical_bound,
    parity_set,
    quantum_bound,
    success_probability,
)
from pomcert.selftest import certify, certify_states, extract_unitary


def test_1_quantum_optimum(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(2, 9):
        p = success_probability(optimal_strategy(n))
        worst = max(worst, abs(p - 0.5 * (1 + 1 / math.sqrt(n))))
    dt = time.perf_counter() - t0
    verdict(1, worst <= 1e-10 and dt < 5, f"n=2..8 max |S - (1+1/sqrt n)/2| = {worst:.2e} (tol 1e-10), {dt:.2f}s (< 5s)")


@pytest.mark.slow
def test_2_classical_bound(verdict):
    expected = {2: Fraction(3, 4), 3: Fraction(2, 3), 4: Fraction(5, 8), 5: Fraction(3, 5)}
    got, times = {}, {}
    for n in expected:
        t0 = time.perf_counter()
        sol = classical_optimum(n)
        times[n] = time.perf_counter() - t0
        assert verify_model(sol.model).feasible
        got[n] = sol.value
    small = sum(times[n] for n in (2, 3, 4))
    ok = all(got[n] == expected[n] == Fraction(n + 1, 2 * n) for n in expected)
    ok = ok and small < 10 and times[5] < 300
    values = ", ".join(f"n={n}: {v}" for n, v in got.items())
    verdict(2, ok, f"exact LP {values}; n<=4 {small:.1f}s (< 10s), n=5 {times[5]:.1f}s (< 300s)")


def test_3_self_test_round_trip(verdict):
    t0 = time.perf_counter()
    runs = fails = 0
    worst_obs = worst_state = 0.0
    for n in range(2, 7):
        base = optimal_strategy(n)
        for J in (1, 2, 3):
            for seed in range(20):
                s, _ = scramble(base, J, seed)
                f = extract_unitary(s.measurements.observables)
                r_obs = f.residuals.max()
                r_state = certify_states(s.preparations, f).max()
                worst_obs = max(worst_obs, r_obs)
                worst_state = max(worst_state, r_state)
                runs += 1
                fails += not (r_obs <= 1e-8 and r_state <= 1e-8)
    dt = time.perf_counter() - t0
    verdict(
        3,
        fails == 0 and dt < 120,
        f"{runs - fails}/{runs} runs; max observable residual {worst_obs:.2e}, "
        f"max state residual {worst_state:.2e} (tol 1e-8), {dt:.1f}s (< 120s)",
    )


def _mutate(states, delta, eps):
    rho = states[delta]
    k = int(np.argmin(np.diag(rho).real))
    e = np.zeros_like(rho)
    e[k, k] = 1
    out = states.copy()
    out[delta] = (1 - eps) * rho + eps * e
    return out


def test_4_parity_oblivious(verdict):
    eps = 1e-3
    worst_ok = 0.0
    weakest_reject = np.inf
    rng = np.random.default_rng(0)
    for n in range(2, 9):
        prep = optimal_strategy(n).preparations
        rep = check_parity_oblivious(prep)
        assert len(rep.per_s_residuals) == len(parity_set(n))
        worst_ok = max(worst_ok, rep.max_residual)
        deltas = range(2**n) if n <= 5 else rng.choice(2**n, size=8, replace=False)
        for delta in deltas:
            mutated = PreparationEnsemble(_mutate(np.array(prep.states), int(delta), eps))
            weakest_reject = min(weakest_reject, check_parity_oblivious(mutated).max_residual)
    ok = worst_ok <= 1e-12 and weakest_reject >= eps / 2
    verdict(4, ok, f"constructed max residual {worst_ok:.2e} (<= 1e-12); mutated min residual {weakest_reject:.2e} (>= {eps / 2:g})")


def test_5_geometry(verdict):
    dist_err = norm_err = anti_err = 0.0
    for n in range(2, 7):
        xs = [BitString.from_delta(k, n) for k in range(2**n)]
        for x in xs:
            norm_err = max(norm_err, abs(np.linalg.norm(bloch_vector(x)) - 1))
            anti_err = max(anti_err, abs(hypercube_distance_sq(x, x.complement()) - 4))
        for a, b in combinations(xs, 2):
            dist_err = max(dist_err, abs(hypercube_distance_sq(a, b) - 4 * hamming(a, b) / n))
    ok = max(dist_err, norm_err, anti_err) <= 1e-12
    verdict(5, ok, f"n=2..6 max |d^2 - 4h/n| {dist_err:.1e}, |norm - 1| {norm_err:.1e}, |antipodal - 4| {anti_err:.1e}")


def test_6_structural_invariants(verdict):
    anti = 0.0
    spec_err = orth_err = 0.0
    for n in range(2, 9):
        obs = canonical_observables(n).observables
        anti = max(anti, anticommutation_residuals(obs).max())
        states = optimal_strategy(n).preparations.states
        d = obs.shape[1]
        for delta, rho in enumerate(states):
            w = np.linalg.eigvalsh(rho)
            target = np.repeat([0.0, 2 / d], d // 2)
            spec_err = max(spec_err, np.max(np.abs(w - target)))
            comp = states[(2**n - 1) ^ delta]
            orth_err = max(orth_err, np.max(np.abs(rho @ comp)))
    ok = anti == 0 and spec_err <= 1e-10 and orth_err <= 1e-12
    verdict(6, ok, f"anticommutator residual {anti:g} (exact), spectrum error {spec_err:.1e} (<= 1e-10), max|rho_x rho_xbar| {orth_err:.1e} (<= 1e-12)")


def test_7_separation(verdict):
    worst = 0.0
    positive = True
    for n in range(2, 9):
        gap = quantum_bound(n) - float(classical_bound(n))
        positive &= gap > 0
        # difference of the two closed forms (1 + 1/sqrt n)/2 - (1 + 1/n)/2
        worst = max(worst, abs(gap - 0.5 * (1 / math.sqrt(n) - 1 / n)))
    n = 2
    literal = 1 / math.sqrt(n) - 1 / n
    verdict(
        7,
        positive and worst <= 1e-12,
        f"n=2..8 gap > 0, max |gap - (1/sqrt n - 1/n)/2| {worst:.1e}; "
        f"unhalved 1/sqrt n - 1/n = {literal:.6f} at n=2 vs gap {quantum_bound(2) - 0.75:.6f}",
    )


def test_8_conjugate_detection(verdict):
    f = extract_unitary([SIGMA_Z, SIGMA_Y, -SIGMA_X])
    ok = f.sectors == (0, 1)
    cases = [(3, 2, 3, "conjugate"), (3, 1, 1, "conjugate"), (3, 0, 2, "conjugate"),
             (7, 2, 1, "conjugate"), (5, 2, 1, "negated"), (5, 1, 2, "negated")]
    seen = []
    for n, jp, jm, flavour in cases:
        obs = sector_observables(n, jp, jm, flavour)
        states = bloch_states(obs)
        d = obs.shape[1]
        for seed in range(5):
            v = random_unitary(d, make_rng(seed))
            so = np.array([conjugate(v, b) for b in obs])
            ss = np.array([conjugate(v, r) for r in states])
            so = 0.5 * (so + so.conj().transpose(0, 2, 1))
            ss = 0.5 * (ss + ss.conj().transpose(0, 2, 1))
            rep = certify(Strategy.from_arrays(ss, so))
            got = rep.extraction.sectors if rep.extraction else None
            ok &= rep.passed and got == (jp, jm)
        seen.append(f"n={n} {flavour} ({jp},{jm})->{got}")
    verdict(8, ok, f"{{sz, sy, -sx}} -> {f.sectors}; " + "; ".join(seen))
