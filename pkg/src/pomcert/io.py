"""JSON and CSV interchange formats.

Matrix
    ``{"dim": d, "entries": [[re, im], ...]}`` with ``d*d`` pairs in
    row-major order.  Numbers are written with 17 significant digits, which
    round-trips IEEE doubles exactly; numeric strings are accepted on input.
Strategy
    ``{"n", "d", "preparations": [matrix, ...], "measurements": [matrix, ...],
    "label", "seed"}``.

All JSON is written canonically (sorted keys, fixed float format) so that
re-runs are byte-identical.
"""

from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ParseError
from .protocol import BitString, Strategy
from .selftest import CertificationReport, UnitaryFactorization
from .optimal import bloch_vector, hamming, hypercube_distance_sq


# -- canonical JSON ------------------------------------------------------------


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite float {x}")
    s = format(x, ".17g")
    if "." not in s and "e" not in s:
        s += ".0"
    return s


def _encode(obj, indent: str, level: int) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    pad = "\n" + indent * (level + 1)
    end = "\n" + indent * level
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        parts = [_encode(v, indent, level + 1) for v in seq]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(parts) + "]"
        return "[" + pad + ("," + pad).join(parts) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj, " ", 0) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


# -- matrices ------------------------------------------------------------------


def encode_matrix(m) -> dict:
    a = np.asarray(m, dtype=complex)
    return {
        "dim": int(a.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def _number(v, where: str) -> float:
    if isinstance(v, bool):
        raise ParseError(f"{where}: expected a number, got a boolean")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            pass
    raise ParseError(f"{where}: expected a number, got {v!r}")


def decode_matrix(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object with 'dim' and 'entries'")
    dim = obj.get("dim")
    entries = obj.get("entries")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"{where}.dim: expected a positive integer, got {dim!r}")
    if not isinstance(entries, list) or len(entries) != dim * dim:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise ParseError(f"{where}.entries: expected {dim * dim} [re, im] pairs, got {got}")
    out = np.empty(dim * dim, dtype=complex)
    for k, pair in enumerate(entries):
        w = f"{where}.entries[{k}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{w}: expected [re, im]")
        out[k] = complex(_number(pair[0], w), _number(pair[1], w))
    return out.reshape(dim, dim)


# -- strategies ----------------------------------------------------------------


def strategy_to_json(strategy: Strategy, seed: int | None = None) -> dict:
    out = {
        "n": strategy.n,
        "d": strategy.d,
        "label": strategy.label,
        "preparations": [encode_matrix(r) for r in strategy.preparations.states],
        "measurements": [encode_matrix(b) for b in strategy.measurements.observables],
    }
    if seed is not None:
        out["seed"] = int(seed)
    return out


def strategy_from_json(obj, tol: float = 1e-9) -> Strategy:
    if not isinstance(obj, dict):
        raise ParseError("strategy: expected a JSON object")
    for key in ("n", "d", "preparations", "measurements"):
        if key not in obj:
            raise ParseError(f"strategy: missing field {key!r}")
    n, d = obj["n"], obj["d"]
    if not isinstance(n, int) or not isinstance(d, int):
        raise ParseError("strategy: 'n' and 'd' must be integers")
    preps, meas = obj["preparations"], obj["measurements"]
    if not isinstance(preps, list) or len(preps) != 2**n:
        raise ParseError(f"preparations: expected {2**n} matrices for n={n}")
    if not isinstance(meas, list) or len(meas) != n:
        raise ParseError(f"measurements: expected {n} matrices for n={n}")
    states = [decode_matrix(m, f"preparations[{k}]") for k, m in enumerate(preps)]
    obs = [decode_matrix(m, f"measurements[{k}]") for k, m in enumerate(meas)]
    for where, mats in (("preparations", states), ("measurements", obs)):
        for k, m in enumerate(mats):
            if m.shape[0] != d:
                raise ParseError(f"{where}[{k}].dim: {m.shape[0]} != d={d}")
    return Strategy.from_arrays(states, obs, label=str(obj.get("label", "")), tol=tol)


def load_strategy(path, tol: float = 1e-9) -> Strategy:
    return strategy_from_json(read_json(path), tol)


def save_strategy(path, strategy: Strategy, seed: int | None = None) -> None:
    write_json(path, strategy_to_json(strategy, seed))


# -- reports -------------------------------------------------------------------


def fraction_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def factorization_to_json(fact: UnitaryFactorization) -> dict:
    return {
        "U": encode_matrix(fact.U),
        "n": fact.n,
        "m": fact.m,
        "J": fact.J,
        "depth": fact.depth,
        "sectors": list(fact.sectors),
        "residuals": [float(r) for r in fact.residuals],
        "unitarity_residual": float(fact.unitarity_residual),
    }


def report_to_json(report: CertificationReport, seed: int | None = None) -> dict:
    out = {
        "n": report.n,
        "d": report.d,
        "success_probability": report.success_probability,
        "classical_bound": float(report.classical_bound),
        "classical_bound_exact": fraction_str(report.classical_bound),
        "quantum_bound": report.quantum_bound,
        "parity_residual": report.parity_residual,
        "anticommutation_residuals": report.anticommutation_residuals.tolist(),
        "extraction": None if report.extraction is None else factorization_to_json(report.extraction),
        "failure_reason": report.failure_reason,
        "state_map_residuals": None
        if report.state_map_residuals is None
        else [float(r) for r in report.state_map_residuals],
        "pass_flags": report.checks,
        "exceeds_classical": report.exceeds_classical,
        "passed": report.passed,
        "tolerances": {
            "structural": report.tolerances.structural,
            "certification": report.tolerances.certification,
            "eigen": report.tolerances.eigen,
        },
    }
    if seed is not None:
        out["seed"] = int(seed)
    return out


# -- geometry CSV --------------------------------------------------------------


def geometry_rows(n: int):
    """Vertex rows and pair rows for the Clifford-Bloch hypercube."""
    strings = [BitString.from_delta(k, n) for k in range(2**n)]
    vertices = []
    for x in strings:
        r = bloch_vector(x)
        vertices.append([x.delta, str(x), *r.tolist(), float(np.linalg.norm(r))])
    pairs = []
    for a in range(len(strings)):
        for b in range(a + 1, len(strings)):
            h = hamming(strings[a], strings[b])
            pairs.append([a, b, h, hypercube_distance_sq(strings[a], strings[b]), 4 * h / n])
    return vertices, pairs


def write_geometry(n: int, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    vertices, pairs = geometry_rows(n)
    vpath = out_dir / f"vertices_n{n}.csv"
    ppath = out_dir / f"pairs_n{n}.csv"
    header_v = ["delta", "bits", *[f"coord_{y}" for y in range(1, n + 1)], "norm"]
    header_p = ["delta_a", "delta_b", "hamming", "dist_sq", "expected_4h_over_n"]
    for path, header, rows in ((vpath, header_v, vertices), (ppath, header_p, pairs)):
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return vpath, ppath
