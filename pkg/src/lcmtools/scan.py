"""Two-parameter region scans over pole locations.

A scan fixes part of a spectrum and varies two parameters ``(p_a, p_b)`` on
a rectangular grid.  In ``"real"`` mode they are two extra real poles; in
``"conjugate"`` mode they are the real and imaginary parts of an extra pole
pair ``p_a +/- i p_b``.  Every cell is run through each requested method and
the verdicts are emitted as CSV rows in row-major order (``p_a`` outer,
``p_b`` inner, methods in the order given).

Scan spec (JSON)::

    {
      "plant": {"gain": 1, "zeros": [[-10, 0], [-15, 0], [-30, 0]],
                "poles": [[-5, 0]]},
      "mode": "real",
      "p_a": {"min": -35, "max": -5, "step": 0.5},
      "p_b": {"min": -35, "max": -5, "step": 0.5},
      "methods": [{"method": "theorem1", "mu": 1, "delta": 35},
                  {"method": "theorem1", "mu": 2, "delta": "auto"}]
    }
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .certify import (DEFAULT_SAMPLES, auto_delta, check_exact_polynomial,
                      check_exact_sampled, check_necessary, certify,
                      certify_corollary1, certify_theorem1)
from .exceptions import DomainError
from .plantfile import PlantFileError, plant_from_dict
from .positivity import expos
from .rational import RationalTF

MODES = ("real", "conjugate")
METHODS = ("necessary", "theorem1", "corollary1", "exact", "polynomial", "expos", "auto")
#: Methods that take ``mu`` and ``delta``.
SHIFTED = ("theorem1", "corollary1")
#: Verdict written for cells where a method does not apply.
NOT_APPLICABLE = "NotApplicable"
MAX_CELLS = 10_000_000
CSV_HEADER = "p_a,p_b,method,mu,delta,verdict"


class ScanSpecError(ValueError):
    """Invalid scan specification or grid."""


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    step: float

    def values(self):
        """Grid points ``lo, lo + step, ...`` up to ``hi`` (inclusive within 1e-9 steps)."""
        count = math.floor((self.hi - self.lo) / self.step + 1e-9) + 1
        return np.round(self.lo + self.step * np.arange(count), 12)


@dataclass(frozen=True)
class MethodSpec:
    method: str
    mu: Optional[int] = None
    delta: Optional[float] = None   # None means the auto-delta rule
    gamma: Optional[float] = None
    t_max: Optional[float] = None


@dataclass(frozen=True)
class ScanSpec:
    plant: RationalTF
    mode: str
    p_a: Axis
    p_b: Axis
    methods: tuple

    @property
    def shape(self):
        return self.p_a.values().size, self.p_b.values().size


@dataclass(frozen=True)
class ScanRow:
    p_a: float
    p_b: float
    method: str
    mu: Optional[int]
    delta: Optional[float]
    verdict: str

    def csv(self):
        fmt = lambda x: "" if x is None else "%.12g" % x
        return ",".join([fmt(self.p_a), fmt(self.p_b), self.method,
                         "" if self.mu is None else str(self.mu), fmt(self.delta), self.verdict])


def _axis(doc, key):
    if not isinstance(doc, dict) or not all(k in doc for k in ("min", "max", "step")):
        raise ScanSpecError(f"'{key}' needs 'min', 'max' and 'step'")
    try:
        lo, hi, step = (float(doc[k]) for k in ("min", "max", "step"))
    except (TypeError, ValueError):
        raise ScanSpecError(f"'{key}' bounds must be numbers") from None
    if not all(map(math.isfinite, (lo, hi, step))):
        raise ScanSpecError(f"'{key}' bounds must be finite")
    if step <= 0:
        raise ScanSpecError(f"'{key}' step must be positive")
    if hi < lo:
        raise ScanSpecError(f"'{key}' max must be >= min")
    return Axis(lo, hi, step)


def _method(doc):
    if isinstance(doc, str):
        doc = {"method": doc}
    if not isinstance(doc, dict) or doc.get("method") not in METHODS:
        raise ScanSpecError(f"method entry {doc!r} must name one of {METHODS}")
    name = doc["method"]
    mu = doc.get("mu", 1 if name in SHIFTED else None)
    if mu is not None and (isinstance(mu, bool) or not isinstance(mu, int) or mu < 1):
        raise ScanSpecError(f"mu must be a positive integer, got {mu!r}")
    delta = doc.get("delta", "auto")
    if delta == "auto":
        delta = None
    elif isinstance(delta, bool) or not isinstance(delta, (int, float)):
        raise ScanSpecError(f"delta must be a number or 'auto', got {delta!r}")
    gamma = doc.get("gamma")
    if name == "polynomial" and gamma is None:
        raise ScanSpecError("the polynomial method needs 'gamma'")
    return MethodSpec(name, mu if name in SHIFTED else None,
                      None if delta is None else float(delta),
                      None if gamma is None else float(gamma), doc.get("t_max"))


def scan_spec_from_dict(doc):
    if not isinstance(doc, dict):
        raise ScanSpecError("scan spec must be a JSON object")
    mode = doc.get("mode", "real")
    if mode not in MODES:
        raise ScanSpecError(f"mode must be one of {MODES}, got {mode!r}")
    try:
        plant = plant_from_dict(doc.get("plant"), "plant")
    except PlantFileError as exc:
        raise ScanSpecError(str(exc)) from exc
    methods = doc.get("methods")
    if not isinstance(methods, list) or not methods:
        raise ScanSpecError("'methods' must be a nonempty list")
    spec = ScanSpec(plant, mode, _axis(doc.get("p_a"), "p_a"), _axis(doc.get("p_b"), "p_b"),
                    tuple(_method(m) for m in methods))
    rows, cols = spec.shape
    if rows * cols * len(spec.methods) > MAX_CELLS:
        raise ScanSpecError(f"grid too large: {rows} x {cols} cells")
    return spec


def load_scan_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise PlantFileError(exc.msg, str(path), exc.lineno, exc.colno) from exc
    except OSError as exc:
        raise PlantFileError(exc.strerror or str(exc), str(path)) from exc
    return scan_spec_from_dict(doc)


def cell_system(spec, a, b):
    """Transfer function of grid cell ``(a, b)``."""
    extra = [a, b] if spec.mode == "real" else [complex(a, b), complex(a, -b)]
    return RationalTF(spec.plant.gain, spec.plant.zeros, spec.plant.poles + tuple(extra))


def run_method(tf, ms):
    """``(mu, delta, verdict)`` of one method on one system."""
    name = ms.method
    try:
        if name in SHIFTED:
            delta = auto_delta(tf, ms.mu) if ms.delta is None else ms.delta
            run = certify_theorem1 if name == "theorem1" else certify_corollary1
            return ms.mu, delta, run(tf, ms.mu, delta).verdict.value
        if name == "necessary":
            return None, None, check_necessary(tf).verdict.value
        if name == "exact":
            return None, None, check_exact_sampled(tf, ms.t_max, DEFAULT_SAMPLES).verdict.value
        if name == "polynomial":
            return None, None, check_exact_polynomial(tf, ms.gamma).verdict.value
        if name == "expos":
            return None, None, expos(tf).verdict.value
        return None, None, certify(tf).verdict.value
    except DomainError:
        mu = ms.mu if name in SHIFTED else None
        return mu, ms.delta, NOT_APPLICABLE


def _scan_row(args):
    spec, a = args
    out = []
    for b in spec.p_b.values():
        tf = cell_system(spec, float(a), float(b))
        for ms in spec.methods:
            mu, delta, verdict = run_method(tf, ms)
            out.append(ScanRow(float(a), float(b), ms.method, mu, delta, verdict))
    return out


def run_scan(spec, jobs=1):
    """All rows of the scan in deterministic order.

    ``jobs > 1`` evaluates grid rows in a process pool; results are
    reassembled in grid order regardless of completion order.
    """
    tasks = [(spec, a) for a in spec.p_a.values()]
    if jobs <= 1:
        chunks = map(_scan_row, tasks)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_scan_row, tasks))
    return [row for chunk in chunks for row in chunk]


def write_csv(rows, fh):
    fh.write(CSV_HEADER + "\n")
    for row in rows:
        fh.write(row.csv() + "\n")


def certified_cells(rows, method, mu=None):
    """Set of ``(p_a, p_b)`` cells with a Certified/Positive verdict for one method."""
    ok = {"Certified", "Positive", "PositiveSampled"}
    return {(r.p_a, r.p_b) for r in rows
            if r.method == method and (mu is None or r.mu == mu) and r.verdict in ok}
