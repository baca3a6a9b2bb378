"""External positivity: nonnegativity of the impulse response.

Orders one and two have exact pole/zero characterizations; higher orders
fall back to sampling the analytic impulse response.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .certify import (DEFAULT_SAMPLES, SAMPLE_TOL, certify, default_t_max, sample_grid,
                      tail_negative, widen_search)
from .exceptions import DomainError
from .rational import CLUSTER_TOL, partial_fractions


class ExPos(str, Enum):
    POSITIVE = "Positive"
    NOT_POSITIVE = "NotPositive"
    POSITIVE_SAMPLED = "PositiveSampled"


@dataclass(frozen=True)
class ExPosVerdict:
    """Verdict on ``h(t) >= 0``.

    ``witness`` is a time with ``h(witness) < 0`` for NotPositive verdicts;
    ``0.0`` together with ``dirac=True`` flags a negative impulse at the origin.
    """

    verdict: ExPos
    method: str
    witness: Optional[float] = None
    dirac: bool = False
    min_value: Optional[float] = None
    detail: str = ""

    @property
    def positive(self):
        return self.verdict is not ExPos.NOT_POSITIVE


def _pole_shift(tf):
    return tf.sigma if tf.n else 0.0


def _scan_continuous_part(tf, t_max, n_samples):
    """Sample the strictly proper part of ``h`` normalized by ``exp(-sigma t)``.

    Returns ``(grid, normalized, raw)``.
    """
    grid = sample_grid(t_max, n_samples)
    pfe = partial_fractions(tf)
    shift = _pole_shift(tf)
    normalized = pfe.evaluate(grid, shift=shift)
    raw = normalized * np.exp(shift * grid)
    return grid, normalized, raw


def _pick_witness(normalized, raw):
    """Index of a negative sample: the most negative raw value when it clears
    the threshold in absolute terms, else the most negative normalized one."""
    i = int(np.argmin(raw))
    if raw[i] < -SAMPLE_TOL:
        return i
    return int(np.argmin(normalized))


def _negative_witness(tf, method, detail):
    """NotPositive verdict with a sampled witness, widening the horizon if needed."""
    if tf.n == tf.m and tf.gain < 0:
        return ExPosVerdict(ExPos.NOT_POSITIVE, method, 0.0, dirac=True,
                            detail=detail + "; negative impulse at t = 0")
    t_max = default_t_max(tf)
    for _ in range(5):
        grid, normalized, raw = _scan_continuous_part(tf, t_max, DEFAULT_SAMPLES)
        if normalized.min() < -SAMPLE_TOL:
            i = _pick_witness(normalized, raw)
            return ExPosVerdict(ExPos.NOT_POSITIVE, method, float(grid[i]),
                                min_value=float(raw[i]), detail=detail)
        t_max *= 10.0
    return ExPosVerdict(ExPos.NOT_POSITIVE, method, None,
                        detail=detail + "; no sampled witness found")


def expos_order1(tf):
    """Exact test for one pole: positive iff ``K > 0`` and ``B(p) >= 0``."""
    if tf.n != 1:
        raise DomainError(f"expos_order1 needs n = 1, got n = {tf.n}")
    if tf.m > 1:
        raise DomainError("improper transfer function")
    p = tf.poles[0].real
    b_at_p = float(tf.num(p))
    if tf.gain <= 0:
        return _negative_witness(tf, "order1", "K <= 0")
    if b_at_p < 0:
        return _negative_witness(tf, "order1", f"B(p1) = {b_at_p:.6g} < 0")
    return ExPosVerdict(ExPos.POSITIVE, "order1")


def expos_order2(tf):
    """Exact test for two poles without pole/zero cancellation.

    Positive iff the poles are real, ``K > 0``, ``B(p1) >= 0``,
    ``B'(p1) >= 0`` and ``B(p1) >= B(p2)`` with ``p1 >= p2``.
    """
    if tf.n != 2:
        raise DomainError(f"expos_order2 needs n = 2, got n = {tf.n}")
    if tf.m > 2:
        raise DomainError("improper transfer function")
    for z in tf.zeros:
        for p in tf.poles:
            if abs(z - p) <= CLUSTER_TOL:
                raise DomainError(f"pole/zero cancellation at {p}")
    if any(p.imag != 0 for p in tf.poles):
        return _negative_witness(tf, "order2", "complex-conjugate poles")
    if tf.gain <= 0:
        return _negative_witness(tf, "order2", "K <= 0")
    p1, p2 = sorted((p.real for p in tf.poles), reverse=True)
    B = tf.num
    b1, b2, db1 = float(B(p1)), float(B(p2)), float(B.derivative()(p1))
    if b1 < 0:
        return _negative_witness(tf, "order2", f"B(p1) = {b1:.6g} < 0")
    if db1 < 0:
        return _negative_witness(tf, "order2", f"B'(p1) = {db1:.6g} < 0")
    if b1 < b2:
        return _negative_witness(tf, "order2", f"B(p1) = {b1:.6g} < B(p2) = {b2:.6g}")
    return ExPosVerdict(ExPos.POSITIVE, "order2")


def expos_oracle(tf, t_max=None, n_samples=DEFAULT_SAMPLES):
    """Sample the impulse response; NotPositive on the first clearly negative value.

    If the grid shows no violation but the response is eventually negative
    (negative or oscillating leading mode), the horizon is widened to find a
    witness.  For ``n == m`` the Dirac term ``K delta(t)`` must have ``K > 0`` as well.
    The comparison uses ``h(t) exp(-sigma t)`` with ``sigma`` the pole
    abscissa, so the -1e-10 threshold is relative to the slowest mode.
    """
    if tf.n < tf.m:
        raise DomainError("improper transfer function")
    if tf.n == tf.m and tf.gain < 0:
        return ExPosVerdict(ExPos.NOT_POSITIVE, "oracle", 0.0, dirac=True,
                            detail="negative impulse at t = 0")
    if tf.n == 0:
        return ExPosVerdict(ExPos.POSITIVE_SAMPLED, "oracle", detail="pure gain")
    t_max = default_t_max(tf) if t_max is None else t_max
    grid, normalized, raw = _scan_continuous_part(tf, t_max, n_samples)
    if normalized.min() < -SAMPLE_TOL:
        i = _pick_witness(normalized, raw)
        return ExPosVerdict(ExPos.NOT_POSITIVE, "oracle", float(grid[i]),
                            min_value=float(raw[i]),
                            detail=f"h({grid[i]:.6g}) = {raw[i]:.3e}")
    pfe = partial_fractions(tf)
    if tail_negative(pfe.terms):
        shift = _pole_shift(tf)
        found = widen_search(lambda t: pfe.evaluate(t, shift=shift), t_max, n_samples)
        if found is not None:
            t, val = found
            raw_val = val * float(np.exp(shift * t))
            return ExPosVerdict(ExPos.NOT_POSITIVE, "oracle", t, min_value=raw_val,
                                detail=f"h({t:.6g}) = {raw_val:.3e} (negative tail)")
        return ExPosVerdict(ExPos.NOT_POSITIVE, "oracle", None,
                            detail="negative asymptotic tail; no sampled witness")
    return ExPosVerdict(ExPos.POSITIVE_SAMPLED, "oracle", min_value=float(raw.min()),
                        detail=f"min h = {raw.min():.3e} over {grid.size} samples on [0, {t_max:.6g}]")


def expos(tf):
    """Exact verdict for ``n <= 2`` (when applicable), sampled oracle otherwise."""
    try:
        if tf.n == 1:
            return expos_order1(tf)
        if tf.n == 2:
            return expos_order2(tf)
    except DomainError:
        pass
    return expos_oracle(tf)


def lcm_implies_expos_check(tf):
    """False only if ``tf`` is certified LCM yet found not externally positive."""
    if not certify(tf).certified:
        return True
    try:
        return expos(tf).verdict is not ExPos.NOT_POSITIVE
    except DomainError:
        return True
