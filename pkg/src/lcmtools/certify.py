"""Certificates of logarithmic complete monotonicity for rational functions.

``H(s) = K prod(s - z_i) / prod(s - p_i)`` is LCM exactly when ``K > 0`` and
``g(t) = sum exp(p_i t) - sum exp(z_i t)`` is nonnegative for all ``t >= 0``.
The functions below decide or bound that property in several ways:

* :func:`check_necessary` -- cheap refutations from degree, dominant real
  parts and (for ``n == m``) the first moment.
* :func:`check_exact_sampled` -- brute-force sampling of ``g``.  Sound for
  refutation; a pass only means no violation was seen on the grid.
* :func:`check_exact_polynomial` -- exact decision for commensurable real
  spectra via Sturm sequences in rational arithmetic.
* :func:`certify_theorem1`, :func:`certify_corollary1` -- finite sufficient
  conditions based on weak majorization of the shifted spectrum.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import DomainError
from .majorization import PREFIX_SLACK, majorization_gap
from .rational import Polynomial, RationalTF, _split_conjugates

#: A sampled value of the mode-normalized g(t) below this refutes.
SAMPLE_TOL = 1e-10
DEFAULT_SAMPLES = 20000
#: Decades by which a sampled horizon is widened when the tail is negative.
TAIL_DECADES = 4


class Verdict(str, Enum):
    CERTIFIED = "Certified"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


class Method(str, Enum):
    NECESSARY = "necessary"
    EXACT_SAMPLED = "exact_sampled"
    EXACT_POLYNOMIAL = "exact_polynomial"
    THEOREM1 = "theorem1"
    COROLLARY1 = "corollary1"


@dataclass(frozen=True)
class LcmCertificate:
    """Outcome of one certification attempt.

    ``witness`` is a dict: ``{"t": ...}`` for a sampled violation,
    ``{"condition": ...}`` for a failed necessary condition, an interval for
    the polynomial test, or the failing inequality of a sufficient test.
    """

    verdict: Verdict
    method: Method
    mu: Optional[int] = None
    delta: Optional[float] = None
    witness: Optional[dict] = None
    detail: str = ""

    @property
    def certified(self):
        return self.verdict is Verdict.CERTIFIED

    @property
    def refuted(self):
        return self.verdict is Verdict.REFUTED


@dataclass(frozen=True)
class ShiftedSpectrum:
    """Shifted and powered spectrum used by the complex-spectrum certificate.

    Real poles come first (``n_r`` of them), then complex poles in conjugate
    pairs, then zeros.  ``w`` carries powered real poles, ``v`` the powered
    magnitudes of complex poles and of all zeros.
    """

    mu: int
    delta: float
    n_r: int
    theta: np.ndarray
    phi: np.ndarray
    w: np.ndarray
    v: np.ndarray
    n: int = field(default=0)
    m: int = field(default=0)


def _spectrum(tf):
    return np.array(tf.poles + tf.zeros, dtype=complex)


def _min_real(tf):
    s = _spectrum(tf)
    return float(s.real.min()) if s.size else 0.0


def angle_bound(mu):
    """Largest admissible ``|angle(lambda + delta)|`` for a given ``mu`` (exclusive)."""
    return math.pi / 2 if mu <= 1 else math.pi / (2 * (mu - 1))


def auto_delta(tf, mu=1):
    """Default shift: one unit right of the leftmost spectral point.

    For ``mu > 2`` the shift grows further until every complex pole and zero
    satisfies the angle bound of :func:`angle_bound`.
    """
    delta = 1.0 + max(0.0, -_min_real(tf))
    bound = angle_bound(mu)
    if bound < math.pi / 2:
        slope = math.tan(bound)
        for lam in _spectrum(tf):
            if lam.imag != 0.0:
                delta = max(delta, abs(lam.imag) / slope - lam.real + 1.0)
    return delta


def sample_grid(t_max, n_samples=DEFAULT_SAMPLES):
    """Union of a uniform grid on ``[0, t_max]`` and a log grid on ``[1e-6, t_max]``."""
    if t_max <= 0:
        raise DomainError("t_max must be positive")
    n_lin = max(2, n_samples // 2)
    grid = np.linspace(0.0, t_max, n_lin)
    if t_max > 1e-6:
        grid = np.union1d(grid, np.geomspace(1e-6, t_max, max(2, n_samples - n_lin)))
    return grid


def default_t_max(tf):
    """Fifty time constants of the slowest mode among poles and zeros.

    Extended to two periods of the slowest oscillation when that is longer.
    """
    spec = _spectrum(tf)
    rates = [abs(v.real) for v in spec if abs(v.real) > 1e-12]
    freqs = [abs(v.imag) for v in spec if abs(v.imag) > 1e-12]
    t_max = 50.0 / min(rates) if rates else 50.0
    if freqs:
        t_max = max(t_max, 4.0 * np.pi / min(freqs))
    return t_max


def mixed_relaxation(tf):
    """``G(s) = sum 1/(s - p_i) - sum 1/(s - z_j)`` as a rational function.

    Its impulse response is ``g(t) = sum exp(p_i t) - sum exp(z_j t)``.
    """
    P, Z = tf.den, Polynomial.from_roots(tf.zeros)
    num = P.derivative() * Z - Z.derivative() * P
    if num.is_zero:
        raise DomainError("poles and zeros coincide; G(s) is identically zero")
    zeros = num.roots() if num.degree else []
    return RationalTF(num.coeffs[0], zeros, tf.poles + tf.zeros)


def mixed_relaxation_response(tf, t, shift=0.0):
    """``g(t) * exp(-shift * t)`` evaluated directly from the spectrum."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    p = np.array(tf.poles, dtype=complex) - shift
    z = np.array(tf.zeros, dtype=complex) - shift
    val = np.exp(np.outer(t, p)).sum(axis=1) - np.exp(np.outer(t, z)).sum(axis=1)
    return val.real


def check_necessary(tf):
    """Refute LCM from the necessary conditions, else return Inconclusive."""
    def refuted(cond, detail):
        return LcmCertificate(Verdict.REFUTED, Method.NECESSARY,
                              witness={"condition": cond}, detail=detail)

    if tf.gain <= 0:
        return refuted("gain", "K <= 0")
    if tf.n < tf.m:
        return refuted("a", f"n={tf.n} < m={tf.m}")
    if tf.m and tf.n:
        pmax = max(p.real for p in tf.poles)
        zmax = max(z.real for z in tf.zeros)
        if pmax < zmax - PREFIX_SLACK:
            return refuted("b", f"max Re(p)={pmax:.12g} < max Re(z)={zmax:.12g}")
    if tf.n == tf.m:
        sp = sum(p.real for p in tf.poles)
        sz = sum(z.real for z in tf.zeros)
        if sp < sz - PREFIX_SLACK:
            return refuted("c", f"sum p={sp:.12g} < sum z={sz:.12g}")
    return LcmCertificate(Verdict.INCONCLUSIVE, Method.NECESSARY)


def tail_negative(terms, tol=1e-9):
    """Whether ``sum c t**(k-1) exp(lam t)`` is negative for arbitrarily large ``t``.

    ``terms`` holds ``(lam, k, c)`` triples (conjugate-closed).  Terms with
    nearly equal ``lam`` and equal ``k`` are merged.  Returns True when the
    leading part (largest real part, then highest power) is a negative real
    exponential or purely oscillatory; False when it is positive or mixes
    real and oscillatory modes.
    """
    groups = []
    for lam, k, c in terms:
        lam = complex(lam)
        for g in groups:
            if g[1] == k and abs(g[0] - lam) <= tol:
                g[2] += c
                break
        else:
            groups.append([lam, k, complex(c)])
    scale = max((abs(g[2]) for g in groups), default=0.0)
    groups = [g for g in groups if abs(g[2]) > 1e-12 * scale]
    if not groups:
        return False
    sigma = max(g[0].real for g in groups)
    dominant = [g for g in groups if g[0].real >= sigma - tol]
    k_max = max(g[1] for g in dominant)
    lead = [g for g in dominant if g[1] == k_max]
    oscillating = [abs(g[0].imag) > tol for g in lead]
    if all(oscillating):
        return True
    if any(oscillating):
        return False
    return sum(g[2] for g in lead).real < 0


def widen_search(evaluate, t_max, n_samples=DEFAULT_SAMPLES, decades=TAIL_DECADES):
    """Sample ``evaluate`` on horizons ``t_max * 10**j``, ``j = 1 .. decades``.

    Returns ``(t, value)`` of the first sample below ``-SAMPLE_TOL`` or None.
    """
    for j in range(1, decades + 1):
        grid = sample_grid(t_max * 10.0 ** j, n_samples)
        vals = evaluate(grid)
        i = int(np.argmin(vals))
        if vals[i] < -SAMPLE_TOL:
            return float(grid[i]), float(vals[i])
    return None


def check_exact_sampled(tf, t_max=None, n_samples=DEFAULT_SAMPLES):
    """Sample ``g(t)`` and refute on the first clearly negative value.

    Values are normalized by the dominant exponential ``exp(sigma t)``,
    ``sigma = max Re`` over poles and zeros, so the tolerance is relative to
    the slowest mode and late-time violations are not lost to underflow.
    When the grid shows no violation but the asymptotic tail of ``g`` is
    negative (see :func:`tail_negative`), the horizon is widened by up to
    four decades to find a witness.  A Certified verdict here is a sampling
    statement, not a proof.
    """
    if tf.gain <= 0:
        return LcmCertificate(Verdict.REFUTED, Method.EXACT_SAMPLED,
                              witness={"condition": "gain"}, detail="K <= 0")
    t_max = default_t_max(tf) if t_max is None else t_max
    grid = sample_grid(t_max, n_samples)
    spec = _spectrum(tf)
    shift = float(spec.real.max()) if spec.size else 0.0
    g = mixed_relaxation_response(tf, grid, shift)
    i = int(np.argmin(g)) if g.size else 0
    found = (float(grid[i]), float(g[i])) if g.size and g[i] < -SAMPLE_TOL else None
    if found is None:
        terms = [(p, 1, 1.0) for p in tf.poles] + [(z, 1, -1.0) for z in tf.zeros]
        if tail_negative(terms):
            found = widen_search(lambda t: mixed_relaxation_response(tf, t, shift), t_max, n_samples)
            if found is None:
                return LcmCertificate(Verdict.REFUTED, Method.EXACT_SAMPLED,
                                      witness={"t": None, "asymptotic": True},
                                      detail="g(t) has a negative asymptotic tail")
    if found is not None:
        t, val = found
        return LcmCertificate(Verdict.REFUTED, Method.EXACT_SAMPLED,
                              witness={"t": t, "g_normalized": val},
                              detail=f"g(t)*exp(-sigma*t) = {val:.3e} at t = {t:.6g} (sigma = {shift:.6g})")
    return LcmCertificate(Verdict.CERTIFIED, Method.EXACT_SAMPLED,
                          detail=f"{grid.size} samples on [0, {t_max:.6g}]")


# --- exact polynomial test ------------------------------------------------
# Polynomials below are lists of Fractions in descending powers.

def _trim(a):
    i = 0
    while i < len(a) - 1 and a[i] == 0:
        i += 1
    return a[i:]


def _deriv(a):
    d = len(a) - 1
    return _trim([c * (d - i) for i, c in enumerate(a[:-1])]) if d > 0 else [Fraction(0)]


def _divmod(a, b):
    a, b = _trim(list(a)), _trim(b)
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    r = list(a)
    for i in range(len(q)):
        c = r[i] / b[0]
        q[i] = c
        for j, bj in enumerate(b):
            r[i + j] -= c * bj
    return _trim(q), _trim(r[len(q):] or [Fraction(0)])


def _is_zero(a):
    return len(a) == 1 and a[0] == 0


def _monic(a):
    return [c / a[0] for c in a]


def _gcd(a, b):
    a, b = _trim(a), _trim(b)
    while not _is_zero(b):
        a, b = b, _divmod(a, b)[1]
    return _monic(a)


def _sub(a, b):
    n = max(len(a), len(b))
    a = [Fraction(0)] * (n - len(a)) + list(a)
    b = [Fraction(0)] * (n - len(b)) + list(b)
    return _trim([x - y for x, y in zip(a, b)])


def _mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _evalf(a, x):
    acc = Fraction(0)
    for c in a:
        acc = acc * x + c
    return acc


def _odd_multiplicity_part(f):
    """Product of the square-free factors of odd multiplicity (Yun)."""
    f = _monic(f)
    if len(f) == 1:
        return [Fraction(1)]
    fp = _deriv(f)
    a = _gcd(f, fp)
    b = _divmod(f, a)[0]
    c = _divmod(fp, a)[0]
    d = _sub(c, _deriv(b))
    out, i = [Fraction(1)], 1
    while len(b) > 1:
        a = _gcd(b, d)
        if i % 2 == 1:
            out = _mul(out, a)
        b = _divmod(b, a)[0]
        c = _divmod(d, a)[0]
        d = _sub(c, _deriv(b))
        i += 1
    return out


def _sturm(f):
    seq = [f, _deriv(f)]
    while len(seq[-1]) > 1:
        r = _divmod(seq[-2], seq[-1])[1]
        if _is_zero(r):
            break
        seq.append([-c for c in r])
    return seq


def _variations(seq, x=None):
    """Sign changes of the Sturm sequence at ``x`` (``None`` means +infinity)."""
    signs = []
    for p in seq:
        v = p[0] if x is None else _evalf(p, x)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _commensurable_exponents(values, gamma):
    out = []
    for v in values:
        if abs(v.imag) > 0:
            raise DomainError("exact polynomial test needs a real spectrum; "
                              "use check_exact_sampled")
        e = v.real / gamma
        k = round(e)
        if abs(e - k) > 1e-9:
            raise DomainError(f"{v.real} is not an integer multiple of gamma={gamma}; "
                              "use check_exact_sampled")
        out.append(int(k))
    return out


def check_exact_polynomial(tf, gamma):
    """Exact LCM decision for commensurable real spectra.

    With ``x = exp(gamma t)`` the exponential sums become
    ``sum x**(p_i/gamma) - sum x**(z_j/gamma)``.  After multiplying by the
    power of ``x`` that clears negative exponents this is an integer
    polynomial ``Q`` and the question is whether ``Q >= 0`` on ``[1, inf)``.
    That holds iff ``Q`` is identically zero, or its leading coefficient is
    positive and it has no root of odd multiplicity in ``(1, inf)``; the
    root count is exact (Sturm sequence in rational arithmetic).
    """
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if tf.gain <= 0:
        return LcmCertificate(Verdict.REFUTED, Method.EXACT_POLYNOMIAL,
                              witness={"condition": "gain"}, detail="K <= 0")
    ep = _commensurable_exponents(tf.poles, gamma)
    ez = _commensurable_exponents(tf.zeros, gamma)
    low = min(ep + ez, default=0)
    degree = max(ep + ez, default=0) - low
    asc = [0] * (degree + 1)
    for e in ep:
        asc[e - low] += 1
    for e in ez:
        asc[e - low] -= 1
    q = _trim([Fraction(c) for c in reversed(asc)])
    if _is_zero(q):
        return LcmCertificate(Verdict.CERTIFIED, Method.EXACT_POLYNOMIAL,
                              detail="g(t) is identically zero")
    one = Fraction(1)
    bound = 1 + max(abs(c / q[0]) for c in q)
    odd = _odd_multiplicity_part(q)
    n_odd = 0
    if len(odd) > 1:
        seq = _sturm(odd)
        n_odd = _variations(seq, one) - _variations(seq, None)
    if n_odd == 0 and q[0] > 0:
        return LcmCertificate(Verdict.CERTIFIED, Method.EXACT_POLYNOMIAL,
                              detail=f"Q of degree {len(q) - 1} is nonnegative on [1, inf)")
    if n_odd == 0:
        # No sign change past 1 and a negative leading term: Q < 0 on (1, inf).
        x = bound + 1
        witness = {"x_interval": (float(bound), math.inf),
                   "t": math.log(x) / gamma, "Q": float(_evalf(q, x))}
        return LcmCertificate(Verdict.REFUTED, Method.EXACT_POLYNOMIAL, witness=witness,
                              detail="Q is negative for large x")
    lo, hi = one, bound
    while hi - lo > Fraction(1, 10 ** 9) * hi:
        mid = (lo + hi) / 2
        if _variations(seq, lo) - _variations(seq, mid) > 0:
            hi = mid
        else:
            lo = mid
    witness = {"x_interval": (float(lo), float(hi)),
               "t_interval": (math.log(lo) / gamma, math.log(hi) / gamma)}
    return LcmCertificate(Verdict.REFUTED, Method.EXACT_POLYNOMIAL, witness=witness,
                          detail=f"Q changes sign in x in ({float(lo):.12g}, {float(hi):.12g}]")


# --- sufficient certificates ------------------------------------------------

def _check_delta(tf, delta, strict):
    lo = -_min_real(tf)
    if delta < lo or (strict and delta == lo):
        op = ">" if strict else ">="
        raise DomainError(f"delta={delta} must be {op} {lo} (minus the leftmost real part)")


def build_shifted_spectrum(tf, mu, delta, allow_boundary=False):
    """Shift by ``delta``, raise to ``mu`` and split into ``w``, ``v``, angles.

    ``allow_boundary`` accepts values exactly at ``-delta`` (shifted to zero).
    """
    if mu < 1 or int(mu) != mu:
        raise DomainError("mu must be a positive integer")
    mu = int(mu)
    _check_delta(tf, delta, strict=not allow_boundary)
    reals, upper = _split_conjugates(tf.poles)
    complex_poles = []
    for u in upper:
        complex_poles.extend([u, u.conjugate()])
    poles = np.array([complex(r) for r in reals] + complex_poles, dtype=complex) + delta
    zeros = np.array(tf.zeros, dtype=complex) + delta
    n, m, n_r = len(poles), len(zeros), len(reals)
    theta = np.angle(poles)
    theta[:n_r] = 0.0
    phi = np.angle(zeros)
    w = np.zeros(n + m)
    v = np.zeros(n + m)
    w[:n_r] = poles[:n_r].real ** mu
    v[n_r:n] = np.abs(poles[n_r:]) ** mu
    v[n:] = np.abs(zeros) ** mu
    return ShiftedSpectrum(mu, float(delta), n_r, theta, phi, w, v, n, m)


def _slack(*values):
    """Comparison slack: PREFIX_SLACK relative to the largest magnitude involved."""
    big = max([1.0] + [float(np.max(np.abs(v))) for v in values if np.size(v)])
    return PREFIX_SLACK * big


def _power_sums_ok(pos, neg, ks):
    for k in ks:
        lhs, rhs = pos(k), neg(k)
        if lhs < rhs - _slack(lhs, rhs):
            return k, lhs - rhs
    return None, None


def certify_theorem1(tf, mu, delta=None):
    """Real, equal-degree sufficient test.

    Certified when ``(p + delta)**mu`` weakly majorizes ``(z + delta)**mu``
    and the power sums of orders ``1 .. mu - 1`` of the shifted poles
    dominate those of the shifted zeros.  ``delta`` only needs to make every
    shifted value nonnegative.
    """
    if not tf.is_real_spectrum() or tf.m != tf.n:
        raise DomainError("theorem1 needs a real spectrum with m == n; use certify_corollary1")
    if mu < 1 or int(mu) != mu:
        raise DomainError("mu must be a positive integer")
    mu = int(mu)
    delta = auto_delta(tf, mu) if delta is None else float(delta)
    if tf.gain <= 0:
        return LcmCertificate(Verdict.REFUTED, Method.THEOREM1, mu, delta,
                              witness={"condition": "gain"}, detail="K <= 0")
    _check_delta(tf, delta, strict=False)
    p = np.array([x.real for x in tf.poles]) + delta
    z = np.array([x.real for x in tf.zeros]) + delta
    gap, k = majorization_gap(p ** mu, z ** mu)
    if gap < -_slack(p ** mu, z ** mu):
        return LcmCertificate(Verdict.INCONCLUSIVE, Method.THEOREM1, mu, delta,
                              witness={"majorization_prefix": k, "margin": gap})
    k, margin = _power_sums_ok(lambda k: np.sum(p ** k), lambda k: np.sum(z ** k), range(1, mu))
    if k is not None:
        return LcmCertificate(Verdict.INCONCLUSIVE, Method.THEOREM1, mu, delta,
                              witness={"power_sum": k, "margin": margin})
    return LcmCertificate(Verdict.CERTIFIED, Method.THEOREM1, mu, delta)


def corollary1_moment_terms(spec, k):
    """Both sides of the order-``k`` moment inequality for a shifted spectrum."""
    e = k / spec.mu
    n = spec.n
    lhs = np.sum(spec.w[:n] ** e) + np.sum(spec.v[:n] ** e * np.cos(spec.theta * k))
    rhs = np.sum(spec.v[n:] ** e * np.cos(spec.phi * k))
    return float(lhs), float(rhs)


def certify_corollary1(tf, mu, delta=None, allow_boundary=False):
    """Sufficient test for complex spectra and ``m <= n``.

    Certified when ``w`` weakly majorizes ``v`` and the moment inequalities of
    orders ``1 .. mu - 1`` hold (see :func:`corollary1_moment_terms`).
    ``allow_boundary`` admits poles or zeros exactly at ``-delta``.
    """
    if mu < 1 or int(mu) != mu:
        raise DomainError("mu must be a positive integer")
    mu = int(mu)
    delta = auto_delta(tf, mu) if delta is None else float(delta)
    if tf.gain <= 0:
        return LcmCertificate(Verdict.REFUTED, Method.COROLLARY1, mu, delta,
                              witness={"condition": "gain"}, detail="K <= 0")
    if tf.m > tf.n:
        return LcmCertificate(Verdict.REFUTED, Method.COROLLARY1, mu, delta,
                              witness={"condition": "a"}, detail=f"n={tf.n} < m={tf.m}")
    spec = build_shifted_spectrum(tf, mu, delta, allow_boundary)
    gap, k = majorization_gap(spec.w, spec.v)
    if gap < -_slack(spec.w, spec.v):
        return LcmCertificate(Verdict.INCONCLUSIVE, Method.COROLLARY1, mu, delta,
                              witness={"majorization_prefix": k, "margin": gap})
    for k in range(1, mu):
        lhs, rhs = corollary1_moment_terms(spec, k)
        if lhs < rhs - _slack(lhs, rhs):
            return LcmCertificate(Verdict.INCONCLUSIVE, Method.COROLLARY1, mu, delta,
                                  witness={"moment": k, "margin": lhs - rhs})
    return LcmCertificate(Verdict.CERTIFIED, Method.COROLLARY1, mu, delta)


class Step(NamedTuple):
    """One entry of a certification strategy."""

    method: Method
    mu: int = 1
    delta: Optional[float] = None
    gamma: Optional[float] = None
    t_max: Optional[float] = None
    n_samples: int = DEFAULT_SAMPLES


DEFAULT_STRATEGY = (
    Step(Method.THEOREM1, 1), Step(Method.COROLLARY1, 1),
    Step(Method.THEOREM1, 2), Step(Method.COROLLARY1, 2),
    Step(Method.THEOREM1, 3), Step(Method.COROLLARY1, 3),
    Step(Method.EXACT_SAMPLED),
)


def run_step(tf, step):
    """Run a single strategy step; may raise DomainError if it does not apply."""
    method = Method(step.method)
    if method is Method.NECESSARY:
        return check_necessary(tf)
    if method is Method.THEOREM1:
        return certify_theorem1(tf, step.mu, step.delta)
    if method is Method.COROLLARY1:
        return certify_corollary1(tf, step.mu, step.delta)
    if method is Method.EXACT_POLYNOMIAL:
        if step.gamma is None:
            raise DomainError("exact_polynomial needs gamma")
        return check_exact_polynomial(tf, step.gamma)
    return check_exact_sampled(tf, step.t_max, step.n_samples)


def certify(tf, strategy=None):
    """Necessary conditions first, then each strategy step in order.

    Steps that do not apply to ``tf`` (DomainError) are skipped.  Returns the
    first Certified or Refuted result, else the last Inconclusive one.
    """
    cert = check_necessary(tf)
    if cert.refuted:
        return cert
    steps = DEFAULT_STRATEGY if strategy is None else strategy
    for step in steps:
        if isinstance(step, (str, Method)):
            step = Step(Method(step))
        try:
            result = run_step(tf, step)
        except DomainError:
            continue
        if result.verdict is not Verdict.INCONCLUSIVE:
            return result
        cert = result
    return cert
