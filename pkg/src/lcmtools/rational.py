"""Real rational transfer functions in zero/pole form.

Everything here works on ``H(s) = K * prod(s - z_i) / prod(s - p_i)`` with
conjugate-closed zero and pole lists.  Time responses are evaluated
analytically from residues; there is no ODE integration anywhere.
"""

from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy import signal

from .exceptions import DomainError

#: Poles closer than this (absolute) are treated as one repeated pole.
CLUSTER_TOL = 1e-9
#: Imaginary parts below this are dropped when projecting to the reals.
IMAG_TOL = 1e-9


def _split_conjugates(values, tol=IMAG_TOL):
    """Split ``values`` into real entries and upper-half-plane representatives.

    Raises DomainError if some non-real entry has no conjugate partner.
    """
    reals, upper, lower = [], [], []
    for v in values:
        v = complex(v)
        if abs(v.imag) <= tol * max(1.0, abs(v)):
            reals.append(v.real)
        elif v.imag > 0:
            upper.append(v)
        else:
            lower.append(v)
    if len(upper) != len(lower):
        raise DomainError(f"values are not conjugate-closed: {list(values)}")
    remaining = list(lower)
    for u in upper:
        dist = [abs(l - u.conjugate()) for l in remaining]
        j = int(np.argmin(dist))
        if dist[j] > tol * max(1.0, abs(u)):
            raise DomainError(f"{u} has no conjugate partner in {list(values)}")
        remaining.pop(j)
    return reals, upper


def _conjugate_clean(values, tol=IMAG_TOL):
    """Return values with real entries snapped to the axis and exact conjugate pairs.

    Input order is kept for real entries and for the upper member of each
    pair; the lower member is emitted right after its partner.
    """
    reals, upper = _split_conjugates(values, tol)
    out, r, u = [], iter(reals), iter(upper)
    for v in values:
        v = complex(v)
        if abs(v.imag) <= tol * max(1.0, abs(v)):
            out.append(complex(next(r), 0.0))
        elif v.imag > 0:
            c = next(u)
            out.extend([c, c.conjugate()])
    return tuple(out)


def _real_expand(roots, lead=1.0):
    """Expand ``lead * prod(s - r)`` for a conjugate-closed root list in real arithmetic."""
    reals, upper = _split_conjugates(roots)
    c = np.array([float(lead)])
    for r in reals:
        c = np.convolve(c, [1.0, -r])
    for u in upper:
        c = np.convolve(c, [1.0, -2.0 * u.real, abs(u) ** 2])
    return c


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with coefficients in descending powers.

    Leading zeros are stripped exactly; the zero polynomial is ``(0.0,)``.
    """

    coeffs: tuple

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs))
        if np.iscomplexobj(c):
            raise DomainError("Polynomial coefficients must be real")
        c = c.astype(float)
        nz = np.flatnonzero(c)
        c = c[nz[0]:] if nz.size else np.zeros(1)
        object.__setattr__(self, "coeffs", tuple(float(x) for x in c))

    @classmethod
    def from_roots(cls, roots, lead=1.0):
        return cls(_real_expand(roots, lead))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return self.coeffs == (0.0,)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coeffs, dtype=dtype)

    def __call__(self, s):
        return np.polyval(np.asarray(self.coeffs), s)

    def __add__(self, other):
        return Polynomial(np.polyadd(self.coeffs, _coeffs(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial(np.polysub(self.coeffs, _coeffs(other)))

    def __neg__(self):
        return Polynomial(-np.asarray(self.coeffs))

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(np.asarray(self.coeffs) * float(other))
        return Polynomial(np.convolve(self.coeffs, _coeffs(other)))

    __rmul__ = __mul__

    def derivative(self):
        if self.degree == 0:
            return Polynomial((0.0,))
        return Polynomial(np.polyder(np.asarray(self.coeffs)))

    def roots(self):
        """Roots from companion-matrix eigenvalues."""
        if self.is_zero:
            raise DomainError("the zero polynomial has no finite root set")
        return np.roots(self.coeffs)

    def padded(self, length):
        """Coefficients left-padded with zeros to ``length`` entries."""
        if length < len(self.coeffs):
            raise ValueError("cannot pad to fewer coefficients than the degree needs")
        return np.concatenate([np.zeros(length - len(self.coeffs)), self.coeffs])


def _coeffs(p):
    if isinstance(p, Polynomial):
        return p.coeffs
    if np.isscalar(p):
        return (float(p),)
    return tuple(p)


@dataclass(frozen=True)
class RationalTF:
    """``H(s) = gain * prod(s - zeros) / prod(s - poles)``.

    Parameters
    ----------
    gain : float
        Nonzero real gain ``K``; equals the leading numerator coefficient
        when the denominator is monic.
    zeros, poles : sequence of complex
        Conjugate-closed root lists.  Near-real entries are snapped onto the
        real axis and conjugate partners are made exact.
    """

    gain: float
    zeros: tuple = ()
    poles: tuple = ()

    def __post_init__(self):
        gain = complex(self.gain)
        if abs(gain.imag) > IMAG_TOL * max(1.0, abs(gain)):
            raise DomainError("gain must be real")
        if gain.real == 0.0:
            raise DomainError("gain must be nonzero")
        object.__setattr__(self, "gain", float(gain.real))
        object.__setattr__(self, "zeros", _conjugate_clean(np.atleast_1d(self.zeros)))
        object.__setattr__(self, "poles", _conjugate_clean(np.atleast_1d(self.poles)))

    @classmethod
    def from_coeffs(cls, num, den):
        """Build from coefficient vectors (descending powers)."""
        num, den = Polynomial(_coeffs(num)), Polynomial(_coeffs(den))
        if num.is_zero or den.is_zero:
            raise DomainError("numerator and denominator must be nonzero")
        gain = num.coeffs[0] / den.coeffs[0]
        zeros = num.roots() if num.degree else []
        poles = den.roots() if den.degree else []
        return cls(gain, zeros, poles)

    @property
    def n(self):
        return len(self.poles)

    @property
    def m(self):
        return len(self.zeros)

    @property
    def sigma(self):
        """Pole abscissa ``max Re(p)``; ``-inf`` without poles."""
        return max((p.real for p in self.poles), default=-np.inf)

    @property
    def num(self):
        return Polynomial.from_roots(self.zeros, self.gain)

    @property
    def den(self):
        return Polynomial.from_roots(self.poles)

    def is_real_spectrum(self):
        return all(v.imag == 0.0 for v in self.zeros + self.poles)

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.full(s.shape, self.gain, dtype=complex)
        for z in self.zeros:
            out = out * (s - z)
        for p in self.poles:
            out = out / (s - p)
        return out

    def dc_gain(self):
        return float(np.real(self(0.0)))


def poles_zeros_to_coeffs(tf):
    """Return ``(num, den)`` polynomials; ``den`` is monic, ``num`` leads with ``K``."""
    return tf.num, tf.den


def _cluster(values, tol=CLUSTER_TOL):
    """Group values within ``tol`` of a cluster's first member.

    Returns a list of ``(center, multiplicity)``.
    """
    clusters = []
    for v in sorted(values, key=lambda c: (c.real, c.imag)):
        for cl in clusters:
            if abs(v - cl[0]) <= tol:
                cl.append(v)
                break
        else:
            clusters.append([v])
    return [(complex(np.mean(cl)), len(cl)) for cl in clusters]


def _series_mul(a, b, order):
    out = np.zeros(order, dtype=complex)
    for i, ai in enumerate(a[:order]):
        bb = np.asarray(b[:order - i])
        out[i:i + bb.size] += ai * bb
    return out


@dataclass(frozen=True)
class PartialFractionExpansion:
    """``H(s) = direct + sum residue / (s - pole)**k``.

    ``terms`` holds ``(pole, k, residue)`` with ``k`` ascending per pole.
    """

    terms: tuple
    direct: float = 0.0
    _poles: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = np.array([(p, k, r) for p, k, r in self.terms], dtype=complex).reshape(-1, 3)
        object.__setattr__(self, "_poles", arr)

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.full(s.shape, self.direct, dtype=complex)
        for p, k, r in self.terms:
            out = out + r / (s - p) ** k
        return out

    def evaluate(self, t, shift=0.0):
        """Inverse Laplace transform of the strictly proper part at times ``t``.

        With ``shift`` the result is multiplied by ``exp(-shift * t)``; the
        exponent is folded in before exponentiation so slow decays do not
        underflow.
        """
        t = np.asarray(t, dtype=float)
        acc = np.zeros(t.shape, dtype=complex)
        scale = np.zeros(t.shape)
        for p, k, r in self.terms:
            term = r * t ** (k - 1) / factorial(k - 1) * np.exp((p - shift) * t)
            acc += term
            scale += np.abs(term)
        bad = np.abs(acc.imag) > IMAG_TOL * np.maximum(1.0, scale)
        if np.any(bad):
            raise DomainError("time response has a non-negligible imaginary part")
        return acc.real


def partial_fractions(tf):
    """Partial-fraction expansion of a proper rational function.

    Poles closer than ``CLUSTER_TOL`` are merged into one repeated pole.
    Residues of conjugate poles are exact conjugates.
    """
    if tf.n < tf.m:
        raise DomainError(f"improper transfer function (m={tf.m} > n={tf.n})")
    direct = tf.gain if tf.n == tf.m else 0.0
    reals, upper = _split_conjugates(tf.poles)
    real_cl = _cluster([complex(r) for r in reals])
    upper_cl = _cluster(upper)
    lower_cl = [(c.conjugate(), r) for c, r in upper_cl]
    everything = real_cl + upper_cl + lower_cl

    def residues_at(idx):
        p, r = everything[idx]
        num = np.array([tf.gain], dtype=complex)
        for z in tf.zeros:
            num = _series_mul(num, [p - z, 1.0], r)
        den = np.array([1.0], dtype=complex)
        for j, (q, rq) in enumerate(everything):
            if j != idx:
                for _ in range(rq):
                    den = _series_mul(den, [p - q, 1.0], r)
        num = np.pad(num, (0, max(0, r - len(num))))
        den = np.pad(den, (0, max(0, r - len(den))))
        quot = np.zeros(r, dtype=complex)
        for j in range(r):
            quot[j] = (num[j] - np.dot(den[1:j + 1], quot[j - 1::-1][:j])) / den[0]
        # Laurent coefficient of (s - p)^-k is the Taylor coefficient r - k.
        return [(p, k, quot[r - k]) for k in range(1, r + 1)]

    terms = []
    for idx in range(len(real_cl)):
        terms.extend((complex(p.real, 0.0), k, complex(res.real, 0.0))
                     for p, k, res in residues_at(idx))
    for idx in range(len(real_cl), len(real_cl) + len(upper_cl)):
        up = residues_at(idx)
        terms.extend(up)
        terms.extend((p.conjugate(), k, res.conjugate()) for p, k, res in up)
    return PartialFractionExpansion(tuple(terms), float(direct))


def _as_output(values, t):
    return float(values) if np.ndim(t) == 0 else values


def impulse_response(tf, t):
    """Impulse response of a strictly proper ``tf`` at time(s) ``t >= 0``."""
    if tf.n <= tf.m:
        raise DomainError("impulse response needs a strictly proper transfer function; "
                          "the Dirac part of a biproper one is partial_fractions(tf).direct")
    if np.any(np.asarray(t) < 0):
        raise DomainError("t must be nonnegative")
    return _as_output(partial_fractions(tf).evaluate(t), t)


def step_response(tf, t):
    """Unit-step response, from the residues of ``H(s)/s``."""
    if tf.n < tf.m:
        raise DomainError("improper transfer function")
    if any(abs(p) <= CLUSTER_TOL for p in tf.poles):
        raise DomainError("pole at the origin: the step response is unbounded")
    if np.any(np.asarray(t) < 0):
        raise DomainError("t must be nonnegative")
    integrated = RationalTF(tf.gain, tf.zeros, tf.poles + (0j,))
    return _as_output(partial_fractions(integrated).evaluate(t), t)


def simulate_step(tf, t):
    """Step response by zero-order-hold simulation of a state-space realization.

    Insensitive to nearly repeated poles, unlike the residue form.  ``t``
    must start at 0 and be uniformly spaced.
    """
    if tf.n < tf.m:
        raise DomainError("improper transfer function")
    t = np.asarray(t, dtype=float)
    if t[0] != 0 or (t.size > 2 and not np.allclose(np.diff(t), t[1] - t[0])):
        raise DomainError("t must be a uniform grid starting at 0")
    if tf.n == 0:
        return np.full(t.shape, tf.gain)
    _, y, _ = signal.lsim((tf.num.coeffs, tf.den.coeffs), np.ones_like(t), t)
    return np.asarray(y, dtype=float)


def frequency_magnitude(tf, omega):
    """``|H(i omega)|`` from distances to zeros and poles.

    Returns ``inf`` where ``i omega`` coincides with a pole.
    """
    s = 1j * np.asarray(omega, dtype=float)
    mag = np.full(s.shape, abs(tf.gain))
    for z in tf.zeros:
        mag = mag * np.abs(s - z)
    with np.errstate(divide="ignore", invalid="ignore"):
        for p in tf.poles:
            d = np.abs(s - p)
            mag = np.where(d == 0.0, np.inf, mag / np.where(d == 0.0, 1.0, d))
    return float(mag) if np.ndim(omega) == 0 else mag
