import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from lcmtools.exceptions import DomainError
from lcmtools.rational import (Polynomial, RationalTF, frequency_magnitude, impulse_response,
                               partial_fractions, poles_zeros_to_coeffs, simulate_step,
                               step_response)
from lcmtools.sampling import random_system

EX3_POLES = np.roots([1, 0.8, -0.2])


def residues(tf):
    return {(round(p.real, 9), k): r for p, k, r in partial_fractions(tf).terms}


class TestPolynomial:
    def test_zero_polynomial_is_canonical(self):
        z = Polynomial([0.0, 0.0, 0.0])
        assert z.is_zero and list(z.coeffs) == [0.0]

    def test_arithmetic(self):
        p = Polynomial([1, 1]) * Polynomial([1, 2])
        np.testing.assert_allclose(p.coeffs, [1, 3, 2])
        np.testing.assert_allclose((p - Polynomial([1, 3, 2])).coeffs, [0])
        np.testing.assert_allclose(p.derivative().coeffs, [2, 3])

    def test_from_roots(self):
        np.testing.assert_allclose(Polynomial.from_roots([-2, -2, -2]).coeffs, [1, 6, 12, 8])


class TestCoefficients:
    def test_lead_lag(self):
        num, den = poles_zeros_to_coeffs(RationalTF(1, [-2], [-1]))
        np.testing.assert_allclose(num.coeffs, [1, 2])
        np.testing.assert_allclose(den.coeffs, [1, 1])

    def test_complex_pair(self):
        _, den = poles_zeros_to_coeffs(RationalTF(1, [], [-0.5 + 1j, -0.5 - 1j]))
        np.testing.assert_allclose(den.coeffs, [1, 1, 1.25])

    def test_example3_plant(self):
        num, den = poles_zeros_to_coeffs(RationalTF(1, [-2], EX3_POLES))
        np.testing.assert_allclose(den.coeffs, [1, 0.8, -0.2], atol=1e-12)
        np.testing.assert_allclose(num.coeffs, [1, 2])

    def test_not_conjugate_closed(self):
        with pytest.raises(DomainError):
            RationalTF(1, [], [-1 + 1j])

    def test_zero_gain_rejected(self):
        with pytest.raises(DomainError):
            RationalTF(0.0, [], [-1])

    def test_sigma(self):
        assert RationalTF(1, [], [-1, -0.5 + 2j, -0.5 - 2j]).sigma == -0.5


class TestPartialFractions:
    def test_distinct(self):
        r = residues(RationalTF(1, [], [-1, -2]))
        assert r[(-1.0, 1)] == pytest.approx(1) and r[(-2.0, 1)] == pytest.approx(-1)

    def test_cover_up_with_zero(self):
        r = residues(RationalTF(1, [-3], [-1, -2]))
        assert r[(-1.0, 1)] == pytest.approx(2) and r[(-2.0, 1)] == pytest.approx(-1)

    def test_repeated(self):
        r = residues(RationalTF(1, [-2], [-1, -1]))
        assert r[(-1.0, 1)] == pytest.approx(1) and r[(-1.0, 2)] == pytest.approx(1)

    def test_triple_pole(self):
        tf = RationalTF(1, [-1], [-2, -2, -2, -3])
        pfe = partial_fractions(tf)
        s = 0.3 + 0.7j
        assert pfe(s) == pytest.approx(complex(tf(s)), rel=1e-10)

    def test_direct_term(self):
        pfe = partial_fractions(RationalTF(3, [-2], [-1]))
        assert pfe.direct == pytest.approx(3)

    def test_improper(self):
        with pytest.raises(DomainError):
            partial_fractions(RationalTF(1, [-1, -2], [-3]))

    def test_conjugate_residues(self):
        pfe = partial_fractions(RationalTF(1, [-3], [-1 + 2j, -1 - 2j, -4]))
        by_pole = {p: r for p, _, r in pfe.terms}
        for p, r in by_pole.items():
            if p.imag:
                assert by_pole[p.conjugate()] == pytest.approx(np.conj(r))

    def test_reconstruction_random(self, rng):
        for _ in range(500):
            n = int(rng.integers(1, 7))
            tf = random_system(rng, n, int(rng.integers(0, n + 1)))
            pfe = partial_fractions(tf)
            for s in rng.normal(size=20) * 5 + 1j * rng.normal(size=20) * 5:
                h = complex(tf(s))
                assert abs(h - pfe(s)) <= 1e-8 * max(abs(h), 1e-300) + 1e-12


class TestTimeResponses:
    def test_impulse_values(self):
        assert impulse_response(RationalTF(1, [], [-1]), 0.0) == pytest.approx(1.0)
        # closed forms e^-1 - e^-2 and 2 e^-2, evaluated with mpmath
        assert impulse_response(RationalTF(1, [], [-1, -2]), 1.0) == pytest.approx(0.23254415793483, abs=1e-12)
        assert impulse_response(RationalTF(1, [], [-1, -1]), 2.0) == pytest.approx(0.270670566473225, abs=1e-12)

    def test_impulse_improper(self):
        with pytest.raises(DomainError):
            impulse_response(RationalTF(1, [-2], [-1]), 1.0)

    def test_step_values(self):
        assert step_response(RationalTF(1, [], [-1]), 30.0) == pytest.approx(1.0, abs=1e-9)
        y = step_response(RationalTF(2, [], [-2]), np.array([0.0, 0.5]))
        np.testing.assert_allclose(y, [0.0, 0.632120558828558], atol=1e-12)

    def test_step_example3_closed_loop(self):
        # closed loop 25 (s + 2) / ((s + 2)(s + 5)^2); mpmath Talbot inversion gives 0.999999999638913 at t = 5
        tf = RationalTF(25, [-2], [-2, -5, -5])
        t = np.linspace(0, 5, 1000)
        y = step_response(tf, t)
        assert y[-1] == pytest.approx(0.999999999638913, abs=1e-9)
        assert abs(y[-1] - 1) <= 1e-6

    def test_step_pole_at_origin(self):
        with pytest.raises(DomainError):
            step_response(RationalTF(1, [], [0, -1]), np.linspace(0, 1, 5))

    def test_simulate_matches_residues(self):
        tf = RationalTF(3, [-1.5], [-1, -2, -3 + 1j, -3 - 1j])
        t = np.linspace(0, 10, 2001)
        np.testing.assert_allclose(simulate_step(tf, t), step_response(tf, t), atol=1e-9)

    def test_convolution(self):
        h1, h2 = RationalTF(1, [], [-1]), RationalTF(2, [-3], [-2, -4])
        prod = RationalTF(2, [-3], [-1, -2, -4])
        for t in (0.5, 2.0, 7.0):
            tau = np.linspace(0, t, 4001)
            conv = integrate.trapezoid(impulse_response(h1, tau) * impulse_response(h2, t - tau), tau)
            assert conv == pytest.approx(impulse_response(prod, t), abs=1e-4)

    def test_step_monotone_iff_impulse_nonnegative(self, rng):
        t = np.linspace(0, 10, 2001)
        for _ in range(100):
            tf = random_system(rng, int(rng.integers(1, 5)), 0, real_only=bool(rng.random() < 0.5))
            tf = RationalTF(abs(tf.gain), tf.zeros, tf.poles)
            h = impulse_response(tf, t)
            y = step_response(tf, t)
            # trapezoid increments of y are consistent with h on the grid
            incr = np.diff(y)
            if np.all(h >= -1e-12):
                assert incr.min() >= -1e-9
            if incr.min() < -1e-9:
                assert h.min() < 0


class TestFrequency:
    def test_values(self):
        assert frequency_magnitude(RationalTF(1, [], [-1]), 0.0) == pytest.approx(1.0)
        assert frequency_magnitude(RationalTF(1, [], [-1]), 1.0) == pytest.approx(1 / math.sqrt(2))
        assert frequency_magnitude(RationalTF(1, [-2], [-1]), 1e6) == pytest.approx(1.0, abs=1e-5)

    def test_pole_on_axis(self):
        assert frequency_magnitude(RationalTF(1, [], [1j, -1j]), 1.0) == math.inf


@given(st.lists(st.floats(-10, -0.1), min_size=1, max_size=10, unique=True))
def test_round_trip_roots(roots):
    roots = sorted(roots)
    if np.min(np.diff(roots), initial=1.0) < 0.1:
        return
    tf = RationalTF(1.0, [], roots)
    coeffs = np.asarray(tf.den.coeffs)
    back = RationalTF.from_coeffs([1.0], coeffs)
    # root condition numbers: sum |a_k| |r|^k / |r P'(r)|
    r = np.asarray(roots)
    powers = np.abs(r)[:, None] ** np.arange(len(coeffs) - 1, -1, -1)
    cond = (powers @ np.abs(coeffs)) / np.abs(r * np.polyval(np.polyder(coeffs), r))
    err = np.abs(np.sort([p.real for p in back.poles]) - r)
    assert np.all(err <= 1e-7 + 1e3 * np.finfo(float).eps * cond * np.abs(r))
