import math

import numpy as np
import pytest

from lcmtools.certify import (Method, Step, Verdict, auto_delta, build_shifted_spectrum,
                              certify, certify_corollary1, certify_theorem1,
                              check_exact_polynomial, check_exact_sampled, check_necessary,
                              default_t_max, mixed_relaxation, mixed_relaxation_response,
                              sample_grid)
from lcmtools.exceptions import DomainError
from lcmtools.rational import RationalTF, impulse_response
from lcmtools.sampling import random_commensurable, random_near_lcm, random_system

COUNTEREXAMPLE = RationalTF(1, [-0.5 + 1j, -0.5 - 1j], [-0.8, -1, -1.2])
EX1_ZEROS = [-2, -3, -5, -6, -8]
EX2_ZEROS = [-10, -15, -30]


def example1(p1, p2):
    return RationalTF(1, EX1_ZEROS, [p1, p2, -1, -4, -7])


class TestNecessary:
    def test_counterexample_condition_b(self):
        cert = check_necessary(COUNTEREXAMPLE)
        assert cert.verdict is Verdict.REFUTED and cert.witness["condition"] == "b"

    def test_negative_gain(self):
        assert check_necessary(RationalTF(-1, [-2], [-1])).refuted

    def test_passes(self):
        assert check_necessary(RationalTF(1, [-2], [-1])).verdict is Verdict.INCONCLUSIVE

    def test_improper(self):
        assert check_necessary(RationalTF(1, [-1, -2], [-3])).witness["condition"] == "a"

    def test_sum_condition(self):
        cert = check_necessary(example1(-6.5, -6.5))
        assert cert.refuted and cert.witness["condition"] == "c"


class TestExactSampled:
    def test_certified(self):
        assert check_exact_sampled(RationalTF(1, [-2], [-1])).verdict is Verdict.CERTIFIED

    def test_refuted(self):
        cert = check_exact_sampled(RationalTF(1, [-1], [-2]))
        assert cert.refuted and cert.witness["t"] > 0

    def test_example1_sum_violation(self):
        cert = check_exact_sampled(example1(-6.5, -6.5))
        assert cert.refuted
        t = cert.witness["t"]
        assert mixed_relaxation_response(example1(-6.5, -6.5), t)[0] < 0

    def test_gain_refutes(self):
        assert check_exact_sampled(RationalTF(-1, [-2], [-1])).refuted

    def test_grid(self):
        g = sample_grid(50.0, 20000)
        assert g[0] == 0.0 and g[-1] == 50.0 and np.all(np.diff(g) > 0)
        assert g.min() == 0 and (g[1] <= 1e-6 + 1e-15)

    def test_default_horizon(self):
        assert default_t_max(RationalTF(1, [-2], [-1])) == pytest.approx(50.0)
        assert default_t_max(RationalTF(1, [], [-0.5 + 0.01j, -0.5 - 0.01j])) == pytest.approx(400 * math.pi)


class TestMixedRelaxation:
    def test_matches_exponential_sum(self):
        tf = RationalTF(1, [-2, -3 + 1j, -3 - 1j], [-1, -4, -5])
        G = mixed_relaxation(tf)
        assert G.n > G.m
        t = np.linspace(0, 5, 50)
        np.testing.assert_allclose(impulse_response(G, t), mixed_relaxation_response(tf, t), atol=1e-9)


class TestExactPolynomial:
    def test_simple(self):
        assert check_exact_polynomial(RationalTF(1, [-2], [-1]), 1.0).certified

    def test_perfect_square(self):
        assert check_exact_polynomial(RationalTF(1, [-1, -1], [-2, 0]), 1.0).certified

    def test_refuted(self):
        assert check_exact_polynomial(RationalTF(1, [-1], [-3]), 1.0).refuted

    def test_half_unit(self):
        assert check_exact_polynomial(RationalTF(1, [-1.5], [-0.5]), 0.5).certified

    def test_not_commensurable(self):
        with pytest.raises(DomainError, match="check_exact_sampled"):
            check_exact_polynomial(RationalTF(1, [-math.sqrt(2)], [-1]), 1.0)

    def test_complex_rejected(self):
        with pytest.raises(DomainError):
            check_exact_polynomial(RationalTF(1, [], [-1 + 1j, -1 - 1j]), 1.0)

    def test_tangent_root(self):
        # g(t) = e^{-t} - 2 e^{-2t} + e^{-3t} = e^{-t}(1 - e^{-t})^2 >= 0
        tf = RationalTF(1, [-2, -2], [-1, -3])
        assert check_exact_polynomial(tf, 1.0).certified
        assert check_exact_sampled(tf).certified

    def test_agrees_with_sampling(self, rng):
        for _ in range(200):
            tf = random_commensurable(rng)
            assert check_exact_polynomial(tf, 1.0).verdict is check_exact_sampled(tf).verdict


class TestShiftedSpectrum:
    def test_real(self):
        s = build_shifted_spectrum(RationalTF(1, [-1.5, -2.5], [-1, -2]), 1, 3.0)
        np.testing.assert_allclose(s.w, [2, 1, 0, 0])
        np.testing.assert_allclose(s.v, [0, 0, 1.5, 0.5])
        assert s.n_r == 2 and not np.any(s.theta) and not np.any(s.phi)

    def test_complex_pair(self):
        s = build_shifted_spectrum(RationalTF(1, [], [-1 + 1j, -1 - 1j]), 2, 2.0)
        assert s.n_r == 0
        np.testing.assert_allclose(s.w, [0, 0])
        np.testing.assert_allclose(s.v, [2, 2])
        np.testing.assert_allclose(sorted(s.theta), [-math.pi / 4, math.pi / 4])

    def test_boundary_delta(self):
        with pytest.raises(DomainError):
            build_shifted_spectrum(RationalTF(1, [], [-3]), 1, 3.0)
        s = build_shifted_spectrum(RationalTF(1, [], [-3]), 1, 3.0, allow_boundary=True)
        assert s.w[0] == 0

    def test_invariants_random(self, rng):
        for _ in range(200):
            tf = random_system(rng, int(rng.integers(1, 6)), int(rng.integers(0, 4)))
            mu = int(rng.integers(1, 4))
            s = build_shifted_spectrum(tf, mu, auto_delta(tf, mu))
            assert np.all(s.w[s.n_r:] == 0) and np.all(s.v[:s.n_r] == 0)
            assert np.all(s.theta[:s.n_r] == 0)
            assert np.all(np.abs(np.concatenate([s.theta, s.phi])) < math.pi / 2)


class TestTheorem1:
    def test_example(self):
        assert certify_theorem1(RationalTF(1, [-1.5, -2], [-1, -2]), 1, 3.0).certified

    def test_example1_auto_delta(self):
        tf = example1(-5.9, -5.9)
        assert auto_delta(tf, 3) == pytest.approx(9.0)
        assert certify_theorem1(tf, 3).certified

    def test_example1_delta13_inconclusive(self):
        # direct evaluation: the worst (third) prefix sum falls short by 28.089 at delta = 13
        cert = certify_theorem1(example1(-5.9, -5.9), 3, 13.0)
        assert cert.verdict is Verdict.INCONCLUSIVE
        assert cert.witness["majorization_prefix"] == 3
        assert cert.witness["margin"] == pytest.approx(-28.089, abs=1e-9)

    def test_ball_condition_at_mu1(self, rng):
        # mu = 1 reduces to prefix sums of the sorted poles dominating those of the zeros
        for _ in range(200):
            tf = random_near_lcm(rng, int(rng.integers(1, 5)))
            p = np.sort([x.real for x in tf.poles])[::-1]
            z = np.sort([x.real for x in tf.zeros])[::-1]
            ball = np.all(np.cumsum(p) >= np.cumsum(z) - 1e-12)
            assert certify_theorem1(tf, 1).certified == ball

    def test_domain(self):
        with pytest.raises(DomainError, match="certify_corollary1"):
            certify_theorem1(RationalTF(1, [-2, -3], [-1 + 1j, -1 - 1j]), 1)
        with pytest.raises(DomainError):
            certify_theorem1(RationalTF(1, [], [-1]), 1)

    def test_mu_monotone(self, rng):
        for _ in range(500):
            tf = random_near_lcm(rng, int(rng.integers(1, 6)))
            delta = auto_delta(tf, 1)
            results = [certify_theorem1(tf, mu, delta).certified for mu in range(1, 5)]
            for lo in range(4):
                if results[lo]:
                    assert all(results[lo:])


class TestCorollary1:
    def test_matches_theorem1(self, rng):
        for _ in range(200):
            tf = random_near_lcm(rng, int(rng.integers(1, 5)))
            mu = int(rng.integers(1, 4))
            delta = auto_delta(tf, mu)
            assert certify_corollary1(tf, mu, delta).verdict is certify_theorem1(tf, mu, delta).verdict

    def test_no_zeros(self):
        for mu, delta in [(1, 2.0), (2, 5.0), (3, 1.5)]:
            assert certify_corollary1(RationalTF(1, [], [-1]), mu, delta).certified

    def test_example2_complex_region(self):
        certified = 0
        for a in np.arange(-34.5, -5.0, 0.5):
            for b in np.arange(0.5, 20.5, 0.5):
                tf = RationalTF(1, EX2_ZEROS, [-5, complex(a, b), complex(a, -b)])
                if certify_corollary1(tf, 3, 35.0).certified:
                    certified += 1
                    assert not check_exact_sampled(tf).refuted
        assert certified > 0

    def test_example2_complex_needs_mu3_at_delta35(self):
        # second prefix needs 30^mu >= 25^mu + 20^mu, false for mu <= 2
        tf = RationalTF(1, EX2_ZEROS, [-5, -20 + 1j, -20 - 1j])
        for mu in (1, 2):
            spec = build_shifted_spectrum(tf, mu, 35.0)
            top2 = np.sort(spec.v)[::-1][:2].sum()
            assert np.sort(spec.w)[::-1][:2].sum() < top2
            assert certify_corollary1(tf, mu, 35.0).verdict is Verdict.INCONCLUSIVE


class TestPipeline:
    def test_counterexample(self):
        cert = certify(COUNTEREXAMPLE)
        assert cert.refuted and cert.method is Method.NECESSARY

    def test_lead(self):
        cert = certify(RationalTF(1, [-2], [-1]))
        assert cert.certified and cert.method is Method.THEOREM1 and cert.mu == 1

    def test_improper(self):
        cert = certify(RationalTF(1, [-1, -2], [-3]))
        assert cert.refuted and cert.witness["condition"] == "a"

    def test_falls_back_to_sampling(self):
        cert = certify(RationalTF(1, [-2], [-1, -3]), [Step(Method.EXACT_SAMPLED)])
        assert cert.certified and cert.method is Method.EXACT_SAMPLED

    def test_skips_inapplicable_steps(self):
        tf = RationalTF(1, [-3], [-1 + 0.1j, -1 - 0.1j])
        cert = certify(tf, [Step(Method.THEOREM1), Step(Method.COROLLARY1)])
        assert cert.method is Method.COROLLARY1


class TestSoundness:
    def test_sufficient_never_contradicted(self, rng):
        checked = 0
        for _ in range(500):
            n = int(rng.integers(1, 5))
            tf = random_system(rng, n, int(rng.integers(0, n + 1)), gain=1.0)
            for mu in (1, 2, 3):
                try:
                    cert = certify_corollary1(tf, mu)
                except DomainError:
                    continue
                if cert.certified:
                    checked += 1
                    assert not check_necessary(tf).refuted
                    assert not check_exact_sampled(tf, 50.0, 20000).refuted
        assert checked > 0

    def test_near_lcm_soundness(self, rng):
        for _ in range(300):
            tf = random_near_lcm(rng, int(rng.integers(1, 5)))
            if certify_theorem1(tf, 2).certified:
                assert not check_exact_sampled(tf, 50.0, 20000).refuted

    def test_exact_implies_necessary(self, rng):
        for _ in range(300):
            n = int(rng.integers(1, 5))
            tf = random_system(rng, n, int(rng.integers(0, n + 1)))
            if check_exact_sampled(tf).certified:
                assert not check_necessary(tf).refuted


class TestTail:
    def test_signs(self):
        from lcmtools.certify import tail_negative
        assert tail_negative([(-1, 1, -1.0), (-2, 1, 5.0)])
        assert not tail_negative([(-1, 1, 1.0), (-2, 1, -5.0)])
        assert tail_negative([(-1 + 1j, 1, 1.0), (-1 - 1j, 1, 1.0), (-2, 1, 5.0)])
        assert not tail_negative([(-1, 1, 1.0), (-1, 1, -1.0)])
        assert tail_negative([(-1, 1, 3.0), (-1, 2, -0.1)])

    def test_late_violation_found(self):
        # zero 0.003 right of the dominant pole: g turns negative near t = 900
        tf = RationalTF(1.79, [-2.688845863909213, -2.0057871773013405],
                        [-2.0722111575116413, -2.0090827551190973])
        cert = check_exact_sampled(tf)
        assert cert.refuted and cert.witness["t"] > default_t_max(tf)
