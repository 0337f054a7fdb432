import math

import numpy as np
import pytest

from subspec import classify as K
from subspec.errors import PreconditionError
from subspec.substitution import parse_substitution


class TestConstantLength:
    def test_tm(self, tm):
        from subspec.substitution import constant_length
        assert constant_length(tm) == 2

    def test_fib(self, fib):
        from subspec.substitution import constant_length
        assert constant_length(fib) is None

    def test_rs(self, rs):
        from subspec.substitution import constant_length
        assert constant_length(rs) == 2


class TestHeight:
    def test_period_doubling(self, pdub):
        assert K.height(pdub).h == 1  # fixed point contains "00"

    def test_tm(self, tm):
        hr = K.height(tm)
        assert hr.h == 1 and hr.q == 2

    def test_rs(self, rs):
        assert K.height(rs).h == 1

    def test_height_two_example(self):
        # 0 -> 01, 1 -> 10 has h=1; a genuinely tall example: 0->012, 1->120, 2->201
        z = parse_substitution("0 -> 0 1 2\n1 -> 1 2 0\n2 -> 2 0 1")
        hr = K.height(z)
        assert math.gcd(hr.h, hr.q) == 1 and hr.g0 % hr.h == 0

    def test_invariants(self, tm, rs, pdub):
        for z in (tm, rs, pdub):
            hr = K.height(z)
            assert hr.h >= 1
            assert math.gcd(hr.h, hr.q) == 1
            assert hr.g0 % hr.h == 0

    def test_non_constant_rejected(self, fib):
        with pytest.raises(PreconditionError):
            K.height(fib)


class TestColumnSemigroup:
    def test_closure_idempotent(self, bij3):
        sg = K.column_semigroup(bij3)
        d = bij3.d
        again = set(sg.closure)
        for f in sg.closure:
            for g in sg.generators:
                again.add(tuple(g[f[a]] for a in range(d)))
        assert again == set(sg.closure)
        assert len(sg.closure) <= d**d

    def test_generators_are_rule_columns(self, tm):
        sg = K.column_semigroup(tm)
        assert sg.generators == ((0, 1), (1, 0))


class TestDekking:
    def test_period_doubling_k1(self, pdub):
        assert K.dekking_coincidence(pdub) == (True, 1)

    def test_tm_no_coincidence(self, tm):
        found, _ = K.dekking_coincidence(tm)
        assert not found

    def test_bij3_no_coincidence(self, bij3):
        found, _ = K.dekking_coincidence(bij3)
        assert not found

    def test_power_stability(self, pdub, tm):
        for z in (pdub, tm):
            assert K.dekking_coincidence(z)[0] == K.dekking_coincidence(z.power(2))[0]


class TestBijectivity:
    def test_tm_abelian(self, tm):
        assert K.bijectivity(tm)[0] == "AbelianBijective"

    def test_bij3_non_abelian(self, bij3):
        kind, cols = K.bijectivity(bij3)
        assert kind == "Bijective"
        # columns: identity, 3-cycle (012), transposition fixing 0
        assert (0, 1, 2) in cols

    def test_period_doubling_not_bijective(self, pdub):
        assert K.bijectivity(pdub)[0] == "NotBijective"


class TestPisotReport:
    def test_fib_irreducible_pisot(self, fib):
        rep = K.pisot_report(fib)
        assert rep.irreducible_pisot
        assert rep.char_poly == (1, -1, -1)

    def test_non_pisot_0111(self, np0111):
        rep = K.pisot_report(np0111)
        assert not rep.pf_is_pisot
        roots = sorted(r.real for r in rep.eigenvalues)
        assert roots[0] == pytest.approx((1 - math.sqrt(13)) / 2, abs=1e-10)
        assert roots[1] == pytest.approx((1 + math.sqrt(13)) / 2, abs=1e-10)

    def test_tm_reducible(self, tm):
        rep = K.pisot_report(tm)
        assert rep.char_poly == (1, -2, 0)
        assert not rep.irreducible
        assert rep.theta == pytest.approx(2.0)
        assert rep.pf_is_pisot  # integers > 1 are Pisot

    def test_trace_det_consistency(self, rs):
        rep = K.pisot_report(rs)
        from subspec.substitution import substitution_matrix
        S = substitution_matrix(rs)
        assert sum(rep.eigenvalues).real == pytest.approx(np.trace(S), abs=1e-8)
        assert np.prod(rep.eigenvalues).real == pytest.approx(
            round(np.linalg.det(S.astype(float))), abs=1e-8)


class TestWeakMixing:
    def test_fib_not_weakly_mixing(self, fib):
        assert K.weak_mixing_selfsimilar(fib).verdict == "fails"

    def test_non_pisot_weakly_mixing(self, np0111):
        assert K.weak_mixing_selfsimilar(np0111).verdict == "holds"

    def test_tm_not_weakly_mixing(self, tm):
        assert K.weak_mixing_selfsimilar(tm).verdict == "fails"


class TestSqrtQ:
    def test_tm_singular(self, tm):
        assert K.sqrtq_singularity(tm).verdict == "holds"

    def test_rs_inconclusive_via_exact_division(self, rs):
        c = K.sqrtq_singularity(rs)
        assert c.verdict == "inconclusive"
        assert [1, 0, -2] in c.evidence["exact_sqrtq_factors"]

    def test_period_doubling_fires(self, pdub):
        assert K.sqrtq_singularity(pdub).verdict == "holds"

    def test_non_constant_rejected(self, fib):
        with pytest.raises(PreconditionError):
            K.sqrtq_singularity(fib)


class TestBijectiveTwoLetter:
    def test_tm(self, tm):
        assert K.bijective_two_letter_singularity(tm).verdict == "holds"

    def test_generic_instance(self):
        z = parse_substitution("0 -> 0 1 1\n1 -> 1 0 0")
        assert K.bijective_two_letter_singularity(z).verdict == "holds"

    def test_period_doubling_rejected(self, pdub):
        with pytest.raises(PreconditionError):
            K.bijective_two_letter_singularity(pdub)


class TestSpectrumSummary:
    def test_period_doubling_discrete(self, pdub):
        s = K.spectrum_summary(pdub)
        assert "discrete" in s.headline
        ids = {c.id: c.verdict for c in s.criteria}
        assert ids["dekking-coincidence"] == "holds"

    def test_rs_inconclusive_criterion(self, rs):
        s = K.spectrum_summary(rs)
        ids = {c.id: c.verdict for c in s.criteria}
        assert ids["sqrt-q-singularity"] == "inconclusive"

    def test_fib_pisot_open(self, fib):
        s = K.spectrum_summary(fib)
        assert "Pisot" in s.headline and "open" in s.headline

    def test_every_criterion_names_theorem(self, tm, fib, rs, pdub, bij3, np0111):
        for z in (tm, fib, rs, pdub, bij3, np0111):
            for c in K.spectrum_summary(z).criteria:
                assert c.theorem
                assert c.verdict in {"holds", "fails", "inconclusive", "not-applicable"}


class TestPisotPowerDistances:
    def test_golden_ratio_k5(self):
        dist, theta, _ = K.pisot_power_distances(1, 1, K=5)
        assert theta == pytest.approx((1 + math.sqrt(5)) / 2)
        assert dist[5] == pytest.approx(theta**-5, abs=1e-12)

    def test_k0(self):
        dist, _, _ = K.pisot_power_distances(1, 1, K=0)
        assert dist[0] == pytest.approx(0.0, abs=1e-15)  # ||2 - 1|| wait: ||x + x'|| = 0

    def test_geometric_decay_bound(self):
        dist, theta, theta_c = K.pisot_power_distances(1, 1, K=40)
        for k in range(41):
            assert dist[k] <= abs(theta_c) ** k * 1.01

    def test_non_pisot_no_decay(self):
        dist, _, _ = K.pisot_power_distances(1, 3, K=30)
        assert dist[1:].min() > 0.01

    def test_k_cap(self):
        with pytest.raises(PreconditionError):
            K.pisot_power_distances(1, 1, K=61)


class TestBernoulliFourier:
    def test_xi_zero(self):
        v, _ = K.bernoulli_fourier(0.5, 0.5, 0.0, 100)
        assert v == pytest.approx(1.0)

    def test_dyadic_closed_form(self, rng):
        # oracle: prod_{n>=0} cos(2 pi xi 2^-n) telescopes to sin(4 pi xi)/(4 pi xi)
        for xi in rng.random(100) * 8:
            v, _ = K.bernoulli_fourier(0.5, 0.5, xi, 60)
            ref = math.sin(4 * math.pi * xi) / (4 * math.pi * xi)
            assert abs(v.real - ref) < 1e-10 and abs(v.imag) < 1e-10

    def test_quarter_vanishes(self):
        v, _ = K.bernoulli_fourier(0.5, 0.5, 0.25, 60)
        assert abs(v) < 1e-12

    def test_golden_no_decay_along_powers(self):
        # along xi = phi^k the transform does not decay to 0: the new factors
        # cos(2 pi phi^k) approach 1 because phi^k is exponentially close to
        # the Lucas integers, so |value| stabilizes at a nonzero constant
        lam = 2 / (1 + math.sqrt(5))
        phi = (1 + math.sqrt(5)) / 2
        lucas = [2, 1]
        for _ in range(19):
            lucas.append(lucas[-1] + lucas[-2])
        values = []
        for k in range(10, 17):
            xi = lucas[k] - (-1 / phi) ** k  # phi^k, exact integer recurrence
            v, _ = K.bernoulli_fourier(lam, 0.5, xi, 200)
            values.append(abs(v))
        assert min(values) > 1e-4
        assert max(values) / min(values) < 1.5  # stabilized, not decaying

    def test_tail_bound(self):
        _, tail = K.bernoulli_fourier(0.5, 0.5, 2.0, 20)
        assert tail == pytest.approx(2 * math.pi * 2.0 * 0.5**20 / 0.5)
