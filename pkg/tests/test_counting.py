import itertools
import math

import pytest

from primebias import UsageError, build_primes, classified_counts, make_character
from primebias import counting as C
from primebias.characters import ResidueClassPredicate


@pytest.fixture(scope="module")
def cc4(store_1e5, chi4):
    return classified_counts(store_1e5, chi4)


@pytest.fixture(scope="module")
def cc5(store_1e5, chi5):
    return classified_counts(store_1e5, chi5)


class TestSemiprimeCounts:
    def test_x30_worked_example(self, chi4, cc4):
        # semiprimes <= 30: {4,6,9,10,14,15,21,22,25,26}; odd: {9,15,21,25};
        # class (-,-): {9, 21}
        sc = C.count_semiprimes_by_class(30, chi4, counts=cc4)
        assert sc.counts == {(1, 1): 1, (1, -1): 1, (-1, -1): 2}
        assert sc.total_coprime == 4
        assert sc.ramified == 6
        assert sc.total == 10

    def test_x4_only_square_of_two(self, chi5):
        sc = C.count_semiprimes_by_class(4, chi5)
        assert sc.total_coprime == 1  # 4 = 2*2 and gcd(2, 5) = 1
        assert sc.ramified == 0

    def test_x4_ramified_for_even_conductor(self, chi4):
        sc = C.count_semiprimes_by_class(4, chi4)
        assert sc.total_coprime == 0
        assert sc.ramified == 1

    def test_strict_drops_squares(self, chi4, cc4):
        leq = C.count_semiprimes_by_class(1000, chi4, counts=cc4)
        lt = C.count_semiprimes_by_class(1000, chi4, counts=cc4, strict=True)
        squares = [p * p for p in cc4.store.primes.tolist() if p * p <= 1000 and p % 2 == 1]
        assert leq.total_coprime - lt.total_coprime == len(squares)

    @pytest.mark.parametrize("x", [10**3, 3 * 10**3, 10**4])
    @pytest.mark.parametrize("D", [-4, 5, 8, -3])
    def test_oracle_equivalence(self, x, D, store_1e5):
        chi = make_character(D)
        cc = classified_counts(store_1e5, chi)
        for strict in (False, True):
            fast = C.count_semiprimes_by_class(x, chi, counts=cc, strict=strict)
            slow = C.oracle_semiprime_class_counts(x, chi, strict=strict)
            assert fast.counts == slow.counts
            assert fast.ramified == slow.ramified
            assert fast.total_coprime == slow.total_coprime

    def test_class_completeness(self, store_1e5):
        for D in (-4, 5):
            chi = make_character(D)
            cc = classified_counts(store_1e5, chi)
            for x in (10**3, 10**4):
                sc = C.count_semiprimes_by_class(x, chi, counts=cc)
                assert sc.total == C.naive_oracle(x, lambda f: True)

    def test_monotone_in_x(self, chi4, cc4):
        grid = [100, 500, 10**3, 10**4, 10**5]
        prev = None
        for x in grid:
            sc = C.count_semiprimes_by_class(x, chi4, counts=cc4)
            vals = [sc.counts[k] for k in C.PAIR_KEYS] + [sc.ramified, sc.total_coprime]
            if prev is not None:
                assert all(a >= b for a, b in zip(vals, prev))
            prev = vals

    def test_preconditions(self, chi4):
        with pytest.raises(UsageError):
            C.count_semiprimes_by_class(3, chi4)

    def test_worker_determinism(self, chi4):
        a = classified_counts(build_primes(10**5, workers=1), chi4)
        b = classified_counts(build_primes(10**5, workers=4), chi4)
        ra = C.count_semiprimes_by_class(10**5, chi4, counts=a)
        rb = C.count_semiprimes_by_class(10**5, chi4, counts=b)
        assert ra.counts == rb.counts and ra.total_coprime == rb.total_coprime


class TestRatioR:
    def test_x30_ratio(self, chi4, cc4):
        rep = C.ratio_r(30, chi4, -1, counts=cc4, lchi_value=-0.335)
        assert rep.ratio == pytest.approx(2.0)  # 2 / (0.25 * 4)
        assert rep.count == 2 and rep.total == 4

    def test_published_row_1e5(self, chi4, cc4):
        # strict p < q matches the published table from 10^4 up
        rep = C.ratio_r(10**5, chi4, -1, counts=cc4, strict=True)
        assert rep.ratio == pytest.approx(1.212, abs=5e-4)

    def test_requires_x9(self, chi4, cc4):
        with pytest.raises(UsageError):
            C.ratio_r(8, chi4, -1, counts=cc4)

    def test_bad_eta(self, chi4, cc4):
        with pytest.raises(UsageError):
            C.ratio_r(100, chi4, 0, counts=cc4)

    def test_prediction_sign(self, chi4, cc4):
        minus = C.ratio_r(10**4, chi4, -1, counts=cc4)
        plus = C.ratio_r(10**4, chi4, 1, counts=cc4)
        assert minus.predicted > 1 > plus.predicted
        assert minus.lchi == pytest.approx(-0.334981, abs=1e-5)


class TestKAlmost:
    def test_k2_equals_semiprimes(self, chi4, cc4):
        for x in (10**3, 10**4):
            rep = C.count_k_almost(x, 2, chi4, -1, counts=cc4, lchi_value=0.0)
            sc = C.count_semiprimes_by_class(x, chi4, counts=cc4)
            assert rep.count == sc.counts[(-1, -1)]
            assert rep.total == sc.total_coprime

    def test_x100_k3(self, chi4, cc4):
        # products of three primes all = 3 (mod 4) up to 100:
        # 27 = 3*3*3, 63 = 3*3*7, 99 = 3*3*11 (the oracle confirms all three)
        rep = C.count_k_almost(100, 3, chi4, -1, counts=cc4, lchi_value=0.0)
        oracle = C.naive_oracle(100, lambda f: all(p % 4 == 3 for p in f), k=3)
        assert oracle == 3
        assert rep.count == oracle

    @pytest.mark.parametrize("D", [-4, 5, 8, -3])
    @pytest.mark.parametrize("k", [2, 3])
    def test_oracle_equivalence(self, D, k, store_1e5):
        chi = make_character(D)
        cc = classified_counts(store_1e5, chi)
        for x in (10**3, 10**4):
            rep = C.count_k_almost(x, k, chi, -1, counts=cc, lchi_value=0.0)
            sel = C.naive_oracle(x, lambda f: all(chi.eval(p) == -1 for p in f), k=k)
            tot = C.naive_oracle(x, lambda f: all(chi.eval(p) != 0 for p in f), k=k)
            assert (rep.count, rep.total) == (sel, tot)

    def test_k_range(self, chi4, cc4):
        for k in (1, 9):
            with pytest.raises(UsageError):
                C.count_k_almost(10**4, k, chi4, -1, counts=cc4)

    def test_k8_runs(self, chi4, cc4):
        rep = C.count_k_almost(10**4, 8, chi4, -1, counts=cc4, lchi_value=0.0)
        oracle = C.naive_oracle(10**4, lambda f: all(p % 4 == 3 for p in f), k=8)
        assert rep.count == oracle


class TestMixed:
    def test_k1_is_prime_class_ratio(self, chi4, cc4, store_1e5):
        rep = C.count_mixed(10**4, [(chi4, -1)], store=store_1e5)
        n_minus = cc4.query(10**4, -1)
        n_coprime = cc4.query(10**4, -1) + cc4.query(10**4, 1)
        assert rep.count == n_minus
        assert rep.total == n_coprime
        assert rep.ratio == pytest.approx(n_minus / (0.5 * n_coprime))
        assert rep.predicted == pytest.approx(1.0)  # (k-1) factor vanishes

    def test_k2_opposite_etas_no_bias(self, chi4, store_1e5):
        rep = C.count_mixed(10**4, [(chi4, 1), (chi4, -1)], store=store_1e5)
        assert rep.lchi == pytest.approx(0.0, abs=1e-12)  # c = 0
        assert rep.predicted == pytest.approx(1.0)

    def test_x100_both_minus_ordered_count(self, chi4, store_1e5):
        # brute-force double loop over primes <= 50 (independent oracle)
        primes = [p for p in store_1e5.primes.tolist() if p <= 50]
        expected = sum(
            1 for p in primes for q in primes if p * q <= 100 and p % 4 == 3 and q % 4 == 3
        )
        assert expected == 14
        rep = C.count_mixed(100, [(chi4, -1), (chi4, -1)], store=store_1e5)
        assert rep.count == expected

    def test_ordered_oracle_two_characters(self, chi4, chi5, store_1e5):
        specs = [(chi4, -1), (chi5, 1)]

        def weight(f):
            p, q = f
            arrangements = set(itertools.permutations((p, q)))
            return sum(
                1 for a, b in arrangements if chi4.eval(a) == -1 and chi5.eval(b) == 1
            )

        def weight_tot(f):
            p, q = f
            arrangements = set(itertools.permutations((p, q)))
            return sum(
                1 for a, b in arrangements if chi4.eval(a) != 0 and chi5.eval(b) != 0
            )

        rep = C.count_mixed(3000, specs, store=store_1e5)
        assert rep.count == C.naive_oracle(3000, weight, k=2)
        assert rep.total == C.naive_oracle(3000, weight_tot, k=2)

    def test_ordered_oracle_three_positions(self, chi4, chi5, store_1e5):
        specs = [(chi4, -1), (chi5, -1), (chi4, 1)]

        def weight(f):
            seen = set()
            n = 0
            for perm in itertools.permutations(f):
                if perm in seen:
                    continue
                seen.add(perm)
                if (
                    chi4.eval(perm[0]) == -1
                    and chi5.eval(perm[1]) == -1
                    and chi4.eval(perm[2]) == 1
                ):
                    n += 1
            return n

        rep = C.count_mixed(2000, specs, store=store_1e5)
        assert rep.count == C.naive_oracle(2000, weight, k=3)

    def test_spec_validation(self, chi4, store_1e5):
        with pytest.raises(UsageError):
            C.count_mixed(100, [], store=store_1e5)
        with pytest.raises(UsageError):
            C.count_mixed(100, [(chi4, 2)], store=store_1e5)
        with pytest.raises(UsageError):
            C.count_mixed(100, [(chi4, -1)] * 7, store=store_1e5)


class TestWeightedRace:
    def test_x10_by_hand(self, chi4, cc4):
        res = C.weighted_race(10, chi4, counts=cc4, lchi_value=-0.335)
        assert res.s_plus == pytest.approx(1 / 5, abs=1e-15)
        assert res.s_minus == pytest.approx(1 / 3 + 1 / 7, abs=1e-15)
        assert res.ratio == pytest.approx(0.42, abs=1e-12)

    def test_swapping_labels_inverts(self, chi4, cc4):
        res = C.weighted_race(10**4, chi4, counts=cc4, lchi_value=-0.335)
        swapped = res.s_minus / res.s_plus
        assert swapped == pytest.approx(1.0 / res.ratio, rel=1e-12)

    def test_sums_positive_and_bounded(self, store_1e5):
        for D in (-4, 8):
            chi = make_character(D)
            cc = classified_counts(store_1e5, chi)
            for x in (100, 10**4, 10**5):
                res = C.weighted_race(x, chi, counts=cc, lchi_value=-0.3)
                assert res.s_plus > 0 and res.s_minus > 0
                bound = math.log(math.log(x)) + 1
                assert res.s_plus < bound and res.s_minus < bound

    def test_requires_x7(self, chi4, cc4):
        with pytest.raises(UsageError):
            C.weighted_race(6, chi4, counts=cc4)


class TestProgressionPairs:
    def test_all_classes_ratio_one(self, store_1e5):
        a = [ResidueClassPredicate(4, 1), ResidueClassPredicate(4, 3)]
        b = [ResidueClassPredicate(5, r) for r in (1, 2, 3, 4)]
        rep = C.progression_pair_ratio(10**4, a, b, store=store_1e5)
        assert rep.ratio == pytest.approx(1.0, abs=1e-15)

    def test_same_set_close_to_ratio_r(self, chi4, cc4, store_1e5):
        # ordered-tuple counting differs from the unordered ratio only by
        # the square terms, which vanish as x grows
        pp = C.progression_pair_ratio(
            10**5, [ResidueClassPredicate(4, 3)], [ResidueClassPredicate(4, 3)], store=store_1e5
        )
        rr = C.ratio_r(10**5, chi4, -1, counts=cc4, lchi_value=-0.335)
        assert pp.ratio == pytest.approx(rr.ratio, abs=0.01)

    def test_ordered_oracle(self, store_1e5):
        a = [ResidueClassPredicate(4, 3)]
        b = [ResidueClassPredicate(5, 2), ResidueClassPredicate(5, 3)]

        def weight(f):
            p, q = f
            pairs = {(p, q), (q, p)}
            return sum(1 for s, t in pairs if s % 4 == 3 and t % 5 in (2, 3))

        def weight_tot(f):
            p, q = f
            pairs = {(p, q), (q, p)}
            return sum(1 for s, t in pairs if s % 4 != 0 and s % 2 != 0 and t % 5 != 0)

        for x in (10**3, 10**4):
            rep = C.progression_pair_ratio(x, a, b, store=store_1e5)
            assert rep.count == C.naive_oracle(x, weight, k=2)
            assert rep.total == C.naive_oracle(x, weight_tot, k=2)

    def test_beta_estimate(self, store_1e5):
        rep = C.progression_pair_ratio(
            10**5, [ResidueClassPredicate(4, 3)], [ResidueClassPredicate(4, 3)], store=store_1e5
        )
        assert rep.beta == pytest.approx((rep.ratio - 1) * math.log(math.log(10**5)))

    def test_validation(self, store_1e5):
        with pytest.raises(UsageError):
            C.progression_pair_ratio(100, [], [ResidueClassPredicate(4, 3)], store=store_1e5)
        with pytest.raises(UsageError):
            C.progression_pair_ratio(
                100,
                [ResidueClassPredicate(4, 1), ResidueClassPredicate(3, 1)],
                [ResidueClassPredicate(4, 3)],
                store=store_1e5,
            )


class TestNaiveOracle:
    def test_examples(self):
        assert C.naive_oracle(30, lambda f: f[0] % 2 == 1) == 4  # {9, 15, 21, 25}
        assert C.naive_oracle(4, lambda f: True) == 1
        assert C.naive_oracle(100, lambda f: all(p % 4 == 3 for p in f), k=3) == 3

    def test_factors_sorted_with_multiplicity(self):
        fac = C._factor_table(100)
        assert fac[12] == (2, 2, 3)
        assert fac[97] == (97,)
        assert fac[60] == (2, 2, 3, 5)

    def test_ceiling(self):
        with pytest.raises(UsageError):
            C.naive_oracle(10**6 + 1, lambda f: True)
