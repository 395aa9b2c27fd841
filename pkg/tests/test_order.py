import random
from fractions import Fraction

import pytest

from hfring import algebra, order
from hfring import expr as ex
from hfring import piecewise as pw
from hfring import scalars, suite
from hfring.errors import ConvergenceError, EngineError, NotPiecewiseLinear
from hfring.interval import Interval
from hfring.order import FunctionSequence
from hfring.piecewise import Domain


def F(v):
    return pw.to_scalar(v)


class TestFuncLeq:
    def test_step_pair_order(self, step_pair):
        f, g = step_pair
        assert order.func_leq(g, f)
        assert not order.func_leq(f, g)

    def test_reflexive(self, step_pair):
        f, _ = step_pair
        assert order.func_leq(f, f)

    def test_constant_below_oscillation(self, oscillation_pair):
        f, _ = oscillation_pair
        low = pw.constant_function(f.domain, -2)
        assert order.func_leq(low, f)

    def test_partial_order_on_suite(self):
        functions = suite.h_continuous_suite(61, 12)
        for f in functions:
            assert order.func_leq(f, f)
        for f in functions:
            for g in functions:
                if order.func_leq(f, g) and order.func_leq(g, f):
                    assert pw.func_equal(f, g)
                for h in functions:
                    if order.func_leq(f, g) and order.func_leq(g, h):
                        assert order.func_leq(f, h)

    def test_unbounded_linear_pieces(self):
        dom = Domain(None, None)
        a = pw.hfunction(dom, [], [pw.make_piece(None, None, ex.parse("x"))])
        b = pw.hfunction(dom, [], [pw.make_piece(None, None, ex.parse("x + 1"))])
        c = pw.hfunction(dom, [], [pw.make_piece(None, None, ex.parse("2*x"))])
        assert order.func_leq(a, b)
        assert not order.func_leq(a, c)  # slopes differ on the whole line


class TestInfconv:
    def test_step_ramp_by_hand(self, step_pair):
        f, _ = step_pair
        m = order.infconv_approx(f, 2)
        assert m.eval_at(-1) == Interval.of(0, 0)
        assert m.eval_at("1/4") == Interval.of("1/2", "1/2")
        assert m.eval_at("1/2") == Interval.of(1, 1)
        assert m.eval_at(3) == Interval.of(1, 1)
        assert m.breakpoints == (F(0), F("1/2"))

    def test_lipschitz_function_fixed(self):
        dom = Domain.of(-1, 1)
        g = pw.hfunction(dom, [], [pw.make_piece(F(-1), F(1), ex.parse("2*x + 1"))])
        assert pw.func_equal(order.infconv_approx(g, 3), g)
        assert pw.func_equal(order.infconv_approx(g, 2), g)

    def test_monotone_in_n(self, step_pair):
        f, _ = step_pair
        m1 = order.infconv_approx(f, 1)
        m2 = order.infconv_approx(f, 2)
        assert order.func_leq(m1, m2)

    def test_below_and_lipschitz(self):
        rng = random.Random(62)
        for f in suite.h_continuous_suite(62, 8):
            n = rng.randint(1, 6)
            m = order.infconv_approx(f, n)
            lower = pw.hfunction(
                f.domain,
                [(p.x, Interval.point(p.value.lo)) for p in f.points],
                [pw.make_piece(p.lo, p.hi, p.lower) for p in f.pieces],
                validate=False,
            )
            assert order.func_leq(m, lower)
            xs = pw.func_sample_points(m, 40, tag="lip")
            for a, b in zip(xs, xs[1:]):
                if a == b:
                    continue
                da = m.eval_at(a).lo
                db = m.eval_at(b).lo
                assert abs(da - db) <= n * abs(a - b)

    def test_from_above_dual(self, step_pair):
        f, _ = step_pair
        m = order.infconv_approx(f, 2, order.FROM_ABOVE)
        assert m.eval_at(-1) == Interval.of(0, 0)
        assert m.eval_at("-1/4") == Interval.of("1/2", "1/2")
        assert m.eval_at("1/4") == Interval.of(1, 1)
        upper = pw.hfunction(
            f.domain,
            [(p.x, Interval.point(p.value.hi)) for p in f.points],
            [pw.make_piece(p.lo, p.hi, p.upper) for p in f.pieces],
            validate=False,
        )
        assert order.func_leq(upper, m)

    def test_requires_piecewise_linear(self, oscillation_pair):
        f, _ = oscillation_pair
        with pytest.raises(NotPiecewiseLinear):
            order.infconv_approx(f, 2)


class TestOrderLimit:
    def test_infconv_limit_recovers_step(self, step_pair):
        f, _ = step_pair
        result = order.order_limit_monotone(order.from_below_sequence(f), depth=16)
        assert pw.func_equal(result.limit, f)
        assert result.residual == 0.0
        witness = result.witness
        assert witness is not None
        for n in (1, 2, 5):
            assert order.func_leq(witness.alpha.element(n), witness.limit)
            assert order.func_leq(witness.limit, witness.beta.element(n))

    def test_constant_sequence(self):
        f = pw.constant_function(Domain.of(-1, 1), 4)
        seq = FunctionSequence(lambda n: f, "increasing")
        result = order.order_limit_monotone(seq, depth=8)
        assert pw.func_equal(result.limit, f)

    def test_drifting_constants_float_mode(self, float_mode):
        dom = Domain.of(-1, 1)
        seq = FunctionSequence(
            lambda n: pw.constant_function(dom, 1.0 - 2.0 ** (-n)), "increasing"
        )
        result = order.order_limit_monotone(seq, depth=40)
        assert pw.func_equal(result.limit, pw.constant_function(dom, 1.0))

    def test_drifting_constants_rational_mode_rejected(self):
        dom = Domain.of(-1, 1)
        seq = FunctionSequence(
            lambda n: pw.constant_function(dom, 1 - Fraction(1, 2**n)), "increasing"
        )
        with pytest.raises(ConvergenceError):
            order.order_limit_monotone(seq, depth=8)

    def test_monotone_tag_required(self, step_pair):
        f, _ = step_pair
        seq = FunctionSequence(lambda n: f, "none")
        with pytest.raises(EngineError):
            order.order_limit_monotone(seq, depth=4)

    def test_wrong_tag_detected(self):
        dom = Domain.of(-1, 1)
        seq = FunctionSequence(
            lambda n: pw.constant_function(dom, Fraction(1, n)), "increasing"
        )
        with pytest.raises(EngineError):
            order.order_limit_monotone(seq, depth=4)

    def test_decreasing_limit(self, step_pair):
        f, _ = step_pair
        seq = FunctionSequence(
            lambda n: order.infconv_approx(f, n, order.FROM_ABOVE), "decreasing"
        )
        result = order.order_limit_monotone(seq, depth=16)
        assert pw.func_equal(result.limit, f)


class TestCauchy:
    def test_infconv_sequence_with_explicit_witness(self, step_pair):
        f, _ = step_pair
        seq = order.from_below_sequence(f)
        # the n-th approximant differs from the bound by at most the jump, and
        # increments are dominated by the gap of the n-th element
        upper = order.infconv_approx(f, 1, order.FROM_ABOVE)

        def beta(n):
            gap = algebra.oplus_def1(
                order.infconv_approx(f, n, order.FROM_ABOVE),
                algebra.additive_inverse(order.infconv_approx(f, n)),
            ).result
            return gap

        witness = FunctionSequence(beta, "decreasing")
        report = order.verify_cauchy(seq, witness, depth=4, tol=2.0)
        assert report.passed, report.first_violation

    def test_constant_sequence_with_1_over_n(self):
        dom = Domain.of(-1, 1)
        seq = FunctionSequence(lambda n: pw.constant_function(dom, 5), "increasing")
        beta = FunctionSequence(
            lambda n: pw.constant_function(dom, Fraction(1, n)), "decreasing"
        )
        report = order.verify_cauchy(seq, beta, depth=6, tol=0.2)
        assert report.passed

    def test_oscillating_sequence_fails(self):
        dom = Domain.of(-1, 1)
        seq = FunctionSequence(
            lambda n: pw.constant_function(dom, 1 if n % 2 else -1), "none"
        )
        beta = FunctionSequence(
            lambda n: pw.constant_function(dom, Fraction(3, 2 * n)), "decreasing"
        )
        report = order.verify_cauchy(seq, beta, depth=5, tol=10.0)
        assert not report.passed
        assert "exceeds" in report.first_violation


class TestDef3:
    def test_step_sum_exact(self, step_pair):
        f, g = step_pair
        report = order.oplus_def3(f, g, depth=32)
        assert pw.func_equal(report.result, pw.constant_function(f.domain, 0))
        assert report.max_deviation == 0

    def test_continuous_pair_is_plain_sum(self):
        dom = Domain.of(-1, 1)
        a = pw.hfunction(dom, [], [pw.make_piece(F(-1), F(1), ex.parse("x"))])
        b = pw.hfunction(dom, [], [pw.make_piece(F(-1), F(1), ex.parse("1 - 2*x"))])
        report = order.oplus_def3(a, b, depth=16)
        assert pw.func_equal(report.result, pw.pointwise_add(a, b))

    def test_product_matches_def1(self, step_pair):
        f, g = step_pair
        report = order.otimes_def3(f, g, depth=32)
        assert pw.func_equal(report.result, report.witnesses["def1"])
        assert report.max_deviation == 0

    def test_suite_pairs_match_def1(self):
        functions = suite.h_continuous_suite(63, 8)
        for i in range(0, 8, 2):
            f, g = functions[i], functions[i + 1]
            for op in (order.oplus_def3, order.otimes_def3):
                report = op(f, g, depth=64)
                assert report.max_deviation <= Fraction(1, 1000)

    def test_requires_piecewise_linear(self, oscillation_pair):
        f, g = oscillation_pair
        with pytest.raises(NotPiecewiseLinear):
            order.oplus_def3(f, g, depth=8)


class TestMixture:
    def test_same_sequence_unchanged(self, step_pair):
        f, _ = step_pair
        seq = order.from_below_sequence(f)
        mixed = order.mixture(seq, seq)
        for n in (1, 2, 3, 4):
            assert pw.func_equal(mixed.element(n), seq.element((n + 1) // 2))

    def test_indexing_alternates(self):
        dom = Domain.of(-1, 1)
        a = FunctionSequence(lambda n: pw.constant_function(dom, n), "increasing")
        b = FunctionSequence(lambda n: pw.constant_function(dom, -n), "decreasing")
        mixed = order.mixture(a, b)
        assert mixed.element(1).eval_at(0) == Interval.of(1, 1)
        assert mixed.element(2).eval_at(0) == Interval.of(-1, -1)
        assert mixed.element(3).eval_at(0) == Interval.of(2, 2)
        assert mixed.element(4).eval_at(0) == Interval.of(-2, -2)

    def test_well_definedness_of_order_limit_ops(self, step_pair):
        # interleaving the n-ramp and 2n-ramp approximations changes the
        # approximating sequences but not the resulting operation
        f, g = step_pair
        fa = order.from_below_sequence(f)
        fb = FunctionSequence(lambda n: order.infconv_approx(f, 2 * n), "increasing")
        ga = order.from_below_sequence(g)
        gb = FunctionSequence(lambda n: order.infconv_approx(g, 2 * n), "increasing")
        base = order.def3_from_sequences(fa, ga, "plus", depth=32).limit
        mixed = order.def3_from_sequences(
            order.mixture(fa, fb), order.mixture(ga, gb), "plus", depth=32
        ).limit
        assert pw.func_equal(base, mixed)
        assert pw.func_equal(base, pw.constant_function(f.domain, 0))
