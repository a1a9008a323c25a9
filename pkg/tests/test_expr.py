import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hhv.errors import DomainError, Overflow, ParseError, UnknownIdentifierError
from hhv.expr import (
    Binary, Const, Expr, Interval, Num, Unary, Var,
    check_positive, evaluate, parse, serialize,
)


class TestParse:
    def test_variable_identity(self):
        assert parse("x").root == Var()

    def test_structure_forced_by_grammar(self):
        assert parse("exp(2*x) + 1").root == Binary(
            "+", Unary("exp", Binary("*", Num(2.0), Var())), Num(1.0)
        )

    def test_power_right_associative_against_ast_oracle(self):
        # hand-built oracle: 2^(3^2) = 512, not (2^3)^2 = 64
        oracle = Binary("^", Num(2.0), Binary("^", Num(3.0), Num(2.0)))
        assert parse("2^3^2").root == oracle
        assert evaluate(parse("2^3^2"), 0.37) == 512.0

    def test_unary_minus_binds_looser_than_power(self):
        assert evaluate(parse("-2^2"), 0.0) == -4.0
        assert evaluate(parse("x^-1"), 4.0) == 0.25

    def test_precedence_mul_over_add(self):
        assert evaluate(parse("1 + 2*3"), 0.0) == 7.0
        assert evaluate(parse("(1 + 2)*3"), 0.0) == 9.0

    def test_constants(self):
        assert evaluate(parse("e"), 0.0) == math.e
        assert evaluate(parse("pi"), 0.0) == math.pi

    def test_scientific_literals(self):
        assert evaluate(parse("1e-07"), 0.0) == 1e-7
        assert evaluate(parse("2.5E+2"), 0.0) == 250.0

    def test_function_requires_parentheses(self):
        with pytest.raises(ParseError) as exc:
            parse("exp x")
        assert exc.value.offset == 4
        assert "'('" in exc.value.expected

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError) as exc:
            parse("2*y + 1")
        assert exc.value.offset == 2

    def test_syntax_error_offset_and_expected(self):
        with pytest.raises(ParseError) as exc:
            parse("1 + * 2")
        assert exc.value.offset == 4
        assert exc.value.expected

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse("x 2")

    def test_empty_rejected(self):
        with pytest.raises(ParseError):
            parse("   ")

    def test_unbalanced_parens(self):
        with pytest.raises(ParseError):
            parse("exp(x")


# strategy for random ASTs; leaves kept positive so texts stay short
_leaves = st.one_of(
    st.builds(Num, st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)),
    st.just(Var()),
    st.builds(Const, st.sampled_from(["e", "pi"])),
)
_asts = st.recursive(
    _leaves,
    lambda children: st.one_of(
        st.builds(Unary, st.sampled_from(["neg", "exp", "ln", "sqrt", "abs"]), children),
        st.builds(Binary, st.sampled_from(["+", "-", "*", "/", "^"]), children, children),
    ),
    max_leaves=25,
)


class TestRoundTrip:
    @given(_asts)
    def test_serialize_parse_is_identity_on_asts(self, node):
        assert parse(serialize(node)).root == node

    @pytest.mark.parametrize("text", [
        "x", "-x", "--x", "2^3^2", "x^-2*3", "1 - 2 - 3", "1 - (2 - 3)",
        "exp(2*x) + 1", "x*-2", "2/3/4", "abs(-x)^2", "sqrt(x)/ln(x + 2)",
        "-(x + 1)", "(2^3)^2", "1e-07*x + e",
    ])
    def test_reserialization_is_stable(self, text):
        once = parse(text)
        again = parse(serialize(once.root))
        assert again.root == once.root


class TestEvaluate:
    def test_exp_at_zero(self):
        assert evaluate(parse("exp(x)"), 0.0) == 1.0

    def test_polynomial_exact(self):
        assert evaluate(parse("x^2 + 3*x"), 2.0) == 10.0

    def test_ln_domain_error(self):
        with pytest.raises(DomainError):
            evaluate(parse("ln(x)"), 0.0)

    def test_sqrt_domain_error(self):
        with pytest.raises(DomainError):
            evaluate(parse("sqrt(x)"), -1.0)

    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            evaluate(parse("1/x"), 0.0)

    def test_zero_to_negative_power(self):
        with pytest.raises(DomainError):
            evaluate(parse("x^-1"), 0.0)

    def test_negative_base_fractional_exponent(self):
        with pytest.raises(DomainError):
            evaluate(parse("x^0.5"), -2.0)

    def test_negative_base_integer_exponent_ok(self):
        assert evaluate(parse("x^2"), -3.0) == 9.0

    def test_overflow_is_typed(self):
        with pytest.raises(Overflow):
            evaluate(parse("exp(exp(x))"), 10.0)

    def test_never_a_silent_nan(self):
        # inf - inf would be NaN; must surface as a typed error instead
        with pytest.raises(Overflow):
            evaluate(parse("exp(x) - exp(x + 1e-9)"), 1000.0)

    def test_eval_is_pure(self):
        f = parse("exp(x^2) - ln(x + 2)/3")
        vals = {evaluate(f, 0.731) for _ in range(10)}
        assert len(vals) == 1

    def test_eval_array_matches_scalar(self):
        f = parse("exp(x^2) - ln(x + 2)/3")
        xs = np.linspace(-1, 1, 17)
        arr = f.eval_array(xs)
        assert [evaluate(f, float(x)) for x in xs] == list(arr)

    def test_error_carries_smallest_index(self):
        f = parse("sqrt(1 - x) + ln(x)")
        with pytest.raises(DomainError) as exc:
            f.eval_array(np.array([0.0, 0.5, 2.0]))
        # x=0 fails ln before x=2 fails sqrt; smallest index wins
        assert exc.value.index == 0
        assert exc.value.x == 0.0

    def test_rejects_nonfinite_points(self):
        with pytest.raises(ValueError):
            evaluate(parse("x"), math.inf)


class TestCheckPositive:
    def test_exp_positive(self):
        res = check_positive(parse("exp(x)"), Interval(0, 1), 64)
        assert res.ok and res.witness is None

    def test_negative_endpoint(self):
        res = check_positive(parse("x"), Interval(-1, 1), 64)
        assert not res.ok
        assert res.witness == -1.0

    def test_root_witness_in_lower_half(self):
        # roots at +/- 0.5 by direct algebra, so f <= 0 on [0, 0.5)
        res = check_positive(parse("x^2 - 0.25"), Interval(0, 1), 64)
        assert not res.ok
        assert 0.0 <= res.witness < 0.5

    def test_eval_failure_is_negative_verdict(self):
        res = check_positive(parse("ln(x)"), Interval(0, 1), 16)
        assert not res.ok
        assert res.witness == 0.0

    def test_nonpositive_before_eval_failure_wins(self):
        # f(x) = -sqrt(1-x): negative from x=0 onwards, unevaluable after x=1
        res = check_positive(parse("-sqrt(1 - x)"), Interval(0, 2), 64)
        assert not res.ok
        assert res.witness == 0.0

    def test_true_implies_positive_on_grid(self):
        f = parse("exp(x) - 0.5")
        n = 32
        res = check_positive(f, Interval(0, 1), n)
        assert res.ok
        xs = np.linspace(0, 1, n + 1)
        assert (f.eval_array(xs) > 0).all()

    def test_grid_size_validated(self):
        with pytest.raises(ValueError):
            check_positive(parse("x"), Interval(0, 1), 1)


class TestInterval:
    def test_orders_strictly(self):
        with pytest.raises(ValueError):
            Interval(1.0, 1.0)
        with pytest.raises(ValueError):
            Interval(2.0, 1.0)

    def test_finite_required(self):
        with pytest.raises(ValueError):
            Interval(0.0, math.inf)

    def test_midpoint_and_width(self):
        iv = Interval(1.0, 3.0)
        assert iv.midpoint == 2.0
        assert iv.width == 2.0
