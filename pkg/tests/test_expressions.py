import numpy as np
import pytest

from hyperpolate import ComplexityModel, Grammar, complexity, parse, serialize
from hyperpolate.expressions import (
    ShapeEnumerator,
    canonical_simplify,
    const,
    evaluate,
    node_count,
    slot_count,
    struct_key,
    substitute,
    var,
)


class TestSerializeParse:
    @pytest.mark.parametrize(
        "text",
        [
            "cos(sqrt(add(pow2(x),pow2(y))))",
            "cos(sqrt(add(pow2(x),400)))",
            "sqrt(add(pow2(x),1))",
            "add(x,y,1)",
            "div(1,x)",
            "sub(0,mul(x,2))",
            "exp(sub(x,y))",
            "abs(sin(x))",
            "mul(x,0.5)",
        ],
    )
    def test_round_trip(self, text):
        assert serialize(parse(text)) == text

    def test_integer_formatting(self):
        assert serialize(const(400.0)) == "400"
        assert serialize(const(-20.0)) == "-20"
        assert serialize(const(0.5)) == "0.5"

    def test_struct_key_wildcards_constants(self):
        a = parse("cos(sqrt(add(pow2(x),400)))")
        b = parse("cos(sqrt(add(pow2(x),399.5)))")
        assert struct_key(a) == struct_key(b)
        assert struct_key(a) != struct_key(parse("cos(sqrt(add(pow2(x),pow2(y))))"))


class TestSimplify:
    def test_constant_folding(self):
        assert serialize(canonical_simplify(parse("add(pow2(-20),0)"))) == "400"

    def test_identities(self):
        assert serialize(canonical_simplify(("mul", const(1.0), var("x")))) == "x"
        assert serialize(canonical_simplify(("mul", const(0.0), var("x")))) == "0"
        assert serialize(canonical_simplify(("sub", var("x"), const(0.0)))) == "x"
        assert serialize(canonical_simplify(("div", var("x"), const(1.0)))) == "x"
        assert (
            serialize(canonical_simplify(("sqrt", ("pow2", var("x"))))) == "abs(x)"
        )

    def test_commutative_sorting(self):
        assert serialize(canonical_simplify(("add", var("y"), var("x")))) == "add(x,y)"
        assert (
            serialize(canonical_simplify(("mul", const(2.0), var("x")))) == "mul(x,2)"
        )

    def test_even_argument_normalisation(self):
        assert (
            serialize(canonical_simplify(("pow2", ("sub", const(0.0), var("x")))))
            == "pow2(x)"
        )
        assert (
            serialize(canonical_simplify(("cos", ("sub", var("y"), var("x")))))
            == "cos(sub(x,y))"
        )


class TestEvaluate:
    def test_vectorized(self):
        e = parse("cos(sqrt(add(pow2(x),400)))")
        x = np.linspace(-40, 40, 81)
        assert np.allclose(evaluate(e, {"x": x}), np.cos(np.sqrt(x**2 + 400)))

    def test_domain_error_is_nan(self):
        e = parse("sqrt(x)")
        out = evaluate(e, {"x": np.array([-1.0, 4.0])})
        assert np.isnan(out[0]) and out[1] == 2.0

    def test_substitute(self):
        e = parse("cos(sqrt(add(pow2(x),pow2(y))))")
        restricted = canonical_simplify(substitute(e, {"y": const(-20.0)}))
        assert serialize(restricted) == "cos(sqrt(add(pow2(x),400)))"


class TestComplexity:
    def test_ripple_preference(self):
        y2_form = parse("cos(sqrt(add(pow2(x),pow2(y))))")
        const_form = parse("cos(sqrt(add(pow2(x),400)))")
        assert complexity(y2_form) < complexity(const_form)

    def test_constant_monotone_in_nodes(self):
        assert complexity(const(3.0)) < complexity(parse("add(x,3)"))

    def test_nonint_constant_expensive(self):
        assert complexity(var("x")) < complexity(("mul", const(2.71828), var("x")))

    def test_custom_model(self):
        cheap = ComplexityModel(int_bit_cost=0.0)
        assert complexity(const(400.0), cheap) == complexity(const(1.0), cheap)


class TestEnumeration:
    def test_counts_deterministic(self):
        g = Grammar(variables=("t",))
        counts = [len(ShapeEnumerator(g).shapes(n)) for n in range(1, 7)]
        counts2 = [len(ShapeEnumerator(g).shapes(n)) for n in range(1, 7)]
        assert counts == counts2
        assert counts[0] == 1
        assert all(b > a for a, b in zip(counts, counts2[1:]))

    def test_shapes_are_canonical(self):
        g = Grammar(variables=("t",))
        shapes = ShapeEnumerator(g).shapes(5)
        keys = [serialize(s) for s in shapes]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)

    def test_every_shape_contains_a_variable(self):
        g = Grammar(variables=("t",))
        en = ShapeEnumerator(g)
        for n in range(1, 6):
            for s in en.shapes(n):
                assert node_count(s) == n
                assert slot_count(s) < n

    def test_ripple_shape_present(self):
        g = Grammar(variables=("t",))
        keys = {serialize(s) for s in ShapeEnumerator(g).shapes(6)}
        assert "cos(sqrt(add(pow2(t),~)))" in keys

    def test_depth_and_ops_respected(self):
        g = Grammar(variables=("t",), unary_ops=("cos",), binary_ops=("add",))
        shapes = ShapeEnumerator(g).shapes(3)
        for s in shapes:
            assert s[0] in ("cos", "add")
