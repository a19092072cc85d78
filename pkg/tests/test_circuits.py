import numpy as np
import pytest

from jetsketch import (
    Circuit,
    CircuitBuilder,
    ComplexRing,
    ComposedProgram,
    GateDomainError,
    Jet,
    JetRing,
    UsageError,
    evaluate,
    from_json,
    size,
    to_json,
    validate,
)
from jetsketch.circuits import Node, polynomial_degree_bound


def mul_add_circuit():
    """f(x1, x2) = x1 * x2 + 3."""
    b = CircuitBuilder(2)
    m = b.mul(b.input(1), b.input(2))
    b.output(b.add(m, b.const(3)))
    return b.build()


def identity_circuit():
    b = CircuitBuilder(1)
    b.output(b.input(1))
    return b.build()


class TestValidate:
    def test_identity_ok(self):
        assert validate(identity_circuit()) == []

    def test_forward_reference_reported(self):
        c = Circuit(
            [Node(id=0, op="add", args=(1,)), Node(id=1, op="input", index=1)],
            1,
            [0],
        )
        problems = validate(c)
        assert any("node id 0" in p and "ordering" in p for p in problems)

    def test_duplicate_output_label(self):
        c = Circuit([Node(id=0, op="input", index=1)], 1, [0, 0])
        problems = validate(c)
        assert any("labeled by 2 output indices" in p for p in problems)

    def test_empty_fanin(self):
        c = Circuit([Node(id=0, op="add", args=())], 1, [0])
        assert any("no operands" in p for p in validate(c))

    def test_input_index_range(self):
        c = Circuit([Node(id=0, op="input", index=5)], 2, [0])
        assert any("outside [1, 2]" in p for p in validate(c))

    def test_eval_refuses_invalid(self):
        c = Circuit([Node(id=0, op="input", index=5)], 2, [0])
        with pytest.raises(UsageError):
            evaluate(c, ComplexRing(), [1 + 0j, 2 + 0j])


class TestEval:
    def test_complex_value(self):
        out = evaluate(mul_add_circuit(), ComplexRing(), [2 + 0j, 5 + 0j])
        assert out[0] == 13 + 0j

    def test_jet_product_rule(self):
        ring = JetRing(1)
        jets = [Jet.variable(2.0, 1.0, 1), Jet.constant(5.0, 1)]
        out = evaluate(mul_add_circuit(), ring, jets)[0]
        np.testing.assert_array_equal(out.coeffs, [13, 5])

    def test_arity_mismatch(self):
        with pytest.raises(UsageError):
            evaluate(mul_add_circuit(), ComplexRing(), [1 + 0j])

    def test_gate_error_carries_node_id(self):
        b = CircuitBuilder(1)
        node = b.unary("log", b.input(1))
        b.output(node)
        c = b.build()
        with pytest.raises(GateDomainError) as err:
            evaluate(c, ComplexRing(), [np.complex128(0.0)])
        assert err.value.node_id == node

    def test_deterministic_bits(self):
        rng = np.random.default_rng(3)
        x = [np.complex128(v) for v in rng.standard_normal(2)]
        a = evaluate(mul_add_circuit(), ComplexRing(), x)[0]
        b = evaluate(mul_add_circuit(), ComplexRing(), x)[0]
        assert a == b

    def test_complex_equals_order0_jet(self):
        c = mul_add_circuit()
        x = [np.complex128(1.25), np.complex128(-0.5)]
        scalar = evaluate(c, ComplexRing(), x)[0]
        jets = [Jet.constant(v, 0) for v in x]
        jet_out = evaluate(c, JetRing(0), jets)[0]
        assert jet_out.coeffs[0] == scalar

    def test_jet_truncation_commutes_with_eval(self):
        b = CircuitBuilder(1)
        e = b.unary("exp", b.mul(b.input(1), b.input(1)))
        b.output(b.mul(e, b.input(1)))
        c = b.build()
        hi = evaluate(c, JetRing(6), [Jet.variable(0.4, 1.0, 6)])[0]
        lo = evaluate(c, JetRing(3), [Jet.variable(0.4, 1.0, 3)])[0]
        np.testing.assert_array_equal(hi.coeffs[:4], lo.coeffs)


class TestSize:
    def test_identity(self):
        assert size(identity_circuit()) == 1

    def test_single_add(self):
        b = CircuitBuilder(2)
        b.output(b.add(b.input(1), b.input(2)))
        assert size(b.build()) == 2

    def test_inputs_dominate(self):
        b = CircuitBuilder(5)
        s = b.add(b.input(1), b.input(2), b.input(3))
        b.output(s)
        assert size(b.build()) == 5

    def test_repeated_operand_counts_twice(self):
        b = CircuitBuilder(1)
        x = b.input(1)
        b.output(b.mul(x, x))
        assert size(b.build()) == 2


class TestJson:
    def test_roundtrip(self):
        c = mul_add_circuit()
        again = from_json(to_json(c))
        x = [np.complex128(1.5), np.complex128(2.5)]
        assert (
            evaluate(c, ComplexRing(), x)[0]
            == evaluate(again, ComplexRing(), x)[0]
        )

    def test_version_gate(self):
        obj = to_json(mul_add_circuit())
        obj["version"] = 99
        with pytest.raises(UsageError):
            from_json(obj)

    def test_const_serializes_as_pair(self):
        obj = to_json(mul_add_circuit())
        consts = [n for n in obj["nodes"] if n["op"] == "const"]
        assert consts[0]["value"] == [3.0, 0.0]

    def test_declared_p_checked(self):
        obj = to_json(mul_add_circuit())
        obj["p"] = 7
        with pytest.raises(UsageError):
            from_json(obj)


class TestPrograms:
    def test_composition(self):
        inner = mul_add_circuit()
        b = CircuitBuilder(1)
        b.output(b.mul(b.input(1), b.const(2)))
        outer = b.build()
        comp = ComposedProgram(outer, inner)
        out = evaluate(comp, ComplexRing(), [2 + 0j, 5 + 0j])
        assert out[0] == 26 + 0j

    def test_composition_arity_checked(self):
        with pytest.raises(UsageError):
            ComposedProgram(mul_add_circuit(), mul_add_circuit())

    def test_degree_bound(self):
        assert polynomial_degree_bound(mul_add_circuit()) == 2
        b = CircuitBuilder(1)
        b.output(b.unary("exp", b.input(1)))
        assert polynomial_degree_bound(b.build()) is None
