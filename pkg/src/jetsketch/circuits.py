"""Arithmetic-circuit IR and a ring-generic evaluator.

A circuit is a DAG of input / constant / add / mul / analytic-unary nodes
listed in topological order; evaluation walks the list once, computing in
whatever ring the inputs live in (plain complex values or jets of a common
order, optionally batched).  Fan-in of add/mul is unbounded and folds
left-to-right in operand order, so evaluation is deterministic.

Straight-line "ring programs" (anything with num_inputs / num_outputs and
a run(ring, inputs) method) are accepted everywhere circuits are: they are
semantically circuits without a materialized node list, which keeps
training loops cheap.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import GateDomainError, UsageError
from .jets import GATE_KINDS, Jet, apply_gate_scalar, jet_compose_unary

FORMAT_VERSION = 1

_OPS = ("input", "const", "add", "mul", "unary")


@dataclass(frozen=True)
class Node:
    id: int
    op: str
    index: int = 0          # input op: 1-based input position
    value: complex = 0j     # const op
    args: tuple = ()        # add/mul operands, unary single operand
    gate: str = ""          # unary op


class Circuit:
    """Immutable circuit; construct through CircuitBuilder or from_json."""

    def __init__(self, nodes, num_inputs, outputs):
        self.nodes = tuple(nodes)
        self.num_inputs = int(num_inputs)
        self.outputs = tuple(int(o) for o in outputs)
        self.num_outputs = len(self.outputs)
        self._violations = None

    def run(self, ring, inputs):
        return evaluate_circuit(self, ring, inputs)


def validate(circuit):
    """Return a list of invariant violations (empty means ok)."""
    problems = []
    seen = {}
    n = circuit.num_inputs
    if n < 0:
        problems.append("negative input count")
    for pos, node in enumerate(circuit.nodes):
        if node.id in seen:
            problems.append(f"node id {node.id} defined more than once")
        if node.op not in _OPS:
            problems.append(f"node id {node.id}: unknown op '{node.op}'")
            continue
        if node.op == "input":
            if not 1 <= node.index <= n:
                problems.append(
                    f"node id {node.id}: input index {node.index} outside [1, {n}]"
                )
        elif node.op == "const":
            v = complex(node.value)
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                problems.append(f"node id {node.id}: non-finite constant")
        elif node.op in ("add", "mul"):
            if len(node.args) < 1:
                problems.append(f"node id {node.id}: {node.op} with no operands")
        elif node.op == "unary":
            if len(node.args) != 1:
                problems.append(f"node id {node.id}: unary needs exactly 1 operand")
            if node.gate not in GATE_KINDS:
                problems.append(f"node id {node.id}: unknown gate '{node.gate}'")
        for a in node.args:
            if a not in seen:
                problems.append(
                    f"node id {node.id}: operand {a} is not an earlier node"
                    " (cycle or ordering violation)"
                )
        seen[node.id] = pos
    for j, out in enumerate(circuit.outputs, start=1):
        if out not in seen:
            problems.append(f"output {j}: node id {out} does not exist")
    counted = {}
    for out in circuit.outputs:
        counted[out] = counted.get(out, 0) + 1
    for out, c in counted.items():
        if c > 1:
            problems.append(f"node id {out} labeled by {c} output indices")
    return problems


def _checked(circuit):
    if circuit._violations is None:
        circuit._violations = validate(circuit)
    if circuit._violations:
        raise UsageError(
            "invalid circuit: " + "; ".join(circuit._violations)
        )


def size(circuit):
    """max(#inputs, #outputs, #edges) with edge multiplicity."""
    _checked(circuit)
    edges = sum(len(node.args) for node in circuit.nodes)
    return max(circuit.num_inputs, circuit.num_outputs, edges)


def evaluate_circuit(circuit, ring, inputs):
    _checked(circuit)
    if len(inputs) != circuit.num_inputs:
        raise UsageError(
            f"circuit takes {circuit.num_inputs} inputs, got {len(inputs)}"
        )
    values = {}
    for node in circuit.nodes:
        if node.op == "input":
            v = inputs[node.index - 1]
        elif node.op == "const":
            v = ring.constant(node.value)
        elif node.op == "add":
            v = values[node.args[0]]
            for a in node.args[1:]:
                v = ring.add(v, values[a])
        elif node.op == "mul":
            v = values[node.args[0]]
            for a in node.args[1:]:
                v = ring.mul(v, values[a])
        else:  # unary
            try:
                v = ring.unary(node.gate, values[node.args[0]])
            except GateDomainError as err:
                raise err.with_context(node_id=node.id) from None
        values[node.id] = v
    return [values[o] for o in circuit.outputs]


def evaluate(fn, ring, inputs):
    """Evaluate a circuit or ring program on a list of ring values."""
    if len(inputs) != fn.num_inputs:
        raise UsageError(f"{fn.num_inputs} inputs expected, got {len(inputs)}")
    return fn.run(ring, inputs)


class ComplexRing:
    """Plain complex evaluation; values are numpy complex scalars/arrays."""

    name = "complex"

    @staticmethod
    def constant(value):
        return np.complex128(value)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def scale(a, c):
        return a * c

    @staticmethod
    def unary(kind, a):
        return apply_gate_scalar(kind, a)

    @staticmethod
    def lift_inputs(values):
        return [np.complex128(v) for v in values]


class JetRing:
    """Order-s jet evaluation, optionally batched over leading axes."""

    name = "jet"

    def __init__(self, order, batch_shape=()):
        if order < 0:
            raise UsageError("jet order must be >= 0")
        self.order = order
        self.batch_shape = tuple(batch_shape)

    def constant(self, value):
        return Jet.constant(value, self.order)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def scale(a, c):
        return a * c

    @staticmethod
    def unary(kind, a):
        return jet_compose_unary(kind, a)

    def seed_inputs(self, base, directions=None):
        """Jets base_j + z * directions[..., j] for each input coordinate."""
        base = np.asarray(base, dtype=np.complex128)
        jets = []
        for j in range(base.shape[-1]):
            if directions is None or self.order == 0:
                jets.append(
                    Jet.variable(base[..., j], 0.0, self.order, self.batch_shape)
                )
            else:
                jets.append(
                    Jet.variable(
                        base[..., j],
                        directions[..., j],
                        self.order,
                        self.batch_shape,
                    )
                )
        return jets


class _Degree:
    """Total-degree upper bound as a ring value (add=max, mul=sum)."""

    __slots__ = ("d",)

    def __init__(self, d):
        self.d = d

    def _lift(other):
        return other if isinstance(other, _Degree) else _Degree(0)

    def __add__(self, other):
        return _Degree(max(self.d, _Degree._lift(other).d))

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other):
        return _Degree(self.d + _Degree._lift(other).d)

    __rmul__ = __mul__

    def __neg__(self):
        return self


class _NonPolynomial(Exception):
    pass


class DegreeRing:
    """Evaluates a circuit into a total-degree upper bound."""

    name = "degree"

    @staticmethod
    def constant(value):
        return _Degree(0)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def scale(a, c):
        return a

    @staticmethod
    def unary(kind, a):
        raise _NonPolynomial(kind)


def polynomial_degree_bound(fn):
    """Upper bound on total degree, or None if analytic gates appear."""
    inputs = [_Degree(1) for _ in range(fn.num_inputs)]
    try:
        outs = evaluate(fn, DegreeRing(), inputs)
    except _NonPolynomial:
        return None
    return max(o.d for o in outs)


class ComposedProgram:
    """outer(inner(x)): a ring program gluing two circuit-likes."""

    def __init__(self, outer, inner):
        if outer.num_inputs != inner.num_outputs:
            raise UsageError(
                f"composition arity mismatch: inner yields {inner.num_outputs},"
                f" outer takes {outer.num_inputs}"
            )
        self.outer = outer
        self.inner = inner
        self.num_inputs = inner.num_inputs
        self.num_outputs = outer.num_outputs

    def run(self, ring, inputs):
        return evaluate(self.outer, ring, evaluate(self.inner, ring, inputs))


class CircuitBuilder:
    """Construction-time-validated circuit assembly."""

    def __init__(self, num_inputs):
        if num_inputs < 0:
            raise UsageError("number of inputs must be >= 0")
        self.num_inputs = num_inputs
        self._nodes = []
        self._outputs = []
        self._next = 0

    def _emit(self, **kw):
        node = Node(id=self._next, **kw)
        self._nodes.append(node)
        self._next += 1
        return node.id

    def input(self, index):
        return self._emit(op="input", index=index)

    def const(self, value):
        return self._emit(op="const", value=complex(value))

    def add(self, *args):
        return self._emit(op="add", args=tuple(args))

    def mul(self, *args):
        return self._emit(op="mul", args=tuple(args))

    def unary(self, gate, arg):
        return self._emit(op="unary", gate=gate, args=(arg,))

    def output(self, node_id):
        self._outputs.append(node_id)

    def build(self):
        c = Circuit(self._nodes, self.num_inputs, self._outputs)
        problems = validate(c)
        if problems:
            raise UsageError("invalid circuit: " + "; ".join(problems))
        return c


def to_json(circuit):
    """Serialize to the versioned interchange dict."""
    nodes = []
    for node in circuit.nodes:
        if node.op == "input":
            nodes.append({"id": node.id, "op": "input", "index": node.index})
        elif node.op == "const":
            v = complex(node.value)
            nodes.append({"id": node.id, "op": "const", "value": [v.real, v.imag]})
        elif node.op in ("add", "mul"):
            nodes.append({"id": node.id, "op": node.op, "args": list(node.args)})
        else:
            nodes.append(
                {"id": node.id, "op": "unary", "gate": node.gate,
                 "arg": node.args[0]}
            )
    return {
        "version": FORMAT_VERSION,
        "n": circuit.num_inputs,
        "p": circuit.num_outputs,
        "nodes": nodes,
        "outputs": list(circuit.outputs),
    }


def from_json(obj):
    if not isinstance(obj, dict):
        raise UsageError("circuit JSON must be an object")
    if obj.get("version") != FORMAT_VERSION:
        raise UsageError(
            f"unsupported circuit format version {obj.get('version')!r}"
        )
    try:
        n = int(obj["n"])
        p = int(obj["p"])
        raw_nodes = obj["nodes"]
        outputs = [int(x) for x in obj["outputs"]]
    except (KeyError, TypeError, ValueError) as err:
        raise UsageError(f"malformed circuit JSON: {err}") from None
    nodes = []
    for entry in raw_nodes:
        try:
            nid = int(entry["id"])
            op = entry["op"]
            if op == "input":
                nodes.append(Node(id=nid, op=op, index=int(entry["index"])))
            elif op == "const":
                re, im = entry["value"]
                nodes.append(Node(id=nid, op=op, value=complex(re, im)))
            elif op in ("add", "mul"):
                nodes.append(
                    Node(id=nid, op=op, args=tuple(int(a) for a in entry["args"]))
                )
            elif op == "unary":
                nodes.append(
                    Node(id=nid, op=op, gate=entry["gate"],
                         args=(int(entry["arg"]),))
                )
            else:
                raise UsageError(f"node id {nid}: unknown op '{op}'")
        except (KeyError, TypeError, ValueError) as err:
            raise UsageError(f"malformed circuit node: {err}") from None
    circuit = Circuit(nodes, n, outputs)
    if p != circuit.num_outputs:
        raise UsageError(
            f"declared p={p} but {circuit.num_outputs} outputs listed"
        )
    problems = validate(circuit)
    if problems:
        raise UsageError("invalid circuit: " + "; ".join(problems))
    return circuit


def load_circuit(path):
    with open(path, "r", encoding="utf-8") as fh:
        return from_json(json.load(fh))


def save_circuit(circuit, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json(circuit), fh, indent=1)
        fh.write("\n")
