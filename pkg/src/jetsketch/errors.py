"""Exception types shared across the package.

Three failure classes map onto the CLI exit codes: bad API usage (exit 2),
mathematical domain violations (exit 3), and malformed sketch files (exit 3).
"""


class UsageError(ValueError):
    """A caller violated an interface contract (arity, range, flag shape)."""


class GateDomainError(ArithmeticError):
    """An analytic gate was applied where it is singular or undefined.

    Carries enough context to locate the failure: the gate kind, and, once
    the evaluator / sketcher annotates it, the circuit node and the batch
    row (= direction index) that triggered it.
    """

    def __init__(self, gate, detail="", node_id=None, direction=None):
        self.gate = gate
        self.detail = detail
        self.node_id = node_id
        self.direction = direction
        super().__init__(str(self))

    def __str__(self):
        parts = [f"gate '{self.gate}' domain error"]
        if self.detail:
            parts.append(self.detail)
        if self.node_id is not None:
            parts.append(f"node id {self.node_id}")
        if self.direction is not None:
            parts.append(f"direction index {self.direction}")
        return ": ".join(parts)

    def with_context(self, node_id=None, direction=None):
        """Return a copy annotated with evaluation context."""
        return GateDomainError(
            self.gate,
            self.detail,
            node_id=self.node_id if node_id is None else node_id,
            direction=self.direction if direction is None else direction,
        )


class SketchFormatError(RuntimeError):
    """A sketch file failed structural validation (magic, version, sizes)."""
