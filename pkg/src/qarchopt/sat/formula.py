"""Helpers for building CNF on top of the solver: one-hot groups,
order-encoded bounded integers, and unary cardinality counters."""

from __future__ import annotations

from .solver import Solver, neg, pos


class Cnf:
    """Thin clause-building facade over a Solver instance."""

    def __init__(self, solver: Solver | None = None):
        self.solver = solver or Solver()

    def new_var(self) -> int:
        return self.solver.new_var()

    def new_vars(self, n: int) -> list[int]:
        return [self.solver.new_var() for _ in range(n)]

    def add(self, *lits) -> None:
        self.solver.add_clause(lits)

    def implies(self, antecedents, consequent) -> None:
        """(a1 & a2 & ...) -> c, antecedents given as literals."""
        self.solver.add_clause([a ^ 1 for a in antecedents] + [consequent])

    def at_most_one(self, lits) -> None:
        lits = list(lits)
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                self.add(lits[i] ^ 1, lits[j] ^ 1)

    def exactly_one(self, lits) -> None:
        lits = list(lits)
        self.solver.add_clause(lits)
        self.at_most_one(lits)

    def counter(self, lits, cap: int) -> list[int]:
        """Totalizer outputs: out[j] is forced true when >= j+1 inputs are.

        Only the input->output direction is encoded, which is all an
        at-most-k assumption (``neg(out[k])``) needs.  cap bounds the unary
        width; sums beyond cap saturate at out[cap-1].
        """
        lits = [int(l) for l in lits]
        if cap <= 0:
            raise ValueError("cap must be positive")

        def build(chunk: list[int]) -> list[int]:
            if len(chunk) == 1:
                return chunk
            mid = len(chunk) // 2
            left = build(chunk[:mid])
            right = build(chunk[mid:])
            width = min(len(chunk), cap)
            out = self.new_vars(width)
            # sum side: left>=i and right>=j force out>=i+j
            for i in range(len(left) + 1):
                for j in range(len(right) + 1):
                    k = i + j
                    if k == 0:
                        continue
                    if k > width:
                        k = width
                    ante = []
                    if i > 0:
                        if i > cap:
                            continue
                        ante.append(left[i - 1])
                    if j > 0:
                        if j > cap:
                            continue
                        ante.append(right[j - 1])
                    self.implies(ante, out[k - 1])
            return out

        if not lits:
            return []
        return build(lits)


class OneHot:
    """A bounded integer encoded as an exactly-one group of booleans."""

    def __init__(self, cnf: Cnf, domain_size: int):
        self.bits = cnf.new_vars(domain_size)
        cnf.exactly_one([pos(b) for b in self.bits])

    def is_lit(self, value: int) -> int:
        """Literal that is true iff the variable equals `value`."""
        return pos(self.bits[value])

    def decode(self, solver: Solver) -> int:
        for i, b in enumerate(self.bits):
            if solver.model_value(b):
                return i
        raise RuntimeError("one-hot group has no true bit in model")


class OrderInt:
    """A bounded integer in order encoding: bit t means (value <= t)."""

    def __init__(self, cnf: Cnf, domain_size: int):
        self.bits = cnf.new_vars(domain_size)
        for t in range(domain_size - 1):
            cnf.add(neg(self.bits[t]), pos(self.bits[t + 1]))
        cnf.add(pos(self.bits[domain_size - 1]))

    def le_lit(self, value: int) -> int:
        return pos(self.bits[value])

    def eq_clause_part(self, value: int) -> list[int]:
        """Literals whose disjunction is implied by (value != t); i.e. the
        CNF expansion of NOT(value == t) for use inside implications."""
        out = [neg(self.bits[value])]
        if value > 0:
            out.append(pos(self.bits[value - 1]))
        return out

    def add_le(self, cnf: Cnf, other: "OrderInt") -> None:
        """Constrain self <= other."""
        for t in range(len(self.bits)):
            cnf.add(neg(other.bits[t]), pos(self.bits[t]))

    def decode(self, solver: Solver) -> int:
        for t, b in enumerate(self.bits):
            if solver.model_value(b):
                return t
        raise RuntimeError("order-encoded integer has no satisfied bound")
