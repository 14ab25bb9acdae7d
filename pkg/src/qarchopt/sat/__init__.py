from .solver import Solver, SolverTimeout, lit_neg, lit_var, neg, pos
from .formula import Cnf, OneHot, OrderInt

__all__ = [
    "Solver", "SolverTimeout", "Cnf", "OneHot", "OrderInt",
    "pos", "neg", "lit_var", "lit_neg",
]
