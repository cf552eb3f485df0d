"""End-to-end synthesis of a decision procedure from a theory.

Axioms are folded in one at a time: the running scheme alpha is wrapped
as (alpha.a)*.alpha, reduced with the justified rewrite rules, and the
final scheme is handed to the characteristic-function synthesizer.  A
small oracle self-check compares the synthesized procedure against
brute-force search before the procedure is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .delta import ReductionTrace, order_axioms, reduce_scheme
from .errors import InternalMismatch
from .final import decide, extract_proof, tune
from .oracle import SearchBudget, reachable_set
from .schemes import EPS, IterExpr, wrap_scheme
from .sigma import SymbolicCharFn, check_layout, sigma
from .terms import Proof, Term, Theory

_SELFCHECK_BUDGET = SearchBudget(max_depth=4, max_tree_size=24)


@dataclass(frozen=True)
class DecisionProcedure:
    theory: Theory
    scheme: IterExpr
    charfn: SymbolicCharFn
    traces: tuple = ()  # one ReductionTrace per construction step

    def decide(self, d: Term, t: Term = None) -> bool:
        return decide(self.charfn, t if t is not None else self.theory.start, d)

    def prove(self, d: Term, t: Term = None) -> Proof:
        start = t if t is not None else self.theory.start
        return extract_proof(self.theory, self.charfn, start, d)

    def tune(self, d: Term, t: Term = None):
        return tune(self.charfn, t if t is not None else self.theory.start, d)


def _self_check(proc: DecisionProcedure, budget: SearchBudget) -> None:
    reachable = reachable_set(proc.theory, proc.theory.start, budget)
    for d in reachable:
        if not proc.decide(d):
            raise InternalMismatch(
                f"procedure rejects a reachable sentence under {proc.scheme}"
            )


def pipeline(theory: Theory, selfcheck: bool = True) -> DecisionProcedure:
    """Builds the decision procedure for *theory*; raises NotLinearizable
    when some intermediate scheme has no affine characteristic function."""
    alpha = EPS
    traces = []
    for name in order_axioms(theory):
        alpha, trace = reduce_scheme(theory, wrap_scheme(alpha, name))
        traces.append(trace)
        # wrapping only ever deepens the index layout, so give up as soon
        # as the reduced scheme stops being flattenable
        check_layout(alpha)
    fn = sigma(theory, alpha)
    proc = DecisionProcedure(theory, alpha, fn, tuple(traces))
    if selfcheck:
        _self_check(proc, _SELFCHECK_BUDGET)
    return proc
