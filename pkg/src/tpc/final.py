"""Turning a symbolic characteristic function into a decision procedure.

Tuning pins the index variables down for one concrete tree pair.  Every
atom whose paths contain exactly one unknown repetition count can be
counted greedily: apply the known side to get the target subtree, walk
the unknown run step by step, and stop at the unique depth where the
known suffix reproduces the target.  Each count contributes one linear
equation; the scalar system is solved exactly, after which iterated
groups are unrolled (their bounds are now concrete) to recover the
elements of multi-indexes one position at a time.  A final full
evaluation of the atom set guards against any bad fit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .affine import AffineExpr
from .errors import Ambiguous, InternalMismatch, Underdetermined
from .mathsolver import Equation, solve_concrete
from .paths import EqualsLR, GroundL, GroundR, IterGroup, eval_atomset
from .schemes import instantiate
from .sigma import Branch, SymbolicCharFn
from .terms import Proof, Term, replay

_COUNT_CAP = 10_000_000
_FREE_BOUND = 8


def _solve_some(eqs, unknowns, i=0):
    """Like solve_concrete, but an underdetermined system is resolved by
    pinning free variables to small values (any witness will do; the
    caller verifies the full atom set afterwards)."""
    try:
        return solve_concrete(eqs, unknowns)
    except Underdetermined:
        if i >= len(unknowns):
            raise
    for v in range(_FREE_BOUND + 1):
        pin = Equation(AffineExpr.var(unknowns[i]), AffineExpr.const_(v))
        try:
            sol = _solve_some(eqs + [pin], unknowns, i + 1)
        except Underdetermined:
            sol = None
        if sol is not None:
            return sol
    # unknowns[i] may be determined with a value beyond the bound: leave
    # it alone and pin the remaining variables instead
    return _solve_some(eqs, unknowns, i + 1)


@dataclass(frozen=True)
class TuneResult:
    branch: int
    assignment: dict  # scalars to ints, multi-indexes to tuples of ints


def _apply_const(segments, tree, env):
    for seg in segments:
        n = seg.count.evaluate(env)
        if n < 0:
            return None
        for _ in range(n):
            tree = seg.step.apply(tree)
            if tree is None:
                return None
    return tree


def _is_known(expr: AffineExpr, env) -> bool:
    try:
        expr.evaluate(env)
        return True
    except (KeyError, IndexError):
        return False


def _count_equation(segments, base: Term, target: Term, env):
    """segments applied to *base* must yield *target*; exactly one segment
    count is unknown.  Returns (count expression, observed count) or None
    when no count matches."""
    idx = next(i for i, s in enumerate(segments) if not _is_known(s.count, env))
    tree = _apply_const(segments[:idx], base, env)
    if tree is None:
        return None
    step = segments[idx].step
    suffix = segments[idx + 1:]
    j = 0
    while tree is not None and j <= _COUNT_CAP:
        if _apply_const(suffix, tree, env) == target:
            # sizes strictly decrease along the run, so this j is unique
            return segments[idx].count, j
        tree = step.apply(tree)
        j += 1
    return None


def _atom_paths(atom, t, d):
    """(segments, base, target-side segments, target base) layout for
    counting: returns (unknown-side segments, its tree, known-side
    segments, its tree) or ground variants."""
    if isinstance(atom, EqualsLR):
        return [(atom.left.segments, t), (atom.right.segments, d)]
    if isinstance(atom, GroundL):
        return [(atom.path.segments, t), ((), atom.template)]
    if isinstance(atom, GroundR):
        return [(atom.path.segments, d), ((), atom.template)]
    raise TypeError(atom)


def _tune_atom(atom, t, d, env, equations) -> bool:
    """Extracts one equation (or a consistency check) from a non-iterated
    atom; False when the atom cannot hold."""
    sides = _atom_paths(atom, t, d)
    unknown = [
        i
        for i, (segs, _) in enumerate(sides)
        if any(not _is_known(s.count, env) for s in segs)
    ]
    if not unknown:
        vals = [_apply_const(segs, base, env) for segs, base in sides]
        return vals[0] is not None and vals[0] == vals[1]
    if len(unknown) != 1:
        raise Ambiguous("both sides of an atom have undetermined counts")
    (usegs, ubase) = sides[unknown[0]]
    (ksegs, kbase) = sides[1 - unknown[0]]
    if sum(1 for s in usegs if not _is_known(s.count, env)) != 1:
        raise Ambiguous("an atom has two undetermined counts on one side")
    target = _apply_const(ksegs, kbase, env) if ksegs else kbase
    if target is None:
        return False
    got = _count_equation(usegs, ubase, target, env)
    if got is None:
        return False
    expr, j = got
    equations.append((expr, j))
    return True


def _solve_scalar_stage(branch: Branch, t, d):
    """Counts all non-iterated atoms, treating multi-index lengths as
    scalars; returns the partial env or None."""
    unknowns = [v.name for v in branch.decls]
    if not unknowns:
        return {}
    equations = []
    for atom in branch.atoms.conjuncts:
        if isinstance(atom, IterGroup):
            continue
        if not _tune_atom(atom, t, d, {}, equations):
            return None
    eqs = []
    for expr, j in equations:
        if expr.is_const:
            if expr.const != j:
                return None
        else:
            eqs.append(Equation(expr, AffineExpr.const_(j)))
    try:
        sol = _solve_some(eqs, unknowns)
    except Underdetermined as exc:
        raise Ambiguous(str(exc)) from exc
    return sol


def _unroll_groups(branch: Branch, t, d, env):
    """Tunes multi-index elements position by position inside each
    iterated group; replaces solved lengths by concrete tuples."""
    elements = {}  # multi name -> {position: value}
    groups = [a for a in branch.atoms.conjuncts if isinstance(a, IterGroup)]
    multis = [v.name for v in branch.decls if v.kind == "multi"]
    for group in groups:
        lo = group.lower.evaluate(env)
        hi = group.upper.evaluate(env)
        for i in range(lo, hi + 1):
            scope = {**env, group.itervar: i}
            for atom in group.body:
                equations = []
                if not _tune_atom(atom, t, d, scope, equations):
                    return None
                mapping = {
                    k: AffineExpr.const_(v) for k, v in scope.items() if isinstance(v, int)
                }
                for expr, j in equations:
                    resid = expr.substitute(mapping)
                    # the only unknown left must be a single element selector
                    if len(resid.terms) != 1 or not resid.terms[0][1].sel:
                        raise Ambiguous(f"cannot isolate an element in {resid}")
                    coeff, it = resid.terms[0]
                    rest = j - resid.const
                    if rest % coeff != 0 or rest // coeff < 0:
                        return None
                    pos = it.sel[0].evaluate(scope)
                    elements.setdefault(it.var, {})[pos] = rest // coeff
    out = dict(env)
    for name in multis:
        length = env.get(name)
        if not isinstance(length, int):
            raise Ambiguous(f"length of {name} was not determined")
        got = elements.get(name, {})
        if length and set(got) != set(range(1, length + 1)):
            raise Ambiguous(f"elements of {name} are not all pinned down")
        out[name] = tuple(got[i] for i in range(1, length + 1))
    return out


def tune(fn: SymbolicCharFn, t: Term, d: Term) -> TuneResult:
    """The index assignment (per branch) under which the atoms hold for
    (t, d); None when no branch admits one."""
    ambiguous = None
    for bi, branch in enumerate(fn.branches):
        try:
            env = _solve_scalar_stage(branch, t, d)
            if env is None:
                continue
            full = _unroll_groups(branch, t, d, env)
        except Ambiguous as exc:
            ambiguous = exc
            continue
        if full is None:
            continue
        if eval_atomset(branch.atoms, full, t, d):
            return TuneResult(bi, full)
    if ambiguous is not None:
        raise ambiguous
    return None


def decide(fn: SymbolicCharFn, t: Term, d: Term) -> bool:
    return tune(fn, t, d) is not None


def extract_proof(theory, fn: SymbolicCharFn, t: Term, d: Term) -> Proof:
    """A replayed axiom sequence rewriting t to d, or None."""
    result = tune(fn, t, d)
    if result is None:
        return None
    branch = fn.branches[result.branch]
    index = branch.index_of(result.assignment)
    steps = tuple(instantiate(branch.scheme, index))
    if replay(theory, t, steps) != d:
        raise InternalMismatch(f"tuned index {index} does not replay to the goal")
    return Proof(steps)
