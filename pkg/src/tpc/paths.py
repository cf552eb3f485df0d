"""Paths (subtree extractors), symbolic paths with affine exponents, atoms
and atom sets.

A path step is a clause ``[p -> v]`` whose right side is a single variable
of ``p``; applying it to a ground tree extracts the matched subtree.  A
symbolic path is a step sequence where runs of one step carry an affine
repetition count.  An atom set is the conjunction of path-equality atoms
that characterizes a clause (or a whole iterative scheme) as a relation on
tree pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .affine import AffineExpr, ONE, ZERO
from .errors import Unimplemented
from .terms import App, Clause, Term, Var, compose_clauses, free_vars, match, print_term


# ---------------------------------------------------------------------------
# steps and paths


@dataclass(frozen=True)
class Step:
    """One projection clause [p -> v]; variables canonically renamed."""

    lhs: Term
    var: str

    def __post_init__(self):
        mapping = {}

        def visit(t):
            if isinstance(t, Var):
                if t.name not in mapping:
                    mapping[t.name] = f"v{len(mapping)}"
            else:
                for c in t.children:
                    visit(c)

        visit(self.lhs)
        if self.var not in mapping:
            raise ValueError(f"step target {self.var!r} does not occur in {print_term(self.lhs)}")

        def rename(t):
            if isinstance(t, Var):
                return Var(mapping[t.name])
            return App(t.functor, tuple(rename(c) for c in t.children))

        object.__setattr__(self, "lhs", rename(self.lhs))
        object.__setattr__(self, "var", mapping[self.var])

    def apply(self, tree: Term):
        binding = match(self.lhs, tree)
        return None if binding is None else binding[self.var]

    def as_clause(self) -> Clause:
        return Clause("", self.lhs, Var(self.var))

    def __str__(self):
        return f"[{print_term(_display(self.lhs))}->{_DISPLAY_NAMES.get(self.var, self.var)}]"


_DISPLAY_NAMES = {f"v{i}": n for i, n in enumerate("xyzwpqrst")}


def _display(t: Term) -> Term:
    if isinstance(t, Var):
        return Var(_DISPLAY_NAMES.get(t.name, t.name))
    return App(t.functor, tuple(_display(c) for c in t.children))


@dataclass(frozen=True)
class Segment:
    step: Step
    count: AffineExpr = ONE


@dataclass(frozen=True)
class SymbolicPath:
    """A step sequence with affine repetition counts; () is the identity."""

    segments: tuple = ()

    @staticmethod
    def of(*segments) -> "SymbolicPath":
        """Normalizing constructor: merges adjacent equal steps, drops
        zero-count segments."""
        merged = []
        for seg in segments:
            if seg.count == ZERO:
                continue
            if merged and merged[-1].step == seg.step:
                merged[-1] = Segment(seg.step, merged[-1].count + seg.count)
            else:
                merged.append(seg)
        return SymbolicPath(tuple(merged))

    @staticmethod
    def concrete(steps) -> "SymbolicPath":
        return SymbolicPath.of(*(Segment(s, ONE) for s in steps))

    @property
    def is_concrete(self) -> bool:
        return all(seg.count.is_const for seg in self.segments)

    def expand(self, env: dict):
        """Unit-step tuple under *env*; None when a count is negative."""
        out = []
        for seg in self.segments:
            n = seg.count.evaluate(env)
            if n < 0:
                return None
            out.extend([seg.step] * n)
        return tuple(out)

    def apply(self, tree: Term, env: dict = None):
        steps = self.expand(env or {})
        if steps is None:
            return None
        for step in steps:
            tree = step.apply(tree)
            if tree is None:
                return None
        return tree

    def to_clause(self) -> Clause:
        """Concrete paths only: the single merged projection clause."""
        clause = Clause("", Var("x"), Var("x"))
        for step in self.expand({}):
            clause = compose_clauses(clause, step.as_clause())
            if clause is None:
                raise ValueError("path steps do not compose")
        return clause

    def substitute(self, mapping) -> "SymbolicPath":
        return SymbolicPath.of(*(Segment(s.step, s.count.substitute(mapping)) for s in self.segments))

    def variables(self) -> set:
        out = set()
        for seg in self.segments:
            out |= seg.count.variables()
        return out

    def __str__(self):
        if not self.segments:
            return "[x->x]"
        parts = []
        for seg in self.segments:
            if seg.count == ONE:
                parts.append(str(seg.step))
            elif seg.count.is_const:
                parts.append(f"{seg.step}^{seg.count.const}")
            else:
                parts.append(f"{seg.step}^{{{seg.count}}}")
        return ".".join(parts)


IDENTITY_PATH = SymbolicPath(())


def path_of_steps(*steps) -> SymbolicPath:
    return SymbolicPath.concrete(steps)


def same_path(p: SymbolicPath, q: SymbolicPath) -> bool:
    """Semantic equality of concrete paths (merged-clause comparison)."""
    return p.to_clause().same_relation(q.to_clause())


def compose_paths(p: SymbolicPath, q: SymbolicPath) -> SymbolicPath:
    """Single-step path equal to applying p then q; None if they do not
    compose."""
    clause = Clause("", Var("x"), Var("x"))
    for step in list(p.expand({})) + list(q.expand({})):
        clause = compose_clauses(clause, step.as_clause())
        if clause is None:
            return None
    if isinstance(clause.lhs, Var):
        return IDENTITY_PATH
    return SymbolicPath.concrete((Step(clause.lhs, clause.rhs.name),))


def power_path(p: SymbolicPath, n: int) -> SymbolicPath:
    out = IDENTITY_PATH
    for _ in range(n):
        out = compose_paths(out, p)
        if out is None:
            return None
    return out


def apply_path(p: SymbolicPath, t: Term):
    return p.apply(t)


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class EqualsLR:
    left: SymbolicPath
    right: SymbolicPath

    def __str__(self):
        return f"EqualsLR({self.left}, {self.right})"


@dataclass(frozen=True)
class GroundL:
    path: SymbolicPath
    template: Term

    def __str__(self):
        return f"GroundL({self.path}, {print_term(self.template)})"


@dataclass(frozen=True)
class GroundR:
    path: SymbolicPath
    template: Term

    def __str__(self):
        return f"GroundR({self.path}, {print_term(self.template)})"


@dataclass(frozen=True)
class EqualsLL:
    left: SymbolicPath
    right: SymbolicPath

    def __str__(self):
        return f"EqualsLL({self.left}, {self.right})"


@dataclass(frozen=True)
class EqualsRR:
    left: SymbolicPath
    right: SymbolicPath

    def __str__(self):
        return f"EqualsRR({self.left}, {self.right})"


@dataclass(frozen=True)
class IterGroup:
    """Intersection of the body atoms over itervar in [lower, upper]."""

    itervar: str
    lower: AffineExpr
    upper: AffineExpr
    body: tuple

    def __str__(self):
        inner = ", ".join(str(a) for a in self.body)
        return f"IterIntersect(lambda {self.itervar}:N. {inner}, {self.lower}, {self.upper})"


@dataclass(frozen=True)
class VarDecl:
    name: str
    kind: str  # "scalar" | "multi"


@dataclass(frozen=True)
class AtomSet:
    conjuncts: tuple = ()
    free_vars: tuple = ()

    def __str__(self):
        if len(self.conjuncts) == 1:
            return str(self.conjuncts[0])
        return "Intersect(" + ", ".join(str(a) for a in self.conjuncts) + ")"


# ---------------------------------------------------------------------------
# splitting clauses into atoms


def _occurrences(t: Term, name: str, at=()):
    if isinstance(t, Var):
        if t.name == name:
            yield at
        return
    for i, c in enumerate(t.children):
        yield from _occurrences(c, name, at + (i,))


def _unit_steps(t: Term, pos) -> tuple:
    """Unit steps from the root of *t* to the node at *pos*; every sibling
    is pruned to a fresh variable."""
    steps = []
    node = t
    for child_idx in pos:
        children = []
        for i in range(len(node.children)):
            children.append(Var("hole") if i == child_idx else Var(f"s{i}"))
        steps.append(Step(App(node.functor, tuple(children)), "hole"))
        node = node.children[child_idx]
    return tuple(steps)


def _max_ground_subterms(t: Term, at=()):
    if isinstance(t, Var):
        return
    if t.is_ground:
        yield at, t
        return
    for i, c in enumerate(t.children):
        yield from _max_ground_subterms(c, at + (i,))


def split_axiom(c: Clause) -> AtomSet:
    """The conjunction of atoms equivalent to root application of *c*:
    one EqualsLR per (lhs occurrence, rhs occurrence) pair of each rhs
    variable, plus GroundL/GroundR atoms for maximal ground subterms."""
    atoms = []
    rhs_vars = []
    seen = set()

    def order_vars(t):
        if isinstance(t, Var):
            if t.name not in seen:
                seen.add(t.name)
                rhs_vars.append(t.name)
        else:
            for ch in t.children:
                order_vars(ch)

    order_vars(c.rhs)
    for v in rhs_vars:
        for rpos in _occurrences(c.rhs, v):
            for lpos in _occurrences(c.lhs, v):
                atoms.append(
                    EqualsLR(
                        SymbolicPath.concrete(_unit_steps(c.lhs, lpos)),
                        SymbolicPath.concrete(_unit_steps(c.rhs, rpos)),
                    )
                )
    for pos, sub in _max_ground_subterms(c.lhs):
        atoms.append(GroundL(SymbolicPath.concrete(_unit_steps(c.lhs, pos)), sub))
    for pos, sub in _max_ground_subterms(c.rhs):
        atoms.append(GroundR(SymbolicPath.concrete(_unit_steps(c.rhs, pos)), sub))
    return AtomSet(tuple(atoms), ())


# ---------------------------------------------------------------------------
# evaluation


def _eval_atom(atom, env: dict, t: Term, d: Term) -> bool:
    if isinstance(atom, EqualsLR):
        lv = atom.left.apply(t, env)
        rv = atom.right.apply(d, env)
        return lv is not None and rv is not None and lv == rv
    if isinstance(atom, GroundL):
        return atom.path.apply(t, env) == atom.template
    if isinstance(atom, GroundR):
        return atom.path.apply(d, env) == atom.template
    if isinstance(atom, (EqualsLL, EqualsRR)):
        raise Unimplemented(f"{type(atom).__name__} evaluation is deferred")
    if isinstance(atom, IterGroup):
        try:
            lo = atom.lower.evaluate(env)
            hi = atom.upper.evaluate(env)
        except (IndexError, KeyError):
            return False
        for i in range(lo, hi + 1):
            inner = dict(env)
            inner[atom.itervar] = i
            for a in atom.body:
                if not _eval_atom(a, inner, t, d):
                    return False
        return True
    raise TypeError(f"not an atom: {atom!r}")


def eval_atomset(s: AtomSet, assign: dict, t: Term, d: Term) -> bool:
    """Conjunction semantics; *assign* maps index variable names to ints
    (scalars) or tuples of ints (multi-indexes as element-length lists)."""
    env = dict(assign or {})
    try:
        return all(_eval_atom(a, env, t, d) for a in s.conjuncts)
    except IndexError:
        return False
