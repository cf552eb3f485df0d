"""Inclusion queries between symbolic characteristic functions.

``includes(f, g)`` answers: for which parameter values of f does every
tree pair satisfying f's atoms also satisfy g's atoms for SOME value of
g's index variables?  Matching atoms pairwise and aligning their paths
run by run turns the question into a linear equation system, which the
math solver projects down to a region over f's variables.
"""

from __future__ import annotations

from dataclasses import dataclass

from .affine import AffineExpr, IndexTerm
from .errors import Unsupported
from .mathsolver import ConditionSystem, Equation, Region, eliminate
from .paths import EqualsLR, GroundL, GroundR, SymbolicPath
from .sigma import Branch, SymbolicCharFn


@dataclass(frozen=True)
class InclusionResult:
    system: ConditionSystem
    region: Region

    @property
    def universal(self) -> bool:
        return self.region.is_universal


def _rename_expr(e: AffineExpr, mapping: dict) -> AffineExpr:
    terms = []
    for c, it in e.terms:
        sel = tuple(_rename_expr(s, mapping) for s in it.sel)
        terms.append((c, IndexTerm(mapping.get(it.var, it.var), sel)))
    return AffineExpr.of(e.const, *terms)


def _rename_path(p: SymbolicPath, mapping: dict) -> SymbolicPath:
    from .paths import Segment

    return SymbolicPath.of(
        *(Segment(seg.step, _rename_expr(seg.count, mapping)) for seg in p.segments)
    )


def _runs(p: SymbolicPath):
    return [(seg.step, seg.count) for seg in p.segments]


def _align(p: SymbolicPath, q: SymbolicPath):
    """Pairs of counts that must be equal for the two paths to extract
    the same subtree on all trees; None if the step patterns differ."""
    a, b = _runs(p), _runs(q)
    if len(a) < len(b):
        a, b = b, a
    # embed the shorter run list into the longer one (missing runs are 0)
    out = []
    bi = 0
    for step, count in a:
        if bi < len(b) and b[bi][0] == step:
            out.append((count, b[bi][1]))
            bi += 1
        else:
            out.append((count, AffineExpr.const_(0)))
    if bi != len(b):
        return None
    return out


def _atom_equations(fa, ga):
    """Equations forcing the g atom on every pair satisfying the f atom;
    None when the atoms are not of the same shape."""
    if type(fa) is not type(ga):
        return None
    if isinstance(fa, EqualsLR):
        left = _align(fa.left, ga.left)
        right = _align(fa.right, ga.right)
        if left is None or right is None:
            return None
        pairs = left + right
    elif isinstance(fa, (GroundL, GroundR)):
        if fa.template != ga.template:
            return None
        pairs = _align(fa.path, ga.path)
        if pairs is None:
            return None
    else:
        raise Unsupported(f"cannot align {type(fa).__name__} atoms")
    return [Equation(fc, gc) for fc, gc in pairs if fc != gc]


def _single_branch(fn) -> Branch:
    if isinstance(fn, Branch):
        return fn
    if isinstance(fn, SymbolicCharFn):
        if len(fn.branches) != 1:
            raise Unsupported("inclusion queries need single-alternative functions")
        return fn.branches[0]
    raise TypeError(fn)


def includes(f, g) -> InclusionResult:
    """The region of f's index variables on which f's relation is a
    subset of g's (witnessed by matching each g atom to an f atom)."""
    fb, gb = _single_branch(f), _single_branch(g)

    taken = {d.name for d in fb.decls}
    mapping = {}
    for d in gb.decls:
        name = d.name
        if name in taken or name in mapping.values():
            pool = "nkjl" if d.kind == "scalar" else "muw"
            name = next(
                c for c in list(pool) + [f"{pool[0]}{i}" for i in range(2, 99)]
                if c not in taken and c not in mapping.values()
            )
        mapping[d.name] = name

    equations = []
    for ga in gb.atoms.conjuncts:
        ga = _rename_atom(ga, mapping)
        matched = None
        for fa in fb.atoms.conjuncts:
            eqs = _atom_equations(fa, ga)
            if eqs is not None:
                matched = eqs
                break
        if matched is None:
            raise Unsupported(f"no aligned atom for {ga}")
        equations.extend(matched)

    system = ConditionSystem(
        parameters=tuple(d.name for d in fb.decls),
        existentials=tuple(mapping[d.name] for d in gb.decls),
        conditions=tuple(equations),
    )
    return InclusionResult(system, eliminate(system))


def _rename_atom(atom, mapping):
    from .paths import IterGroup

    if isinstance(atom, EqualsLR):
        return EqualsLR(_rename_path(atom.left, mapping), _rename_path(atom.right, mapping))
    if isinstance(atom, GroundL):
        return GroundL(_rename_path(atom.path, mapping), atom.template)
    if isinstance(atom, GroundR):
        return GroundR(_rename_path(atom.path, mapping), atom.template)
    if isinstance(atom, IterGroup):
        raise Unsupported("iterated atom groups are not alignable")
    raise TypeError(atom)
