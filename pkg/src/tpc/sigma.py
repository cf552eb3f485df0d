"""Symbolic characteristic functions for iterative schemes.

``sigma`` turns a scheme into a function of its index variables whose
value is an atom set: a pair of trees is related by some instance of the
scheme exactly when the atoms hold under the corresponding assignment.

The construction samples the scheme at small concrete indexes, reduces
each instance to a single clause, splits it into path atoms, aligns the
atoms across samples into families, fits every repetition count as an
affine expression in the index features (constants, scalar counts,
multi-index lengths, and inside iterated families the position i and the
element value m[i]), and then verifies the fitted form against held-out
samples.  Anything that fails to fit or verify raises NotLinearizable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .affine import AffineExpr, ONE
from .errors import NotLinearizable
from .paths import (
    AtomSet,
    EqualsLR,
    GroundL,
    GroundR,
    IterGroup,
    Segment,
    Step,
    SymbolicPath,
    VarDecl,
    eval_atomset,
    split_axiom,
)
from .schemes import (
    Alt,
    Axiom,
    Dot,
    Eps,
    IterExpr,
    ListOf,
    Star,
    UNIT,
    UNIT_SHAPE,
    instantiate,
    reduce_specific,
    shape_of,
)
from .terms import Clause, Term, Var, compose_clauses, print_term

_SCALAR_NAMES = ("n", "k", "j", "l")
_MULTI_NAMES = ("m", "u", "w")

_SCALAR_FIT = (1, 2, 3)
_SCALAR_VERIFY = (4, 5)
_MULTI_FIT = (
    (1,), (2,),
    (1, 1), (2, 1), (1, 2), (2, 2),
    (1, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, 2), (3, 2, 1),
)
_MULTI_VERIFY = ((3,), (1, 3), (4, 1, 2), (2, 1, 3, 2))

_MAX_FIT_SAMPLES = 400
_MAX_VERIFY_SAMPLES = 64


# ---------------------------------------------------------------------------
# variable layout


def _layout(e: IterExpr, decls: list):
    """Builder spec for constructing a concrete index from an assignment;
    appends one VarDecl per index variable (in left-to-right scheme
    order)."""
    if isinstance(e, (Axiom, Eps)):
        return ("unit",)
    if isinstance(e, Star):
        body = shape_of(e.body)
        if body == UNIT_SHAPE:
            name = _fresh(decls, _SCALAR_NAMES)
            decls.append(VarDecl(name, "scalar"))
            return ("scalar", name)
        if body == ListOf(UNIT_SHAPE):
            name = _fresh(decls, _MULTI_NAMES)
            decls.append(VarDecl(name, "multi"))
            return ("multi", name)
        raise NotLinearizable("index nesting too deep to lay out", e)
    if isinstance(e, Dot):
        subs = [_layout(p, decls) for p in e.parts]
        nonunit = tuple(s for s in subs if s != ("unit",))
        if not nonunit:
            return ("unit",)
        if len(nonunit) == 1:
            return nonunit[0]
        return ("tuple", nonunit)
    if isinstance(e, Alt):
        raise NotLinearizable("alternatives must be at the top level", e)
    raise TypeError(e)


def _fresh(decls, preferred):
    taken = {d.name for d in decls}
    for name in preferred:
        if name not in taken:
            return name
    i = 2
    while f"{preferred[0]}{i}" in taken:
        i += 1
    return f"{preferred[0]}{i}"


def _build_index(spec, env):
    tag = spec[0]
    if tag == "unit":
        return UNIT
    if tag == "scalar":
        return env[spec[1]]
    if tag == "multi":
        return tuple(env[spec[1]])
    if tag == "tuple":
        return tuple(_build_index(s, env) for s in spec[1])
    raise ValueError(spec)


def _sample_grid(decls, scalar_pool, multi_pool, cap):
    pools = []
    for d in decls:
        pools.append(scalar_pool if d.kind == "scalar" else multi_pool)
    combos = list(itertools.product(*pools)) if decls else [()]
    if len(combos) > cap:
        stride = -(-len(combos) // cap)
        combos = combos[::stride]
    return [dict(zip((d.name for d in decls), combo)) for combo in combos]


# ---------------------------------------------------------------------------
# concrete atoms (one sample)


@dataclass(frozen=True)
class _ConcreteAtom:
    kind: str  # "EqualsLR" | "GroundL" | "GroundR"
    left: tuple  # run-length encoded: ((Step, count), ...)
    right: tuple  # runs for EqualsLR, else ()
    template: Term = None

    @property
    def key(self):
        return (
            self.kind,
            tuple(s for s, _ in self.left),
            tuple(s for s, _ in self.right),
            self.template,
        )


def _rle(path: SymbolicPath) -> tuple:
    out = []
    for seg in path.segments:
        assert seg.count.is_const
        if out and out[-1][0] == seg.step:
            out[-1] = (seg.step, out[-1][1] + seg.count.const)
        else:
            out.append((seg.step, seg.count.const))
    return tuple(out)


def _concrete_atoms(theory, names) -> list:
    clause = reduce_specific(theory, names)
    if clause is None:
        return None
    out = []
    for atom in split_axiom(clause).conjuncts:
        if isinstance(atom, EqualsLR):
            out.append(_ConcreteAtom("EqualsLR", _rle(atom.left), _rle(atom.right)))
        elif isinstance(atom, GroundL):
            out.append(_ConcreteAtom("GroundL", _rle(atom.path), (), atom.template))
        else:
            out.append(_ConcreteAtom("GroundR", _rle(atom.path), (), atom.template))
    return out


# ---------------------------------------------------------------------------
# affine fitting


def _solve_exact(rows, ys):
    """Exact solution of rows . beta = ys (free coordinates zero); None
    when inconsistent."""
    cols = len(rows[0]) if rows else 0
    aug = [[Fraction(v) for v in row] + [Fraction(y)] for row, y in zip(rows, ys)]
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == len(aug):
            break
    for i in range(r, len(aug)):
        if aug[i][cols] != 0:
            return None
    beta = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        beta[c] = aug[i][cols]
    return beta


def _fit(observations, features):
    """observations: (env, count) pairs; features: AffineExprs.  Returns
    the fitted AffineExpr or None."""
    try:
        rows = [[f.evaluate(env) for f in features] for env, _ in observations]
    except (IndexError, KeyError):
        return None
    ys = [count for _, count in observations]
    beta = _solve_exact(rows, ys)
    if beta is None or any(b.denominator != 1 for b in beta):
        return None
    expr = AffineExpr.const_(0)
    for b, f in zip(beta, features):
        expr = expr + f * int(b)
    return expr


def _base_features(decls):
    # a multi-index name in scalar position means its length
    return [ONE] + [AffineExpr.var(d.name) for d in decls]


# ---------------------------------------------------------------------------
# family alignment


def _sub_skeleton(a, b):
    """Is step tuple a an (ordered) subsequence of b?"""
    it = iter(b)
    return all(step in it for step in a)


def _embed(runs, skeleton):
    """Leftmost embedding of RLE runs into a step skeleton; None if the
    runs are not a subsequence."""
    out = [0] * len(skeleton)
    si = 0
    for step, cnt in runs:
        while si < len(skeleton) and skeleton[si] != step:
            si += 1
        if si == len(skeleton):
            return None
        out[si] = cnt
        si += 1
    return out


def _merge_keys(keys):
    """Partition compatible keys around maximal skeletons.  Two keys are
    compatible when they share kind and template and both step tuples of
    one embed into the other's."""
    keys = list(keys)
    merged = {}  # representative key -> list of member keys
    for key in sorted(keys, key=lambda k: (-len(k[1]) - len(k[2]), str(k))):
        home = None
        for rep in merged:
            if (
                key[0] == rep[0]
                and key[3] == rep[3]
                and _sub_skeleton(key[1], rep[1])
                and _sub_skeleton(key[2], rep[2])
            ):
                home = rep
                break
        if home is None:
            merged[key] = [key]
        else:
            merged[home].append(key)
    return merged


def _path_from(skeleton, exprs) -> SymbolicPath:
    return SymbolicPath.of(*(Segment(s, e) for s, e in zip(skeleton, exprs)))


# ---------------------------------------------------------------------------
# per-branch synthesis


@dataclass(frozen=True)
class Branch:
    """One alternative of the characteristic function: its scheme, the
    declared index variables, the index builder, and the atoms."""

    scheme: IterExpr
    decls: tuple
    builder: tuple
    atoms: AtomSet

    def holds(self, assign: dict, t: Term, d: Term) -> bool:
        return eval_atomset(self.atoms, assign, t, d)

    def index_of(self, assign: dict):
        return _build_index(self.builder, assign)

    def __str__(self):
        lam = "".join(
            f"lambda {d.name}:{'M' if d.kind == 'multi' else 'N'}." for d in self.decls
        )
        return lam + str(self.atoms)


@dataclass(frozen=True)
class SymbolicCharFn:
    scheme: IterExpr
    branches: tuple

    def __str__(self):
        return " | ".join(str(b) for b in self.branches)


def _family_atom(kind, template, left_skel, right_skel, left_exprs, right_exprs):
    if kind == "EqualsLR":
        return EqualsLR(_path_from(left_skel, left_exprs), _path_from(right_skel, right_exprs))
    path = _path_from(left_skel, left_exprs)
    return GroundL(path, template) if kind == "GroundL" else GroundR(path, template)


def _fit_family_runs(key, observations, features, scheme):
    """observations: (env, atom) with atom runs exactly matching key's
    skeletons.  Fits one expression per run on each side."""
    left_exprs, right_exprs = [], []
    for side, skel, store in (("left", key[1], left_exprs), ("right", key[2], right_exprs)):
        for ri in range(len(skel)):
            obs = []
            for env, atom in observations:
                runs = atom.left if side == "left" else atom.right
                counts = _embed(runs, skel)
                if counts is None:
                    raise NotLinearizable("atom does not embed in its family skeleton", scheme)
                obs.append((env, counts[ri]))
            expr = _fit(obs, features)
            if expr is None:
                return None
            store.append(expr)
    return left_exprs, right_exprs


def _synthesize_branch(theory, scheme) -> Branch:
    decls = []
    builder = _layout(scheme, decls)
    decls = tuple(decls)
    fit_envs = _sample_grid(decls, _SCALAR_FIT, _MULTI_FIT, _MAX_FIT_SAMPLES)
    verify_envs = _sample_grid(decls, _SCALAR_VERIFY, _MULTI_VERIFY, _MAX_VERIFY_SAMPLES)

    samples = []
    for env in fit_envs:
        atoms = _concrete_atoms(theory, instantiate(scheme, _build_index(builder, env)))
        if atoms is None:
            raise NotLinearizable("an instance composes to the empty relation", scheme)
        samples.append((env, atoms))

    # group occurrences by exact key, in order of appearance
    order = []
    groups = {}
    for si, (env, atoms) in enumerate(samples):
        for pos, atom in enumerate(atoms):
            if atom.key not in groups:
                groups[atom.key] = [[] for _ in samples]
                order.append(atom.key)
            groups[atom.key][si].append((pos, atom))

    base = _base_features(decls)
    multis = [d.name for d in decls if d.kind == "multi"]
    conjuncts = {}  # key -> list of symbolic atoms (placed at first appearance)
    failing = []

    for key in order:
        per_sample = groups[key]
        counts = {len(lst) for lst in per_sample}
        if counts == {1}:
            obs = [(env, lst[0][1]) for (env, _), lst in zip(samples, per_sample)]
            fitted = _fit_family_runs(key, obs, base, scheme)
            if fitted is not None:
                conjuncts[key] = [_family_atom(key[0], key[3], key[1], key[2], *fitted)]
                continue
        failing.append(key)

    merged = _merge_keys(failing) if failing else {}
    rep_of = {key: rep for rep, members in merged.items() for key in members}
    if failing:
        itervar = _fresh(list(decls), ("i", "i2", "i3"))
        for rep, members in merged.items():
            member_set = set(members)
            # per sample, the member occurrences in original atom order
            occ = []
            for si in range(len(samples)):
                rows = sorted(
                    (pos, atom)
                    for key in member_set
                    for pos, atom in groups[key][si]
                )
                occ.append([atom for _, atom in rows])
            # group size must be affine in the base features
            upper = _fit([(env, len(o)) for (env, _), o in zip(samples, occ)], base)
            if upper is None:
                raise NotLinearizable("family size is not affine in the index", scheme)
            fitted = _fit_iterated(rep, samples, occ, base, multis, itervar, scheme)
            if fitted is None:
                raise NotLinearizable("repetition counts are not affine in the index", scheme)
            body = _family_atom(rep[0], rep[3], rep[1], rep[2], *fitted)
            conjuncts[rep] = [IterGroup(itervar, ONE, upper, (body,))]

    ordered = []
    seen = set()
    for key in order:
        key = rep_of.get(key, key)
        if key in conjuncts and key not in seen:
            seen.add(key)
            ordered.extend(conjuncts[key])

    branch = Branch(scheme, decls, builder, AtomSet(tuple(ordered), decls))
    _verify_branch(theory, branch, verify_envs)
    return branch


def _fit_iterated(key, samples, occ, base, multis, itervar, scheme):
    """Fit run counts over base features extended with the occurrence
    position and, per multi-index, the element at that position (tried
    both from the front and from the back)."""
    pos = AffineExpr.var(itervar)
    selector_choices = [()]
    for w in multis:
        selector_choices = [
            prev + (sel,)
            for prev in selector_choices
            for sel in (
                AffineExpr.element(w, pos),
                AffineExpr.element(w, AffineExpr.var(w) + 1 - pos),
            )
        ]
    for sels in selector_choices:
        features = base + [pos] + list(sels)
        obs = []
        ok = True
        for (env, _), atoms in zip(samples, occ):
            for i, atom in enumerate(atoms, start=1):
                obs.append(({**env, itervar: i}, atom))
        try:
            fitted = _fit_family_runs(key, obs, features, scheme)
        except NotLinearizable:
            return None
        if fitted is not None:
            return fitted
    return None


# ---------------------------------------------------------------------------
# verification


def _canon_steps(steps) -> str:
    clause = Clause("", Var("x"), Var("x"))
    for step in steps:
        clause = compose_clauses(clause, step.as_clause())
        if clause is None:
            return "<empty>"
    c = clause.canonical()
    return f"{print_term(c.lhs)} -> {print_term(c.rhs)}"


def _shape_concrete(atom: _ConcreteAtom):
    left = _canon_steps(s for s, c in atom.left for _ in range(c))
    right = _canon_steps(s for s, c in atom.right for _ in range(c))
    return (atom.kind, left, right, atom.template)


def _expand_symbolic(atoms, env, out):
    for atom in atoms:
        if isinstance(atom, IterGroup):
            lo = atom.lower.evaluate(env)
            hi = atom.upper.evaluate(env)
            for i in range(lo, hi + 1):
                _expand_symbolic(atom.body, {**env, atom.itervar: i}, out)
            continue
        if isinstance(atom, EqualsLR):
            l = atom.left.expand(env)
            r = atom.right.expand(env)
            if l is None or r is None:
                raise NotLinearizable("a fitted count went negative during verification")
            out.append(("EqualsLR", _canon_steps(l), _canon_steps(r), None))
        else:
            p = atom.path.expand(env)
            if p is None:
                raise NotLinearizable("a fitted count went negative during verification")
            out.append((type(atom).__name__, _canon_steps(p), _canon_steps(()), atom.template))


def _verify_branch(theory, branch: Branch, envs):
    for env in envs:
        atoms = _concrete_atoms(theory, instantiate(branch.scheme, branch.index_of(env)))
        if atoms is None:
            raise NotLinearizable("a held-out instance composes to the empty relation", branch.scheme)
        expected = sorted(_shape_concrete(a) for a in atoms)
        got = []
        _expand_symbolic(branch.atoms.conjuncts, env, got)
        if sorted(got) != expected:
            raise NotLinearizable("fitted form failed held-out verification", branch.scheme)


# ---------------------------------------------------------------------------
# entry point


def check_layout(scheme: IterExpr) -> None:
    """Raises NotLinearizable when *scheme* has no flat index layout;
    cheap (no sampling), usable as an early feasibility probe."""
    tops = scheme.parts if isinstance(scheme, Alt) else (scheme,)
    for part in tops:
        _layout(part, [])


def sigma(theory, scheme: IterExpr) -> SymbolicCharFn:
    """The symbolic characteristic function of *scheme* over *theory*."""
    tops = scheme.parts if isinstance(scheme, Alt) else (scheme,)
    branches = tuple(_synthesize_branch(theory, part) for part in tops)
    return SymbolicCharFn(scheme, branches)
