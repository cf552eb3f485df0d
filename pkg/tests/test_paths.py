"""Path composition identities, clause splitting, and atom evaluation."""

import pytest
from hypothesis import given, settings, strategies as st

from tpc.affine import AffineExpr
from tpc.errors import Unimplemented
from tpc.paths import (
    EqualsLR,
    EqualsLL,
    GroundL,
    GroundR,
    IDENTITY_PATH,
    IterGroup,
    Segment,
    Step,
    SymbolicPath,
    apply_path,
    compose_paths,
    eval_atomset,
    path_of_steps,
    power_path,
    same_path,
    split_axiom,
)
from tpc.terms import Clause, parse_term, print_term


def step(text, var):
    return Step(parse_term(text), var)


class TestSteps:
    def test_apply_extracts_subtree(self):
        s = step("P(x, y)", "x")
        assert s.apply(parse_term("P(A, B)")) == parse_term("A")

    def test_apply_mismatch(self):
        s = step("P(x, y)", "x")
        assert s.apply(parse_term("Q(A, B)")) is None

    def test_canonical_names(self):
        assert step("P(a, b)", "b") == step("P(x, y)", "y")

    def test_target_must_occur(self):
        with pytest.raises(ValueError):
            Step(parse_term("P(x)"), "y")

    def test_str(self):
        assert str(step("P(a, b)", "b")) == "[P(x, y)->y]"


class TestComposition:
    def test_projection_pair(self):
        # [P(x,y)->x].[R(x,y)->y] = [P(R(x,y),z)->y]
        p = path_of_steps(step("P(x, y)", "x"), step("R(x, y)", "y"))
        q = path_of_steps(step("P(R(x, y), z)", "y"))
        assert same_path(p, q)

    def test_power_of_strip(self):
        p = power_path(path_of_steps(step("F(x)", "x")), 4)
        assert same_path(p, path_of_steps(step("F(F(F(F(x))))", "x")))

    def test_identity_is_neutral(self):
        p = path_of_steps(step("F(x)", "x"))
        assert compose_paths(IDENTITY_PATH, p) == p
        assert compose_paths(p, IDENTITY_PATH) == p

    def test_power_zero(self):
        p = path_of_steps(step("F(x)", "x"))
        assert power_path(p, 0) == IDENTITY_PATH

    def test_compose_deepens_pattern(self):
        p = path_of_steps(step("F(x)", "x"))
        q = path_of_steps(step("P(x, y)", "x"))
        r = compose_paths(p, q)
        assert same_path(r, path_of_steps(step("F(P(x, y))", "x")))

    def test_symbolic_run_merging(self):
        f = step("F(x)", "x")
        n = AffineExpr.var("n")
        p = SymbolicPath.of(Segment(f, n), Segment(f, AffineExpr.const_(2)))
        assert len(p.segments) == 1
        assert p.segments[0].count == n + AffineExpr.const_(2)

    def test_symbolic_expand_and_apply(self):
        f = step("F(x)", "x")
        p = SymbolicPath.of(Segment(f, AffineExpr.var("n")))
        tree = parse_term("F(F(F(Z)))")
        assert p.apply(tree, {"n": 2}) == parse_term("F(Z)")
        assert p.apply(tree, {"n": 5}) is None
        assert p.expand({"n": -1}) is None

    def test_str_forms(self):
        f = step("F(x)", "x")
        n = AffineExpr.var("n")
        p = SymbolicPath.of(Segment(step("P(x, y)", "x")), Segment(f, n + n))
        assert str(p) == "[P(x, y)->x].[F(x)->x]^{2n}"
        assert str(IDENTITY_PATH) == "[x->x]"


class TestSplit:
    def test_rotation_clause_three_atoms(self):
        # P(R(x,z),y) -> P(x,R(y,z)) splits into three variable links.
        c = Clause("b", parse_term("P(R(x, z), y)"), parse_term("P(x, R(y, z))"))
        s = split_axiom(c)
        assert len(s.conjuncts) == 3
        got = {(str(a.left), str(a.right)) for a in s.conjuncts}
        assert got == {
            ("[P(x, y)->x].[R(x, y)->x]", "[P(x, y)->x]"),
            ("[P(x, y)->y]", "[P(x, y)->y].[R(x, y)->x]"),
            ("[P(x, y)->x].[R(x, y)->y]", "[P(x, y)->y].[R(x, y)->y]"),
        }

    def test_ground_fact_clause(self):
        c = Clause("p3", parse_term("x"), parse_term("And(Parent(Adam, John), x)"))
        s = split_axiom(c)
        kinds = [type(a).__name__ for a in s.conjuncts]
        assert kinds == ["EqualsLR", "GroundR"]
        eq, gr = s.conjuncts
        assert str(eq.left) == "[x->x]"
        assert str(eq.right) == "[And(x, y)->y]"
        assert gr.template == parse_term("Parent(Adam, John)")
        assert str(gr.path) == "[And(x, y)->x]"

    def test_identity_clause(self):
        s = split_axiom(Clause("", parse_term("x"), parse_term("x")))
        assert len(s.conjuncts) == 1
        a = s.conjuncts[0]
        assert isinstance(a, EqualsLR)
        assert a.left == IDENTITY_PATH and a.right == IDENTITY_PATH

    def test_dropped_lhs_variable_emits_nothing(self):
        c = Clause("l1", parse_term("And(x, y)"), parse_term("x"))
        s = split_axiom(c)
        assert len(s.conjuncts) == 1
        assert str(s.conjuncts[0]) == "EqualsLR([And(x, y)->x], [x->x])"

    def test_nonlinear_rhs_variable(self):
        c = Clause("", parse_term("F(x)"), parse_term("Pair(x, x)"))
        s = split_axiom(c)
        assert len(s.conjuncts) == 2


def _matches_clause(c, t, d):
    from tpc.terms import apply_clause

    return apply_clause(c, t) == d


CLAUSES = [
    Clause("a", parse_term("P(x, y)"), parse_term("P(F(F(x)), G(y))")),
    Clause("b", parse_term("P(R(x, z), y)"), parse_term("P(x, R(y, z))")),
    Clause("c", parse_term("x"), parse_term("And(Parent(Adam, John), x)")),
    Clause("d", parse_term("And(x, y)"), parse_term("x")),
]

TREES = [
    parse_term(s)
    for s in [
        "P(A, B)",
        "P(F(A), G(B))",
        "P(R(A, B), C)",
        "P(R(R(A, B), C), D)",
        "And(Parent(Adam, John), S)",
        "And(A, B)",
        "A",
        "S",
        "Parent(Adam, John)",
        "P(F(F(A)), G(B))",
        "P(A, R(B, C))",
    ]
]


class TestSplitSemantics:
    @pytest.mark.parametrize("c", CLAUSES, ids=lambda c: c.name)
    def test_split_matches_root_application(self, c):
        """The atom set holds on (t, d) exactly when c rewrites t to d,
        except where the clause drops information (then the atoms are the
        projection of the relation, still implied by it)."""
        s = split_axiom(c)
        drops = bool(
            {v for v in _clause_vars(c.lhs)} - {v for v in _clause_vars(c.rhs)}
        )
        for t in TREES:
            for d in TREES:
                holds = eval_atomset(s, {}, t, d)
                rewrites = _matches_clause(c, t, d)
                if rewrites:
                    assert holds
                elif not drops:
                    assert not holds


def _clause_vars(t):
    from tpc.terms import free_vars

    return free_vars(t)


class TestEval:
    def test_itergroup(self):
        f = step("F(x)", "x")
        i = AffineExpr.var("i")
        body = (
            EqualsLR(
                SymbolicPath.of(Segment(f, i)),
                SymbolicPath.of(Segment(f, i)),
            ),
        )
        from tpc.paths import AtomSet

        g = IterGroup("i", AffineExpr.const_(1), AffineExpr.var("m"), body)
        t = parse_term("F(F(F(Z)))")
        assert eval_atomset(AtomSet((g,)), {"m": 3}, t, t)
        assert not eval_atomset(AtomSet((g,)), {"m": 4}, t, t)
        assert eval_atomset(AtomSet((g,)), {"m": 0}, t, parse_term("Z"))

    def test_deferred_atoms_raise(self):
        from tpc.paths import AtomSet

        a = EqualsLL(IDENTITY_PATH, IDENTITY_PATH)
        with pytest.raises(Unimplemented):
            eval_atomset(AtomSet((a,)), {}, parse_term("A"), parse_term("A"))

    def test_multiindex_element_selector(self):
        f = step("F(x)", "x")
        from tpc.paths import AtomSet

        a = EqualsLR(
            SymbolicPath.of(Segment(f, AffineExpr.element("m", AffineExpr.const_(1)))),
            IDENTITY_PATH,
        )
        t = parse_term("F(F(Z))")
        assert eval_atomset(AtomSet((a,)), {"m": (2, 5)}, t, parse_term("Z"))
        # out-of-range selector is simply false, not an error
        assert not eval_atomset(AtomSet((a,)), {"m": ()}, t, parse_term("Z"))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=6), st.integers(min_value=0, max_value=6))
def test_power_compose_coherence(a, b):
    f = path_of_steps(step("F(x)", "x"))
    lhs = power_path(f, a + b)
    rhs = compose_paths(power_path(f, a), power_path(f, b))
    if a + b == 0:
        assert lhs == IDENTITY_PATH and rhs == IDENTITY_PATH
    else:
        assert same_path(lhs, rhs)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(CLAUSES), st.sampled_from(TREES))
def test_split_apply_equivalence(c, t):
    from tpc.terms import apply_clause

    d = apply_clause(c, t)
    if d is not None:
        assert eval_atomset(split_axiom(c), {}, t, d)
