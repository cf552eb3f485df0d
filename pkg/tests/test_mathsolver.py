"""Existential elimination, concrete solving, and multi-index isolation."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from tpc.affine import AffineExpr
from tpc.errors import Underdetermined, Unsupported
from tpc.mathsolver import (
    Congruence,
    ConditionSystem,
    ElementFamily,
    Equation,
    Ineq,
    Region,
    eliminate,
    eval_condition,
    eval_region,
    eval_system,
    solve_concrete,
    solve_multiindex,
)

n = AffineExpr.var("n")
k = AffineExpr.var("k")
one = AffineExpr.const_(1)
two = AffineExpr.const_(2)


def elem(name, sel):
    return AffineExpr.element(name, sel)


class TestEliminate:
    def test_overdetermined_consistent_universal(self):
        # 2n + 4 = 2k + 2 and n + 3 = k + 2 have the natural solution
        # k = n + 1 for every n, so the region is everything.
        sys = ConditionSystem(
            parameters=("n",),
            existentials=("k",),
            conditions=(
                Equation(n * 2 + 4, k * 2 + 2),
                Equation(n + 3, k + 2),
            ),
        )
        r = eliminate(sys)
        assert r.is_universal
        # the raw trace still shows the nonneg residue that got discharged
        assert any(isinstance(c, Ineq) for c in r.raw)

    def test_reversed_query_gives_lower_bound(self):
        sys = ConditionSystem(
            parameters=("k",),
            existentials=("n",),
            conditions=(
                Equation(k * 2 + 2, n * 2 + 4),
                Equation(k + 2, n + 3),
            ),
        )
        r = eliminate(sys)
        assert r.kind == "conditional"
        assert [str(c) for c in r.conditions] == ["k - 1 >= 0"]
        assert eval_region(r, {"k": 1}) and not eval_region(r, {"k": 0})

    def test_parity_congruence(self):
        sys = ConditionSystem(("n",), ("k",), (Equation(n, k * 2),))
        r = eliminate(sys)
        assert r.kind == "conditional"
        assert len(r.conditions) == 1
        c = r.conditions[0]
        assert isinstance(c, Congruence) and c.modulus == 2
        assert eval_region(r, {"n": 4}) and not eval_region(r, {"n": 3})

    def test_inconsistent(self):
        sys = ConditionSystem((), ("k",), (Equation(k, one), Equation(k, two)))
        assert eliminate(sys).is_unsat

    def test_constant_contradiction(self):
        assert eliminate(ConditionSystem((), (), (Equation(one, two),))).is_unsat

    def test_unconstrained_existential(self):
        sys = ConditionSystem(("n",), ("k",), (Equation(n, n),))
        assert eliminate(sys).is_universal

    def test_residual_equation_on_parameters(self):
        m = AffineExpr.var("m")
        sys = ConditionSystem(("n", "m"), ("k",), (Equation(k, n), Equation(n, m + 1)))
        r = eliminate(sys)
        assert r.kind == "conditional"
        assert any(isinstance(c, Equation) for c in r.conditions)
        assert eval_region(r, {"n": 3, "m": 2})
        assert not eval_region(r, {"n": 3, "m": 3})

    def test_given_inequality_subsumes(self):
        # knowing n >= 1, the residue n - 1 >= 0 is discharged
        sys = ConditionSystem(
            ("n",), ("k",), (Ineq(n, one), Equation(k + 1, n))
        )
        assert eliminate(sys).is_universal


class TestEliminateSoundness:
    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(-3, 3), st.integers(-3, 3), st.integers(-4, 4),
        st.integers(-3, 3), st.integers(-3, 3), st.integers(-4, 4),
    )
    def test_region_matches_bruteforce(self, a1, b1, c1, a2, b2, c2):
        """For random 2-equation systems in one parameter and one
        existential, the region agrees with brute-force search."""
        eqs = (
            Equation(n * a1 + c1, k * b1),
            Equation(n * a2 + c2, k * b2),
        )
        sys = ConditionSystem(("n",), ("k",), eqs)
        try:
            r = eliminate(sys)
        except Unsupported:
            return
        for nv in range(0, 9):
            brute = any(
                all(eval_condition(e, {"n": nv, "k": kv}) for e in eqs)
                for kv in range(0, 40)
            )
            claimed = eval_region(r, {"n": nv})
            # the brute bound 40 covers every solution the region can
            # claim for n <= 8 with coefficients this small
            assert claimed == brute, (r, nv)


class TestSolveConcrete:
    def test_two_by_two(self):
        eqs = (Equation(n + k * 2, AffineExpr.const_(8)),
               Equation(n + k, AffineExpr.const_(5)))
        assert solve_concrete(eqs, ("n", "k")) == {"n": 2, "k": 3}

    def test_single(self):
        assert solve_concrete((Equation(k, AffineExpr.const_(3)),), ("k",)) == {"k": 3}

    def test_inconsistent_returns_none(self):
        eqs = (Equation(k, one), Equation(k, two))
        assert solve_concrete(eqs, ("k",)) is None

    def test_negative_returns_none(self):
        assert solve_concrete((Equation(k + 2, one),), ("k",)) is None

    def test_fractional_returns_none(self):
        assert solve_concrete((Equation(k * 2, one),), ("k",)) is None

    def test_underdetermined(self):
        with pytest.raises(Underdetermined):
            solve_concrete((Equation(n + k, two),), ("n", "k"))


def _seven_condition_system():
    from tpc.affine import IndexTerm

    m1 = elem("m", one)           # length of m[1] in scalar position
    m2 = elem("m", two)
    u = AffineExpr.var("u")
    i = AffineExpr.var("i")

    def nested(first, sel):
        return AffineExpr(0, ((1, IndexTerm("m", (first, sel))),))

    def uel(sel):
        return AffineExpr(0, ((1, IndexTerm("u", (sel,))),))

    return ConditionSystem(
        parameters=("m",),
        existentials=(),
        conditions=(
            Ineq(m1, one),
            Ineq(m2, one),
            Equation(m1 + m2 - u - 2, AffineExpr.const_(0)),
            ElementFamily("i", one, m1 - 2, Equation(nested(one, i) - uel(i), AffineExpr.const_(0))),
            Equation(nested(one, m1 - 1) + nested(two, one) - uel(m1 - 1), AffineExpr.const_(0)),
            Equation(nested(one, m1) + nested(two, two) - uel(m1), AffineExpr.const_(0)),
            ElementFamily("i", one, m2 - 2, Equation(nested(two, i + 2) - uel(m1 + i), AffineExpr.const_(0))),
        ),
    )


class TestMultiIndex:
    M = ((4, 1, 2), (5, 2, 0, 1))
    U = (4, 6, 4, 0, 1)

    def test_system_holds_on_worked_pair(self):
        sys = _seven_condition_system()
        assert eval_system(sys, {"m": self.M, "u": self.U})
        assert not eval_system(sys, {"m": self.M, "u": (4, 6, 4, 0, 2)})
        assert not eval_system(sys, {"m": self.M, "u": (4, 6, 4, 0)})

    def test_solve_isolates_u(self):
        sol = solve_multiindex(_seven_condition_system(), "u")
        assert str(sol.length) == "m[1] + m[2] - 2"
        assert len(sol.elements) == 4
        assert sol.region.kind == "conditional"
        assert [str(c) for c in sol.region.conditions] == ["m[1] >= 1", "m[2] >= 1"]

    def test_build_reconstructs_u(self):
        sol = solve_multiindex(_seven_condition_system(), "u")
        assert sol.build({"m": self.M}) == self.U

    def test_build_matches_system_on_samples(self):
        sol = solve_multiindex(_seven_condition_system(), "u")
        sys = _seven_condition_system()
        shapes = [
            ((2, 2), (1, 1)),
            ((0, 3, 3), (2, 2)),
            ((1, 1, 1, 1), (1, 1, 1)),
            ((5,) * 4, (0, 0, 0, 0)),
        ]
        for m in shapes:
            if len(m[0]) < 2 or len(m[1]) < 2:
                continue
            u = sol.build({"m": m})
            assert eval_system(sys, {"m": m, "u": u}), (m, u)

    def test_missing_length_equation(self):
        from tpc.affine import IndexTerm

        uel1 = AffineExpr(0, ((1, IndexTerm("u", (one,))),))
        sys = ConditionSystem(("m",), (), (Equation(uel1, one),))
        with pytest.raises(Unsupported):
            solve_multiindex(sys, "u")

    def test_nonunit_coefficient_rejected(self):
        u = AffineExpr.var("u")
        sys = ConditionSystem(("m",), (), (Equation(u * 2, elem("m", one)),))
        with pytest.raises(Unsupported):
            solve_multiindex(sys, "u")
