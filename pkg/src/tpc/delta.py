"""Scheme reduction: removing repetitions from iterative schemes.

Two kinds of rewriting run to a fixpoint here.  Pure normalizations are
relation-preserving identities that need no solver: flattening, lifting
alternatives out of concatenations, merging adjacent equal closures, and
absorbing ``x*.x.rest | rest`` into ``x*.rest``.  Solver-justified rules
fire only after an inclusion query comes back universal:

* absorption: ``(x*.y)*`` collapses to ``y*.x*.y | eps`` when one extra
  leading x is already covered, i.e. x.y.x*.y is included in y.x*.y;
* commutation: a single y moves left across ``x*`` when x.y and y.x
  describe the same relation;
* doubling (attempted last, usually blocked): ``(..y)*`` collapses when
  the doubled body is covered by one-sided extensions of itself.

Every applied rule and every blocked attempt is recorded in a replayable
trace.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

from .errors import NotLinearizable, TpcError, Unsupported, WeakOrderWarning
from .inclusion import includes
from .schemes import Alt, Axiom, Dot, EPS, Eps, IterExpr, Star, alt, dot, print_scheme
from .sigma import sigma
from .terms import Theory

MAX_REDUCTION_STEPS = 32


@dataclass(frozen=True)
class TraceStep:
    rule: str
    before: IterExpr
    after: IterExpr

    def __str__(self):
        return f"{self.rule}: {print_scheme(self.before)} => {print_scheme(self.after)}"


@dataclass(frozen=True)
class Attempt:
    """A rule that was considered and did not fire, with the query that
    blocked it."""

    rule: str
    target: IterExpr
    query: str
    reason: str

    def __str__(self):
        return f"{self.rule} blocked at {print_scheme(self.target)}: {self.query} ({self.reason})"


@dataclass(frozen=True)
class ReductionTrace:
    start: IterExpr
    steps: tuple = ()
    attempts: tuple = ()

    @property
    def result(self) -> IterExpr:
        return self.steps[-1].after if self.steps else self.start

    def replay(self) -> IterExpr:
        """Re-checks the chaining of the recorded steps."""
        current = self.start
        for step in self.steps:
            if step.before != current:
                raise ValueError(f"trace broken at {step}")
            current = step.after
        return current


@lru_cache(maxsize=512)
def _sigma_cached(theory: Theory, scheme: IterExpr):
    return sigma(theory, scheme)


# ---------------------------------------------------------------------------
# solver-backed tests


def check_absorption(theory: Theory, x: IterExpr, y: IterExpr) -> bool:
    """Is one extra leading x of (x*.y) redundant, i.e.
    x.y.x*.y included in y.x*.y?"""
    f = _sigma_cached(theory, dot(x, y, Star(x), y))
    g = _sigma_cached(theory, dot(y, Star(x), y))
    return includes(f, g).universal


def check_commutation(theory: Theory, x: IterExpr, y: IterExpr) -> bool:
    """Do x and y commute as relations (x.y = y.x)?"""
    f = _sigma_cached(theory, dot(x, y))
    g = _sigma_cached(theory, dot(y, x))
    return includes(f, g).universal and includes(g, f).universal


# ---------------------------------------------------------------------------
# pure normalizations


def _star_parts(x: IterExpr) -> tuple:
    return x.parts if isinstance(x, Dot) else (x,)


def _normalize_once(e: IterExpr) -> IterExpr:
    if isinstance(e, (Axiom, Eps)):
        return e
    if isinstance(e, Star):
        return Star(_normalize_once(e.body))
    if isinstance(e, Dot):
        parts = [_normalize_once(p) for p in e.parts]
        for i, p in enumerate(parts):
            if isinstance(p, Alt):
                return alt(*(dot(*parts[:i], q, *parts[i + 1:]) for q in p.parts))
        merged = []
        for p in parts:
            if merged and isinstance(p, Star) and p == merged[-1]:
                continue
            merged.append(p)
        return dot(*merged)
    if isinstance(e, Alt):
        parts = [_normalize_once(p) for p in e.parts]
        for i, p in enumerate(parts):
            if not (isinstance(p, Dot) and isinstance(p.parts[0], Star)):
                continue
            x = p.parts[0].body
            xs = _star_parts(x)
            rest = p.parts[1:]
            if rest[: len(xs)] != xs:
                continue
            tail = dot(*rest[len(xs):]) if rest[len(xs):] else EPS
            for j, q in enumerate(parts):
                if j != i and q == tail:
                    keep = [r for idx, r in enumerate(parts) if idx not in (i, j)]
                    repl = dot(p.parts[0], *rest[len(xs):])
                    return alt(repl, *keep) if keep else repl
        return alt(*parts)
    raise TypeError(e)


def normalize(e: IterExpr) -> IterExpr:
    for _ in range(MAX_REDUCTION_STEPS):
        new = _normalize_once(e)
        if new == e:
            return e
        e = new
    return e


# ---------------------------------------------------------------------------
# solver-backed rewriting


def _try_everywhere(e: IterExpr, rule):
    new = rule(e)
    if new is not None:
        return new
    if isinstance(e, Star):
        body = _try_everywhere(e.body, rule)
        return None if body is None else Star(body)
    if isinstance(e, (Dot, Alt)):
        for i, p in enumerate(e.parts):
            sub = _try_everywhere(p, rule)
            if sub is not None:
                parts = e.parts[:i] + (sub,) + e.parts[i + 1:]
                return dot(*parts) if isinstance(e, Dot) else alt(*parts)
    return None


def reduce_scheme(theory: Theory, scheme: IterExpr, max_steps: int = MAX_REDUCTION_STEPS):
    """Reduces *scheme* to a fixpoint of normalizations plus justified
    rewrites; returns (reduced scheme, trace)."""
    steps = []
    attempts = []
    current = scheme

    def record(rule, before, after):
        steps.append(TraceStep(rule, before, after))
        return after

    def r_absorption(e):
        if not (isinstance(e, Star) and isinstance(e.body, Dot)):
            return None
        parts = e.body.parts
        if not isinstance(parts[0], Star):
            return None
        x, y = parts[0].body, dot(*parts[1:])
        try:
            if check_absorption(theory, x, y):
                return alt(dot(Star(y), Star(x), y), EPS)
        except (NotLinearizable, Unsupported) as exc:
            attempts.append(
                Attempt(
                    "absorption",
                    e,
                    f"INCLUDES({print_scheme(dot(x, y, Star(x), y))}, {print_scheme(dot(y, Star(x), y))})",
                    str(exc),
                )
            )
        return None

    def r_commutation(e):
        if not isinstance(e, Dot):
            return None
        for i in range(len(e.parts) - 1):
            p, q = e.parts[i], e.parts[i + 1]
            if not isinstance(p, Star) or isinstance(q, (Star, Eps)) or q == p.body:
                continue
            try:
                if check_commutation(theory, p.body, q):
                    return dot(*e.parts[:i], q, p, *e.parts[i + 2:])
            except (NotLinearizable, Unsupported):
                continue
        return None

    def r_doubling(e):
        """Star over a body that absorption could not touch: check
        whether body.body collapses to y.body | body.y (y the last
        factor), which would let the star telescope."""
        if not (isinstance(e, Star) and isinstance(e.body, Dot)):
            return None
        parts = e.body.parts
        y = parts[-1]
        if isinstance(y, (Star, Eps)):
            return None
        doubled = dot(*parts, *parts)
        query = f"INCLUDES({print_scheme(doubled)}, {print_scheme(dot(y, *parts))})"
        try:
            f = _sigma_cached(theory, doubled)
            g = _sigma_cached(theory, dot(y, *parts))
            if includes(f, g).universal:
                return dot(Star(y), *parts[:-1], Star(y))
        except (NotLinearizable, Unsupported) as exc:
            attempts.append(Attempt("doubling", e, query, str(exc)))
        return None

    for _ in range(max_steps):
        normalized = normalize(current)
        if normalized != current:
            current = record("normalize", current, normalized)
            continue
        fired = False
        for name, rule in (("absorption", r_absorption), ("commutation", r_commutation)):
            new = _try_everywhere(current, rule)
            if new is not None:
                current = record(name, current, new)
                fired = True
                break
        if fired:
            continue
        new = _try_everywhere(current, r_doubling)
        if new is not None:
            current = record("doubling", current, new)
            continue
        break

    return current, ReductionTrace(scheme, tuple(steps), tuple(attempts))


# ---------------------------------------------------------------------------
# axiom ordering


def order_axioms(theory: Theory) -> list:
    """Declared order, after checking that pairwise commutation forms a
    weak order; a failure only warns, it never blocks the pipeline."""
    names = [c.name for c in theory.axioms]
    commute = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            try:
                commute[(a, b)] = check_commutation(theory, Axiom(a), Axiom(b))
            except (NotLinearizable, Unsupported, TpcError):
                commute[(a, b)] = False

    def same(a, b):
        return commute.get((a, b), commute.get((b, a), False))

    for a in names:
        for b in names:
            for c in names:
                if len({a, b, c}) == 3 and same(a, b) and same(b, c) and not same(a, c):
                    warnings.warn(
                        f"axiom interchangeability is not transitive ({a}, {b}, {c})",
                        WeakOrderWarning,
                    )
                    return names
    return names
