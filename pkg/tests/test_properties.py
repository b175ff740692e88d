"""Algebraic laws of reduction, interleaving, hiding and denotation."""

from hypothesis import assume, given
from hypothesis import strategies as st

from most.denote import denote
from most.errors import WfError
from most.names import fresh
from most.syntax.ast import alpha_eq, canonical_type, is_whnf
from most.trace import (ResourceLimit, Sign, canon, delete_names, erase_constraints, interleave,
                        obsc, reduce_trace, safely_constrained, sorted_traces)
from most.typesem import Interface, Spec, reduce_ctx, reduce_type, spec_enumerate, spec_member, \
    successors, wf_spec

import gen
from helpers import naive_product


# type reduction


@given(gen.types(), gen.disjoint_observations())
def test_reduction_partially_commutes(A, obs):
    o1, o2 = obs
    r1, r2 = reduce_type(A, o1), reduce_type(A, o2)
    r12 = None if r1 is None else reduce_type(r1, o2)
    r21 = None if r2 is None else reduce_type(r2, o1)
    assert (r1 is not None and r2 is not None) == (r12 is not None and r21 is not None)
    if r12 is not None and r21 is not None:
        assert alpha_eq(r12, r21)


def _ctx_key(ctx):
    return frozenset((n, canonical_type(a)) for n, a in ctx)


def _steps(ctx, e):
    return [s.ambient for s in successors(Spec(ctx, ()), e)]


@st.composite
def _two_heads(draw):
    ctx = draw(gen.contexts())
    ready = [(c, A) for c, A in ctx if is_whnf(A)]
    assume(len(ready) >= 2)
    (c1, A1), (c2, A2) = draw(st.permutations(ready))[:2]
    e1 = gen.elem_for(draw, c1, A1, Sign.CONSTR)
    e2 = gen.elem_for(draw, c2, A2, Sign.CONSTR)
    return ctx, e1, e2


@given(_two_heads())
def test_context_reduction_diamond(case):
    ctx, e1, e2 = case
    for p1 in _steps(ctx, e1):
        for p2 in _steps(ctx, e2):
            via1 = {_ctx_key(p) for p in _steps(p1, e2)}
            via2 = {_ctx_key(p) for p in _steps(p2, e1)}
            assert via1 & via2


@given(_two_heads())
def test_reduction_commutes_with_a_step(case):
    ctx, e1, e2 = case
    o1 = obsc(e1.msg, e1.binders)
    moved = reduce_ctx(ctx, o1)
    assume(moved is not None)
    for g in _steps(ctx, e2):
        g1 = reduce_ctx(g, o1)
        if g1 is None:
            continue
        assert _ctx_key(g1) in {_ctx_key(p) for p in _steps(moved, e2)}


# traces


@given(gen.trace_pairs())
def test_erasure_bounds_interleaving(pair):
    t1, t2 = pair
    assert safely_constrained(t1) and safely_constrained(t2)
    lhs = {canon(erase_constraints(t)) for t in interleave(t1, t2)}
    rhs = interleave(erase_constraints(t1), erase_constraints(t2))
    assert lhs <= rhs


@given(gen.safe_traces(), gen.observations())
def test_erasure_and_reduction(t, o):
    r = reduce_trace(t, o)
    assume(r is not None)
    e = canon(erase_constraints(t))
    er = reduce_trace(erase_constraints(t), o)
    assert er is not None
    assert canon(erase_constraints(r)) == canon(er) == e


@given(gen.trace_pairs())
def test_interleave_commutes(pair):
    t1, t2 = pair
    assert interleave(t1, t2) == interleave(t2, t1)


@given(gen.safe_traces())
def test_interleave_unit(t):
    assert interleave(t, ()) == {canon(t)} == interleave((), t)


@given(gen.trace_pairs())
def test_interleave_agrees_with_naive_product(pair):
    from most.trace import MChan
    t1, t2 = (tuple(e for e in t if e.sign is not Sign.CONSTR and not isinstance(e.msg, MChan))
              for t in pair)
    assert interleave(t1, t2) == naive_product(t1, t2)


@given(gen.trace_pairs(), gen.trace_pairs())
def test_interleave_results_are_sign_pure(p, q):
    for t in interleave(*p):
        assert all(e.sign in Sign for e in t)
        assert len(t) <= len(p[0]) + len(p[1])


# processes


@given(gen.processes())
def test_denotation_is_finite_and_unconstrained(p):
    try:
        T = denote(p, limit=2000)
    except ResourceLimit:
        assume(False)
    n = gen.actions(p)
    for t in T:
        assert len(t) <= n
        assert all(e.sign in (Sign.OUT, Sign.IN, Sign.SYNC) for e in t)


# specifications


def _wf(s):
    try:
        wf_spec(s)
        return True
    except WfError:
        return False


# stable names keep the type strategies cached across examples
P, G, H = fresh("p"), fresh("g"), fresh("h")
A_, C_, D_ = fresh("a"), fresh("c"), fresh("d")


@st.composite
def _hiding_case(draw):
    p, g, h = P, G, H
    internal_names = [g, h][:draw(st.integers(1, 2))]
    chans = [p] + internal_names
    ty = lambda c: draw(gen.types(tuple(d for d in chans if d != c), 2))
    internal = tuple((c, ty(c)) for c in internal_names)
    s = Spec((), (Interface((), internal, (p, ty(p))),))
    assume(_wf(s))
    hidden = draw(st.sampled_from([internal[:1], internal[-1:], internal]))
    rest = tuple(x for x in internal if x not in hidden)
    s2 = Spec((), (Interface((), rest, s.interfaces[0].provided),))
    assume(_wf(s2))
    return draw(gen.spec_traces(s)), {c for c, _ in hidden}, s2


@given(_hiding_case())
def test_hiding_internal_channels(case):
    t, hidden, s2 = case
    assert spec_member(delete_names(t, hidden), s2)


@st.composite
def _composition_case(draw):
    a, c, d = A_, C_, D_
    where = draw(st.sampled_from(["none", "ambient", "left", "right"]))
    chans = [a, c] + ([d] if where != "none" else [])
    ty = lambda x: draw(gen.types(tuple(y for y in chans if y != x), 2))
    A, C = ty(a), ty(c)
    extra = ((d, ty(d)),) if where != "none" else ()
    pi = extra if where == "ambient" else ()
    d1 = extra if where == "left" else ()
    d2 = extra if where == "right" else ()
    s1 = Spec(pi + d2 + ((c, C),), (Interface(d1, (), (a, A)),))
    s2 = Spec(pi + d1, (Interface(d2 + ((a, A),), (), (c, C)),))
    s3 = Spec(pi, (Interface(d1 + d2, ((a, A),), (c, C)),))
    assume(_wf(s1) and _wf(s2) and _wf(s3))
    return draw(gen.spec_traces(s1)), draw(gen.spec_traces(s2)), s3


@given(_composition_case())
def test_interleaving_specified_traces(case):
    t1, t2, s3 = case
    for t in interleave(t1, t2):
        assert spec_member(t, s3)
