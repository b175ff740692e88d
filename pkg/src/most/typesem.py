"""Type reduction and the trace semantics of specifications.

A specification is an ambient context Pi and a sequence of interfaces,
each made of a used context Delta, an internal context Iota and one
provided channel.  The semantics is the set of traces generated by the
step relation in ``successors``: every step consumes one element and
reduces everything else by the observation it carries.  Membership is
decided by a memoised search over trace positions and states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import WfError
from .names import Name, fresh
from .syntax.ast import (CaseChan, CaseClose, CaseLabel, EChoice, IChoice, Lolly, One,
                         Tensor, branch, free_channels, is_whnf, refresh_binders,
                         rename_type, subst_type, type_size)
from .trace import (Elem, MChan, MClose, MLabel, OChan, OClose, OLabel, Observation,
                    ResourceLimit, Sign, canon, obs_names, obsc, open_trace)

Context = tuple  # ((Name, SessionType), ...)


def reduce_type(a, o: Observation):
    """a / o, or None when the observation is not permitted."""
    match a:
        case One():
            return a
        case IChoice(br) | EChoice(br):
            out = []
            for l, v in br:
                r = reduce_type(v, o)
                if r is None:
                    return None
                out.append((l, r))
            return type(a)(tuple(out))
        case Tensor(x, X, y, Y) | Lolly(x, X, y, Y):
            if {x, y} & obs_names(o):
                a = refresh_binders(a)
                x, X, y, Y = a.x, a.xt, a.y, a.yt
            X2 = reduce_type(X, o)
            if X2 is None:
                return None
            Y2 = reduce_type(Y, o)
            if Y2 is None:
                return None
            return type(a)(x, X2, y, Y2)
        case CaseClose(c, B):
            if c != o.carrier:
                B2 = reduce_type(B, o)
                return None if B2 is None else CaseClose(c, B2)
            return B if isinstance(o, OClose) else None
        case CaseLabel(c, br):
            if c != o.carrier:
                out = []
                for l, v in br:
                    r = reduce_type(v, o)
                    if r is None:
                        return None
                    out.append((l, r))
                return CaseLabel(c, tuple(out))
            if isinstance(o, OLabel):
                return branch(br, o.label)
            return None
        case CaseChan(c, z, B):
            if c != o.carrier:
                if z in obs_names(o):
                    z2 = fresh(z.display)
                    B, z = rename_type(B, {z: z2}), z2
                B2 = reduce_type(B, o)
                return None if B2 is None else CaseChan(c, z, B2)
            if isinstance(o, OChan):
                return subst_type(B, o.name, z)
            return None
    raise TypeError(f"not a type: {a!r}")


def reduce_ctx(ctx: Context, o: Observation) -> Optional[Context]:
    out = []
    for n, a in ctx:
        r = reduce_type(a, o)
        if r is None:
            return None
        out.append((n, r))
    return tuple(out)


def ctx_lookup(ctx: Context, n: Name):
    for m, a in ctx:
        if m == n:
            return a
    return None


def ctx_remove(ctx: Context, n: Name) -> Context:
    return tuple((m, a) for m, a in ctx if m != n)


def ctx_names(ctx: Context) -> list:
    return [n for n, _ in ctx]


@dataclass(frozen=True)
class Interface:
    used: Context
    internal: Context
    provided: tuple  # (Name, SessionType)

    def names(self) -> list:
        return ctx_names(self.used) + ctx_names(self.internal) + [self.provided[0]]


@dataclass(frozen=True)
class Spec:
    ambient: Context
    interfaces: tuple

    def names(self) -> list:
        out = ctx_names(self.ambient)
        for g in self.interfaces:
            out += g.names()
        return out


def reduce_interface(g: Interface, o: Observation) -> Optional[Interface]:
    u = reduce_ctx(g.used, o)
    if u is None:
        return None
    i = reduce_ctx(g.internal, o)
    if i is None:
        return None
    c, a = g.provided
    r = reduce_type(a, o)
    if r is None:
        return None
    return Interface(u, i, (c, r))


def reduce_spec(s: Spec, o: Observation) -> Optional[Spec]:
    amb = reduce_ctx(s.ambient, o)
    if amb is None:
        return None
    out = []
    for g in s.interfaces:
        r = reduce_interface(g, o)
        if r is None:
            return None
        out.append(r)
    return Spec(amb, tuple(out))


def wf_spec(s: Spec) -> bool:
    """Raise WfError unless names are distinct and every type only
    mentions channels of the specification."""
    names = s.names()
    seen = set()
    for n in names:
        if n in seen:
            raise WfError(f"channel {n} declared twice")
        seen.add(n)
    entries = list(s.ambient)
    for g in s.interfaces:
        entries += list(g.used) + list(g.internal) + [g.provided]
    for n, a in entries:
        loose = free_channels(a) - seen
        if loose:
            shown = ", ".join(sorted(str(m) for m in loose))
            raise WfError(f"type of {n} mentions unknown channel(s) {shown}")
    return True


def spec_size(s: Spec) -> int:
    entries = list(s.ambient)
    for g in s.interfaces:
        entries += list(g.used) + list(g.internal) + [g.provided]
    return sum(type_size(a) for _, a in entries)


# the step relation


def _unpack_chan(a, carrier: Name, b: Name):
    """Types of the transmitted channel b and the continuation on carrier."""
    return subst_type(a.xt, carrier, a.y), subst_type(a.yt, b, a.x)


def _splits(entries: list):
    for mask in itertools.product((0, 1), repeat=len(entries)):
        left = tuple(e for e, k in zip(entries, mask) if k == 0)
        right = tuple(e for e, k in zip(entries, mask) if k == 1)
        yield left, right


def _rest(s: Spec, k: int, o: Observation):
    """Everything but interface k, reduced by o."""
    amb = reduce_ctx(s.ambient, o)
    if amb is None:
        return None
    others = []
    for j, g in enumerate(s.interfaces):
        if j == k:
            others.append(None)
            continue
        r = reduce_interface(g, o)
        if r is None:
            return None
        others.append(r)
    return amb, others


def _with(others: list, k: int, new: list) -> tuple:
    return tuple(others[:k]) + tuple(new) + tuple(others[k + 1:])


def successors(s: Spec, e: Elem) -> Iterator[Spec]:
    """States reachable from s by a step that emits e."""
    o = obsc(e.msg, e.binders)
    if o is None:
        return
    a = e.carrier
    if e.sign is Sign.CONSTR:
        yield from _constraint_steps(s, e, o)
        return
    for k, g in enumerate(s.interfaces):
        c, C = g.provided
        if a == c:
            yield from _provided_steps(s, k, g, e, o)
        elif ctx_lookup(g.used, a) is not None:
            yield from _used_steps(s, k, g, e, o)
        elif ctx_lookup(g.internal, a) is not None:
            yield from _internal_steps(s, k, g, e, o)


def _constraint_steps(s, e, o):
    a = e.carrier
    A = ctx_lookup(s.ambient, a)
    if A is None or not is_whnf(A):
        return
    amb = reduce_ctx(ctx_remove(s.ambient, a), o)
    if amb is None:
        return
    gs = []
    for g in s.interfaces:
        r = reduce_interface(g, o)
        if r is None:
            return
        gs.append(r)
    gs = tuple(gs)
    match A, e.msg:
        case One(), MClose():
            yield Spec(amb, gs)
        case (IChoice(br) | EChoice(br)), MLabel(_, l):
            B = branch(br, l)
            if B is not None:
                yield Spec(amb + ((a, B),), gs)
        case (Tensor() | Lolly()), MChan():
            b = e.binders[0]
            B, A2 = _unpack_chan(A, a, b)
            yield Spec(amb + ((a, A2), (b, B)), gs)


def _provided_steps(s, k, g, e, o):
    a, A = g.provided
    rest = _rest(s, k, o)
    if rest is None:
        return
    amb, others = rest
    sign = e.sign
    match A, e.msg:
        case One(), MClose() if sign is Sign.OUT:
            if not g.used and not g.internal:
                yield Spec(amb, _with(others, k, []))
        case IChoice(br), MLabel(_, l) if sign is Sign.OUT:
            yield from _label_step(amb, others, k, g, a, br, l, o, provided=True)
        case EChoice(br), MLabel(_, l) if sign is Sign.IN:
            yield from _label_step(amb, others, k, g, a, br, l, o, provided=True)
        case Tensor(), MChan() if sign is Sign.OUT:
            b = e.binders[0]
            B, A2 = _unpack_chan(A, a, b)
            u = reduce_ctx(g.used, o)
            i = reduce_ctx(g.internal, o)
            if u is None or i is None:
                return
            for u1, u2 in _splits(list(u)):
                for i1, i2 in _splits(list(i)):
                    yield Spec(amb, _with(others, k, [Interface(u1, i1, (b, B)),
                                                      Interface(u2, i2, (a, A2))]))
        case Lolly(), MChan() if sign is Sign.IN:
            b = e.binders[0]
            B, A2 = _unpack_chan(A, a, b)
            u = reduce_ctx(g.used, o)
            i = reduce_ctx(g.internal, o)
            if u is None or i is None:
                return
            yield Spec(amb, _with(others, k, [Interface(u + ((b, B),), i, (a, A2))]))


def _label_step(amb, others, k, g, a, br, l, o, provided):
    B = branch(br, l)
    if B is None:
        return
    u = reduce_ctx(g.used, o)
    i = reduce_ctx(g.internal, o)
    if u is None or i is None:
        return
    yield Spec(amb, _with(others, k, [Interface(u, i, (a, B))]))


def _replace(ctx: Context, a: Name, new: list) -> Context:
    out = []
    for n, t in ctx:
        if n == a:
            out.extend(new)
        else:
            out.append((n, t))
    return tuple(out)


def _used_steps(s, k, g, e, o):
    a = e.carrier
    A = ctx_lookup(g.used, a)
    rest = _rest(s, k, o)
    if rest is None:
        return
    amb, others = rest
    i = reduce_ctx(g.internal, o)
    u = reduce_ctx(ctx_remove(g.used, a), o)
    c, C = g.provided
    C2 = reduce_type(C, o)
    if i is None or u is None or C2 is None:
        return
    # keep a's position in Delta for readability of states
    pos = ctx_names(g.used).index(a)

    def put(new):
        return u[:pos] + tuple(new) + u[pos:]

    sign = e.sign
    match A, e.msg:
        case One(), MClose() if sign is Sign.IN:
            yield Spec(amb, _with(others, k, [Interface(put([]), i, (c, C2))]))
        case IChoice(br), MLabel(_, l) if sign is Sign.IN:
            B = branch(br, l)
            if B is not None:
                yield Spec(amb, _with(others, k, [Interface(put([(a, B)]), i, (c, C2))]))
        case EChoice(br), MLabel(_, l) if sign is Sign.OUT:
            B = branch(br, l)
            if B is not None:
                yield Spec(amb, _with(others, k, [Interface(put([(a, B)]), i, (c, C2))]))
        case Tensor(), MChan() if sign is Sign.IN:
            b = e.binders[0]
            B, A2 = _unpack_chan(A, a, b)
            yield Spec(amb, _with(others, k, [Interface(put([(b, B), (a, A2)]), i, (c, C2))]))
        case Lolly(), MChan() if sign is Sign.OUT:
            b = e.binders[0]
            B, A2 = _unpack_chan(A, a, b)
            for u1, u2 in _splits(list(u)):
                for i1, i2 in _splits(list(i)):
                    yield Spec(amb, _with(others, k, [Interface(u1, i1, (b, B)),
                                                      Interface(u2 + ((a, A2),), i2, (c, C2))]))


def _internal_steps(s, k, g, e, o):
    a = e.carrier
    A = ctx_lookup(g.internal, a)
    if e.sign is not Sign.SYNC:
        return
    rest = _rest(s, k, o)
    if rest is None:
        return
    amb, others = rest
    u = reduce_ctx(g.used, o)
    i = reduce_ctx(ctx_remove(g.internal, a), o)
    c, C = g.provided
    C2 = reduce_type(C, o)
    if i is None or u is None or C2 is None:
        return
    pos = ctx_names(g.internal).index(a)

    def put(new):
        return i[:pos] + tuple(new) + i[pos:]

    match A, e.msg:
        case One(), MClose():
            yield Spec(amb, _with(others, k, [Interface(u, put([]), (c, C2))]))
        case (IChoice(br) | EChoice(br)), MLabel(_, l):
            B = branch(br, l)
            if B is not None:
                yield Spec(amb, _with(others, k, [Interface(u, put([(a, B)]), (c, C2))]))
        case (Tensor() | Lolly()), MChan():
            b = e.binders[0]
            B, A2 = _unpack_chan(A, a, b)
            yield Spec(amb, _with(others, k, [Interface(u, put([(b, B), (a, A2)]), (c, C2))]))


def candidate_heads(s: Spec) -> Iterator[Elem]:
    """Every element some step out of s could emit, with fresh binders."""
    def heads(a, A, signs):
        match A:
            case One():
                yield Elem(signs[0], MClose(a))
            case IChoice(br):
                for l, _ in br:
                    yield Elem(signs[1], MLabel(a, l))
            case EChoice(br):
                for l, _ in br:
                    yield Elem(signs[2], MLabel(a, l))
            case Tensor():
                yield Elem(signs[3], MChan(a), (fresh(A.x.display),))
            case Lolly():
                yield Elem(signs[4], MChan(a), (fresh(A.x.display),))

    O, I, S, C = Sign.OUT, Sign.IN, Sign.SYNC, Sign.CONSTR
    for a, A in s.ambient:
        yield from heads(a, A, (C, C, C, C, C))
    for g in s.interfaces:
        a, A = g.provided
        yield from heads(a, A, (O, O, I, O, I))
        for a, A in g.used:
            yield from heads(a, A, (I, I, O, I, O))
        for a, A in g.internal:
            yield from heads(a, A, (S, S, S, S, S))


def spec_member(t, s: Spec, explain: bool = False):
    """Is t in the semantics of s?  With explain=True, returns a pair
    (verdict, (index, state)) giving the deepest point the search reached."""
    t = open_trace(t)
    memo = {}
    deepest = [(-1, s)]

    def go(i, st):
        key = (i, st)
        got = memo.get(key)
        if got is not None:
            return got
        if i > deepest[0][0]:
            deepest[0] = (i, st)
        if i == len(t):
            res = not st.interfaces
        else:
            res = any(go(i + 1, nxt) for nxt in successors(st, t[i]))
        memo[key] = res
        return res

    ok = go(0, s)
    if explain:
        return ok, deepest[0]
    return ok


def spec_enumerate(s: Spec, limit: Optional[int] = 10000) -> frozenset:
    """The whole semantics of s.  Raises ResourceLimit beyond limit traces."""
    memo = {}

    def go(st):
        got = memo.get(st)
        if got is not None:
            return got
        out = set()
        if not st.interfaces:
            out.add(())
        size = spec_size(st)
        for e in candidate_heads(st):
            for nxt in successors(st, e):
                assert spec_size(nxt) < size, "step did not shrink the specification"
                for t in go(nxt):
                    out.add(canon((e,) + t))
                    if limit is not None and len(out) > limit:
                        raise ResourceLimit(f"specification has more than {limit} traces")
        res = frozenset(out)
        memo[st] = res
        return res

    return go(s)
