"""Trace denotation of processes."""

from __future__ import annotations

from typing import Optional

from .syntax.ast import Close, New, Par, RecvChan, RecvLabel, SendChan, SendLabel, Wait
from .trace import (Elem, MChan, MClose, MLabel, ResourceLimit, Sign, delete_names_set,
                    interleave_sets, prefix)


def denote(p, limit: Optional[int] = None) -> frozenset:
    out = _denote(p, limit)
    return out


def _denote(p, limit):
    match p:
        case Close(a):
            return frozenset({(Elem(Sign.OUT, MClose(a)),)})
        case Wait(a, P):
            return prefix(Elem(Sign.IN, MClose(a)), _denote(P, limit))
        case SendLabel(a, k, P):
            return prefix(Elem(Sign.OUT, MLabel(a, k)), _denote(P, limit))
        case RecvLabel(a, br):
            out = set()
            for l, P in br:
                out |= prefix(Elem(Sign.IN, MLabel(a, l)), _denote(P, limit))
            return _cap(frozenset(out), limit)
        case SendChan(a, b, P, Q):
            body = interleave_sets(_denote(P, limit), _denote(Q, limit), limit)
            return prefix(Elem(Sign.OUT, MChan(a), (b,)), body)
        case RecvChan(b, a, P):
            return prefix(Elem(Sign.IN, MChan(a), (b,)), _denote(P, limit))
        case Par(_, P, Q):
            return interleave_sets(_denote(P, limit), _denote(Q, limit), limit)
        case New(bs, P):
            return delete_names_set(_denote(P, limit), [n for n, _ in bs])
    raise TypeError(f"not a process: {p!r}")


def _cap(T, limit):
    if limit is not None and len(T) > limit:
        raise ResourceLimit(f"denotation has more than {limit} traces")
    return T
