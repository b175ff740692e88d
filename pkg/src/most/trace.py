"""Traces and the operators on them.

A trace is a tuple of ``Elem``.  Binders of a ``chan`` element scope
over the rest of the trace.  Trace sets are frozensets of traces in
canonical form (see ``canon``), which makes set equality coincide with
equality up to renaming of bound names.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Union

from .names import Name, fresh, refresh


class Sign(str, Enum):
    OUT = "O"
    IN = "I"
    SYNC = "S"
    CONSTR = "C"


OBSERVABLE = (Sign.OUT, Sign.IN, Sign.SYNC)


@dataclass(frozen=True)
class MClose:
    carrier: Name


@dataclass(frozen=True)
class MLabel:
    carrier: Name
    label: str


@dataclass(frozen=True)
class MChan:
    carrier: Name


Message = Union[MClose, MLabel, MChan]


@dataclass(frozen=True)
class Elem:
    sign: Sign
    msg: Message
    binders: tuple = ()

    @property
    def carrier(self) -> Name:
        return self.msg.carrier


Trace = tuple  # tuple[Elem, ...]


@dataclass(frozen=True)
class OClose:
    carrier: Name


@dataclass(frozen=True)
class OLabel:
    carrier: Name
    label: str


@dataclass(frozen=True)
class OChan:
    carrier: Name
    name: Name


Observation = Union[OClose, OLabel, OChan]


class ResourceLimit(Exception):
    """Raised when a computation would exceed the caller's --limit."""


def obs_names(o: Observation) -> frozenset:
    if isinstance(o, OChan):
        return frozenset({o.carrier, o.name})
    return frozenset({o.carrier})


def obsc(msg: Message, binders: tuple = ()) -> Optional[Observation]:
    """The observation carried by a message, if it has the right binders."""
    if isinstance(msg, MClose) and not binders:
        return OClose(msg.carrier)
    if isinstance(msg, MLabel) and not binders:
        return OLabel(msg.carrier, msg.label)
    if isinstance(msg, MChan) and len(binders) == 1:
        return OChan(msg.carrier, binders[0])
    return None


def _rename_msg(msg: Message, m: dict) -> Message:
    c = m.get(msg.carrier)
    if c is None:
        return msg
    if isinstance(msg, MLabel):
        return MLabel(c, msg.label)
    return type(msg)(c)


# names and renaming


def free_names(t: Trace) -> frozenset:
    out = set()
    bound = set()
    for e in t:
        if e.carrier not in bound:
            out.add(e.carrier)
        bound.update(e.binders)
    return frozenset(out)


def binders_of(t: Trace) -> set:
    return {b for e in t for b in e.binders}


def rename_trace(t: Trace, m: dict) -> Trace:
    """Capture-avoiding renaming of free names."""
    if not m:
        return t
    m = dict(m)
    targets = set(m.values())
    out = []
    for e in t:
        msg = _rename_msg(e.msg, m)
        bs = e.binders
        if bs:
            nbs = []
            for b in bs:
                m.pop(b, None)
                if b in targets:
                    nb = refresh(b)
                    m[b] = nb
                    nbs.append(nb)
                else:
                    nbs.append(b)
            bs = tuple(nbs)
        out.append(Elem(e.sign, msg, bs))
    return tuple(out)


def open_trace(t: Trace) -> Trace:
    """Every binder replaced by a fresh name."""
    m = {}
    out = []
    for e in t:
        msg = _rename_msg(e.msg, m)
        bs = e.binders
        if bs:
            nbs = tuple(refresh(b) for b in bs)
            m.update(zip(bs, nbs))
            bs = nbs
        out.append(Elem(e.sign, msg, bs))
    return tuple(out)


def canon(t: Trace) -> Trace:
    """Alpha-canonical form: binders become -1, -2, ... in order."""
    m = {}
    k = 0
    out = []
    for e in t:
        msg = _rename_msg(e.msg, m)
        bs = e.binders
        if bs:
            nbs = []
            for b in bs:
                k -= 1
                nb = Name(k, b.display)
                m[b] = nb
                nbs.append(nb)
            bs = tuple(nbs)
        out.append(Elem(e.sign, msg, bs))
    return tuple(out)


def canon_set(ts: Iterable[Trace]) -> frozenset:
    return frozenset(canon(t) for t in ts)


def prefix(e: Elem, traces: Iterable[Trace]) -> frozenset:
    return frozenset(canon((e,) + t) for t in traces)


# the operators


def delete_names(t: Trace, names) -> Trace:
    """t \\ names: drop elements on deleted carriers, and everything
    transmitted by them."""
    gone = set(names)
    if binders_of(t) & gone:
        t = open_trace(t)
    out = []
    for e in t:
        if e.carrier in gone:
            gone.update(e.binders)
        else:
            out.append(e)
    return tuple(out)


def erase_constraints(t: Trace) -> Trace:
    res = tuple(e for e in t if e.sign is not Sign.CONSTR)
    # a name bound by a dropped element must not become a captured free name
    loose = {b for e in t if e.sign is Sign.CONSTR for b in e.binders} & free_names(res)
    if loose:
        res = rename_trace(res, {b: refresh(b) for b in loose})
    return res


def reduce_trace(t: Trace, o: Observation) -> Optional[Trace]:
    """t / o: consume the first constraint on o's carrier, if it matches.

    Elements on other carriers commute past the observation.  Any other
    element on the same carrier makes the result undefined."""
    if binders_of(t) & obs_names(o):
        t = open_trace(t)
    a = o.carrier
    for i, e in enumerate(t):
        if e.carrier != a:
            continue
        if e.sign is not Sign.CONSTR:
            return None
        rest = t[i + 1:]
        match o, e.msg:
            case OClose(), MClose() if not e.binders:
                return t[:i] + rest
            case OLabel(_, l), MLabel(_, k) if l == k and not e.binders:
                return t[:i] + rest
            case OChan(_, b), MChan() if len(e.binders) == 1:
                return t[:i] + rename_trace(rest, {e.binders[0]: b})
        return None
    return t


def _interleave(t1: Trace, t2: Trace, memo: dict) -> frozenset:
    key = (t1, t2)
    got = memo.get(key)
    if got is not None:
        return got
    if not t1:
        res = frozenset({t2})
    elif not t2:
        res = frozenset({t1})
    else:
        e1, e2 = t1[0], t2[0]
        if e1.carrier == e2.carrier:
            res = _sync(e1, t1[1:], e2, t2[1:], memo)
        else:
            res = set()
            o1 = obsc(e1.msg, e1.binders)
            if o1 is not None:
                r2 = reduce_trace(t2, o1)
                if r2 is not None:
                    res.update((e1,) + t for t in _interleave(t1[1:], r2, memo))
            o2 = obsc(e2.msg, e2.binders)
            if o2 is not None:
                r1 = reduce_trace(t1, o2)
                if r1 is not None:
                    res.update((e2,) + t for t in _interleave(r1, t2[1:], memo))
            res = frozenset(res)
    memo[key] = res
    return res


def _sync(e1, r1, e2, r2, memo) -> frozenset:
    if e1.msg != e2.msg or len(e1.binders) != len(e2.binders):
        return frozenset()
    signs = {e1.sign, e2.sign}
    if e2.sign is Sign.CONSTR:
        head = e1
    elif e1.sign is Sign.CONSTR:
        head = e2
    elif signs == {Sign.OUT, Sign.IN}:
        head = Elem(Sign.SYNC, e1.msg, e1.binders)
    else:
        return frozenset()
    # both sides bind the same channel; use one name for it
    if head.binders == e1.binders:
        r2 = rename_trace(r2, dict(zip(e2.binders, e1.binders)))
    else:
        r1 = rename_trace(r1, dict(zip(e1.binders, e2.binders)))
    return frozenset((head,) + t for t in _interleave(r1, r2, memo))


def interleave(t1: Trace, t2: Trace) -> frozenset:
    """All interleavings of two traces, synchronising on shared carriers."""
    res = _interleave(open_trace(t1), open_trace(t2), {})
    return frozenset(canon(t) for t in res)


def interleave_sets(T1: Iterable[Trace], T2: Iterable[Trace], limit: Optional[int] = None) -> frozenset:
    out = set()
    T2 = list(T2)
    for t1 in T1:
        for t2 in T2:
            out |= interleave(t1, t2)
            if limit is not None and len(out) > limit:
                raise ResourceLimit(f"interleaving produced more than {limit} traces")
    return frozenset(out)


def delete_names_set(T: Iterable[Trace], names) -> frozenset:
    return frozenset(canon(delete_names(t, names)) for t in T)


def erase_set(T: Iterable[Trace]) -> frozenset:
    return frozenset(canon(erase_constraints(t)) for t in T)


def safely_constrained(t: Trace) -> bool:
    constrained = {e.carrier for e in t if e.sign is Sign.CONSTR}
    observed = {e.carrier for e in t if e.sign is not Sign.CONSTR}
    return not (constrained & observed)


# printing and parsing


def display_names(t: Trace) -> dict:
    """Unique printable strings for every name in t, in order of appearance."""
    shown = {}
    used = set()
    for e in t:
        for n in (e.carrier,) + tuple(e.binders):
            if n in shown:
                continue
            s = n.display
            k = 1
            while s in used:
                k += 1
                s = f"{n.display}{k}"
            shown[n] = s
            used.add(s)
    return shown


def format_elem(e: Elem, shown: dict) -> str:
    c = shown[e.carrier]
    match e.msg:
        case MClose():
            body = f"close {c}"
        case MLabel(_, l):
            body = f"{c}.{l}"
        case MChan():
            body = f"chan {c}"
    if e.binders:
        body += " [" + ", ".join(shown[b] for b in e.binders) + "]"
    return f"{e.sign.value} {body}"


def format_trace(t: Trace) -> str:
    if not t:
        return "ε"
    shown = display_names(t)
    return " ; ".join(format_elem(e, shown) for e in t)


def sorted_traces(T: Iterable[Trace]) -> list:
    return sorted(T, key=format_trace)


def format_traces(T: Iterable[Trace]) -> str:
    return "\n".join(format_trace(t) for t in sorted_traces(T))


def trace_to_json(t: Trace) -> list:
    shown = display_names(t)
    out = []
    for e in t:
        kind = {MClose: "close", MLabel: "label", MChan: "chan"}[type(e.msg)]
        d = {"sign": e.sign.value, "message": kind, "carrier": shown[e.carrier]}
        if kind == "label":
            d["label"] = e.msg.label
        d["binders"] = [shown[b] for b in e.binders]
        out.append(d)
    return out


def traces_to_json(T: Iterable[Trace]) -> list:
    return [trace_to_json(t) for t in sorted_traces(T)]


def parse_trace(text: str, names: Optional[dict] = None) -> Trace:
    """Read the text form back.  Free names are looked up in (and added
    to) ``names``, keyed by display string."""
    names = {} if names is None else names
    text = text.strip()
    if text in ("", "ε"):
        return ()
    scope = dict(names)
    out = []
    for part in text.split(";"):
        toks = part.replace("[", " [ ").replace("]", " ] ").replace(",", " ").split()
        sign = Sign(toks[0])
        bs = ()
        if "[" in toks:
            i = toks.index("[")
            bnames = toks[i + 1:toks.index("]")]
            toks = toks[:i]
        else:
            bnames = []

        def look(s):
            if s not in scope:
                names[s] = scope[s] = fresh(s)
            return scope[s]

        if toks[1] == "close":
            msg = MClose(look(toks[2]))
        elif toks[1] == "chan":
            msg = MChan(look(toks[2]))
        else:
            c, l = toks[1].split(".", 1)
            msg = MLabel(look(c), l)
        if bnames:
            bs = tuple(fresh(b) for b in bnames)
            for s, b in zip(bnames, bs):
                scope[s] = b
        out.append(Elem(sign, msg, bs))
    return canon(tuple(out))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)
