"""The two-phase typechecker.

``uniform`` handles New, Par and the choice of focus.  ``focus_right``
and ``focus_left`` match the process against the weak-head form of the
focussed type, first reducing CASE types that observe ambient channels.
Every rule returns the set of constraint traces it generates together
with a derivation node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .denote import denote
from .names import Name, fresh
from .syntax.ast import (CaseChan, CaseClose, CaseLabel, CaseType, Close, Declaration,
                         EChoice, IChoice, Lolly, New, One, Par, RecvChan, RecvLabel,
                         SendChan, SendLabel, Tensor, Wait, branch, free_channels, is_whnf,
                         labels, princ, subst_type)
from .syntax.pretty import Names, pretty_process, pretty_type
from .trace import (Elem, MChan, MClose, MLabel, OChan, OClose, OLabel, ResourceLimit, Sign,
                    delete_names_set, erase_constraints, erase_set, format_trace, interleave,
                    interleave_sets, canon, prefix, safely_constrained, sorted_traces)
from .typesem import ctx_lookup, ctx_names, ctx_remove, reduce_type


class CheckError(Exception):
    """A typing failure.  ``kind`` is one of LeftoverChannels,
    MissingChannels, FocusStuck, LabelNotPermitted,
    ConstraintIncompatible, SplitFailure, ShapeMismatch, or
    UncoveredBehaviour (strict mode only)."""

    def __init__(self, kind, message, *, pos=None, rule=None, snapshot=None, witnesses=()):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.pos = pos
        self.rule = rule
        self.snapshot = snapshot
        self.witnesses = tuple(witnesses)

    def __str__(self):
        where = f"{self.pos[0]}:{self.pos[1]}: " if self.pos else ""
        return f"{where}{self.kind}: {self.message}"

    def to_json(self):
        return {
            "kind": self.kind,
            "message": self.message,
            "position": list(self.pos) if self.pos else None,
            "rule": self.rule,
            "judgment": self.snapshot,
            "witnesses": [format_trace(t) for t in self.witnesses],
        }


@dataclass(frozen=True)
class Judgment:
    ambient: tuple
    internal: tuple
    used: tuple
    provided: tuple

    def entries(self):
        return list(self.ambient) + list(self.internal) + list(self.used) + [self.provided]


@dataclass
class Node:
    rule: str
    judgment: Judgment
    process: object
    traces: frozenset
    children: list = field(default_factory=list)
    focus: Optional[Name] = None

    def snapshot(self) -> str:
        return snapshot(self.judgment, self.process, self.focus)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def to_json(self):
        return {
            "rule": self.rule,
            "judgment": self.snapshot(),
            "traces": [format_trace(t) for t in sorted_traces(self.traces)],
            "premises": [c.to_json() for c in self.children],
        }

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f"{pad}{self.rule}: {self.snapshot()}"]
        for t in sorted_traces(self.traces):
            lines.append(f"{pad}  | {format_trace(t)}")
        for c in self.children:
            lines.append(c.render(indent + 1))
        return "\n".join(lines)


@dataclass
class CheckResult:
    traces: frozenset
    derivation: Node
    dead_branches: tuple = ()  # ((position, channel, label), ...)


def snapshot(j: Judgment, p=None, focus=None, width: int = 70) -> str:
    nm = Names()

    def ctx(c):
        parts = []
        for n, a in c:
            s = f"{nm(n)}:{pretty_type(a, nm)}"
            parts.append(f"[{s}]" if n == focus else s)
        return ", ".join(parts) or "·"

    c, C = j.provided
    prov = f"{nm(c)}:{pretty_type(C, nm)}"
    if c == focus:
        prov = f"[{prov}]"
    proc = pretty_process(p, nm) if p is not None else "?"
    if len(proc) > width:
        proc = proc[: width - 3] + "..."
    return f"{ctx(j.ambient)} ; {ctx(j.internal)} |- {proc} :: {ctx(j.used)} |- {prov}"


def _ctx_reduce(ctx, o):
    """(reduced ctx, None) or (None, name whose type forbids o)."""
    out = []
    for n, a in ctx:
        r = reduce_type(a, o)
        if r is None:
            return None, n
        out.append((n, r))
    return tuple(out), None


def _show_obs(o) -> str:
    match o:
        case OClose(a):
            return f"close {a}"
        case OLabel(a, l):
            return f"{a}.{l}"
        case OChan(a, b):
            return f"chan {a} [{b}]"


def par_compatible(T1, T2):
    """None if every pair of traces composes the same with and without
    constraints, else the first violating pair."""
    e2 = [(t2, erase_constraints(t2)) for t2 in sorted_traces(T2)]
    for t1 in sorted_traces(T1):
        u1 = erase_constraints(t1)
        for t2, u2 in e2:
            lhs = interleave(u1, u2)
            rhs = erase_set(interleave(t1, t2))
            if lhs != rhs:
                return t1, t2
    return None


def _split(entries, left_names, right_names, what, err):
    left, right = [], []
    for n, a in entries:
        if n in left_names:
            left.append((n, a))
        elif n in right_names:
            right.append((n, a))
        else:
            err("LeftoverChannels", f"{what}: channel {n} is used by neither side")
    return tuple(left), tuple(right)


class Checker:
    def __init__(self, limit: Optional[int] = None):
        self.limit = limit

    # diagnostics

    def fail(self, kind, message, j, p, rule, focus=None, witnesses=()):
        raise CheckError(kind, message, pos=getattr(p, "pos", None), rule=rule,
                         snapshot=snapshot(j, p, focus), witnesses=witnesses)

    def _reduce(self, j: Judgment, o, p, rule, drop=(), focus=None, keep=None):
        """Reduce every entry of j by o, except names in ``drop`` (removed)
        and ``keep`` (left as is)."""
        def part(ctx):
            ctx = tuple((n, a) for n, a in ctx if n not in drop)
            out, bad = [], None
            for n, a in ctx:
                if keep is not None and n == keep:
                    out.append((n, a))
                    continue
                r = reduce_type(a, o)
                if r is None:
                    self.fail("ShapeMismatch",
                              f"the type of {n} does not permit the observation {_show_obs(o)}",
                              j, p, rule, focus)
                out.append((n, r))
            return tuple(out)

        amb = part(j.ambient)
        internal = part(j.internal)
        used = part(j.used)
        c, C = j.provided
        if c == keep:
            prov = (c, C)
        else:
            prov = part(((c, C),))[0]
        return Judgment(amb, internal, used, prov)

    def _interleave(self, T1, T2, j, p, rule, focus=None):
        w = par_compatible(T1, T2)
        if w is not None:
            self.fail("ConstraintIncompatible",
                      "the two sides impose constraints that rule out some of their interleavings",
                      j, p, rule, focus, witnesses=w)
        return interleave_sets(T1, T2, self.limit)

    # phase one

    def uniform(self, j: Judgment, p):
        if isinstance(p, New):
            names = [n for n, _ in p.bindings]
            j2 = Judgment(j.ambient, j.internal + tuple(p.bindings), j.used, j.provided)
            T, node, dead = self.uniform(j2, p.body)
            T = delete_names_set(T, names)
            return T, Node("New", j, p, T, [node]), dead
        if isinstance(p, Par):
            return self.par(j, p)
        a = princ(p)
        c, _ = j.provided
        if a == c:
            T, node, dead = self.focus_right(j, p)
            return T, Node("STFoc-R", j, p, T, [node]), dead
        if ctx_lookup(j.used, a) is not None:
            T, node, dead = self.focus_left(j, a, p)
            return T, Node("STFoc-L", j, p, T, [node], focus=None), dead
        where = "ambient" if ctx_lookup(j.ambient, a) is not None else (
            "internal" if ctx_lookup(j.internal, a) is not None else "unknown")
        self.fail("MissingChannels",
                  f"the process communicates on {where} channel {a}, which is neither provided nor used here",
                  j, p, "STFoc")

    def par(self, j: Judgment, p: Par):
        a = p.chan
        A = ctx_lookup(j.internal, a)
        if A is None:
            self.fail("SplitFailure", f"cut channel {a} is not an internal channel", j, p, "Par")
        fl, fr = free_channels(p.left), free_channels(p.right)
        c, C = j.provided
        if c in fl or c not in fr:
            self.fail("SplitFailure",
                      f"the right side of a composition must provide {c}", j, p, "Par")
        err = lambda kind, msg: self.fail(kind, msg, j, p, "Par")
        d1, d2 = _split(j.used, fl, fr, "composition", err)
        i1, i2 = _split(ctx_remove(j.internal, a), fl, fr, "composition", err)
        for n in (fl | fr) - set(ctx_names(j.used) + ctx_names(j.internal) + [c]):
            self.fail("SplitFailure", f"channel {n} is not part of this interface", j, p, "Par")
        j1 = Judgment(j.ambient + d2 + i2 + ((c, C),), i1, d1, (a, A))
        j2 = Judgment(j.ambient + d1 + i1, i2, d2 + ((a, A),), (c, C))
        T1, n1, x1 = self.uniform(j1, p.left)
        T2, n2, x2 = self.uniform(j2, p.right)
        T = self._interleave(T1, T2, j, p, "Par")
        return T, Node("Par", j, p, T, [n1, n2]), x1 + x2

    # phase two

    def focus_right(self, j: Judgment, p):
        c, C = j.provided
        if isinstance(C, CaseType):
            return self.reduce_focus(j, p, c, right=True)
        nm = lambda: None
        match C:
            case One():
                rule = "RTu-R"
                if not isinstance(p, Close):
                    self._mismatch(j, p, rule, c, "close", C)
                left = ctx_names(j.used) + ctx_names(j.internal)
                if left:
                    self.fail("LeftoverChannels",
                              f"closing {c} would discard {', '.join(str(n) for n in left)}",
                              j, p, rule, c)
                T = frozenset({(Elem(Sign.OUT, MClose(c)),)})
                return T, Node(rule, j, p, T, focus=c), ()
            case IChoice(br):
                rule = "RTplus-R"
                if not isinstance(p, SendLabel):
                    self._mismatch(j, p, rule, c, "a label send", C)
                B = branch(br, p.label)
                if B is None:
                    self.fail("LabelNotPermitted",
                              f"label {p.label} is not offered on {c} (allowed: {', '.join(labels(br))})",
                              j, p, rule, c)
                j2 = self._reduce(j, OLabel(c, p.label), p, rule, keep=c, focus=c)
                j2 = Judgment(j2.ambient, j2.internal, j2.used, (c, B))
                T, n, dead = self.uniform(j2, p.cont)
                T = prefix(Elem(Sign.OUT, MLabel(c, p.label)), T)
                return T, Node(rule, j, p, T, [n], c), dead
            case EChoice(br):
                rule = "RTamp-R"
                if not isinstance(p, RecvLabel):
                    self._mismatch(j, p, rule, c, "a case on " + str(c), C)
                return self._branches(j, p, rule, c, br, Sign.IN, right=True)
            case Tensor():
                rule = "RTot-R"
                if not isinstance(p, SendChan):
                    self._mismatch(j, p, rule, c, "a channel send", C)
                b = p.bound
                o = OChan(c, b)
                B, A2 = _unpack(C, c, b)
                j2 = self._reduce(j, o, p, rule, keep=c, focus=c)
                fl = free_channels(p.left) - {b}
                fr = free_channels(p.right)
                err = lambda kind, msg: self.fail(kind, msg, j, p, rule, c)
                d1, d2 = _split(j2.used, fl, fr, "channel send", err)
                i1, i2 = _split(j2.internal, fl, fr, "channel send", err)
                jl = Judgment(j2.ambient + d2 + i2 + ((c, A2),), i1, d1, (b, B))
                jr = Judgment(j2.ambient + d1 + i1 + ((b, B),), i2, d2, (c, A2))
                T1, n1, x1 = self.uniform(jl, p.left)
                T2, n2, x2 = self.uniform(jr, p.right)
                T = self._interleave(T1, T2, j, p, rule, c)
                T = prefix(Elem(Sign.OUT, MChan(c), (b,)), T)
                return T, Node(rule, j, p, T, [n1, n2], c), x1 + x2
            case Lolly():
                rule = "RTlolly-R"
                if not isinstance(p, RecvChan):
                    self._mismatch(j, p, rule, c, "a channel receive", C)
                b = p.bound
                B, A2 = _unpack(C, c, b)
                j2 = self._reduce(j, OChan(c, b), p, rule, keep=c, focus=c)
                j2 = Judgment(j2.ambient, j2.internal, j2.used + ((b, B),), (c, A2))
                T, n, dead = self.uniform(j2, p.cont)
                T = prefix(Elem(Sign.IN, MChan(c), (b,)), T)
                return T, Node(rule, j, p, T, [n], c), dead
        raise TypeError(C)

    def focus_left(self, j: Judgment, a: Name, p):
        A = ctx_lookup(j.used, a)
        if isinstance(A, CaseType):
            return self.reduce_focus(j, p, a, right=False)
        c, C = j.provided
        match A:
            case One():
                rule = "RTu-L"
                if not isinstance(p, Wait):
                    self._mismatch(j, p, rule, a, "wait", A)
                j2 = self._reduce(j, OClose(a), p, rule, drop=(a,), focus=a)
                T, n, dead = self.uniform(j2, p.cont)
                T = prefix(Elem(Sign.IN, MClose(a)), T)
                return T, Node(rule, j, p, T, [n], a), dead
            case IChoice(br):
                rule = "RTplus-L"
                if not isinstance(p, RecvLabel):
                    self._mismatch(j, p, rule, a, "a case on " + str(a), A)
                return self._branches(j, p, rule, a, br, Sign.IN, right=False)
            case EChoice(br):
                rule = "RTamp-L"
                if not isinstance(p, SendLabel):
                    self._mismatch(j, p, rule, a, "a label send", A)
                B = branch(br, p.label)
                if B is None:
                    self.fail("LabelNotPermitted",
                              f"label {p.label} is not accepted on {a} (allowed: {', '.join(labels(br))})",
                              j, p, rule, a)
                j2 = self._reduce(j, OLabel(a, p.label), p, rule, keep=a, focus=a)
                j2 = Judgment(j2.ambient, j2.internal, _replace(j2.used, a, [(a, B)]), j2.provided)
                T, n, dead = self.uniform(j2, p.cont)
                T = prefix(Elem(Sign.OUT, MLabel(a, p.label)), T)
                return T, Node(rule, j, p, T, [n], a), dead
            case Tensor():
                rule = "RTot-L"
                if not isinstance(p, RecvChan):
                    self._mismatch(j, p, rule, a, "a channel receive", A)
                b = p.bound
                B, A2 = _unpack(A, a, b)
                j2 = self._reduce(j, OChan(a, b), p, rule, keep=a, focus=a)
                j2 = Judgment(j2.ambient, j2.internal, _replace(j2.used, a, [(b, B), (a, A2)]),
                              j2.provided)
                T, n, dead = self.uniform(j2, p.cont)
                T = prefix(Elem(Sign.IN, MChan(a), (b,)), T)
                return T, Node(rule, j, p, T, [n], a), dead
            case Lolly():
                rule = "RTlolly-L"
                if not isinstance(p, SendChan):
                    self._mismatch(j, p, rule, a, "a channel send", A)
                b = p.bound
                B, A2 = _unpack(A, a, b)
                j2 = self._reduce(j, OChan(a, b), p, rule, drop=(a,), focus=a)
                c2, C2 = j2.provided
                fl = free_channels(p.left) - {b}
                fr = free_channels(p.right) - {a, c}
                if a in fl or c in fl:
                    self.fail("SplitFailure",
                              f"the provider of {b} may not use {a} or {c}", j, p, rule, a)
                err = lambda kind, msg: self.fail(kind, msg, j, p, rule, a)
                d1, d2 = _split(j2.used, fl, fr, "channel send", err)
                i1, i2 = _split(j2.internal, fl, fr, "channel send", err)
                jl = Judgment(j2.ambient + d2 + i2 + ((a, A2), (c, C2)), i1, d1, (b, B))
                jr = Judgment(j2.ambient + d1 + i1 + ((b, B),), i2, d2 + ((a, A2),), (c, C2))
                T1, n1, x1 = self.uniform(jl, p.left)
                T2, n2, x2 = self.uniform(jr, p.right)
                T = self._interleave(T1, T2, j, p, rule, a)
                T = prefix(Elem(Sign.OUT, MChan(a), (b,)), T)
                return T, Node(rule, j, p, T, [n1, n2], a), x1 + x2
        raise TypeError(A)

    def _branches(self, j, p, rule, a, br, sign, right):
        """Receive a label on a: one premise per label of the type."""
        got = {l for l, _ in p.branches}
        missing = [l for l in labels(br) if l not in got]
        if missing:
            self.fail("ShapeMismatch",
                      f"the case on {a} has no branch for {', '.join(missing)}", j, p, rule, a)
        out, nodes, dead, refused = set(), [], [], []
        for l, B in br:
            # the environment picks the label; one the rest of the
            # specification cannot observe never arrives
            try:
                j2 = self._reduce(j, OLabel(a, l), p, rule, keep=a, focus=a)
            except CheckError as e:
                refused.append(e)
                dead.append((p.pos, str(a), l, False))
                continue
            if right:
                j2 = Judgment(j2.ambient, j2.internal, j2.used, (a, B))
            else:
                j2 = Judgment(j2.ambient, j2.internal, _replace(j2.used, a, [(a, B)]), j2.provided)
            T, n, d = self.uniform(j2, dict(p.branches)[l])
            out |= prefix(Elem(sign, MLabel(a, l)), T)
            nodes.append(n)
            dead.append((p.pos, str(a), l, True))
            dead.extend(d)
        if not nodes:
            raise refused[0]
        for l, _ in p.branches:
            if branch(br, l) is None:
                dead.append((p.pos, str(a), l, False))
        T = frozenset(out)
        return T, Node(rule, j, p, T, nodes, a), tuple(dead)

    def _mismatch(self, j, p, rule, a, wanted, A):
        self.fail("ShapeMismatch",
                  f"{a} has type {pretty_type(A)} so the process should be {wanted}",
                  j, p, rule, a)

    def _continue(self, j, p, f, right):
        if right:
            return self.focus_right(j, p)
        return self.focus_left(j, f, p)

    def reduce_focus(self, j: Judgment, p, f: Name, right: bool):
        """Red-* rules: reduce the focussed CASE type by an ambient observation."""
        side = "R" if right else "L"
        F = j.provided[1] if right else ctx_lookup(j.used, f)
        x = F.chan
        X = ctx_lookup(j.ambient, x)
        tag = {CaseClose: "Tu", CaseLabel: "TLbl", CaseChan: "TChan"}[type(F)]
        rule = f"Red-{side}{tag}"
        if X is None:
            self.fail("FocusStuck",
                      f"the type of {f} waits on {x}, which this process has not yet communicated on",
                      j, p, rule, f)
        if not is_whnf(X):
            self.fail("FocusStuck",
                      f"the type of {f} waits on ambient {x}, whose own type {pretty_type(X)} is not yet determined",
                      j, p, rule, f)
        match F:
            case CaseClose():
                if not isinstance(X, One):
                    self._mismatch(j, p, rule, x, "closed", X)
                j2 = self._reduce(j, OClose(x), p, rule, drop=(x,), focus=f)
                T, n, dead = self._continue(j2, p, f, right)
                T = prefix(Elem(Sign.CONSTR, MClose(x)), T)
                return T, Node(rule, j, p, T, [n], f), dead
            case CaseLabel():
                if not isinstance(X, (IChoice, EChoice)):
                    self._mismatch(j, p, rule, x, "a choice", X)
                out, nodes, dead, errors = set(), [], [], []
                for l, B in X.branches:
                    try:
                        j2 = self._reduce(j, OLabel(x, l), p, rule, keep=x, focus=f)
                        j2 = Judgment(_replace(j2.ambient, x, [(x, B)]), j2.internal, j2.used,
                                      j2.provided)
                        T, n, d = self._continue(j2, p, f, right)
                    except CheckError as e:
                        errors.append(e)
                        continue
                    out |= prefix(Elem(Sign.CONSTR, MLabel(x, l)), T)
                    nodes.append(n)
                    dead.extend(d)
                if not nodes:
                    raise errors[0]
                T = frozenset(out)
                return T, Node(rule, j, p, T, nodes, f), tuple(dead)
            case CaseChan():
                if not isinstance(X, (Tensor, Lolly)):
                    self._mismatch(j, p, rule, x, "a channel transmission", X)
                b = fresh(F.bound.display)
                B, X2 = _unpack(X, x, b)
                j2 = self._reduce(j, OChan(x, b), p, rule, drop=(x,), focus=f)
                j2 = Judgment(j2.ambient + ((x, X2), (b, B)), j2.internal, j2.used, j2.provided)
                T, n, dead = self._continue(j2, p, f, right)
                T = prefix(Elem(Sign.CONSTR, MChan(x), (b,)), T)
                return T, Node(rule, j, p, T, [n], f), dead
        raise TypeError(F)


def _unpack(a, carrier: Name, b: Name):
    return subst_type(a.xt, carrier, a.y), subst_type(a.yt, b, a.x)


def _settle(visits) -> tuple:
    """A branch is dead when no visit to its case took it; the same case
    is visited once per reduced type."""
    taken = {(pos, l) for pos, _, l, live in visits if live}
    dead = [(pos, c, l) for pos, c, l, live in visits if not live and (pos, l) not in taken]
    return tuple(dict.fromkeys(dead))


def _replace(ctx, a, new):
    out = []
    for n, t in ctx:
        if n == a:
            out.extend(new)
        else:
            out.append((n, t))
    return tuple(out)


# entry points


def check_uniform(ambient, internal, p, used, provided, limit=None) -> CheckResult:
    j = Judgment(tuple(ambient), tuple(internal), tuple(used), tuple(provided))
    T, node, dead = Checker(limit).uniform(j, p)
    return CheckResult(T, node, _settle(dead))


def check_focus_right(ambient, internal, p, used, provided, limit=None) -> CheckResult:
    j = Judgment(tuple(ambient), tuple(internal), tuple(used), tuple(provided))
    T, node, dead = Checker(limit).focus_right(j, p)
    return CheckResult(T, node, _settle(dead))


def check_focus_left(ambient, internal, p, used, focus, provided, limit=None) -> CheckResult:
    j = Judgment(tuple(ambient), tuple(internal), tuple(used), tuple(provided))
    T, node, dead = Checker(limit).focus_left(j, focus, p)
    return CheckResult(T, node, _settle(dead))


def check_declaration(d: Declaration, limit=None, strict: bool = False) -> CheckResult:
    """Check d against its declared specification.

    Receive branches for labels the type never permits are accepted and
    reported as dead.  With strict=True a declaration is rejected when
    such a branch carries behaviour that no constraint trace accounts for.
    """
    res = check_uniform(d.ambient, d.internal, d.body, d.used, d.provided, limit)
    if strict and res.dead_branches:
        uncovered = denote(d.body, limit) - erase_set(res.traces)
        if uncovered:
            t = sorted_traces(uncovered)[0]
            raise CheckError("UncoveredBehaviour",
                             "a branch the specification never permits still contributes behaviour",
                             pos=d.pos, rule="strict", witnesses=(t,),
                             snapshot=snapshot(Judgment(d.ambient, d.internal, d.used, d.provided), d.body))
    return res


def check_program(program, limit=None, strict: bool = False) -> dict:
    out = {}
    for d in program.declarations:
        try:
            out[d.name] = check_declaration(d, limit, strict)
        except CheckError as e:
            out[d.name] = e
    return out
