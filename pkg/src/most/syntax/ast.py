"""Abstract syntax of session types and processes, plus the generic
operations on them: free channels, capture-avoiding renaming,
alpha-canonical forms and a few structural measures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..names import Name, refresh

# session types


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class IChoice:
    branches: tuple  # ((label, type), ...) sorted by label


@dataclass(frozen=True)
class EChoice:
    branches: tuple


@dataclass(frozen=True)
class Tensor:
    """(x:X) * (y:Y).  x is bound in Y, y is bound in X."""

    x: Name
    xt: "SessionType"
    y: Name
    yt: "SessionType"


@dataclass(frozen=True)
class Lolly:
    """(x:X) -o (y:Y), same binding shape as Tensor."""

    x: Name
    xt: "SessionType"
    y: Name
    yt: "SessionType"


@dataclass(frozen=True)
class CaseClose:
    chan: Name
    body: "SessionType"


@dataclass(frozen=True)
class CaseLabel:
    chan: Name
    branches: tuple


@dataclass(frozen=True)
class CaseChan:
    chan: Name
    bound: Name
    body: "SessionType"


SessionType = Union[One, IChoice, EChoice, Tensor, Lolly, CaseClose, CaseLabel, CaseChan]
Choice = (IChoice, EChoice)
Channelled = (Tensor, Lolly)
CaseType = (CaseClose, CaseLabel, CaseChan)


def branches(items) -> tuple:
    return tuple(sorted(items, key=lambda kv: kv[0]))


def branch(br: tuple, label: str):
    for l, v in br:
        if l == label:
            return v
    return None


def labels(br: tuple) -> list:
    return [l for l, _ in br]


def is_whnf(a: SessionType) -> bool:
    return not isinstance(a, CaseType)


# processes

_pos = dict(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Close:
    chan: Name
    pos: Optional[tuple] = field(**_pos)


@dataclass(frozen=True)
class Wait:
    chan: Name
    cont: "Process"
    pos: Optional[tuple] = field(**_pos)


@dataclass(frozen=True)
class SendLabel:
    chan: Name
    label: str
    cont: "Process"
    pos: Optional[tuple] = field(**_pos)


@dataclass(frozen=True)
class RecvLabel:
    chan: Name
    branches: tuple
    pos: Optional[tuple] = field(**_pos)


@dataclass(frozen=True)
class SendChan:
    """send chan (bound -> left); right.  bound is scoped over left only."""

    chan: Name
    bound: Name
    left: "Process"
    right: "Process"
    pos: Optional[tuple] = field(**_pos)


@dataclass(frozen=True)
class RecvChan:
    bound: Name
    chan: Name
    cont: "Process"
    pos: Optional[tuple] = field(**_pos)


@dataclass(frozen=True)
class Par:
    chan: Name
    left: "Process"
    right: "Process"
    pos: Optional[tuple] = field(**_pos)


@dataclass(frozen=True)
class New:
    bindings: tuple  # ((name, type), ...)
    body: "Process"
    pos: Optional[tuple] = field(**_pos)


Process = Union[Close, Wait, SendLabel, RecvLabel, SendChan, RecvChan, Par, New]


def princ(p: Process) -> Optional[Name]:
    """The channel a weak-head action of p talks on."""
    if isinstance(p, (Par, New)):
        return None
    return p.chan


# free channels


def free_channels(x) -> frozenset:
    match x:
        case One():
            return frozenset()
        case IChoice(br) | EChoice(br):
            return frozenset().union(*(free_channels(v) for _, v in br))
        case Tensor(bx, X, by, Y) | Lolly(bx, X, by, Y):
            return (free_channels(X) - {by}) | (free_channels(Y) - {bx})
        case CaseClose(c, B):
            return free_channels(B) | {c}
        case CaseLabel(c, br):
            return frozenset({c}).union(*(free_channels(v) for _, v in br))
        case CaseChan(c, z, B):
            return (free_channels(B) - {z}) | {c}
        case Close(a):
            return frozenset({a})
        case Wait(a, P):
            return free_channels(P) | {a}
        case SendLabel(a, _, P):
            return free_channels(P) | {a}
        case RecvLabel(a, br):
            return frozenset({a}).union(*(free_channels(v) for _, v in br))
        case SendChan(a, b, P, Q):
            return (free_channels(P) - {b}) | free_channels(Q) | {a}
        case RecvChan(b, a, P):
            return (free_channels(P) - {b}) | {a}
        case Par(_, P, Q):
            return free_channels(P) | free_channels(Q)
        case New(bs, P):
            return free_channels(P) - {n for n, _ in bs}
    raise TypeError(f"not a type or process: {x!r}")


# renaming


def _under(z: Name, body, m: dict, rn):
    """Rename body under binder z.  Returns the (possibly refreshed) binder."""
    m2 = {k: v for k, v in m.items() if k != z}
    if not m2:
        return z, body
    if z in m2.values():
        z2 = refresh(z)
        m2[z] = z2
        return z2, rn(body, m2)
    return z, rn(body, m2)


def rename_type(a: SessionType, m: dict) -> SessionType:
    """Simultaneous capture-avoiding substitution of names for names."""
    if not m:
        return a
    match a:
        case One():
            return a
        case IChoice(br):
            return IChoice(tuple((l, rename_type(v, m)) for l, v in br))
        case EChoice(br):
            return EChoice(tuple((l, rename_type(v, m)) for l, v in br))
        case Tensor(x, X, y, Y) | Lolly(x, X, y, Y):
            # x and y bind in opposite components
            y2, X2 = _under(y, X, m, rename_type)
            x2, Y2 = _under(x, Y, m, rename_type)
            return type(a)(x2, X2, y2, Y2)
        case CaseClose(c, B):
            return CaseClose(m.get(c, c), rename_type(B, m))
        case CaseLabel(c, br):
            return CaseLabel(m.get(c, c), tuple((l, rename_type(v, m)) for l, v in br))
        case CaseChan(c, z, B):
            z2, B2 = _under(z, B, m, rename_type)
            return CaseChan(m.get(c, c), z2, B2)
    raise TypeError(f"not a type: {a!r}")


def subst_type(a: SessionType, new: Name, old: Name) -> SessionType:
    """a[new/old]"""
    if new == old:
        return a
    return rename_type(a, {old: new})


def refresh_binders(a: SessionType) -> SessionType:
    """Give every binder in a a brand new name."""
    match a:
        case One():
            return a
        case IChoice(br):
            return IChoice(tuple((l, refresh_binders(v)) for l, v in br))
        case EChoice(br):
            return EChoice(tuple((l, refresh_binders(v)) for l, v in br))
        case Tensor(x, X, y, Y) | Lolly(x, X, y, Y):
            x2, y2 = refresh(x), refresh(y)
            return type(a)(x2, refresh_binders(rename_type(X, {y: y2})), y2,
                           refresh_binders(rename_type(Y, {x: x2})))
        case CaseClose(c, B):
            return CaseClose(c, refresh_binders(B))
        case CaseLabel(c, br):
            return CaseLabel(c, tuple((l, refresh_binders(v)) for l, v in br))
        case CaseChan(c, z, B):
            z2 = refresh(z)
            return CaseChan(c, z2, refresh_binders(rename_type(B, {z: z2})))
    raise TypeError(f"not a type: {a!r}")


# alpha-canonical forms


class _Canon:
    def __init__(self):
        self.k = 0

    def bind(self, z: Name) -> Name:
        self.k += 1
        return Name(-self.k, z.display)

    def ty(self, a, env):
        g = lambda v: self.ty(v, env)
        match a:
            case One():
                return a
            case IChoice(br):
                return IChoice(tuple((l, g(v)) for l, v in br))
            case EChoice(br):
                return EChoice(tuple((l, g(v)) for l, v in br))
            case Tensor(x, X, y, Y) | Lolly(x, X, y, Y):
                x2, y2 = self.bind(x), self.bind(y)
                X2 = self.ty(X, {**env, y: y2})
                Y2 = self.ty(Y, {**env, x: x2})
                return type(a)(x2, X2, y2, Y2)
            case CaseClose(c, B):
                return CaseClose(env.get(c, c), g(B))
            case CaseLabel(c, br):
                return CaseLabel(env.get(c, c), tuple((l, g(v)) for l, v in br))
            case CaseChan(c, z, B):
                z2 = self.bind(z)
                return CaseChan(env.get(c, c), z2, self.ty(B, {**env, z: z2}))
        raise TypeError(f"not a type: {a!r}")

    def proc(self, p, env):
        r = lambda n: env.get(n, n)
        g = lambda q: self.proc(q, env)
        match p:
            case Close(a):
                return Close(r(a))
            case Wait(a, P):
                return Wait(r(a), g(P))
            case SendLabel(a, k, P):
                return SendLabel(r(a), k, g(P))
            case RecvLabel(a, br):
                return RecvLabel(r(a), tuple((l, g(v)) for l, v in br))
            case SendChan(a, b, P, Q):
                b2 = self.bind(b)
                return SendChan(r(a), b2, self.proc(P, {**env, b: b2}), g(Q))
            case RecvChan(b, a, P):
                b2 = self.bind(b)
                return RecvChan(b2, r(a), self.proc(P, {**env, b: b2}))
            case Par(a, P, Q):
                return Par(r(a), g(P), g(Q))
            case New(bs, P):
                env2 = dict(env)
                out = []
                for n, _ in bs:
                    env2[n] = self.bind(n)
                for n, t in bs:
                    out.append((env2[n], self.ty(t, env2)))
                return New(tuple(out), self.proc(P, env2))
        raise TypeError(f"not a process: {p!r}")


def canonical_type(a: SessionType) -> SessionType:
    return _Canon().ty(a, {})


def canonical_process(p: Process) -> Process:
    return _Canon().proc(p, {})


def alpha_eq(x, y) -> bool:
    if isinstance(x, tuple) or isinstance(y, tuple):
        from ..trace import canon
        return canon(x) == canon(y)
    if isinstance(x, (One, IChoice, EChoice, Tensor, Lolly, CaseClose, CaseLabel, CaseChan)):
        return canonical_type(x) == canonical_type(y)
    return canonical_process(x) == canonical_process(y)


def type_size(a: SessionType) -> int:
    """Number of type constructors."""
    match a:
        case One():
            return 1
        case IChoice(br) | EChoice(br) | CaseLabel(_, br):
            return 1 + sum(type_size(v) for _, v in br)
        case Tensor(_, X, _, Y) | Lolly(_, X, _, Y):
            return 1 + type_size(X) + type_size(Y)
        case CaseClose(_, B) | CaseChan(_, _, B):
            return 1 + type_size(B)
    raise TypeError(f"not a type: {a!r}")


# programs


@dataclass(frozen=True)
class Declaration:
    name: str
    ambient: tuple  # Pi
    internal: tuple  # Iota
    used: tuple  # Delta
    provided: tuple  # (Name, SessionType)
    body: Process
    pos: Optional[tuple] = field(**_pos)

    def interface_names(self) -> list:
        return ([n for n, _ in self.ambient] + [n for n, _ in self.internal]
                + [n for n, _ in self.used] + [self.provided[0]])


@dataclass(frozen=True)
class Program:
    declarations: tuple

    def get(self, name: str) -> Declaration:
        for d in self.declarations:
            if d.name == name:
                return d
        raise KeyError(name)

    def names(self) -> list:
        return [d.name for d in self.declarations]


def canonical_declaration(d: Declaration):
    """Interface names numbered by position, binders canonical."""
    env = {n: Name(-(10**6 + k), n.display) for k, n in enumerate(d.interface_names())}

    def ctx(c):
        return tuple((env[n], _Canon().ty(a, env)) for n, a in c)

    c, C = d.provided
    return (d.name, ctx(d.ambient), ctx(d.internal), ctx(d.used),
            (env[c], _Canon().ty(C, env)), _Canon().proc(d.body, env))


def declarations_alpha_eq(d1: Declaration, d2: Declaration) -> bool:
    return canonical_declaration(d1) == canonical_declaration(d2)
