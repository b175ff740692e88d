"""Printing back to surface syntax.  Output parses to an alpha-equivalent
program."""

from __future__ import annotations

from .ast import (CaseChan, CaseClose, CaseLabel, Close, Declaration, EChoice, IChoice, Lolly,
                  New, One, Par, Program, RecvChan, RecvLabel, SendChan, SendLabel, Tensor, Wait)


class Names:
    """Printable, collision-free strings for names."""

    def __init__(self):
        self.shown = {}
        self.used = set()

    def __call__(self, n) -> str:
        s = self.shown.get(n)
        if s is None:
            base = n.display if n.display not in ("_",) else "x"
            s, k = base, 1
            while s in self.used or s in _KEYWORDS:
                k += 1
                s = f"{base}{k}"
            self.shown[n] = s
            self.used.add(s)
        return s


_KEYWORDS = {"close", "wait", "case", "send", "recv", "new", "in", "type", "proc", "chan", "CASE"}


def pretty_type(a, nm: Names = None) -> str:
    nm = nm or Names()
    p = lambda v: pretty_type(v, nm)
    match a:
        case One():
            return "1"
        case IChoice(br):
            return "+{" + ", ".join(f"{l}: {p(v)}" for l, v in br) + "}"
        case EChoice(br):
            return "&{" + ", ".join(f"{l}: {p(v)}" for l, v in br) + "}"
        case Tensor(x, X, y, Y) | Lolly(x, X, y, Y):
            op = "*" if isinstance(a, Tensor) else "-o"
            return f"({nm(x)}: {p(X)}) {op} ({nm(y)}: {p(Y)})"
        case CaseClose(c, B):
            return f"CASE {nm(c)} {{close => {p(B)}}}"
        case CaseLabel(c, br):
            return f"CASE {nm(c)} {{" + " | ".join(f"{l} => {p(v)}" for l, v in br) + "}"
        case CaseChan(c, z, B):
            return f"CASE {nm(c)} {{chan {nm(z)} => {p(B)}}}"
    raise TypeError(f"not a type: {a!r}")


def pretty_process(q, nm: Names = None) -> str:
    nm = nm or Names()
    p = lambda v: pretty_process(v, nm)
    match q:
        case Close(a):
            return f"close {nm(a)}"
        case Wait(a, P):
            return f"wait {nm(a)}; {p(P)}"
        case SendLabel(a, k, P):
            return f"{nm(a)}.{k}; {p(P)}"
        case RecvLabel(a, br):
            return f"case {nm(a)} {{" + " | ".join(f"{l} => {p(v)}" for l, v in br) + "}"
        case SendChan(a, b, P, Q):
            return f"send {nm(a)} ({nm(b)} -> {p(P)}); {p(Q)}"
        case RecvChan(b, a, P):
            return f"recv {nm(b)} <- {nm(a)}; {p(P)}"
        case Par(a, P, Q):
            return f"({p(P)}) |[{nm(a)}]| ({p(Q)})"
        case New(bs, P):
            inner = ", ".join(f"{nm(n)}: {pretty_type(t, nm)}" for n, t in bs)
            return f"new ({inner}) in {p(P)}"
    raise TypeError(f"not a process: {q!r}")


def pretty_declaration(d: Declaration) -> str:
    nm = Names()
    for n in d.interface_names():
        nm(n)

    def ctx(c):
        return ", ".join(f"{nm(n)}: {pretty_type(a, nm)}" for n, a in c)

    head = f"proc {d.name} "
    if d.ambient:
        head += f"[{ctx(d.ambient)}] "
    head += f"({ctx(d.used)}) "
    if d.internal:
        head += f"{{{ctx(d.internal)}}} "
    c, C = d.provided
    return head + f"|- {nm(c)}: {pretty_type(C, nm)} =\n  {pretty_process(d.body, nm)}\n"


def pretty_program(p: Program) -> str:
    return "\n".join(pretty_declaration(d) for d in p.declarations)
