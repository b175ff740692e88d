"""Shared test helpers: corpus loading, trace literals, and a naive
synchronous product used as an independent oracle."""

from pathlib import Path

from most.syntax import parse_file
from most.trace import Elem, MChan, Sign, canon, parse_trace

CORPUS = Path(__file__).parent / "corpus"


def load(file):
    return parse_file(CORPUS / file)


def decl(file, name):
    return load(file).get(name)


def names_of(d):
    return {n.display: n for n in d.interface_names()}


def traces(d, *texts):
    """Trace literals over the interface channels of d."""
    nm = names_of(d)
    return frozenset(parse_trace(t, nm) for t in texts)


def naive_product(t1, t2):
    """Synchronous product of two constraint-free traces without channel
    transmission: channels used by both sides must be matched O against I
    in lock step; everything else shuffles freely."""
    assert all(e.sign is not Sign.CONSTR and not isinstance(e.msg, MChan) for e in t1 + t2)
    shared = {e.carrier for e in t1} & {e.carrier for e in t2}
    out = set()

    def go(a, b, acc):
        if not a and not b:
            out.add(canon(tuple(acc)))
            return
        if a and a[0].carrier not in shared:
            go(a[1:], b, acc + [a[0]])
        if b and b[0].carrier not in shared:
            go(a, b[1:], acc + [b[0]])
        if a and b and a[0].carrier in shared and a[0].msg == b[0].msg \
                and {a[0].sign, b[0].sign} == {Sign.OUT, Sign.IN}:
            go(a[1:], b[1:], acc + [Elem(Sign.SYNC, a[0].msg)])

    go(tuple(t1), tuple(t2), [])
    return frozenset(out)


def find(node, rule, pred=lambda n: True):
    return [n for n in node.walk() if n.rule == rule and pred(n)]
