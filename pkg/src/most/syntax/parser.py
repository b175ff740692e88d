"""Surface syntax to AST.

Parsing is done by lark; the resolver then walks the parse tree, binds
every channel occurrence to a ``Name``, expands type abbreviations and
process instantiations, and enforces the syntactic side conditions.
"""

from __future__ import annotations

from importlib import resources
from typing import Optional

from lark import Lark, Token, Tree
from lark.exceptions import LarkError, UnexpectedCharacters, UnexpectedInput

from ..errors import ParseError, ScopeError, UnknownName, WfError
from ..names import Name, fresh
from .ast import (CaseChan, CaseClose, CaseLabel, Close, Declaration, EChoice, IChoice,
                  Lolly, New, One, Par, Program, RecvChan, RecvLabel, SendChan, SendLabel,
                  Tensor, Wait, branches, free_channels)

_parser = None


def _lark() -> Lark:
    global _parser
    if _parser is None:
        text = resources.files(__package__).joinpath("grammar.lark").read_text(encoding="utf-8")
        _parser = Lark(text, parser="lalr", propagate_positions=True, maybe_placeholders=True)
    return _parser


def _pos(node) -> Optional[tuple]:
    if isinstance(node, Token):
        return (node.line, node.column)
    meta = getattr(node, "meta", None)
    if meta is not None and not meta.empty:
        return (meta.line, meta.column)
    return None


def _kids(tree: Tree, data: str) -> list:
    return [k for k in tree.children if isinstance(k, Tree) and k.data == data]


def _bindings(ctx: Optional[Tree]) -> list:
    """[(name token, type tree)] of a ctx node."""
    if ctx is None:
        return []
    return [(b.children[0], b.children[1]) for b in ctx.children]


class _RawProc:
    def __init__(self, tree: Tree):
        self.tree = tree
        kids = tree.children
        self.name = str(kids[0])
        amb = _kids(tree, "ambient")
        internal = _kids(tree, "internal")
        self.ambient = _bindings(amb[0].children[0]) if amb else []
        self.internal = _bindings(internal[0].children[0]) if internal else []
        rest = [k for k in kids[1:] if not (isinstance(k, Tree) and k.data in ("ambient", "internal"))]
        # rest: ctx-or-None, TURNSTILE, NAME, type, proc
        self.used = _bindings(rest[0])
        self.prov_name, self.prov_type, self.body = rest[2], rest[3], rest[4]

    def all_bindings(self):
        return self.ambient + self.internal + self.used + [(self.prov_name, self.prov_type)]


class Resolver:
    def __init__(self):
        self.types = {}
        self.procs = {}

    # types

    def type(self, t, env: dict, stack=()):
        if isinstance(t, Token):
            raise ParseError(f"unexpected token {t!r}", _pos(t))
        d = t.data
        k = t.children
        if d == "one":
            return One()
        if d in ("ichoice", "echoice"):
            br = []
            seen = set()
            for lt in k[0].children:
                l = str(lt.children[0])
                if l in seen:
                    raise WfError(f"label {l} appears twice", _pos(lt))
                seen.add(l)
                br.append((l, self.type(lt.children[1], env, stack)))
            return (IChoice if d == "ichoice" else EChoice)(branches(br))
        if d in ("tensor", "lolly"):
            (xn, X), (yn, Y) = self._comp(k[0]), self._comp(k[1])
            if xn == yn and xn is not None:
                raise WfError(f"both components are named {xn}", _pos(t))
            x = fresh(xn or "_")
            y = fresh(yn or "_")
            X2 = self.type(X, _bind(env, yn, y), stack)
            Y2 = self.type(Y, _bind(env, xn, x), stack)
            return (Tensor if d == "tensor" else Lolly)(x, X2, y, Y2)
        if d == "case_close":
            return CaseClose(self.chan(k[0], env), self.type(k[1], env, stack))
        if d == "case_chan":
            c = self.chan(k[0], env)
            z = fresh(str(k[1]))
            return CaseChan(c, z, self.type(k[2], _bind(env, str(k[1]), z), stack))
        if d == "case_label":
            c = self.chan(k[0], env)
            br = []
            seen = set()
            for cb in k[1:]:
                l = str(cb.children[0])
                if l in seen:
                    raise WfError(f"label {l} appears twice", _pos(cb))
                seen.add(l)
                br.append((l, self.type(cb.children[1], env, stack)))
            return CaseLabel(c, branches(br))
        if d == "abbrev":
            n = str(k[0])
            if n not in self.types:
                raise UnknownName(f"unknown type {n}", _pos(k[0]))
            if n in stack:
                raise WfError(f"type {n} is defined in terms of itself", _pos(k[0]))
            return self.type(self.types[n], env, stack + (n,))
        raise ParseError(f"unexpected type form {d}", _pos(t))

    def _comp(self, c: Tree):
        if c.data == "named_comp":
            return str(c.children[0]), c.children[1]
        return None, c.children[0]

    def chan(self, tok, env: dict) -> Name:
        n = env.get(str(tok))
        if n is None:
            raise ScopeError(f"channel {tok} is not in scope", _pos(tok))
        return n

    # processes

    def proc(self, t, env: dict, stack=()):
        d = t.data
        k = t.children
        pos = _pos(t)
        if d == "close":
            return Close(self.chan(k[0], env), pos=pos)
        if d == "wait":
            a = self.chan(k[0], env)
            P = self.proc(k[1], env, stack)
            if a in free_channels(P):
                raise WfError(f"{a} is still used after waiting on it", pos)
            return Wait(a, P, pos=pos)
        if d == "send_label":
            return SendLabel(self.chan(k[0], env), str(k[1]), self.proc(k[2], env, stack), pos=pos)
        if d == "recv_label":
            a = self.chan(k[0], env)
            br = []
            seen = set()
            for pb in k[1:]:
                l = str(pb.children[0])
                if l in seen:
                    raise WfError(f"branch {l} appears twice", _pos(pb))
                seen.add(l)
                br.append((l, self.proc(pb.children[1], env, stack)))
            return RecvLabel(a, branches(br), pos=pos)
        if d == "send_chan":
            a = self.chan(k[0], env)
            b = fresh(str(k[1]))
            P = self.proc(k[2], _bind(env, str(k[1]), b), stack)
            Q = self.proc(k[3], env, stack)
            shared = (free_channels(P) - {b}) & free_channels(Q)
            if shared:
                raise WfError(f"both sides of a send use {_show(shared)}", pos)
            if a in free_channels(P) - {b}:
                raise WfError(f"the sent channel's provider may not use {a}", pos)
            return SendChan(a, b, P, Q, pos=pos)
        if d == "recv_chan":
            a = self.chan(k[1], env)
            b = fresh(str(k[0]))
            return RecvChan(b, a, self.proc(k[2], _bind(env, str(k[0]), b), stack), pos=pos)
        if d == "par":
            a = self.chan(k[1], env)
            P = self.proc(k[0], env, stack)
            Q = self.proc(k[2], env, stack)
            shared = free_channels(P) & free_channels(Q)
            if shared != {a}:
                if a not in shared:
                    raise WfError(f"both sides of a composition must use {a}", pos)
                raise WfError(f"sides of a composition share {_show(shared - {a})}", pos)
            return Par(a, P, Q, pos=pos)
        if d == "new":
            env2 = dict(env)
            names = []
            for tok, _ in _bindings(k[0]):
                if str(tok) in [n.display for n in names]:
                    raise WfError(f"channel {tok} declared twice", _pos(tok))
                n = fresh(str(tok))
                names.append(n)
                env2[str(tok)] = n
            bs = tuple((n, self.type(ty, env2)) for n, (_, ty) in zip(names, _bindings(k[0])))
            return New(bs, self.proc(k[1], env2, stack), pos=pos)
        if d == "call":
            return self.call(t, env, stack)
        raise ParseError(f"unexpected process form {d}", pos)

    def call(self, t, env, stack):
        name = str(t.children[0])
        pos = _pos(t)
        raw = self.procs.get(name)
        if raw is None:
            raise UnknownName(f"unknown process {name}", pos)
        if name in stack:
            raise WfError(f"process {name} instantiates itself", pos)
        args = t.children[1].children if t.children[1] is not None else []
        mapping = {str(n): str(n) for n, _ in raw.all_bindings()}
        if args and all(a.data == "pos_arg" for a in args):
            slots = [str(n) for n, _ in raw.used] + [str(raw.prov_name)]
            if len(args) != len(slots):
                raise WfError(f"{name} takes {len(slots)} channels, got {len(args)}", pos)
            for s, a in zip(slots, args):
                mapping[s] = str(a.children[0])
        else:
            for a in args:
                if a.data != "kw_arg":
                    raise ParseError("cannot mix positional and named channels", pos)
                src, dst = str(a.children[0]), str(a.children[1])
                if src not in mapping:
                    raise WfError(f"{name} has no channel {src}", pos)
                mapping[src] = dst
        inner = {src: env[dst] for src, dst in mapping.items() if dst in env}
        return self.proc(raw.body, inner, stack + (name,))

    # declarations

    def declaration(self, raw: _RawProc) -> Declaration:
        names = {}
        for tok, _ in raw.all_bindings():
            s = str(tok)
            if s in names:
                raise WfError(f"channel {s} declared twice in {raw.name}", _pos(tok))
            names[s] = fresh(s)

        def ctx(bs):
            return tuple((names[str(tok)], self.type(ty, names)) for tok, ty in bs)

        sigma = ctx(raw.ambient)
        internal = ctx(raw.internal)
        used = ctx(raw.used)
        c = names[str(raw.prov_name)]
        C = self.type(raw.prov_type, names)
        body = self.proc(raw.body, names, (raw.name,))
        fn = free_channels(body)
        # channels from the bracket list that the process talks on are internal
        ambient = tuple((n, a) for n, a in sigma if n not in fn)
        internal = internal + tuple((n, a) for n, a in sigma if n in fn)
        expected = {n for n, _ in used} | {n for n, _ in internal} | {c}
        missing = expected - fn
        if missing:
            raise WfError(f"{raw.name} never uses {_show(missing)}", _pos(raw.tree))
        return Declaration(raw.name, ambient, internal, used, (c, C), body, pos=_pos(raw.tree))


def _bind(env: dict, key: Optional[str], name: Name) -> dict:
    if key is None:
        return env
    out = dict(env)
    out[key] = name
    return out


def _show(names) -> str:
    return ", ".join(sorted(str(n) for n in names))


def parse_tree(src: str) -> Tree:
    try:
        return _lark().parse(src)
    except UnexpectedInput as e:
        raise ParseError(_describe(e, src), (e.line, e.column)) from None
    except LarkError as e:
        raise ParseError(str(e)) from None


def _describe(e: UnexpectedInput, src: str) -> str:
    ctx = e.get_context(src).rstrip()
    if isinstance(e, UnexpectedCharacters):
        return f"unexpected character\n{ctx}"
    tok = getattr(e, "token", None)
    if tok is not None and tok.type == "$END":
        return f"unexpected end of input\n{ctx}"
    return f"unexpected {tok!r}\n{ctx}"


def parse_program(src: str) -> Program:
    tree = parse_tree(src)
    r = Resolver()
    raws = []
    for d in tree.children:
        if d.data == "type_decl":
            n = str(d.children[0])
            if n in r.types:
                raise WfError(f"type {n} defined twice", _pos(d))
            r.types[n] = d.children[1]
        else:
            raw = _RawProc(d)
            if raw.name in r.procs:
                raise WfError(f"process {raw.name} defined twice", _pos(d))
            r.procs[raw.name] = raw
            raws.append(raw)
    return Program(tuple(r.declaration(raw) for raw in raws))


def parse_file(path) -> Program:
    with open(path, encoding="utf-8") as f:
        return parse_program(f.read())


def parse_type(src: str, channels: dict) -> object:
    """Parse a lone type; free channels are looked up in ``channels``
    (display string to Name)."""
    tree = parse_tree(f"proc _t () |- _x : 1 = close _x\ntype _T = {src}")
    r = Resolver()
    tdecl = [d for d in tree.children if d.data == "type_decl"][0]
    return r.type(tdecl.children[1], dict(channels))
