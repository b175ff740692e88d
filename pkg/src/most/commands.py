"""What the CLI subcommands compute.  Each command produces a plain
dict (the JSON report); text rendering lives in ``cli``."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from .check import CheckError, check_declaration
from .denote import denote
from .errors import MostError
from .syntax import parse_file
from .trace import (ResourceLimit, erase_set, format_trace, safely_constrained, sorted_traces,
                    trace_to_json)
from .typesem import Interface, Spec, spec_enumerate, spec_member

SCHEMA = 1


def declaration_spec(d) -> Spec:
    return Spec(d.ambient, (Interface(d.used, d.internal, d.provided),))


def _traces(T) -> list:
    return [{"text": format_trace(t), "elements": trace_to_json(t)} for t in sorted_traces(T)]


def _limit_error(e: ResourceLimit) -> dict:
    return {"kind": "ResourceLimit", "message": str(e), "position": None, "rule": None,
            "judgment": None, "witnesses": []}


def check_one(d, opts: dict) -> dict:
    out = {"name": d.name}
    try:
        res = check_declaration(d, opts.get("limit"), opts.get("strict", False))
    except CheckError as e:
        out.update(status="error", error=e.to_json())
        return out
    except ResourceLimit as e:
        out.update(status="error", error=_limit_error(e))
        return out
    out.update(status="ok", traces=_traces(res.traces),
               dead_branches=[{"position": list(p) if p else None, "channel": c, "label": l}
                              for p, c, l in res.dead_branches])
    if opts.get("derivation"):
        out["derivation"] = res.derivation.to_json()
        out["derivation_text"] = res.derivation.render()
    return out


def verify_one(d, opts: dict) -> dict:
    """Check d, then compare the constraint traces with the independently
    computed denotation and specification semantics."""
    out = {"name": d.name}
    limit = opts.get("limit")
    try:
        res = check_declaration(d, limit, opts.get("strict", False))
        T = res.traces
        D = denote(d.body, limit)
    except CheckError as e:
        out.update(status="error", error=e.to_json())
        return out
    except ResourceLimit as e:
        out.update(status="error", error=_limit_error(e))
        return out
    E = erase_set(T)
    spec = declaration_spec(d)
    outside = [t for t in sorted_traces(T) if not spec_member(t, spec)]
    unsafe = [t for t in sorted_traces(T) if not safely_constrained(t)]
    missing = sorted_traces(D - E)
    extra = sorted_traces(E - D)
    checks = {
        "erasure_equals_denotation": not missing and not extra,
        "within_specification": not outside,
        "safely_constrained": not unsafe,
    }
    if not d.ambient:
        checks["no_constraints_without_ambient"] = T == D
    out.update(
        status="pass" if all(checks.values()) else "fail",
        checks=checks,
        counterexamples={
            "denoted_but_not_generated": [format_trace(t) for t in missing],
            "generated_but_not_denoted": [format_trace(t) for t in extra],
            "outside_specification": [format_trace(t) for t in outside],
            "unsafely_constrained": [format_trace(t) for t in unsafe],
        },
        traces=len(T),
    )
    if res.dead_branches:
        out["dead_branches"] = [{"position": list(p) if p else None, "channel": c, "label": l}
                                for p, c, l in res.dead_branches]
    return out


def traces_one(d, opts: dict) -> dict:
    out = {"name": d.name}
    try:
        out.update(status="ok", traces=_traces(denote(d.body, opts.get("limit"))))
    except ResourceLimit as e:
        out.update(status="error", error=_limit_error(e))
    return out


def spec_traces_one(d, opts: dict) -> dict:
    out = {"name": d.name}
    try:
        out.update(status="ok", traces=_traces(spec_enumerate(declaration_spec(d), opts.get("limit"))))
    except ResourceLimit as e:
        out.update(status="error", error=_limit_error(e))
    return out


WORKERS = {"check": check_one, "verify": verify_one, "traces": traces_one,
           "spec-traces": spec_traces_one}


def _work(command, path, name, opts):
    prog = parse_file(path)
    return WORKERS[command](prog.get(name), opts)


def run(command: str, path: str, proc: Optional[str] = None, **opts) -> dict:
    """Run a subcommand over a file.  Raises MostError on parse errors and
    KeyError for an unknown --proc."""
    prog = parse_file(path)
    names = prog.names()
    if proc is not None:
        prog.get(proc)
        names = [proc]
    if opts.get("parallel") and len(names) > 1:
        with ProcessPoolExecutor() as ex:
            futs = [ex.submit(_work, command, path, n, opts) for n in names]
            decls = [f.result() for f in futs]
    else:
        decls = [WORKERS[command](prog.get(n), opts) for n in names]
    good = {"check": "ok", "verify": "pass", "traces": "ok", "spec-traces": "ok"}[command]
    return {
        "schema": SCHEMA,
        "command": command,
        "file": path,
        "declarations": decls,
        "ok": all(d["status"] == good for d in decls),
    }


def cmd_check(path, **flags) -> dict:
    return run("check", path, **flags)


def cmd_verify(path, **flags) -> dict:
    return run("verify", path, **flags)


def cmd_traces(path, **flags) -> dict:
    return run("traces", path, **flags)


def cmd_spec_traces(path, **flags) -> dict:
    return run("spec-traces", path, **flags)


__all__ = ["run", "cmd_check", "cmd_verify", "cmd_traces", "cmd_spec_traces", "MostError"]
