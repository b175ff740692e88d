"""Command line interface: ``most check|traces|spec-traces|verify FILE``.

Exit status is 0 when everything passes, 1 when a check or verification
fails (or a resource limit is hit), and 2 for usage and parse errors.
Set MOST_COLOR=never to disable coloured output.
"""

from __future__ import annotations

import os
import sys

import click

from . import commands
from .errors import MostError
from .trace import dumps


def _color() -> bool:
    mode = os.environ.get("MOST_COLOR", "auto")
    if mode == "never":
        return False
    return sys.stdout.isatty()


def _style(text, ok: bool):
    return click.style(text, fg="green" if ok else "red", bold=True)


def _render(report: dict, derivation: bool) -> str:
    lines = []
    cmd = report["command"]
    for d in report["declarations"]:
        status = d["status"]
        good = status in ("ok", "pass")
        tag = _style(f"{status:5}", good)
        if status == "error":
            e = d["error"]
            where = f"{e['position'][0]}:{e['position'][1]}: " if e.get("position") else ""
            lines.append(f"{tag} {d['name']}: {where}{e['kind']}: {e['message']}")
            if e.get("rule"):
                lines.append(f"      rule: {e['rule']}")
            if e.get("judgment"):
                lines.append(f"      at:   {e['judgment']}")
            for w in e.get("witnesses", []):
                lines.append(f"      witness: {w}")
            continue
        if cmd == "verify":
            lines.append(f"{tag} {d['name']} ({d['traces']} constraint traces)")
            for k, v in d["checks"].items():
                lines.append(f"      {k}: {'yes' if v else 'NO'}")
            for k, ts in d["counterexamples"].items():
                for t in ts:
                    lines.append(f"      {k}: {t}")
        else:
            lines.append(f"{tag} {d['name']} ({len(d['traces'])} traces)")
            for t in d["traces"]:
                lines.append(f"      {t['text']}")
        for b in d.get("dead_branches", []):
            pos = f"{b['position'][0]}:{b['position'][1]}: " if b["position"] else ""
            lines.append(f"      note: {pos}branch {b['label']} on {b['channel']} can never be taken")
        if derivation and "derivation_text" in d:
            lines.append(d["derivation_text"])
    return "\n".join(lines)


def _options(f):
    f = click.option("--parallel", is_flag=True, help="Process declarations in parallel.")(f)
    f = click.option("--limit", type=click.IntRange(min=1), default=None,
                     help="Fail instead of building trace sets larger than N.")(f)
    f = click.option("--derivation", is_flag=True, help="Include derivation trees.")(f)
    f = click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")(f)
    f = click.option("--proc", default=None, metavar="NAME", help="Only this declaration.")(f)
    f = click.argument("file", type=click.Path(exists=True, dir_okay=False))(f)
    return f


def _run(command, file, proc, as_json, derivation, limit, parallel, strict=False):
    try:
        report = commands.run(command, file, proc, limit=limit, parallel=parallel,
                              derivation=derivation, strict=strict)
    except MostError as e:
        if as_json:
            click.echo(dumps({"schema": commands.SCHEMA, "command": command, "file": file,
                              "error": {"kind": e.kind, "message": e.message,
                                        "position": list(e.pos) if e.pos else None}}))
        else:
            click.echo(f"{file}:{e}", err=True)
        sys.exit(2)
    except KeyError:
        raise click.UsageError(f"no declaration named {proc}")
    if as_json:
        for d in report["declarations"]:
            d.pop("derivation_text", None)
        click.echo(dumps(report))
    else:
        click.echo(_render(report, derivation), color=_color())
    sys.exit(0 if report["ok"] else 1)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Session types that observe messages on other channels."""


@main.command()
@_options
@click.option("--strict", is_flag=True,
              help="Reject declarations whose dead branches hide uncovered behaviour.")
def check(file, proc, as_json, derivation, limit, parallel, strict):
    """Typecheck every declaration against its specification."""
    _run("check", file, proc, as_json, derivation, limit, parallel, strict)


@main.command()
@_options
def traces(file, proc, as_json, derivation, limit, parallel):
    """Print the trace denotation of each process."""
    _run("traces", file, proc, as_json, derivation, limit, parallel)


@main.command("spec-traces")
@_options
def spec_traces(file, proc, as_json, derivation, limit, parallel):
    """Print the traces each specification permits."""
    _run("spec-traces", file, proc, as_json, derivation, limit, parallel)


@main.command()
@_options
@click.option("--strict", is_flag=True,
              help="Reject declarations whose dead branches hide uncovered behaviour.")
def verify(file, proc, as_json, derivation, limit, parallel, strict):
    """Check, then confirm the result against the denotation and the
    specification semantics."""
    _run("verify", file, proc, as_json, derivation, limit, parallel, strict)


if __name__ == "__main__":
    main()
