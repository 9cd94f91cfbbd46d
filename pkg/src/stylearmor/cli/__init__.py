from __future__ import annotations

import sys
from collections.abc import Sequence

import click
import typer

from stylearmor.cli.analyze import extract, parse_cmd, profile
from stylearmor.cli.attack import hide, imitate, perturb
from stylearmor.cli.common import console, load_settings
from stylearmor.cli.experiment import evaluate, gen_corpus, matrix, train, train_ropgen_cmd

app = typer.Typer(
    add_completion=False,
    help="stylearmor: coding-style attacks on authorship attribution, and hardened training against them.",
)

app.command("parse")(parse_cmd)
app.command()(extract)
app.command()(profile)
app.command()(imitate)
app.command()(hide)
app.command()(perturb)
app.command("gen-corpus")(gen_corpus)
app.command()(train)
app.command("train-ropgen")(train_ropgen_cmd)
app.command()(evaluate)
app.command()(matrix)


def dispatch(args: Sequence[str] | None = None) -> int:
    """Run one command and return its exit status.

    0 on success, 1 on a usage error (synopsis printed to stderr), 2 on a
    data error.
    """
    command = typer.main.get_command(app)
    try:
        argv = list(args) if args is not None else None
        result = command.main(args=argv, prog_name="stylearmor", standalone_mode=False)
    except click.exceptions.UsageError as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(dispatch())


__all__ = ["app", "console", "dispatch", "load_settings", "main"]
