from __future__ import annotations

import json
import logging
import tomllib
from collections.abc import Iterable, Iterator
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

import typer
from rich.console import Console
from rich.logging import RichHandler

from stylearmor.config import Settings, load_settings
from stylearmor.errors import StylearmorError
from stylearmor.lang.interp import IoTrace
from stylearmor.lang.oracle import Verdict, check_equivalent, input_vectors
from stylearmor.lang.parser import parse
from stylearmor.lang.program import Program
from stylearmor.utils.text import one_line, slugify
from stylearmor.utils.time import now_utc_iso, run_stamp

console = Console()
err_console = Console(stderr=True)

CONFIG_OPTION = typer.Option(None, "--config", help="Read settings from this TOML file.")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Run directory (default: a new one under output_root).")
SEED_OPTION = typer.Option(None, "--seed", help="Seed for every random choice (default: settings.seed).")
TAU_OPTION = typer.Option(None, "--tau", help="Numeric discrepancy threshold (default: settings.tau).")
PHI_OPTION = typer.Option(None, "--phi", help="Apply at most this many transformations.")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Log debug output.")
CERTIFY_OPTION = typer.Option(
    True, "--certify/--no-certify", help="Check every rewrite with the interpreter oracle."
)


def configure_logging(verbose: bool) -> None:
    """Route library logs through Rich on stderr; DEBUG with ``--verbose``, WARNING otherwise."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def fail(message: str, code: int) -> typer.Exit:
    """Print ``message`` to stderr and build the exit to raise.

    Args:
        message: Shown after a red ``Error:`` prefix.
        code: 1 for usage problems, 2 for data problems.

    Returns:
        typer.Exit: For the caller to raise.

    Example:
        raise fail(f"no programs under {root}", 2)
    """
    err_console.print(f"[red]Error[/red]: {message}")
    return typer.Exit(code=code)


def setup(config: Path | None, verbose: bool) -> Settings:
    """Logging first, then settings; a bad configuration is a usage error.

    Args:
        config: The ``--config`` option, or None for the default file.
        verbose: The ``--verbose`` flag.

    Returns:
        Settings: Loaded and validated.
    """
    configure_logging(verbose)
    try:
        return load_settings(config)
    except (OSError, ValueError, tomllib.TOMLDecodeError) as exc:
        raise fail(f"cannot load settings: {exc}", 1) from exc


@contextmanager
def handle_errors() -> Iterator[None]:
    """Exit 2 on data errors and 1 on invalid parameter values."""
    try:
        yield
    except StylearmorError as exc:
        raise fail(str(exc), 2) from exc
    except OSError as exc:
        raise fail(str(exc), 2) from exc
    except ValueError as exc:
        raise fail(str(exc), 1) from exc


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """What a run was asked to do; echoed in full by its manifest."""

    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    seed: int = 0
    params: dict[str, object] = field(default_factory=dict)
    output_dir: str = ""


@dataclass
class Run:
    dir: Path
    config: RunConfig
    settings: Settings
    started_at: str = field(default_factory=now_utc_iso)

    def path(self, *parts: str) -> Path:
        p = self.dir.joinpath(*parts)
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def skip(self, source: str, reason: str) -> None:
        log_skipped(self.dir, source=source, reason=reason)

    def skip_all(self, items: Iterable[tuple[str, str]]) -> None:
        for source, reason in items:
            self.skip(source, reason)

    def write_manifest(self, **results: object) -> Path:
        """``manifest.json``: config, settings, timestamps and whatever the command measured."""
        body = {
            "config": asdict(self.config),
            "settings": asdict(self.settings),
            "started_at": self.started_at,
            "finished_at": now_utc_iso(),
            "results": results,
        }
        path = self.path("manifest.json")
        path.write_text(json.dumps(body, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
        return path


def _fresh_dir(root: Path, command: str) -> Path:
    base = root / f"{run_stamp()}-{slugify(command)}"
    candidate, k = base, 1
    while candidate.exists():
        k += 1
        candidate = base.with_name(f"{base.name}-{k}")
    return candidate


def open_run(
    settings: Settings,
    command: str,
    out: Path | None,
    *,
    inputs: dict[str, Path | str] | None = None,
    seed: int = 0,
    **params: object,
) -> Run:
    """Create the run directory; paths in ``inputs`` are resolved before anything runs.

    Args:
        settings: Supplies ``output_root`` when ``out`` is not given.
        command: Names the fresh directory, after a timestamp.
        out: An explicit run directory, created if missing.
        inputs: Input paths recorded in the manifest.
        seed: Recorded in the manifest.
        **params: Further options recorded in the manifest.

    Returns:
        Run: Ready for outputs, skip records and the manifest.
    """
    run_dir = Path(out) if out is not None else _fresh_dir(Path(settings.output_root), command)
    run_dir.mkdir(parents=True, exist_ok=True)
    resolved = {k: str(Path(v).resolve()) for k, v in (inputs or {}).items()}
    config = RunConfig(command, resolved, seed, params, str(run_dir.resolve()))
    return Run(run_dir, config, settings)


def log_skipped(run_dir: Path, *, source: str, reason: str) -> None:
    """Append one tab-separated line per skipped item to ``<run_dir>/skipped.log``."""
    log_path = Path(run_dir) / "skipped.log"
    line = f"{now_utc_iso()}\tsource={one_line(source)}\treason={one_line(reason)}\n"
    try:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        with log_path.open("a", encoding="utf-8") as fh:
            fh.write(line)
    except OSError:
        pass


# ---------------------------------------------------------------------------
# Programs
# ---------------------------------------------------------------------------


def read_program(path: Path, settings: Settings) -> Program:
    """Parse a source file with the configured size limit, named by its path."""
    text = Path(path).read_text(encoding="utf-8")
    return parse(text, str(path), max_bytes=settings.max_source_bytes)


def read_programs(paths: Iterable[Path], settings: Settings) -> list[Program]:
    """Files as given; a directory contributes its ``*.c`` files, sorted."""
    files: list[Path] = []
    for p in paths:
        p = Path(p)
        files.extend(sorted(p.glob("*.c")) if p.is_dir() else [p])
    return [read_program(f, settings) for f in files]


def oracle_vectors(settings: Settings, seed: int) -> list[list[int]]:
    """Seeded oracle inputs sized by the settings."""
    return input_vectors(seed, settings.oracle_vectors, settings.oracle_vector_length, settings.oracle_max_value)


def verdict_for(original: Program, candidate: Program, settings: Settings, seed: int) -> Verdict:
    return check_equivalent(original, candidate, vectors=oracle_vectors(settings, seed), fuel=settings.fuel)


def trace_summary(trace: IoTrace) -> str:
    fault = f" ({trace.fault})" if trace.fault else ""
    return f"{trace.status}{fault}, exit {trace.exit_code}, {len(trace.outputs)} output(s), {trace.steps} step(s)"
