"""Shared fixtures: the pancake-flipping programs and throwaway settings."""

from __future__ import annotations

from pathlib import Path

import pytest

from stylearmor.config import Settings
from stylearmor.lang.parser import parse
from stylearmor.lang.program import Program

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(*parts: str) -> Program:
    path = FIXTURES.joinpath(*parts)
    return parse(path.read_text(encoding="utf-8"), str(path))


@pytest.fixture
def pancakes() -> Program:
    """The program to disguise."""
    return load_fixture("pancakes.c")


@pytest.fixture
def target_programs() -> list[Program]:
    """Both programs of the target author."""
    return [load_fixture("target_author", name) for name in ("pancakes.c", "sums.c")]


@pytest.fixture
def settings(tmp_path) -> Settings:
    """Settings whose runs land under a temporary directory."""
    return Settings(output_root=str(tmp_path / "runs"), epochs=3, batch_size=16, hidden_sizes=(8, 8), vocab_size=64)


@pytest.fixture
def config_file(tmp_path) -> Path:
    """A config file with a small network, for CLI runs."""
    path = tmp_path / "config.toml"
    path.write_text(
        "\n".join(
            [
                f'output_root = "{(tmp_path / "runs").as_posix()}"',
                "epochs = 3",
                "batch_size = 16",
                "hidden_sizes = [8, 8]",
                "vocab_size = 64",
                "kappa = 2",
                "",
            ]
        ),
        encoding="utf-8",
    )
    return path
