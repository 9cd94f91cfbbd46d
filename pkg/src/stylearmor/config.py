from __future__ import annotations

import os
import platform
import tomllib
from dataclasses import dataclass
from pathlib import Path

from stylearmor.model.train import OPTIMIZERS, Hyperparams


def _expand(p: str) -> str:
    """Expand environment variables and ``~`` in a path string."""
    return os.path.expanduser(os.path.expandvars(p))


def _default_config_path() -> Path:
    """Location of ``config.toml``.

    - Linux/macOS: ~/.config/stylearmor/config.toml
    - Windows: %APPDATA%/stylearmor/config.toml
    """
    if platform.system().lower().startswith("win"):
        base = os.environ.get("APPDATA", str(Path.home() / "AppData" / "Roaming"))
        return Path(base) / "stylearmor" / "config.toml"
    return Path.home() / ".config" / "stylearmor" / "config.toml"


def _default_output_root() -> str:
    """Where run directories go.

    - Linux/macOS: ~/.local/share/stylearmor/runs
    - Windows: %LOCALAPPDATA%/stylearmor/runs
    """
    if platform.system().lower().startswith("win"):
        base = os.environ.get("LOCALAPPDATA", str(Path.home() / "AppData" / "Local"))
        return str(Path(base) / "stylearmor" / "runs")
    return str(Path.home() / ".local" / "share" / "stylearmor" / "runs")


@dataclass(frozen=True)
class Settings:
    """Configuration for every stylearmor command.

    Attributes:
        output_root: Directory under which each run gets its own directory
        max_source_bytes: Largest source file the parser accepts
        fuel: Interpreter step budget per run
        oracle_vectors: Number of seeded input vectors the oracle compares on
        oracle_vector_length: Length of each input vector
        oracle_max_value: Largest value in an input vector
        tau: Numeric discrepancy threshold
        kappa: Number of cross-validation folds
        subnetworks: Sub-networks sampled per iteration of hardened training
        width_lower_bound: Smallest sub-network width fraction
        batch_size, learning_rate, epochs, hidden_sizes, vocab_size, optimizer:
            Network hyperparameters
        seed: Default seed when a command is given none
    """

    output_root: str
    max_source_bytes: int = 1 << 20
    fuel: int = 1_000_000
    oracle_vectors: int = 5
    oracle_vector_length: int = 32
    oracle_max_value: int = 100
    tau: float = 0.0
    kappa: int = 10
    subnetworks: int = 3
    width_lower_bound: float = 0.8
    batch_size: int = 128
    learning_rate: float = 1e-4
    epochs: int = 200
    hidden_sizes: tuple[int, ...] = (64, 64)
    vocab_size: int = 512
    optimizer: str = "adam"
    seed: int = 0

    def hyperparams(self, seed: int | None = None) -> Hyperparams:
        """Network hyperparameters, with ``seed`` overriding the configured one."""
        return Hyperparams(
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            hidden_sizes=self.hidden_sizes,
            seed=self.seed if seed is None else seed,
            optimizer=self.optimizer,
            vocab_size=self.vocab_size,
        )


def load_settings(path: Path | None = None) -> Settings:
    """Load settings from ``path`` (or the default config file) and the environment.

    Precedence, highest first:
    1. ``STYLEARMOR_OUTPUT_ROOT`` (the only environment override; empty is ignored)
    2. The configuration file
    3. Built-in defaults

    Args:
        path: A TOML file to read instead of the per-user default.

    Returns:
        Settings: The validated settings.

    Example:
        s = load_settings()
        hp = s.hyperparams(seed=1)

    Raises:
        ValueError: for out-of-range values.
        FileNotFoundError: when an explicit ``path`` does not exist.
    """
    cfg_path = Path(path) if path is not None else _default_config_path()
    data: dict = {}
    if path is not None or cfg_path.exists():
        with cfg_path.open("rb") as f:
            data = tomllib.load(f) or {}

    output_root = _expand(str(data.get("output_root", _default_output_root())))
    env_output_root = os.environ.get("STYLEARMOR_OUTPUT_ROOT")
    if env_output_root:
        output_root = _expand(env_output_root)

    hidden_sizes = tuple(int(h) for h in data.get("hidden_sizes", (64, 64)))
    optimizer = str(data.get("optimizer", "adam")).lower()
    if optimizer not in OPTIMIZERS:
        raise ValueError(f"optimizer must be one of {', '.join(OPTIMIZERS)}, got {optimizer!r}")

    settings = Settings(
        output_root=output_root,
        max_source_bytes=int(data.get("max_source_bytes", 1 << 20)),
        fuel=int(data.get("fuel", 1_000_000)),
        oracle_vectors=int(data.get("oracle_vectors", 5)),
        oracle_vector_length=int(data.get("oracle_vector_length", 32)),
        oracle_max_value=int(data.get("oracle_max_value", 100)),
        tau=float(data.get("tau", 0.0)),
        kappa=int(data.get("kappa", 10)),
        subnetworks=int(data.get("subnetworks", 3)),
        width_lower_bound=float(data.get("width_lower_bound", 0.8)),
        batch_size=int(data.get("batch_size", 128)),
        learning_rate=float(data.get("learning_rate", 1e-4)),
        epochs=int(data.get("epochs", 200)),
        hidden_sizes=hidden_sizes,
        vocab_size=int(data.get("vocab_size", 512)),
        optimizer=optimizer,
        seed=int(data.get("seed", 0)),
    )
    _validate(settings)
    return settings


def _validate(s: Settings) -> None:
    positive = ("max_source_bytes", "fuel", "oracle_vectors", "oracle_vector_length", "batch_size", "epochs")
    for name in positive:
        if getattr(s, name) <= 0:
            raise ValueError(f"{name} must be positive")
    if s.tau < 0:
        raise ValueError("tau must be non-negative")
    if s.kappa < 2:
        raise ValueError("kappa must be at least 2")
    if s.subnetworks < 0:
        raise ValueError("subnetworks must be non-negative")
    if not 0.0 < s.width_lower_bound < 1.0:
        raise ValueError("width_lower_bound must be in (0, 1)")
    if s.learning_rate <= 0:
        raise ValueError("learning_rate must be positive")
    if not s.hidden_sizes or any(h <= 0 for h in s.hidden_sizes):
        raise ValueError("hidden_sizes must be positive")
