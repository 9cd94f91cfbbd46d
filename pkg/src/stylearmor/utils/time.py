from __future__ import annotations

from datetime import datetime, timezone


def now_utc_iso() -> str:
    """Current UTC time in ISO 8601, e.g. ``2024-12-29T02:31:41+00:00``.

    Timestamps only ever go into run manifests.
    """
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def run_stamp() -> str:
    """Compact UTC stamp for run directory names: ``20241229T023141Z``."""
    return datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
