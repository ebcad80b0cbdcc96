"""Access to text assets bundled with the package."""

from __future__ import annotations

from importlib import resources


def asset_text(name: str) -> str:
    return resources.files("parallelqa.assets").joinpath(name).read_text(encoding="utf-8")


def asset_lines(name: str) -> frozenset[str]:
    """Non-empty, non-comment lines of a bundled list file."""
    out = []
    for line in asset_text(name).splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return frozenset(out)
