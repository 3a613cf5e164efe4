"""Shipped example documents (canonical form)."""
from __future__ import annotations

from importlib import resources


def fixture_names() -> list[str]:
    return sorted(p.name for p in resources.files(__name__).iterdir() if p.name.endswith(".json"))


def fixture_bytes(name: str) -> bytes:
    return resources.files(__name__).joinpath(name).read_bytes()


def fixture_path(name: str) -> str:
    return str(resources.files(__name__).joinpath(name))
