"""Bundled fixtures: the three-pointed example model, derivations and JSON schemas."""
from __future__ import annotations

from importlib import resources
from pathlib import Path


def data_path(*parts: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(*parts)))


def fig1_path() -> Path:
    return data_path("fig1.json")


def load_fig1():
    from ..model import NeighborhoodModel
    return NeighborhoodModel.load(fig1_path())
