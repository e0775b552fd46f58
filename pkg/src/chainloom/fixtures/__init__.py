"""Bundled template fixtures."""

from importlib import resources
from pathlib import Path


def fig1_path() -> Path:
    """Path to the seven-node character-visualisation template."""
    return Path(resources.files(__package__) / "fig1.json")
