"""Bundled example theories (``*.pmt``) and worlds (``*.pw``)."""

from importlib.resources import files
from pathlib import Path

THEORIES = ("danger", "msaw", "prognos-subset")
WORLDS = {"danger": "danger-world", "msaw": "msaw-world", "prognos-subset": "prognos-world"}
PROFILES = {"danger": "psaw", "msaw": "msaw", "prognos-subset": "psaw"}


def path(name: str) -> Path:
    """Filesystem path of a bundled fixture file, e.g. ``path("danger.pmt")``."""
    return Path(str(files(__name__) / name))


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
