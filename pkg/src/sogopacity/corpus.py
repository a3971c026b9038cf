"""The five case-study services shipped with the package."""

from __future__ import annotations

from importlib import resources

from .errors import OpacityError
from .io import Model, loads

NAMES = ("br", "fog", "cpr", "cpub", "app")


class CorpusError(OpacityError):
    """A bundled corpus file is missing or does not parse."""


def corpus_text(name: str) -> str:
    if name not in NAMES:
        raise CorpusError(f"unknown corpus model {name!r}; expected one of {', '.join(NAMES)}")
    try:
        return resources.files(__package__).joinpath("corpus", f"{name}.json").read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"corpus file {name}.json is missing from the installation") from exc


def load_model(name: str) -> Model:
    try:
        return loads(corpus_text(name), f"corpus:{name}")
    except CorpusError:
        raise
    except OpacityError as exc:
        raise CorpusError(f"corpus file {name}.json is corrupt: {exc}") from exc


def load_corpus() -> dict[str, Model]:
    """All bundled models by short name."""
    return {name: load_model(name) for name in NAMES}
