"""Bundled example curves."""

from __future__ import annotations

import json
from importlib import resources

from .curvezeta import CurveModel

#: ordered by genus, then field size
CORPUS = ("p1_f2", "ell_f2", "ell_f3", "ell_f5", "g2_f3", "g3_f5")


def corpus_document(name: str) -> dict:
    if name not in CORPUS:
        raise KeyError(f"no corpus curve named {name!r}; known: {', '.join(CORPUS)}")
    text = resources.files(__package__).joinpath("corpus", f"{name}.json").read_text()
    return json.loads(text)


def load_curve(name: str) -> CurveModel:
    return CurveModel.from_document(corpus_document(name))


def corpus_curves() -> list[CurveModel]:
    return [load_curve(n) for n in CORPUS]
