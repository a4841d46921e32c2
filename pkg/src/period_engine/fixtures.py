"""Bundled operators and polytopes."""

from __future__ import annotations

import json
from importlib import resources

from .diffop import ThetaOperator
from .errors import SchemaError
from .toric2d import LatticePolytope2D

OPERATORS = ("lpf", "lk3", "ltri", "lelliptic", "le8")
POLYTOPES = ("p2", "p2dual")


def _read(name: str) -> dict:
    try:
        text = resources.files("period_engine").joinpath("data").joinpath(f"{name}.json").read_text()
    except FileNotFoundError as exc:
        raise SchemaError(f"no bundled fixture named {name!r}") from exc
    return json.loads(text)


def load_operator(name: str) -> ThetaOperator:
    if name not in OPERATORS:
        raise SchemaError(f"unknown operator fixture {name!r}; choose from {', '.join(OPERATORS)}")
    return ThetaOperator.from_dict(_read(name))


def load_polytope(name: str) -> LatticePolytope2D:
    if name not in POLYTOPES:
        raise SchemaError(f"unknown polytope fixture {name!r}; choose from {', '.join(POLYTOPES)}")
    return LatticePolytope2D.from_dict(_read(name))
