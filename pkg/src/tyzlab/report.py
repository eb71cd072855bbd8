"""Report assembly, serialization and schema validation."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .curvature import KAPPA
from .exactpoly import (FactoredFraction, Polynomial, RationalFunction, TruncatedLaurentSeries,
                        fraction_str)

SUBCOMMANDS = ("polytope", "curvature", "ke-check", "lbs", "distortion")

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "tyzlab report",
    "type": "object",
    "required": ["subcommand", "inputs", "status", "results", "provenance"],
    "additionalProperties": False,
    "properties": {
        "subcommand": {"enum": list(SUBCOMMANDS)},
        "inputs": {"type": "object"},
        "status": {"enum": ["ok", "contradiction-certified", "diverged", "failed"]},
        "results": {"type": "object"},
        "error": {"type": "string"},
        "provenance": {
            "type": "object",
            "required": ["tool", "version", "tolerances", "conventions"],
            "properties": {
                "tool": {"const": "tyzlab"},
                "version": {"type": "string"},
                "tolerances": {"type": "object",
                               "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
                "conventions": {
                    "type": "object",
                    "required": ["kappa", "gamma"],
                    "properties": {
                        "kappa": {"type": "string", "pattern": r"^-?\d+/\d+$"},
                        "gamma": {"type": ["string", "null"]},
                    },
                },
            },
        },
    },
}


def jsonable(obj):
    """Convert exact and numeric objects to JSON data; rationals become ``"p/q"``."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (Polynomial, RationalFunction, FactoredFraction, TruncatedLaurentSeries)):
        return obj.render()
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): jsonable(v)
                for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_report(subcommand: str, inputs: dict, status: str, results: dict,
                tolerances: dict | None = None, gamma=None, error: str | None = None) -> dict:
    report = {
        "subcommand": subcommand,
        "inputs": jsonable(inputs),
        "status": status,
        "results": jsonable(results),
        "provenance": {
            "tool": "tyzlab",
            "version": __version__,
            "tolerances": dict(tolerances or {}),
            "conventions": {
                "kappa": fraction_str(KAPPA),
                "gamma": None if gamma is None else (gamma if isinstance(gamma, str) else repr(float(gamma))),
            },
        },
    }
    if error is not None:
        report["error"] = error
    validate(report)
    return report


def validate(report: dict) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def write(report: dict, path: str | Path | None) -> str:
    text = dumps(report)
    if path is None or str(path) == "-":
        return text
    Path(path).write_text(text, encoding="utf-8")
    return text
