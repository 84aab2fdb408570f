"""JSON-friendly forms of the objects the command line reads and writes.

Complex matrices are nested arrays of ``[re, im]`` pairs, value sets are their
textual form (``"2,3,inf"``), trace weights are exact strings like ``"1/2"``,
and multi-indices are arrays of bit strings (e.g. ``["01", "1"]``).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .core import TracedAlgebraShape
from .diagrams import MultiplicityDiagram
from .errors import InvalidInputError
from .indices import LambdaSpec, MultiIndex, Override, QuadrantRules
from .invariant import CutdownOracle
from .nsets import INF, NSet


def matrix_to_config(matrix) -> list:
    m = np.asarray(matrix, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def matrix_from_config(data) -> np.ndarray:
    try:
        rows = [[complex(entry[0], entry[1]) for entry in row] for row in data]
    except (TypeError, IndexError) as exc:
        raise InvalidInputError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    out = np.array(rows, dtype=complex)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise InvalidInputError(f"matrix config must be square, got shape {out.shape}")
    return out


def _weight_from_config(raw) -> Fraction:
    if isinstance(raw, bool):
        raise InvalidInputError(f"bad trace weight {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        return Fraction(raw)
    if isinstance(raw, float):
        return Fraction(str(raw))
    raise InvalidInputError(f"bad trace weight {raw!r}")


def shape_from_config(data) -> TracedAlgebraShape:
    blocks = tuple(int(d) for d in data["blocks"])
    if "weights" in data:
        weights = tuple(_weight_from_config(w) for w in data["weights"])
        return TracedAlgebraShape(blocks, weights)
    return TracedAlgebraShape.from_blocks(blocks)


def shape_to_config(shape: TracedAlgebraShape) -> dict:
    return {
        "blocks": list(shape.blocks),
        "weights": [str(w) for w in shape.weights],
    }


def value_to_config(value):
    return "inf" if value == INF else int(value)


def value_from_config(raw):
    if raw == "inf":
        return INF
    if isinstance(raw, int) and not isinstance(raw, bool):
        return raw
    raise InvalidInputError(f"bad pair value {raw!r}")


def lambda_to_config(spec: LambdaSpec) -> dict:
    out: dict = {"default": value_to_config(spec.default)}
    if spec.overrides:
        out["overrides"] = [
            {
                "r": o.r,
                "i": list(o.i.to_bits()),
                "j": list(o.j.to_bits()),
                "value": value_to_config(o.value),
            }
            for o in spec.overrides
        ]
    if spec.enumeration is not None:
        out["enumerate"] = str(spec.enumeration)
    if spec.quadrants is not None:
        out["quadrants"] = {
            "both_zero": str(spec.quadrants.both_zero),
            "both_one": str(spec.quadrants.both_one),
            "mixed": str(spec.quadrants.mixed),
        }
    return out


def lambda_from_config(data) -> LambdaSpec:
    overrides = tuple(
        Override(
            r=int(o["r"]),
            i=MultiIndex.from_bits(o["i"]),
            j=MultiIndex.from_bits(o["j"]),
            value=value_from_config(o["value"]),
        )
        for o in data.get("overrides", ())
    )
    enumeration = NSet.parse(data["enumerate"]) if "enumerate" in data else None
    quadrants = None
    if "quadrants" in data:
        q = data["quadrants"]
        quadrants = QuadrantRules(
            both_zero=NSet.parse(q["both_zero"]),
            both_one=NSet.parse(q["both_one"]),
            mixed=NSet.parse(q["mixed"]),
        )
    return LambdaSpec(
        default=value_from_config(data.get("default", 1)),
        overrides=overrides,
        enumeration=enumeration,
        quadrants=quadrants,
    )


def oracle_to_config(oracle: CutdownOracle) -> dict:
    if oracle.constant_value is not None:
        return {"constant": str(oracle.constant_value)}
    entries = [
        {"row": row, "col": col, "value": str(value)}
        for (row, col), value in sorted(oracle.table.items())
    ]
    return {"level": oracle.level, "entries": entries}


def oracle_from_config(data) -> CutdownOracle:
    if "constant" in data:
        return CutdownOracle.constant(NSet.parse(data["constant"]))
    entries = {
        (e["row"], e["col"]): NSet.parse(e["value"]) for e in data["entries"]
    }
    return CutdownOracle.from_table(int(data["level"]), entries)


def diagram_to_config(diagram: MultiplicityDiagram) -> dict:
    return {
        "level": diagram.level,
        "diagonal": diagram.diagonal_marked,
        "cells": [[str(c) for c in row] for row in diagram.cells],
    }


def diagram_from_config(data) -> MultiplicityDiagram:
    cells = tuple(tuple(NSet.parse(c) for c in row) for row in data["cells"])
    return MultiplicityDiagram(int(data["level"]), cells, bool(data.get("diagonal", False)))
