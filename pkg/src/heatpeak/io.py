"""JSON encoding of instances, schedules and reports.

Reals may be written as JSON numbers or as strings (``"3/4"``, ``"0.25"``);
strings and integers are read as exact ``Fraction``/``int`` values.
"""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import numpy as np

from .instance import Converter, Instance


def parse_number(v):
    if isinstance(v, bool):
        raise TypeError(f"expected a number, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        q = Fraction(v.strip())
        return int(q) if q.denominator == 1 else q
    raise TypeError(f"expected a number, got {v!r}")


def format_number(v) -> str | int:
    """Integers stay JSON integers; other reals become decimal strings.

    Fractions with a terminating decimal expansion are written exactly in
    fixed-point; the rest fall back to ``"p/q"``.
    """
    if isinstance(v, (bool, np.bool_)):
        raise TypeError(f"expected a number, got {v!r}")
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return int(v)
        den = v.denominator
        for p in (2, 5):
            while den % p == 0:
                den //= p
        if den == 1:
            return format(Decimal(v.numerator) / Decimal(v.denominator), "f")
        return f"{v.numerator}/{v.denominator}"
    v = float(v)
    if v.is_integer():
        return int(v)
    return repr(v)


def instance_from_dict(doc: dict) -> Instance:
    T = doc["T"]
    convs = []
    for i, c in enumerate(doc["converters"]):
        convs.append(
            Converter(
                energy=parse_number(c["E"]),
                heat=parse_number(c["H"]),
                demand=[parse_number(v) for v in c["demand"]],
                soc_lower=[parse_number(v) for v in c["soc_lower"]],
                soc_upper=[parse_number(v) for v in c["soc_upper"]],
                id=str(c.get("id", f"c{i}")),
            )
        )
    base = doc.get("base_load")
    base = [0] * T if base is None else [parse_number(v) for v in base]
    return Instance(T, base, convs)


def instance_to_dict(inst: Instance) -> dict:
    return {
        "T": inst.horizon,
        "base_load": [format_number(v) for v in inst.base_load],
        "converters": [
            {
                "id": c.id,
                "E": format_number(c.energy),
                "H": format_number(c.heat),
                "demand": [format_number(v) for v in c.demand],
                "soc_lower": [format_number(v) for v in c.soc_lower],
                "soc_upper": [format_number(v) for v in c.soc_upper],
            }
            for c in inst.converters
        ],
    }


def matrix_to_json(x) -> list[list]:
    """Row-per-converter encoding."""
    return [[format_number(v) for v in row] for row in np.asarray(x)]


def matrix_from_json(rows) -> np.ndarray:
    vals = [[parse_number(v) for v in row] for row in rows]
    if all(isinstance(v, int) for row in vals for v in row):
        return np.array(vals, dtype=np.int64).reshape(len(vals), -1)
    return np.array(vals, dtype=float).reshape(len(vals), -1)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def load_instance(path) -> Instance:
    return instance_from_dict(load_json(path))


def write_json(doc, path=None) -> str:
    text = dumps(doc)
    if path is None or str(path) == "-":
        return text
    Path(path).write_text(text)
    return text
