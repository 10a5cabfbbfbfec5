"""Input documents (JSON, schema-validated) and deterministic output formatting."""
from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from . import scenario as sc
from .algebra import BinaryPovm, bloch_to_density, canonical_two_qubit, check_density
from .errors import ParseError
from .families import NamedStrategy


@lru_cache(maxsize=1)
def input_schema() -> dict:
    text = resources.files("qwitness").joinpath("schema/input.schema.json").read_text()
    return json.loads(text)


def read_document(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    try:
        jsonschema.validate(doc, input_schema())
    except jsonschema.ValidationError as exc:
        raise ParseError(f"{path}: schema violation: {exc.message}") from None
    return doc


def is_grid(doc: dict) -> bool:
    return "construction" in doc


def _povm(d) -> BinaryPovm:
    gamma0 = d.get("gamma0", 0.5)
    if "gamma1" in d and abs(gamma0 + d["gamma1"] - 1) > 1e-12:
        raise ParseError("gamma0 + gamma1 must equal 1")
    return BinaryPovm(gamma0, d["eta"], tuple(d["direction"]))


def _state(d) -> np.ndarray:
    if "matrix" in d:
        m = np.array([[complex(re, im) for re, im in row] for row in d["matrix"]])
        return check_density(m, dim=4)
    return canonical_two_qubit(d["a"], d["b"], d["c"])


def strategy_from_document(doc: dict, label="input") -> NamedStrategy:
    label = doc.get("label", label)
    index_map = sc.INDEX_MAPS[doc.get("index_map", "identity")]
    bob = tuple(_povm(m) for m in doc["bob"]) if "bob" in doc else None
    if "preps" in doc:
        return NamedStrategy(label, preps=tuple(bloch_to_density(s) for s in doc["preps"]), bob=bob)
    if "state" in doc:
        return NamedStrategy(label, state=_state(doc["state"]),
                             alice=tuple(_povm(m) for m in doc["alice"]), bob=bob,
                             index_map=index_map)
    return NamedStrategy(label, box=sc.Box(np.array(doc["box"], dtype=float)), bob=bob,
                         index_map=index_map)


def fmt(value) -> str:
    """17 significant digits; round-trips every float64."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % value


def dumps(obj) -> str:
    """Compact JSON with floats at 17 significant digits and non-finite floats as null."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return "%.17g" % obj if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_line(fields) -> str:
    out = []
    for f in fields:
        s = f if isinstance(f, str) else fmt(f)
        if any(ch in s for ch in ',"\n'):
            s = '"' + s.replace('"', '""') + '"'
        out.append(s)
    return ",".join(out)
