"""Reading and writing surfaces as versioned JSON.

Example::

    {
      "schema": "fnsurface/1",
      "genus": 2,
      "kappa": -1.0,
      "cuffs": [[[0, 0], [1, 0]], [[0, 1], [1, 1]], [[0, 2], [1, 2]]],
      "lengths": [2.0, 2.5, 3.0],
      "twists": [0.1, -0.2, 0.3]
    }

``cuffs`` lists, per cuff, its two ``[pants, slot]`` ends.  Optional
``"i0"`` and ``"eps"`` declare cuff-length bounds that are checked on load.
"""

from __future__ import annotations

import json
import math
import re

from ._io import atomic_write
from .errors import DomainError, PreconditionError, SchemaError
from .pants import PantsGraph
from .surface import FenchelNielsen

SCHEMA = "fnsurface/1"
_KEYS = {"schema", "genus", "kappa", "cuffs", "lengths", "twists", "i0", "eps"}


def _line_of(text: str, key: str) -> int:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


def _number(text, key, value, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SchemaError(f"{key} must be a finite number", line=_line_of(text, key))
    if positive and value <= 0:
        raise SchemaError(f"{key} must be positive", line=_line_of(text, key))
    return float(value)


def loads_surface(text: str) -> FenchelNielsen:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, line=exc.lineno) from None
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object", line=1)
    if "schema" not in data:
        raise SchemaError("missing schema field", line=1)
    if data["schema"] != SCHEMA:
        raise SchemaError(f"unsupported schema {data['schema']!r} (expected {SCHEMA})",
                          line=_line_of(text, "schema"))
    unknown = set(data) - _KEYS
    if unknown:
        k = sorted(unknown)[0]
        raise SchemaError(f"unknown field {k!r}", line=_line_of(text, k))
    for k in ("genus", "cuffs", "lengths", "twists"):
        if k not in data:
            raise SchemaError(f"missing field {k!r}", line=1)
    genus = data["genus"]
    if isinstance(genus, bool) or not isinstance(genus, int):
        raise SchemaError("genus must be an integer", line=_line_of(text, "genus"))
    kappa = _number(text, "kappa", data.get("kappa", -1.0))
    cuffs = data["cuffs"]
    ok = isinstance(cuffs, list) and all(
        isinstance(c, list) and len(c) == 2 and all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in e)
            for e in c)
        for c in cuffs)
    if not ok:
        raise SchemaError("cuffs must be a list of [[pants, slot], [pants, slot]]", line=_line_of(text, "cuffs"))
    for key in ("lengths", "twists"):
        if not isinstance(data[key], list):
            raise SchemaError(f"{key} must be a list", line=_line_of(text, key))
    lengths = [_number(text, "lengths", x) for x in data["lengths"]]
    twists = [_number(text, "twists", x) for x in data["twists"]]
    try:
        graph = PantsGraph.from_edges(genus, cuffs)
        fn = FenchelNielsen(graph, tuple(lengths), tuple(twists), kappa)
    except DomainError as exc:
        raise SchemaError(str(exc), line=_line_of(text, "cuffs")) from None
    if "i0" in data:
        i0 = _number(text, "i0", data["i0"], positive=True)
        eps = _number(text, "eps", data.get("eps", 0.0))
        if not fn.check_cuff_bounds(i0, eps):
            raise PreconditionError(f"line {_line_of(text, 'lengths')}: cuff lengths violate the declared bounds")
    return fn


def load_surface(path) -> FenchelNielsen:
    with open(path) as fh:
        return loads_surface(fh.read())


def dumps_surface(fn: FenchelNielsen, **extra) -> str:
    """JSON text; floats keep all digits so a round trip is exact."""
    data = {
        "schema": SCHEMA,
        "genus": fn.genus,
        "kappa": fn.kappa,
        "cuffs": [[list(e) for e in c.ends] for c in fn.graph.cuffs],
        "lengths": list(fn.lengths),
        "twists": list(fn.twists),
    }
    data.update(extra)
    return json.dumps(data, indent=2) + "\n"


def save_surface(fn: FenchelNielsen, path, **extra):
    atomic_write(path, dumps_surface(fn, **extra))
