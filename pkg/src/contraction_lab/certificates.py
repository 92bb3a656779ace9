"""Verdict records and deterministic JSON serialization.

Every region or property check in the library returns a :class:`Certificate`
so that a claim is always accompanied by the margin it was established with
and, when it fails, by a concrete witness.  Serialization is byte-stable:
keys keep insertion order and floats are printed with 17 significant digits.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def format_float(x) -> str:
    """Render a float with 17 significant digits (round-trip safe)."""
    return f"{float(x):.17g}"


def dumps_fixed(obj) -> str:
    """Serialize dicts/lists/scalars to JSON with deterministic float text.

    Unlike ``json.dumps`` this prints every float via :func:`format_float`
    so output bytes do not depend on repr shortening heuristics.
    """
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        items = ", ".join(f"{dumps_fixed(str(k))}: {dumps_fixed(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if hasattr(obj, "tolist"):  # numpy scalars and arrays
        return dumps_fixed(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps_fixed(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, obj) -> None:
    """Write ``obj`` as UTF-8, newline-terminated JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_fixed(obj))
        fh.write("\n")


@dataclass
class Certificate:
    """Outcome of a numerical check.

    holds      -- whether the checked inequality held everywhere sampled
    margin     -- worst value observed (sign convention is per-check; for
                  region checks it is the largest eigenvalue seen, so any
                  positive margin is a violation)
    witness    -- sample achieving the worst case, e.g. {"x": [...], "c": [...]}
    grid_spec  -- description of the region/resolution that was examined
    note       -- free-form remark (entailments, tail bounds, caveats)
    """

    holds: bool
    margin: float
    witness: dict | None = None
    grid_spec: dict | None = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {
            "holds": self.holds,
            "margin": float(self.margin),
            "witness": self.witness,
            "grid": self.grid_spec,
        }
        if self.note:
            out["note"] = self.note
        return out

    def to_json(self) -> str:
        return dumps_fixed(self.to_dict())
