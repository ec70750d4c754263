"""Shipped reference tables of integer invariants (curated verification data)."""

from __future__ import annotations

import json
from importlib import resources

SIDE_FILES = {"X": "table_x.json", "Xprime": "table_xprime.json"}
SIDE_KEYS = {"x": "X", "z": "Xprime"}


def load_reference(side: str) -> dict:
    """Reference table for side "X" or "Xprime" as {(g, d): int}."""
    name = SIDE_FILES[side]
    with resources.files("mirrorgv.data").joinpath(name).open() as f:
        data = json.load(f)
    return {(e["g"], e["d"]): int(e["n"]) for e in data["entries"]}


def load_reference_json(side: str) -> dict:
    name = SIDE_FILES[side]
    with resources.files("mirrorgv.data").joinpath(name).open() as f:
        return json.load(f)


def reference_zero_cells(side_key: str, g: int) -> set:
    """Degrees whose reference invariant vanishes at the given genus; used by
    the greedy condition schedule."""
    ref = load_reference(SIDE_KEYS[side_key])
    return {d for (gg, d), v in ref.items() if gg == g and v == 0}
