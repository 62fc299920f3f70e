"""Registry of the bundled reference codes.

Each fixture is a code-description JSON file shipped with the package,
carrying a ``meta`` block with the design-time reference threshold and the
lifting factors used in the published evaluation of that code.
"""

from __future__ import annotations

import json
from importlib import resources

from .protograph import JointCode, parse_code


def fixture_ids() -> list:
    """Sorted ids of all bundled codes."""
    root = resources.files("dpjscc") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def fixture_text(code_id: str) -> str:
    path = resources.files("dpjscc") / "fixtures" / f"{code_id}.json"
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise KeyError(f"no bundled code named {code_id!r}; see fixture_ids()") from None


def load_fixture(code_id: str) -> JointCode:
    return parse_code(fixture_text(code_id))


def fixture_meta(code_id: str) -> dict:
    """The meta block (reference threshold, z1/z2, decoder iteration cap)."""
    return json.loads(fixture_text(code_id)).get("meta", {})
