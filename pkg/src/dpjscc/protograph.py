"""Protomatrix data model for double-protograph joint source-channel codes.

A joint code couples a source protograph B_s and a channel protograph B_c
through a linking block [0 | T] placed on the source-check rows, where T is
a square lower or upper triangular matrix with unit diagonal.  The joint
base matrix is

    B_J = [ B_s   0 | T ]
          [  0    B_c   ]

with the zero block of the linking part spanning the channel-parity
columns and T spanning the last m_s channel columns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

DEFAULT_MAX_ENTRY = 3


class CodeConstraintError(ValueError):
    """A matrix or code violates a structural constraint."""


class DimensionError(CodeConstraintError):
    """Block shapes are mutually inconsistent."""


class ParseError(ValueError):
    """A code-description file is malformed."""


def _as_int_matrix(entries, what: str) -> np.ndarray:
    arr = np.asarray(entries, dtype=np.int64)
    if arr.ndim != 2 or arr.size == 0:
        raise CodeConstraintError(f"{what}: expected a non-empty 2-D integer grid")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Protomatrix:
    """Dense grid of non-negative edge multiplicities.

    Entries count parallel edges between a check row and a variable column
    of the template graph; they are capped at ``max_entry`` to keep lifted
    codes sparse and search spaces finite.
    """

    entries: np.ndarray
    max_entry: int = DEFAULT_MAX_ENTRY

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_int_matrix(self.entries, "protomatrix"))
        if self.entries.min() < 0:
            raise CodeConstraintError("protomatrix entries must be non-negative")
        if self.entries.max() > self.max_entry:
            raise CodeConstraintError(
                f"protomatrix entry {self.entries.max()} exceeds max_entry={self.max_entry}"
            )

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def row_weights(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def col_weights(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    def require_connected(self, what: str) -> None:
        """Reject all-zero rows/columns (dead checks or variables)."""
        if (self.row_weights() == 0).any():
            raise CodeConstraintError(f"{what} has an all-zero row")
        if (self.col_weights() == 0).any():
            raise CodeConstraintError(f"{what} has an all-zero column")

    def __eq__(self, other) -> bool:
        return isinstance(other, Protomatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.entries.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"Protomatrix({self.entries.tolist()!r})"


@dataclass(frozen=True, eq=False)
class TriangularLink:
    """Square triangular block with unit diagonal linking source checks to
    the compressed-bit columns of the channel code.

    ``orientation`` fixes which side of the diagonal may hold non-zero
    entries; the other side must be identically zero.  The unit diagonal is
    what makes group-by-group back-substitution encoding possible.
    """

    entries: np.ndarray
    orientation: str = "lower"
    max_entry: int = DEFAULT_MAX_ENTRY

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_int_matrix(self.entries, "linking matrix"))
        t = self.entries
        if t.shape[0] != t.shape[1]:
            raise DimensionError(f"linking matrix must be square, got {t.shape}")
        if self.orientation not in ("lower", "upper"):
            raise CodeConstraintError(f"orientation must be 'lower' or 'upper', got {self.orientation!r}")
        if (np.diag(t) != 1).any():
            raise CodeConstraintError("linking matrix diagonal entries must all be 1")
        wrong = np.triu(t, 1) if self.orientation == "lower" else np.tril(t, -1)
        if wrong.any():
            raise CodeConstraintError(
                f"{self.orientation}-triangular linking matrix has non-zero entries on the wrong side"
            )
        if t.min() < 0 or t.max() > self.max_entry:
            raise CodeConstraintError(f"linking entries must lie in [0, {self.max_entry}]")

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.entries, np.eye(self.size, dtype=np.int64)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TriangularLink)
            and self.orientation == other.orientation
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash((self.orientation, self.entries.tobytes()))

    def __repr__(self):
        return f"TriangularLink({self.entries.tolist()!r}, orientation={self.orientation!r})"


@dataclass(frozen=True, eq=False)
class JointCode:
    """Full description of one double-protograph joint source-channel code.

    Attributes
    ----------
    source : Protomatrix
        B_s, m_s x n_s source protograph.
    channel : Protomatrix
        B_c, m_c x n_c channel protograph; its last m_s columns carry the
        compressed bits, so n_c = m_c + m_s.
    link : TriangularLink
        The m_s x m_s triangular block T.
    punctured : frozenset[int]
        1-based channel-column indices excluded from transmission.
    p1 : float
        Bernoulli one-probability of the source, in (0, 0.5].
    name : str
        Optional identifier used in reports and CSV keys.
    """

    source: Protomatrix
    channel: Protomatrix
    link: TriangularLink
    punctured: frozenset = frozenset()
    p1: float = 0.5
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "punctured", frozenset(int(i) for i in self.punctured))
        self.source.require_connected("source protomatrix")
        self.channel.require_connected("channel protomatrix")
        if self.link.size != self.source.rows:
            raise DimensionError(
                f"linking size {self.link.size} != source check count {self.source.rows}"
            )
        if self.channel.cols != self.channel.rows + self.link.size:
            raise DimensionError(
                f"channel protograph must satisfy n_c = m_c + m_s "
                f"({self.channel.cols} != {self.channel.rows} + {self.link.size})"
            )
        for idx in self.punctured:
            if not 1 <= idx <= self.n_c:
                raise CodeConstraintError(
                    f"punctured index {idx} outside channel columns [1, {self.n_c}]"
                )
        if self.n_c - self.n_p < 1:
            raise CodeConstraintError("at least one channel column must be transmitted")
        if not 0.0 < self.p1 <= 0.5:
            raise CodeConstraintError(f"p1 must lie in (0, 0.5], got {self.p1}")

    @property
    def m_s(self) -> int:
        return self.source.rows

    @property
    def n_s(self) -> int:
        return self.source.cols

    @property
    def m_c(self) -> int:
        return self.channel.rows

    @property
    def n_c(self) -> int:
        return self.channel.cols

    @property
    def n_p(self) -> int:
        return len(self.punctured)

    def transmitted_columns(self) -> list:
        """1-based channel columns that are actually sent."""
        return [j for j in range(1, self.n_c + 1) if j not in self.punctured]

    def sccv_block(self) -> np.ndarray:
        """The m_s x n_c linking block [0 | T]."""
        block = np.zeros((self.m_s, self.n_c), dtype=np.int64)
        block[:, self.m_c:] = self.link.entries
        return block

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, JointCode)
            and self.source == other.source
            and self.channel == other.channel
            and self.link == other.link
            and self.punctured == other.punctured
            and self.p1 == other.p1
        )

    def __hash__(self):
        return hash((self.source, self.channel, self.link, self.punctured, self.p1))


def assemble_joint(code: JointCode) -> Protomatrix:
    """Assemble the (m_s+m_c) x (n_s+n_c) joint protomatrix.

    Layout: source block top-left, [0 | T] top-right, all-zero bottom-left,
    channel block bottom-right.
    """
    top = np.hstack([code.source.entries, code.sccv_block()])
    bottom = np.hstack([np.zeros((code.m_c, code.n_s), dtype=np.int64), code.channel.entries])
    return Protomatrix(np.vstack([top, bottom]), max_entry=max(code.source.max_entry, 9))


class Rates(NamedTuple):
    source: Fraction   # compression rate n_s / m_s
    channel: Fraction  # transmitted code rate m_s / (n_c - n_p)
    overall: Fraction  # source symbols per transmitted symbol


def code_rates(code: JointCode) -> Rates:
    """Exact source / channel / overall rates of a joint code."""
    sent = code.n_c - code.n_p
    if sent == 0:
        raise ZeroDivisionError("all channel columns punctured")
    r_s = Fraction(code.n_s, code.m_s)
    r_c = Fraction(code.m_s, sent)
    return Rates(r_s, r_c, r_s * r_c)


# --- code-description files -------------------------------------------------

def _matrix_from_json(value, rows: int, cols: int, field: str) -> np.ndarray:
    if not isinstance(value, list):
        raise ParseError(f"field {field!r}: expected a list")
    if value and isinstance(value[0], list):
        arr = value
    else:
        if len(value) != rows * cols:
            raise ParseError(f"field {field!r}: expected {rows * cols} entries, got {len(value)}")
        arr = [value[r * cols:(r + 1) * cols] for r in range(rows)]
    try:
        mat = np.array(arr, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field {field!r}: non-integer entry ({exc})") from exc
    if mat.shape != (rows, cols):
        raise ParseError(f"field {field!r}: expected shape {(rows, cols)}, got {mat.shape}")
    return mat


def parse_code(text: str) -> JointCode:
    """Parse a JSON code description into a validated JointCode.

    Raises ParseError on malformed input and CodeConstraintError when the
    parsed matrices violate structural invariants.
    """
    if not text.strip():
        raise ParseError("empty code description")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")

    required = ["m_s", "n_s", "m_c", "n_c", "B_s", "B_c", "T", "orientation", "punctured", "p1"]
    missing = [f for f in required if f not in doc]
    if missing:
        raise ParseError(f"missing fields: {', '.join(missing)}")

    try:
        m_s, n_s = int(doc["m_s"]), int(doc["n_s"])
        m_c, n_c = int(doc["m_c"]), int(doc["n_c"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"dimension fields must be integers ({exc})") from exc

    max_entry = int(doc.get("max_entry", DEFAULT_MAX_ENTRY))
    source = Protomatrix(_matrix_from_json(doc["B_s"], m_s, n_s, "B_s"), max_entry)
    channel = Protomatrix(_matrix_from_json(doc["B_c"], m_c, n_c, "B_c"), max_entry)
    link = TriangularLink(
        _matrix_from_json(doc["T"], m_s, m_s, "T"), str(doc["orientation"]), max_entry
    )
    if not isinstance(doc["punctured"], list):
        raise ParseError("field 'punctured': expected a list of column indices")
    return JointCode(
        source=source,
        channel=channel,
        link=link,
        punctured=frozenset(int(i) for i in doc["punctured"]),
        p1=float(doc["p1"]),
        name=str(doc.get("id", "")),
    )


def serialize_code(code: JointCode) -> str:
    """Serialize a JointCode to its JSON file form (round-trips parse_code)."""
    doc = {
        "id": code.name,
        "m_s": code.m_s,
        "n_s": code.n_s,
        "m_c": code.m_c,
        "n_c": code.n_c,
        "B_s": code.source.entries.tolist(),
        "B_c": code.channel.entries.tolist(),
        "T": code.link.entries.tolist(),
        "orientation": code.link.orientation,
        "punctured": sorted(code.punctured),
        "p1": code.p1,
    }
    if code.source.max_entry != DEFAULT_MAX_ENTRY:
        doc["max_entry"] = code.source.max_entry
    return json.dumps(doc, indent=2) + "\n"


def load_code(path) -> JointCode:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_code(fh.read())


def save_code(code: JointCode, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_code(code))
