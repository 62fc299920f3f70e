"""Toolkit for double-protograph LDPC joint source-channel codes with
triangular linking matrices: construction, quasi-cyclic lifting, encoding,
joint belief-propagation decoding, EXIT-chart thresholds, link optimization,
complexity analysis, and Monte Carlo error-rate simulation."""

from .protograph import (
    CodeConstraintError,
    DimensionError,
    JointCode,
    ParseError,
    Protomatrix,
    Rates,
    TriangularLink,
    assemble_joint,
    code_rates,
    load_code,
    parse_code,
    save_code,
    serialize_code,
)
from .fixtures import fixture_ids, fixture_meta, load_fixture

__version__ = "0.1.0"
