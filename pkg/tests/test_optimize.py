import math

import pytest

import dpjscc
from dpjscc.optimize import (
    DEParams,
    SearchSpace,
    SearchSpaceError,
    de_optimize,
    enumerate_search,
    lower_triangle_space,
    off_diagonal_space,
)


@pytest.fixture(scope="module")
def p04_results():
    space = off_diagonal_space(dpjscc.load_fixture("p04_r1_base"))
    return space, enumerate_search(space)


def test_enumeration_optimum_and_order(p04_results):
    space, results = p04_results
    assert space.free_cells == ((0, 1), (1, 0))  # (upper cell, lower cell)
    assignments = [a for a, _ in results]
    # reference order: x2=1, x2=2, identity, x2=3, x1=1, x1=2, x1=3
    assert assignments == [(1, 0), (2, 0), (0, 0), (3, 0), (0, 1), (0, 2), (0, 3)]
    assert results[0][0] == (1, 0)  # optimum: upper entry 1, lower 0


def test_enumeration_skips_nontriangular(p04_results):
    _, results = p04_results
    assert len(results) == 7  # both-nonzero assignments are infeasible
    assert all(a[0] == 0 or a[1] == 0 for a, _ in results)


@pytest.mark.parametrize("fam", ["a", "b"])
def test_improving_assignments_exact(fam):
    space = off_diagonal_space(dpjscc.load_fixture(f"p01_r2_{fam}_base"))
    results = enumerate_search(space)
    base = dict(results)[(0, 0)]
    improving = sorted(a for a, v in results if v < base)
    assert improving == [(0, 1), (0, 2), (0, 3)]  # lower-cell values 1..3


def test_empty_space_single_candidate():
    template = dpjscc.load_fixture("p04_r1_base")
    space = SearchSpace(template, ())
    results = enumerate_search(space)
    assert len(results) == 1 and results[0][0] == ()


def test_enumeration_guard():
    template = dpjscc.load_fixture("p14_r1_base")
    cells = tuple((r, c) for r in range(4) for c in range(4) if r != c)  # 4^12
    with pytest.raises(SearchSpaceError):
        enumerate_search(SearchSpace(template, cells))


def test_space_validation():
    template = dpjscc.load_fixture("p04_r1_base")
    with pytest.raises(SearchSpaceError):
        SearchSpace(template, ((0, 0),))  # diagonal cell
    with pytest.raises(SearchSpaceError):
        SearchSpace(template, ((0, 1),), orientations=("diagonal",))


def test_punctured_only_restriction():
    template = dpjscc.load_fixture("p04_r1_base")  # channel column 5 punctured
    space = off_diagonal_space(template, punctured_only=True)
    results = enumerate_search(space)
    # linking column 2 maps to channel column 5 (punctured): cell (0, 1) free;
    # cell (1, 0) maps to transmitted column 4: forced zero
    assert all(a[1] == 0 for a, _ in results)
    assert len(results) == 4


def test_de_matches_enumeration_on_tiny_space(p04_results):
    _, results = p04_results
    template = dpjscc.load_fixture("p04_r1_base")
    space = SearchSpace(template, ((0, 1),), orientations=("upper",))
    de = de_optimize(space, DEParams(pop_size=8, generations=10), seed=3)
    best_enum = enumerate_search(space)[0]
    assert de.assignment == best_enum[0]
    assert abs(de.threshold_db - best_enum[1]) < 1e-9


def test_de_never_worse_than_template():
    space = off_diagonal_space(dpjscc.load_fixture("p04_r1_base"))
    de = de_optimize(space, DEParams(pop_size=10, generations=8), seed=1)
    template_db = dict(enumerate_search(space))[(0, 0)]
    assert de.threshold_db <= template_db
    assert de.history[-1][1] == de.threshold_db
    assert all(math.isfinite(v) for _, v, _ in de.history)


def test_de_deterministic():
    space = off_diagonal_space(dpjscc.load_fixture("p04_r1_base"))
    a = de_optimize(space, DEParams(pop_size=8, generations=6), seed=7)
    b = de_optimize(space, DEParams(pop_size=8, generations=6), seed=7)
    assert a.assignment == b.assignment and a.history == b.history


def test_all_emitted_assignments_feasible(p04_results):
    space, results = p04_results
    for assignment, _ in results:
        code = space.build(assignment)
        assert code is not None
        link = code.link.entries
        assert (link.diagonal() == 1).all()


def test_lower_triangle_space_shape():
    space = lower_triangle_space(dpjscc.load_fixture("p14_r1_base"))
    assert space.free_cells == ((1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2))
    assert space.orientations == ("lower",)
