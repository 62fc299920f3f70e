"""Search over free linking-matrix entries for lower channel thresholds.

Small search spaces are enumerated exhaustively; larger ones run classic
rand/1/bin differential evolution on a continuous relaxation, rounding to
integers (ties toward zero: sparser links decode cheaper) before each
fitness evaluation.  Fitness is the EXIT-chart channel threshold; every
evaluated assignment is cached, so converged populations cost nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .exit_chart import BracketError, channel_threshold
from .protograph import CodeConstraintError, JointCode, TriangularLink

ENUMERATION_GUARD = 100000


class SearchSpaceError(ValueError):
    """The space definition is inconsistent or too large to enumerate."""


@dataclass(frozen=True)
class SearchSpace:
    """Free off-diagonal cells of the linking matrix of a template code.

    free_cells are (row, col) positions within the linking block, both
    0-based; each may take values in [0, max_entry].  orientations lists
    the triangular structures a candidate may satisfy; an assignment is
    feasible if its non-zero pattern fits at least one of them.  With
    punctured_only set, cells whose channel column is transmitted are
    pinned to zero.
    """

    template: JointCode
    free_cells: tuple
    orientations: tuple = ("lower", "upper")
    punctured_only: bool = False

    def __post_init__(self):
        for r, c in self.free_cells:
            if r == c:
                raise SearchSpaceError("diagonal linking entries are fixed at 1")
            if not (0 <= r < self.template.m_s and 0 <= c < self.template.m_s):
                raise SearchSpaceError(f"cell ({r},{c}) outside the linking block")
        for o in self.orientations:
            if o not in ("lower", "upper"):
                raise SearchSpaceError(f"unknown orientation {o!r}")

    @property
    def max_entry(self) -> int:
        return self.template.link.max_entry

    def cell_forced_zero(self, cell) -> bool:
        if not self.punctured_only:
            return False
        r, c = cell
        channel_col = self.template.m_c + c + 1  # 1-based channel column
        return channel_col not in self.template.punctured

    def build(self, assignment) -> Optional[JointCode]:
        """JointCode for an assignment, or None when infeasible."""
        t = self.template.link.entries.copy()
        for (r, c), value in zip(self.free_cells, assignment):
            if value and self.cell_forced_zero((r, c)):
                return None
            t[r, c] = value
        for orientation in self.orientations:
            try:
                link = TriangularLink(t, orientation, self.max_entry)
            except CodeConstraintError:
                continue
            return JointCode(
                source=self.template.source,
                channel=self.template.channel,
                link=link,
                punctured=self.template.punctured,
                p1=self.template.p1,
            )
        return None


def lower_triangle_space(template: JointCode, punctured_only: bool = False) -> SearchSpace:
    """All below-diagonal linking cells, lower orientation only."""
    cells = tuple(
        (r, c) for r in range(template.m_s) for c in range(r)
    )
    return SearchSpace(template, cells, ("lower",), punctured_only)


def off_diagonal_space(template: JointCode, punctured_only: bool = False) -> SearchSpace:
    """Every off-diagonal linking cell, either triangular orientation."""
    cells = tuple(
        (r, c)
        for r in range(template.m_s)
        for c in range(template.m_s)
        if r != c
    )
    return SearchSpace(template, cells, ("lower", "upper"), punctured_only)


class _FitnessCache:
    def __init__(self, space: SearchSpace, threshold_kwargs: dict):
        self.space = space
        self.kwargs = threshold_kwargs
        self.values: dict = {}

    def __call__(self, assignment) -> float:
        key = tuple(int(v) for v in assignment)
        if key in self.values:
            return self.values[key]
        code = self.space.build(key)
        if code is None:
            value = math.inf
        else:
            try:
                value = channel_threshold(code, **self.kwargs).threshold_db
            except (BracketError, CodeConstraintError):
                value = math.inf
        self.values[key] = value
        return value


def enumerate_search(space: SearchSpace, resolution_db: float = 0.001) -> list:
    """Thresholds of every feasible assignment, best first.

    Returns [(assignment tuple, threshold_db)], ascending by threshold then
    by assignment.  Guarded against combinatorial explosion.
    """
    n_candidates = (space.max_entry + 1) ** len(space.free_cells)
    if n_candidates > ENUMERATION_GUARD:
        raise SearchSpaceError(
            f"{n_candidates} candidates exceed the enumeration guard "
            f"({ENUMERATION_GUARD}); use de_optimize"
        )
    fitness = _FitnessCache(space, {"resolution_db": resolution_db})
    results = []
    for assignment in product(range(space.max_entry + 1), repeat=len(space.free_cells)):
        value = fitness(assignment)
        if math.isfinite(value):
            results.append((assignment, value))
    results.sort(key=lambda item: (item[1], item[0]))
    return results


@dataclass
class DEParams:
    pop_size: int = 50
    scale: float = 0.5
    crossover: float = 0.9
    generations: int = 100
    resolution_db: float = 0.001


@dataclass
class DEResult:
    assignment: tuple
    threshold_db: float
    history: list = field(default_factory=list)  # (generation, best_db, best_assignment)
    evaluations: int = 0


def _round_ties_to_zero(x: np.ndarray) -> np.ndarray:
    return np.ceil(x - 0.5).astype(np.int64)


def de_optimize(space: SearchSpace, params: DEParams = None, seed: int = 0) -> DEResult:
    """rand/1/bin differential evolution over the free cells.

    The template's own assignment seeds the population, so the result is
    never worse than the starting design.  Infeasible candidates score
    +inf.  Deterministic for a fixed seed.
    """
    params = params or DEParams()
    rng = np.random.default_rng(seed)
    dim = len(space.free_cells)
    if dim == 0:
        raise SearchSpaceError("no free cells to optimize")
    hi = float(space.max_entry)
    fitness = _FitnessCache(space, {"resolution_db": params.resolution_db})

    pop = rng.uniform(0.0, hi, size=(params.pop_size, dim))
    pop[0] = [float(space.template.link.entries[r, c]) for r, c in space.free_cells]
    fits = np.array([fitness(_round_ties_to_zero(member)) for member in pop])

    history = []
    for gen in range(params.generations):
        for i in range(params.pop_size):
            choices = [j for j in range(params.pop_size) if j != i]
            r1, r2, r3 = rng.choice(choices, size=3, replace=False)
            mutant = pop[r1] + params.scale * (pop[r2] - pop[r3])
            cross = rng.random(dim) < params.crossover
            cross[rng.integers(dim)] = True
            trial = np.clip(np.where(cross, mutant, pop[i]), 0.0, hi)
            trial_fit = fitness(_round_ties_to_zero(trial))
            if trial_fit <= fits[i]:
                pop[i] = trial
                fits[i] = trial_fit
        best = int(np.argmin(fits))
        history.append(
            (gen, float(fits[best]), tuple(_round_ties_to_zero(pop[best]).tolist()))
        )

    best = int(np.argmin(fits))
    best_assignment = tuple(_round_ties_to_zero(pop[best]).tolist())
    return DEResult(
        assignment=best_assignment,
        threshold_db=float(fits[best]),
        history=history,
        evaluations=len(fitness.values),
    )
