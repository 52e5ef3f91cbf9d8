"""Iterative approximations to the Y-cascade probability.

Two routes, both certified against the exact DP rather than trusted:

Tree iteration.  Positions h in [eta_n - 1, 1 - eta_n] form the comfort
zone: from there a single N cannot end the game (h - eta_n >= -1), so
undecided walks keep funnelling back through it.  One iteration expands
the observation tree from the current pool of comfort-zone states until
each branch is absorbed, steps from outside back into the zone (deferred
to the next iteration at its exact position), or hits a per-iteration
depth cap (written off as truncated).  Absorbed-Y mass is a certified
lower bound; deferred plus truncated mass bounds what could still go
either way, giving the upper end.  Leftover mass only shrinks, so the
bracket tightens monotonically in the iteration count.

Sequence enumeration.  When eta_n > eta_y, a Y-cascading path splits
uniquely into single-N blocks Y^i N (climb i steps, give one back) and a
final direct Y-run into the wall; every N costs about
t1 = ceil(eta_n / eta_y) Ys to win back and a clean start needs
r1 = ceil(1 / eta_y) straight Ys.  Summing path probabilities over every
sequence that cascades exactly on its final Y while spending at most m
single-N blocks gives a strict lower bound that converges quickly in m.
The set is prefix-free by construction: a sequence that cascades at its
end is absorbed there, so it cannot be continued into another valid one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from .errors import ParameterError, UnsupportedRegimeError
from .model import DerivedModel, ModelParams, derive
from .walk import BOUNDARY_TOL, ProbInterval

__all__ = [
    "ComfortZone",
    "TreeIterationState",
    "StageDecomposition",
    "comfort_zone",
    "tree_approx",
    "stage_decomposition",
    "sequence_lower_bound",
    "enumerate_cascade_sequences",
]

DEFAULT_DEPTH_CAP = 10**4

# Positions within this tolerance of the comfort-zone edge count as inside;
# keeps exact-arithmetic cases (integer h) classified stably.
_CZ_EDGE_TOL = 1e-12


def _forward_prob(d: DerivedModel, v: str) -> float:
    if v == "G":
        return d.pf_g
    if v == "B":
        return d.pf_b
    raise ParameterError(f"true value v must be 'G' or 'B', got {v!r}")


@dataclass(frozen=True)
class ComfortZone:
    """Closed position band [lo, hi] from which one N cannot absorb."""

    lo: float
    hi: float

    def contains(self, h: float) -> bool:
        return self.lo - _CZ_EDGE_TOL <= h <= self.hi + _CZ_EDGE_TOL


def comfort_zone(derived: DerivedModel) -> ComfortZone:
    return ComfortZone(lo=derived.eta_n - 1.0, hi=1.0 - derived.eta_n)


@dataclass
class TreeIterationState:
    """Running masses across tree iterations; total() stays at 1."""

    acc_y: float = 0.0
    acc_n: float = 0.0
    truncated: float = 0.0
    pool: dict[tuple[int, int], float] = field(default_factory=dict)

    def total(self) -> float:
        return self.acc_y + self.acc_n + self.truncated + sum(self.pool.values())


def tree_approx(
    params: ModelParams,
    v: str,
    m: int,
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> ProbInterval:
    """Bracket the Y-cascade probability with m comfort-zone iterations.

    States are keyed by exact observation counts (n_y, n_n); h is always
    recomputed from them, and states reached along different paths merge.
    """
    if m < 1:
        raise ParameterError(f"iteration count m must be >= 1, got {m!r}")
    if depth_cap < 1:
        raise ParameterError(f"depth_cap must be >= 1, got {depth_cap!r}")
    d = derive(params)
    q = _forward_prob(d, v)
    cz = comfort_zone(d)
    ey, en = d.eta_y, d.eta_n

    state = TreeIterationState(pool={(0, 0): 1.0})
    for _ in range(m):
        if not state.pool:
            break
        # Frontier bucketed by total observations ny + nn.  A state's whole
        # expansion is a function of its counts alone (zone membership
        # included), and every downstream tally is linear in mass, so states
        # reached along different branches merge on their key.
        levels: dict[int, dict[tuple[int, int], float]] = {}
        for (ny, nn), mass in state.pool.items():
            levels.setdefault(ny + nn, {})[ny, nn] = mass
        state.pool = {}
        for _ in range(depth_cap):
            if not levels:
                break
            depth = min(levels)
            frontier = levels.pop(depth)
            for (ny, nn), mass in frontier.items():
                was_inside = cz.contains(ny * ey - nn * en)
                for child_ny, child_nn, child_mass in (
                    (ny + 1, nn, mass * q),
                    (ny, nn + 1, mass * (1.0 - q)),
                ):
                    if child_mass == 0.0:
                        continue
                    ch = child_ny * ey - child_nn * en
                    if ch > 1.0 + BOUNDARY_TOL:
                        state.acc_y += child_mass
                    elif ch < -1.0 - BOUNDARY_TOL:
                        state.acc_n += child_mass
                    elif cz.contains(ch):
                        # entering the zone from outside ends the branch
                        if was_inside:
                            bucket = levels.setdefault(depth + 1, {})
                        else:
                            bucket = state.pool
                        key = (child_ny, child_nn)
                        bucket[key] = bucket.get(key, 0.0) + child_mass
                    else:
                        key = (child_ny, child_nn)
                        bucket = levels.setdefault(depth + 1, {})
                        bucket[key] = bucket.get(key, 0.0) + child_mass
        state.truncated += sum(
            mass for frontier in levels.values() for mass in frontier.values()
        )

    pool_mass = sum(state.pool.values())
    pending = pool_mass + state.truncated
    return ProbInterval(
        y_lower=state.acc_y,
        y_upper=state.acc_y + pending,
        n_mass=state.acc_n,
        pending=pending,
    )


@dataclass(frozen=True)
class StageDecomposition:
    """Geometry of the climb from the start to the right wall.

    r1: consecutive Ys that cascade from the start, ceil(1 / eta_y).
    t1: consecutive Ys that win back a single N, ceil(eta_n / eta_y).
    k_plus_1: number of intermediate stages, r1 - t1; must be >= 1.
    boundaries: stage edges 0, eta_y, ..., K * eta_y, 1 - eta_n, 1.
    """

    r1: int
    t1: int
    k_plus_1: int
    boundaries: tuple[float, ...]


def stage_decomposition(derived: DerivedModel) -> StageDecomposition:
    ey, en = derived.eta_y, derived.eta_n
    if not en > ey:
        raise UnsupportedRegimeError(
            f"stage structure needs eta_n > eta_y, got eta_y={ey!r} eta_n={en!r}"
        )
    r1 = math.ceil(1.0 / ey)
    t1 = math.ceil(en / ey)
    k_plus_1 = r1 - t1
    if k_plus_1 < 1:
        raise UnsupportedRegimeError(
            f"stage structure is empty at these weights (r1={r1}, t1={t1})"
        )
    boundaries = tuple(i * ey for i in range(k_plus_1)) + (1.0 - en, 1.0)
    return StageDecomposition(r1=r1, t1=t1, k_plus_1=k_plus_1, boundaries=boundaries)


def _absorbs_y(h: float) -> bool:
    return h > 1.0 + BOUNDARY_TOL


def _absorbs_n(h: float) -> bool:
    return h < -1.0 - BOUNDARY_TOL


def enumerate_cascade_sequences(
    params: ModelParams, m: int, max_sequences: int | None = None
) -> Iterator[str]:
    """Yield the observation sequences whose probabilities the bound sums.

    Each sequence, replayed through the walk from a fresh start,
    Y-cascades exactly at its final observation with no earlier
    absorption, and spends at most m single-N blocks.  Intended for
    verification on small instances; ``sequence_lower_bound`` sums the
    same set without materialising paths.
    """
    if m < 0:
        raise ParameterError(f"block budget m must be >= 0, got {m!r}")
    d = derive(params)
    stage_decomposition(d)  # regime check
    ey, en = d.eta_y, d.eta_n
    budget = [max_sequences] if max_sequences is not None else [None]

    def h_of(ny: int, nn: int) -> float:
        return ny * ey - nn * en

    def expand(prefix: str, ny: int, nn: int, blocks_left: int) -> Iterator[str]:
        # direct Y-run: the unique shortest all-Y continuation that cascades
        run = 1
        while not _absorbs_y(h_of(ny + run, nn)):
            run += 1
        if budget[0] is not None:
            if budget[0] <= 0:
                return
            budget[0] -= 1
        yield prefix + "Y" * run

        if blocks_left <= 0:
            return
        # single-N blocks Y^i N for every i that keeps the replay alive
        for i in range(run):
            if _absorbs_n(h_of(ny + i, nn + 1)):
                continue
            yield from expand(
                prefix + "Y" * i + "N", ny + i, nn + 1, blocks_left - 1
            )

    yield from expand("", 0, 0, m)


def sequence_lower_bound(params: ModelParams, v: str, m: int) -> float:
    """Summed probability of every cascade path using at most m N-blocks.

    Aggregates over walk states (n_y, n_n) level by level instead of
    materialising sequences; a state's continuation depends only on its
    counts and remaining budget, so this sums exactly the set produced by
    ``enumerate_cascade_sequences``.  Always a strict lower bound on the
    Y-cascade probability.
    """
    if m < 0:
        raise ParameterError(f"block budget m must be >= 0, got {m!r}")
    d = derive(params)
    stage_decomposition(d)  # regime check
    q = _forward_prob(d, v)
    ey, en = d.eta_y, d.eta_n

    bound = 0.0
    frontier: dict[tuple[int, int], float] = {(0, 0): 1.0}
    while frontier:
        next_frontier: dict[tuple[int, int], float] = {}
        for (ny, nn), mass in frontier.items():
            # Y child
            h = (ny + 1) * ey - nn * en
            if _absorbs_y(h):
                bound += mass * q
            else:
                key = (ny + 1, nn)
                next_frontier[key] = next_frontier.get(key, 0.0) + mass * q
            # N child: drops off the enumeration if absorbed or over budget
            if nn + 1 <= m and not _absorbs_n(ny * ey - (nn + 1) * en):
                key = (ny, nn + 1)
                next_frontier[key] = next_frontier.get(key, 0.0) + mass * (1.0 - q)
        frontier = next_frontier
    return bound
