"""Finite truncation of the alternating extension game.

Two strategies take turns growing a finite linear space; the chain and some
diagnostics of its union are recorded.  No genericity claim is attached to
the result: the module produces chains and reports only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, NamedTuple

from .core import (
    GeometryError,
    LinearSpace,
    all_lines,
    degrees,
    induced,
    is_closed,
    parallel_pair_count,
    parallel_pairs,
)
from .planarise import elementary_planarisation, planar_closure


class StrategyReturnedInvalidExtension(GeometryError):
    pass


@dataclass(frozen=True)
class GameState:
    """The chain built so far; ``current`` is its last element."""

    current: LinearSpace
    history: tuple[LinearSpace, ...]
    round: int
    rng_seed: int


@dataclass(frozen=True)
class Strategy:
    """A named move function mapping a state to an extension of current."""

    name: str
    move: Callable[[GameState], LinearSpace]


def _move_rng(state: GameState) -> random.Random:
    return random.Random(state.rng_seed * 1000003 + state.round)


def _free_point(state: GameState) -> LinearSpace:
    space = state.current
    return LinearSpace(space.n_points + 1, space.lines)


def _random_extension(state: GameState) -> LinearSpace:
    """Add a point, randomly on one existing trivial line or free."""
    rng = _move_rng(state)
    space = state.current
    trivial = [ln for ln in all_lines(space) if len(ln) == 2]
    pick = rng.randrange(len(trivial) + 1)
    if pick == len(trivial):
        return _free_point(state)
    ln = trivial[pick]
    new_line = tuple(sorted(ln + (space.n_points,)))
    return LinearSpace(space.n_points + 1, tuple(sorted(space.lines + (new_line,))))


def _closure_strategy(state: GameState) -> LinearSpace:
    """Resolve the least unresolved parallel pair; free point if none."""
    space = state.current
    pairs = parallel_pairs(space)
    if not pairs:
        return _free_point(state)
    result, _ = elementary_planarisation(space, *pairs[0])
    return result


def builtin_strategies() -> list[Strategy]:
    return [
        Strategy("free_point", _free_point),
        Strategy("random_extension", _random_extension),
        Strategy("closure_strategy", _closure_strategy),
    ]


def strategy_by_name(name: str) -> Strategy:
    for s in builtin_strategies():
        if s.name == name:
            return s
    raise GeometryError(f"unknown strategy {name!r}")


@dataclass(frozen=True)
class GameAnalysis:
    """Per-round diagnostics plus a local-closedness probe of the union."""

    sizes: tuple[int, ...]
    degrees: tuple[int, ...]
    parallel_counts: tuple[int, ...]
    probe_size: int
    locally_closed: bool
    open_subsets: tuple[tuple[int, ...], ...]


class PlayResult(NamedTuple):
    state: GameState
    analysis: GameAnalysis


def play(
    start: LinearSpace,
    first: Strategy,
    second: Strategy,
    rounds: int,
    seed: int = 0,
    probe_size: int = 3,
) -> PlayResult:
    """Alternate the two strategies for ``rounds`` moves from ``start``.

    Every move must return a space that has the previous one as induced
    substructure on its points.  The analysis reports degree and parallel
    pair growth per round and whether every subset of the final space with
    at most ``probe_size`` points sits inside a closed induced subspace
    (equivalently: the induced structure on its planar closure is closed).
    """
    state = GameState(current=start, history=(start,), round=0, rng_seed=seed)
    sizes = [start.n_points]
    degs = [degrees(start)[2]]
    par = [parallel_pair_count(start)]
    players = (first, second)
    for step in range(rounds):
        strategy = players[step % 2]
        new = strategy.move(state)
        old = state.current
        if (
            new.n_points < old.n_points
            or induced(new, range(old.n_points)) != old
        ):
            raise StrategyReturnedInvalidExtension(
                f"strategy {strategy.name!r} broke the chain at round {step + 1}"
            )
        state = GameState(
            current=new,
            history=state.history + (new,),
            round=state.round + 1,
            rng_seed=seed,
        )
        sizes.append(new.n_points)
        degs.append(degrees(new)[2])
        par.append(parallel_pair_count(new))

    final = state.current
    open_subsets = []
    for size in range(1, probe_size + 1):
        for subset in combinations(range(final.n_points), size):
            closure = planar_closure(subset, final)
            if not is_closed(induced(final, closure)):
                open_subsets.append(subset)
    analysis = GameAnalysis(
        sizes=tuple(sizes),
        degrees=tuple(degs),
        parallel_counts=tuple(par),
        probe_size=probe_size,
        locally_closed=not open_subsets,
        open_subsets=tuple(open_subsets[:20]),
    )
    return PlayResult(state, analysis)
