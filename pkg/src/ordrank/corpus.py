"""Seeded corpus of spaces, sets, chains and functions for the test suites.

Everything is generated from an explicit `random.Random(seed)` so suite
runs are reproducible byte for byte.  The corpus also carries the named
block-parity family: the characteristic function of the points whose least
nonzero digit falls in an even w^2-block, which realizes growing separation
ranks as the space exponent grows.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .functions import ClosedChain, StepFunction
from .topology import ANY, Box, DigitConstraint, RepSet, Space

DEFAULT_SEED = 0
MAX_DIGIT_CONSTANT = 4


def random_constraint(rng: random.Random) -> DigitConstraint:
    roll = rng.random()
    if roll < 0.45:
        return ANY
    size = rng.randint(1, 3)
    values = rng.sample(range(MAX_DIGIT_CONSTANT + 1), size)
    if roll < 0.8:
        return DigitConstraint.allow(values)
    return DigitConstraint.exclude(values)


def random_box(rng: random.Random, space: Space) -> Box:
    cons = tuple(random_constraint(rng) for _ in range(space.exponent))
    top = rng.random() < 0.3
    return Box(space, cons, top)


def random_repset(rng: random.Random, space: Space, max_boxes: int = 3) -> RepSet:
    n = rng.randint(1, max_boxes)
    return RepSet.from_boxes(space, tuple(random_box(rng, space) for _ in range(n)))


def random_closed_set(rng: random.Random, space: Space) -> RepSet:
    return random_repset(rng, space).closure()


def random_chain(rng: random.Random, space: Space, max_length: int = 6) -> ClosedChain:
    length = rng.randint(1, max_length)
    sets = [RepSet.full(space)]
    current = RepSet.full(space)
    for _ in range(length - 1):
        current = current.inter(random_closed_set(rng, space))
        sets.append(current)
    return ClosedChain.build(space, sets)


def random_step_function(
    rng: random.Random, space: Space, max_values: int = 3
) -> StepFunction:
    n = rng.randint(2, max_values)
    values = rng.sample(range(-4, 9), n)
    pieces = []
    remaining = RepSet.full(space)
    for v in values[:-1]:
        piece = random_repset(rng, space).inter(remaining)
        remaining = remaining.diff(piece)
        pieces.append((Fraction(v, rng.choice((1, 2, 4))), piece))
    pieces.append((Fraction(values[-1]), remaining))
    return StepFunction.build(space, pieces)


# -- the named block-parity family ---------------------------------------------


def least_index_block(space: Space, block: int) -> RepSet:
    """Points whose least nonzero digit position lies in {2*block, 2*block+1}
    (the top point counts as position K)."""
    k = space.exponent
    out = []
    for pos in (2 * block, 2 * block + 1):
        if pos < k:
            cons = [ANY] * k
            for t in range(pos):
                cons[t] = DigitConstraint.allow((0,))
            cons[pos] = DigitConstraint.at_least(1)
            out.append(Box(space, tuple(cons), False))
        elif pos == k:
            out.append(Box(space, (DigitConstraint.allow(()),) + (ANY,) * (k - 1), True))
    return RepSet.from_boxes(space, out)


def parity_sets(space: Space) -> tuple[RepSet, RepSet]:
    """(A, B): A the even-block points, B the odd-block points plus zero."""
    a = RepSet.empty(space)
    b = RepSet.empty(space)
    for block in range(space.exponent // 2 + 1):
        part = least_index_block(space, block)
        if block % 2 == 0:
            a = a.union(part)
        else:
            b = b.union(part)
    b = b.union(a.union(b).complement())  # the zero point goes to the B side
    return a, b


def parity_function(space: Space) -> StepFunction:
    a, _ = parity_sets(space)
    return StepFunction.indicator(a)


# -- assembled corpus ------------------------------------------------------------


@dataclass
class Corpus:
    seed: int
    spaces: list[Space]
    sets: list[RepSet]
    closed_sets: list[RepSet]
    set_pairs: list[tuple[RepSet, RepSet]]
    chains: list[ClosedChain]
    functions: list[StepFunction]

    @staticmethod
    def generate(
        seed: int = DEFAULT_SEED,
        *,
        sets_per_space: int = 6,
        chains_per_space: int = 3,
        functions_per_space: int = 3,
        max_exponent: int = 5,
    ) -> "Corpus":
        rng = random.Random(seed)
        spaces = [Space(k) for k in range(1, max_exponent + 1)]
        sets: list[RepSet] = []
        closed: list[RepSet] = []
        chains: list[ClosedChain] = []
        functions: list[StepFunction] = []
        for sp in spaces:
            for _ in range(sets_per_space):
                sets.append(random_repset(rng, sp))
            for _ in range(chains_per_space):
                chains.append(random_chain(rng, sp))
            for _ in range(functions_per_space):
                functions.append(random_step_function(rng, sp))
            functions.append(parity_function(sp))
        closed = [s.closure() for s in sets]
        pairs = []
        for f in functions:
            vals = f.values()
            for p, q in zip(vals, vals[1:]):
                pairs.append((f.level_set("le", p), f.level_set("ge", q)))
        return Corpus(seed, spaces, sets, closed, pairs, chains, functions)
