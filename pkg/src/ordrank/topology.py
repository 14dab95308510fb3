"""The ambient space [0, w^K] and its decidable algebra of digit-constraint sets.

A point below w^K is its vector of CNF digits (d_0 is the coefficient of
w^0, d_{K-1} of w^{K-1}); the top point w^K carries a separate flag and the
all-zero digit vector.  Sets are finite unions of boxes, one finite-or-
cofinite constraint per digit, so membership, Boolean algebra, emptiness,
closure and least-element-above are all exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .ordinals import Ordinal, ZERO, natural, omega_pow, add_ordinal, mul_ordinal


class SpaceMismatchError(ValueError):
    pass


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class Space:
    """The compact ordinal interval [0, w^K] with the order topology."""

    exponent: int  # K >= 1

    def __post_init__(self) -> None:
        if self.exponent < 1:
            raise ValidationError("space exponent K must be >= 1")

    @property
    def k(self) -> int:
        return self.exponent

    def __str__(self) -> str:
        return f"[0, w^{self.exponent}]"


@dataclass(frozen=True, order=False)
class Point:
    """A point of [0, w^K]: digit vector, or the top point w^K itself."""

    digits: tuple[int, ...]
    is_top: bool = False

    def key(self) -> tuple:
        # top sorts above every digit vector; digit vectors sort by
        # most-significant digit first
        return (1 if self.is_top else 0, tuple(reversed(self.digits)))

    def __lt__(self, other: "Point") -> bool:
        return self.key() < other.key()

    def __le__(self, other: "Point") -> bool:
        return self.key() <= other.key()

    def __gt__(self, other: "Point") -> bool:
        return self.key() > other.key()

    def __ge__(self, other: "Point") -> bool:
        return self.key() >= other.key()

    def is_zero(self) -> bool:
        return not self.is_top and all(d == 0 for d in self.digits)

    def is_limit(self) -> bool:
        """Limit ordinals: top, or nonzero with least nonzero digit above d_0."""
        if self.is_top:
            return True
        return not self.is_zero() and self.digits[0] == 0

    def least_nonzero(self) -> int | None:
        """Position of the least nonzero digit (None for 0; K for top)."""
        if self.is_top:
            return len(self.digits)
        for i, d in enumerate(self.digits):
            if d:
                return i
        return None

    def to_ordinal(self, space: Space) -> Ordinal:
        if self.is_top:
            return omega_pow(natural(space.exponent))
        out = ZERO
        for i in range(len(self.digits) - 1, -1, -1):
            if self.digits[i]:
                out = add_ordinal(out, mul_ordinal(omega_pow(natural(i)), natural(self.digits[i])))
        return out

    def __str__(self) -> str:
        return "TOP" if self.is_top else "(" + ",".join(map(str, reversed(self.digits))) + ")"


def point(space: Space, *, top: bool = False, **digit_values: int) -> Point:
    """Convenience constructor: point(sp, d0=3, d1=1)."""
    digits = [0] * space.exponent
    for name, v in digit_values.items():
        digits[int(name[1:])] = v
    return Point(tuple(digits), top)


def top_point(space: Space) -> Point:
    return Point((0,) * space.exponent, True)


def zero_point(space: Space) -> Point:
    return Point((0,) * space.exponent, False)


def fundamental_sequence(space: Space, lam: Point, n: int) -> Point:
    """The n-th member of the canonical increasing sequence with supremum lam.

    For a limit with least nonzero digit at position j the sequence lowers
    that digit by one and puts n at position j-1.
    """
    if not lam.is_limit():
        raise ValidationError(f"{lam} is not a limit point")
    k = space.exponent
    if lam.is_top:
        digits = [0] * k
        digits[k - 1] = n
        return Point(tuple(digits))
    j = lam.least_nonzero()
    digits = list(lam.digits)
    digits[j] -= 1
    digits[j - 1] = n
    return Point(tuple(digits))


# -- per-digit constraints ---------------------------------------------------


@dataclass(frozen=True)
class DigitConstraint:
    """A finite or cofinite set of allowed digit values, canonically stored."""

    cofinite: bool
    values: frozenset[int]  # the allowed set, or the excluded set if cofinite

    def __post_init__(self) -> None:
        if any(v < 0 for v in self.values):
            raise ValidationError("digit values are non-negative")

    @staticmethod
    def allow(values) -> "DigitConstraint":
        return DigitConstraint(False, frozenset(values))

    @staticmethod
    def exclude(values) -> "DigitConstraint":
        return DigitConstraint(True, frozenset(values))

    @staticmethod
    def at_least(n: int) -> "DigitConstraint":
        return DigitConstraint(True, frozenset(range(n)))

    def member(self, v: int) -> bool:
        return (v in self.values) != self.cofinite

    def is_empty(self) -> bool:
        return not self.cofinite and not self.values

    def is_any(self) -> bool:
        return self.cofinite and not self.values

    def is_unbounded(self) -> bool:
        return self.cofinite

    def contains_zero(self) -> bool:
        return self.member(0)

    def complement(self) -> "DigitConstraint":
        return DigitConstraint(not self.cofinite, self.values)

    def intersect(self, other: "DigitConstraint") -> "DigitConstraint":
        if not self.cofinite and not other.cofinite:
            return DigitConstraint(False, self.values & other.values)
        if self.cofinite and other.cofinite:
            return DigitConstraint(True, self.values | other.values)
        fin, cof = (self, other) if not self.cofinite else (other, self)
        return DigitConstraint(False, frozenset(v for v in fin.values if v not in cof.values))

    def is_subset_of(self, other: "DigitConstraint") -> bool:
        if not self.cofinite:
            if not other.cofinite:
                return self.values <= other.values
            return not (self.values & other.values)
        if not other.cofinite:
            return False  # a cofinite set never fits inside a finite one
        return other.values <= self.values

    def min_value(self) -> int | None:
        if not self.cofinite:
            return min(self.values) if self.values else None
        v = 0
        while v in self.values:
            v += 1
        return v

    def min_value_above(self, n: int) -> int | None:
        if not self.cofinite:
            bigger = [v for v in self.values if v > n]
            return min(bigger) if bigger else None
        v = n + 1
        while v in self.values:
            v += 1
        return v

    def max_value(self) -> int | None:
        """Largest allowed value, or None when unbounded."""
        if self.cofinite:
            return None
        return max(self.values) if self.values else None

    def shift_up(self) -> "DigitConstraint":
        """{v + 1 : v allowed}  (digit values of limits built on this digit)."""
        if not self.cofinite:
            return DigitConstraint(False, frozenset(v + 1 for v in self.values))
        return DigitConstraint(True, frozenset({0} | {v + 1 for v in self.values}))

    def shift_down_positive(self) -> "DigitConstraint":
        """{v - 1 : v allowed, v >= 1}."""
        if not self.cofinite:
            return DigitConstraint(False, frozenset(v - 1 for v in self.values if v >= 1))
        return DigitConstraint(True, frozenset(v - 1 for v in self.values if v >= 1))

    def max_constant(self) -> int:
        return max(self.values, default=0)

    def __str__(self) -> str:
        vals = "{" + ",".join(map(str, sorted(self.values))) + "}"
        if self.cofinite:
            if not self.values:
                return "any"
            excl = sorted(self.values)
            if excl == list(range(len(excl))):
                return f">= {len(excl)}"
            return f"notin {vals}"
        return f"in {vals}"


ANY = DigitConstraint.exclude(())
ZERO_ONLY = DigitConstraint.allow((0,))
NONE_ALLOWED = DigitConstraint.allow(())


# -- boxes and finite unions -------------------------------------------------


@dataclass(frozen=True)
class Box:
    """A product of digit constraints, plus a flag for the top point.

    The digit part may be empty (some constraint unsatisfiable), which
    together with top=True represents the singleton {w^K}.
    """

    space: Space
    constraints: tuple[DigitConstraint, ...]
    top: bool = False

    def __post_init__(self) -> None:
        if len(self.constraints) != self.space.exponent:
            raise ValidationError("one constraint per digit position required")

    def digit_part_empty(self) -> bool:
        return any(c.is_empty() for c in self.constraints)

    def is_empty(self) -> bool:
        return self.digit_part_empty() and not self.top

    def member(self, x: Point) -> bool:
        if x.is_top:
            return self.top
        return all(c.member(d) for c, d in zip(self.constraints, x.digits))

    def intersect(self, other: "Box") -> "Box":
        return Box(
            self.space,
            tuple(a.intersect(b) for a, b in zip(self.constraints, other.constraints)),
            self.top and other.top,
        )

    def is_subbox_of(self, other: "Box") -> bool:
        if self.top and not other.top:
            return False
        if not self.digit_part_empty():
            if not all(a.is_subset_of(b) for a, b in zip(self.constraints, other.constraints)):
                return False
        return True

    def max_constant(self) -> int:
        return max((c.max_constant() for c in self.constraints), default=0)

    def default_top(self) -> bool:
        """DSL convention: a bare digit box contains the top point exactly
        when every constraint allows 0 (top carries the all-zero vector)."""
        return all(c.contains_zero() for c in self.constraints)

    def __str__(self) -> str:
        if self.digit_part_empty():
            return "top" if self.top else "nothing"
        clauses = [f"d{i} {c}" for i, c in enumerate(self.constraints) if not c.is_any()]
        if self.top != self.default_top():
            clauses.append("top" if self.top else "notop")
        return "; ".join(clauses) if clauses else "all"


def _dedupe_boxes(boxes) -> tuple[Box, ...]:
    """Drop empty and subsumed boxes; stable order for determinism."""
    live = [b for b in boxes if not b.is_empty()]
    out: list[Box] = []
    for b in live:
        if any(b is not o and b.is_subbox_of(o) for o in out):
            continue
        out = [o for o in out if not o.is_subbox_of(b)]
        out.append(b)
    return tuple(out)


@dataclass(frozen=True)
class RepSet:
    """A finite union of boxes over a common space."""

    space: Space
    boxes: tuple[Box, ...]

    @staticmethod
    def from_boxes(space: Space, boxes) -> "RepSet":
        return RepSet(space, _dedupe_boxes(boxes))

    @staticmethod
    def empty(space: Space) -> "RepSet":
        return RepSet(space, ())

    @staticmethod
    def full(space: Space) -> "RepSet":
        return RepSet(space, (Box(space, (ANY,) * space.exponent, True),))

    @staticmethod
    def top_only(space: Space) -> "RepSet":
        k = space.exponent
        return RepSet(space, (Box(space, (NONE_ALLOWED,) + (ANY,) * (k - 1), True),))

    @staticmethod
    def singleton(space: Space, x: Point) -> "RepSet":
        if x.is_top:
            return RepSet.top_only(space)
        cons = tuple(DigitConstraint.allow((d,)) for d in x.digits)
        return RepSet(space, (Box(space, cons, False),))

    def _require_same_space(self, other: "RepSet") -> None:
        if self.space != other.space:
            raise SpaceMismatchError(f"{self.space} vs {other.space}")

    def member(self, x: Point) -> bool:
        return any(b.member(x) for b in self.boxes)

    def union(self, other: "RepSet") -> "RepSet":
        self._require_same_space(other)
        return RepSet.from_boxes(self.space, self.boxes + other.boxes)

    def inter(self, other: "RepSet") -> "RepSet":
        self._require_same_space(other)
        out = [a.intersect(b) for a in self.boxes for b in other.boxes]
        return RepSet.from_boxes(self.space, out)

    def complement(self) -> "RepSet":
        out = RepSet.full(self.space)
        for b in self.boxes:
            out = out.inter(_box_complement(b))
            if out.is_empty():
                break
        return out

    def diff(self, other: "RepSet") -> "RepSet":
        return self.inter(other.complement())

    def symdiff(self, other: "RepSet") -> "RepSet":
        return self.diff(other).union(other.diff(self))

    def is_empty(self) -> bool:
        return not self.boxes

    def subset_of(self, other: "RepSet") -> bool:
        return self.diff(other).is_empty()

    def equals(self, other: "RepSet") -> bool:
        if self.boxes == other.boxes:
            return True
        return self.symdiff(other).is_empty()

    def includes_top(self) -> bool:
        return any(b.top for b in self.boxes)

    def max_constant(self) -> int:
        return max((b.max_constant() for b in self.boxes), default=0)

    # -- order primitives ----------------------------------------------------

    def min_above(self, beta: Point | None) -> Point | None:
        """Least member strictly above beta (least member overall if None)."""
        best: Point | None = None
        for b in self.boxes:
            cand = _box_min_above(b, beta)
            if cand is not None and (best is None or cand < best):
                best = cand
        return best

    def min_point(self) -> Point | None:
        return self.min_above(None)

    def sup_point(self) -> Point | None:
        """Supremum of the set inside [0, w^K]; None when empty.

        For a closed nonempty set this is the maximum element.
        """
        best: Point | None = None
        for b in self.boxes:
            cand = _box_sup(b)
            if cand is not None and (best is None or cand > best):
                best = cand
        return best

    # -- topology ------------------------------------------------------------

    def closure(self) -> "RepSet":
        """Topological closure in the order topology.

        A limit point lam with least nonzero digit at position j is in the
        closure of a box iff the box is compatible with lam's digits above j
        and with lam's digit at j minus one, and its members below position j
        are cofinal in w^j, which for finite/cofinite constraints means the
        constraint at position j-1 is cofinite (lower positions only need to
        be nonempty).  The top point is covered by the j = K case.
        """
        k = self.space.exponent
        extra: list[Box] = []
        for b in self.boxes:
            if b.digit_part_empty():
                continue
            for j in range(1, k + 1):
                if not b.constraints[j - 1].is_unbounded():
                    continue
                if j == k:
                    extra.append(Box(self.space, (NONE_ALLOWED,) + (ANY,) * (k - 1), True))
                    continue
                cons = (
                    (ZERO_ONLY,) * j
                    + (b.constraints[j].shift_up(),)
                    + b.constraints[j + 1:]
                )
                extra.append(Box(self.space, cons, False))
        return RepSet.from_boxes(self.space, self.boxes + tuple(extra))

    def is_closed(self) -> bool:
        return self.closure().equals(self)

    def interior(self) -> "RepSet":
        return self.complement().closure().complement()

    def is_clopen(self) -> bool:
        return self.is_closed() and self.complement().is_closed()

    def __str__(self) -> str:
        if self.is_empty():
            return "empty"
        return " | ".join(str(b) for b in self.boxes)


def _box_complement(b: Box) -> RepSet:
    k = b.space.exponent
    out = []
    for i, c in enumerate(b.constraints):
        if c.is_any():
            continue
        cons = tuple(ANY if t != i else c.complement() for t in range(k))
        out.append(Box(b.space, cons, False))
    if not b.top:
        out.append(Box(b.space, (NONE_ALLOWED,) + (ANY,) * (k - 1), True))
    return RepSet.from_boxes(b.space, out)


def _box_min_above(b: Box, beta: Point | None) -> Point | None:
    k = b.space.exponent
    candidates: list[Point] = []
    if not b.digit_part_empty():
        if beta is None:
            candidates.append(Point(tuple(c.min_value() for c in b.constraints)))
        elif not beta.is_top:
            # the least x > beta agrees with beta above some pivot position,
            # exceeds it there, and is minimal below
            for pivot in range(k - 1, -1, -1):
                if all(b.constraints[t].member(beta.digits[t]) for t in range(pivot + 1, k)):
                    up = b.constraints[pivot].min_value_above(beta.digits[pivot])
                    if up is not None:
                        digits = list(beta.digits)
                        digits[pivot] = up
                        for t in range(pivot):
                            digits[t] = b.constraints[t].min_value()
                        candidates.append(Point(tuple(digits)))
    if b.top and (beta is None or not beta.is_top):
        candidates.append(Point((0,) * k, True))
    return min(candidates) if candidates else None


def _box_sup(b: Box) -> Point | None:
    if b.top:
        return Point((0,) * b.space.exponent, True)
    if b.digit_part_empty():
        return None
    k = b.space.exponent
    digits = [0] * k
    for i in range(k - 1, -1, -1):
        c = b.constraints[i]
        if c.is_unbounded():
            # sup adds w^{i+1} beyond the exact prefix above position i
            if i == k - 1:
                return Point((0,) * k, True)
            digits[i + 1] += 1
            for t in range(i + 1):
                digits[t] = 0
            return Point(tuple(digits))
        digits[i] = c.max_value()
    return Point(tuple(digits))


# -- intervals ---------------------------------------------------------------


def interval_loc(space: Space, lo: Point | None, hi: Point) -> RepSet:
    """The clopen interval (lo, hi]; lo None means [0, hi]."""
    k = space.exponent
    out: list[Box] = []

    def below_or_equal(x: Point) -> list[Box]:
        if x.is_top:
            return [Box(space, (ANY,) * k, True)]
        acc = []
        for pivot in range(k - 1, -1, -1):
            cons = [ANY] * k
            for t in range(pivot + 1, k):
                cons[t] = DigitConstraint.allow((x.digits[t],))
            if x.digits[pivot] > 0:
                cons[pivot] = DigitConstraint.allow(range(x.digits[pivot]))
                acc.append(Box(space, tuple(cons), False))
        acc.append(Box(space, tuple(DigitConstraint.allow((d,)) for d in x.digits), False))
        return acc

    upper = RepSet.from_boxes(space, below_or_equal(hi))
    if lo is None:
        return upper
    lower = RepSet.from_boxes(space, below_or_equal(lo))
    return upper.diff(lower)


# -- closed subspaces --------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A closed nonempty subspace; closures relative to it are absolute."""

    space: Space
    universe: RepSet

    @staticmethod
    def whole(space: Space) -> "Subspace":
        return Subspace(space, RepSet.full(space))

    @staticmethod
    def of(universe: RepSet) -> "Subspace":
        if universe.is_empty():
            raise ValidationError("subspace must be nonempty")
        if not universe.is_closed():
            raise ValidationError("only closed subspaces are restrictable")
        return Subspace(universe.space, universe)

    def restrict(self, s: RepSet) -> RepSet:
        return s.inter(self.universe)

    def closure(self, s: RepSet) -> RepSet:
        # cl_Y(S) = cl(S cap Y) cap Y; the outer intersection is a no-op
        # because Y is closed
        return self.restrict(s).closure()

    def complement(self, s: RepSet) -> RepSet:
        return self.universe.diff(s)
