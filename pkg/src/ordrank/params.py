"""Digit-constraint sets with bounds that grow affinely in one parameter N.

The convergence derivative needs the decreasing family
N |-> closure(F intersect Tail_N) and its intersection over all N.  Tail
sets produced by the supported sequence templates are unions of boxes whose
digit constraints carry affine lower/upper bounds in N, so the whole family
can be manipulated symbolically: closure works exactly as for concrete
boxes (a grows-with-N lower bound behaves like a cofinite constraint at
every N), and the limit over N keeps precisely the boxes whose membership
does not require a digit to track N upward.

A parametric set carries `valid_from`: instantiations are guaranteed to
match the intended family only from that N on (boxes that empty out at
small N are dropped when an operation needs uniform boundedness kinds).
The limit over N is unaffected, since any tail of a decreasing family has
the same intersection.
"""

from __future__ import annotations


from dataclasses import dataclass

from .topology import (
    ANY,
    NONE_ALLOWED,
    ZERO_ONLY,
    Box,
    DigitConstraint,
    RepSet,
    Space,
)


class SymbolicSetError(ValueError):
    """Raised when a parametric manipulation falls outside the supported forms."""


@dataclass(frozen=True)
class Affine:
    """coef*N + const with coef >= 1 (constant bounds live in the base set)."""

    coef: int
    const: int

    def __post_init__(self) -> None:
        if self.coef < 1:
            raise SymbolicSetError("parametric bounds need coef >= 1")

    def at(self, n: int) -> int:
        return self.coef * n + self.const

    def plus(self, d: int) -> "Affine":
        return Affine(self.coef, self.const + d)

    def first_exceeding(self, value: int) -> int:
        """Least N >= 0 with self.at(N) > value (0 if already beyond)."""
        return max(0, (value - self.const) // self.coef + 1)

    def __str__(self) -> str:
        c = f"{self.coef}*N" if self.coef != 1 else "N"
        return c if self.const == 0 else f"{c}{self.const:+d}"


def _affine_max(a: Affine | None, b: Affine | None) -> Affine | None:
    if a is None:
        return b
    if b is None:
        return a
    if a.coef == b.coef:
        return a if a.const >= b.const else b
    raise SymbolicSetError("incomparable parametric lower bounds")


def _affine_min(a: Affine | None, b: Affine | None) -> Affine | None:
    if a is None:
        return b
    if b is None:
        return a
    if a.coef == b.coef:
        return a if a.const <= b.const else b
    raise SymbolicSetError("incomparable parametric upper bounds")


@dataclass(frozen=True)
class ParamConstraint:
    """{v in base : lo(N) <= v <= hi(N)} with optional affine bounds."""

    base: DigitConstraint
    lo: Affine | None = None
    hi: Affine | None = None

    @staticmethod
    def const(base: DigitConstraint) -> "ParamConstraint":
        return ParamConstraint(base)

    def is_parametric(self) -> bool:
        return self.lo is not None or self.hi is not None

    def instantiate(self, n: int) -> DigitConstraint:
        out = self.base
        if self.lo is not None:
            out = out.intersect(DigitConstraint.at_least(max(0, self.lo.at(n))))
        if self.hi is not None:
            h = self.hi.at(n)
            if h < 0:
                return DigitConstraint.allow(())
            out = out.intersect(DigitConstraint.at_least(h + 1).complement())
        return out

    def statically_empty(self) -> bool:
        return self.base.is_empty()

    def dies_at(self) -> int | None:
        """First N from which the constraint is empty forever, if any."""
        if self.base.is_empty():
            return 0
        if self.lo is not None:
            mx = self.base.max_value()
            if mx is not None:
                return self.lo.first_exceeding(mx)
            if self.hi is not None:
                if self.lo.coef > self.hi.coef:
                    # lo outruns hi
                    n = 0
                    while self.lo.at(n) <= self.hi.at(n):
                        n += 1
                    return n
                if self.lo.coef == self.hi.coef and self.lo.const > self.hi.const:
                    return 0
        return None

    def is_unbounded(self) -> bool:
        """Value-unbounded, uniformly in N."""
        return self.base.is_unbounded() and self.hi is None

    def shift_up(self) -> "ParamConstraint":
        return ParamConstraint(
            self.base.shift_up(),
            None if self.lo is None else self.lo.plus(1),
            None if self.hi is None else self.hi.plus(1),
        )

    def intersect(self, other: "ParamConstraint") -> "ParamConstraint":
        return ParamConstraint(
            self.base.intersect(other.base),
            _affine_max(self.lo, other.lo),
            _affine_min(self.hi, other.hi),
        )

    def requires_growth(self) -> bool:
        """Membership of a fixed value fails for large N."""
        return self.lo is not None

    def relax_to_limit(self) -> DigitConstraint:
        """The set of values allowed for all large N (no growing lower bound)."""
        if self.requires_growth():
            raise SymbolicSetError("constraint dies in the limit")
        return self.base

    def __str__(self) -> str:
        parts = [str(self.base)]
        if self.lo is not None:
            parts.append(f">= {self.lo}")
        if self.hi is not None:
            parts.append(f"<= {self.hi}")
        return " & ".join(parts)


PC_ANY = ParamConstraint(ANY)
PC_ZERO = ParamConstraint(ZERO_ONLY)


@dataclass(frozen=True)
class ParamBox:
    space: Space
    constraints: tuple[ParamConstraint, ...]
    top: bool = False

    @staticmethod
    def lift(box: Box) -> "ParamBox":
        return ParamBox(box.space, tuple(ParamConstraint(c) for c in box.constraints), box.top)

    def instantiate(self, n: int) -> Box:
        return Box(self.space, tuple(c.instantiate(n) for c in self.constraints), self.top)

    def statically_empty(self) -> bool:
        return any(c.statically_empty() for c in self.constraints) and not self.top

    def digit_part_dies_at(self) -> int | None:
        worst: int | None = None
        for c in self.constraints:
            d = c.dies_at()
            if d is not None:
                worst = d if worst is None else min(worst, d)
        return worst

    def intersect(self, other: "ParamBox") -> "ParamBox":
        return ParamBox(
            self.space,
            tuple(a.intersect(b) for a, b in zip(self.constraints, other.constraints)),
            self.top and other.top,
        )


def _top_only_box(space: Space) -> Box:
    return Box(space, (NONE_ALLOWED,) + (ANY,) * (space.exponent - 1), True)


@dataclass(frozen=True)
class ParamRepSet:
    """A union of parametric boxes, read as the family N |-> instantiation.

    Instantiations are faithful for N >= valid_from.
    """

    space: Space
    boxes: tuple[ParamBox, ...]
    valid_from: int = 0

    @staticmethod
    def empty(space: Space) -> "ParamRepSet":
        return ParamRepSet(space, ())

    @staticmethod
    def lift(s: RepSet) -> "ParamRepSet":
        return ParamRepSet(s.space, tuple(ParamBox.lift(b) for b in s.boxes))

    def instantiate(self, n: int) -> RepSet:
        return RepSet.from_boxes(self.space, tuple(b.instantiate(n) for b in self.boxes))

    def union(self, other: "ParamRepSet") -> "ParamRepSet":
        return ParamRepSet(
            self.space, self.boxes + other.boxes, max(self.valid_from, other.valid_from)
        )

    def _normalized(self, boxes) -> "ParamRepSet":
        """Drop boxes that die at some N, pushing valid_from past their death."""
        kept: list[ParamBox] = []
        threshold = self.valid_from
        for b in boxes:
            if b.statically_empty():
                continue
            dies = b.digit_part_dies_at()
            if dies is not None:
                if b.top:
                    kept.append(ParamBox.lift(_top_only_box(self.space)))
                threshold = max(threshold, dies)
                continue
            kept.append(b)
        return ParamRepSet(self.space, tuple(kept), threshold)

    def inter_concrete(self, s: RepSet) -> "ParamRepSet":
        out = []
        for pb in self.boxes:
            for cb in ParamRepSet.lift(s).boxes:
                out.append(pb.intersect(cb))
        return self._normalized(out)

    def diff_concrete(self, s: RepSet) -> "ParamRepSet":
        return self.inter_concrete(s.complement())

    def closure(self) -> "ParamRepSet":
        """Symbolic closure; mirrors RepSet.closure constraint-for-constraint.

        Exact for every N >= valid_from because from there on every box's
        boundedness pattern is independent of N.
        """
        base = self._normalized(self.boxes)
        k = self.space.exponent
        extra: list[ParamBox] = []
        for b in base.boxes:
            if any(c.statically_empty() for c in b.constraints):
                continue
            for j in range(1, k + 1):
                if not b.constraints[j - 1].is_unbounded():
                    continue
                if j == k:
                    extra.append(ParamBox.lift(_top_only_box(self.space)))
                    continue
                cons = (
                    (PC_ZERO,) * j
                    + (b.constraints[j].shift_up(),)
                    + b.constraints[j + 1:]
                )
                extra.append(ParamBox(self.space, cons, False))
        return ParamRepSet(self.space, base.boxes + tuple(extra), base.valid_from)

    def limit(self) -> RepSet:
        """Intersection over all N of an inclusion-decreasing family.

        A point stays in the family for every N exactly when some box keeps
        it for arbitrarily large N; boxes with a growing lower bound on any
        digit lose every fixed point, boxes with only growing upper bounds
        keep exactly the points of their relaxed concrete form.
        """
        out: list[Box] = []
        for b in self.boxes:
            if any(
                c.statically_empty() or c.dies_at() is not None or c.requires_growth()
                for c in b.constraints
            ):
                if b.top:
                    out.append(_top_only_box(self.space))
                continue
            out.append(Box(self.space, tuple(c.relax_to_limit() for c in b.constraints), b.top))
        return RepSet.from_boxes(self.space, out)

    def check_decreasing(self, count: int = 3) -> None:
        """Instantiation sanity check for families meant to be antitone."""
        start = self.valid_from
        prev = self.instantiate(start)
        for n in range(start + 1, start + count + 1):
            cur = self.instantiate(n)
            if not cur.subset_of(prev):
                raise SymbolicSetError(f"parametric family is not decreasing at N={n}")
            prev = cur
