"""Step functions, decreasing closed chains, and convergent sequence templates.

These are the finitely-representable stand-ins for bounded functions of the
first Baire class: a step function is a finite partition of the space into
digit-constraint sets with one rational value per piece; a chain is a
decreasing sequence of closed sets whose alternating difference carves out
an ambiguous set; a sequence template describes a pointwise-convergent
sequence of continuous step functions in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .params import Affine, ParamBox, ParamConstraint, ParamRepSet, PC_ANY, PC_ZERO, SymbolicSetError
from .topology import (
    ANY,
    Box,
    DigitConstraint,
    NONE_ALLOWED,
    Point,
    RepSet,
    Space,
    Subspace,
    ValidationError,
    ZERO_ONLY,
    interval_loc,
    point,
)


@dataclass(frozen=True)
class StepFunction:
    """Finitely many (value, piece) pairs whose pieces partition the space."""

    space: Space
    pieces: tuple[tuple[Fraction, RepSet], ...]

    @staticmethod
    def build(space: Space, pieces, *, validate: bool = True) -> "StepFunction":
        normal: dict[Fraction, RepSet] = {}
        for value, piece in pieces:
            value = Fraction(value)
            if value in normal:
                normal[value] = normal[value].union(piece)
            else:
                normal[value] = piece
        kept = tuple(
            (v, s) for v, s in sorted(normal.items(), key=lambda t: t[0]) if not s.is_empty()
        )
        f = StepFunction(space, kept)
        if validate:
            f.check_partition()
        return f

    @staticmethod
    def constant(space: Space, value) -> "StepFunction":
        return StepFunction(space, ((Fraction(value), RepSet.full(space)),))

    @staticmethod
    def indicator(a: RepSet) -> "StepFunction":
        return StepFunction.build(
            a.space, ((Fraction(1), a), (Fraction(0), a.complement()))
        )

    def check_partition(self) -> None:
        union = RepSet.empty(self.space)
        for i, (_, piece) in enumerate(self.pieces):
            if not piece.inter(union).is_empty():
                raise ValidationError("step function pieces overlap")
            union = union.union(piece)
        if not union.equals(RepSet.full(self.space)):
            raise ValidationError("step function pieces do not cover the space")

    def values(self) -> tuple[Fraction, ...]:
        return tuple(v for v, _ in self.pieces)

    def value_at(self, x: Point) -> Fraction:
        for v, piece in self.pieces:
            if piece.member(x):
                return v
        raise ValidationError(f"no piece contains {x}")

    def piece_of(self, value) -> RepSet:
        value = Fraction(value)
        for v, piece in self.pieces:
            if v == value:
                return piece
        return RepSet.empty(self.space)

    def level_set(self, relation: str, c) -> RepSet:
        """Union of the pieces whose value satisfies the relation against c."""
        c = Fraction(c)
        tests = {
            "le": lambda v: v <= c,
            "lt": lambda v: v < c,
            "ge": lambda v: v >= c,
            "gt": lambda v: v > c,
            "eq": lambda v: v == c,
        }
        if relation not in tests:
            raise ValidationError(f"unknown relation {relation!r}")
        out = RepSet.empty(self.space)
        for v, piece in self.pieces:
            if tests[relation](v):
                out = out.union(piece)
        return out

    def gaps(self) -> tuple[Fraction, ...]:
        """All positive pairwise value differences, ascending."""
        vals = self.values()
        out = sorted({abs(a - b) for a in vals for b in vals if a != b})
        return tuple(out)

    def is_continuous(self) -> bool:
        return all(piece.is_clopen() for _, piece in self.pieces)

    def is_usc(self) -> bool:
        """Upper semicontinuity: every upper level set is closed."""
        return all(self.level_set("ge", v).is_closed() for v in self.values())

    def restrict_to(self, sub: Subspace) -> "StepFunction":
        """The restriction as a partition of the subspace universe.

        The complement piece is padded so the result is a step function on
        the full space that agrees with `self` on the subspace; rank
        computations relative to the subspace only ever look at the
        intersection with it.
        """
        pieces = [(v, piece.inter(sub.universe)) for v, piece in self.pieces]
        return StepFunction.build(self.space, pieces, validate=False)

    def __str__(self) -> str:
        return "{ " + "; ".join(f"{v} on {s}" for v, s in self.pieces) + " }"


def scale_add(f: StepFunction, g: StepFunction, a, b) -> StepFunction:
    """a*f + b*g on the common refinement of the two partitions."""
    a, b = Fraction(a), Fraction(b)
    out = []
    for vf, pf in f.pieces:
        for vg, pg in g.pieces:
            piece = pf.inter(pg)
            if not piece.is_empty():
                out.append((a * vf + b * vg, piece))
    return StepFunction.build(f.space, out, validate=False)


def remap(f: StepFunction, mapping, *, monotone: str | None = None) -> StepFunction:
    """Relabel values through an explicit finite map, merging equal pieces.

    `monotone` may assert 'strict' or 'weak' monotonicity of the map on f's
    value list; the assertion is checked, not trusted.
    """
    table = {Fraction(k): Fraction(v) for k, v in dict(mapping).items()}
    vals = f.values()
    missing = [v for v in vals if v not in table]
    if missing:
        raise ValidationError(f"remap table missing values {missing}")
    if monotone is not None:
        images = [table[v] for v in vals]
        ok = all(x < y for x, y in zip(images, images[1:])) if monotone == "strict" else all(
            x <= y for x, y in zip(images, images[1:])
        )
        if not ok:
            raise ValidationError(f"remap is not {monotone}ly monotone on the value list")
    return StepFunction.build(f.space, ((table[v], piece) for v, piece in f.pieces), validate=False)


def mult_indicator(f: StepFunction, closed_set: RepSet) -> StepFunction:
    """f * chi_F: f on the set, zero outside."""
    out = [(v, piece.inter(closed_set)) for v, piece in f.pieces]
    out.append((Fraction(0), closed_set.complement()))
    return StepFunction.build(f.space, out, validate=False)


# -- decreasing closed chains -------------------------------------------------


class ChainValidationError(ValidationError):
    pass


@dataclass(frozen=True)
class ClosedChain:
    """F_0 >= F_1 >= ... of closed sets, F_0 the (sub)space universe."""

    space: Space
    sets: tuple[RepSet, ...]

    @staticmethod
    def build(space: Space, sets, *, universe: RepSet | None = None) -> "ClosedChain":
        sets = tuple(sets)
        if not sets:
            raise ChainValidationError("chain must be nonempty")
        uni = universe if universe is not None else RepSet.full(space)
        if not sets[0].equals(uni):
            raise ChainValidationError("chain must start at the whole (sub)space")
        for i, s in enumerate(sets):
            if not s.is_closed():
                raise ChainValidationError(f"chain member {i} is not closed")
            if i > 0 and not s.subset_of(sets[i - 1]):
                raise ChainValidationError(f"chain member {i} is not contained in member {i - 1}")
        return ClosedChain(space, sets)

    @property
    def length(self) -> int:
        return len(self.sets)

    def member(self, eta: int) -> RepSet:
        """F_eta with the convention F_eta = empty beyond the chain."""
        return self.sets[eta] if eta < len(self.sets) else RepSet.empty(self.space)

    def transfinite_difference(self) -> RepSet:
        out = RepSet.empty(self.space)
        for eta in range(0, len(self.sets), 2):
            out = out.union(self.member(eta).diff(self.member(eta + 1)))
        return out

    def shifted(self, universe: RepSet | None = None) -> "ClosedChain":
        """The chain prepended with the universe; its difference is the complement
        of this chain's difference relative to the universe (when F_0 = universe)."""
        uni = universe if universe is not None else RepSet.full(self.space)
        return ClosedChain(self.space, (uni,) + self.sets)

    def ring_of(self, x: Point) -> int:
        """Largest eta with x in F_eta (x must lie in F_0)."""
        level = -1
        for eta, s in enumerate(self.sets):
            if s.member(x):
                level = eta
            else:
                break
        if level < 0:
            raise ValidationError(f"{x} is not in the chain's universe")
        return level

    def __str__(self) -> str:
        return "[" + ", ".join(str(s) for s in self.sets) + "]"


# -- sequence templates --------------------------------------------------------


class TemplateError(ValidationError):
    pass


class TemplateSymbolicError(TemplateError):
    """A template whose tail sets fall outside the symbolically supported forms."""


class SeqTemplate:
    """A finitely-described pointwise-convergent sequence of continuous step
    functions.  Concrete kinds implement the stage functions, the limit, and
    the parametric tail sets used by the convergence derivative."""

    space: Space

    def stage_function(self, k: int) -> StepFunction:
        raise NotImplementedError

    def eval_at(self, k: int, x: Point) -> Fraction:
        return self.stage_function(k).value_at(x)

    def limit_function(self) -> StepFunction:
        raise NotImplementedError

    def value_set(self) -> tuple[Fraction, ...]:
        raise NotImplementedError

    def gaps(self) -> tuple[Fraction, ...]:
        vals = self.value_set()
        return tuple(sorted({abs(a - b) for a in vals for b in vals if a != b}))

    def tail_family(self, eps: Fraction) -> ParamRepSet:
        """Parametric form of N |-> {y : sup_{n,m>=N} |f_n(y)-f_m(y)| >= eps}."""
        raise NotImplementedError

    def stabilization_bound(self, digit_bound: int) -> int:
        """A stage past which every point with digits <= digit_bound has
        constant value; justifies truncating oracle evaluations."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstTemplate(SeqTemplate):
    """f_k = f for every k; f must itself be continuous."""

    step: StepFunction

    def __post_init__(self) -> None:
        if not self.step.is_continuous():
            raise TemplateError("constant template requires a continuous step function")

    @property
    def space(self) -> Space:
        return self.step.space

    def stage_function(self, k: int) -> StepFunction:
        return self.step

    def limit_function(self) -> StepFunction:
        return self.step

    def value_set(self) -> tuple[Fraction, ...]:
        return self.step.values()

    def tail_family(self, eps: Fraction) -> ParamRepSet:
        return ParamRepSet.empty(self.space)

    def stabilization_bound(self, digit_bound: int) -> int:
        return 0

    def describe(self) -> str:
        return f"const {self.step}"


@dataclass(frozen=True)
class BlockTemplate(SeqTemplate):
    """One family of half-open blocks  (w^p*i + lo, w^p*i + lo + width(k)]
    for i < count(k), carrying `value`, against a constant background.

    Membership of a fixed point is nondecreasing in k (the certificate is
    structural: width and count have non-negative slopes), so the sequence
    converges pointwise to `value` on the union over k and to the background
    elsewhere.
    """

    space: Space
    value: Fraction
    scale: int  # p >= 1
    low: int  # lo >= 0
    width: tuple[int, int]  # width(k) = width[0] + width[1]*k
    count: tuple[int, int]  # count(k) = count[0] + count[1]*k
    background: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if not (1 <= self.scale <= self.space.exponent):
            raise TemplateError("block scale must be within the space")
        if self.low < 0 or self.width[0] < 0 or self.width[1] < 0:
            raise TemplateError("block bounds must be non-negative")
        if self.count[0] < 0 or self.count[1] < 0:
            raise TemplateError("block count must be non-negative")
        if self.value == self.background:
            raise TemplateError("block value must differ from the background")

    def _width_at(self, k: int) -> int:
        return self.width[0] + self.width[1] * k

    def _count_at(self, k: int) -> int:
        return self.count[0] + self.count[1] * k

    def region_at(self, k: int) -> RepSet:
        p, klen = self.scale, self.space.exponent
        w, cnt = self._width_at(k), self._count_at(k)
        if w <= 0 or cnt <= 0:
            return RepSet.empty(self.space)
        cons = [ANY] * klen
        for t in range(p + 1, klen):
            cons[t] = ZERO_ONLY
        cons[p] = DigitConstraint.allow(range(cnt))
        for t in range(1, p):
            cons[t] = ZERO_ONLY
        cons[0] = DigitConstraint.allow(range(self.low + 1, self.low + w + 1))
        return RepSet.from_boxes(self.space, (Box(self.space, tuple(cons), False),))

    def limit_region(self) -> RepSet:
        p, klen = self.scale, self.space.exponent
        cons = [ANY] * klen
        for t in range(p + 1, klen):
            cons[t] = ZERO_ONLY
        cons[p] = ANY if self.count[1] > 0 else DigitConstraint.allow(range(self.count[0]))
        for t in range(1, p):
            cons[t] = ZERO_ONLY
        if self.width[1] > 0:
            cons[0] = DigitConstraint.at_least(self.low + 1)
        else:
            cons[0] = DigitConstraint.allow(range(self.low + 1, self.low + self.width[0] + 1))
        if self.count[1] == 0 and self.count[0] == 0:
            return RepSet.empty(self.space)
        if self.width[1] == 0 and self.width[0] == 0:
            return RepSet.empty(self.space)
        return RepSet.from_boxes(self.space, (Box(self.space, tuple(cons), False),))

    def region_param(self) -> ParamRepSet:
        """The stage-N region with parametric digit bounds."""
        p, klen = self.scale, self.space.exponent
        cons: list[ParamConstraint] = [PC_ANY] * klen
        for t in range(p + 1, klen):
            cons[t] = PC_ZERO
        for t in range(1, p):
            cons[t] = PC_ZERO
        if self.count[1] > 0:
            cons[p] = ParamConstraint(ANY, None, Affine(self.count[1], self.count[0] - 1))
        else:
            cons[p] = ParamConstraint(DigitConstraint.allow(range(self.count[0])))
        if self.width[1] > 0:
            cons[0] = ParamConstraint(
                DigitConstraint.at_least(self.low + 1), None, Affine(self.width[1], self.low + self.width[0])
            )
        else:
            cons[0] = ParamConstraint(
                DigitConstraint.allow(range(self.low + 1, self.low + self.width[0] + 1))
            )
        return ParamRepSet(self.space, (ParamBox(self.space, tuple(cons), False),))

    def stage_function(self, k: int) -> StepFunction:
        return _block_stage(self, k)

    def limit_function(self) -> StepFunction:
        region = self.limit_region()
        return StepFunction.build(
            self.space, ((self.value, region), (self.background, region.complement())), validate=False
        )

    def value_set(self) -> tuple[Fraction, ...]:
        return tuple(sorted({self.value, self.background}))

    def tail_family(self, eps: Fraction) -> ParamRepSet:
        # the value flips at most once per point (membership is waxing), so a
        # pair of stages >= N differs by >= eps iff the gap qualifies and the
        # point joins the region strictly after N
        if eps > abs(self.value - self.background):
            return ParamRepSet.empty(self.space)
        out: list[ParamBox] = []
        p = self.scale
        for lb in ParamRepSet.lift(self.limit_region()).boxes:
            # limit region minus stage-N region: negate the two parametric
            # bounds one at a time
            if self.count[1] > 0:
                cons = list(lb.constraints)
                cons[p] = cons[p].intersect(
                    ParamConstraint(ANY, Affine(self.count[1], self.count[0]), None)
                )
                out.append(ParamBox(self.space, tuple(cons), False))
            if self.width[1] > 0:
                cons = list(lb.constraints)
                cons[0] = cons[0].intersect(
                    ParamConstraint(ANY, Affine(self.width[1], self.low + self.width[0] + 1), None)
                )
                out.append(ParamBox(self.space, tuple(cons), False))
        return ParamRepSet(self.space, tuple(out))

    def stabilization_bound(self, digit_bound: int) -> int:
        # a point with digits <= B has joined (or never joins) once count and
        # width clear B
        bound = digit_bound + self.low + 1
        return bound + max(self.count[0], self.width[0]) + 1

    def describe(self) -> str:
        w0, w1 = self.width
        c0, c1 = self.count
        return (
            f"blocks value={self.value} scale=w^{self.scale} low={self.low} "
            f"width={w0}+{w1}k count={c0}+{c1}k"
        )


@dataclass(frozen=True)
class CollarTemplate(SeqTemplate):
    """The canonical sequence attached to a chain: stage k replaces each chain
    member by a clopen collar approximation and takes the alternating
    difference, so the stages converge pointwise to the characteristic
    function of the chain's transfinite difference.

    Collar radii are staggered by chain level (level eta uses radius k+eta),
    which forces a point's stage-level profile to step down through
    consecutive levels; that is what makes the tail sets expressible as
    parametric boxes.
    """

    chain: ClosedChain

    @property
    def space(self) -> Space:
        return self.chain.space

    # radius used for level eta at stage k
    def _radius(self, k: int, eta: int) -> int:
        return k + eta

    def collar_region(self, closed: RepSet, radius: int) -> RepSet:
        """Union of (lam[radius], lam] over the limit members lam of the set,
        without the members themselves."""
        return self._collar_param(closed, Affine(1, 0)).instantiate(radius).diff(closed)

    def _collar_param(self, closed: RepSet, radius: Affine) -> ParamRepSet:
        """Parametric collar: strictly-below-lam parts for every limit member."""
        k = self.space.exponent
        out: list[ParamBox] = []
        for b in closed.boxes:
            if b.digit_part_empty():
                if b.top:
                    out.extend(self._top_collar(radius))
                continue
            if b.top:
                out.extend(self._top_collar(radius))
            for j in range(1, k):
                cj = b.constraints[j]
                down = cj.shift_down_positive()
                if down.is_empty():
                    continue
                if not all(b.constraints[t].contains_zero() for t in range(j)):
                    continue
                upper = tuple(ParamConstraint(c) for c in b.constraints[j + 1:])
                # x_{j-1} > radius
                cons = (
                    (PC_ANY,) * (j - 1)
                    + (ParamConstraint(ANY, radius.plus(1), None),)
                    + (ParamConstraint(down),)
                    + upper
                )
                out.append(ParamBox(self.space, cons, False))
                # x_{j-1} = radius with a nonzero lower digit
                if j >= 2:
                    for t in range(j - 1):
                        cons2 = [PC_ANY] * (j - 1)
                        cons2[t] = ParamConstraint(DigitConstraint.at_least(1))
                        cons2 = (
                            tuple(cons2)
                            + (ParamConstraint(ANY, radius, radius),)
                            + (ParamConstraint(down),)
                            + upper
                        )
                        out.append(ParamBox(self.space, cons2, False))
        return ParamRepSet(self.space, tuple(out))

    def _top_collar(self, radius: Affine) -> list[ParamBox]:
        k = self.space.exponent
        boxes = [
            ParamBox(
                self.space,
                (PC_ANY,) * (k - 1) + (ParamConstraint(ANY, radius.plus(1), None),),
                False,
            )
        ]
        for t in range(k - 1):
            cons = [PC_ANY] * k
            cons[t] = ParamConstraint(DigitConstraint.at_least(1))
            cons[k - 1] = ParamConstraint(ANY, radius, radius)
            boxes.append(ParamBox(self.space, tuple(cons), False))
        return boxes

    def approx_member(self, eta: int, k: int) -> RepSet:
        """N_k(F_eta): the chain member together with its stage-k collar."""
        f_eta = self.chain.member(eta)
        if f_eta.is_empty():
            return f_eta
        if eta == 0:
            return f_eta  # collars never leave the universe
        return f_eta.union(self.collar_region(f_eta, self._radius(k, eta)))

    def stage_function(self, k: int) -> StepFunction:
        return _collar_stage(self, k)

    def limit_function(self) -> StepFunction:
        return StepFunction.indicator(self.chain.transfinite_difference())

    def value_set(self) -> tuple[Fraction, ...]:
        return (Fraction(0), Fraction(1))

    def tail_family(self, eps: Fraction) -> ParamRepSet:
        # staggered radii make the level profile step through consecutive
        # levels, so the value flips after stage N exactly on the points
        # still inside some deeper collar at stage N
        if eps > Fraction(1):
            return ParamRepSet.empty(self.space)
        out = ParamRepSet.empty(self.space)
        for eta in range(1, self.chain.length):
            f_eta = self.chain.member(eta)
            if f_eta.is_empty():
                continue
            collar = self._collar_param(f_eta, Affine(1, eta))
            out = out.union(collar.diff_concrete(f_eta))
        return out

    def stabilization_bound(self, digit_bound: int) -> int:
        return digit_bound + self.chain.length + 2

    def describe(self) -> str:
        return f"collars of chain len={self.chain.length}"


@lru_cache(maxsize=512)
def _collar_stage(template: "CollarTemplate", k: int) -> StepFunction:
    region = RepSet.empty(template.space)
    for eta in range(0, template.chain.length, 2):
        region = region.union(
            template.approx_member(eta, k).diff(template.approx_member(eta + 1, k))
        )
    return StepFunction.indicator(region)


@lru_cache(maxsize=512)
def _block_stage(template: "BlockTemplate", k: int) -> StepFunction:
    region = template.region_at(k)
    return StepFunction.build(
        template.space,
        ((template.value, region), (template.background, region.complement())),
        validate=False,
    )


def eval_seq(template: SeqTemplate, k: int, x: Point) -> Fraction:
    """f_k(x) for the sequence described by the template."""
    return template.eval_at(k, x)
