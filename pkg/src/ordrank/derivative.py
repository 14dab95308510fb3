"""Set derivatives and their iteration ranks.

A derivative maps closed sets to smaller closed sets; iterating from the
whole space until the empty set is reached counts the stages, and that
count is the rank.  Three concrete derivatives are provided: the
separation derivative of a pair of sets, the oscillation derivative of a
step function at a threshold (plus its one-sided variant), and the
convergence derivative of a sequence template at a threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .functions import SeqTemplate, StepFunction
from .ordinals import Ordinal, natural
from .params import SymbolicSetError
from .topology import RepSet, Space, ValidationError


@dataclass(frozen=True)
class Derivative:
    """A first-class shrinking map on sets, with identity metadata."""

    kind: str
    label: str
    fn: Callable[[RepSet], RepSet]

    def __call__(self, f: RepSet) -> RepSet:
        out = self.fn(f)
        # contraction is part of the contract; enforce it structurally
        return out.inter(f)

    def __str__(self) -> str:
        return self.label


def separation_derivative(a: RepSet, b: RepSet) -> Derivative:
    """F |-> cl(F & A) & cl(F & B)."""

    def fn(f: RepSet) -> RepSet:
        return f.inter(a).closure().inter(f.inter(b).closure())

    return Derivative("separation", f"D[sep A={a}; B={b}]", fn)


def oscillation_derivative(f: StepFunction, eps) -> Derivative:
    """Points of F where the local oscillation of the step function is >= eps.

    Closed form for step functions: the union over value pairs at least eps
    apart of cl(F & piece_i) & cl(F & piece_j).
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("oscillation threshold must be positive")
    pairs = [
        (pi, pj)
        for i, (vi, pi) in enumerate(f.pieces)
        for j, (vj, pj) in enumerate(f.pieces)
        if i < j and abs(vi - vj) >= eps
    ]

    def fn(s: RepSet) -> RepSet:
        out = RepSet.empty(f.space)
        for pi, pj in pairs:
            out = out.union(s.inter(pi).closure().inter(s.inter(pj).closure()))
        return out

    return Derivative("oscillation", f"D[osc eps={eps}]", fn)


def one_sided_oscillation_derivative(f: StepFunction, eps) -> Derivative:
    """One-sided variant: keep x when values >= eps away from f(x) accumulate.

    Unlike the two-sided derivative its output need not be closed (a point
    can be a limit of kept points whose own values sit closer to the
    accumulating piece), but it is still a shrinking monotone map and the
    rank sandwich against the two-sided version holds.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("oscillation threshold must be positive")

    def fn(s: RepSet) -> RepSet:
        out = RepSet.empty(f.space)
        for j, (vj, pj) in enumerate(f.pieces):
            far = RepSet.empty(f.space)
            for vi, pi in f.pieces:
                if abs(vi - vj) >= eps:
                    far = far.union(pi)
            out = out.union(s.inter(pj).closure().inter(s.inter(far)))
        return out

    return Derivative("oscillation-one-sided", f"D[osc0 eps={eps}]", fn)


def convergence_derivative(template: SeqTemplate, eps) -> Derivative:
    """Points where the sequence's tail discrepancies stay >= eps locally.

    Computed as the stabilized intersection over N of
    closure(F & Tail_N), with the tail sets supplied by the template in
    parametric form.  Raises TemplateSymbolicError (via the template) when
    the template is outside the symbolically supported family.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("convergence threshold must be positive")
    tails = template.tail_family(eps)

    def fn(s: RepSet) -> RepSet:
        family = tails.inter_concrete(s).closure()
        family.check_decreasing()
        return family.limit().inter(s)

    return Derivative("convergence", f"D[conv eps={eps} of {template.describe()}]", fn)


NON_TERMINATION_DEFAULT_CAP = 64


def default_cap(space: Space) -> int:
    return 10 * space.exponent + 16


@dataclass
class RankResult:
    """Outcome of iterating a derivative from a domain set."""

    rank: Ordinal | None  # None when the iteration stalled or hit the cap
    trace: list[RepSet]
    stalled_at: RepSet | None = None

    @property
    def terminated(self) -> bool:
        return self.rank is not None

    def rank_int(self) -> int:
        if self.rank is None:
            raise ValidationError("iteration did not terminate")
        return self.rank.to_int()


def iterate_rank(d: Derivative, domain: RepSet, cap: int | None = None) -> RankResult:
    """Iterate d from the domain; rank = least stage with empty iterate.

    A repeated nonempty iterate (a stall) or exceeding the cap yields the
    non-termination sentinel (rank None) carrying the stalled set.
    """
    if cap is None:
        cap = default_cap(domain.space)
    if cap < 1:
        raise ValidationError("iteration cap must be >= 1")
    trace = [domain]
    current = domain
    step = 0
    while not current.is_empty():
        nxt = d(current)
        if not nxt.subset_of(current):
            raise AssertionError(f"derivative expanded its input: {d}")
        if not nxt.is_empty() and current.subset_of(nxt):
            return RankResult(None, trace, stalled_at=nxt)
        trace.append(nxt)
        current = nxt
        step += 1
        if step > cap and not current.is_empty():
            return RankResult(None, trace, stalled_at=current)
    return RankResult(natural(len(trace) - 1), trace)


@dataclass
class ComparisonReport:
    """Containment check of two derivatives plus the rank consequence."""

    contained_on_samples: bool
    witness: RepSet | None
    rank_1: RankResult | None = None
    rank_2: RankResult | None = None
    ranks_ordered: bool | None = None


def compare_derivatives(
    d1: Derivative,
    d2: Derivative,
    samples: list[RepSet],
    domain: RepSet,
    cap: int | None = None,
) -> ComparisonReport:
    """Check D1(F) <= D2(F) on the samples; on success verify rk(D1) <= rk(D2)."""
    for f in samples:
        left, right = d1(f), d2(f)
        if not left.subset_of(right):
            return ComparisonReport(False, left.diff(right))
    r1 = iterate_rank(d1, domain, cap)
    r2 = iterate_rank(d2, domain, cap)
    ordered = None
    if r1.terminated and r2.terminated:
        ordered = r1.rank <= r2.rank
    return ComparisonReport(True, None, r1, r2, ordered)
