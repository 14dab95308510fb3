"""Executable forms of the constructive arguments behind the rank theory.

Each operation here both computes an object (a rank, a chain, a separator,
an approximation) and certifies it: chains are re-validated stage by stage
against derivative iterates, separators are checked to actually separate,
and approximation errors are decided by exact set algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .derivative import (
    Derivative,
    RankResult,
    convergence_derivative,
    iterate_rank,
    one_sided_oscillation_derivative,
    oscillation_derivative,
    separation_derivative,
)
from .functions import (
    ClosedChain,
    CollarTemplate,
    SeqTemplate,
    StepFunction,
    TemplateError,
    mult_indicator,
    remap,
    scale_add,
)
from .ordinals import Ordinal, ONE, natural
from .topology import Point, RepSet, Space, Subspace, ValidationError


class NonTerminationError(ValidationError):
    """A derivative iteration stalled where termination was required."""

    def __init__(self, message: str, stalled_at: RepSet):
        super().__init__(message)
        self.stalled_at = stalled_at


class SeparationError(ValidationError):
    """A claimed separator fails; carries a witness point."""

    def __init__(self, message: str, witness: Point):
        super().__init__(f"{message} (witness {witness})")
        self.witness = witness


def _require_rank(result: RankResult, what: str) -> Ordinal:
    if not result.terminated:
        raise NonTerminationError(f"{what} did not terminate", result.stalled_at)
    return result.rank


# -- level-set pairs of a step function ---------------------------------------


def level_pairs(f: StepFunction) -> list[tuple[Fraction, Fraction, RepSet, RepSet]]:
    """All (p, q, {f<=p}, {f>=q}) for distinct value cuts p < q.

    For a step function the supremum over rational cuts collapses to these
    finitely many pairs: any p' in [c_i, c_{i+1}) yields the same lower
    level set as p = c_i, and likewise for q.
    """
    vals = f.values()
    out = []
    for i, p in enumerate(vals):
        for q in vals[i + 1:]:
            out.append((p, q, f.level_set("le", p), f.level_set("ge", q)))
    return out


# -- the three ranks -----------------------------------------------------------


@dataclass
class PairDetail:
    p: Fraction
    q: Fraction
    result: RankResult


def separation_rank_of_pair(
    a: RepSet, b: RepSet, *, within: RepSet | None = None, cap: int | None = None
) -> RankResult:
    domain = within if within is not None else RepSet.full(a.space)
    return iterate_rank(separation_derivative(a, b), domain, cap)


def separation_rank(
    f: StepFunction, *, within: RepSet | None = None, cap: int | None = None
) -> tuple[Ordinal, list[PairDetail]]:
    """Max over level-set pairs of the separation-derivative rank."""
    domain = within if within is not None else RepSet.full(f.space)
    details = []
    best = ONE if not domain.is_empty() else natural(0)
    for p, q, a, b in level_pairs(f):
        res = iterate_rank(
            separation_derivative(a.inter(domain), b.inter(domain)), domain, cap
        )
        rank = _require_rank(res, f"separation derivative for cuts ({p}, {q})")
        details.append(PairDetail(p, q, res))
        if best < rank:
            best = rank
    return best, details


def oscillation_rank(
    f: StepFunction,
    *,
    within: RepSet | None = None,
    cap: int | None = None,
    one_sided: bool = False,
) -> tuple[Ordinal, list[PairDetail]]:
    """Max over the relevant thresholds (the pairwise value gaps)."""
    domain = within if within is not None else RepSet.full(f.space)
    make = one_sided_oscillation_derivative if one_sided else oscillation_derivative
    details = []
    best = ONE if not domain.is_empty() else natural(0)
    restricted = f if within is None else f.restrict_to(Subspace.of(domain))
    for eps in restricted.gaps():
        res = iterate_rank(make(restricted, eps), domain, cap)
        rank = _require_rank(res, f"oscillation derivative at eps={eps}")
        details.append(PairDetail(eps, eps, res))
        if best < rank:
            best = rank
    return best, details


def convergence_rank_upper(
    template: SeqTemplate, *, within: RepSet | None = None, cap: int | None = None
) -> tuple[Ordinal, list[PairDetail]]:
    """Rank of the convergence derivative over the template's value gaps."""
    domain = within if within is not None else RepSet.full(template.space)
    details = []
    best = ONE if not domain.is_empty() else natural(0)
    for eps in template.gaps():
        res = iterate_rank(convergence_derivative(template, eps), domain, cap)
        rank = _require_rank(res, f"convergence derivative at eps={eps}")
        details.append(PairDetail(eps, eps, res))
        if best < rank:
            best = rank
    return best, details


@dataclass
class GammaBounds:
    lower: Ordinal
    upper: Ordinal | None


def gamma_bounds(
    f: StepFunction,
    template: SeqTemplate | None = None,
    *,
    probe_bound: int = 4,
    cap: int | None = None,
) -> GammaBounds:
    """The reported interval for the convergence rank.

    The true rank minimizes over all admissible sequences and is not
    computable here; the oscillation rank is a lower bound for every such
    sequence, and a supplied template (checked to converge to f on probes)
    gives an upper bound.
    """
    beta, _ = oscillation_rank(f)
    upper = None
    if template is not None:
        check_template_limit(template, f, probe_bound)
        upper, _ = convergence_rank_upper(template, cap=cap)
    return GammaBounds(beta, upper)


def check_template_limit(template: SeqTemplate, f: StepFunction, probe_bound: int) -> None:
    """Probe-verify that the template's limit function equals f."""
    from .oracle import ProbeSet

    limit = template.limit_function()
    stage = template.stabilization_bound(probe_bound)
    settled = template.stage_function(stage)
    for x in ProbeSet(f.space, probe_bound).points():
        lv, fv = limit.value_at(x), f.value_at(x)
        if lv != fv:
            raise TemplateError(f"template limit {lv} != function value {fv} at {x}")
        ev = settled.value_at(x)
        if ev != fv:
            raise TemplateError(
                f"template stage {stage} value {ev} has not reached {fv} at {x}"
            )


# -- chains from derivatives and back ------------------------------------------


def chain_from_derivative(
    a: RepSet, b: RepSet, *, within: RepSet | None = None, cap: int | None = None
) -> ClosedChain:
    """The canonical chain separating A from B: even members are the
    derivative iterates, odd members close off the B-side.

    Validates its own output: the transfinite difference must contain A and
    miss B, and the length is at most twice the derivative rank.
    """
    domain = within if within is not None else RepSet.full(a.space)
    res = iterate_rank(separation_derivative(a, b), domain, cap)
    rank = _require_rank(res, "separation derivative")
    sets: list[RepSet] = []
    for stage in res.trace[:-1]:  # drop the final empty iterate
        sets.append(stage)
        sets.append(stage.inter(b).closure())
    if not sets:
        sets = [domain]
    chain = ClosedChain.build(a.space, _trim_trailing_empty(sets), universe=domain)
    verify_separation(a, b, chain.transfinite_difference())
    if chain.length > 2 * rank.to_int():
        raise AssertionError("constructed chain exceeds twice the derivative rank")
    return chain


def _trim_trailing_empty(sets: list[RepSet]) -> list[RepSet]:
    out = list(sets)
    while len(out) > 1 and out[-1].is_empty():
        out.pop()
    return out


def verify_separation(a: RepSet, b: RepSet, h: RepSet) -> None:
    """Check A <= H and H & B = 0, raising with a witness point otherwise."""
    missed = a.diff(h)
    if not missed.is_empty():
        raise SeparationError("separator misses part of A", missed.min_point())
    overlap = h.inter(b)
    if not overlap.is_empty():
        raise SeparationError("separator meets B", overlap.min_point())


@dataclass
class ChainCertificate:
    """Stage-by-stage witness that the derivative iterates respect a chain."""

    chain_length: int
    stages_checked: int
    rank: Ordinal

    @property
    def certified_upper_bound(self) -> int:
        return self.chain_length


def derivative_bound_from_chain(
    a: RepSet,
    b: RepSet,
    chain: ClosedChain,
    *,
    within: RepSet | None = None,
    cap: int | None = None,
) -> ChainCertificate:
    """Certify  rank(D_{A,B}) <= chain length  for a chain separating A, B.

    First validates the separation precondition, then checks the containment
    D^eta(X) <= F_eta for every eta up to the chain length (with the empty
    set beyond), which is exactly the inductive content of the bound.
    """
    domain = within if within is not None else RepSet.full(a.space)
    verify_separation(a, b, chain.transfinite_difference())
    d = separation_derivative(a, b)
    res = iterate_rank(d, domain, cap)
    rank = _require_rank(res, "separation derivative")
    for eta in range(chain.length + 1):
        iterate = res.trace[eta] if eta < len(res.trace) else RepSet.empty(a.space)
        if not iterate.subset_of(chain.member(eta)):
            witness = iterate.diff(chain.member(eta)).min_point()
            raise SeparationError(
                f"derivative iterate {eta} escapes the chain", witness
            )
    return ChainCertificate(chain.length, chain.length + 1, rank)


# -- structural bounds ----------------------------------------------------------


@dataclass
class UscReport:
    is_usc: bool
    rank: Ordinal | None
    witness_traces: list[RankResult] = field(default_factory=list)


def usc_alpha_bound(f: StepFunction, *, cap: int | None = None) -> UscReport:
    """Upper semicontinuous step functions have separation rank at most 2.

    The argument is executed, not assumed: for each cut pair the upper level
    set is closed, the first iterate lands inside it, and the second must be
    empty; any violation raises.
    """
    if not f.is_usc():
        return UscReport(False, None)
    rank, details = separation_rank(f, cap=cap)
    for det in details:
        b = f.level_set("ge", det.q)
        first = det.result.trace[1] if len(det.result.trace) > 1 else RepSet.empty(f.space)
        if not first.subset_of(b):
            raise AssertionError("usc first iterate escaped the closed upper level set")
    if rank.to_int() > 2:
        raise AssertionError(f"usc function got separation rank {rank}")
    return UscReport(True, rank, [d.result for d in details])


@dataclass
class ProductBoundReport:
    base_rank: Ordinal
    product_rank: Ordinal
    bound: Ordinal
    holds: bool


def product_indicator_bound(
    f: StepFunction,
    closed_set: RepSet,
    *,
    rank_kind: str = "alpha",
    cap: int | None = None,
) -> ProductBoundReport:
    """rank(f * chi_F) <= 1 + rank(f) for closed F, for alpha and beta."""
    if not closed_set.is_closed():
        raise ValidationError("product bound requires a closed set")
    g = mult_indicator(f, closed_set)
    if rank_kind == "alpha":
        base, _ = separation_rank(f, cap=cap)
        prod, _ = separation_rank(g, cap=cap)
    elif rank_kind == "beta":
        base, _ = oscillation_rank(f, cap=cap)
        prod, _ = oscillation_rank(g, cap=cap)
    else:
        raise ValidationError(f"unknown rank kind {rank_kind!r}")
    bound = ONE + base
    return ProductBoundReport(base, prod, bound, prod <= bound)


# -- grid approximation and partitions ------------------------------------------


@dataclass
class GridLevel:
    cut_low: Fraction
    cut_high: Fraction
    separator: RepSet
    chain: ClosedChain
    certificate: ChainCertificate


@dataclass
class GridApproximation:
    approximation: StepFunction
    levels: list[GridLevel]
    max_error: Fraction


def grid_step_approximation(
    f: StepFunction, eps, *, cap: int | None = None
) -> GridApproximation:
    """A step function g with |f - g| <= eps whose construction certifies a
    chain of length <= 2*rank for every grid-level separator.

    Grid values step by eps/2; each consecutive cut pair is separated by the
    canonical chain of its separation derivative, and the partition pieces
    are the separator differences.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("approximation tolerance must be positive")
    step = eps / 2
    vals = f.values()
    lo_idx = _floor_div(min(vals), step)
    hi_idx = _floor_div(max(vals), step) + 1
    alpha_f, _ = separation_rank(f, cap=cap)

    levels: list[GridLevel] = []
    separators: list[tuple[Fraction, RepSet]] = []
    prev_key = None
    for idx in range(lo_idx, hi_idx + 1):
        p = step * idx
        q = step * (idx + 1)
        # consecutive cuts with the same level sets reuse the same separator
        # and contribute nothing new to the partition
        key = (tuple(v <= p for v in vals), tuple(v >= q for v in vals))
        if key == prev_key:
            continue
        prev_key = key
        a = f.level_set("le", p)
        b = f.level_set("ge", q)
        chain = chain_from_derivative(a, b, cap=cap)
        cert = derivative_bound_from_chain(a, b, chain, cap=cap)
        sep = chain.transfinite_difference()
        if chain.length > 2 * alpha_f.to_int():
            raise AssertionError("grid separator chain exceeds 2 * rank(f)")
        levels.append(GridLevel(p, q, sep, chain, cert))
        separators.append((p, sep))

    pieces = []
    used = RepSet.empty(f.space)
    for p, sep in separators:
        piece = sep.diff(used)
        used = used.union(sep)
        if not piece.is_empty():
            pieces.append((p, piece))
    rest = used.complement()
    if not rest.is_empty():
        pieces.append((step * (hi_idx + 1), rest))
    g = StepFunction.build(f.space, pieces, validate=False)

    max_err = _max_abs_difference(f, g)
    if max_err > eps:
        raise AssertionError(f"grid approximation error {max_err} exceeds {eps}")
    return GridApproximation(g, levels, max_err)


def _floor_div(value: Fraction, step: Fraction) -> int:
    q = value / step
    return q.numerator // q.denominator


def _max_abs_difference(f: StepFunction, g: StepFunction) -> Fraction:
    worst = Fraction(0)
    for vf, pf in f.pieces:
        for vg, pg in g.pieces:
            if not pf.inter(pg).is_empty():
                worst = max(worst, abs(vf - vg))
    return worst


@dataclass
class RefinedPiece:
    piece: RepSet
    chain: ClosedChain
    certificate: ChainCertificate


def partition_rank4(chain: ClosedChain, *, cap: int | None = None) -> list[RefinedPiece]:
    """Refine the rings of a chain into pieces with certified 4-chains.

    Every difference of consecutive chain members is separated from its
    complement by the four-element chain (X, X, F_eta, F_eta+1), giving the
    uniform bound rank <= 4 for the refined partition.
    """
    space = chain.space
    x = RepSet.full(space)
    out = []
    for eta in range(chain.length):
        piece = chain.member(eta).diff(chain.member(eta + 1))
        if piece.is_empty():
            continue
        four = ClosedChain.build(space, [x, x, chain.member(eta), chain.member(eta + 1)])
        cert = derivative_bound_from_chain(piece, piece.complement(), four, cap=cap)
        rank, _ = separation_rank(StepFunction.indicator(piece), cap=cap)
        if rank.to_int() > 4:
            raise AssertionError("refined piece exceeded separation rank 4")
        out.append(RefinedPiece(piece, four, cert))
    return out


@dataclass
class RoundTripReport:
    grid: GridApproximation
    piece_chains: list[tuple[RepSet, ClosedChain, ChainCertificate]]
    rebuilt_separators: list[tuple[Fraction, Fraction, RepSet, ChainCertificate]]


def delta_fin_roundtrip(
    f: StepFunction, eps=None, *, cap: int | None = None
) -> RoundTripReport:
    """Finite-partition rank round trip at tolerance eps.

    Direction one: grid-approximate f, certify every piece of the resulting
    finite partition by its own canonical chain.  Direction two: from the
    partition rebuild, for every value cut (p, q) with q - p > 2*eps, the
    separator made of the pieces meeting {f <= p}, check it separates, and
    certify the cut's derivative rank against the rebuilt separator's chain.

    The default tolerance is a quarter of the smallest value gap, so every
    adjacent cut of f qualifies for the second direction.
    """
    if eps is None:
        gaps = f.gaps()
        eps = gaps[0] / 4 if gaps else Fraction(1, 2)
    eps = Fraction(eps)
    grid = grid_step_approximation(f, eps, cap=cap)
    g = grid.approximation

    piece_chains = []
    for _, piece in g.pieces:
        chain = chain_from_derivative(piece, piece.complement(), cap=cap)
        cert = derivative_bound_from_chain(piece, piece.complement(), chain, cap=cap)
        piece_chains.append((piece, chain, cert))

    rebuilt = []
    for p, q, a, b in level_pairs(f):
        if q - p <= 2 * eps:
            continue
        h = RepSet.empty(f.space)
        for _, piece in g.pieces:
            if not piece.inter(a).is_empty():
                h = h.union(piece)
        verify_separation(a, b, h)
        chain = chain_from_derivative(h, h.complement(), cap=cap)
        cert = derivative_bound_from_chain(a, b, chain, cap=cap)
        rebuilt.append((p, q, h, cert))
    return RoundTripReport(grid, piece_chains, rebuilt)


# -- restriction and separator lemmas --------------------------------------------


@dataclass
class RestrictionReport:
    full_rank: Ordinal
    restricted_rank: Ordinal
    holds: bool


def restriction_monotonicity(
    f: StepFunction, universe: RepSet, *, cap: int | None = None
) -> RestrictionReport:
    """Separation rank relative to a closed subspace never exceeds the full
    rank; verified by direct computation on both sides."""
    sub = Subspace.of(universe)
    full, _ = separation_rank(f, cap=cap)
    restricted, _ = separation_rank(f, within=sub.universe, cap=cap)
    return RestrictionReport(full, restricted, restricted <= full)


def restriction_monotonicity_pair(
    a: RepSet, b: RepSet, universe: RepSet, *, cap: int | None = None
) -> RestrictionReport:
    sub = Subspace.of(universe)
    full = _require_rank(separation_rank_of_pair(a, b, cap=cap), "pair derivative")
    restricted = _require_rank(
        separation_rank_of_pair(
            a.inter(sub.universe), b.inter(sub.universe), within=sub.universe, cap=cap
        ),
        "restricted pair derivative",
    )
    return RestrictionReport(full, restricted, restricted <= full)


@dataclass
class SeparatorResult:
    separator: RepSet
    chain: ClosedChain
    certificate: ChainCertificate
    closed_hull_substituted: bool


def build_level_separator(
    f: StepFunction, p, q, *, cap: int | None = None
) -> SeparatorResult:
    """A certified separator between {f <= p} and {f >= q}.

    Works inside the closed union of the two level sets (their closures are
    substituted, with a report flag, when a level set fails to be closed),
    computes the canonical separating chain there, and lifts it to the whole
    space by prepending full-space members so the certificate applies to the
    original cut.
    """
    p, q = Fraction(p), Fraction(q)
    if p >= q:
        raise ValidationError("separator needs p < q")
    a = f.level_set("le", p)
    b = f.level_set("ge", q)
    substituted = False
    a_star, b_star = a, b
    if not a_star.is_closed():
        a_star = a_star.closure()
        substituted = True
    if not b_star.is_closed():
        b_star = b_star.closure()
        substituted = True
    b_star = b_star.diff(a_star)
    y = a_star.union(b_star)

    if a.is_empty():
        empty = RepSet.empty(f.space)
        chain = ClosedChain.build(f.space, [RepSet.full(f.space), RepSet.full(f.space)])
        cert = derivative_bound_from_chain(a, b, chain, cap=cap)
        return SeparatorResult(empty, chain, cert, substituted)

    if y.is_empty():
        raise ValidationError("both level sets empty; nothing to separate")

    sub = Subspace.of(y)
    inner = chain_from_derivative(a_star, b_star, within=y, cap=cap)
    x = RepSet.full(f.space)
    lifted = ClosedChain.build(f.space, [x, x] + list(inner.sets))
    h = lifted.transfinite_difference()
    verify_separation(a, b, h)
    cert = derivative_bound_from_chain(a, b, lifted, cap=cap)
    return SeparatorResult(h, lifted, cert, substituted)


# -- canonical convergent sequence for a chain ------------------------------------


@dataclass
class CanonicalTemplateReport:
    template: CollarTemplate
    target: RepSet
    stage_containments_checked: int


def canonical_gamma_template(
    chain: ClosedChain,
    *,
    probe_bound: int = 4,
    stages_checked: int = 3,
    cap: int | None = None,
) -> CanonicalTemplateReport:
    """The canonical clopen-collar sequence converging to the chain's
    transfinite difference, verified after construction.

    Checks, for a few stages, that each stage function is a continuous step
    function (clopen pieces), that it converges to the right limit on
    probes, and that the convergence-derivative iterates stay inside the
    chain stage by stage.  A chain outside the representable family
    surfaces as a TemplateError rather than a wrong template.
    """
    if not chain.sets[0].equals(RepSet.full(chain.space)):
        raise TemplateError("canonical template needs a full-space chain")
    template = CollarTemplate(chain)
    target = chain.transfinite_difference()

    for k in range(stages_checked):
        fk = template.stage_function(k)
        for _, piece in fk.pieces:
            if not piece.is_clopen():
                raise TemplateError(f"stage {k} piece is not clopen: {piece}")
    check_template_limit(template, StepFunction.indicator(target), probe_bound)

    # derivative trace against the chain: D^eta(X) inside F_eta
    res = iterate_rank(
        convergence_derivative(template, Fraction(1)), RepSet.full(chain.space), cap
    )
    _require_rank(res, "convergence derivative of the canonical template")
    for eta, stage in enumerate(res.trace):
        if not stage.subset_of(chain.member(eta)):
            witness = stage.diff(chain.member(eta)).min_point()
            raise SeparationError(
                f"canonical template derivative stage {eta} escapes the chain", witness
            )
    return CanonicalTemplateReport(template, target, len(res.trace))


# -- rank handles and the uniqueness axiom suite ----------------------------------


@dataclass(frozen=True)
class RankHandle:
    """A rank implementation under test: name plus evaluation callables."""

    name: str
    rank: Callable[..., Ordinal]  # rank(f, within=None) -> Ordinal


def alpha_handle() -> RankHandle:
    def run(f: StepFunction, within: RepSet | None = None) -> Ordinal:
        r, _ = separation_rank(f, within=within)
        return r

    return RankHandle("alpha", run)


def beta_handle() -> RankHandle:
    def run(f: StepFunction, within: RepSet | None = None) -> Ordinal:
        r, _ = oscillation_rank(f, within=within)
        return r

    return RankHandle("beta", run)


def constant_one_handle() -> RankHandle:
    def run(f: StepFunction, within: RepSet | None = None) -> Ordinal:
        return ONE

    return RankHandle("constant-1", run)


@dataclass
class AxiomInstance:
    axiom: str
    description: str
    passed: bool
    witness: str = ""


@dataclass
class AxiomSuiteReport:
    handle_name: str
    instances: list[AxiomInstance]

    def passed_all(self) -> bool:
        return all(i.passed for i in self.instances)

    def failures(self) -> list[AxiomInstance]:
        return [i for i in self.instances if not i.passed]

    def by_axiom(self, axiom: str) -> list[AxiomInstance]:
        return [i for i in self.instances if i.axiom == axiom]


def rank_axiom_suite(
    handle: RankHandle,
    functions: list[StepFunction],
    subspaces: list[RepSet] | None = None,
    *,
    cap: int | None = None,
) -> AxiomSuiteReport:
    """Run the finite-level uniqueness axioms against a rank implementation.

    (1) characteristic complexity: the rank of an indicator sits inside the
        sandwich given by its certified canonical chain length;
    (2) linearity: exact scaling invariance for the handle, plus the
        one-sided-oscillation sum containments behind essential additivity
        (an engine-level check, reported per pair);
    (3) uniform limits: grid approximants bound the rank from above, with
        the oscillation-derivative containment checked en route;
    (4) monotone value remaps: strictly increasing remaps preserve the rank,
        weakly monotone remaps never increase it;
    (5) restriction: the rank relative to a closed subspace never exceeds
        the full rank.
    """
    out: list[AxiomInstance] = []

    for f in functions:
        space = f.space
        # (1) on the indicator of each lower level set
        for p in f.values()[:-1]:
            a = f.level_set("le", p)
            chain = chain_from_derivative(a, a.complement(), cap=cap)
            derivative_bound_from_chain(a, a.complement(), chain, cap=cap)
            rho = handle.rank(StepFunction.indicator(a))
            lo_ok = rho.to_int() <= chain.length
            hi_ok = chain.length <= 2 * rho.to_int()
            out.append(
                AxiomInstance(
                    "1-characteristic",
                    f"rank {rho} vs certified chain length {chain.length}",
                    lo_ok and hi_ok,
                    "" if lo_ok and hi_ok else f"set {a}",
                )
            )

        # (2a) scaling invariance
        for c in (Fraction(2), Fraction(-1), Fraction(1, 3)):
            scaled = scale_add(f, StepFunction.constant(space, 0), c, Fraction(0))
            same = handle.rank(scaled) == handle.rank(f)
            out.append(
                AxiomInstance(
                    "2-linearity",
                    f"scaling by {c}",
                    same,
                    "" if same else f"f {f}",
                )
            )

        # (3) uniform limits via the grid family
        gaps = f.gaps()
        if gaps:
            eps = gaps[0]
            approx = grid_step_approximation(f, eps / 3, cap=cap).approximation
            d_f = oscillation_derivative(f, eps)
            d_g = oscillation_derivative(approx, eps / 3)
            contained = d_f(RepSet.full(space)).subset_of(d_g(RepSet.full(space)))
            rho_ok = handle.rank(f) <= handle.rank(approx)
            out.append(
                AxiomInstance(
                    "3-uniform-limit",
                    f"grid approximant at eps/3={eps/3}",
                    contained and rho_ok,
                    "" if contained and rho_ok else f"f {f}",
                )
            )

        # (4) monotone remaps
        vals = f.values()
        strict = {v: 2 * v + 1 for v in vals}
        weak = {v: min(v, vals[0] + (vals[-1] - vals[0]) / 2) for v in vals}
        r_f = handle.rank(f)
        strict_ok = handle.rank(remap(f, strict, monotone="strict")) == r_f
        weak_ok = handle.rank(remap(f, weak, monotone="weak")) <= r_f
        out.append(
            AxiomInstance(
                "4-remap",
                "strictly increasing and weakly monotone remaps",
                strict_ok and weak_ok,
                "" if strict_ok and weak_ok else f"f {f}",
            )
        )

        # (5) restriction to closed subspaces
        domains = subspaces if subspaces is not None else []
        for universe in domains:
            if universe.space != space or universe.is_empty():
                continue
            restricted = handle.rank(f, within=universe)
            ok = restricted <= r_f
            out.append(
                AxiomInstance(
                    "5-restriction",
                    f"subspace {universe}",
                    ok,
                    "" if ok else f"f {f}",
                )
            )

    # (2b) engine-level additivity containments, once per function pair
    pair_pool = [f for f in functions if len(f.values()) <= 3]
    for f, g in zip(pair_pool, pair_pool[1:]):
        if f.space != g.space:
            continue
        ok = additivity_containments(f, g)
        out.append(
            AxiomInstance(
                "2-linearity",
                "one-sided oscillation sum containments",
                ok,
                "" if ok else f"pair {f} / {g}",
            )
        )
    return AxiomSuiteReport(handle.name, out)


def additivity_containments(
    f: StepFunction, g: StepFunction, *, samples: list[RepSet] | None = None
) -> bool:
    """The two containment conditions behind essential additivity, checked
    for the one-sided oscillation derivatives of f, g and f + g."""
    space = f.space
    total = scale_add(f, g, Fraction(1), Fraction(1))
    gaps = total.gaps()
    if not gaps:
        return True
    eps = gaps[0]
    d = one_sided_oscillation_derivative(total, eps)
    d0 = one_sided_oscillation_derivative(f, eps / 2)
    d1 = one_sided_oscillation_derivative(g, eps / 2)
    sets = samples if samples is not None else [RepSet.full(space)]
    for s in sets:
        closed = s.closure()
        if not d(closed).subset_of(d0(closed).union(d1(closed))):
            return False
        other = closed.complement().closure()
        if not d(closed.union(other)).subset_of(d(closed).union(d(other))):
            return False
    return True


def union_split_rank_bound(
    d: Derivative,
    parts: list[Derivative],
    domain: RepSet,
    max_m: int = 3,
) -> bool:
    """Finite unrolling of the covering-rank induction step:
    if D(F) <= union of D_k(F) and D splits over unions, then
    D^{m*n}(F) <= union of D_k^m(F) for each m up to max_m."""
    n = len(parts)
    for m in range(1, max_m + 1):
        lhs = domain
        for _ in range(m * n):
            lhs = d(lhs)
        rhs = RepSet.empty(domain.space)
        for dk in parts:
            cur = domain
            for _ in range(m):
                cur = dk(cur)
            rhs = rhs.union(cur)
        if not lhs.subset_of(rhs):
            return False
        if lhs.is_empty():
            break
    return True
