"""Deterministic report documents with stable field names.

Reports carry ordered key/value records plus the standing banners about
what is and is not being claimed at finite rank scale.  The structured
format is line oriented (`key=value`), suitable for regression diffing;
the text format groups the same records for reading.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .constructions import (
    GammaBounds,
    chain_from_derivative,
    derivative_bound_from_chain,
    gamma_bounds,
    level_pairs,
    oscillation_rank,
    separation_rank,
)
from .functions import SeqTemplate, StepFunction
from .ordinals import Ordinal
from .topology import RepSet

BANNERS = {
    "vacuity": (
        "all positive finite ordinals are equivalent under the coarse "
        "w-power comparison, so coarse-level statements are exercised via "
        "the exact inequalities inside their proofs"
    ),
    "finite-chains": (
        "chains are finite here; transfinite behaviour is represented by "
        "families unbounded in the space exponent"
    ),
    "gamma-interval": (
        "the convergence rank minimizes over all admissible sequences and "
        "is reported as a bounds interval; equality holds when the bounds meet"
    ),
}


@dataclass
class Report:
    title: str
    seed: int | None = None
    records: list[tuple[str, str]] = field(default_factory=list)
    banners: list[str] = field(default_factory=lambda: list(BANNERS))
    failures: int = 0

    def add(self, key: str, value) -> None:
        self.records.append((key, str(value)))

    def fail(self, key: str, value) -> None:
        self.failures += 1
        self.records.append((f"FAIL.{key}", str(value)))

    def extend(self, other: "Report", prefix: str) -> None:
        self.failures += other.failures
        for k, v in other.records:
            self.records.append((f"{prefix}.{k}", v))

    def structured(self) -> str:
        lines = [f"report.version={__version__}", f"report.title={self.title}"]
        if self.seed is not None:
            lines.append(f"report.seed={self.seed}")
        for name in self.banners:
            lines.append(f"banner.{name}={BANNERS[name]}")
        lines.extend(f"{k}={v}" for k, v in self.records)
        lines.append(f"report.failures={self.failures}")
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        lines = [f"== {self.title} (engine {__version__}) =="]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        for name in self.banners:
            lines.append(f"note: {BANNERS[name]}")
        lines.extend(f"  {k} = {v}" for k, v in self.records)
        lines.append(f"failures: {self.failures}")
        return "\n".join(lines) + "\n"


@dataclass
class RankReport:
    """The full rank summary of one step function."""

    alpha: Ordinal
    alpha1_upper: Ordinal
    beta: Ordinal
    gamma_lower: Ordinal
    gamma_upper: Ordinal | None
    witnesses: list[tuple[str, str]]

    def check_invariants(self) -> None:
        if not (self.alpha <= self.alpha1_upper):
            raise AssertionError("alpha exceeds the constructed chain bound")
        if self.alpha1_upper.to_int() > 2 * self.alpha.to_int():
            raise AssertionError("constructed chain bound exceeds twice alpha")
        if not (self.alpha <= self.beta):
            raise AssertionError("rank order violated: alpha > beta")
        if self.gamma_upper is not None:
            if not (self.beta <= self.gamma_upper):
                raise AssertionError("rank order violated: beta > gamma upper bound")
            if not (self.gamma_lower <= self.gamma_upper):
                raise AssertionError("gamma bounds crossed")


def full_rank_report(
    f: StepFunction, template: SeqTemplate | None = None, *, cap: int | None = None
) -> RankReport:
    """Compute every rank of f, with certified witnesses.

    alpha1_upper is the longest canonical chain over the value cuts, which
    certifies the modified separation rank from above.
    """
    alpha, alpha_details = separation_rank(f, cap=cap)
    beta, _ = oscillation_rank(f, cap=cap)
    witnesses: list[tuple[str, str]] = []
    chain_bound = 1
    for p, q, a, b in level_pairs(f):
        chain = chain_from_derivative(a, b, cap=cap)
        derivative_bound_from_chain(a, b, chain, cap=cap)
        chain_bound = max(chain_bound, chain.length)
        witnesses.append((f"chain[{p},{q}]", str(chain)))
    for det in alpha_details:
        witnesses.append(
            (f"trace[{det.p},{det.q}]", " > ".join(str(s) for s in det.result.trace))
        )
    gb: GammaBounds = gamma_bounds(f, template, cap=cap)
    from .ordinals import natural

    report = RankReport(
        alpha,
        natural(chain_bound) if chain_bound > alpha.to_int() else alpha,
        beta,
        gb.lower,
        gb.upper,
        witnesses,
    )
    report.check_invariants()
    return report


def render_rank_report(name: str, rr: RankReport, out: Report) -> None:
    out.add(f"func.{name}.alpha", rr.alpha)
    out.add(f"func.{name}.alpha1_upper", rr.alpha1_upper)
    out.add(f"func.{name}.beta", rr.beta)
    out.add(f"func.{name}.gamma_lower", rr.gamma_lower)
    out.add(f"func.{name}.gamma_upper", rr.gamma_upper if rr.gamma_upper is not None else "none")
    if rr.gamma_upper is not None and rr.gamma_lower == rr.gamma_upper:
        out.add(f"func.{name}.gamma_exact", rr.gamma_lower)
    for key, value in rr.witnesses:
        out.add(f"func.{name}.witness.{key}", value)
