"""Exact arithmetic for ordinals below epsilon_0 in Cantor normal form.

An ordinal is a finite sum  w^e1*c1 + w^e2*c2 + ...  with exponents
(themselves ordinals) strictly decreasing and integer coefficients >= 1.
The empty sum is 0.  On top of the order and the arithmetic this module
provides the coarse comparison `lesssim` (every w-power bound on the right
argument also bounds the left one) and its induced equivalence `approx`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    """Cantor normal form: tuple of (exponent, coefficient) terms."""

    terms: tuple[tuple["Ordinal", int], ...] = ()

    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero())

    def to_int(self) -> int:
        if self.is_zero():
            return 0
        if not self.is_finite():
            raise ValueError(f"not a finite ordinal: {self}")
        return self.terms[0][1]

    def leading_exponent(self) -> "Ordinal":
        if self.is_zero():
            raise ValueError("0 has no leading term")
        return self.terms[0][0]

    def check(self) -> None:
        """Validate the CNF invariants (strictly decreasing exponents, coeffs >= 1)."""
        for i, (e, c) in enumerate(self.terms):
            if c < 1:
                raise ValueError(f"coefficient {c} < 1 in {self.terms}")
            e.check()
            if i > 0 and cmp_ordinal(self.terms[i - 1][0], e) <= 0:
                raise ValueError(f"exponents not strictly decreasing in {self.terms}")

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, Ordinal):
            return NotImplemented
        return cmp_ordinal(self, other) < 0

    def __add__(self, other: "Ordinal | int") -> "Ordinal":
        return add_ordinal(self, coerce(other))

    def __radd__(self, other: "Ordinal | int") -> "Ordinal":
        return add_ordinal(coerce(other), self)

    def __mul__(self, other: "Ordinal | int") -> "Ordinal":
        return mul_ordinal(self, coerce(other))

    def __rmul__(self, other: "Ordinal | int") -> "Ordinal":
        return mul_ordinal(coerce(other), self)

    def __str__(self) -> str:
        return format_ordinal(self)

    def __repr__(self) -> str:
        return f"Ordinal[{format_ordinal(self)}]"


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def natural(n: int) -> Ordinal:
    if n < 0:
        raise ValueError("ordinals are non-negative")
    return ZERO if n == 0 else Ordinal(((ZERO, n),))


def coerce(x: "Ordinal | int") -> Ordinal:
    return natural(x) if isinstance(x, int) else x


def cmp_ordinal(a: Ordinal, b: Ordinal) -> int:
    """Total order on CNF: -1, 0 or 1."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = cmp_ordinal(ea, eb)
        if c != 0:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    if len(a.terms) != len(b.terms):
        return -1 if len(a.terms) < len(b.terms) else 1
    return 0


def add_ordinal(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal sum; terms of `a` below b's leading exponent are absorbed."""
    if b.is_zero():
        return a
    if a.is_zero():
        return b
    e1, c1 = b.terms[0]
    kept = []
    for e, c in a.terms:
        if cmp_ordinal(e, e1) > 0:
            kept.append((e, c))
        else:
            if cmp_ordinal(e, e1) == 0:
                c1 += c
            break
    return Ordinal(tuple(kept) + ((e1, c1),) + b.terms[1:])


def mul_ordinal(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal product, distributing over the right argument's CNF terms."""
    if a.is_zero() or b.is_zero():
        return ZERO
    ae, ac = a.terms[0]
    out = ZERO
    for e, c in b.terms:
        if e.is_zero():
            out = add_ordinal(out, Ordinal(((ae, ac * c),) + a.terms[1:]))
        else:
            out = add_ordinal(out, Ordinal(((add_ordinal(ae, e), c),)))
    return out


def omega_pow(e: Ordinal) -> Ordinal:
    """The ordinal w^e (a single CNF term with coefficient 1)."""
    return Ordinal(((e, 1),))


def envelope(x: Ordinal) -> Ordinal:
    """Least eta >= 1 with x <= w^eta.  envelope(0) = 1 by convention."""
    if cmp_ordinal(x, OMEGA) <= 0:
        return ONE
    e1, c1 = x.terms[0]
    if len(x.terms) == 1 and c1 == 1:
        return e1
    return add_ordinal(e1, ONE)


def lesssim(a: Ordinal, b: Ordinal) -> bool:
    """True iff every bound b <= w^eta (eta >= 1) implies a <= w^eta."""
    return cmp_ordinal(envelope(a), envelope(b)) <= 0


def approx(a: Ordinal, b: Ordinal) -> bool:
    return lesssim(a, b) and lesssim(b, a)


def lesssim_quantified(a: Ordinal, b: Ordinal, etas: "list[Ordinal]") -> bool:
    """The raw quantified form of lesssim, restricted to the supplied etas.

    Used by tests to confirm the envelope characterization: by monotonicity
    of  x <= w^eta  in eta, checking etas up to (max leading exponent + 1)
    decides the full quantified statement.
    """
    for eta in etas:
        if cmp_ordinal(eta, ONE) < 0:
            continue
        bound = omega_pow(eta)
        if cmp_ordinal(b, bound) <= 0 and cmp_ordinal(a, bound) > 0:
            return False
    return True


# -- text syntax -------------------------------------------------------------
#
# 0 | naturals | w | w^E | w^E*c, summed with '+'.  The exponent E is a
# natural, 'w', or a parenthesized ordinal expression.


def format_ordinal(o: Ordinal) -> str:
    if o.is_zero():
        return "0"
    parts = []
    for e, c in o.terms:
        if e.is_zero():
            parts.append(str(c))
            continue
        if cmp_ordinal(e, ONE) == 0:
            base = "w"
        elif e.is_finite():
            base = f"w^{e.to_int()}"
        elif cmp_ordinal(e, OMEGA) == 0:
            base = "w^w"
        else:
            base = f"w^({format_ordinal(e)})"
        parts.append(base if c == 1 else f"{base}*{c}")
    return " + ".join(parts)


class OrdinalSyntaxError(ValueError):
    pass


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> None:
        if self.peek() != ch:
            raise OrdinalSyntaxError(f"expected {ch!r} at position {self.pos} in {self.text!r}")
        self.pos += 1

    def int_lit(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise OrdinalSyntaxError(f"expected integer at position {start} in {self.text!r}")
        return int(self.text[start:self.pos])


def _parse_atom(s: _Scanner) -> Ordinal:
    ch = s.peek()
    if ch.isdigit():
        return natural(s.int_lit())
    if ch != "w":
        raise OrdinalSyntaxError(f"expected term at position {s.pos} in {s.text!r}")
    s.take("w")
    expo = ONE
    if s.peek() == "^":
        s.take("^")
        ch = s.peek()
        if ch.isdigit():
            expo = natural(s.int_lit())
        elif ch == "w":
            s.take("w")
            expo = OMEGA
        elif ch == "(":
            s.take("(")
            expo = _parse_sum(s)
            s.take(")")
        else:
            raise OrdinalSyntaxError(f"bad exponent at position {s.pos} in {s.text!r}")
    coeff = 1
    if s.peek() == "*":
        s.take("*")
        coeff = s.int_lit()
        if coeff < 1:
            raise OrdinalSyntaxError("coefficient must be >= 1")
    return mul_ordinal(omega_pow(expo), natural(coeff))


def _parse_sum(s: _Scanner) -> Ordinal:
    total = _parse_atom(s)
    while s.peek() == "+":
        s.take("+")
        total = add_ordinal(total, _parse_atom(s))
    return total


def parse_ordinal(text: str) -> Ordinal:
    s = _Scanner(text)
    out = _parse_sum(s)
    s.skip_ws()
    if s.pos != len(s.text):
        raise OrdinalSyntaxError(f"trailing input at position {s.pos} in {text!r}")
    return out
