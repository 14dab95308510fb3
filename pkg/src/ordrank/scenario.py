"""The scenario DSL: space and object declarations plus a command list.

Grammar (one statement per line, '#' comments):

    space K=2
    set NAME = d0 >= 1; d1 in {0,2} | top          # '|'-separated boxes
    set NAME = ~OTHER | inter(A, B) | union(A, B) | diff(A, B)
    func NAME = { 0 on SET; 1/2 on SET; 1 on rest }
    chain NAME = [X, SET, ...]
    seq NAME = template { family value=1 pieces=(w*i, w*i + k] for i < k }
    seq NAME = template { const FUNC }
    seq NAME = template { collar CHAIN }
    rank-alpha FUNC | rank-beta FUNC | rank-gamma-upper FUNC SEQ
    iterate sep A B | iterate osc FUNC EPS | iterate osc0 FUNC EPS | iterate conv SEQ EPS
    report FUNC [SEQ]
    convert chain-from-derivative A B [as NAME]
    approx FUNC eps=1/4
    separate FUNC p=0 q=1
    verify axioms

Box clauses: `dI in {a,b}`, `dI notin {a,b}`, `dI >= n`, `dI any`, `top`,
`notop`, `all`, `nothing`.  A bare digit box contains the top point exactly
when all its constraints allow zero; `top`/`notop` overrides.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .functions import (
    BlockTemplate,
    ClosedChain,
    CollarTemplate,
    ConstTemplate,
    SeqTemplate,
    StepFunction,
)
from .topology import ANY, Box, DigitConstraint, NONE_ALLOWED, RepSet, Space, ValidationError


class ScenarioSyntaxError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class Command:
    verb: str
    args: dict
    line_no: int


@dataclass
class Scenario:
    space: Space
    sets: dict[str, RepSet] = field(default_factory=dict)
    functions: dict[str, StepFunction] = field(default_factory=dict)
    chains: dict[str, ClosedChain] = field(default_factory=dict)
    templates: dict[str, SeqTemplate] = field(default_factory=dict)
    commands: list[Command] = field(default_factory=list)
    template_sources: dict[str, str] = field(default_factory=dict)
    set_sources: dict[str, str] = field(default_factory=dict)
    func_sources: dict[str, str] = field(default_factory=dict)
    chain_sources: dict[str, str] = field(default_factory=dict)


def parse_fraction(text: str, line_no: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioSyntaxError(line_no, f"bad rational {text!r}: {exc}")


# -- set expressions -----------------------------------------------------------


def _parse_digit_clause(space: Space, clause: str, line_no: int) -> tuple[int | None, DigitConstraint | None, bool | None]:
    """Returns (digit index, constraint, top override)."""
    clause = clause.strip()
    if clause == "top":
        return None, None, True
    if clause == "notop":
        return None, None, False
    m = re.fullmatch(r"d(\d+)\s+(.*)", clause)
    if not m:
        raise ScenarioSyntaxError(line_no, f"bad digit clause {clause!r}")
    idx = int(m.group(1))
    if idx >= space.exponent:
        raise ScenarioSyntaxError(line_no, f"digit d{idx} outside space with K={space.exponent}")
    body = m.group(2).strip()
    if body == "any":
        return idx, ANY, None
    m2 = re.fullmatch(r">=\s*(\d+)", body)
    if m2:
        return idx, DigitConstraint.at_least(int(m2.group(1))), None
    m2 = re.fullmatch(r"(in|notin)\s*\{([0-9,\s]*)\}", body)
    if m2:
        vals = [int(v) for v in m2.group(2).replace(",", " ").split()]
        cons = DigitConstraint.allow(vals) if m2.group(1) == "in" else DigitConstraint.exclude(vals)
        return idx, cons, None
    raise ScenarioSyntaxError(line_no, f"bad digit constraint {body!r}")


def _parse_box(space: Space, text: str, line_no: int) -> Box:
    text = text.strip()
    if text == "all":
        return Box(space, (ANY,) * space.exponent, True)
    if text == "nothing":
        return Box(space, (NONE_ALLOWED,) + (ANY,) * (space.exponent - 1), False)
    if text == "top":
        return Box(space, (NONE_ALLOWED,) + (ANY,) * (space.exponent - 1), True)
    constraints: list[DigitConstraint] = [ANY] * space.exponent
    top_override: bool | None = None
    for clause in text.split(";"):
        idx, cons, top = _parse_digit_clause(space, clause, line_no)
        if top is not None:
            top_override = top
        else:
            constraints[idx] = constraints[idx].intersect(cons)
    box = Box(space, tuple(constraints), False)
    top = box.default_top() if top_override is None else top_override
    return Box(space, tuple(constraints), top)


def parse_set_expr(scn: Scenario, text: str, line_no: int) -> RepSet:
    text = text.strip()
    if text == "X":
        return RepSet.full(scn.space)
    if text == "empty":
        return RepSet.empty(scn.space)
    if text.startswith("~"):
        return parse_set_expr(scn, text[1:], line_no).complement()
    m = re.fullmatch(r"(union|inter|diff)\s*\((.*)\)", text)
    if m:
        inner = _split_top_level(m.group(2), ",")
        if len(inner) != 2:
            raise ScenarioSyntaxError(line_no, f"{m.group(1)} needs two arguments")
        lhs = parse_set_expr(scn, inner[0], line_no)
        rhs = parse_set_expr(scn, inner[1], line_no)
        return getattr(lhs, {"union": "union", "inter": "inter", "diff": "diff"}[m.group(1)])(rhs)
    m = re.fullmatch(r"closure\s*\((.*)\)", text)
    if m:
        return parse_set_expr(scn, m.group(1), line_no).closure()
    if re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", text):
        if text in scn.sets:
            return scn.sets[text]
        raise ScenarioSyntaxError(line_no, f"unknown set name {text!r}")
    boxes = [_parse_box(scn.space, part, line_no) for part in text.split("|")]
    return RepSet.from_boxes(scn.space, boxes)


def _split_top_level(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


# -- statement parsing -----------------------------------------------------------


_TEMPLATE_FAMILY = re.compile(
    r"family\s+value\s*=\s*(?P<value>[-0-9/]+)\s+"
    r"pieces\s*=\s*\(\s*(?P<lo>[^,]+),\s*(?P<hi>[^\]]+)\]\s+"
    r"for\s+i\s*<\s*(?P<count>.+)"
)


def _parse_scale_times_i(text: str, line_no: int) -> int:
    """Accepts  w*i  or  w^p*i  and returns p."""
    text = text.strip()
    m = re.fullmatch(r"w\s*\*\s*i", text)
    if m:
        return 1
    m = re.fullmatch(r"w\^(\d+)\s*\*\s*i", text)
    if m:
        return int(m.group(1))
    raise ScenarioSyntaxError(line_no, f"expected w^p*i block base, got {text!r}")


def _parse_affine_k(text: str, line_no: int) -> tuple[int, int]:
    """Parses  c, k, c*k, k+c, c*k+d  into (const, k-slope)."""
    text = text.strip().replace(" ", "")
    m = re.fullmatch(r"(?:(\d+)\*)?k(?:\+(\d+))?", text)
    if m:
        slope = int(m.group(1)) if m.group(1) else 1
        const = int(m.group(2)) if m.group(2) else 0
        return const, slope
    m = re.fullmatch(r"(\d+)", text)
    if m:
        return int(m.group(1)), 0
    m = re.fullmatch(r"(\d+)\+(?:(\d+)\*)?k", text)
    if m:
        slope = int(m.group(2)) if m.group(2) else 1
        return int(m.group(1)), slope
    raise ScenarioSyntaxError(line_no, f"expected an affine expression in k, got {text!r}")


def _parse_template(scn: Scenario, body: str, line_no: int) -> SeqTemplate:
    body = body.strip()
    if not (body.startswith("template") ):
        raise ScenarioSyntaxError(line_no, "sequence must be declared as template {...}")
    inner = body[len("template"):].strip()
    if not (inner.startswith("{") and inner.endswith("}")):
        raise ScenarioSyntaxError(line_no, "template body must be braced")
    inner = inner[1:-1].strip()
    m = re.fullmatch(r"const\s+([A-Za-z_][A-Za-z_0-9]*)", inner)
    if m:
        name = m.group(1)
        if name not in scn.functions:
            raise ScenarioSyntaxError(line_no, f"unknown function {name!r}")
        return ConstTemplate(scn.functions[name])
    m = re.fullmatch(r"collar\s+([A-Za-z_][A-Za-z_0-9]*)", inner)
    if m:
        name = m.group(1)
        if name not in scn.chains:
            raise ScenarioSyntaxError(line_no, f"unknown chain {name!r}")
        return CollarTemplate(scn.chains[name])
    m = _TEMPLATE_FAMILY.fullmatch(inner)
    if not m:
        raise ScenarioSyntaxError(line_no, f"unrecognized template body {inner!r}")
    value = parse_fraction(m.group("value"), line_no)
    scale = _parse_scale_times_i(m.group("lo"), line_no)
    hi = m.group("hi").strip()
    prefix = m.group("lo").strip()
    if not hi.startswith(prefix):
        raise ScenarioSyntaxError(line_no, "block upper end must extend the lower end")
    rest = hi[len(prefix):].strip()
    if not rest.startswith("+"):
        raise ScenarioSyntaxError(line_no, f"block width missing in {hi!r}")
    w_const, w_slope = _parse_affine_k(rest[1:], line_no)
    c_const, c_slope = _parse_affine_k(m.group("count"), line_no)
    return BlockTemplate(
        scn.space,
        value,
        scale,
        0,
        (w_const, w_slope),
        (c_const, c_slope),
    )


def _parse_func(scn: Scenario, body: str, line_no: int) -> StepFunction:
    body = body.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ScenarioSyntaxError(line_no, "function body must be braced")
    pieces = []
    used = RepSet.empty(scn.space)
    entries = [e for e in _split_top_level(body[1:-1], ";") if e.strip()]
    for entry in entries:
        m = re.fullmatch(r"\s*(?P<val>[-0-9/]+)\s+on\s+(?P<set>.+?)\s*", entry)
        if not m:
            raise ScenarioSyntaxError(line_no, f"bad piece {entry!r}")
        value = parse_fraction(m.group("val"), line_no)
        target = m.group("set").strip()
        piece = used.complement() if target == "rest" else parse_set_expr(scn, target, line_no)
        pieces.append((value, piece))
        used = used.union(piece)
    try:
        return StepFunction.build(scn.space, pieces)
    except ValidationError as exc:
        raise ScenarioSyntaxError(line_no, str(exc))


def _parse_chain(scn: Scenario, body: str, line_no: int) -> ClosedChain:
    body = body.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ScenarioSyntaxError(line_no, "chain body must be bracketed")
    sets = [
        parse_set_expr(scn, part, line_no)
        for part in _split_top_level(body[1:-1], ",")
        if part.strip()
    ]
    try:
        return ClosedChain.build(scn.space, sets)
    except ValidationError as exc:
        raise ScenarioSyntaxError(line_no, str(exc))


_COMMAND_VERBS = (
    "rank-alpha",
    "rank-beta",
    "rank-gamma-upper",
    "iterate",
    "report",
    "convert",
    "approx",
    "separate",
    "verify",
)


def parse_scenario(text: str) -> Scenario:
    scn: Scenario | None = None
    pending: list[tuple[int, str]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if scn is None:
            m = re.fullmatch(r"space\s+K\s*=\s*(\d+)", line)
            if not m:
                raise ScenarioSyntaxError(line_no, "scenario must start with `space K=<n>`")
            scn = Scenario(Space(int(m.group(1))))
            continue
        pending.append((line_no, line))
    if scn is None:
        raise ScenarioSyntaxError(0, "empty scenario: missing space declaration")

    for line_no, line in pending:
        m = re.fullmatch(r"set\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)", line)
        if m:
            scn.sets[m.group(1)] = parse_set_expr(scn, m.group(2), line_no)
            scn.set_sources[m.group(1)] = m.group(2).strip()
            continue
        m = re.fullmatch(r"func\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)", line)
        if m:
            scn.functions[m.group(1)] = _parse_func(scn, m.group(2), line_no)
            scn.func_sources[m.group(1)] = m.group(2).strip()
            continue
        m = re.fullmatch(r"chain\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)", line)
        if m:
            scn.chains[m.group(1)] = _parse_chain(scn, m.group(2), line_no)
            scn.chain_sources[m.group(1)] = m.group(2).strip()
            continue
        m = re.fullmatch(r"seq\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)", line)
        if m:
            scn.templates[m.group(1)] = _parse_template(scn, m.group(2), line_no)
            scn.template_sources[m.group(1)] = m.group(2).strip()
            continue
        verb = line.split()[0]
        if verb not in _COMMAND_VERBS:
            raise ScenarioSyntaxError(line_no, f"unknown statement {verb!r}")
        scn.commands.append(_parse_command(scn, verb, line, line_no))
    return scn


def _require(scn: Scenario, kind: str, name: str, line_no: int):
    table = {
        "set": scn.sets,
        "func": scn.functions,
        "chain": scn.chains,
        "seq": scn.templates,
    }[kind]
    if name not in table:
        raise ScenarioSyntaxError(line_no, f"unknown {kind} name {name!r}")
    return table[name]


def _parse_command(scn: Scenario, verb: str, line: str, line_no: int) -> Command:
    rest = line[len(verb):].strip()
    if verb in ("rank-alpha", "rank-beta"):
        _require(scn, "func", rest, line_no)
        return Command(verb, {"func": rest}, line_no)
    if verb == "rank-gamma-upper":
        parts = rest.split()
        if len(parts) != 2:
            raise ScenarioSyntaxError(line_no, "rank-gamma-upper needs FUNC SEQ")
        _require(scn, "func", parts[0], line_no)
        _require(scn, "seq", parts[1], line_no)
        return Command(verb, {"func": parts[0], "seq": parts[1]}, line_no)
    if verb == "iterate":
        parts = rest.split()
        if not parts:
            raise ScenarioSyntaxError(line_no, "iterate needs a derivative kind")
        kind = parts[0]
        if kind == "sep" and len(parts) == 3:
            _require(scn, "set", parts[1], line_no)
            _require(scn, "set", parts[2], line_no)
            return Command(verb, {"kind": kind, "a": parts[1], "b": parts[2]}, line_no)
        if kind in ("osc", "osc0") and len(parts) == 3:
            _require(scn, "func", parts[1], line_no)
            return Command(
                verb,
                {"kind": kind, "func": parts[1], "eps": parse_fraction(parts[2], line_no)},
                line_no,
            )
        if kind == "conv" and len(parts) == 3:
            _require(scn, "seq", parts[1], line_no)
            return Command(
                verb,
                {"kind": kind, "seq": parts[1], "eps": parse_fraction(parts[2], line_no)},
                line_no,
            )
        raise ScenarioSyntaxError(line_no, f"bad iterate statement {rest!r}")
    if verb == "report":
        parts = rest.split()
        if len(parts) not in (1, 2):
            raise ScenarioSyntaxError(line_no, "report needs FUNC [SEQ]")
        _require(scn, "func", parts[0], line_no)
        if len(parts) == 2:
            _require(scn, "seq", parts[1], line_no)
        return Command(
            verb, {"func": parts[0], "seq": parts[1] if len(parts) == 2 else None}, line_no
        )
    if verb == "convert":
        m = re.fullmatch(
            r"chain-from-derivative\s+([A-Za-z_][A-Za-z_0-9]*)\s+([A-Za-z_][A-Za-z_0-9]*)"
            r"(?:\s+as\s+([A-Za-z_][A-Za-z_0-9]*))?",
            rest,
        )
        if not m:
            raise ScenarioSyntaxError(line_no, f"bad convert statement {rest!r}")
        _require(scn, "set", m.group(1), line_no)
        _require(scn, "set", m.group(2), line_no)
        return Command(
            verb,
            {"what": "chain-from-derivative", "a": m.group(1), "b": m.group(2), "name": m.group(3)},
            line_no,
        )
    if verb == "approx":
        m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*)\s+eps\s*=\s*([-0-9/]+)", rest)
        if not m:
            raise ScenarioSyntaxError(line_no, f"bad approx statement {rest!r}")
        _require(scn, "func", m.group(1), line_no)
        return Command(
            verb, {"func": m.group(1), "eps": parse_fraction(m.group(2), line_no)}, line_no
        )
    if verb == "separate":
        m = re.fullmatch(
            r"([A-Za-z_][A-Za-z_0-9]*)\s+p\s*=\s*([-0-9/]+)\s+q\s*=\s*([-0-9/]+)", rest
        )
        if not m:
            raise ScenarioSyntaxError(line_no, f"bad separate statement {rest!r}")
        _require(scn, "func", m.group(1), line_no)
        return Command(
            verb,
            {
                "func": m.group(1),
                "p": parse_fraction(m.group(2), line_no),
                "q": parse_fraction(m.group(3), line_no),
            },
            line_no,
        )
    if verb == "verify":
        if not rest:
            raise ScenarioSyntaxError(line_no, "verify needs a suite name")
        return Command(verb, {"suite": rest}, line_no)
    raise ScenarioSyntaxError(line_no, f"unknown statement {verb!r}")


# -- canonical printing ------------------------------------------------------------


def print_scenario(scn: Scenario) -> str:
    lines = [f"space K={scn.space.exponent}"]
    for name, src in scn.set_sources.items():
        lines.append(f"set {name} = {src}")
    for name, src in scn.func_sources.items():
        lines.append(f"func {name} = {src}")
    for name, src in scn.chain_sources.items():
        lines.append(f"chain {name} = {src}")
    for name, src in scn.template_sources.items():
        lines.append(f"seq {name} = {src}")
    for cmd in scn.commands:
        lines.append(_print_command(cmd))
    return "\n".join(lines) + "\n"


def _print_command(cmd: Command) -> str:
    a = cmd.args
    if cmd.verb in ("rank-alpha", "rank-beta"):
        return f"{cmd.verb} {a['func']}"
    if cmd.verb == "rank-gamma-upper":
        return f"rank-gamma-upper {a['func']} {a['seq']}"
    if cmd.verb == "iterate":
        if a["kind"] == "sep":
            return f"iterate sep {a['a']} {a['b']}"
        if a["kind"] in ("osc", "osc0"):
            return f"iterate {a['kind']} {a['func']} {a['eps']}"
        return f"iterate conv {a['seq']} {a['eps']}"
    if cmd.verb == "report":
        return f"report {a['func']}" + (f" {a['seq']}" if a["seq"] else "")
    if cmd.verb == "convert":
        out = f"convert chain-from-derivative {a['a']} {a['b']}"
        return out + (f" as {a['name']}" if a["name"] else "")
    if cmd.verb == "approx":
        return f"approx {a['func']} eps={a['eps']}"
    if cmd.verb == "separate":
        return f"separate {a['func']} p={a['p']} q={a['q']}"
    if cmd.verb == "verify":
        return f"verify {a['suite']}"
    raise ValueError(f"unprintable command {cmd.verb}")
