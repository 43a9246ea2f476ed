"""Reader and writer for the Galileo textual fault tree dialect.

Accepted statements, one per line, each terminated by ``;``:

    toplevel "T";
    "G" and "A" "B";            gates: and, or, <k>of<n>, pand, por, seq
    "D" fdep "Trigger" "B1";    unconditional dependency
    "D" pdep=0.5 "T" "B1";      probabilistic dependency, p in (0, 1]
    "S" wsp "P" "S1" "S2";      spares: wsp, csp, hsp (one spare semantics,
                                dormancy comes from the BE attributes)
    "B" lambda=0.1 dorm=0.5;    exponential BE; dorm defaults to 1.0
    "B2" prob=0.3;              time-independent BE (static analysis only)

``//`` starts a comment.  Names are double-quoted and 8-bit clean.
Every referenced name must be declared exactly once and exactly one
``toplevel`` statement is required.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InputError
from .model import (
    AND,
    OR,
    PAND,
    POR,
    SEQ,
    Distribution,
    Exponential,
    FaultTree,
    FixedProbability,
    NodeType,
    Tabulated,
    pdep,
    spare,
    validate,
    vot,
)

_GATE_WORDS = {
    "and": AND,
    "or": OR,
    "pand": PAND,
    "por": POR,
    "seq": SEQ,
}
_SPARE_WORDS = ("wsp", "csp", "hsp")
_VOT_RE = re.compile(r"^(\d+)of(\d+)$")
_BE_ATTRS = ("lambda", "dorm", "prob")


class GalileoError(InputError):
    """Parse failure with a source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            message = f"{where}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ParseResult:
    """A validated tree plus the BE declaration order from the file."""

    fault_tree: FaultTree
    be_order: tuple[str, ...]


@dataclass(frozen=True)
class _Token:
    kind: str  # "name" | "word" | "attr" | "semi"
    text: str
    value: str | None
    line: int
    column: int


def _tokenize_line(line: str, lineno: int) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in " \t\r":
            i += 1
            continue
        if line.startswith("//", i):
            break
        col = i + 1
        if ch == '"':
            j = line.find('"', i + 1)
            if j < 0:
                raise GalileoError("unterminated quoted name", lineno, col)
            tokens.append(_Token("name", line[i + 1:j], None, lineno, col))
            i = j + 1
        elif ch == ";":
            tokens.append(_Token("semi", ";", None, lineno, col))
            i += 1
        else:
            j = i
            while j < n and line[j] not in ' \t\r";':
                j += 1
            word = line[i:j]
            if "=" in word:
                key, _, value = word.partition("=")
                tokens.append(_Token("attr", key, value, lineno, col))
            else:
                tokens.append(_Token("word", word, None, lineno, col))
            i = j
    return tokens


def _float_attr(tok: _Token) -> float:
    try:
        return float(tok.value)
    except (TypeError, ValueError):
        raise GalileoError(f"bad numeric value {tok.value!r} for {tok.text}",
                           tok.line, tok.column) from None


@dataclass
class _Declaration:
    name: str
    ntype: NodeType | None
    children: tuple[str, ...]
    dist: Distribution | None
    line: int
    column: int


def parse(text: str) -> ParseResult:
    """Parse Galileo text into a validated fault tree."""
    toplevel: _Token | None = None
    decls: dict[str, _Declaration] = {}
    order: list[str] = []
    references: list[_Token] = []

    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = _tokenize_line(line, lineno)
        if not tokens:
            continue
        if tokens[-1].kind != "semi":
            last = tokens[-1]
            raise GalileoError("statement must end with ';'", last.line,
                               last.column + len(last.text))
        tokens = tokens[:-1]
        if not tokens:
            continue
        for extra in tokens:
            if extra.kind == "semi":
                raise GalileoError("more than one statement on a line",
                                   extra.line, extra.column)

        head = tokens[0]
        if head.kind == "word":
            if head.text != "toplevel":
                raise GalileoError(f"unknown statement {head.text!r}",
                                   head.line, head.column)
            if len(tokens) != 2 or tokens[1].kind != "name":
                raise GalileoError("toplevel expects exactly one quoted name",
                                   head.line, head.column)
            if toplevel is not None:
                raise GalileoError("duplicate toplevel statement",
                                   head.line, head.column)
            toplevel = tokens[1]
            references.append(tokens[1])
            continue

        if head.kind != "name":
            raise GalileoError("statement must start with a quoted name or 'toplevel'",
                               head.line, head.column)
        if len(tokens) < 2:
            raise GalileoError(f"declaration of {head.text!r} has no body",
                               head.line, head.column)
        if head.text in decls:
            raise GalileoError(f"duplicate declaration of {head.text!r}",
                               head.line, head.column)

        body = tokens[1]
        if body.kind == "attr" and body.text in _BE_ATTRS:
            decls[head.text] = _parse_basic_event(head, tokens[1:])
        elif body.kind == "attr" and body.text == "pdep":
            decls[head.text] = _parse_gate(head, body, tokens[2:], references)
        elif body.kind == "word":
            decls[head.text] = _parse_gate(head, body, tokens[2:], references)
        else:
            raise GalileoError(f"expected a gate kind or BE attributes after {head.text!r}",
                               body.line, body.column)
        order.append(head.text)

    if toplevel is None:
        raise GalileoError("missing toplevel statement")
    for ref in references:
        if ref.text not in decls:
            raise GalileoError(f"undeclared reference {ref.text!r}", ref.line, ref.column)

    types = {d.name: d.ntype for d in decls.values()}
    children = {d.name: d.children for d in decls.values()}
    distributions = {d.name: d.dist for d in decls.values() if d.dist is not None}
    ft = FaultTree(
        nodes=tuple(order),
        types=types,
        children=children,
        top=toplevel.text,
        distributions=distributions,
    )
    report = validate(ft)
    if not report.ok:
        first = report.violations[0]
        decl = decls.get(first.node)
        raise GalileoError(
            "; ".join(str(v) for v in report.violations),
            decl.line if decl else None,
            decl.column if decl else None,
        )
    be_order = tuple(n for n in order if types[n].kind == "be")
    return ParseResult(fault_tree=ft, be_order=be_order)


def _parse_gate(head: _Token, op: _Token, rest: list[_Token],
                references: list[_Token]) -> _Declaration:
    kids: list[str] = []
    for tok in rest:
        if tok.kind != "name":
            raise GalileoError("gate children must be quoted names", tok.line, tok.column)
        kids.append(tok.text)
        references.append(tok)

    if op.kind == "attr":  # pdep=<p>
        p = _float_attr(op)
        if not 0.0 < p <= 1.0:
            raise GalileoError(f"dependency probability must lie in (0, 1], got {p}",
                               op.line, op.column)
        ntype = pdep(p)
    elif op.text in _GATE_WORDS:
        ntype = _GATE_WORDS[op.text]
    elif op.text == "fdep":
        ntype = pdep(1.0)
    elif op.text in _SPARE_WORDS:
        ntype = spare(op.text)
    else:
        m = _VOT_RE.match(op.text)
        if m is None:
            raise GalileoError(f"unknown gate kind {op.text!r}", op.line, op.column)
        k, n = int(m.group(1)), int(m.group(2))
        if n != len(kids):
            raise GalileoError(
                f"voting gate declares {n} children but lists {len(kids)}",
                op.line, op.column)
        if not 1 <= k <= n:
            raise GalileoError(f"k out of range: {k} of {n}", op.line, op.column)
        ntype = vot(k)
    if not kids:
        raise GalileoError(f"gate {head.text!r} has no children", head.line, head.column)
    return _Declaration(head.text, ntype, tuple(kids), None, head.line, head.column)


def _parse_basic_event(head: _Token, attrs: list[_Token]) -> _Declaration:
    values: dict[str, float] = {}
    for tok in attrs:
        if tok.kind != "attr" or tok.text not in _BE_ATTRS:
            raise GalileoError(f"unexpected token {tok.text!r} in BE declaration",
                               tok.line, tok.column)
        if tok.text in values:
            raise GalileoError(f"duplicate attribute {tok.text!r}", tok.line, tok.column)
        values[tok.text] = _float_attr(tok)

    if "prob" in values:
        if "lambda" in values or "dorm" in values:
            raise GalileoError("prob= cannot be combined with lambda=/dorm=",
                               head.line, head.column)
        p = values["prob"]
        if not 0.0 <= p <= 1.0:
            raise GalileoError(f"probability must lie in [0, 1], got {p}",
                               head.line, head.column)
        dist: Distribution = FixedProbability(p)
    elif "lambda" in values:
        rate = values["lambda"]
        if rate <= 0:
            raise GalileoError(f"failure rate must be positive, got {rate}",
                               head.line, head.column)
        dorm = values.get("dorm", 1.0)
        if not 0.0 <= dorm <= 1.0:
            raise GalileoError(f"dormancy must lie in [0, 1], got {dorm}",
                               head.line, head.column)
        dist = Exponential(rate, dorm)
    else:
        raise GalileoError("basic event needs lambda= or prob=", head.line, head.column)
    return _Declaration(head.text, NodeType("be"), (), dist, head.line, head.column)


def parse_path(path: str) -> ParseResult:
    with open(path, "r", encoding="utf-8", errors="surrogateescape") as handle:
        return parse(handle.read())


def _format_float(x: float) -> str:
    return repr(float(x))


def serialize(ft: FaultTree) -> str:
    """Render a tree; parsing it back yields an isomorphic tree."""
    lines = [f'toplevel "{ft.top}";']
    for name in ft.nodes:
        ntype = ft.types[name]
        kind = ntype.kind
        if kind == "be":
            dist = ft.distributions[name]
            if isinstance(dist, FixedProbability):
                lines.append(f'"{name}" prob={_format_float(dist.prob)};')
            elif isinstance(dist, Exponential):
                attrs = f"lambda={_format_float(dist.rate)}"
                if dist.dormancy != 1.0:
                    attrs += f" dorm={_format_float(dist.dormancy)}"
                lines.append(f'"{name}" {attrs};')
            elif isinstance(dist, Tabulated):
                raise InputError(
                    f"tabulated basic event {name!r} has no Galileo form")
            continue
        if kind == "vot":
            op = f"{ntype.k}of{len(ft.children_of(name))}"
        elif kind == "pdep":
            op = "fdep" if ntype.p == 1.0 else f"pdep={_format_float(ntype.p)}"
        elif kind == "spare":
            op = ntype.variant or "wsp"
        else:
            op = kind
        kids = " ".join(f'"{c}"' for c in ft.children_of(name))
        lines.append(f'"{name}" {op} {kids};')
    return "\n".join(lines) + "\n"
