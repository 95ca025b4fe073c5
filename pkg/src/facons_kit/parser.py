"""Parser for polynomial-map input files.

File grammar::

    vars: <name> <name> ...
    [targets: <name> ...]
    map:
      <expr>
      <expr>

One expression per line after ``map:``; ``;`` also separates
expressions; ``#`` starts a comment to end of line.  Expressions use
+, -, *, ^ (nonnegative integer exponents), parentheses, integer
literals and rational literals ``p/q`` in coefficient position.
Multiplication is always explicit (no juxtaposition).  A standalone
``/`` before a section keyword acts as a line break, so single-line
documents like ``vars: x1 x2 / map: x1*x2 ; x1`` parse too.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .poly import Polynomial, PolynomialMap

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_SECTION_BREAK = re.compile(r"\s/\s*(?=(?:vars|targets|map)\s*:)")


class ParseError(ValueError):
    """Syntax or semantic error with a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class MapDocument:
    source_vars: list
    target_vars: list
    component_exprs: list
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Token:
    kind: str   # name | int | op | end
    text: str
    line: int
    col: int


def _tokenize_expr(text: str, line: int) -> list:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        col = i + 1
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], line, col))
            i = j
        elif ch.isalpha():
            m = _NAME_RE.match(text, i)
            tokens.append(_Token("name", m.group(0), line, col))
            i = m.end()
        elif ch in "+-*^()/":
            tokens.append(_Token("op", ch, line, col))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("end", "", line, n + 1))
    return tokens


class _ExprParser:
    """Recursive descent over +, -, *, ^, parentheses, literals, names."""

    MAX_DEPTH = 200

    def __init__(self, tokens: list, arena: tuple):
        self.tokens = tokens
        self.pos = 0
        self.arena = arena
        self.depth = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        tok = self.take()
        if tok.kind != "op" or tok.text != op:
            raise ParseError(f"expected {op!r}, found {tok.text or 'end of line'!r}",
                             tok.line, tok.col)

    def parse(self) -> Polynomial:
        p = self.expression()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)
        return p

    def expression(self) -> Polynomial:
        tok = self.peek()
        self.depth += 1
        if self.depth > self.MAX_DEPTH:
            raise ParseError("expression nested too deeply", tok.line, tok.col)
        try:
            negate = False
            if tok.kind == "op" and tok.text in "+-":
                self.take()
                negate = tok.text == "-"
            p = self.term()
            if negate:
                p = -p
            while True:
                tok = self.peek()
                if tok.kind == "op" and tok.text in "+-":
                    self.take()
                    q = self.term()
                    p = p - q if tok.text == "-" else p + q
                else:
                    return p
        finally:
            self.depth -= 1

    def term(self) -> Polynomial:
        p = self.power()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.take()
                p = p * self.power()
            elif tok.kind == "op" and tok.text == "/":
                # rational literal continuation: integer / integer
                op = self.take()
                if not p.is_constant():
                    raise ParseError("'/' is only allowed between integer literals",
                                     op.line, op.col)
                tok2 = self.take()
                if tok2.kind != "int":
                    raise ParseError("denominator must be an integer literal",
                                     tok2.line, tok2.col)
                den = int(tok2.text)
                if den == 0:
                    raise ParseError("division by zero", tok2.line, tok2.col)
                p = Polynomial.const(self.arena, p.constant_value() / den)
            elif tok.kind in ("name", "int") or (tok.kind == "op" and tok.text == "("):
                raise ParseError(
                    "implicit multiplication is not allowed; use '*'", tok.line, tok.col)
            else:
                return p

    def power(self) -> Polynomial:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.take()
            sign = 1
            tok2 = self.peek()
            if tok2.kind == "op" and tok2.text == "-":
                sign = -1
                self.take()
                tok2 = self.peek()
            if tok2.kind != "int":
                raise ParseError("exponent must be an integer literal", tok2.line, tok2.col)
            self.take()
            if sign < 0:
                raise ParseError("negative exponent", tok2.line, tok2.col)
            return base ** int(tok2.text)
        return base

    def atom(self) -> Polynomial:
        tok = self.take()
        if tok.kind == "int":
            return Polynomial.const(self.arena, int(tok.text))
        if tok.kind == "name":
            if tok.text not in self.arena:
                raise ParseError(f"unknown variable {tok.text!r}", tok.line, tok.col)
            return Polynomial.var(self.arena, tok.text)
        if tok.kind == "op" and tok.text == "(":
            p = self.expression()
            self.expect_op(")")
            return p
        raise ParseError(f"expected a variable, number or '(', found "
                         f"{tok.text or 'end of line'!r}", tok.line, tok.col)


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _parse_names(body: str, line_no: int, what: str) -> list:
    names = body.split()
    seen = set()
    for name in names:
        if not _NAME_RE.fullmatch(name):
            raise ParseError(f"invalid {what} name {name!r}", line_no, 1)
        if name in seen:
            raise ParseError(f"duplicate {what} name {name!r}", line_no, 1)
        seen.add(name)
    return names


def parse_map(text: str):
    """Parse a map document; returns (MapDocument, PolynomialMap).

    Raises ParseError with line/column on any malformed input.
    """
    if not isinstance(text, str):
        raise ParseError("input must be text", 1, 1)
    normalized = _SECTION_BREAK.sub("\n", text)
    source_vars: list | None = None
    target_vars: list | None = None
    exprs: list[tuple[str, int]] = []
    options: dict = {}
    in_map = False
    for line_no, raw in enumerate(normalized.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        lowered = line.lower()
        if lowered.startswith("vars:"):
            if source_vars is not None:
                raise ParseError("duplicate vars: section", line_no, 1)
            source_vars = _parse_names(line[5:], line_no, "variable")
            in_map = False
            continue
        if lowered.startswith("targets:"):
            if target_vars is not None:
                raise ParseError("duplicate targets: section", line_no, 1)
            target_vars = _parse_names(line[8:], line_no, "target variable")
            in_map = False
            continue
        if lowered.startswith("map:"):
            if in_map:
                raise ParseError("duplicate map: section", line_no, 1)
            in_map = True
            line = line[4:].strip()
            if not line:
                continue
        if not in_map:
            raise ParseError(f"unexpected content before map: {line!r}", line_no, 1)
        for piece in line.split(";"):
            piece = piece.strip()
            if piece:
                exprs.append((piece, line_no))

    if source_vars is None:
        raise ParseError("missing vars: section", 1, 1)
    if not source_vars:
        raise ParseError("vars: section declares no variables", 1, 1)
    if not exprs:
        raise ParseError("missing map: section or empty map", 1, 1)
    n = len(source_vars)
    if target_vars is None:
        target_vars = [f"a{i + 1}" for i in range(n)]
    if len(target_vars) != n:
        raise ParseError(
            f"{len(target_vars)} target names for {n} source variables", 1, 1)
    if set(target_vars) & set(source_vars):
        raise ParseError("source and target variable names must be disjoint", 1, 1)
    if len(exprs) != n:
        raise ParseError(
            f"component count mismatch: {len(exprs)} expressions for {n} variables",
            exprs[-1][1] if exprs else 1, 1)

    arena = tuple(source_vars)
    components = []
    for expr_text, line_no in exprs:
        tokens = _tokenize_expr(expr_text, line_no)
        components.append(_ExprParser(tokens, arena).parse())

    doc = MapDocument(list(source_vars), list(target_vars), [e for e, _ in exprs], options)
    return doc, PolynomialMap(components, arena, tuple(target_vars))


def pretty_print(doc: MapDocument, F: PolynomialMap) -> str:
    """Canonical text form; parse(pretty_print(parse(x))) round-trips."""
    lines = ["vars: " + " ".join(doc.source_vars)]
    default_targets = [f"a{i + 1}" for i in range(len(doc.source_vars))]
    if doc.target_vars != default_targets:
        lines.append("targets: " + " ".join(doc.target_vars))
    lines.append("map:")
    for comp in F.components:
        lines.append("  " + _expr_text(comp))
    return "\n".join(lines) + "\n"


def _expr_text(p: Polynomial) -> str:
    # str(Polynomial) already emits the canonical '*'-explicit form
    return str(p)
