"""A small expression language for codim-2 cycles on C x S.

    expr  := ['-'] term (('+' | '-') term)*
    term  := [rational '*'] atom
    atom  := '0' | 'Gamma' | 'gamma' | 'T(' class ',' class ')'
           | 'O(' name [',' class_or_ ',' class_or_] ')' | '(' expr ')'
    class := ['-'] cterm (('+' | '-') cterm)*,  cterm := [rational '*'] name

Class names are basis labels (C, pt, pic:p1, S, ns:H, alb:a), the named
classes of the scenario, ``eta`` and ``xi``, and on S also ``fC`` (f_*C)
and ``feta`` (f_*eta).  ``Gamma`` is the graph of f, ``gamma`` the
arithmetic diagonal, ``_`` an omitted factor in an opaque term.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .classes import CURVE, SURFACE, FactorClass, GradingError, basis_class, curve_fundamental, label_codim
from .context import GeometryContext
from .cycles import CycleExpr, graph, opaque, tensor

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_:']*)|(.))")


class CycleSyntaxError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


def _tokens(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        num, name, op = m.groups()
        col = m.start(m.lastindex) + 1
        if num is not None:
            out.append(("num", Fraction(num), col))
        elif name is not None:
            out.append(("name", name, col))
        elif op in "+-*(),":
            out.append(("op", op, col))
        else:
            raise CycleSyntaxError(f"unexpected character {op!r}", col)
        pos = m.end()
    out.append(("end", None, len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, ctx: GeometryContext):
        self.toks = _tokens(text)
        self.i = 0
        self.ctx = ctx

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise CycleSyntaxError(f"expected {want!r}, found {tok[1] if tok[1] is not None else 'end'}", tok[2])
        self.i += 1
        return tok

    def is_op(self, value):
        tok = self.peek()
        return tok[0] == "op" and tok[1] == value

    # ---- cycles --------------------------------------------------------------
    def expr(self) -> CycleExpr:
        sign = -1 if self.is_op("-") and self.take() else 1
        total = self.term() * sign
        while self.is_op("+") or self.is_op("-"):
            op = self.take()[1]
            t = self.term()
            total = total + t if op == "+" else total - t
        return total

    def term(self) -> CycleExpr:
        coeff = Fraction(1)
        if self.peek()[0] == "num" and self.toks[self.i + 1][:2] == ("op", "*"):
            coeff = self.take()[1]
            self.take("op", "*")
        return self.atom() * coeff

    def atom(self) -> CycleExpr:
        tok = self.peek()
        if tok[0] == "num" and tok[1] == 0:
            self.take()
            return CycleExpr.zero(2)
        if self.is_op("("):
            self.take()
            out = self.expr()
            self.take("op", ")")
            return out
        name = self.take("name")
        if name[1] == "Gamma":
            return graph()
        if name[1] == "gamma":
            from .diagonal import arithmetic_diagonal
            return arithmetic_diagonal(self.ctx, rewrite=False)
        if name[1] == "T":
            self.take("op", "(")
            a = self.cls(CURVE)
            self.take("op", ",")
            b = self.cls(SURFACE)
            self.take("op", ")")
            return tensor(a, b)
        if name[1] == "O":
            self.take("op", "(")
            rule = self.take("name")
            if rule[1] not in self.ctx.opaque:
                raise CycleSyntaxError(f"no opaque rule named {rule[1]!r}", rule[2])
            a = b = None
            if self.is_op(","):
                self.take()
                a = self.optional_cls(CURVE)
                self.take("op", ",")
                b = self.optional_cls(SURFACE)
            self.take("op", ")")
            return opaque(rule[1], a, b)
        raise CycleSyntaxError(f"unknown cycle {name[1]!r}", name[2])

    # ---- classes -------------------------------------------------------------
    def optional_cls(self, space):
        tok = self.peek()
        if tok[:2] == ("name", "_"):
            self.take()
            return None
        return self.cls(space)

    def cls(self, space) -> FactorClass:
        sign = -1 if self.is_op("-") and self.take() else 1
        total = self.cterm(space) * sign
        while self.is_op("+") or self.is_op("-"):
            op = self.take()[1]
            col = self.peek()[2]
            t = self.cterm(space)
            if t.codim != total.codim:
                raise CycleSyntaxError("mixed codimensions in a class", col)
            total = total + t if op == "+" else total - t
        return total

    def cterm(self, space) -> FactorClass:
        coeff = Fraction(1)
        if self.peek()[0] == "num":
            coeff = self.take()[1]
            self.take("op", "*")
        tok = self.take("name")
        return self.named(space, tok[1], tok[2]) * coeff

    def named(self, space, name, col) -> FactorClass:
        ctx = self.ctx
        table = ctx.curve.classes if space == CURVE else ctx.surface.classes
        if name in table:
            return table[name]
        try:
            if space == CURVE and name == "eta":
                return ctx.eta
            if space == SURFACE and name == "xi":
                return ctx.xi
            if space == SURFACE and name == "fC":
                return ctx.f_push(curve_fundamental())
            if space == SURFACE and name == "feta":
                return ctx.f_push(ctx.eta)
            label_codim(space, name)
        except GradingError:
            raise CycleSyntaxError(f"unknown {'curve' if space == CURVE else 'surface'} class {name!r}", col) from None
        labels = {lab for k in range(3 if space == SURFACE else 2)
                  for lab in (ctx.curve.labels(k) if space == CURVE else ctx.surface.labels(k))}
        if name not in labels | {"C", "S"}:
            raise CycleSyntaxError(f"undeclared label {name!r}", col)
        return basis_class(space, name)


def parse_cycle(text: str, ctx: GeometryContext) -> CycleExpr:
    """Parse ``text`` into a codim-2 cycle expression."""
    p = _Parser(text, ctx)
    out = p.expr()
    p.take("end")
    if out.codim != 2:
        raise CycleSyntaxError("the expression is not a codim-2 cycle", 1)
    return out
