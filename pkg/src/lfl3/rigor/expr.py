"""Symbolic expressions in the problem parameters and their point evaluation.

Expressions are immutable trees built from constants, named symbols, the four
arithmetic operations, rational powers, ``sqrt``, ``log``, ``exp``,
``floor``, ``max`` and ``min``.  They come from the problem file (via
:func:`parse_expr`) or are assembled in code with the usual operators::

    Y = Sym("Y")
    a1 = (rho - 1) * Const.of("0.4813") + 4 * Y

Text grammar (version 1)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom (("^" | "**") unary)?          exponent: rational constant
    atom   := number | name | name "(" expr ("," expr)* ")" | "(" expr ")"

Names are declared symbols, the constants ``pi`` and ``e``, or one of the
functions ``sqrt log exp floor max min``.  Decimal literals are exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Mapping

import numpy as np

from ..errors import ParseError, UndeclaredSymbol
from . import interval as iv
from .interval import CertScalar, Number

FUNCTIONS = ("sqrt", "log", "exp", "floor")
EXTREMA = ("max", "min")
NAMED_CONSTANTS = ("pi", "e")


class ParamExpr:
    """Base class of expression nodes; supplies operator overloading."""

    __slots__ = ()

    def __add__(self, other) -> "ParamExpr":
        return Add(self, as_expr(other))

    def __radd__(self, other) -> "ParamExpr":
        return Add(as_expr(other), self)

    def __sub__(self, other) -> "ParamExpr":
        return Sub(self, as_expr(other))

    def __rsub__(self, other) -> "ParamExpr":
        return Sub(as_expr(other), self)

    def __mul__(self, other) -> "ParamExpr":
        return Mul(self, as_expr(other))

    def __rmul__(self, other) -> "ParamExpr":
        return Mul(as_expr(other), self)

    def __truediv__(self, other) -> "ParamExpr":
        return Div(self, as_expr(other))

    def __rtruediv__(self, other) -> "ParamExpr":
        return Div(as_expr(other), self)

    def __neg__(self) -> "ParamExpr":
        return Sub(Const.of(0), self)

    def __pow__(self, exponent) -> "ParamExpr":
        return Pow(self, Fraction(exponent))

    def children(self) -> tuple["ParamExpr", ...]:
        return ()

    def free_symbols(self) -> frozenset[str]:
        out: set[str] = set()
        stack: list[ParamExpr] = [self]
        seen: set[int] = set()
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if isinstance(node, Sym):
                out.add(node.name)
            stack.extend(node.children())
        return frozenset(out)

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()


_CONST_CACHE: dict[tuple[str, int], CertScalar] = {}


def _text_value(text: str) -> CertScalar:
    key = (text, iv.get_precision())
    hit = _CONST_CACHE.get(key)
    if hit is None:
        if text == "pi":
            hit = CertScalar.pi()
        elif text == "e":
            hit = CertScalar.e()
        else:
            hit = CertScalar(Fraction(text))
        _CONST_CACHE[key] = hit
    return hit


@dataclass(frozen=True, eq=True)
class Const(ParamExpr):
    """A constant: exact literal text, or a precomputed enclosure."""

    text: str | None = None
    interval: CertScalar | None = None

    @staticmethod
    def of(x) -> "Const":
        if isinstance(x, Const):
            return x
        if isinstance(x, CertScalar):
            return Const(interval=x)
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return Const(text=str(x))
        if isinstance(x, Fraction):
            return Const(text=str(x))
        if isinstance(x, float):
            return Const(text=str(Fraction(x)))
        if isinstance(x, str):
            Fraction(x)  # validates
            return Const(text=x)
        raise TypeError(f"cannot make a constant from {type(x).__name__}")

    def value(self) -> CertScalar:
        if self.text is not None:
            return _text_value(self.text)
        assert self.interval is not None
        return self.interval

    def to_text(self) -> str:
        if self.text is not None:
            return self.text
        v = self.interval
        assert v is not None
        if v.is_point() and v.is_finite():
            return str(v.hi_rational())
        return f"hull({v.lo_rational()}, {v.hi_rational()})"


@dataclass(frozen=True, eq=True)
class Sym(ParamExpr):
    name: str

    def to_text(self) -> str:
        return self.name


@dataclass(frozen=True, eq=True)
class Add(ParamExpr):
    left: ParamExpr
    right: ParamExpr

    def children(self):
        return (self.left, self.right)

    def to_text(self) -> str:
        return f"({self.left.to_text()} + {self.right.to_text()})"


@dataclass(frozen=True, eq=True)
class Sub(ParamExpr):
    left: ParamExpr
    right: ParamExpr

    def children(self):
        return (self.left, self.right)

    def to_text(self) -> str:
        return f"({self.left.to_text()} - {self.right.to_text()})"


@dataclass(frozen=True, eq=True)
class Mul(ParamExpr):
    left: ParamExpr
    right: ParamExpr

    def children(self):
        return (self.left, self.right)

    def to_text(self) -> str:
        return f"({self.left.to_text()} * {self.right.to_text()})"


@dataclass(frozen=True, eq=True)
class Div(ParamExpr):
    left: ParamExpr
    right: ParamExpr

    def children(self):
        return (self.left, self.right)

    def to_text(self) -> str:
        return f"({self.left.to_text()} / {self.right.to_text()})"


@dataclass(frozen=True, eq=True)
class Pow(ParamExpr):
    base: ParamExpr
    exponent: Fraction

    def children(self):
        return (self.base,)

    def to_text(self) -> str:
        return f"({self.base.to_text()})^({self.exponent})"


@dataclass(frozen=True, eq=True)
class Apply(ParamExpr):
    fn: str
    arg: ParamExpr

    def __post_init__(self):
        if self.fn not in FUNCTIONS:
            raise ValueError(f"unknown function {self.fn}")

    def children(self):
        return (self.arg,)

    def to_text(self) -> str:
        return f"{self.fn}({self.arg.to_text()})"


@dataclass(frozen=True, eq=True)
class Extremum(ParamExpr):
    fn: str
    args: tuple[ParamExpr, ...]

    def __post_init__(self):
        if self.fn not in EXTREMA or not self.args:
            raise ValueError("bad extremum")

    def children(self):
        return self.args

    def to_text(self) -> str:
        return f"{self.fn}({', '.join(a.to_text() for a in self.args)})"


def as_expr(x) -> ParamExpr:
    if isinstance(x, ParamExpr):
        return x
    return Const.of(x)


# convenience constructors


def sqrt(x) -> ParamExpr:
    return Apply("sqrt", as_expr(x))


def log(x) -> ParamExpr:
    return Apply("log", as_expr(x))


def exp(x) -> ParamExpr:
    return Apply("exp", as_expr(x))


def floor(x) -> ParamExpr:
    return Apply("floor", as_expr(x))


def emax(*xs) -> ParamExpr:
    args = tuple(as_expr(x) for x in xs)
    return args[0] if len(args) == 1 else Extremum("max", args)


def emin(*xs) -> ParamExpr:
    args = tuple(as_expr(x) for x in xs)
    return args[0] if len(args) == 1 else Extremum("min", args)


PI = Const(text="pi")
E = Const(text="e")


# -- interval evaluation -------------------------------------------------------

_UNARY: dict[str, Callable[[CertScalar], CertScalar]] = {
    "sqrt": iv.sqrt,
    "log": iv.log,
    "exp": iv.exp,
    "floor": iv.floor,
}


def _eval(node: ParamExpr, env: Mapping[str, CertScalar], memo: dict[int, CertScalar]) -> CertScalar:
    key = id(node)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(node, Const):
        out = node.value()
    elif isinstance(node, Sym):
        try:
            out = env[node.name]
        except KeyError:
            raise UndeclaredSymbol(f"no value for symbol {node.name!r}") from None
    elif isinstance(node, Add):
        out = _eval(node.left, env, memo) + _eval(node.right, env, memo)
    elif isinstance(node, Sub):
        out = _eval(node.left, env, memo) - _eval(node.right, env, memo)
    elif isinstance(node, Mul):
        out = _eval(node.left, env, memo) * _eval(node.right, env, memo)
    elif isinstance(node, Div):
        out = _eval(node.left, env, memo) / _eval(node.right, env, memo)
    elif isinstance(node, Pow):
        out = iv.power(_eval(node.base, env, memo), node.exponent)
    elif isinstance(node, Apply):
        out = _UNARY[node.fn](_eval(node.arg, env, memo))
    elif isinstance(node, Extremum):
        vals = [_eval(a, env, memo) for a in node.args]
        out = iv.maximum(*vals) if node.fn == "max" else iv.minimum(*vals)
    else:
        raise TypeError(f"unknown node {type(node).__name__}")
    memo[key] = out
    return out


def eval_at(expr: ParamExpr, point: Mapping[str, Number]) -> CertScalar:
    """Certified enclosure of ``expr`` at a point (values may be intervals).

    Shared subtrees are evaluated once.  Raises :class:`UndeclaredSymbol` for a
    symbol without a value and :class:`DomainViolation` when an operation is
    undefined on part of its input.
    """
    missing = expr.free_symbols() - set(point)
    if missing:
        raise UndeclaredSymbol(f"no value for symbol(s) {sorted(missing)}")
    env = {k: iv.as_cert(v) for k, v in point.items()}
    return _eval(expr, env, {})


# -- float / numpy evaluation ----------------------------------------------------


def _feval(node: ParamExpr, env, memo):
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, Const):
        out = node.value().mid
    elif isinstance(node, Sym):
        out = env[node.name]
    elif isinstance(node, Add):
        out = _feval(node.left, env, memo) + _feval(node.right, env, memo)
    elif isinstance(node, Sub):
        out = _feval(node.left, env, memo) - _feval(node.right, env, memo)
    elif isinstance(node, Mul):
        out = _feval(node.left, env, memo) * _feval(node.right, env, memo)
    elif isinstance(node, Div):
        out = np.divide(_feval(node.left, env, memo), _feval(node.right, env, memo))
    elif isinstance(node, Pow):
        out = np.power(_feval(node.base, env, memo), float(node.exponent))
    elif isinstance(node, Apply):
        a = _feval(node.arg, env, memo)
        out = {"sqrt": np.sqrt, "log": np.log, "exp": np.exp, "floor": np.floor}[node.fn](a)
    elif isinstance(node, Extremum):
        vals = [_feval(a, env, memo) for a in node.args]
        out = reduce(np.maximum if node.fn == "max" else np.minimum, vals)
    else:
        raise TypeError(f"unknown node {type(node).__name__}")
    memo[key] = out
    return out


def eval_float(expr: ParamExpr, env: Mapping[str, object]):
    """Non-rigorous float evaluation; values may be numpy arrays (broadcast).

    Used only to rank candidates before certification.  Invalid operations give
    nan rather than raising.
    """
    with np.errstate(all="ignore"):
        out = _feval(expr, env, {})
    if isinstance(out, np.ndarray):
        return out
    return float(out)


# -- substitution / structure -----------------------------------------------------


def substitute(expr: ParamExpr, mapping: Mapping[str, object]) -> ParamExpr:
    """Replace symbols by expressions (or numbers), sharing untouched subtrees."""
    repl = {k: as_expr(v) for k, v in mapping.items()}
    memo: dict[int, ParamExpr] = {}

    def go(node: ParamExpr) -> ParamExpr:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Sym):
            out = repl.get(node.name, node)
        elif isinstance(node, Const):
            out = node
        elif isinstance(node, (Add, Sub, Mul, Div)):
            left, right = go(node.left), go(node.right)
            out = node if (left is node.left and right is node.right) else type(node)(left, right)
        elif isinstance(node, Pow):
            b = go(node.base)
            out = node if b is node.base else Pow(b, node.exponent)
        elif isinstance(node, Apply):
            a = go(node.arg)
            out = node if a is node.arg else Apply(node.fn, a)
        elif isinstance(node, Extremum):
            args = tuple(go(a) for a in node.args)
            out = Extremum(node.fn, args)
        else:
            raise TypeError(type(node).__name__)
        memo[key] = out
        return out

    return go(expr)


def affine_in(expr: ParamExpr, name: str) -> tuple[ParamExpr, ParamExpr]:
    """Split ``expr`` as ``coef * name + rest`` with both parts free of ``name``.

    Raises :class:`ValueError` when ``expr`` is not affine in ``name`` by
    syntactic inspection (sums, differences, products and quotients by
    expressions free of ``name``).
    """
    zero = Const.of(0)

    def go(node: ParamExpr) -> tuple[ParamExpr | None, ParamExpr]:
        if name not in node.free_symbols():
            return None, node
        if isinstance(node, Sym):
            return Const.of(1), zero
        if isinstance(node, (Add, Sub)):
            ca, ra = go(node.left)
            cb, rb = go(node.right)
            if isinstance(node, Add):
                coef = cb if ca is None else (ca if cb is None else ca + cb)
                return coef, ra + rb
            if cb is None:
                coef = ca
            else:
                coef = -cb if ca is None else ca - cb
            return coef, ra - rb
        if isinstance(node, Mul):
            ca, ra = go(node.left)
            cb, rb = go(node.right)
            if ca is not None and cb is not None:
                raise ValueError(f"{node.to_text()} is not affine in {name}")
            if ca is not None:
                return ca * node.right, ra * node.right
            return node.left * cb, node.left * rb
        if isinstance(node, Div):
            ca, ra = go(node.left)
            if name in node.right.free_symbols():
                raise ValueError(f"{node.to_text()} is not affine in {name}")
            return ca / node.right, ra / node.right
        raise ValueError(f"{node.to_text()} is not affine in {name}")

    coef, rest = go(expr)
    return (coef if coef is not None else zero), rest


# -- parser ------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokenize(text: str, path: str | None):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at offset {pos} in {text!r}", path)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, symbols: frozenset[str] | None, path: str | None):
        self.text = text
        self.toks = _tokenize(text, path)
        self.i = 0
        self.symbols = symbols
        self.path = path

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value:
            self.fail(f"expected {value!r}", tok)
        return tok

    def fail(self, msg, tok):
        raise ParseError(f"{msg} at offset {tok[2]} in {self.text!r}", self.path)

    def parse(self) -> ParamExpr:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail("unexpected trailing input", tok)
        return node

    def expr(self) -> ParamExpr:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> ParamExpr:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self) -> ParamExpr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Sub(Const(text="0"), self.unary())
        if tok[0] == "op" and tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> ParamExpr:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("^", "**"):
            self.take()
            exp_tok = self.peek()
            exponent = self.unary()
            q = _fold_rational(exponent)
            if q is None:
                self.fail("exponent must be a rational constant", exp_tok)
            return Pow(base, q)
        return base

    def atom(self) -> ParamExpr:
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return Const(text=val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if val not in FUNCTIONS + EXTREMA + ("hull",):
                    self.fail(f"unknown function {val!r}", tok)
                self.take()
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if val in FUNCTIONS:
                    if len(args) != 1:
                        self.fail(f"{val} takes one argument", tok)
                    return Apply(val, args[0])
                if val == "hull":
                    qs = [_fold_rational(a) for a in args]
                    if len(args) != 2 or None in qs:
                        self.fail("hull takes two rational constants", tok)
                    return Const(interval=CertScalar(qs[0], qs[1]))
                return Extremum(val, tuple(args))
            if val in NAMED_CONSTANTS:
                return Const(text=val)
            if self.symbols is not None and val not in self.symbols:
                raise UndeclaredSymbol(f"undeclared symbol {val!r} in {self.text!r}")
            return Sym(val)
        self.fail(f"unexpected token {val!r}", tok)
        raise AssertionError  # pragma: no cover


def _fold_rational(node: ParamExpr) -> Fraction | None:
    if isinstance(node, Const) and node.text is not None and node.text not in NAMED_CONSTANTS:
        return Fraction(node.text)
    if isinstance(node, (Add, Sub, Mul, Div)):
        a, b = _fold_rational(node.left), _fold_rational(node.right)
        if a is None or b is None:
            return None
        if isinstance(node, Add):
            return a + b
        if isinstance(node, Sub):
            return a - b
        if isinstance(node, Mul):
            return a * b
        return a / b if b != 0 else None
    return None


def parse_expr(text: str, symbols: Iterable[str] | None = None, path: str | None = None) -> ParamExpr:
    """Parse ``text`` in the expression grammar.

    When ``symbols`` is given, any other bare name raises
    :class:`UndeclaredSymbol`.
    """
    if not isinstance(text, str):
        raise ParseError(f"expected an expression string, got {type(text).__name__}", path)
    syms = frozenset(symbols) if symbols is not None else None
    return _Parser(text, syms, path).parse()


def is_constant(expr: ParamExpr) -> bool:
    return not expr.free_symbols()


def const_value(expr: ParamExpr) -> CertScalar:
    """Enclosure of a symbol-free expression."""
    return eval_at(expr, {})


def float_value(expr: ParamExpr, env: Mapping[str, float] | None = None) -> float:
    v = eval_float(expr, env or {})
    return float(v)


__all__ = [
    "ParamExpr",
    "Const",
    "Sym",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Apply",
    "Extremum",
    "as_expr",
    "sqrt",
    "log",
    "exp",
    "floor",
    "emax",
    "emin",
    "PI",
    "E",
    "eval_at",
    "eval_float",
    "substitute",
    "affine_in",
    "parse_expr",
    "is_constant",
    "const_value",
    "float_value",
]
