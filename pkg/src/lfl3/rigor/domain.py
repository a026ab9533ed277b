"""Certified bounds of expressions over a half-line ``Y in [dmin, dmax]``.

The workhorse is a *scaled* interval evaluation on a box of ``Y`` values.  On
a box each subexpression is enclosed in the form

    f(Y)  in  Y**e * (G + H * log Y)

with a rational exponent ``e`` and intervals ``G`` and ``H`` (``H`` often
absent).  The intervals are computed from ``t = 1/Y`` in ``[t_lo, t_hi]``,
so the same rules work on the unbounded box ``[c, inf)`` where ``t_lo = 0``.
Lower-order terms are absorbed into the leading one through factors
``t**d`` (in ``[t_lo**d, t_hi**d]``) and ``t**d * log(1/t)`` (bounded by
``1/(e*d)``).  This yields finite enclosures of ratios such as
``(3Y+5)/(2Y+1)`` all the way to infinity.

Suprema are then found by branch and bound over a geometric partition of the
domain plus a tail box.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from ..errors import DomainError, DomainViolation, TailAnalysisFailed, UnboundedAbove
from . import interval as iv
from .expr import Add, Apply, Const, Div, Extremum, Mul, ParamExpr, Pow, Sub, Sym, eval_at
from .interval import CertScalar, Number

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Scaled:
    """Enclosure ``Y**e * (g + h*log Y)`` valid on one box."""

    e: Fraction
    g: CertScalar
    h: CertScalar | None = None


def _mk(e: Fraction, g: CertScalar, h: CertScalar | None) -> Scaled:
    if h is not None and h.is_point() and h.contains_zero():
        h = None
    return Scaled(Fraction(e), g, h)


class _Box:
    """A box ``[ya, yb]`` of the scale variable (``yb`` may be +inf)."""

    __slots__ = ("ya", "yb", "Y", "t", "L", "tail")

    def __init__(self, ya: CertScalar, yb: CertScalar):
        self.ya = ya
        self.yb = yb
        self.Y = iv.hull(ya, yb)
        self.t = CertScalar(1) / self.Y
        self.L = iv.log(self.Y) if self.Y.certainly_positive() else None
        self.tail = not yb.is_finite()

    def tpow(self, d: Fraction) -> CertScalar:
        return iv.power(self.t, d)

    def ypow(self, d: Fraction) -> CertScalar:
        return iv.power(self.Y, d)

    def phi(self, d: Fraction) -> CertScalar:
        """Range of t**d * log(1/t) over the box (d > 0)."""
        vals = []
        for end in (self.t._lo, self.t._hi):
            p = CertScalar._raw(end, end)
            if p.contains_zero():
                vals.append(CertScalar(0))
            else:
                vals.append(iv.power(p, d) * -iv.log(p))
        rng = iv.hull(*vals)
        peak_t = iv.exp(CertScalar(-1) / CertScalar(d))
        if not (self.t.certainly_lt(peak_t) or self.t.certainly_gt(peak_t)):
            top = CertScalar(1) / (CertScalar.e() * CertScalar(d))
            rng = iv.hull(rng, top)
        return rng


class _ScaledEval:
    def __init__(self, box: _Box, var: str, env: Mapping[str, CertScalar]):
        self.box = box
        self.var = var
        self.env = env
        self.memo: dict[int, Scaled] = {}

    def fold(self, s: Scaled) -> Scaled:
        if s.h is None:
            return s
        if self.box.tail or self.box.L is None:
            raise TailAnalysisFailed("logarithmic term cannot be absorbed on the unbounded box")
        return Scaled(s.e, s.g + s.h * self.box.L, None)

    def align(self, s: Scaled, target: Fraction) -> Scaled:
        d = target - s.e
        if d == 0:
            return s
        g = s.g * self.box.tpow(d)
        if s.h is not None:
            g = g + s.h * self.box.phi(d)
        return Scaled(target, g, None)

    def add(self, x: Scaled, y: Scaled) -> Scaled:
        if x.e == y.e:
            if x.h is None:
                h = y.h
            elif y.h is None:
                h = x.h
            else:
                h = x.h + y.h
            return _mk(x.e, x.g + y.g, h)
        hi, lo = (x, y) if x.e > y.e else (y, x)
        lo = self.align(lo, hi.e)
        return _mk(hi.e, hi.g + lo.g, hi.h)

    def neg(self, x: Scaled) -> Scaled:
        return Scaled(x.e, -x.g, None if x.h is None else -x.h)

    def mul(self, x: Scaled, y: Scaled) -> Scaled:
        if x.h is not None and y.h is not None:
            y = self.fold(y)
        if x.h is not None:
            h = x.h * y.g
        elif y.h is not None:
            h = y.h * x.g
        else:
            h = None
        return _mk(x.e + y.e, x.g * y.g, h)

    def div(self, x: Scaled, y: Scaled) -> Scaled:
        y = self.fold(y)
        inv = y.g.reciprocal()
        return _mk(x.e - y.e, x.g * inv, None if x.h is None else x.h * inv)

    def pow(self, x: Scaled, q: Fraction) -> Scaled:
        x = self.fold(x)
        return Scaled(x.e * q, iv.power(x.g, q), None)

    def value(self, s: Scaled) -> CertScalar:
        """Plain enclosure of the represented values over the box."""
        b = self.box
        if s.e < 0:
            d = -s.e
            out = s.g * b.tpow(d)
            if s.h is not None:
                out = out + s.h * b.phi(d)
            return out
        z = s.g if s.h is None else s.g + s.h * self._logs()
        if s.e == 0:
            return z
        return b.ypow(s.e) * z

    def _logs(self) -> CertScalar:
        if self.box.L is None:
            raise DomainViolation("log Y undefined on a box containing Y <= 0")
        return self.box.L

    def unary(self, fn: str, x: Scaled) -> Scaled:
        b = self.box
        if fn == "sqrt":
            return self.pow(x, Fraction(1, 2))
        if fn == "log":
            x = self.fold(x)
            g = iv.log(x.g)
            if x.e == 0:
                return Scaled(_ZERO, g, None)
            if b.L is None:
                raise DomainViolation("log Y undefined on a box containing Y <= 0")
            return _mk(_ZERO, g, CertScalar(x.e))
        if fn == "exp":
            x = self.fold(x)
            if x.e <= 0:
                arg = x.g if x.e == 0 else x.g * b.tpow(-x.e)
                return Scaled(_ZERO, iv.exp(arg), None)
            if not b.tail:
                return Scaled(_ZERO, iv.exp(x.g * b.ypow(x.e)), None)
            if x.g.certainly_negative():
                # exp(g Y^e) <= Y^-d * ya^d exp(g ya^e) as long as Y^d exp(g Y^e)
                # is decreasing on the box, i.e. d <= e |g| ya^e
                room = (-x.g * iv.power(b.ya, x.e) * x.e).lo_float
                d = Fraction(min(8, math.floor(room))) if room >= 1 else _ZERO
                top = iv.exp(x.g * iv.power(b.ya, x.e))
                if d > 0:
                    top = top * iv.power(b.ya, d)
                return Scaled(-d, CertScalar._raw(iv._FZERO, top._hi), None)
            raise TailAnalysisFailed("exp of a growing quantity on the unbounded box")
        if fn == "floor":
            if not b.tail:
                exact = iv.floor(self.value(x))
                if exact.is_point():
                    return Scaled(_ZERO, exact, None)
            if x.e > 0:
                theta = CertScalar(0, 1) * b.tpow(x.e)
                return _mk(x.e, x.g - theta, x.h)
            return Scaled(_ZERO, iv.floor(self.value(x)), None)
        raise ValueError(fn)

    def _dominant(self, x: Scaled, y: Scaled):
        """(larger, smaller) if one same-exponent enclosure dominates on the box."""
        if self.box.L is None:
            return None
        zero = CertScalar(0)
        hx = x.h if x.h is not None else zero
        hy = y.h if y.h is not None else zero
        dh = hx - hy
        # the difference is Y^e (dg + dh log Y), monotone in log Y
        base = (x.g - y.g) + dh * iv.log(self.box.ya)
        if dh.certainly_ge(0) and base.certainly_ge(0):
            return x, y
        if dh.certainly_le(0) and base.certainly_le(0):
            return y, x
        return None

    def extremum(self, fn: str, x: Scaled, y: Scaled) -> Scaled:
        pick = iv.maximum if fn == "max" else iv.minimum
        if x.e == y.e:
            if x.h is not None or y.h is not None:
                if x.h is not None and y.h is not None and x.h == y.h:
                    return _mk(x.e, pick(x.g, y.g), x.h)
                winner = self._dominant(x, y)
                if winner is not None:
                    big, small = winner
                    return big if fn == "max" else small
                x, y = self.fold(x), self.fold(y)
            return Scaled(x.e, pick(x.g, y.g), None)
        hi, lo = (x, y) if x.e > y.e else (y, x)
        d = hi.e - lo.e
        hi = self.fold(hi)
        # for max a positive leading coefficient keeps the higher exponent,
        # for min it is the lower term that survives
        keep_low = (fn == "max" and hi.g.certainly_negative()) or (fn == "min" and hi.g.certainly_positive())
        if keep_low:
            lo = self.fold(lo)
            return Scaled(lo.e, pick(hi.g * self.box.ypow(d), lo.g), None)
        lo = self.align(lo, hi.e)
        return Scaled(hi.e, pick(hi.g, lo.g), None)

    def run(self, node: ParamExpr) -> Scaled:
        key = id(node)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Const):
            out = Scaled(_ZERO, node.value(), None)
        elif isinstance(node, Sym):
            if node.name == self.var:
                out = Scaled(Fraction(1), CertScalar(1), None)
            else:
                try:
                    out = Scaled(_ZERO, self.env[node.name], None)
                except KeyError:
                    from ..errors import UndeclaredSymbol

                    raise UndeclaredSymbol(f"no value for symbol {node.name!r}") from None
        elif isinstance(node, Add):
            out = self.add(self.run(node.left), self.run(node.right))
        elif isinstance(node, Sub):
            out = self.add(self.run(node.left), self.neg(self.run(node.right)))
        elif isinstance(node, Mul):
            out = self.mul(self.run(node.left), self.run(node.right))
        elif isinstance(node, Div):
            out = self.div(self.run(node.left), self.run(node.right))
        elif isinstance(node, Pow):
            out = self.pow(self.run(node.base), node.exponent)
        elif isinstance(node, Apply):
            out = self.unary(node.fn, self.run(node.arg))
        elif isinstance(node, Extremum):
            vals = [self.run(a) for a in node.args]
            out = vals[0]
            for v in vals[1:]:
                out = self.extremum(node.fn, out, v)
        else:
            raise TypeError(type(node).__name__)
        self.memo[key] = out
        return out


def scaled_eval(expr: ParamExpr, var: str, ya: Number, yb: Number | None, env: Mapping[str, Number] | None = None) -> Scaled:
    """Scaled enclosure of ``expr`` for ``var`` in ``[ya, yb]`` (``yb=None``: +inf)."""
    box = _make_box(ya, yb)
    cenv = {k: iv.as_cert(v) for k, v in (env or {}).items()}
    return _ScaledEval(box, var, cenv).run(expr)


def _make_box(ya: Number, yb: Number | None) -> _Box:
    a = iv.as_cert(ya)
    a = CertScalar._raw(a._lo, a._lo)
    if yb is None:
        b = CertScalar._raw(iv._FINF, iv._FINF)
    else:
        b = iv.as_cert(yb)
        b = CertScalar._raw(b._hi, b._hi)
    return _Box(a, b)


def box_enclosure(expr: ParamExpr, var: str, ya: Number, yb: Number | None, env: Mapping[str, Number] | None = None) -> CertScalar:
    """Enclosure of ``{expr(Y) : ya <= Y <= yb}`` (``yb=None`` for +inf)."""
    box = _make_box(ya, yb)
    cenv = {k: iv.as_cert(v) for k, v in (env or {}).items()}
    ev = _ScaledEval(box, var, cenv)
    return ev.value(ev.run(expr))


@dataclass(frozen=True)
class TailInfo:
    """Asymptotic shape of an expression as the scale variable grows."""

    exponent: Fraction
    lead: CertScalar
    log_coef: CertScalar | None

    @property
    def bounded(self) -> bool:
        return self.exponent < 0 or (self.exponent == 0 and self.log_coef is None)


def tail_info(expr: ParamExpr, var: str, start: Number, env: Mapping[str, Number] | None = None) -> TailInfo:
    s = scaled_eval(expr, var, start, None, env)
    return TailInfo(s.e, s.g, s.h)


# -- branch and bound ---------------------------------------------------------------


@dataclass
class _Node:
    ya: CertScalar
    yb: CertScalar
    upper: CertScalar  # enclosure of the values on the box
    scaled: Scaled | None


def _split_point(a: CertScalar, b: CertScalar) -> CertScalar | None:
    if not b.is_finite():
        x = a.mid
        return CertScalar(max(x * 1e4, x + 1e4))
    lo, hi = a.mid, b.mid
    if lo > 0:
        m = math.sqrt(lo) * math.sqrt(hi)
    else:
        m = 0.5 * (lo + hi)
    if not (lo < m < hi) or (hi - lo) <= 1e-13 * max(abs(lo), abs(hi)):
        return None
    return CertScalar(m)


class _Search:
    def __init__(self, expr, var, env):
        self.expr = expr
        self.var = var
        self.env = {k: iv.as_cert(v) for k, v in (env or {}).items()}
        self.evals = 0

    def node(self, ya: CertScalar, yb: CertScalar) -> _Node:
        self.evals += 1
        box = _Box(ya, yb)
        ev = _ScaledEval(box, self.var, self.env)
        try:
            s = ev.run(self.expr)
            val = ev.value(s)
        except DomainViolation:
            s, val = None, CertScalar.entire()
        return _Node(ya, yb, val, s)

    def point(self, y: CertScalar) -> CertScalar:
        env = dict(self.env)
        env[self.var] = y
        return eval_at(self.expr, env)


def _initial_partition(lo: CertScalar, hi: CertScalar | None, pieces: int = 6) -> list[tuple[CertScalar, CertScalar]]:
    a = lo.mid
    if a <= 0:
        raise DomainError("the scale variable must have a positive lower bound")
    if hi is None:
        cap = max(a * 1e6, a + 1e6)
        ends = [a * (cap / a) ** (k / pieces) for k in range(pieces + 1)]
        pts = [lo] + [CertScalar(x) for x in ends[1:]]
        out = list(zip(pts[:-1], pts[1:]))
        out.append((pts[-1], CertScalar._raw(iv._FINF, iv._FINF)))
        return out
    b = hi.mid
    if b <= a:
        return [(lo, hi)]
    ends = [a * (b / a) ** (k / pieces) for k in range(1, pieces)]
    pts = [lo] + [CertScalar(x) for x in ends if a < x < b] + [hi]
    return list(zip(pts[:-1], pts[1:]))


def _domain_ends(dmin: Number, dmax: Number | None) -> tuple[CertScalar, CertScalar | None]:
    lo = iv.as_cert(dmin)
    lo = CertScalar._raw(lo._lo, lo._lo)
    if dmax is None:
        return lo, None
    hi = iv.as_cert(dmax)
    if not hi.is_finite():
        return lo, None
    return lo, CertScalar._raw(hi._hi, hi._hi)


def _provably_unbounded(s: Scaled | None) -> bool:
    if s is None:
        return False
    if s.e > 0 and s.g.certainly_positive() and (s.h is None or not s.h.certainly_negative()):
        return True
    if s.e >= 0 and s.h is not None and s.h.certainly_positive():
        return True
    return False


def sup_over_domain(
    expr: ParamExpr,
    var: str,
    dmin: Number,
    dmax: Number | None = None,
    env: Mapping[str, Number] | None = None,
    rel_tol: float = 1e-12,
    max_evals: int = 600,
) -> CertScalar:
    """Certified enclosure of ``sup { expr(Y) : dmin <= Y <= dmax }``.

    The returned interval's upper end is a proven upper bound of the supremum
    (+inf when the expression is unbounded above); its lower end is a value
    attained (up to rounding) at some sampled point, hence a lower bound of the
    supremum.  ``dmax=None`` means the domain is unbounded above.
    """
    if var not in expr.free_symbols():
        cenv = {k: iv.as_cert(v) for k, v in (env or {}).items()}
        return eval_at(expr, cenv)
    lo, hi = _domain_ends(dmin, dmax)
    search = _Search(expr, var, env)
    best_lo = search.point(lo)._lo
    heap: list = []
    counter = 0

    def push(n: _Node):
        nonlocal counter
        counter += 1
        key = n.upper._hi
        heapq.heappush(heap, (_neg_key(key), counter, n))

    def sample(y: CertScalar):
        nonlocal best_lo
        v = search.point(y)
        if iv._lt(best_lo, v._lo):
            best_lo = v._lo

    for a, b in _initial_partition(lo, hi):
        push(search.node(a, b))
        sample(a)
        if b.is_finite():
            sample(b)
    tail_splits = 0
    while True:
        _, _, top = heap[0]
        ub = top.upper._hi
        if ub == iv._FINF:
            if not top.yb.is_finite():
                if _provably_unbounded(top.scaled):
                    return CertScalar._raw(best_lo, iv._FINF)
                tail_splits += 1
                if tail_splits > 12:
                    if top.scaled is None:
                        raise TailAnalysisFailed("could not enclose the expression on the unbounded tail")
                    raise TailAnalysisFailed("behaviour as the scale variable grows is undecided")
        else:
            gap = iv._sub(ub, best_lo, 53, iv._RU)
            scale = iv._m.mpf_abs(ub)
            if iv._lt(scale, iv._FONE):
                scale = iv._FONE
            tol = iv._mul(scale, iv._m.from_float(rel_tol), 53, iv._RD)
            if iv._le(gap, tol) or search.evals >= max_evals:
                return CertScalar._raw(best_lo, ub)
        m = _split_point(top.ya, top.yb)
        if m is None:
            if ub == iv._FINF:
                raise TailAnalysisFailed("could not enclose the expression on a narrow box")
            return CertScalar._raw(best_lo, ub)
        heapq.heappop(heap)
        push(search.node(top.ya, m))
        push(search.node(m, top.yb))
        sample(m)
        if search.evals >= 4 * max_evals:
            if ub == iv._FINF:
                raise TailAnalysisFailed("evaluation budget exhausted before a finite bound was found")
            return CertScalar._raw(best_lo, ub)


def _neg_key(v):
    # heap on the negated upper end; mpf tuples are not orderable directly
    return -_m_to_sortable(v)


def _m_to_sortable(v) -> float:
    if v == iv._FINF:
        return math.inf
    if v == iv._FNINF:
        return -math.inf
    return iv._m.to_float(v, rnd=iv._RU)


def inf_over_domain(
    expr: ParamExpr,
    var: str,
    dmin: Number,
    dmax: Number | None = None,
    env: Mapping[str, Number] | None = None,
    rel_tol: float = 1e-12,
    max_evals: int = 600,
) -> CertScalar:
    """Certified enclosure of the infimum (via ``-sup(-expr)``)."""
    return -sup_over_domain(-expr, var, dmin, dmax, env, rel_tol, max_evals)


def sup_finite(expr: ParamExpr, var: str, dmin: Number, dmax: Number | None = None, env=None, **kw) -> CertScalar:
    """Like :func:`sup_over_domain` but raises :class:`UnboundedAbove` for +inf."""
    out = sup_over_domain(expr, var, dmin, dmax, env, **kw)
    if not out.is_finite():
        raise UnboundedAbove(f"{expr.to_text()[:80]} is unbounded above on the domain")
    return out


@dataclass(frozen=True)
class SignCertificate:
    holds: bool
    boxes: int
    counterexample: CertScalar | None = None


def certify_nonpositive(
    expr: ParamExpr,
    var: str,
    dmin: Number,
    dmax: Number | None = None,
    env: Mapping[str, Number] | None = None,
    strict: bool = False,
    max_evals: int = 400,
) -> SignCertificate:
    """Prove ``expr(Y) <= 0`` (``< 0`` when strict) for every Y in the domain.

    ``holds`` is True only with a proof.  A False result either carries a
    sampled counterexample or means the budget ran out.
    """
    search = _Search(expr, var, env)
    if var not in expr.free_symbols():
        v = eval_at(expr, search.env)
        ok = v.certainly_negative() if strict else v.certainly_le(0)
        return SignCertificate(ok, 0, None if ok else v)
    lo, hi = _domain_ends(dmin, dmax)

    def good(v: CertScalar) -> bool:
        return v.certainly_negative() if strict else v.certainly_le(0)

    def bad(v: CertScalar) -> bool:
        return v.certainly_positive() if strict else v.certainly_gt(0)

    stack = list(_initial_partition(lo, hi))
    tail_splits = 0
    while stack:
        a, b = stack.pop()
        n = search.node(a, b)
        if good(n.upper):
            continue
        pv = search.point(a)
        if bad(pv):
            return SignCertificate(False, search.evals, a)
        if search.evals >= max_evals:
            return SignCertificate(False, search.evals, None)
        if not b.is_finite():
            tail_splits += 1
            if tail_splits > 12:
                return SignCertificate(False, search.evals, None)
        m = _split_point(a, b)
        if m is None:
            return SignCertificate(False, search.evals, None)
        stack.append((m, b))
        stack.append((a, m))
    return SignCertificate(True, search.evals, None)


def certify_positive(expr: ParamExpr, var: str, dmin: Number, dmax: Number | None = None, env=None, max_evals: int = 400) -> SignCertificate:
    """Prove ``expr(Y) > 0`` on the whole domain."""
    return certify_nonpositive(-expr, var, dmin, dmax, env, strict=True, max_evals=max_evals)


def over_power(expr: ParamExpr, var: str, e: Fraction) -> ParamExpr:
    """``expr / var**e`` (used to bound growing quantities by ``kappa * Y**e``)."""
    if e == 1:
        return Div(expr, Sym(var))
    return Div(expr, Pow(Sym(var), Fraction(e)))
