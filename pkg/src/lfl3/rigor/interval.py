"""Outward-rounded real intervals on top of mpmath's raw binary floats.

A :class:`CertScalar` is a closed interval ``[lo, hi]`` with ``lo <= hi``
whose endpoints are binary floating point numbers.  Every operation rounds the
lower endpoint toward -inf and the upper one toward +inf, so the exact real
result of the operation applied to any members of the inputs lies inside the
output.  Endpoints may be infinite; ``0 * inf`` is taken to be ``0``, which is
the right convention for enclosures of bounded quantities.

Basic operations (+, -, *, /, sqrt) are correctly rounded by mpmath.  For
log, exp, pi, e and non-integer powers the result is additionally widened by a
relative ``2**-(prec-4)`` so that a misrounding of a few ulps cannot break
containment.
"""

from __future__ import annotations

import contextlib
import math
import os
from fractions import Fraction
from typing import Iterator, Union

import mpmath
from mpmath import libmp as _m

from ..errors import DomainViolation

_RD = _m.round_floor
_RU = _m.round_ceiling
_FINF = _m.finf
_FNINF = _m.fninf
_FZERO = _m.fzero
_FONE = _m.fone
_FNAN = _m.fnan

_add = _m.mpf_add
_sub = _m.mpf_sub
_mul = _m.mpf_mul
_div = _m.mpf_div
_lt = _m.mpf_lt
_le = _m.mpf_le
_neg = _m.mpf_neg


def _env_precision() -> int:
    raw = os.environ.get("LFL3_PRECISION")
    if not raw:
        return 128
    bits = int(raw)
    if bits < 53:
        raise ValueError("LFL3_PRECISION must be at least 53 bits")
    return bits


_STATE = {"prec": _env_precision()}


def get_precision() -> int:
    """Working precision (bits) of newly computed endpoints."""
    return _STATE["prec"]


def set_precision(bits: int) -> None:
    if bits < 53:
        raise ValueError("precision must be at least 53 bits")
    _STATE["prec"] = int(bits)


@contextlib.contextmanager
def working_precision(bits: int) -> Iterator[None]:
    old = _STATE["prec"]
    set_precision(bits)
    try:
        yield
    finally:
        _STATE["prec"] = old


def _is_special(v) -> bool:
    # zero, infinities and nan all have a zero mantissa in libmp's encoding
    return not v[1]


def _widen_down(v, prec):
    if _is_special(v):
        return v
    eps = _m.mpf_shift(_m.mpf_abs(v), -(prec - 4))
    return _sub(v, eps, prec, _RD)


def _widen_up(v, prec):
    if _is_special(v):
        return v
    eps = _m.mpf_shift(_m.mpf_abs(v), -(prec - 4))
    return _add(v, eps, prec, _RU)


def _mul_r(x, y, prec, rnd):
    if x == _FZERO or y == _FZERO:
        return _FZERO
    return _mul(x, y, prec, rnd)


def _min(*vals):
    best = vals[0]
    for v in vals[1:]:
        if _lt(v, best):
            best = v
    return best


def _max(*vals):
    best = vals[0]
    for v in vals[1:]:
        if _lt(best, v):
            best = v
    return best


def _check(v):
    if v == _FNAN:
        raise DomainViolation("undefined operation (nan) in interval arithmetic")
    return v


def _enclose_number(x, prec):
    """Return raw (lo, hi) enclosing the exact value of ``x``."""
    if isinstance(x, CertScalar):
        return x._lo, x._hi
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, int):
        return _m.from_int(x, prec, _RD), _m.from_int(x, prec, _RU)
    if isinstance(x, Fraction):
        return (
            _m.from_rational(x.numerator, x.denominator, prec, _RD),
            _m.from_rational(x.numerator, x.denominator, prec, _RU),
        )
    if isinstance(x, float):
        if math.isnan(x):
            raise DomainViolation("nan is not a real number")
        v = _m.from_float(x)
        return v, v
    if isinstance(x, mpmath.mpf):
        return x._mpf_, x._mpf_
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return _FINF, _FINF
        if s in ("-inf", "-infinity"):
            return _FNINF, _FNINF
        return _enclose_number(Fraction(s), prec)
    raise TypeError(f"cannot enclose {type(x).__name__}")


Number = Union[int, float, str, Fraction, "CertScalar"]


class CertScalar:
    """Closed interval ``[lo, hi]`` with outward-rounded endpoints.

    ``CertScalar(x)`` encloses the exact value of ``x`` (int, Fraction,
    decimal string, float or mpmath mpf).  ``CertScalar(a, b)`` is the hull of
    the two enclosures.
    """

    __slots__ = ("_lo", "_hi")

    def __init__(self, lo: Number, hi: Number | None = None):
        prec = _STATE["prec"]
        a_lo, a_hi = _enclose_number(lo, prec)
        if hi is None:
            self._lo, self._hi = a_lo, a_hi
            return
        b_lo, b_hi = _enclose_number(hi, prec)
        if _lt(b_hi, a_lo):
            raise ValueError("interval with lo > hi")
        self._lo, self._hi = a_lo, b_hi

    @classmethod
    def _raw(cls, lo, hi) -> "CertScalar":
        obj = object.__new__(cls)
        obj._lo = _check(lo)
        obj._hi = _check(hi)
        return obj

    # -- construction helpers --------------------------------------------------

    @classmethod
    def pi(cls) -> "CertScalar":
        prec = _STATE["prec"]
        return cls._raw(_widen_down(_m.mpf_pi(prec, _RD), prec), _widen_up(_m.mpf_pi(prec, _RU), prec))

    @classmethod
    def e(cls) -> "CertScalar":
        prec = _STATE["prec"]
        return cls._raw(_widen_down(_m.mpf_e(prec, _RD), prec), _widen_up(_m.mpf_e(prec, _RU), prec))

    @classmethod
    def entire(cls) -> "CertScalar":
        return cls._raw(_FNINF, _FINF)

    # -- inspection ------------------------------------------------------------

    @property
    def lo(self) -> mpmath.mpf:
        return mpmath.mpf(self._lo)

    @property
    def hi(self) -> mpmath.mpf:
        return mpmath.mpf(self._hi)

    @property
    def lo_float(self) -> float:
        """Lower endpoint rounded down to a double."""
        return _m.to_float(self._lo, rnd=_RD)

    @property
    def hi_float(self) -> float:
        """Upper endpoint rounded up to a double."""
        return _m.to_float(self._hi, rnd=_RU)

    @property
    def mid(self) -> float:
        lo, hi = self.lo_float, self.hi_float
        if math.isinf(lo) or math.isinf(hi):
            return lo if math.isinf(hi) else hi
        return 0.5 * (lo + hi)

    @property
    def width(self) -> mpmath.mpf:
        return mpmath.mpf(_sub(self._hi, self._lo, 53, _RU))

    def is_finite(self) -> bool:
        return self._lo not in (_FINF, _FNINF) and self._hi not in (_FINF, _FNINF)

    def is_point(self) -> bool:
        return self._lo == self._hi

    def lo_rational(self) -> Fraction:
        p, q = _m.to_rational(self._lo)
        return Fraction(int(p), int(q))

    def hi_rational(self) -> Fraction:
        p, q = _m.to_rational(self._hi)
        return Fraction(int(p), int(q))

    def contains(self, x) -> bool:
        """True when the exact value ``x`` is inside the interval."""
        if isinstance(x, CertScalar):
            return _le(self._lo, x._lo) and _le(x._hi, self._hi)
        if isinstance(x, mpmath.mpf):
            v = x._mpf_
            return _le(self._lo, v) and _le(v, self._hi)
        if isinstance(x, float):
            v = _m.from_float(x)
            return _le(self._lo, v) and _le(v, self._hi)
        q = Fraction(x)
        lo_ok = self._lo == _FNINF or (self._lo != _FINF and self.lo_rational() <= q)
        hi_ok = self._hi == _FINF or (self._hi != _FNINF and q <= self.hi_rational())
        return lo_ok and hi_ok

    def contains_zero(self) -> bool:
        return _le(self._lo, _FZERO) and _le(_FZERO, self._hi)

    # certain comparisons: true only if every member satisfies the relation
    def certainly_lt(self, other: Number) -> bool:
        o = _as_cert(other)
        return _lt(self._hi, o._lo)

    def certainly_le(self, other: Number) -> bool:
        o = _as_cert(other)
        return _le(self._hi, o._lo)

    def certainly_gt(self, other: Number) -> bool:
        o = _as_cert(other)
        return _lt(o._hi, self._lo)

    def certainly_ge(self, other: Number) -> bool:
        o = _as_cert(other)
        return _le(o._hi, self._lo)

    def certainly_positive(self) -> bool:
        return _lt(_FZERO, self._lo)

    def certainly_negative(self) -> bool:
        return _lt(self._hi, _FZERO)

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other: Number) -> "CertScalar":
        o = _as_cert(other)
        prec = _STATE["prec"]
        return CertScalar._raw(_add(self._lo, o._lo, prec, _RD), _add(self._hi, o._hi, prec, _RU))

    __radd__ = __add__

    def __neg__(self) -> "CertScalar":
        return CertScalar._raw(_neg(self._hi), _neg(self._lo))

    def __pos__(self) -> "CertScalar":
        return self

    def __sub__(self, other: Number) -> "CertScalar":
        o = _as_cert(other)
        prec = _STATE["prec"]
        return CertScalar._raw(_sub(self._lo, o._hi, prec, _RD), _sub(self._hi, o._lo, prec, _RU))

    def __rsub__(self, other: Number) -> "CertScalar":
        return _as_cert(other) - self

    def __mul__(self, other: Number) -> "CertScalar":
        o = _as_cert(other)
        prec = _STATE["prec"]
        a, b, c, d = self._lo, self._hi, o._lo, o._hi
        lo = _min(_mul_r(a, c, prec, _RD), _mul_r(a, d, prec, _RD), _mul_r(b, c, prec, _RD), _mul_r(b, d, prec, _RD))
        hi = _max(_mul_r(a, c, prec, _RU), _mul_r(a, d, prec, _RU), _mul_r(b, c, prec, _RU), _mul_r(b, d, prec, _RU))
        return CertScalar._raw(lo, hi)

    __rmul__ = __mul__

    def reciprocal(self) -> "CertScalar":
        if self.contains_zero():
            raise DomainViolation(f"division by an interval containing zero: {self!r}")
        prec = _STATE["prec"]
        return CertScalar._raw(_div(_FONE, self._hi, prec, _RD), _div(_FONE, self._lo, prec, _RU))

    def __truediv__(self, other: Number) -> "CertScalar":
        o = _as_cert(other)
        if o.contains_zero():
            raise DomainViolation(f"division by an interval containing zero: {o!r}")
        if o.is_point() and self.is_finite() and o.is_finite():
            prec = _STATE["prec"]
            d = o._lo
            q1 = (_div(self._lo, d, prec, _RD), _div(self._hi, d, prec, _RD))
            q2 = (_div(self._lo, d, prec, _RU), _div(self._hi, d, prec, _RU))
            return CertScalar._raw(_min(*q1), _max(*q2))
        return self * o.reciprocal()

    def __rtruediv__(self, other: Number) -> "CertScalar":
        return _as_cert(other) / self

    def __pow__(self, exponent) -> "CertScalar":
        return power(self, exponent)

    def __abs__(self) -> "CertScalar":
        if _le(_FZERO, self._lo):
            return self
        if _le(self._hi, _FZERO):
            return -self
        return CertScalar._raw(_FZERO, _max(_neg(self._lo), self._hi))

    # -- misc --------------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, CertScalar):
            return NotImplemented
        return self._lo == other._lo and self._hi == other._hi

    def __hash__(self) -> int:
        return hash((self._lo, self._hi))

    def __repr__(self) -> str:
        return f"CertScalar[{_m.to_str(self._lo, 20)}, {_m.to_str(self._hi, 20)}]"

    def __float__(self) -> float:
        return self.mid

    def __reduce__(self):
        return (CertScalar._raw, (self._lo, self._hi))


def _as_cert(x: Number) -> CertScalar:
    if isinstance(x, CertScalar):
        return x
    return CertScalar(x)


def as_cert(x: Number) -> CertScalar:
    """Enclose ``x`` (no-op for an existing :class:`CertScalar`)."""
    return _as_cert(x)


# -- elementary functions ------------------------------------------------------


def sqrt(x: Number) -> CertScalar:
    x = _as_cert(x)
    if _lt(x._lo, _FZERO):
        raise DomainViolation(f"sqrt of an interval with negative part: {x!r}")
    prec = _STATE["prec"]
    return CertScalar._raw(_m.mpf_sqrt(x._lo, prec, _RD), _m.mpf_sqrt(x._hi, prec, _RU))


def log(x: Number) -> CertScalar:
    x = _as_cert(x)
    if _le(x._lo, _FZERO):
        raise DomainViolation(f"log of an interval not strictly positive: {x!r}")
    prec = _STATE["prec"]
    lo = _widen_down(_m.mpf_log(x._lo, prec, _RD), prec)
    hi = _widen_up(_m.mpf_log(x._hi, prec, _RU), prec)
    return CertScalar._raw(lo, hi)


def exp(x: Number) -> CertScalar:
    x = _as_cert(x)
    prec = _STATE["prec"]
    lo = _widen_down(_m.mpf_exp(x._lo, prec, _RD), prec)
    hi = _widen_up(_m.mpf_exp(x._hi, prec, _RU), prec)
    if _lt(lo, _FZERO):
        lo = _FZERO
    return CertScalar._raw(lo, hi)


def floor(x: Number) -> CertScalar:
    """Exact floor of both endpoints: every floor(v), v in x, lies inside."""
    x = _as_cert(x)
    lo = x._lo if _is_special(x._lo) else _m.mpf_floor(x._lo)
    hi = x._hi if _is_special(x._hi) else _m.mpf_floor(x._hi)
    return CertScalar._raw(lo, hi)


def maximum(*xs: Number) -> CertScalar:
    cs = [_as_cert(x) for x in xs]
    return CertScalar._raw(_max(*[c._lo for c in cs]), _max(*[c._hi for c in cs]))


def minimum(*xs: Number) -> CertScalar:
    cs = [_as_cert(x) for x in xs]
    return CertScalar._raw(_min(*[c._lo for c in cs]), _min(*[c._hi for c in cs]))


def hull(*xs: Number) -> CertScalar:
    cs = [_as_cert(x) for x in xs]
    return CertScalar._raw(_min(*[c._lo for c in cs]), _max(*[c._hi for c in cs]))


def _pow_int_raw(v, n, prec, rnd):
    if v == _FZERO:
        return _FZERO if n > 0 else _FONE
    r = _m.mpf_pow_int(v, n, prec + 10, rnd)
    r = _m.mpf_pos(r, prec, rnd)
    return _widen_down(r, prec) if rnd == _RD else _widen_up(r, prec)


def power(x: Number, exponent) -> CertScalar:
    """``x ** exponent`` for an integer or rational exponent."""
    x = _as_cert(x)
    q = Fraction(exponent)
    prec = _STATE["prec"]
    if q == 0:
        return CertScalar(1)
    if q.denominator == 1:
        n = q.numerator
        if n < 0:
            return power(x, -n).reciprocal()
        if n == 1:
            return x
        lo, hi = x._lo, x._hi
        if n % 2 == 1 or _le(_FZERO, lo):
            return CertScalar._raw(_pow_int_raw(lo, n, prec, _RD), _pow_int_raw(hi, n, prec, _RU))
        if _le(hi, _FZERO):
            return CertScalar._raw(_pow_int_raw(hi, n, prec, _RD), _pow_int_raw(lo, n, prec, _RU))
        top = _max(_pow_int_raw(lo, n, prec, _RU), _pow_int_raw(hi, n, prec, _RU))
        return CertScalar._raw(_FZERO, top)
    if q == Fraction(1, 2):
        return sqrt(x)
    if _lt(x._lo, _FZERO):
        raise DomainViolation(f"fractional power of an interval with negative part: {x!r}")
    if x._lo == _FZERO:
        if q < 0:
            raise DomainViolation("negative fractional power of an interval touching zero")
        upper = exp(log(CertScalar._raw(x._hi, x._hi)) * q) if x._hi != _FZERO else CertScalar(0)
        return CertScalar._raw(_FZERO, upper._hi)
    return exp(log(x) * q)
