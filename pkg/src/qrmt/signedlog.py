"""Real numbers stored as a sign and a natural-log magnitude.

Products and quotients are exact in the log magnitude, so quantities such as
``q**(-N**3)`` survive long after a float64 would have overflowed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class SignedLog:
    """A real number ``sign * exp(logmag)``.

    ``sign`` is one of -1, 0, +1.  For zero the log magnitude is ``-inf``.
    """

    sign: int
    logmag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0:
            object.__setattr__(self, "logmag", -math.inf)

    # construction ---------------------------------------------------------
    @classmethod
    def from_float(cls, x: float) -> "SignedLog":
        x = float(x)
        if x == 0.0:
            return cls(0, -math.inf)
        if not math.isfinite(x):
            raise ValueError("cannot store a non-finite float")
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def exp(cls, logmag: float, sign: int = 1) -> "SignedLog":
        return cls(sign, float(logmag))

    @staticmethod
    def one() -> "SignedLog":
        return SignedLog(1, 0.0)

    @staticmethod
    def zero() -> "SignedLog":
        return SignedLog(0, -math.inf)

    # conversion -----------------------------------------------------------
    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        # math.exp raises on overflow; we prefer inf with the right sign
        if self.logmag > 709.78:
            return self.sign * math.inf
        return self.sign * math.exp(self.logmag)

    def to_float(self) -> float:
        return float(self)

    def is_representable(self) -> bool:
        return self.sign == 0 or -745.0 < self.logmag < 709.78

    # arithmetic -----------------------------------------------------------
    def __mul__(self, other):
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return SignedLog.zero()
        return SignedLog(self.sign * other.sign, self.logmag + other.logmag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("SignedLog division by zero")
        if self.sign == 0:
            return SignedLog.zero()
        return SignedLog(self.sign * other.sign, self.logmag - other.logmag)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __neg__(self):
        return SignedLog(-self.sign, self.logmag)

    def __abs__(self):
        return SignedLog(abs(self.sign), self.logmag)

    def __pow__(self, p: float):
        if self.sign == 0:
            if p > 0:
                return SignedLog.zero()
            raise ZeroDivisionError("0 raised to a non-positive power")
        if self.sign < 0:
            if float(p) != int(p):
                raise ValueError("non-integer power of a negative SignedLog")
            s = -1 if int(p) % 2 else 1
        else:
            s = 1
        return SignedLog(s, self.logmag * p)

    def __add__(self, other):
        return slsum([self, _coerce(other)])

    __radd__ = __add__

    def __sub__(self, other):
        return slsum([self, -_coerce(other)])

    def __rsub__(self, other):
        return slsum([_coerce(other), -self])

    def __repr__(self) -> str:
        return f"SignedLog(sign={self.sign}, logmag={self.logmag!r})"


def _coerce(x) -> SignedLog:
    if isinstance(x, SignedLog):
        return x
    return SignedLog.from_float(x)


def slsum(terms: Iterable[SignedLog], cancel_limit: float | None = None) -> SignedLog:
    """Sum SignedLog terms.

    Positive and negative parts are accumulated separately with a
    log-sum-exp and subtracted once at the end.  If ``cancel_limit`` is
    given, a ratio between the larger part and the result beyond it raises
    a PrecisionWarning.
    """
    terms = [_coerce(t) for t in terms]
    pos = [t.logmag for t in terms if t.sign > 0]
    neg = [t.logmag for t in terms if t.sign < 0]
    lp = _lse(pos)
    ln = _lse(neg)
    if lp == ln:
        return SignedLog.zero()
    if lp > ln:
        sign, big, small = 1, lp, ln
    else:
        sign, big, small = -1, ln, lp
    d = small - big
    val = big + (math.log1p(-math.exp(d)) if d > -math.inf else 0.0)
    if cancel_limit is not None and big - val > math.log(cancel_limit):
        from .errors import PrecisionWarning
        import warnings

        warnings.warn(
            f"cancellation of {math.exp(min(big - val, 700.0)):.3g} in signed sum",
            PrecisionWarning,
            stacklevel=2,
        )
    return SignedLog(sign, val)


def _lse(vals) -> float:
    if not vals:
        return -math.inf
    m = max(vals)
    if m == -math.inf:
        return m
    # fsum keeps the accumulation error down when there are many terms
    return m + math.log(math.fsum(math.exp(v - m) for v in vals))


def slprod(factors: Iterable) -> SignedLog:
    out = SignedLog.one()
    for f in factors:
        out = out * _coerce(f)
    return out


def signed_logsumexp(logs, signs, axis=None):
    """Vectorised signed log-sum-exp.

    Returns ``(sign, logabs)`` arrays of ``sum(signs * exp(logs))`` along
    ``axis``.  Exact zeros come back as sign 0 and logabs ``-inf``.
    """
    logs = np.asarray(logs, dtype=float)
    signs = np.asarray(signs, dtype=float)
    m = np.max(np.where(signs != 0, logs, -np.inf), axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    s = np.sum(signs * np.exp(logs - m), axis=axis, keepdims=True)
    with np.errstate(divide="ignore"):
        out = np.log(np.abs(s)) + m
    if axis is None:
        return float(np.sign(s).ravel()[0]), float(out.ravel()[0])
    return np.squeeze(np.sign(s), axis=axis), np.squeeze(out, axis=axis)
