"""Quantum integers, quantum factorials and a signed-log number type.

Four deformation regimes are supported:

* ``classical``  q = 1, where [n] = n
* ``real``       real q > 0, q != 1
* ``root``       q = exp(i pi / r), where [n] = sin(n pi / r) / sin(pi / r)
* ``complex``    any other complex q != 0, +-1

The first three give real quantum integers and use :class:`SignedLog`
arithmetic, which keeps ratios of huge factorials representable.  The complex
regime uses plain complex doubles and is only meant for moderate labels
(twice-spins up to roughly 80).
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "Regime",
    "QContext",
    "SignedLog",
    "qint",
    "qint_sl",
    "qfact_sl",
    "qfact",
    "qint_array",
]


class Regime(str, Enum):
    CLASSICAL = "classical"
    REAL = "real"
    ROOT = "root"
    COMPLEX = "complex"


@dataclass(frozen=True, slots=True)
class SignedLog:
    """A real number stored as ``sign * exp(logmag)``.

    ``sign`` is -1, 0 or +1.  Zero is normalised to ``logmag = -inf`` so that
    all zeros compare equal.
    """

    sign: int
    logmag: float = 0.0

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign == 0:
            object.__setattr__(self, "logmag", -math.inf)
        elif math.isnan(self.logmag):
            raise ValueError("logmag is NaN")

    @classmethod
    def from_float(cls, x: float) -> SignedLog:
        if x == 0:
            return ZERO
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r}")
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def log10(self) -> float:
        return self.logmag / math.log(10.0)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.logmag)
        except OverflowError:
            return self.sign * math.inf

    def __neg__(self) -> SignedLog:
        return SignedLog(-self.sign, self.logmag)

    def __abs__(self) -> SignedLog:
        return SignedLog(abs(self.sign), self.logmag)

    def __mul__(self, other: SignedLog) -> SignedLog:
        if not isinstance(other, SignedLog):
            return NotImplemented
        s = self.sign * other.sign
        if s == 0:
            return ZERO
        return SignedLog(s, self.logmag + other.logmag)

    def __truediv__(self, other: SignedLog) -> SignedLog:
        if not isinstance(other, SignedLog):
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("SignedLog division by zero")
        if self.sign == 0:
            return ZERO
        return SignedLog(self.sign * other.sign, self.logmag - other.logmag)

    def __add__(self, other: SignedLog) -> SignedLog:
        if not isinstance(other, SignedLog):
            return NotImplemented
        if other.sign == 0:
            return self
        if self.sign == 0:
            return other
        hi, lo = (self, other) if self.logmag >= other.logmag else (other, self)
        t = math.exp(lo.logmag - hi.logmag)
        if hi.sign == lo.sign:
            return SignedLog(hi.sign, hi.logmag + math.log1p(t))
        if t == 1.0:
            return ZERO
        return SignedLog(hi.sign, hi.logmag + math.log1p(-t))

    def __sub__(self, other: SignedLog) -> SignedLog:
        return self + (-other)

    def __pow__(self, k: int) -> SignedLog:
        if self.sign == 0:
            if k < 0:
                raise ZeroDivisionError("SignedLog zero to a negative power")
            return ONE if k == 0 else ZERO
        return SignedLog(self.sign if k % 2 else 1, self.logmag * k)

    def sqrt(self) -> SignedLog:
        if self.sign < 0:
            raise ValueError("square root of a negative SignedLog")
        if self.sign == 0:
            return ZERO
        return SignedLog(1, 0.5 * self.logmag)


ZERO = SignedLog(0)
ONE = SignedLog(1, 0.0)


def _log_sinh(x: float) -> float:
    # x > 0
    if x > 20.0:
        return x - math.log(2.0) + math.log1p(-math.exp(-2.0 * x))
    return math.log(math.sinh(x))


class _FactorialTable:
    """Append-only memo of [0]!, [1]!, ... for one context.

    Extension happens under a lock; readers only ever see fully written
    prefixes, so a context may be shared across threads.
    """

    def __init__(self, ctx: QContext) -> None:
        self._ctx = ctx
        self._lock = threading.Lock()
        if ctx.regime is Regime.COMPLEX:
            self.values: list[complex] = [1.0 + 0.0j]
        else:
            self.sign: list[int] = [1]
            self.log: list[float] = [0.0]
        self._arrays: tuple[np.ndarray, np.ndarray] | None = None

    def __len__(self) -> int:
        if self._ctx.regime is Regime.COMPLEX:
            return len(self.values)
        return len(self.log)

    def ensure(self, n: int) -> None:
        if n < len(self):
            return
        with self._lock:
            ctx = self._ctx
            if ctx.regime is Regime.COMPLEX:
                vals = self.values
                for k in range(len(vals), n + 1):
                    vals.append(vals[-1] * qint(ctx, k))
                return
            sign, log = self.sign, self.log
            start = len(log)
            if ctx.regime is Regime.CLASSICAL:
                for k in range(start, n + 1):
                    log.append(math.lgamma(k + 1))
                    sign.append(1)
            else:
                for k in range(start, n + 1):
                    s = qint_sl(ctx, k)
                    prev = sign[-1]
                    if prev == 0 or s.sign == 0:
                        log.append(-math.inf)
                        sign.append(0)
                    else:
                        log.append(log[-1] + s.logmag)
                        sign.append(prev * s.sign)
            self._arrays = None

    def arrays(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """(sign, logmag) numpy views covering at least [0]! .. [n]!."""
        self.ensure(n)
        arr = self._arrays
        if arr is None or len(arr[1]) <= n:
            with self._lock:
                arr = (np.array(self.sign, dtype=np.int64), np.array(self.log, dtype=float))
                self._arrays = arr
        return arr

    def complex_array(self, n: int) -> np.ndarray:
        self.ensure(n)
        return np.array(self.values[: max(n + 1, len(self.values))], dtype=complex)


@dataclass(frozen=True)
class QContext:
    """Deformation parameter plus derived constants and the factorial memo.

    Use the constructors :meth:`classical`, :meth:`real`, :meth:`root_of_unity`,
    :meth:`complex_q` or :meth:`parse` rather than the raw initialiser.
    """

    regime: Regime
    q: complex | None = None
    r: int | None = None
    _inv_sin: float = field(init=False, repr=False, compare=False, default=1.0)
    _logq: float = field(init=False, repr=False, compare=False, default=0.0)
    _denom: complex = field(init=False, repr=False, compare=False, default=1.0)
    _table: _FactorialTable = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self) -> None:
        reg = Regime(self.regime)
        object.__setattr__(self, "regime", reg)
        if reg is Regime.CLASSICAL:
            object.__setattr__(self, "q", None)
            object.__setattr__(self, "r", None)
        elif reg is Regime.ROOT:
            if self.r is None or int(self.r) != self.r or self.r < 2:
                raise ValueError(f"root of unity needs an integer r >= 2, got {self.r!r}")
            object.__setattr__(self, "r", int(self.r))
            object.__setattr__(self, "q", None)
            object.__setattr__(self, "_inv_sin", 1.0 / math.sin(math.pi / self.r))
        elif reg is Regime.REAL:
            q = self.q
            if isinstance(q, complex):
                if q.imag != 0:
                    raise ValueError("real regime needs a real q")
                q = q.real
            if q is None or not q > 0:
                raise ValueError(f"real regime needs q > 0, got {self.q!r}")
            if q == 1:
                raise ValueError("q = 1 is the classical regime")
            object.__setattr__(self, "q", float(q))
            object.__setattr__(self, "_logq", abs(math.log(q)))
        else:
            if self.q is None:
                raise ValueError("complex regime needs q")
            q = complex(self.q)
            if q == 0:
                raise ValueError("q must be nonzero")
            denom = q - 1 / q
            if denom == 0:
                raise ValueError("q = +-1 makes quantum integers singular")
            object.__setattr__(self, "q", q)
            object.__setattr__(self, "_denom", denom)
        object.__setattr__(self, "_table", _FactorialTable(self))

    @classmethod
    def classical(cls) -> QContext:
        return cls(Regime.CLASSICAL)

    @classmethod
    def real(cls, q: float) -> QContext:
        return cls(Regime.REAL, q=q)

    @classmethod
    def root_of_unity(cls, r: int) -> QContext:
        return cls(Regime.ROOT, r=r)

    @classmethod
    def complex_q(cls, q: complex) -> QContext:
        return cls(Regime.COMPLEX, q=q)

    @classmethod
    def parse(cls, spec: str) -> QContext:
        """Parse ``classical``, ``root:R``, ``real:Q`` or ``complex:Q``."""
        kind, _, arg = spec.strip().partition(":")
        kind = kind.lower()
        try:
            if kind in ("classical", "1"):
                return cls.classical()
            if kind == "root":
                return cls.root_of_unity(int(arg))
            if kind == "real":
                return cls.real(float(arg))
            if kind == "complex":
                return cls.complex_q(complex(arg.replace(" ", "")))
        except ValueError as exc:
            raise ValueError(f"bad regime {spec!r}: {exc}") from None
        raise ValueError(f"unknown regime {spec!r} (classical | root:R | real:Q | complex:Q)")

    @property
    def spec(self) -> str:
        if self.regime is Regime.CLASSICAL:
            return "classical"
        if self.regime is Regime.ROOT:
            return f"root:{self.r}"
        return f"{self.regime.value}:{self.q}"

    @property
    def is_real(self) -> bool:
        return self.regime is not Regime.COMPLEX

    @property
    def is_definite(self) -> bool:
        """Whether the basis inner products are sign-definite (q = 1 or a root of unity)."""
        return self.regime in (Regime.CLASSICAL, Regime.ROOT)

    def label_bound(self) -> int | None:
        """Largest admissible edge label, or None when unbounded."""
        return self.r - 2 if self.regime is Regime.ROOT else None

    def factorials(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Sign and log-magnitude arrays of [0]! .. [n]! (real regimes)."""
        if not self.is_real:
            raise ValueError("signed-log factorials need a real regime")
        return self._table.arrays(n)


def qint(ctx: QContext, n: int) -> float | complex:
    """The quantum integer [n]."""
    reg = ctx.regime
    if reg is Regime.CLASSICAL:
        return float(n)
    if reg is Regime.ROOT:
        r = ctx.r
        k = n % (2 * r)
        if k % r == 0:
            return 0.0
        return math.sin(k * math.pi / r) * ctx._inv_sin
    if reg is Regime.REAL:
        t = ctx._logq
        return math.sinh(n * t) / math.sinh(t)
    q = ctx.q
    return (q**n - q ** (-n)) / ctx._denom


def qint_sl(ctx: QContext, n: int) -> SignedLog:
    """[n] as a SignedLog; real regimes only."""
    reg = ctx.regime
    if n == 0:
        return ZERO
    sgn = 1 if n > 0 else -1
    m = abs(n)
    if reg is Regime.CLASSICAL:
        return SignedLog(sgn, math.log(m))
    if reg is Regime.ROOT:
        r = ctx.r
        k = m % (2 * r)
        if k % r == 0:
            return ZERO
        if k > r:
            sgn = -sgn
            k -= r
        return SignedLog(sgn, math.log(math.sin(k * math.pi / r) * ctx._inv_sin))
    if reg is Regime.REAL:
        t = ctx._logq
        return SignedLog(sgn, _log_sinh(m * t) - _log_sinh(t))
    raise ValueError("qint_sl is not defined for the complex regime")


def qfact_sl(ctx: QContext, n: int) -> SignedLog:
    """[n]! = [1][2]...[n] as a SignedLog (memoised per context)."""
    if n < 0:
        raise ValueError(f"quantum factorial of negative integer {n}")
    if not ctx.is_real:
        raise ValueError("qfact_sl is not defined for the complex regime")
    tab = ctx._table
    tab.ensure(n)
    return SignedLog(tab.sign[n], tab.log[n])


def qfact(ctx: QContext, n: int) -> float | complex:
    if n < 0:
        raise ValueError(f"quantum factorial of negative integer {n}")
    if ctx.is_real:
        return float(qfact_sl(ctx, n))
    tab = ctx._table
    tab.ensure(n)
    return tab.values[n]


def qint_array(ctx: QContext, ns) -> np.ndarray:
    """Vectorised :func:`qint` over an integer array."""
    ns = np.asarray(ns, dtype=np.int64)
    reg = ctx.regime
    if reg is Regime.CLASSICAL:
        return ns.astype(float)
    if reg is Regime.ROOT:
        r = ctx.r
        k = np.mod(ns, 2 * r)
        out = np.sin(k * (math.pi / r)) * ctx._inv_sin
        out[k % r == 0] = 0.0
        return out
    if reg is Regime.REAL:
        t = ctx._logq
        return np.sinh(ns * t) / math.sinh(t)
    q = ctx.q
    return (np.power(q, ns.astype(float)) - np.power(q, -ns.astype(float))) / ctx._denom


def check_finite(z: complex) -> complex:
    # the complex path has no rescaling; fail loudly instead of returning inf/nan
    if not cmath.isfinite(z):
        raise OverflowError("complex quantum value overflowed; labels too large for the complex regime")
    return z
