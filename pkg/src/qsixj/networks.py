"""Closed-form evaluation of the bubble, theta and Tet networks.

``tet_oracle`` is the explicit single-sum formula.  It costs a number of
operations linear in the labels per symbol and is used as the reference the
recurrence and eigenvalue routes are checked against.  Both 6j conventions
(Kauffman-Lins and the physics Racah-Wigner one) are assembled from these
three networks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import opcount
from .admiss import FourValentSpace, triple_admissible
from .errors import InadmissibleDenominatorError, UnsupportedRegimeError
from .qnum import ONE, ZERO, QContext, Regime, SignedLog, check_finite, qint, qint_sl

__all__ = [
    "NetValue",
    "TetArgs",
    "bubble",
    "theta",
    "tet_oracle",
    "tet_oracle_table",
    "tet_bounds",
    "sixj_kl",
    "sixj_rw",
]

# Tallied per summand / per call by the benchmark; roughly the number of
# table lookups, additions and the exponentiation each one performs.
TERM_OPS = 12
PREFACTOR_OPS = 24

# Above this many summands the numpy path beats the scalar loop.
_VECTOR_THRESHOLD = 24

# At q = 1 every summand is an integer ((S+1) times a multinomial coefficient),
# so for moderate arguments the alternating sum is accumulated exactly; this
# removes the 10**cancel_digits amplification of rounding errors in the terms.
_EXACT_TOP = 170
_INT_FACT = [math.factorial(k) for k in range(_EXACT_TOP + 2)]


@dataclass(frozen=True)
class NetValue:
    """Value of a closed network.

    ``value`` is a :class:`SignedLog` in the real regimes and a ``complex`` in
    the complex regime.  ``exact_zero`` is set only when an admissibility
    condition failed; a sum that cancels numerically to zero is not flagged.
    ``cancel_digits`` estimates the decimal digits lost to cancellation.
    """

    value: SignedLog | complex
    exact_zero: bool = False
    cancel_digits: float = 0.0

    @classmethod
    def zero(cls, ctx: QContext) -> NetValue:
        return cls(ZERO if ctx.is_real else 0j, exact_zero=True)

    @property
    def is_complex(self) -> bool:
        return not isinstance(self.value, SignedLog)

    @property
    def sign(self) -> int:
        if self.is_complex:
            return 0 if self.value == 0 else 1
        return self.value.sign

    @property
    def logmag(self) -> float:
        if self.is_complex:
            return math.log(abs(self.value)) if self.value != 0 else -math.inf
        return self.value.logmag

    def __float__(self) -> float:
        if self.is_complex:
            if self.value.imag != 0:
                raise TypeError("complex network value has a nonzero imaginary part")
            return self.value.real
        return float(self.value)

    def __complex__(self) -> complex:
        if self.is_complex:
            return self.value
        return complex(float(self.value))


class TetArgs(NamedTuple):
    """Arguments of Tet(a, b, c, d; j, l).

    The vertex triples are (a, b, l), (c, d, l), (a, d, j) and (c, b, j).
    """

    a: int
    b: int
    c: int
    d: int
    j: int
    l: int

    def triples(self) -> tuple[tuple[int, int, int], ...]:
        a, b, c, d, j, l = self
        return ((a, b, l), (c, d, l), (a, d, j), (c, b, j))


def tet_bounds(a, b, c, d, j, l):
    """The lower sums ``a_i``, upper sums ``b_j`` and summation range (m, M)."""
    lower = ((a + d + j) // 2, (b + c + j) // 2, (a + b + l) // 2, (c + d + l) // 2)
    upper = ((b + d + j + l) // 2, (a + c + j + l) // 2, (a + b + c + d) // 2)
    return lower, upper, max(lower), min(upper)


def _table(ctx: QContext, n: int):
    tab = ctx._table
    tab.ensure(n)
    if ctx.is_real:
        return tab.sign, tab.log
    return tab.values


def bubble(ctx: QContext, j: int) -> NetValue:
    """The loop value (-1)^j [j+1]."""
    if j < 0 or (ctx.regime is Regime.ROOT and j > ctx.r - 2):
        return NetValue.zero(ctx)
    if ctx.is_real:
        v = qint_sl(ctx, j + 1)
        return NetValue(-v if j % 2 else v)
    return NetValue(check_finite((-1) ** j * qint(ctx, j + 1)))


def theta(ctx: QContext, a: int, b: int, c: int) -> NetValue:
    """(-1)^s [s+1]! [s-a]! [s-b]! [s-c]! / ([a]! [b]! [c]!) with s = (a+b+c)/2."""
    if not triple_admissible(ctx, a, b, c):
        return NetValue.zero(ctx)
    s = (a + b + c) // 2
    if ctx.is_real:
        sg, lg = _table(ctx, s + 1)
        sign = sg[s + 1] * sg[s - a] * sg[s - b] * sg[s - c] * sg[a] * sg[b] * sg[c]
        if s % 2:
            sign = -sign
        if sign == 0:
            return NetValue(ZERO)
        log = lg[s + 1] + lg[s - a] + lg[s - b] + lg[s - c] - lg[a] - lg[b] - lg[c]
        return NetValue(SignedLog(sign, log))
    f = _table(ctx, s + 1)
    v = (-1) ** s * f[s + 1] * f[s - a] * f[s - b] * f[s - c] / (f[a] * f[b] * f[c])
    return NetValue(check_finite(v))


def _signed_sum(signs, logs) -> tuple[int, float, float]:
    """Sum of sign_k * exp(log_k), as (sign, logmag, cancelled decimal digits).

    Positive and negative summands are accumulated separately (exactly, with
    fsum, after scaling by the largest term) and subtracted once.
    """
    live = [(s, t) for s, t in zip(signs, logs) if s != 0]
    if not live:
        return 0, -math.inf, 0.0
    tmax = max(t for _, t in live)
    pos = math.fsum(math.exp(t - tmax) for s, t in live if s > 0)
    neg = math.fsum(math.exp(t - tmax) for s, t in live if s < 0)
    diff = pos - neg
    if diff == 0.0:
        return 0, -math.inf, math.inf
    return (1 if diff > 0 else -1), tmax + math.log(abs(diff)), max(0.0, -math.log10(abs(diff)))


def _signed_sum_np(signs: np.ndarray, logs: np.ndarray) -> tuple[int, float, float]:
    live = signs != 0
    if not live.any():
        return 0, -math.inf, 0.0
    tmax = logs[live].max()
    w = np.exp(np.where(live, logs - tmax, -np.inf))
    pos = math.fsum(w[signs > 0])
    neg = math.fsum(w[signs < 0])
    diff = pos - neg
    if diff == 0.0:
        return 0, -math.inf, math.inf
    return (1 if diff > 0 else -1), tmax + math.log(abs(diff)), max(0.0, -math.log10(abs(diff)))


def _exact_sum(lower, upper, lo, hi) -> tuple[int, float, float]:
    f = _INT_FACT
    a1, a2, a3, a4 = lower
    b1, b2, b3 = upper
    total = 0
    biggest = 0
    for S in range(lo, hi + 1):
        t = f[S + 1] // (f[S - a1] * f[S - a2] * f[S - a3] * f[S - a4] * f[b1 - S] * f[b2 - S] * f[b3 - S])
        biggest = max(biggest, t)
        total += -t if S % 2 else t
    if total == 0:
        return 0, -math.inf, math.inf
    cancel = max(0.0, math.log10(biggest) - math.log10(abs(total)))
    return (1 if total > 0 else -1), math.log(abs(total)), cancel


def tet_oracle(ctx: QContext, a: int, b: int, c: int, d: int, j: int, l: int) -> NetValue:
    """Tet(a, b, c, d; j, l) from the explicit alternating single sum."""
    args = TetArgs(a, b, c, d, j, l)
    if not all(triple_admissible(ctx, *t) for t in args.triples()):
        return NetValue.zero(ctx)
    lower, upper, lo, hi = tet_bounds(*args)
    if lo > hi:
        raise AssertionError(f"empty summation range m={lo} > M={hi} for admissible {args}")
    nterms = hi - lo + 1
    opcount.tally(TERM_OPS * nterms + PREFACTOR_OPS)
    a1, a2, a3, a4 = lower
    b1, b2, b3 = upper

    if not ctx.is_real:
        f = _table(ctx, hi + 1)
        terms = [
            (-1) ** S * f[S + 1]
            / (f[S - a1] * f[S - a2] * f[S - a3] * f[S - a4] * f[b1 - S] * f[b2 - S] * f[b3 - S])
            for S in range(lo, hi + 1)
        ]
        total = sum(terms)
        pre = 1.0 + 0j
        for x in upper:
            for y in lower:
                pre *= f[x - y]
        pre /= f[a] * f[b] * f[c] * f[d] * f[j] * f[l]
        biggest = max(abs(t) for t in terms)
        cancel = math.log10(biggest / abs(total)) if total != 0 else math.inf
        return NetValue(check_finite(pre * total), cancel_digits=max(0.0, cancel))

    sg, lg = _table(ctx, hi + 1)
    if ctx.regime is Regime.CLASSICAL and hi <= _EXACT_TOP:
        s_sign, s_log, cancel = _exact_sum(lower, upper, lo, hi)
    elif nterms > _VECTOR_THRESHOLD:
        SG, LG = ctx.factorials(hi + 1)
        S = np.arange(lo, hi + 1)
        dens = [S - a1, S - a2, S - a3, S - a4, b1 - S, b2 - S, b3 - S]
        logs = LG[S + 1] - sum(LG[k] for k in dens)
        signs = SG[S + 1] * np.prod([SG[k] for k in dens], axis=0)
        signs = np.where(S % 2, -signs, signs)
        s_sign, s_log, cancel = _signed_sum_np(signs, logs)
    else:
        signs, logs = [], []
        for S in range(lo, hi + 1):
            sgn = sg[S + 1] * sg[S - a1] * sg[S - a2] * sg[S - a3] * sg[S - a4]
            sgn *= sg[b1 - S] * sg[b2 - S] * sg[b3 - S]
            signs.append(-sgn if S % 2 else sgn)
            logs.append(
                lg[S + 1]
                - lg[S - a1] - lg[S - a2] - lg[S - a3] - lg[S - a4]
                - lg[b1 - S] - lg[b2 - S] - lg[b3 - S]
            )
        s_sign, s_log, cancel = _signed_sum(signs, logs)

    pre_sign, pre_log = 1, 0.0
    for x in upper:
        for y in lower:
            pre_sign *= sg[x - y]
            pre_log += lg[x - y]
    for k in (a, b, c, d, j, l):
        pre_sign *= sg[k]
        pre_log -= lg[k]
    if pre_sign == 0:
        raise AssertionError(f"vanishing factorial in the prefactor of admissible {args}")
    if s_sign == 0:
        return NetValue(ZERO, cancel_digits=cancel)
    return NetValue(SignedLog(pre_sign * s_sign, pre_log + s_log), cancel_digits=cancel)


def tet_oracle_table(ctx: QContext, space: FourValentSpace):
    """Tet(a,b,c,d; j, l) for every admissible (j, l), vectorised.

    Each entry is still its own explicit sum; only the bookkeeping is batched.
    Returns ``(sign, logmag, cancel_digits)`` arrays indexed ``[j_index, l_index]``
    in the real regimes and a single complex array otherwise.
    """
    n = space.n
    a, b, c, d = space.labels
    if n == 0:
        if ctx.is_real:
            return np.zeros((0, 0), int), np.zeros((0, 0)), np.zeros((0, 0))
        return np.zeros((0, 0), complex)
    J, L = np.meshgrid(np.array(space.js), np.array(space.ls), indexing="ij")
    lower = np.stack([(a + d + J) // 2, (b + c + J) // 2, (a + b + L) // 2, (c + d + L) // 2])
    upper = np.stack([(b + d + J + L) // 2, (a + c + J + L) // 2, np.full_like(J, (a + b + c + d) // 2)])
    lo, hi = lower.max(axis=0), upper.min(axis=0)
    if (lo > hi).any():
        raise AssertionError(f"empty summation range for admissible space {space.labels}")
    K = int((hi - lo).max()) + 1
    S = lo[..., None] + np.arange(K)
    valid = S <= hi[..., None]
    S = np.where(valid, S, lo[..., None])
    top = int(hi.max()) + 1
    opcount.tally(int(TERM_OPS * valid.sum() + PREFACTOR_OPS * n * n))
    dens = [S - lower[i][..., None] for i in range(4)] + [upper[i][..., None] - S for i in range(3)]
    pre_idx = [upper[x] - lower[y] for x in range(3) for y in range(4)]
    ends = [np.full_like(J, k) for k in (a, b, c, d)] + [J, L]

    if not ctx.is_real:
        f = ctx._table.complex_array(top)
        terms = np.where(S % 2, -1.0, 1.0) * f[S + 1] / np.prod([f[k] for k in dens], axis=0)
        terms = np.where(valid, terms, 0.0)
        pre = np.prod([f[k] for k in pre_idx], axis=0) / np.prod([f[k] for k in ends], axis=0)
        return pre * terms.sum(axis=-1)

    SG, LG = ctx.factorials(top)
    logs = LG[S + 1] - sum(LG[k] for k in dens)
    signs = SG[S + 1] * np.prod([SG[k] for k in dens], axis=0)
    signs = np.where(S % 2, -signs, signs)
    signs = np.where(valid, signs, 0)
    live = signs != 0
    tmax = np.where(live, logs, -np.inf).max(axis=-1)
    safe_tmax = np.where(np.isfinite(tmax), tmax, 0.0)
    w = np.where(live, np.exp(logs - safe_tmax[..., None]), 0.0)
    pos = np.where(signs > 0, w, 0.0).sum(axis=-1)
    neg = np.where(signs < 0, w, 0.0).sum(axis=-1)
    diff = pos - neg
    with np.errstate(divide="ignore"):
        s_log = safe_tmax + np.log(np.abs(diff))
        cancel = np.maximum(0.0, -np.log10(np.abs(diff)))
    pre_sign = np.prod([SG[k] for k in pre_idx + ends], axis=0)
    pre_log = sum(LG[k] for k in pre_idx) - sum(LG[k] for k in ends)
    sign = (pre_sign * np.sign(diff)).astype(int)
    logmag = np.where(sign != 0, pre_log + s_log, -np.inf)
    cancel = np.where(np.isfinite(tmax), cancel, 0.0)
    return sign, logmag, cancel


def sixj_kl(ctx: QContext, a: int, b: int, j: int, c: int, d: int, l: int) -> NetValue:
    """Kauffman-Lins 6j-symbol {a b j; c d l} = Tet(a,b,c,d;j,l) Delta_j / (theta(a,d,j) theta(b,c,j))."""
    tet = tet_oracle(ctx, a, b, c, d, j, l)
    if tet.exact_zero:
        return tet
    th1, th2 = theta(ctx, a, d, j), theta(ctx, b, c, j)
    if th1.exact_zero or th2.exact_zero:
        raise InadmissibleDenominatorError(
            f"theta({a},{d},{j}) or theta({b},{c},{j}) vanishes while Tet does not"
        )
    loop = bubble(ctx, j)
    if ctx.is_real:
        v = tet.value * loop.value / (th1.value * th2.value)
    else:
        v = check_finite(tet.value * loop.value / (th1.value * th2.value))
    return NetValue(v, cancel_digits=tet.cancel_digits)


def sixj_rw(ctx: QContext, j1: int, j2: int, j3: int, J1: int, J2: int, J3: int) -> NetValue:
    """Racah-Wigner 6j-symbol {j1/2 j2/2 j3/2; J1/2 J2/2 J3/2}; arguments are twice-spins.

    Only defined at q = 1.  The product of thetas under the square root has
    sign (-1)^(j3 - J3) in spin units; its absolute value is used, and the
    overall sign is that of Tet(J1, J2, j1, j2; J3, j3).
    """
    if ctx.regime is not Regime.CLASSICAL:
        raise UnsupportedRegimeError(f"Racah-Wigner convention is only defined at q = 1, not {ctx.spec}")
    tet = tet_oracle(ctx, J1, J2, j1, j2, J3, j3)
    if tet.exact_zero:
        return tet
    thetas = [theta(ctx, *t) for t in ((J1, J2, j3), (j1, j2, j3), (J1, j2, J3), (J2, j1, J3))]
    prod = ONE
    for t in thetas:
        if t.exact_zero:
            raise InadmissibleDenominatorError("theta factor vanishes while Tet does not")
        prod = prod * abs(t.value)
    return NetValue(tet.value / prod.sqrt(), cancel_digits=tet.cancel_digits)
