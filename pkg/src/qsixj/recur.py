"""Linear-time evaluation of a Tet column through the three-term recurrence.

For fixed boundary labels (a, b, c, d) and fixed l, the values
T_j = Tet(a, b, c, d; j, l) over the admissible j satisfy

    sub(j) T_{j-2} + (diag(j) - lambda(a, b, l)) T_j + sup(j) T_{j+2} = 0

with

    sup(j)  = [(a+d-j)/2] [(b+c-j)/2]
    sub(j)  = (N_j / N_{j-2}) sup(j-2)
    diag(j) = -[2] lambda(a, j, d) lambda(b, j, c) / ([j] [j+2]),   diag(0) = 0

where N_j = theta(b,c,j) theta(a,d,j) / Delta_j is the norm of the horizontal
basis element.  The column is seeded at j = jmin, where the explicit sum has a
single term, and propagated forward.  In the real regimes a second run seeded
at jmax is propagated backward and the two are spliced where they agree, since either run alone loses digits wherever the
column is the smaller solution in its direction of travel.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import opcount
from .admiss import FourValentSpace
from .errors import NumericalDiagnosticError, UnsupportedRegimeError
from .networks import NetValue, bubble, tet_oracle, tet_oracle_table, theta
from .qnum import QContext, SignedLog, qint, qint_array

__all__ = [
    "lambda_eig",
    "lambda_array",
    "norm_j",
    "norm_l",
    "norm_arrays",
    "RecurCoeffs",
    "build_coeffs",
    "TetColumn",
    "TetTable",
    "tet_column_recur",
    "tet_column_oracle",
    "tet_table_oracle",
    "tet_table_recur",
]

COEFF_OPS = 40
STEP_OPS = 8

_BIG = 1e100
_SMALL = 1e-100


def lambda_eig(ctx: QContext, a: int, b: int, l: int) -> float | complex:
    """Eigenvalue of the operator L on the vertical basis element l.

    ([(a-b+l)/2][(-a+b+l)/2] - [(a+b-l)/2][(a+b+l)/2 + 2]) / [2];
    at q = 1 this is (l(l+2) - a(a+2) - b(b+2)) / 4.
    """
    if (a + b + l) % 2:
        raise ValueError(f"lambda({a},{b},{l}) needs a+b+l even")
    num = qint(ctx, (a - b + l) // 2) * qint(ctx, (-a + b + l) // 2) - qint(ctx, (a + b - l) // 2) * qint(
        ctx, (a + b + l) // 2 + 2
    )
    return num / qint(ctx, 2)


def lambda_array(ctx: QContext, a, b, l) -> np.ndarray:
    a, b, l = (np.asarray(x, dtype=np.int64) for x in (a, b, l))
    num = qint_array(ctx, (a - b + l) // 2) * qint_array(ctx, (-a + b + l) // 2)
    num = num - qint_array(ctx, (a + b - l) // 2) * qint_array(ctx, (a + b + l) // 2 + 2)
    return num / qint(ctx, 2)


def _norm(ctx: QContext, x: int, y: int, k: int, z: int, w: int) -> NetValue:
    t1, t2, loop = theta(ctx, x, y, k), theta(ctx, z, w, k), bubble(ctx, k)
    if t1.exact_zero or t2.exact_zero or loop.exact_zero:
        raise ValueError(f"index {k} is not admissible")
    return NetValue(t1.value * t2.value / loop.value)


def norm_j(ctx: QContext, space: FourValentSpace, j: int) -> NetValue:
    """<j|j> = theta(b,c,j) theta(a,d,j) / Delta_j."""
    space.j_index(j)
    return _norm(ctx, space.b, space.c, j, space.a, space.d)


def norm_l(ctx: QContext, space: FourValentSpace, l: int) -> NetValue:
    """<l|l> = theta(a,b,l) theta(c,d,l) / Delta_l."""
    space.l_index(l)
    return _norm(ctx, space.a, space.b, l, space.c, space.d)


def _theta_arrays(ctx: QContext, x: int, y: int, z: np.ndarray):
    s = (x + y + z) // 2
    if not ctx.is_real:
        f = ctx._table.complex_array(int(s.max()) + 1)
        sgn = np.where(s % 2, -1.0, 1.0)
        return sgn * f[s + 1] * f[s - x] * f[s - y] * f[s - z] / (f[x] * f[y] * f[z])
    SG, LG = ctx.factorials(int(s.max()) + 1)
    sign = SG[s + 1] * SG[s - x] * SG[s - y] * SG[s - z] * SG[x] * SG[y] * SG[z]
    sign = np.where(s % 2, -sign, sign)
    log = LG[s + 1] + LG[s - x] + LG[s - y] + LG[s - z] - LG[x] - LG[y] - LG[z]
    return sign, log


def norm_arrays(ctx: QContext, space: FourValentSpace, basis: str = "j"):
    """Norms of every admissible horizontal (``"j"``) or vertical (``"l"``) basis element.

    Real regimes return ``(sign, logmag)``; the complex regime a complex array.
    """
    a, b, c, d = space.labels
    if basis == "j":
        ks, pairs = np.array(space.js, dtype=np.int64), ((b, c), (a, d))
    elif basis == "l":
        ks, pairs = np.array(space.ls, dtype=np.int64), ((a, b), (c, d))
    else:
        raise ValueError("basis must be 'j' or 'l'")
    loop = np.where(ks % 2, -1.0, 1.0) * qint_array(ctx, ks + 1)
    if not ctx.is_real:
        return _theta_arrays(ctx, *pairs[0], ks) * _theta_arrays(ctx, *pairs[1], ks) / loop
    s1, l1 = _theta_arrays(ctx, *pairs[0], ks)
    s2, l2 = _theta_arrays(ctx, *pairs[1], ks)
    return (s1 * s2 * np.sign(loop)).astype(int), l1 + l2 - np.log(np.abs(loop))


@dataclass(frozen=True)
class RecurCoeffs:
    """Coefficients of the recurrence at fixed l, one entry per admissible j.

    ``sub[0]`` and ``sup[-1]`` multiply values outside the range and are zero.
    """

    js: np.ndarray
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    lam: float | complex

    def residual(self, values) -> np.ndarray:
        """Row residuals of the recurrence for a candidate column."""
        v = np.asarray(values)
        r = (self.diag - self.lam) * v
        r[1:] += self.sub[1:] * v[:-1]
        r[:-1] += self.sup[:-1] * v[1:]
        return r


def _jbasis_parts(ctx: QContext, space: FourValentSpace):
    """The l-independent pieces: diag(j), the raw sup(j) and the norms N_j."""
    a, b, c, d = space.labels
    js = np.array(space.js, dtype=np.int64)
    n = len(js)
    opcount.tally(COEFF_OPS * n)
    sup = qint_array(ctx, (a + d - js) // 2) * qint_array(ctx, (b + c - js) // 2)
    den = qint_array(ctx, js) * qint_array(ctx, js + 2)
    num = -qint(ctx, 2) * lambda_array(ctx, a, js, d) * lambda_array(ctx, b, js, c)
    # j = 0 is the special case L_00 = 0; [j+2] = 0 happens only at j = r-2,
    # where both lambdas vanish too and the limit of the ratio is 0.
    ok = (js > 0) & (den != 0)
    diag = np.zeros(n, dtype=num.dtype)
    diag[ok] = num[ok] / den[ok]
    return js, diag, sup, norm_arrays(ctx, space, "j")


def _assemble(js, diag, sup_raw, norms, lam, is_real) -> RecurCoeffs:
    n = len(js)
    if is_real:
        nsign, nlog = norms
        ratio = np.ones(n)
        ratio[1:] = nsign[1:] * nsign[:-1] * np.exp(nlog[1:] - nlog[:-1])
    else:
        ratio = np.ones(n, dtype=complex)
        ratio[1:] = norms[1:] / norms[:-1]
    sub = np.zeros(n, dtype=ratio.dtype if not is_real else float)
    sub[1:] = ratio[1:] * sup_raw[:-1]
    sup = np.array(sup_raw, dtype=sub.dtype)
    sup[-1] = 0
    return RecurCoeffs(js, sub, diag.astype(sub.dtype), sup, lam)


def build_coeffs(ctx: QContext, space: FourValentSpace, l: int) -> RecurCoeffs:
    if space.n == 0:
        raise ValueError(f"space {space.labels} is empty")
    space.l_index(l)
    js, diag, sup_raw, norms = _jbasis_parts(ctx, space)
    return _assemble(js, diag, sup_raw, norms, lambda_eig(ctx, space.a, space.b, l), ctx.is_real)


@dataclass(frozen=True)
class TetColumn:
    """Tet(a, b, c, d; j, l) for every admissible j at fixed l.

    Real regimes fill ``sign``/``logmag``; the complex regime fills ``cvalues``.
    ``cancel`` holds the per-entry cancellation estimate in decimal digits.
    """

    space: FourValentSpace
    l: int
    method: str
    sign: np.ndarray | None
    logmag: np.ndarray | None
    cancel: np.ndarray
    cvalues: np.ndarray | None = None

    @property
    def js(self) -> range:
        return self.space.js

    def __len__(self) -> int:
        return self.space.n

    def __getitem__(self, j: int) -> NetValue:
        k = self.space.j_index(j)
        if self.cvalues is not None:
            return NetValue(complex(self.cvalues[k]), cancel_digits=float(self.cancel[k]))
        return NetValue(SignedLog(int(self.sign[k]), float(self.logmag[k])), cancel_digits=float(self.cancel[k]))

    @property
    def values(self) -> dict[int, NetValue]:
        return {j: self[j] for j in self.js}

    def to_numpy(self) -> np.ndarray:
        """Plain float (or complex) values; may overflow to inf for huge labels."""
        if self.cvalues is not None:
            return self.cvalues.copy()
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.logmag)


@dataclass(frozen=True)
class TetTable:
    """Tet(a, b, c, d; j, l) for all admissible (j, l), indexed ``[j_index, l_index]``."""

    space: FourValentSpace
    method: str
    sign: np.ndarray | None
    logmag: np.ndarray | None
    cancel: np.ndarray
    cvalues: np.ndarray | None = None

    def __getitem__(self, jl: tuple[int, int]) -> NetValue:
        j, l = jl
        k, m = self.space.j_index(j), self.space.l_index(l)
        if self.cvalues is not None:
            return NetValue(complex(self.cvalues[k, m]), cancel_digits=float(self.cancel[k, m]))
        return NetValue(
            SignedLog(int(self.sign[k, m]), float(self.logmag[k, m])), cancel_digits=float(self.cancel[k, m])
        )

    def items(self):
        for j in self.space.js:
            for l in self.space.ls:
                yield (j, l), self[j, l]

    def column(self, l: int) -> TetColumn:
        m = self.space.l_index(l)
        if self.cvalues is not None:
            return TetColumn(self.space, l, self.method, None, None, self.cancel[:, m].copy(), self.cvalues[:, m].copy())
        return TetColumn(
            self.space, l, self.method, self.sign[:, m].copy(), self.logmag[:, m].copy(), self.cancel[:, m].copy()
        )

    def to_numpy(self) -> np.ndarray:
        if self.cvalues is not None:
            return self.cvalues.copy()
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.logmag)


def _empty_column(space: FourValentSpace, l: int, method: str, is_real: bool) -> TetColumn:
    if is_real:
        return TetColumn(space, l, method, np.zeros(0, int), np.zeros(0), np.zeros(0))
    return TetColumn(space, l, method, None, None, np.zeros(0), np.zeros(0, complex))


def _cancel_digits(t1, t2) -> float:
    big = max(abs(t1), abs(t2))
    tot = abs(t1 + t2)
    if big == 0:
        return 0.0
    if tot == 0:
        return math.inf
    return max(0.0, math.log10(big / tot))


def _coeff_loss(coeffs: RecurCoeffs) -> list[float]:
    # digits lost forming diag(j) - lambda: away from q = 1 both terms grow
    # like q^-(labels) while the difference need not, and later steps inherit it
    lam = coeffs.lam
    return [_cancel_digits(x, -lam) if x != lam else 0.0 for x in coeffs.diag.tolist()]


def _forward(coeffs: RecurCoeffs, seed: NetValue):
    """Propagate from jmin; returns mantissas, per-entry log scales, cancellation."""
    n = len(coeffs.js)
    subs = coeffs.sub.tolist()
    dg = (coeffs.diag - coeffs.lam).tolist()
    lost = _coeff_loss(coeffs)
    sups = coeffs.sup.tolist()
    mant = [0.0] * n
    scale = [0.0] * n
    canc = [0.0] * n
    worst = 0.0
    prev, cur, sc = 0.0, float(seed.sign), seed.logmag
    mant[0], scale[0], canc[0] = cur, sc, seed.cancel_digits
    for k in range(n - 1):
        t1 = subs[k] * prev
        t2 = dg[k] * cur
        nxt = -(t1 + t2) / sups[k]
        worst = max(worst, lost[k])
        canc[k + 1] = max(_cancel_digits(t1, t2), worst)
        prev, cur = cur, nxt
        m = abs(cur)
        if m > _BIG or 0.0 < m < _SMALL:
            prev /= m
            cur /= m
            sc += math.log(m)
        mant[k + 1], scale[k + 1] = cur, sc
    opcount.tally(STEP_OPS * n)
    return mant, scale, canc


def _backward(coeffs: RecurCoeffs, seed: NetValue):
    n = len(coeffs.js)
    subs = coeffs.sub.tolist()
    dg = (coeffs.diag - coeffs.lam).tolist()
    lost = _coeff_loss(coeffs)
    sups = coeffs.sup.tolist()
    mant = [0.0] * n
    scale = [0.0] * n
    canc = [0.0] * n
    worst = 0.0
    nxt, cur, sc = 0.0, float(seed.sign), seed.logmag
    mant[-1], scale[-1], canc[-1] = cur, sc, seed.cancel_digits
    for k in range(n - 1, 0, -1):
        t1 = dg[k] * cur
        t2 = sups[k] * nxt
        prv = -(t1 + t2) / subs[k]
        worst = max(worst, lost[k])
        canc[k - 1] = max(_cancel_digits(t1, t2), worst)
        nxt, cur = cur, prv
        m = abs(cur)
        if m > _BIG or 0.0 < m < _SMALL:
            nxt /= m
            cur /= m
            sc += math.log(m)
        mant[k - 1], scale[k - 1] = cur, sc
    opcount.tally(STEP_OPS * n)
    return mant, scale, canc


def _to_signed_log(mant, scale):
    m = np.asarray(mant)
    sign = np.sign(m).astype(int)
    with np.errstate(divide="ignore"):
        logmag = np.where(sign != 0, np.log(np.abs(m)) + np.asarray(scale), -np.inf)
    return sign, logmag


def _seed(ctx: QContext, space: FourValentSpace, j: int, l: int) -> NetValue:
    v = tet_oracle(ctx, space.a, space.b, space.c, space.d, j, l)
    if v.sign == 0:
        raise NumericalDiagnosticError(f"seed Tet{space.labels + (j, l)} vanishes; recurrence cannot start")
    return v


def tet_column_recur(
    ctx: QContext, space: FourValentSpace, l: int, *, two_sided: bool | None = None
) -> TetColumn:
    """Column of Tet values at fixed l by the three-term recurrence.

    The forward run starts from the single-term value at jmin.  Forward
    propagation alone loses digits wherever the wanted column is the smaller
    solution of the recurrence in the direction of travel, so in the real
    regimes the default (``two_sided=None``) also runs backward from the
    single-term value at jmax and splices the two runs where they agree.
    Pass ``two_sided=False`` for the plain forward recurrence.  The complex
    regime is always forward-only.
    """
    if two_sided is None:
        two_sided = ctx.is_real
    if space.n == 0:
        return _empty_column(space, l, "recurrence", ctx.is_real)
    return _column(ctx, space, l, build_coeffs(ctx, space, l), two_sided)


def _column(ctx: QContext, space: FourValentSpace, l: int, coeffs: RecurCoeffs, two_sided: bool | None) -> TetColumn:
    if two_sided is None:
        two_sided = ctx.is_real
    seed = _seed(ctx, space, space.jmin, l)

    if not ctx.is_real:
        if two_sided:
            raise UnsupportedRegimeError("two-sided recurrence needs a real regime")
        return _complex_column(space, l, coeffs, seed)

    fmant, fscale, fcanc = _forward(coeffs, seed)
    sign, logmag = _to_signed_log(fmant, fscale)
    cancel = np.asarray(fcanc)
    if two_sided and space.n > 2:
        bseed = _seed(ctx, space, space.jmax, l)
        bmant, bscale, bcanc = _backward(coeffs, bseed)
        bsign, blog = _to_signed_log(bmant, bscale)
        found = _splice_point(sign, logmag, bsign, blog)
        if found is None:
            raise NumericalDiagnosticError(f"forward and backward runs for l={l} in {space.labels} cannot be compared")
        k, gap = found
        sign = np.concatenate([sign[: k + 1], bsign[k + 1 :]])
        logmag = np.concatenate([logmag[: k + 1], blog[k + 1 :]])
        cancel = np.concatenate([cancel[: k + 1], np.asarray(bcanc)[k + 1 :]])
        if gap > _EPS:
            cancel = np.maximum(cancel, math.log10(gap / _EPS))
    return TetColumn(space, l, "recurrence", sign, logmag, cancel)


_EPS = float(np.finfo(float).eps)


def _splice_point(fsign, flog, bsign, blog) -> tuple[int, float] | None:
    """Index k such that forward is kept up to k and backward after it.

    Both runs start from exact values, so wherever both are accurate they
    agree.  Each run is only trustworthy on the side where the wanted column
    dominates the other solution of the recurrence, and which side that is
    depends on the regime and on l.  Agreement at two consecutive entries is
    a direct test that both runs are still good there.  Returns the index and
    the disagreement there (relative to the pair's larger entry), or None if
    no pair can be compared.
    """
    top = np.maximum(flog, blog)
    top = np.maximum(top[:-1], top[1:])
    if not np.isfinite(top).any():
        return None
    top = np.where(np.isfinite(top), top, np.inf)

    def diff(lo, hi):
        with np.errstate(under="ignore", invalid="ignore"):
            return np.abs(fsign[lo:hi] * np.exp(flog[lo:hi] - top) - bsign[lo:hi] * np.exp(blog[lo:hi] - top))

    # measured against the larger entry of each adjacent pair, so a true zero
    # inside the column (roots of unity) still counts as agreement
    n = len(fsign)
    pair = np.maximum(diff(0, n - 1), diff(1, n))
    pair = np.where(np.isfinite(pair), pair, np.inf)
    k = int(np.argmin(pair))
    return (k, float(pair[k])) if np.isfinite(pair[k]) else None


def _complex_column(space, l, coeffs, seed) -> TetColumn:
    n = space.n
    vals = np.zeros(n, dtype=complex)
    canc = np.zeros(n)
    vals[0] = seed.value
    canc[0] = seed.cancel_digits
    dg = coeffs.diag - coeffs.lam
    lost = _coeff_loss(coeffs)
    worst = 0.0
    for k in range(n - 1):
        t1 = coeffs.sub[k] * (vals[k - 1] if k > 0 else 0.0)
        t2 = dg[k] * vals[k]
        vals[k + 1] = -(t1 + t2) / coeffs.sup[k]
        worst = max(worst, lost[k])
        canc[k + 1] = max(_cancel_digits(t1, t2), worst)
    opcount.tally(STEP_OPS * n)
    if not np.isfinite(vals).all():
        raise NumericalDiagnosticError("complex recurrence overflowed; labels too large for the complex regime")
    return TetColumn(space, l, "recurrence", None, None, canc, vals)


def tet_column_oracle(ctx: QContext, space: FourValentSpace, l: int) -> TetColumn:
    """Column by evaluating the explicit sum separately for every j."""
    if space.n:
        space.l_index(l)
    vals = [tet_oracle(ctx, space.a, space.b, space.c, space.d, j, l) for j in space.js]
    cancel = np.array([v.cancel_digits for v in vals])
    if not ctx.is_real:
        return TetColumn(space, l, "oracle", None, None, cancel, np.array([v.value for v in vals], dtype=complex))
    sign = np.array([v.sign for v in vals], dtype=int)
    logmag = np.array([v.logmag for v in vals], dtype=float)
    return TetColumn(space, l, "oracle", sign, logmag, cancel)


def tet_table_oracle(ctx: QContext, space: FourValentSpace) -> TetTable:
    out = tet_oracle_table(ctx, space)
    if not ctx.is_real:
        return TetTable(space, "oracle", None, None, np.zeros(out.shape), out)
    sign, logmag, cancel = out
    return TetTable(space, "oracle", sign, logmag, cancel)


def tet_table_recur(
    ctx: QContext, space: FourValentSpace, *, two_sided: bool | None = None, workers: int = 1
) -> TetTable:
    """All columns of the space by the recurrence, optionally over a thread pool.

    Columns are independent; the result does not depend on ``workers``.
    """
    n = space.n
    cols = []
    if n:
        parts = _jbasis_parts(ctx, space)

        def one(l):
            coeffs = _assemble(*parts, lambda_eig(ctx, space.a, space.b, l), ctx.is_real)
            return _column(ctx, space, l, coeffs, two_sided)

        if workers > 1 and n > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                cols = list(pool.map(one, space.ls))
        else:
            cols = [one(l) for l in space.ls]
    if not ctx.is_real:
        vals = np.stack([c.cvalues for c in cols], axis=1) if n else np.zeros((0, 0), complex)
        cancel = np.stack([c.cancel for c in cols], axis=1) if n else np.zeros((0, 0))
        return TetTable(space, "recurrence", None, None, cancel, vals)
    if n == 0:
        return TetTable(space, "recurrence", np.zeros((0, 0), int), np.zeros((0, 0)), np.zeros((0, 0)))
    return TetTable(
        space,
        "recurrence",
        np.stack([c.sign for c in cols], axis=1),
        np.stack([c.logmag for c in cols], axis=1),
        np.stack([c.cancel for c in cols], axis=1),
    )
