"""Admissibility of vertex triples and of four-valent boundary data.

The dimension ``n`` of the space of four-valent networks with boundary labels
(a, b, c, d) is computed from the closed-form counts; the j- and l-ranges are
the ones enforced by triple admissibility at the two vertices of each basis
element.  All labels are twice-spins.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LabelError
from .qnum import QContext, Regime

__all__ = [
    "LabelError",
    "FourValentSpace",
    "triple_admissible",
    "make_space",
    "nonzero_conditions",
    "dimension",
]


def triple_admissible(ctx: QContext, a: int, b: int, c: int) -> bool:
    if a < 0 or b < 0 or c < 0:
        return False
    if a > b + c or b > c + a or c > a + b or (a + b + c) % 2:
        return False
    if ctx.regime is Regime.ROOT:
        r = ctx.r
        if max(a, b, c) > r - 2 or a + b + c > 2 * r - 4:
            return False
    return True


def _check_labels(ctx: QContext, **labels: int) -> None:
    bound = ctx.label_bound()
    for name, v in labels.items():
        if int(v) != v or v < 0:
            raise LabelError(f"label {name}={v!r} must be a non-negative integer twice-spin")
        if bound is not None and v > bound:
            raise LabelError(f"label {name}={v} exceeds r-2={bound} for root:{ctx.r}")


def dimension(ctx: QContext, a: int, b: int, c: int, d: int) -> int:
    """Number of admissible j (equivalently l) values, from the closed-form count."""
    total = a + b + c + d
    if total % 2:
        return 0
    s = total // 2
    lo, hi = min(a, b, c, d), max(a, b, c, d)
    nbar = min(lo, s - hi) + 1
    if ctx.regime is Regime.ROOT:
        nbar = min(nbar, ctx.r - 1 - max(hi, s - lo))
    return max(0, nbar)


@dataclass(frozen=True)
class FourValentSpace:
    """Boundary labels (a, b, c, d) with their j-range, l-range and dimension.

    The horizontal basis pairs (a, d) and (b, c) through j; the vertical basis
    pairs (a, b) and (c, d) through l.  When ``n == 0`` both ranges are empty
    (``jmax == jmin - 2``).
    """

    ctx: QContext
    a: int
    b: int
    c: int
    d: int
    jmin: int
    jmax: int
    lmin: int
    lmax: int
    n: int

    @property
    def labels(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def js(self) -> range:
        return range(self.jmin, self.jmax + 1, 2)

    @property
    def ls(self) -> range:
        return range(self.lmin, self.lmax + 1, 2)

    @property
    def sigma(self) -> int:
        return (self.a + self.b + self.c + self.d) // 2

    @property
    def sigma_sign(self) -> int:
        return -1 if self.sigma % 2 else 1

    def j_index(self, j: int) -> int:
        if j not in self.js:
            raise ValueError(f"j={j} is not admissible for {self.labels} (range {list(self.js)})")
        return (j - self.jmin) // 2

    def l_index(self, l: int) -> int:
        if l not in self.ls:
            raise ValueError(f"l={l} is not admissible for {self.labels} (range {list(self.ls)})")
        return (l - self.lmin) // 2


def make_space(ctx: QContext, a: int, b: int, c: int, d: int) -> FourValentSpace:
    _check_labels(ctx, a=a, b=b, c=c, d=d)
    jmin = max(abs(a - d), abs(b - c))
    jmax = min(a + d, b + c)
    lmin = max(abs(a - b), abs(c - d))
    lmax = min(a + b, c + d)
    if ctx.regime is Regime.ROOT:
        r = ctx.r
        jmax = min(jmax, r - 2, 2 * r - 4 - max(a + d, b + c))
        lmax = min(lmax, r - 2, 2 * r - 4 - max(a + b, c + d))
    n = dimension(ctx, a, b, c, d)
    if n == 0:
        jmax, lmax = jmin - 2, lmin - 2
    return FourValentSpace(ctx, a, b, c, d, jmin, jmax, lmin, lmax, n)


def nonzero_conditions(ctx: QContext, a: int, b: int, c: int, d: int) -> bool:
    """True iff the four-valent space with these boundary labels is nonzero."""
    _check_labels(ctx, a=a, b=b, c=c, d=d)
    return dimension(ctx, a, b, c, d) > 0
