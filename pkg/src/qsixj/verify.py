"""Cross-method comparison against the explicit sum."""

from __future__ import annotations

from collections.abc import Iterator

import numpy as np

from .admiss import FourValentSpace, make_space
from .eigen import tet_table_eigen
from .qnum import QContext
from .recur import TetTable, tet_table_oracle, tet_table_recur


def column_scaled_error(table: TetTable, ref: TetTable) -> float:
    """max over entries of |x - ref| / max_j |ref[:, l]|, per column l.

    This is the mixed tolerance max(rel * |ref|, rel * column norm) written as
    a single number.
    """
    if table.space.n == 0:
        return 0.0
    if table.cvalues is not None:
        x, o = table.cvalues, ref.cvalues
        norm = np.abs(o).max(axis=0)
        return float((np.abs(x - o) / np.where(norm > 0, norm, 1.0)).max())
    top = np.max(ref.logmag, axis=0)
    top = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(under="ignore"):
        x = table.sign * np.exp(table.logmag - top)
        o = ref.sign * np.exp(ref.logmag - top)
    return float(np.abs(x - o).max())


def iter_spaces(ctx: QContext, max_label: int) -> Iterator[FourValentSpace]:
    """All nonempty spaces with labels up to max_label (and r-2 at a root of unity)."""
    bound = ctx.label_bound()
    top = max_label if bound is None else min(max_label, bound)
    for a in range(top + 1):
        for b in range(top + 1):
            for c in range(top + 1):
                for d in range(top + 1):
                    if (a + b + c + d) % 2:
                        continue
                    space = make_space(ctx, a, b, c, d)
                    if space.n:
                        yield space


def compare_space(ctx: QContext, space: FourValentSpace) -> dict[str, float]:
    ref = tet_table_oracle(ctx, space)
    out = {"recurrence": column_scaled_error(tet_table_recur(ctx, space), ref)}
    if ctx.is_definite:
        out["eigen"] = column_scaled_error(tet_table_eigen(ctx, space), ref)
    return out
