"""Operation-count scaling of a full Tet column: recurrence vs repeated explicit sums."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .admiss import FourValentSpace, make_space
from .opcount import counting
from .qnum import QContext
from .recur import tet_column_oracle, tet_column_recur

DEFAULT_SIZES = (100, 1000, 10000)


@dataclass
class BenchRow:
    n: int
    labels: tuple[int, int, int, int]
    l: int
    recur_ops: int
    recur_seconds: float
    oracle_ops: int | None = None
    oracle_seconds: float | None = None


def bench_space(ctx: QContext, n: int) -> tuple[FourValentSpace, int]:
    """Space of dimension n with all four labels equal to n-1, and a middle l."""
    space = make_space(ctx, n - 1, n - 1, n - 1, n - 1)
    assert space.n == n
    ls = space.ls
    return space, ls[len(ls) // 2]


def run_bench(sizes=DEFAULT_SIZES, *, oracle: bool = True, ctx: QContext | None = None) -> list[BenchRow]:
    ctx = ctx or QContext.classical()
    rows = []
    for n in sizes:
        space, l = bench_space(ctx, n)
        t0 = time.perf_counter()
        with counting() as c:
            tet_column_recur(ctx, space, l)
        row = BenchRow(n, space.labels, l, c.ops, time.perf_counter() - t0)
        if oracle:
            t0 = time.perf_counter()
            with counting() as c:
                tet_column_oracle(ctx, space, l)
            row.oracle_ops, row.oracle_seconds = c.ops, time.perf_counter() - t0
        rows.append(row)
    return rows


def fit_exponent(ns, ops) -> float:
    """Least-squares slope of log(ops) against log(n)."""
    slope, _ = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(ops, float)), 1)
    return float(slope)
