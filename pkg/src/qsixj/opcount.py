"""Arithmetic-operation tally used by the scaling benchmark.

Counting is off unless a :func:`counting` block is active in the current
thread, so the hot paths only pay for one attribute lookup.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass

_local = threading.local()


@dataclass
class OpCounter:
    ops: int = 0


def tally(n: int) -> None:
    c = getattr(_local, "counter", None)
    if c is not None:
        c.ops += n


@contextmanager
def counting():
    """Collect the operations tallied inside the block.

    >>> with counting() as c:
    ...     tally(3)
    >>> c.ops
    3
    """
    prev = getattr(_local, "counter", None)
    c = OpCounter()
    _local.counter = c
    try:
        yield c
    finally:
        _local.counter = prev
        if prev is not None:
            prev.ops += c.ops
