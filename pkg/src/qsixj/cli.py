"""Command-line front end: single symbols, columns, tables, verification and the benchmark.

All labels are twice-spins.  Exit status is 0 on success, 2 when the request
is invalid and 3 when a numerical diagnostic fires or verification fails;
errors go to stderr as one line of JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field

from .admiss import make_space
from .bench import DEFAULT_SIZES, fit_exponent, run_bench
from .eigen import tet_table_eigen
from .errors import NumericalDiagnosticError
from .networks import NetValue, bubble, sixj_rw, tet_oracle, theta
from .qnum import QContext, Regime
from .recur import TetTable, tet_column_oracle, tet_column_recur, tet_table_oracle, tet_table_recur
from .verify import column_scaled_error, iter_spaces

MODES = ("single", "column", "table", "verify", "bench")
METHODS = ("oracle", "recurrence", "eigen", "auto")
FORMATS = ("text", "json", "csv")
CONVENTIONS = ("tet", "kl", "rw")
FIELDS = ("a", "b", "c", "d", "j", "l", "sign", "logmag", "value", "cancel_digits", "method", "convention", "q")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class JobError(Exception):
    def __init__(self, kind: str, reason: str, status: int = EXIT_INVALID):
        super().__init__(reason)
        self.kind, self.reason, self.status = kind, reason, status


@dataclass
class JobSpec:
    """One request.  For the rw convention ``labels`` is (j1, j2, j3, J1, J2, J3)."""

    mode: str = "single"
    regime: str = "classical"
    convention: str = "tet"
    labels: dict[str, int] = field(default_factory=dict)
    method: str = "auto"
    fmt: str = "text"
    two_sided: bool | None = None
    workers: int = 1
    max_label: int = 14
    tol: float = 1e-9
    sizes: tuple[int, ...] = DEFAULT_SIZES
    oracle: bool = True


def default_workers() -> int:
    raw = os.environ.get("QSIXJ_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        raise JobError("validation", f"QSIXJ_THREADS must be an integer, got {raw!r}") from None


def _context(job: JobSpec) -> QContext:
    try:
        return QContext.parse(job.regime)
    except ValueError as exc:
        raise JobError("validation", str(exc)) from None


def _validate(job: JobSpec, ctx: QContext) -> None:
    for name, value, allowed in (
        ("mode", job.mode, MODES),
        ("method", job.method, METHODS),
        ("format", job.fmt, FORMATS),
        ("convention", job.convention, CONVENTIONS),
    ):
        if value not in allowed:
            raise JobError("validation", f"{name} must be one of {', '.join(allowed)}, got {value!r}")
    if job.convention == "rw":
        if job.mode != "single":
            raise JobError("validation", "the rw convention only supports single symbols")
        if ctx.regime is not Regime.CLASSICAL:
            raise JobError("unsupported", f"the rw convention needs the classical regime, not {ctx.spec}")
    if job.method == "eigen" and not ctx.is_definite:
        raise JobError("unsupported", f"the eigen method needs classical or root:R, not {ctx.spec}")
    if job.two_sided and not ctx.is_real:
        raise JobError("unsupported", "two-sided recurrence needs a real regime")
    needed = {"single": "abcdjl", "column": "abcdl", "table": "abcd"}.get(job.mode, "")
    if job.convention == "rw":
        needed = ""
    missing = [k for k in needed if job.labels.get(k) is None]
    if missing:
        raise JobError("validation", f"missing label(s) {', '.join('-' + k for k in missing)} for mode {job.mode}")
    for k, v in job.labels.items():
        if v is not None and v < 0:
            raise JobError("validation", f"label {k}={v} is negative")


def _kl_factor(ctx: QContext, a: int, b: int, c: int, d: int, j: int) -> NetValue:
    """Delta_j / (theta(a,d,j) theta(b,c,j)), the Tet to KL 6j rescaling."""
    t1, t2 = theta(ctx, a, d, j), theta(ctx, b, c, j)
    loop = bubble(ctx, j)
    return NetValue(loop.value / (t1.value * t2.value))


def _row(ctx, labels, value: NetValue, method: str, convention: str) -> dict:
    row = dict(labels)
    row.update(method=method, convention=convention, q=ctx.spec, cancel_digits=float(value.cancel_digits))
    if value.is_complex:
        z = complex(value.value)
        row.update(sign=None, logmag=value.logmag, value=None, re=z.real, im=z.imag)
    else:
        row.update(sign=value.sign, logmag=value.logmag, value=float(value.value))
    return row


def _pick(job: JobSpec) -> str:
    if job.method != "auto":
        return job.method
    return "oracle" if job.mode == "single" else "recurrence"


def _table(ctx, job, space, method) -> TetTable:
    if method == "oracle":
        return tet_table_oracle(ctx, space)
    if method == "eigen":
        return tet_table_eigen(ctx, space)
    return tet_table_recur(ctx, space, two_sided=job.two_sided, workers=job.workers)


def _evaluate(ctx: QContext, job: JobSpec) -> list[dict]:
    lab = job.labels
    if job.convention == "rw":
        args = [lab[k] for k in ("j1", "j2", "j3", "J1", "J2", "J3")]
        v = sixj_rw(ctx, *args)
        names = dict(zip("abjcdl", args))
        return [_row(ctx, {k: names[k] for k in "abcdjl"}, v, "oracle", "rw")]

    a, b, c, d = (lab[k] for k in "abcd")
    method = _pick(job)
    try:
        space = make_space(ctx, a, b, c, d)
    except ValueError as exc:
        raise JobError("validation", str(exc)) from None

    if job.mode == "single":
        j, l = lab["j"], lab["l"]
        if method == "oracle":
            entries = [((j, l), tet_oracle(ctx, a, b, c, d, j, l))]
        else:
            if j not in space.js or l not in space.ls:
                raise JobError("validation", f"(j, l) = ({j}, {l}) is not admissible for {space.labels}")
            if method == "eigen":
                entries = [((j, l), tet_table_eigen(ctx, space)[j, l])]
            else:
                col = tet_column_recur(ctx, space, l, two_sided=job.two_sided)
                entries = [((j, l), col[j])]
    elif job.mode == "column":
        l = lab["l"]
        if space.n and l not in space.ls:
            raise JobError("validation", f"l={l} is not admissible for {space.labels} (range {list(space.ls)})")
        if method == "oracle":
            col = tet_column_oracle(ctx, space, l)
        elif method == "eigen":
            col = tet_table_eigen(ctx, space).column(l) if space.n else tet_column_oracle(ctx, space, l)
        else:
            col = tet_column_recur(ctx, space, l, two_sided=job.two_sided)
        entries = [((j, l), col[j]) for j in space.js]
    else:
        table = _table(ctx, job, space, method)
        entries = sorted(table.items()) if space.n else []

    rows = []
    for (j, l), v in entries:
        if job.convention == "kl" and not v.exact_zero:
            f = _kl_factor(ctx, a, b, c, d, j)
            v = NetValue(v.value * f.value, cancel_digits=v.cancel_digits)
        rows.append(_row(ctx, dict(a=a, b=b, c=c, d=d, j=j, l=l), v, method, job.convention))
    return rows


def _verify(ctx: QContext, job: JobSpec) -> tuple[int, list[dict]]:
    worst: dict[str, float] = {}
    where: dict[str, tuple] = {}
    count = 0
    for space in iter_spaces(ctx, job.max_label):
        count += 1
        ref = tet_table_oracle(ctx, space)
        tables = {"recurrence": tet_table_recur(ctx, space, two_sided=job.two_sided, workers=job.workers)}
        if ctx.is_definite:
            tables["eigen"] = tet_table_eigen(ctx, space)
        for name, t in tables.items():
            err = column_scaled_error(t, ref)
            if err >= worst.get(name, -1.0):
                worst[name], where[name] = err, space.labels
    rows = [
        dict(method=m, max_deviation=worst[m], worst_space=list(where[m]), spaces=count, q=ctx.spec, tol=job.tol)
        for m in worst
    ]
    status = EXIT_OK if all(v <= job.tol for v in worst.values()) else EXIT_NUMERIC
    return status, rows


def _bench(ctx: QContext, job: JobSpec) -> list[dict]:
    rows = [vars(r).copy() for r in run_bench(job.sizes, oracle=job.oracle, ctx=ctx)]
    for r in rows:
        r["labels"] = list(r["labels"])
    ns = [r["n"] for r in rows]
    if len(ns) > 1:
        fit = {"n": "fit", "recur_exponent": fit_exponent(ns, [r["recur_ops"] for r in rows])}
        if job.oracle:
            fit["oracle_exponent"] = fit_exponent(ns, [r["oracle_ops"] for r in rows])
        rows.append(fit)
    return rows


def _fmt_value(row: dict) -> str:
    if row.get("value") is None and "re" in row:
        return f"{complex(row['re'], row['im']):.15g}"
    return f"{row['value']:.15g}"


def _render(rows: list[dict], fmt: str, kind: str) -> str:
    if fmt == "json":
        return "".join(json.dumps(r) + "\n" for r in rows)
    if fmt == "csv":
        buf = io.StringIO()
        keys = list(FIELDS) if kind == "values" else list(dict.fromkeys(k for r in rows for k in r))
        if kind == "values" and any("re" in r for r in rows):
            keys += ["re", "im"]
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    lines = []
    for r in rows:
        if kind == "values":
            name = {"tet": "Tet", "kl": "KL6j", "rw": "RW6j"}[r["convention"]]
            args = (
                f"{r['a']},{r['b']},{r['c']},{r['d']};{r['j']},{r['l']}"
                if r["convention"] != "rw"
                else f"{r['a']},{r['b']},{r['j']};{r['c']},{r['d']},{r['l']}"
            )
            lines.append(
                f"{name}({args}) = {_fmt_value(r)}  [sign {r['sign']}, log|x| {r['logmag']:.12g},"
                f" cancel {r['cancel_digits']:.1f} digits, {r['method']}, {r['q']}]"
            )
        else:
            lines.append("  ".join(f"{k}={v}" for k, v in r.items()))
    return "".join(line + "\n" for line in lines)


def run(job: JobSpec) -> tuple[int, str]:
    """Execute a job and return (exit status, text for stdout)."""
    ctx = _context(job)
    _validate(job, ctx)
    try:
        if job.mode == "verify":
            status, rows = _verify(ctx, job)
            return status, _render(rows, job.fmt, "verify")
        if job.mode == "bench":
            return EXIT_OK, _render(_bench(ctx, job), job.fmt, "bench")
        return EXIT_OK, _render(_evaluate(ctx, job), job.fmt, "values")
    except NumericalDiagnosticError as exc:
        raise JobError(type(exc).__name__, str(exc), EXIT_NUMERIC) from None
    except ValueError as exc:
        raise JobError(type(exc).__name__, str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise JobError("usage", message)


def _sizes(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}") from None
    if any(n < 1 for n in out):
        raise argparse.ArgumentTypeError("sizes must be positive")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qsixj", description="q-deformed 6j-symbols by explicit sum, recurrence or eigenproblem")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, methods=True):
        sp.add_argument("--q", default="classical", metavar="SPEC", help="classical | root:R | real:Q | complex:Q")
        sp.add_argument("--format", choices=FORMATS, default="text")
        if methods:
            sp.add_argument("--method", choices=METHODS, default="auto")
            sp.add_argument("--convention", choices=("tet", "kl"), default="tet")
            sp.add_argument("--two-sided", dest="two_sided", action="store_const", const=True, default=None)
            sp.add_argument("--forward-only", dest="two_sided", action="store_const", const=False)
            sp.add_argument("--threads", type=int, default=None, help="worker threads (default: $QSIXJ_THREADS or 1)")

    def labels(sp, keys):
        for k in keys:
            sp.add_argument(f"-{k}", type=int, required=True, help=f"twice-spin {k}")

    tet = sub.add_parser("tet", help="one Tet value (or 6j with --convention kl)")
    common(tet)
    labels(tet, "abcdjl")
    kl = sub.add_parser("kl", help="one Kauffman-Lins 6j-symbol {a b j; c d l}")
    common(kl)
    labels(kl, "abcdjl")
    rw = sub.add_parser("rw", help="one Racah-Wigner 6j-symbol; arguments are twice-spins j1 j2 j3 J1 J2 J3")
    rw.add_argument("--q", default="classical", metavar="SPEC")
    rw.add_argument("--format", choices=FORMATS, default="text")
    rw.add_argument("spins", type=int, nargs=6, metavar="2J")
    col = sub.add_parser("column", help="all j at fixed l")
    common(col)
    labels(col, "abcdl")
    tab = sub.add_parser("table", help="all (j, l) of a four-valent space")
    common(tab)
    labels(tab, "abcd")
    ver = sub.add_parser("verify", help="max deviation of recurrence and eigen tables from the explicit sum")
    common(ver, methods=False)
    ver.add_argument("--max-label", type=int, default=14)
    ver.add_argument("--tol", type=float, default=1e-9)
    ver.add_argument("--two-sided", dest="two_sided", action="store_const", const=True, default=None)
    ver.add_argument("--forward-only", dest="two_sided", action="store_const", const=False)
    ver.add_argument("--threads", type=int, default=None)
    ben = sub.add_parser("bench", help="operation counts of a column: recurrence vs explicit sums")
    common(ben, methods=False)
    ben.add_argument("--sizes", type=_sizes, default=DEFAULT_SIZES, help="comma-separated dimensions")
    ben.add_argument("--no-oracle", dest="oracle", action="store_false")
    return p


def job_from_args(ns: argparse.Namespace) -> JobSpec:
    cmd = ns.command
    job = JobSpec(regime=ns.q, fmt=ns.format)
    threads = getattr(ns, "threads", None)
    job.workers = threads if threads is not None else default_workers()
    if job.workers < 1:
        raise JobError("validation", "--threads must be at least 1")
    if cmd in ("tet", "kl", "column", "table"):
        job.mode = {"tet": "single", "kl": "single"}.get(cmd, cmd)
        job.method = ns.method
        job.convention = "kl" if cmd == "kl" else ns.convention
        job.two_sided = ns.two_sided
        job.labels = {k: getattr(ns, k, None) for k in "abcdjl" if getattr(ns, k, None) is not None}
    elif cmd == "rw":
        job.convention = "rw"
        job.labels = dict(zip(("j1", "j2", "j3", "J1", "J2", "J3"), ns.spins))
    elif cmd == "verify":
        job.mode = "verify"
        job.max_label, job.tol, job.two_sided = ns.max_label, ns.tol, ns.two_sided
    else:
        job.mode = "bench"
        job.sizes, job.oracle = ns.sizes, ns.oracle
    return job


def main(argv: list[str] | None = None) -> int:
    try:
        job = job_from_args(build_parser().parse_args(argv))
        status, out = run(job)
    except JobError as exc:
        print(json.dumps({"error": exc.kind, "reason": exc.reason}), file=sys.stderr)
        return exc.status
    sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
