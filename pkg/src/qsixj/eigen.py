"""The recurrence as a real symmetric tridiagonal eigenvalue problem.

In the horizontal basis the operator L has matrix Lbar, tridiagonal and
symmetric, and the columns T_l = (Tet(a,b,c,d; j, l))_j solve

    Lbar N^-1 T_l = lambda(a, b, l) T_l,     N = diag(<j|j>).

At q = 1 and at roots of unity every <j|j> has the sign (-1)^sigma with
sigma = (a+b+c+d)/2, so with D = diag(sqrt|<j|j>|) the matrix
(-1)^sigma D^-1 Lbar D^-1 is real symmetric with eigenvalues lambda(a, b, l)
and eigenvectors D^-1 T_l.  Normalization and sign of each T_l are then fixed
by the norm <l|l> and by the single-term value at j = jmin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .admiss import FourValentSpace
from .errors import ConvergenceError, DegenerateSpectrumError, NumericalDiagnosticError, UnsupportedRegimeError
from .networks import tet_oracle
from .recur import TetTable, _jbasis_parts, lambda_array, norm_arrays
from .qnum import QContext

__all__ = [
    "TriSystem",
    "EigenSolution",
    "build_trisystem",
    "solve_tridiagonal",
    "solve_space",
    "tet_table_eigen",
]

MAX_ITER = 30
ASSIGN_TOL = 1e-6


@dataclass(frozen=True)
class TriSystem:
    """Symmetrised tridiagonal matrix for one four-valent space, ordered by j."""

    space: FourValentSpace
    js: np.ndarray
    diag: np.ndarray
    off: np.ndarray
    sigma_sign: int
    norm_sign: np.ndarray
    norm_log: np.ndarray

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


@dataclass(frozen=True)
class EigenSolution:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    l_assignment: tuple[int, ...]


def _require_definite(ctx: QContext) -> None:
    if not ctx.is_definite:
        raise UnsupportedRegimeError(
            f"eigenvalue route needs a definite inner product (classical or root of unity), not {ctx.spec}"
        )


def build_trisystem(ctx: QContext, space: FourValentSpace) -> TriSystem:
    _require_definite(ctx)
    if space.n == 0:
        raise ValueError(f"space {space.labels} is empty")
    js, diag, sup_raw, (nsign, nlog) = _jbasis_parts(ctx, space)
    sgn = space.sigma_sign
    if (nsign != sgn).any():
        bad = int(js[np.argmax(nsign != sgn)])
        raise NumericalDiagnosticError(f"<j|j> at j={bad} does not have sign (-1)^sigma = {sgn}")
    # Lbar_jj = N_j diag(j) and Lbar_{j,j+2} = N_{j+2} sup(j); with every N_j
    # of sign sgn, sgn * D^-1 Lbar D^-1 reduces to the entries below
    t_diag = np.array(diag, dtype=float)
    t_off = sup_raw[:-1] * np.exp(0.5 * (nlog[1:] - nlog[:-1]))
    if not (np.isfinite(t_diag).all() and np.isfinite(t_off).all()):
        raise NumericalDiagnosticError(f"non-finite tridiagonal entries for {space.labels}")
    return TriSystem(space, js, t_diag, t_off, sgn, nsign, nlog)


def solve_tridiagonal(diag, off, max_iter: int = MAX_ITER) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a real symmetric tridiagonal matrix.

    Implicit QL iteration with Wilkinson shifts.  Returns eigenvalues in
    ascending order and the matching orthonormal eigenvectors as columns; each
    eigenvector is oriented so its largest-magnitude component is positive.
    """
    d = [float(x) for x in diag]
    n = len(d)
    if len(off) != max(n - 1, 0):
        raise ValueError(f"need {n - 1} off-diagonal entries, got {len(off)}")
    e = [float(x) for x in off] + [0.0]
    zt = np.eye(n)  # row k of zt is column k of the eigenvector matrix
    eps = np.finfo(float).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                raise ConvergenceError(
                    f"no convergence after {max_iter} QL sweeps for the block starting at row {l} (size {m - l + 1})"
                )
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi, zi1 = zt[i].copy(), zt[i + 1]
                zt[i] = c * zi - s * zi1
                zt[i + 1] = s * zi + c * zi1
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    w = np.array(d)
    order = np.argsort(w, kind="stable")
    V = zt[order].T.copy()
    for k in range(n):
        col = V[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            V[:, k] = -col
    return w[order], V


def _assign(ctx: QContext, space: FourValentSpace, w: np.ndarray) -> tuple[int, ...]:
    ls = np.array(space.ls)
    lams = lambda_array(ctx, space.a, space.b, ls)
    scale = max(1.0, float(np.abs(lams).max()))
    if len(ls) > 1:
        order = np.argsort(lams)
        gaps = np.diff(lams[order])
        k = int(np.argmin(gaps))
        if gaps[k] <= ASSIGN_TOL * scale:
            raise DegenerateSpectrumError(
                f"lambda(a,b,l) nearly coincide for l={ls[order[k]]} and l={ls[order[k + 1]]} in {space.labels}"
            )
    out = []
    for x in w:
        k = int(np.argmin(np.abs(lams - x)))
        if abs(lams[k] - x) > ASSIGN_TOL * scale:
            raise NumericalDiagnosticError(f"eigenvalue {x!r} matches no lambda(a,b,l) in {space.labels}")
        out.append(int(ls[k]))
    if len(set(out)) != len(out):
        raise DegenerateSpectrumError(f"eigenvalues of {space.labels} do not map one-to-one onto l")
    return tuple(out)


def solve_space(ctx: QContext, space: FourValentSpace) -> tuple[TriSystem, EigenSolution]:
    tri = build_trisystem(ctx, space)
    w, V = solve_tridiagonal(tri.diag, tri.off)
    return tri, EigenSolution(w, V, _assign(ctx, space, w))


def tet_table_eigen(ctx: QContext, space: FourValentSpace) -> TetTable:
    """Every Tet(a, b, c, d; j, l) of the space from one eigen-decomposition.

    Column l is sqrt(|<l|l>| |<j|j>|) y_j up to sign, where y is the unit
    eigenvector for lambda(a, b, l); the sign comes from the explicit
    single-term value at jmin.
    """
    _require_definite(ctx)
    n = space.n
    if n == 0:
        return TetTable(space, "eigen", np.zeros((0, 0), int), np.zeros((0, 0)), np.zeros((0, 0)))
    tri, sol = solve_space(ctx, space)
    _, lnorm = norm_arrays(ctx, space, "l")
    sign = np.zeros((n, n), dtype=int)
    logmag = np.full((n, n), -np.inf)
    a, b, c, d = space.labels
    for k, l in enumerate(sol.l_assignment):
        m = space.l_index(l)
        y = sol.eigenvectors[:, k]
        ysign = np.sign(y).astype(int)
        with np.errstate(divide="ignore"):
            logy = np.log(np.abs(y))
        # anchor the sign where the eigenvector component is well resolved
        anchor = 0 if abs(y[0]) > 1e-6 else int(np.argmax(np.abs(y)))
        ref = tet_oracle(ctx, a, b, c, d, space.js[anchor], l)
        if ref.sign == 0:
            raise NumericalDiagnosticError(f"cannot fix the sign of column l={l} in {space.labels}")
        flip = ref.sign * ysign[anchor]
        sign[:, m] = flip * ysign
        logmag[:, m] = np.where(ysign != 0, 0.5 * (lnorm[m] + tri.norm_log) + logy, -np.inf)
    return TetTable(space, "eigen", sign, logmag, np.zeros((n, n)))
