import itertools
import math

import numpy as np
import pytest

from oracles import adm, sixj_cg, tet_exact, tet_root_mp, theta_exact, theta_root_mp
from qsixj import QContext, bubble, lambda_eig, make_space, qint, sixj_kl, sixj_rw, tet_oracle, theta
from qsixj.errors import UnsupportedRegimeError
from qsixj.networks import tet_bounds, tet_oracle_table
from qsixj.recur import tet_column_recur

CL = QContext.classical()
REAL = [CL, QContext.real(0.6), QContext.real(1.7), QContext.root_of_unity(5), QContext.root_of_unity(12)]

# exact values at q = 1, produced by the rational evaluator in oracles.py and frozen here
GOLDEN_TET = {
    (1, 1, 1, 1, 0, 0): -2,
    (1, 1, 1, 1, 2, 0): 3,
    (1, 1, 1, 1, 0, 2): 3,
    (1, 1, 1, 1, 2, 2): 1.5,
    (2, 2, 2, 2, 2, 2): 1.5,
    (2, 2, 2, 2, 0, 0): 3,
    (2, 2, 2, 2, 4, 4): 5 / 6,
    (7, 7, 7, 7, 6, 8): -9999 / 60025,
}
GOLDEN_THETA = {(1, 1, 0): -2, (1, 1, 2): 3, (3, 0, 3): -4, (2, 2, 2): -3}


@pytest.mark.parametrize("args,value", GOLDEN_TET.items())
def test_golden_tet(args, value):
    assert float(tet_exact(*args)) == pytest.approx(value, rel=1e-15)
    assert float(tet_oracle(CL, *args)) == pytest.approx(value, rel=1e-13)


@pytest.mark.parametrize("args,value", GOLDEN_THETA.items())
def test_golden_theta(args, value):
    assert theta_exact(*args) == value
    assert float(theta(CL, *args)) == pytest.approx(value, rel=1e-14)


def test_bubble_examples():
    assert float(bubble(CL, 0)) == 1
    assert float(bubble(CL, 1)) == -2
    z = bubble(QContext.root_of_unity(5), 4)
    assert z.exact_zero and z.sign == 0


def test_theta_examples():
    assert float(theta(CL, 3, 0, 3)) == pytest.approx(-4)
    assert float(theta(CL, 1, 1, 2)) == pytest.approx(3)
    assert theta(CL, 1, 1, 1).exact_zero


@pytest.mark.parametrize("ctx", REAL, ids=lambda c: c.spec)
def test_theta_with_trivial_edge_is_a_bubble(ctx):
    top = 60 if ctx.r is None else ctx.r - 2
    for a in range(top + 1):
        x, y = theta(ctx, a, 0, a), bubble(ctx, a)
        assert x.sign == y.sign
        assert x.logmag == pytest.approx(y.logmag, abs=1e-12 * max(1.0, abs(y.logmag)))


@pytest.mark.parametrize("ctx", REAL, ids=lambda c: c.spec)
def test_theta_symmetric(ctx):
    top = 10 if ctx.r is None else ctx.r - 2
    for a, b, c in itertools.product(range(top + 1), repeat=3):
        ref = theta(ctx, a, b, c)
        for p in itertools.permutations((a, b, c)):
            v = theta(ctx, *p)
            assert v.sign == ref.sign
            if v.sign:
                assert v.logmag == pytest.approx(ref.logmag, abs=1e-13)


@pytest.mark.parametrize("ctx", REAL + [QContext.complex_q(0.8 + 0.5j)], ids=lambda c: c.spec)
def test_all_zero_labels(ctx):
    assert complex(tet_oracle(ctx, 0, 0, 0, 0, 0, 0)) == pytest.approx(1.0)


def test_inadmissible_is_exact_zero():
    v = tet_oracle(CL, 1, 1, 1, 1, 1, 0)
    assert v.exact_zero and v.sign == 0


def test_cancelling_sum_is_numeric_zero_not_exact_zero():
    for args in itertools.product(range(9), repeat=6):
        if tet_exact(*args) == 0:
            v = tet_oracle(CL, *args)
            if not v.exact_zero:
                assert v.sign == 0 and v.cancel_digits == math.inf
                return
    pytest.fail("no cancelling admissible case found")


@pytest.mark.parametrize("ctx", [CL, QContext.root_of_unity(10), QContext.real(1.3)], ids=lambda c: c.spec)
def test_tet_symmetries(ctx):
    top = 8 if ctx.r is None else ctx.r - 2
    for a, b, c, d in itertools.product(range(top + 1), repeat=4):
        s = make_space(ctx, a, b, c, d)
        for j in s.js:
            for l in s.ls:
                ref = tet_oracle(ctx, a, b, c, d, j, l)
                for other in ((c, d, a, b, j, l), (d, c, b, a, j, l), (a, d, c, b, l, j)):
                    v = tet_oracle(ctx, *other)
                    assert v.sign == ref.sign
                    if v.sign:
                        assert v.logmag == pytest.approx(ref.logmag, abs=1e-12)


def test_single_term_at_both_ends():
    for a, b, c, d in itertools.product(range(11), repeat=4):
        s = make_space(CL, a, b, c, d)
        if not s.n:
            continue
        for l in s.ls:
            for j in (s.jmin, s.jmax):
                _, _, m, M = tet_bounds(a, b, c, d, j, l)
                assert m == M


@pytest.mark.parametrize(
    "ctx", [CL, QContext.real(1.4), QContext.root_of_unity(23), QContext.root_of_unity(9)], ids=lambda c: c.spec
)
def test_special_evaluations(ctx):
    top = 20 if ctx.r is None else ctx.r - 2
    lab = range(top + 1)
    for a, b, l in itertools.product(lab[1:], lab[1:], lab):
        if theta(ctx, a, b, l).exact_zero or theta(ctx, a, a, 2).exact_zero or theta(ctx, b, b, 2).exact_zero:
            continue
        v = float(tet_oracle(ctx, a, a, b, b, l, 2))
        ref = float(theta(ctx, a, b, l)) / (qint(ctx, a) * qint(ctx, b)) * lambda_eig(ctx, a, b, l)
        assert v == pytest.approx(ref, rel=1e-11)
    for a, d, j in itertools.product(lab[1:], lab, lab):
        if theta(ctx, a, d, j).exact_zero or theta(ctx, a, d, j + 2).exact_zero or theta(ctx, a, a, 2).exact_zero:
            continue
        v = float(tet_oracle(ctx, a, a, j, j + 2, d, 2))
        ref = qint(ctx, (a + d - j) // 2) / qint(ctx, a) * float(theta(ctx, a, d, j + 2))
        assert v == pytest.approx(ref, rel=1e-11)


@pytest.mark.parametrize("r", [5, 8, 13])
def test_root_of_unity_against_high_precision(r):
    ctx = QContext.root_of_unity(r)
    top = r - 2
    rng = np.random.default_rng(r)
    cases = [
        (a, b, c, d, j, l)
        for a, b, c, d, j, l in itertools.product(range(top + 1), repeat=6)
        if adm(a, b, l, r) and adm(c, d, l, r) and adm(a, d, j, r) and adm(c, b, j, r)
    ]
    for k in rng.choice(len(cases), size=min(150, len(cases)), replace=False):
        args = cases[k]
        ref = float(tet_root_mp(r, *args))
        assert float(tet_oracle(ctx, *args)) == pytest.approx(ref, rel=1e-12, abs=1e-12)
    for a, b, c in itertools.product(range(top + 1), repeat=3):
        assert float(theta(ctx, a, b, c)) == pytest.approx(float(theta_root_mp(r, a, b, c)), rel=1e-13)


def test_complex_regime_with_real_q_matches_real_regime():
    cq, rq = QContext.complex_q(0.7 + 0j), QContext.real(0.7)
    for args in [(1, 1, 1, 1, 0, 2), (4, 2, 4, 2, 4, 4), (6, 6, 6, 6, 4, 8)]:
        z = complex(tet_oracle(cq, *args))
        assert z.real == pytest.approx(float(tet_oracle(rq, *args)), rel=1e-12)
        assert abs(z.imag) < 1e-12 * abs(z.real)


def test_complex_overflow_is_reported():
    with pytest.raises(OverflowError):
        tet_oracle(QContext.complex_q(3.0 + 1.0j), 200, 200, 200, 200, 200, 200)


def test_large_labels_stay_finite():
    v = tet_oracle(CL, 900, 900, 900, 900, 900, 900)
    assert v.sign != 0 and math.isfinite(v.logmag)
    w = theta(QContext.real(3.0), 500, 500, 500)
    assert float(w) in (math.inf, -math.inf) and math.isfinite(w.logmag)


def test_vector_and_exact_paths_agree():
    # labels up to 40 take the exact integer sum; the table routine always uses logs
    for labels in [(20, 20, 20, 20), (30, 25, 28, 27), (40, 40, 40, 40)]:
        s = make_space(CL, *labels)
        sign, logmag, cancel = tet_oracle_table(CL, s)
        for (k, j), (m, l) in itertools.product(enumerate(s.js), enumerate(s.ls)):
            v = tet_oracle(CL, *labels, j, l)
            assert sign[k, m] == v.sign
            tol = 1e-13 * 10 ** cancel[k, m] * max(1.0, abs(v.logmag))
            assert logmag[k, m] == pytest.approx(v.logmag, abs=max(tol, 1e-12))


def test_float_sum_path_for_large_labels_is_accurate_without_cancellation():
    # hi > 170 uses the log-domain float sum; compare with the exact sum where cancellation is mild
    args = (100, 100, 100, 100, 0, 100)
    v = tet_oracle(CL, *args)
    ref = tet_exact(*args)
    assert v.sign == (1 if ref > 0 else -1)
    assert v.logmag == pytest.approx(math.log(abs(ref.numerator)) - math.log(ref.denominator), rel=1e-12)


def test_kl_examples():
    assert float(sixj_kl(CL, 0, 0, 0, 0, 0, 0)) == pytest.approx(1.0)
    assert float(sixj_kl(CL, 1, 1, 0, 1, 1, 0)) == pytest.approx(-2 * 1 / 4)
    r5 = QContext.root_of_unity(5)
    v = sixj_kl(r5, 1, 1, 2, 1, 1, 2)
    assert math.isfinite(float(v))
    col = tet_column_recur(r5, make_space(r5, 1, 1, 1, 1), 2)
    via_recur = float(col[2]) * float(bubble(r5, 2)) / (float(theta(r5, 1, 1, 2)) ** 2)
    assert float(v) == pytest.approx(via_recur, rel=1e-12)


def test_rw_examples():
    assert float(sixj_rw(CL, 2, 2, 2, 0, 2, 2)) == pytest.approx(-1 / 3, rel=1e-14)
    assert float(sixj_rw(CL, 0, 0, 0, 0, 0, 0)) == pytest.approx(1.0)
    assert float(sixj_rw(CL, 1, 1, 2, 1, 1, 2)) == pytest.approx(sixj_cg(1, 1, 2, 1, 1, 2), abs=1e-14)
    assert float(sixj_rw(CL, 1, 1, 2, 1, 1, 2)) == pytest.approx(1 / 6, rel=1e-14)


def test_rw_zero_argument_identity():
    for j1, j2, j3 in itertools.product(range(9), repeat=3):
        v = float(sixj_rw(CL, j1, j2, j3, 0, j3, j2))
        if (j1 + j2 + j3) % 2 or j1 > j2 + j3 or j2 > j1 + j3 or j3 > j1 + j2:
            assert v == 0
            continue
        ref = (-1) ** ((j1 + j2 + j3) // 2) / math.sqrt((j2 + 1) * (j3 + 1))
        assert v == pytest.approx(ref, rel=1e-13)
        if max(j1, j2, j3) <= 4:
            assert v == pytest.approx(sixj_cg(j1, j2, j3, 0, j3, j2), abs=1e-13)


def test_rw_needs_classical():
    with pytest.raises(UnsupportedRegimeError):
        sixj_rw(QContext.root_of_unity(7), 2, 2, 2, 0, 2, 2)
