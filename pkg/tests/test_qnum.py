import math
import threading

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsixj import QContext, SignedLog
from qsixj.qnum import ONE, ZERO, Regime, qfact, qfact_sl, qint, qint_array, qint_sl


def test_qint_examples():
    assert qint(QContext.classical(), 5) == 5
    assert qint(QContext.root_of_unity(4), 2) == pytest.approx(math.sqrt(2), rel=1e-12)
    assert qint(QContext.root_of_unity(5), 0) == 0
    assert qint(QContext.real(2.0), 3) == pytest.approx(5.25, rel=1e-14)


def test_qint_sl_examples():
    ctx = QContext.classical()
    assert qint_sl(ctx, 3) == SignedLog(1, math.log(3))
    assert qint_sl(ctx, -2) == SignedLog(-1, math.log(2))
    assert qint_sl(QContext.root_of_unity(7), 7).sign == 0


def test_qfact_sl_examples():
    ctx = QContext.classical()
    assert qfact_sl(ctx, 0) == SignedLog(1, 0.0)
    v = qfact_sl(ctx, 4)
    assert v.sign == 1 and v.logmag == pytest.approx(math.log(24), rel=1e-15)
    assert qfact_sl(QContext.root_of_unity(3), 3).sign == 0


def test_qfact_negative_is_an_error():
    with pytest.raises(ValueError):
        qfact_sl(QContext.classical(), -1)
    with pytest.raises(ValueError):
        qfact(QContext.complex_q(0.5 + 0.5j), -3)


def test_complex_regime_has_no_signed_log():
    with pytest.raises(ValueError):
        qint_sl(QContext.complex_q(0.9 + 0.1j), 3)


@pytest.mark.parametrize(
    "bad",
    [lambda: QContext.root_of_unity(1), lambda: QContext.real(1.0), lambda: QContext.real(0.0),
     lambda: QContext.complex_q(0), lambda: QContext.complex_q(1)],
)
def test_context_validation(bad):
    with pytest.raises(ValueError):
        bad()


@pytest.mark.parametrize("spec", ["classical", "root:7", "real:0.5", "complex:(0.8+0.6j)"])
def test_parse_round_trip(spec):
    ctx = QContext.parse(spec)
    assert QContext.parse(ctx.spec) == ctx


def test_parse_rejects_garbage():
    for spec in ("root:x", "nope", "real:"):
        with pytest.raises(ValueError):
            QContext.parse(spec)


CONTEXTS = [
    QContext.classical(),
    QContext.real(0.7),
    QContext.real(1.9),
    QContext.root_of_unity(5),
    QContext.root_of_unity(13),
    QContext.complex_q(0.9 + 0.3j),
]


@pytest.mark.parametrize("ctx", CONTEXTS, ids=lambda c: c.spec)
def test_antisymmetry(ctx):
    for n in range(201):
        x, y = qint(ctx, -n), qint(ctx, n)
        assert x == pytest.approx(-y, rel=1e-12, abs=1e-300)


def test_classical_limit():
    cl = QContext.classical()
    for q in (1 - 1e-8, 1 + 1e-8):
        ctx = QContext.real(q)
        for n in range(-50, 51):
            assert qint(ctx, n) == pytest.approx(qint(cl, n), rel=1e-5)


@given(st.integers(min_value=2, max_value=1000), st.data())
def test_positive_below_r(r, data):
    n = data.draw(st.integers(min_value=1, max_value=r - 1))
    assert qint_sl(QContext.root_of_unity(r), n).sign == 1


def test_positive_below_r_exhaustive_small():
    for r in range(2, 60):
        ctx = QContext.root_of_unity(r)
        assert all(qint_sl(ctx, n).sign == 1 for n in range(1, r))
        assert qint_sl(ctx, r).sign == 0


def test_root_argument_reduction():
    ctx = QContext.root_of_unity(7)
    for n in range(-30, 30):
        assert qint(ctx, n + 14 * 1000) == pytest.approx(qint(ctx, n), abs=1e-13)


@given(st.sampled_from([-1, 0, 1]), st.floats(min_value=-700.0, max_value=700.0))
def test_signedlog_round_trip(sign, logmag):
    x = SignedLog(sign, logmag)
    back = SignedLog.from_float(float(x))
    assert back.sign == x.sign
    if sign:
        assert back.logmag == pytest.approx(logmag, rel=1e-14, abs=1e-15)


def test_float_round_trip_moderate():
    for x in (1e-200, -3.5, 0.0, 7.25e10, -1e250):
        assert float(SignedLog.from_float(x)) == pytest.approx(x, rel=1e-13)


@pytest.mark.parametrize("ctx", CONTEXTS[:5], ids=lambda c: c.spec)
def test_factorial_ratio(ctx):
    for n in range(1, 120):
        ratio = qfact_sl(ctx, n) / qfact_sl(ctx, n - 1) if qfact_sl(ctx, n - 1).sign else None
        if ratio is None:
            continue
        ref = qint_sl(ctx, n)
        assert ratio.sign == ref.sign
        if ref.sign:
            # log-domain accumulation: equality up to rounding of one addition
            assert ratio.logmag == pytest.approx(ref.logmag, abs=1e-12 * max(1.0, abs(qfact_sl(ctx, n).logmag)))


def test_factorial_ratio_exact_at_q1():
    ctx = QContext.classical()
    for n in range(1, 30):
        assert round(math.exp((qfact_sl(ctx, n) / qfact_sl(ctx, n - 1)).logmag)) == n


def test_signedlog_arithmetic():
    a, b = SignedLog.from_float(3.0), SignedLog.from_float(-5.0)
    assert float(a * b) == pytest.approx(-15.0)
    assert float(a / b) == pytest.approx(-0.6)
    assert float(a + b) == pytest.approx(-2.0)
    assert float(a - b) == pytest.approx(8.0)
    assert float(b**2) == pytest.approx(25.0)
    assert float(b**3) == pytest.approx(-125.0)
    assert float(SignedLog.from_float(16.0).sqrt()) == pytest.approx(4.0)
    assert (a - a).is_zero
    assert ZERO * a == ZERO
    assert float(ONE) == 1.0
    with pytest.raises(ZeroDivisionError):
        a / ZERO
    with pytest.raises(ValueError):
        b.sqrt()


def test_signedlog_overflow_is_infinite():
    big = SignedLog(-1, 1e4)
    assert float(big) == -math.inf
    assert SignedLog(0, 12.0).logmag == -math.inf


def test_large_factorials_do_not_overflow():
    ctx = QContext.classical()
    v = qfact_sl(ctx, 5000)
    assert v.sign == 1 and v.logmag == pytest.approx(math.lgamma(5001), rel=1e-14)
    r = QContext.real(3.0)
    assert math.isfinite(qfact_sl(r, 2000).logmag)


def test_qint_array_matches_scalar():
    for ctx in CONTEXTS:
        ns = list(range(-20, 21))
        arr = qint_array(ctx, ns)
        for n, v in zip(ns, arr):
            assert v == pytest.approx(qint(ctx, n), rel=1e-12, abs=1e-12)


def test_factorial_memo_is_thread_safe():
    ctx = QContext.real(1.3)
    errors = []

    def work(top):
        try:
            for n in range(top):
                qfact_sl(ctx, n)
        except Exception as exc:  # pragma: no cover - surfaced below
            errors.append(exc)

    threads = [threading.Thread(target=work, args=(400 + 37 * k,)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    fresh = QContext.real(1.3)
    for n in range(0, 600, 7):
        assert qfact_sl(ctx, n) == qfact_sl(fresh, n)


def test_regime_flags():
    assert QContext.classical().is_definite and QContext.root_of_unity(5).is_definite
    assert not QContext.real(2.0).is_definite and QContext.real(2.0).is_real
    assert QContext.complex_q(1j + 0.1).regime is Regime.COMPLEX
