"""Property-based checks of the algebraic inequalities."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ncharm import circfun as cf
from ncharm import extension as ext
from ncharm import opalg
from ncharm import verify as vf
from ncharm.circfun import BandLimited, PiecewiseConst

reals = st.floats(-10, 10, allow_nan=False, allow_infinity=False, width=64)


@st.composite
def matrices(draw, d=None):
    d = d or draw(st.integers(1, 6))
    re = draw(arrays(np.float64, (d, d), elements=reals))
    im = draw(arrays(np.float64, (d, d), elements=reals))
    return re + 1j * im


@st.composite
def matrix_pairs(draw):
    d = draw(st.integers(1, 6))
    return draw(matrices(d)), draw(matrices(d))


@st.composite
def functions(draw, d=None):
    d = d or draw(st.integers(1, 3))
    if draw(st.booleans()):
        n = draw(st.integers(0, 4))
        return BandLimited(np.stack([draw(matrices(d)) for _ in range(2 * n + 1)]))
    k = draw(st.integers(1, 5))
    start = draw(st.floats(-3, 3))
    cuts = sorted(draw(st.lists(st.floats(0.05, 6.2), min_size=k - 1, max_size=k - 1, unique=True)))
    edges = start + np.array([0.0] + cuts + [2 * np.pi])
    if np.any(np.diff(edges) <= 1e-9):
        edges = start + 2 * np.pi * np.arange(k + 1) / k
    return PiecewiseConst(edges, np.stack([draw(matrices(d)) for _ in range(k)]))


@given(matrix_pairs())
def test_holder(xy):
    x, y = xy
    for p, q, g in vf.HOLDER_TRIPLES:
        lhs = opalg.schatten_norm(x @ y, g)
        assert lhs <= (1 + 1e-10) * opalg.schatten_norm(x, p) * opalg.schatten_norm(y, q) + 1e-300


@given(matrices())
def test_trace_properties(x):
    a = np.trace(x.conj().T @ x).real
    assert abs(a - np.trace(x @ x.conj().T).real) <= 1e-10 * a + 1e-300
    assert abs(np.trace(x)) <= opalg.schatten_norm(x, 1) * (1 + 1e-12) + 1e-12


@given(matrices())
def test_sqrt_of_square(x):
    p = x.conj().T @ x
    r = opalg.psd_sqrt(p)
    assert np.linalg.norm(r @ r - p) <= 1e-9 * max(np.linalg.norm(p), 1e-300) + 1e-12
    assert opalg.min_eig(r) >= -1e-10 * (1 + opalg.op_norm(r))


@given(matrices())
def test_schatten_decreasing_in_p(x):
    vals = [opalg.schatten_norm(x, p) for p in (0.5, 1, 2, 4, np.inf)]
    assert all(a >= b * (1 - 1e-12) - 1e-12 for a, b in zip(vals, vals[1:]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda d: st.tuples(functions(d), functions(d))))
def test_pairing_symmetry_and_holder(fg):
    f, g = fg
    assert np.allclose(vf.pairing(f, g), np.conj(vf.pairing(g, f)), atol=1e-9 * (1 + abs(vf.pairing(f, g))))
    for p, q in ((2.0, 2.0), (1.0, np.inf), (4.0, 4.0)):
        scale = cf.lp_c_norm(f, p) * cf.lp_c_norm(g, q)
        assert vf.pairing_holder_slack(f, g, p, q) >= -1e-9 * scale - 1e-300


@settings(max_examples=60, deadline=None)
@given(functions())
def test_trace_l2_bound(f):
    assert vf.trace_l2_slack(f) >= -1e-9 * cf.lp_c_norm(f, 1)


@settings(max_examples=60, deadline=None)
@given(functions(), functions(1))
def test_operator_cauchy_schwarz(f, g):
    assert vf.cauchy_schwarz_slack(f, g) >= -1e-10


@settings(max_examples=40, deadline=None)
@given(functions())
def test_serialization_roundtrip(f):
    back = cf.loads(cf.dumps(f))
    th = np.linspace(0.01, 6.2, 17)
    assert np.max(np.abs(cf.evaluate(back, th) - cf.evaluate(f, th)), initial=0) <= 1e-15 * (1 + np.abs(cf.evaluate(f, th)).max())


@given(st.floats(0, 0.99), st.floats(0, 2 * np.pi))
def test_poisson_normalisation(r, phi):
    n = 4096
    t = 2 * np.pi * np.arange(n) / n
    assert abs(np.mean(ext.poisson_kernel(r * np.exp(1j * phi), t)) - 1) <= 1e-12
