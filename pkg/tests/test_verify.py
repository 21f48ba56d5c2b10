import numpy as np
import pytest

from ncharm import atoms
from ncharm import circfun as cf
from ncharm import extension as ext
from ncharm import opalg
from ncharm import verify as vf
from ncharm.circfun import Arc, BandLimited, PiecewiseConst
from ncharm.verify import CorpusSpec
from conftest import cplx


def test_pairing_examples(rng):
    e = BandLimited.from_modes({1: np.eye(1)})
    assert vf.pairing(e, e) == pytest.approx(1.0)
    assert vf.pairing(e, BandLimited.from_modes({2: np.eye(1)})) == 0
    a, b = cplx(rng, 2, 2), cplx(rng, 2, 2)
    f, g = BandLimited.from_modes({1: a}), BandLimited.from_modes({1: b})
    assert vf.pairing(f, g) == pytest.approx(np.trace(b.conj().T @ a))
    assert vf.pairing(f, g) == pytest.approx(np.conj(vf.pairing(g, f)))
    with pytest.raises(ValueError):
        vf.pairing(f, BandLimited.from_modes({1: np.eye(3)}))


def test_duality_examples(small_grid):
    atom = atoms.random_atom(4, 2, Arc(1.0, 0.5), 4)
    rep = vf.check_duality_bound(atom.data, PiecewiseConst.constant(np.eye(2)), upper=1.0, grid=small_grid)
    assert rep.pairing == pytest.approx(0, abs=1e-12) and rep.ok
    rep = vf.check_duality_bound(atom.data, BandLimited.from_modes({1: np.eye(2)}), upper=1.0, grid=small_grid)
    assert rep.ok and rep.slack > 0
    zero = PiecewiseConst.constant(np.zeros((2, 2)))
    rep = vf.check_duality_bound(zero, BandLimited.from_modes({1: np.eye(2)}), grid=small_grid)
    assert rep.ok and rep.pairing == 0 and rep.upper == 0


def test_holder_and_inequality_slacks(rng):
    for _ in range(20):
        x, y = cplx(rng, 4, 4), cplx(rng, 4, 4)
        for p, q, gam in vf.HOLDER_TRIPLES:
            assert vf.holder_slack(x, y, p, q, gam) >= -1e-10
        f = BandLimited(cplx(rng, 5, 3, 3))
        g = BandLimited(cplx(rng, 5, 1, 1))
        assert vf.cauchy_schwarz_slack(f, g) >= -1e-10
        assert vf.trace_l2_slack(f) >= 0
        assert vf.pairing_holder_slack(f, BandLimited(cplx(rng, 3, 3, 3)), 2.0, 2.0) >= 0


def test_cauchy_schwarz_rejects_matrix_g(rng):
    f = BandLimited(cplx(rng, 3, 2, 2))
    with pytest.raises(ValueError):
        vf.cauchy_schwarz_slack(f, f)


def test_littlewood_paley_identity(rng):
    for _ in range(5):
        f = BandLimited(np.concatenate([np.zeros((6, 2, 2)), cplx(rng, 7, 2, 2)]))
        lhs, rhs = vf.ls_lhs(f), vf.ls_rhs(f)
        assert np.abs(lhs - rhs).max() <= 1e-12 * np.abs(lhs).max()


def test_green_identity(rng):
    f = BandLimited(np.concatenate([np.zeros((4, 2, 2)), cplx(rng, 5, 2, 2)]))
    for w in vf.w_grid(4, 5, 0.9):
        lhs, rhs = vf.weighted_lhs(f, w), vf.green_rhs(f, w)
        assert np.abs(lhs - rhs).max() <= 1e-11 * np.abs(lhs).max()


def test_poisson_weighted_rhs_brute_force(rng):
    f = BandLimited(cplx(rng, 5, 2, 2))
    w = 0.6 * np.exp(1.1j)
    x, wt = np.polynomial.legendre.leggauss(120)
    r = 0.5 * (x + 1)
    n = 256
    th = 2 * np.pi * np.arange(n) / n
    z = r[:, None] * np.exp(1j * th[None, :])
    dens = ext.grad_sq(f, z) * ext.poisson_kernel_disk(w, z)[..., None, None]
    rad = 0.5 * wt * r * (1 - r**2)
    brute = np.einsum("r,rtij->ij", rad, dens) * 2 * np.pi / n
    got = vf.poisson_weighted_rhs(f, w)
    assert np.abs(got - brute).max() <= 1e-10 * np.abs(brute).max()


def test_corpus_examples():
    spec = CorpusSpec("analytic-bandlimited", count=100, seed=3, d=2, degree=8)
    a, b = vf.corpus_generate(spec), vf.corpus_generate(spec)
    assert len(a) == 100
    for x, y in zip(a, b):
        assert np.array_equal(x.coeffs, y.coeffs)
        assert x.degree <= 8 and x.is_analytic()
    gen = vf.corpus_generate(CorpusSpec("general-bandlimited", count=5, d=2, degree=4))
    assert all(not f.is_analytic() for f in gen)
    pw = vf.corpus_generate(CorpusSpec("piecewise", count=5, d=3, cells=6))
    assert all(isinstance(f, PiecewiseConst) and f.ncells == 6 for f in pw)
    at = vf.corpus_generate(CorpusSpec("atoms", count=10, d=2, cells=3, vary=True))
    assert all(atoms.validate_atom(x).ok for x in at)


def test_corpus_validation():
    with pytest.raises(ValueError):
        CorpusSpec(d=17)
    with pytest.raises(ValueError):
        CorpusSpec(degree=65)
    with pytest.raises(ValueError):
        CorpusSpec(kind="wavelets")
    with pytest.raises(ValueError):
        CorpusSpec.from_dict({"kind": "atoms", "colour": 1})
    spec = CorpusSpec("piecewise", 4, 2, 3, 5, 7, True)
    assert CorpusSpec.from_dict(spec.to_dict()) == spec


def test_ratio_study_examples(rng):
    fs = vf.corpus_generate(CorpusSpec(count=10, d=2, degree=4)).functions()
    same = vf.ratio_study(cf.l2_norm, cf.l2_norm, fs)
    assert np.allclose(same.ratios, 1.0)
    env = same.envelope()
    assert env["min"] == env["max"] == 1.0


def test_ratio_study_floor_and_failures():
    items = [1.0, 2.0, 0.0, -1.0, 4.0]

    def y(v):
        if v < 0:
            raise ValueError("bad item")
        return 2 * v

    rep = vf.ratio_study(lambda v: v, y, items)
    assert rep.status == ["ok", "ok", "floor", "failed", "ok"]
    doc = rep.to_dict()
    assert (doc["used"], doc["below_floor"], doc["failed"]) == (3, 1, 1)
    assert rep.envelope()["min"] == rep.envelope()["max"] == 2.0
    rows = rep.to_rows()
    assert len(rows) == 5 and np.isnan(rows[3]["ratio"])
    with pytest.raises(ValueError):
        vf.ratio_study(lambda v: v, y, [])


def test_envelope_change():
    a = vf.RatioReport("x", "y", [1.0, 1.0], [1.0, 2.0], ["ok", "ok"])
    b = vf.RatioReport("x", "y", [1.0, 1.0], [1.1, 2.0], ["ok", "ok"])
    assert vf.envelope_change(a, b) == pytest.approx(0.1)
