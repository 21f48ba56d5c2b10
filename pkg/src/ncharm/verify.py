"""Inequality checkers, corpus generation and ratio studies.

The identity functionals here are moment-exact for band-limited input:
|grad f|^2 is a finite sum of r^m e^{ik phi} terms and every weight used has
closed-form (or exactly resolved) radial moments.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import atoms
from . import circfun as cf
from . import extension as ext
from . import norms
from . import opalg
from . import squarefun as sq
from .circfun import TWO_PI, Arc, BandLimited, CircleFun, PiecewiseConst

KINDS = ("analytic-bandlimited", "general-bandlimited", "piecewise", "atoms")
MAX_DIM = 16
MAX_DEGREE = 64


def pairing(f: CircleFun, g: CircleFun) -> complex:
    """tr(int g* f dm)."""
    return cf.pairing(f, g)


# -- matrix and pairing inequalities --------------------------------------------

HOLDER_TRIPLES = ((2.0, 2.0, 1.0), (1.0, np.inf, 1.0), (4.0, 4.0, 2.0), (3.0, 6.0, 2.0))


def holder_slack(x, y, p: float, q: float, gamma: float) -> float:
    """(1 + 1e-10) ||x||_p ||y||_q - ||xy||_gamma."""
    lhs = opalg.schatten_norm(np.asarray(x) @ np.asarray(y), gamma)
    return float((1.0 + 1e-10) * opalg.schatten_norm(x, p) * opalg.schatten_norm(y, q) - lhs)


def cauchy_schwarz_slack(f: CircleFun, g: CircleFun) -> float:
    """Relative min eigenvalue of (int |f|^2)(int |g|^2) - |int f g|^2 for scalar g."""
    if g.dim != 1:
        raise ValueError("second argument must be scalar")
    ff = cf.gram(f)
    gg = float(cf.gram(g)[0, 0].real)
    # int f g dm = <conj g, f> with conj g acting as a scalar
    fg = _scalar_pairing(cf.adjoint(g), f)
    diff = opalg.hermitian_part(ff * gg - opalg.adjoint(fg) @ fg)
    return float(opalg.min_eig(diff) / (1.0 + opalg.op_norm(ff) * gg))


def _scalar_pairing(h: CircleFun, f: CircleFun) -> np.ndarray:
    # int conj(h) f dm for scalar h
    return cf.l2_pairing(cf.scalar_times_identity(h, f.dim), f)


def trace_l2_slack(f: CircleFun) -> float:
    """(1 + 1e-10) ||f||_{L^1_c} - (int |tr f|^2 dm)^{1/2}."""
    return float((1.0 + 1e-10) * cf.lp_c_norm(f, 1.0) - cf.l2_norm(cf.trace_function(f)))


def pairing_holder_slack(f: CircleFun, g: CircleFun, p: float, q: float) -> float:
    gamma = 1.0 / (1.0 / p + 1.0 / q)
    lhs = opalg.schatten_norm(cf.l2_pairing(f, g), gamma)
    return float((1.0 + 1e-10) * cf.lp_c_norm(f, p) * cf.lp_c_norm(g, q) - lhs)


@dataclass
class DualityReport:
    pairing: float
    bmo: float
    upper: float
    slack: float
    ok: bool


def check_duality_bound(f: CircleFun, g: CircleFun, upper: float | None = None,
                        grid: norms.NormSearchGrid = norms.DEFAULT_GRID, tol: float = 1e-9) -> DualityReport:
    """|pairing(f, g)| <= (1 + tol) ||g||_{BMO_c} * (H^1_c upper bound of f)."""
    if upper is None:
        upper = atoms.h1c_upper_bound(f, ("dyadic", 3))[0]
    val = abs(pairing(f, g))
    b = norms.bmo_c_norm(g, grid)
    slack = (1.0 + tol) * b * upper - val
    return DualityReport(val, b, float(upper), float(slack), bool(slack >= 0))


# -- exact identity functionals -------------------------------------------------

def ls_lhs(f: CircleFun) -> np.ndarray:
    """int |f - f(0)|^2 dm."""
    return cf.gram(cf.subtract(f, type(f).constant(cf.mean(f))))


def ls_rhs(f: BandLimited) -> np.ndarray:
    """(1/pi) int_D |grad f|^2 log(1/|z|) dxdy, moment-exact."""
    return ext.GradientExpansion(f).radial_integral(ext.log_moment) / np.pi


def weighted_lhs(f: CircleFun, w: complex) -> np.ndarray:
    """int |f - f(w)|^2 P_w dm."""
    return norms.poisson_oscillation(f, np.asarray([w]))[0]


def _green_moment(w: complex):
    rho, psi = abs(w), float(np.angle(w))

    def moment(m: int, k: int) -> complex:
        p = m + 1
        if k == 0:
            return (1.0 - rho ** (p + 1)) / (p + 1) ** 2
        a = abs(k)
        core = (rho**a - rho ** (p + 1)) / (p + a + 1) - rho**a * (1.0 - rho ** (p - a + 1)) / (p - a + 1)
        return -0.5 * np.exp(1j * k * psi) * core / a

    return moment


def green_rhs(f: BandLimited, w: complex) -> np.ndarray:
    """(1/pi) int_D |grad f|^2 log|(1 - conj(w) z) / (z - w)| dxdy, moment-exact."""
    ext.disk_points(w)
    return ext.GradientExpansion(f).kernel_integral(_green_moment(complex(w))) / np.pi


def _poisson_moments(w: complex, mmax: int, kmax: int, order: int = 96) -> np.ndarray:
    rho, psi = abs(w), float(np.angle(w))
    x, wt = ext.gauss_legendre(order)
    r = 0.5 * (x + 1.0)
    base = 0.5 * wt * r * (1.0 - r * r) * (1.0 - rho * rho) / (1.0 - (rho * r) ** 2)
    m = np.arange(mmax + 1)
    k = np.arange(-kmax, kmax + 1)
    rad = np.einsum("n,mn,kn->mk", base, r[None, :] ** m[:, None], (rho * r[None, :]) ** np.abs(k)[:, None])
    return rad * np.exp(1j * k * psi)[None, :]


def poisson_weighted_rhs(f: BandLimited, w: complex) -> np.ndarray:
    """int_D P_w(z) |grad f|^2 (1 - |z|^2) dxdy.

    The radial factor (1 - r^2)(rho r)^|k| / (1 - rho^2 r^2) is analytic on
    [0, 1] with its pole at 1/rho, so 96-point Gauss-Legendre resolves it to
    rounding for |w| <= 0.99.
    """
    ext.disk_points(w)
    gx = ext.GradientExpansion(f)
    return gx.kernel_integral(_poisson_moments(complex(w), gx.table.shape[0] - 1, gx.kmax))


def area_lhs(f: CircleFun, alpha: float = sq.DEFAULT_ALPHA, vertices: int = 64) -> np.ndarray:
    """int_T A_c(f)(t)^2 dm over a uniform vertex grid (exact for band-limited f
    once ``vertices`` exceeds the angular degree of |grad f|^2)."""
    res = sq.cone_integrals(f, alpha, sq.vertex_grid(vertices))
    return res.squared.mean(axis=0)


def w_grid(radii: int = 5, angles: int = 8, rmax: float = 0.9) -> np.ndarray:
    r = np.linspace(0.0, rmax, radii)
    t = TWO_PI * np.arange(angles) / angles
    return (r[:, None] * np.exp(1j * t[None, :])).ravel()


# -- corpora --------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusSpec:
    kind: str = "analytic-bandlimited"
    count: int = 100
    seed: int = 0
    d: int = 2
    degree: int = 8
    cells: int = 8
    vary: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown corpus kind {self.kind!r}")
        if not 1 <= self.d <= MAX_DIM:
            raise ValueError(f"d must lie in 1..{MAX_DIM}")
        if not 0 <= self.degree <= MAX_DEGREE:
            raise ValueError(f"degree must lie in 0..{MAX_DEGREE}")
        if self.count < 0 or self.cells < 2:
            raise ValueError("count must be nonnegative and cells at least 2")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "CorpusSpec":
        known = {k: doc[k] for k in cls.__dataclass_fields__ if k in doc}
        unknown = set(doc) - set(known)
        if unknown:
            raise ValueError(f"unknown corpus fields {sorted(unknown)}")
        return cls(**known)


@dataclass
class Corpus:
    spec: CorpusSpec
    items: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def functions(self) -> list[CircleFun]:
        return [x.data if isinstance(x, atoms.Atom) else x for x in self.items]


def _gaussian(rng, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _item(spec: CorpusSpec, rng: np.random.Generator):
    d = int(rng.integers(1, spec.d + 1)) if spec.vary else spec.d
    n = int(rng.integers(1, max(spec.degree, 1) + 1)) if spec.vary else spec.degree
    if spec.kind in ("analytic-bandlimited", "general-bandlimited"):
        modes = np.arange(-n, n + 1)
        c = _gaussian(rng, (2 * n + 1, d, d)) / (1.0 + np.abs(modes))[:, None, None]
        if spec.kind == "analytic-bandlimited":
            c[:n] = 0.0
        return BandLimited(c)
    if spec.kind == "piecewise":
        k = spec.cells
        start = rng.uniform(0.0, TWO_PI)
        cuts = np.sort(rng.uniform(0.0, TWO_PI, k - 1))
        edges = start + np.concatenate([[0.0], cuts, [TWO_PI]])
        return PiecewiseConst(edges, _gaussian(rng, (k, d, d)))
    # atoms on arcs with dyadic chordal radii
    level = int(rng.integers(0, 6))
    arc = Arc(float(rng.uniform(0.0, TWO_PI)), 2.0 * 2.0**-level)
    return atoms.random_atom(rng, d, arc, cells=spec.cells)


def corpus_generate(spec: CorpusSpec) -> Corpus:
    """Deterministic corpus; item i draws from the i-th child of SeedSequence(seed)."""
    children = np.random.SeedSequence(spec.seed).spawn(spec.count)
    return Corpus(spec, [_item(spec, np.random.default_rng(s)) for s in children])


# -- ratio studies -----------------------------------------------------------

@dataclass
class RatioReport:
    x_name: str
    y_name: str
    x: list
    y: list
    status: list
    metadata: dict = field(default_factory=dict)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([y / x if s == "ok" else np.nan for x, y, s in zip(self.x, self.y, self.status)])

    @property
    def used(self) -> np.ndarray:
        return np.flatnonzero(np.array(self.status) == "ok")

    def envelope(self) -> dict:
        r = self.ratios
        idx = self.used
        if idx.size == 0:
            return {"min": None, "max": None, "median": None, "argmin": None, "argmax": None}
        vals = r[idx]
        return {
            "min": float(vals.min()),
            "max": float(vals.max()),
            "median": float(np.median(vals)),
            "argmin": int(idx[np.argmin(vals)]),
            "argmax": int(idx[np.argmax(vals)]),
        }

    def to_dict(self) -> dict:
        status = np.array(self.status)
        return {
            "x": self.x_name,
            "y": self.y_name,
            "count": len(self.x),
            "used": int(self.used.size),
            "below_floor": int(np.sum(status == "floor")),
            "failed": int(np.sum(status == "failed")),
            "envelope": self.envelope(),
            "metadata": self.metadata,
        }

    def to_rows(self) -> list[dict]:
        r = self.ratios
        return [
            {"item": i, self.x_name: x, self.y_name: y, "ratio": r[i], "status": s}
            for i, (x, y, s) in enumerate(zip(self.x, self.y, self.status))
        ]


def ratio_study(x_fn, y_fn, items, names=("X", "Y"), floor: float = 1e-12, metadata=None) -> RatioReport:
    """Evaluate Y/X over ``items``; items with X below ``floor`` times the median of X are excluded."""
    items = list(items)
    if not items:
        raise ValueError("empty corpus")
    xs, ys, status = [], [], []
    for item in items:
        try:
            x, y = float(x_fn(item)), float(y_fn(item))
            ok = math.isfinite(x) and math.isfinite(y)
        except (ArithmeticError, ValueError, np.linalg.LinAlgError):
            x, y, ok = math.nan, math.nan, False
        xs.append(x)
        ys.append(y)
        status.append("ok" if ok else "failed")
    good = [x for x, s in zip(xs, status) if s == "ok"]
    cut = floor * float(np.median(np.abs(good))) if good else 0.0
    for i, x in enumerate(xs):
        if status[i] == "ok" and abs(x) <= cut:
            status[i] = "floor"
    return RatioReport(names[0], names[1], xs, ys, status, dict(metadata or {}))


def envelope_change(a: RatioReport, b: RatioReport) -> float:
    """Largest relative change of the envelope ends between two reports."""
    ea, eb = a.envelope(), b.envelope()
    return max(abs(eb[k] - ea[k]) / abs(ea[k]) for k in ("min", "max"))


def trace_of(fn):
    """Wrap a matrix-valued functional as its (real) trace."""
    return lambda item: float(np.trace(fn(item)).real)
