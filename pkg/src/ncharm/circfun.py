"""Matrix-valued functions on the unit circle with exact integration.

Two representations are supported:

* :class:`BandLimited` -- a Laurent polynomial ``sum_{|n|<=N} a_n e^{in theta}``.
* :class:`PiecewiseConst` -- constant matrices on the cells of an angular
  partition of one full turn.

Every integral against ``dm = d theta / 2 pi`` (pairings, arc means, Fourier
coefficients) is evaluated in closed form, never by sampling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import opalg

TWO_PI = 2.0 * np.pi
PARTITION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BandLimited:
    """Laurent polynomial with matrix coefficients.

    ``coeffs[n + N]`` holds ``a_n`` for ``-N <= n <= N``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None, None]
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[0] % 2 != 1:
            raise ValueError(f"coefficients must have shape (2N+1, d, d), got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    def coeff(self, n: int) -> np.ndarray:
        if abs(n) > self.degree:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return self.coeffs[n + self.degree]

    def is_analytic(self, tol: float = 0.0) -> bool:
        neg = self.coeffs[: self.degree]
        return bool(neg.size == 0 or np.abs(neg).max() <= tol)

    def padded(self, degree: int) -> "BandLimited":
        if degree < self.degree:
            raise ValueError("cannot pad to a smaller degree")
        k = degree - self.degree
        return BandLimited(np.pad(self.coeffs, ((k, k), (0, 0), (0, 0))))

    @classmethod
    def from_modes(cls, modes: dict, dim: int | None = None) -> "BandLimited":
        """Build from ``{n: a_n}``; scalars are promoted to 1x1 matrices."""
        mats = {int(n): opalg.as_matrix(a) for n, a in modes.items()}
        if dim is None:
            dim = next(iter(mats.values())).shape[0] if mats else 1
        degree = max((abs(n) for n in mats), default=0)
        c = np.zeros((2 * degree + 1, dim, dim), dtype=complex)
        for n, a in mats.items():
            c[n + degree] = a
        return cls(c)

    @classmethod
    def constant(cls, c) -> "BandLimited":
        return cls(opalg.as_matrix(c)[None])


@dataclass(frozen=True, eq=False)
class PiecewiseConst:
    """Piecewise-constant function on the circle.

    ``edges`` is strictly increasing with ``edges[-1] == edges[0] + 2 pi``;
    cell ``k`` is the half-open interval ``[edges[k], edges[k+1])``.
    """

    edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if v.ndim == 1:
            v = v[:, None, None]
        if e.ndim != 1 or e.size < 2 or v.shape[0] != e.size - 1:
            raise ValueError("need len(edges) == len(values) + 1 >= 2")
        if v.ndim != 3 or v.shape[1] != v.shape[2]:
            raise ValueError(f"values must have shape (K, d, d), got {v.shape}")
        if np.any(np.diff(e) <= 0):
            raise ValueError("partition edges must be strictly increasing")
        if abs(e[-1] - e[0] - TWO_PI) > PARTITION_TOL:
            raise ValueError("partition must cover exactly one full turn")
        e = e.copy()
        e[-1] = e[0] + TWO_PI
        e.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def ncells(self) -> int:
        return self.values.shape[0]

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.edges)

    @classmethod
    def constant(cls, c) -> "PiecewiseConst":
        return cls(np.array([0.0, TWO_PI]), opalg.as_matrix(c)[None])

    @classmethod
    def indicator(cls, start: float, stop: float, value, dim: int | None = None) -> "PiecewiseConst":
        """``value`` on the arc from angle ``start`` counterclockwise to ``stop``, 0 elsewhere."""
        a = opalg.as_matrix(value)
        span = stop - start
        if not 0 < span <= TWO_PI:
            raise ValueError("arc length must be in (0, 2 pi]")
        if np.isclose(span, TWO_PI, rtol=0, atol=PARTITION_TOL):
            return cls(np.array([start, start + TWO_PI]), a[None])
        z = np.zeros_like(a)
        return cls(np.array([start, stop, start + TWO_PI]), np.stack([a, z]))


CircleFun = Union[BandLimited, PiecewiseConst]


@dataclass(frozen=True)
class Arc:
    """I(t0, delta) = {t : |t - t0| < delta} with chordal distance."""

    center: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("arc radius must be positive")

    @property
    def is_full(self) -> bool:
        return self.radius >= 2.0

    @property
    def half_width(self) -> float:
        if self.is_full:
            return float(np.pi)
        return float(2.0 * np.arcsin(self.radius / 2.0))

    @property
    def measure(self) -> float:
        """Normalised measure m(I) in (0, 1]."""
        return self.half_width / np.pi

    @property
    def interval(self) -> tuple[float, float]:
        h = self.half_width
        return self.center - h, self.center + h

    @classmethod
    def from_interval(cls, start: float, stop: float) -> "Arc":
        half = 0.5 * (stop - start)
        if half >= np.pi - PARTITION_TOL:
            return cls(0.5 * (start + stop), 2.0)
        return cls(0.5 * (start + stop), 2.0 * np.sin(half / 2.0))


def _check_dims(f: CircleFun, g: CircleFun):
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")


def exp_integrals(ks, start, stop) -> np.ndarray:
    """int_start^stop e^{i k theta} d theta / 2 pi, broadcast over ``ks`` and intervals."""
    ks = np.asarray(ks, dtype=float)
    start = np.asarray(start, dtype=float)
    stop = np.asarray(stop, dtype=float)
    half = 0.5 * (stop - start)
    mid = 0.5 * (stop + start)
    safe = np.where(ks == 0, 1.0, ks)
    out = np.exp(1j * ks * mid) * np.sin(ks * half) / (np.pi * safe)
    return np.where(ks == 0, half / np.pi + 0j, out)


def circle_overlap(c0, c1, a, b) -> np.ndarray:
    """Length of [c0, c1] intersected with [a, b] on the circle (both spans <= 2 pi)."""
    c0, c1, a, b = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (c0, c1, a, b)))
    shift = TWO_PI * np.round((0.5 * (c0 + c1) - 0.5 * (a + b)) / TWO_PI)
    total = np.zeros(c0.shape)
    for k in (-1, 0, 1):
        lo = np.maximum(c0, a + shift + k * TWO_PI)
        hi = np.minimum(c1, b + shift + k * TWO_PI)
        total += np.clip(hi - lo, 0.0, None)
    return total


def evaluate(f: CircleFun, theta) -> np.ndarray:
    """Values at angles ``theta`` (any shape); returns shape ``theta.shape + (d, d)``."""
    theta = np.asarray(theta, dtype=float)
    if isinstance(f, BandLimited):
        ph = np.exp(1j * theta[..., None] * f.modes)
        return np.einsum("...n,nij->...ij", ph, f.coeffs)
    u = f.edges[0] + np.mod(theta - f.edges[0], TWO_PI)
    idx = np.clip(np.searchsorted(f.edges, u, side="right") - 1, 0, f.ncells - 1)
    return f.values[idx]


def adjoint(f: CircleFun) -> CircleFun:
    """Pointwise adjoint t -> f(t)*."""
    if isinstance(f, BandLimited):
        return BandLimited(opalg.adjoint(f.coeffs[::-1]))
    return PiecewiseConst(f.edges, opalg.adjoint(f.values))


def scale(f: CircleFun, lam: complex) -> CircleFun:
    if isinstance(f, BandLimited):
        return BandLimited(lam * f.coeffs)
    return PiecewiseConst(f.edges, lam * f.values)


def left_multiply(m, f: CircleFun) -> CircleFun:
    """t -> m f(t) for a constant matrix m."""
    m = opalg.as_matrix(m)
    if isinstance(f, BandLimited):
        return BandLimited(m @ f.coeffs)
    return PiecewiseConst(f.edges, m @ f.values)


def refine(f: PiecewiseConst, extra) -> PiecewiseConst:
    """Same function on the common refinement of its partition and ``extra`` angles."""
    base = f.edges[0]
    pts = np.concatenate([f.edges[:-1], base + np.mod(np.asarray(extra, dtype=float) - base, TWO_PI)])
    pts = np.unique(pts)
    keep = np.concatenate([[True], np.diff(pts) > PARTITION_TOL])
    pts = pts[keep]
    edges = np.append(pts, base + TWO_PI)
    if edges[-1] - edges[-2] <= PARTITION_TOL:
        edges = np.delete(edges, -2)
    mids = 0.5 * (edges[:-1] + edges[1:])
    return PiecewiseConst(edges, evaluate(f, mids))


def _common(f: PiecewiseConst, g: PiecewiseConst) -> tuple[PiecewiseConst, PiecewiseConst]:
    ff = refine(f, g.edges[:-1])
    # ff refines g's partition, so g is constant on each ff cell
    mids = 0.5 * (ff.edges[:-1] + ff.edges[1:])
    return ff, PiecewiseConst(ff.edges, evaluate(g, mids))


def add(f: CircleFun, g: CircleFun) -> CircleFun:
    _check_dims(f, g)
    if isinstance(f, BandLimited) and isinstance(g, BandLimited):
        n = max(f.degree, g.degree)
        return BandLimited(f.padded(n).coeffs + g.padded(n).coeffs)
    if isinstance(f, PiecewiseConst) and isinstance(g, PiecewiseConst):
        ff, gg = _common(f, g)
        return PiecewiseConst(ff.edges, ff.values + gg.values)
    if isinstance(f, BandLimited) and f.degree == 0:
        return add(PiecewiseConst.constant(f.coeffs[0]), g)
    if isinstance(g, BandLimited) and g.degree == 0:
        return add(f, PiecewiseConst.constant(g.coeffs[0]))
    raise TypeError("cannot add a non-constant band-limited function to a piecewise-constant one")


def subtract(f: CircleFun, g: CircleFun) -> CircleFun:
    return add(f, scale(g, -1.0))


def scalar_times_identity(g: CircleFun, dim: int) -> CircleFun:
    """Embed a scalar function g as t -> g(t) I_dim."""
    if g.dim != 1:
        raise ValueError("expected a scalar (dim 1) function")
    eye = np.eye(dim)
    if isinstance(g, BandLimited):
        return BandLimited(g.coeffs[:, 0, 0, None, None] * eye)
    return PiecewiseConst(g.edges, g.values[:, 0, 0, None, None] * eye)


def fourier_coefficients(f: CircleFun, nmax: int) -> np.ndarray:
    """Exact ``int f e^{-in theta} dm`` for ``-nmax <= n <= nmax`` (shape ``(2 nmax + 1, d, d)``)."""
    ns = np.arange(-nmax, nmax + 1)
    if isinstance(f, BandLimited):
        return f.padded(max(nmax, f.degree)).coeffs[max(nmax, f.degree) - nmax :][: 2 * nmax + 1]
    w = exp_integrals(-ns[:, None], f.edges[None, :-1], f.edges[None, 1:])
    return np.einsum("nk,kij->nij", w, f.values)


def mean(f: CircleFun) -> np.ndarray:
    """int_T f dm."""
    if isinstance(f, BandLimited):
        return f.coeff(0).copy()
    return np.einsum("k,kij->ij", f.lengths / TWO_PI, f.values)


def l2_pairing(f: CircleFun, g: CircleFun) -> np.ndarray:
    """<f, g> = int f* g dm."""
    _check_dims(f, g)
    if isinstance(f, BandLimited) and isinstance(g, BandLimited):
        n = min(f.degree, g.degree)
        a = f.coeffs[f.degree - n : f.degree + n + 1]
        b = g.coeffs[g.degree - n : g.degree + n + 1]
        return np.einsum("nji,njk->ik", a.conj(), b)
    if isinstance(f, PiecewiseConst) and isinstance(g, PiecewiseConst):
        ff, gg = _common(f, g)
        w = ff.lengths / TWO_PI
        return np.einsum("k,kji,kjl->il", w, ff.values.conj(), gg.values)
    if isinstance(f, PiecewiseConst):
        return opalg.adjoint(l2_pairing(g, f))
    fc = fourier_coefficients(g, f.degree)
    return np.einsum("nji,njk->ik", f.coeffs.conj(), fc)


def pairing(f: CircleFun, g: CircleFun) -> complex:
    """The duality form tr(int g* f dm)."""
    return complex(np.trace(l2_pairing(g, f)))


def gram(f: CircleFun) -> np.ndarray:
    """int |f|^2 dm."""
    return opalg.hermitian_part(l2_pairing(f, f))


def lp_c_norm(f: CircleFun, p: float = 1.0) -> float:
    """Column norm ||(int |f|^2 dm)^{1/2}||_p."""
    # normalise first so the Gram matrix of a tiny function does not underflow
    data = f.coeffs if isinstance(f, BandLimited) else f.values
    top = float(np.abs(data).max(initial=0.0))
    if top == 0.0 or not np.isfinite(top):
        return float(opalg.schatten_norm(opalg.psd_sqrt(gram(f)), p))
    return top * float(opalg.schatten_norm(opalg.psd_sqrt(gram(scale(f, 1.0 / top))), p))


def lp_r_norm(f: CircleFun, p: float = 1.0) -> float:
    return lp_c_norm(adjoint(f), p)


def l2_norm(f: CircleFun) -> float:
    """(int ||f||_HS^2 dm)^{1/2}; for scalar f the ordinary L^2 norm."""
    return float(np.sqrt(max(np.trace(gram(f)).real, 0.0)))


def moments_bandlimited(f: BandLimited, e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First and second moments of ``f`` against a family of measures.

    ``e[..., k + 2N]`` must hold ``int e^{ik theta} d mu`` for ``|k| <= 2N``.
    Returns ``(int f d mu, int |f|^2 d mu)`` with shapes ``(..., d, d)``.
    """
    n = f.degree
    a = f.coeffs
    first = np.einsum("...n,nij->...ij", e[..., n : 3 * n + 1], a)
    toep = np.arange(2 * n + 1)[None, :] - np.arange(2 * n + 1)[:, None] + 2 * n
    et = e[..., toep]
    second = np.einsum("...mn,mji,njk->...ik", et, a.conj(), a, optimize=True)
    return first, opalg.hermitian_part(second)


def moments_piecewise(f: PiecewiseConst, masses: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Same as :func:`moments_bandlimited` with ``masses[..., k]`` the measure of cell k."""
    first = np.einsum("...k,kij->...ij", masses, f.values)
    sq = opalg.adjoint(f.values) @ f.values
    second = np.einsum("...k,kij->...ij", masses, sq)
    return first, opalg.hermitian_part(second)


def arc_moments(f: CircleFun, arcs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unnormalised ``int_I f dm``, ``int_I |f|^2 dm`` and ``m(I)`` for each arc."""
    arcs = list(arcs)
    h = np.array([a.half_width for a in arcs])
    c = np.array([a.center for a in arcs])
    lo, hi = c - h, c + h
    if isinstance(f, BandLimited):
        ks = np.arange(-2 * f.degree, 2 * f.degree + 1)
        e = exp_integrals(ks[None, :], lo[:, None], hi[:, None])
        first, second = moments_bandlimited(f, e)
    else:
        masses = circle_overlap(f.edges[None, :-1], f.edges[None, 1:], lo[:, None], hi[:, None]) / TWO_PI
        first, second = moments_piecewise(f, masses)
    return first, second, h / np.pi


def arc_mean(f: CircleFun, arc: Arc) -> np.ndarray:
    """f_I = (1/|I|) int_I f dm."""
    first, _, m = arc_moments(f, [arc])
    if not m[0] > 0:
        raise ValueError("arc has zero measure")
    return first[0] / m[0]


def trace_function(f: CircleFun, m=None) -> CircleFun:
    """Scalar function t -> tr(m f(t)) in the same representation."""
    if m is not None:
        f = left_multiply(m, f)
    if isinstance(f, BandLimited):
        return BandLimited(np.trace(f.coeffs, axis1=1, axis2=2))
    return PiecewiseConst(f.edges, np.trace(f.values, axis1=1, axis2=2))


def boundary_l1_schatten(f: CircleFun, nodes: int = 8192) -> float:
    """int_T ||f(t)||_1 dm.

    Exact for piecewise-constant f; midpoint rule with ``nodes`` points for
    band-limited f (the integrand is only Lipschitz, error O(nodes^-2)).
    """
    if isinstance(f, PiecewiseConst):
        return float(np.dot(f.lengths / TWO_PI, opalg.schatten_norm(f.values, 1)))
    th = (np.arange(nodes) + 0.5) * TWO_PI / nodes
    return float(np.mean(opalg.schatten_norm(evaluate(f, th), 1)))


# -- serialisation -------------------------------------------------------------

def _enc(a: np.ndarray):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _dec(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def to_dict(f: CircleFun) -> dict:
    if isinstance(f, BandLimited):
        return {"dim": f.dim, "kind": "bandlimited", "degree": f.degree, "coeffs": _enc(f.coeffs)}
    return {"dim": f.dim, "kind": "piecewise", "edges": f.edges.tolist(), "values": _enc(f.values)}


def from_dict(doc: dict) -> CircleFun:
    kind = doc.get("kind")
    dim = int(doc["dim"])
    if kind == "bandlimited":
        c = _dec(doc["coeffs"]).reshape(2 * int(doc["degree"]) + 1, dim, dim)
        return BandLimited(c)
    if kind == "piecewise":
        v = _dec(doc["values"])
        return PiecewiseConst(np.asarray(doc["edges"], dtype=float), v.reshape(-1, dim, dim))
    raise ValueError(f"unknown function kind {kind!r}")


def dumps(f: CircleFun) -> str:
    return json.dumps(to_dict(f), indent=1)


def loads(text: str) -> CircleFun:
    return from_dict(json.loads(text))
