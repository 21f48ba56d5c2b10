"""Lusin area function and Littlewood-Paley g-function over Stolz cones.

For band-limited f the cone integral is exact in the angle: |grad f|^2 is a
finite sum of r^m e^{ik phi} and the cone section at radius r is the arc
|phi - tau| < U(r), so only one-dimensional radial integrals remain. These
are tabulated once per (alpha, delta) with Gauss-Legendre after the
substitution r = r0 + s^2 that removes the square-root corner at r0.

Piecewise-constant f goes through a two-dimensional polar quadrature whose
nodes follow the exact cone boundary, capped at |z| <= 1 - eps_bnd.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import extension as ext
from . import opalg
from .circfun import BandLimited, CircleFun, PiecewiseConst, adjoint

DEFAULT_ALPHA = 2.0
EPS_BND = 1e-4


def cone_corner(alpha: float) -> float:
    """Radius below which the cone section is the full circle."""
    return (alpha - 1.0) / (alpha + 1.0)


def cone_half_width(r, alpha: float) -> np.ndarray:
    """U(r): z = r e^{i(tau + u)} lies in Gamma_alpha(e^{i tau}) iff |u| < U(r)."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (1.0 + r * r - alpha**2 * (1.0 - r) ** 2) / (2.0 * r)
    c = np.where(r > 0, c, -1.0)
    return np.arccos(np.clip(c, -1.0, 1.0))


@dataclass(frozen=True)
class Cone:
    """Truncated Stolz cone {z : |t - z| < alpha (1 - |z|), |z| < delta}."""

    alpha: float = DEFAULT_ALPHA
    vertex: float = 0.0
    delta: float = 1.0

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError("cone aperture must exceed 1")
        if not 0 < self.delta <= 1:
            raise ValueError("truncation must lie in (0, 1]")

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        t = np.exp(1j * self.vertex)
        return (np.abs(t - z) < self.alpha * (1.0 - np.abs(z))) & (np.abs(z) < self.delta)


def _check_cone(alpha: float, delta: float):
    Cone(alpha, 0.0, delta)


def _outer_nodes(alpha: float, upper: float, panels: int, order: int):
    """Radial nodes/weights on [r0, upper] in the variable s = sqrt(r - r0)."""
    r0 = cone_corner(alpha)
    if upper <= r0:
        return np.empty(0), np.empty(0)
    smax = np.sqrt(upper - r0)
    x, w = ext.gauss_legendre(order)
    edges = np.linspace(0.0, smax, panels + 1)
    s = (0.5 * (edges[:-1] + edges[1:])[:, None] + 0.5 * np.diff(edges)[:, None] * x).ravel()
    ws = (0.5 * np.diff(edges)[:, None] * w).ravel()
    return r0 + s * s, 2.0 * s * ws


@lru_cache(maxsize=256)
def radial_table(alpha: float, delta: float, mmax: int, kmax: int, panels: int = 8, order: int = 48):
    """R[p, k] = int_0^delta r^p S_k(r) dr with S_k(r) = int_{-U}^{U} e^{iku} du.

    Rows p = 0 .. mmax + 1 (the extra power absorbs the area Jacobian).
    """
    _check_cone(alpha, delta)
    r0 = cone_corner(alpha)
    p = np.arange(mmax + 2)
    k = np.arange(-kmax, kmax + 1)
    inner = min(delta, r0)
    table = np.zeros((p.size, k.size))
    table[:, kmax] = 2.0 * np.pi * inner ** (p + 1) / (p + 1)
    r, w = _outer_nodes(alpha, delta, panels, order)
    if r.size:
        u = cone_half_width(r, alpha)
        ks = np.where(k == 0, 1.0, k)
        sk = np.where(k == 0, 2.0 * u[:, None], 2.0 * np.sin(k * u[:, None]) / ks)
        table += np.einsum("n,np,nk->pk", w, r[:, None] ** p, sk)
    table.setflags(write=False)
    return table


def cone_area(alpha: float = DEFAULT_ALPHA, delta: float = 1.0) -> float:
    """Euclidean area of Gamma_alpha(t, delta) (independent of t)."""
    return float(radial_table(alpha, delta, 0, 0)[1, 0])


@dataclass(frozen=True)
class ConeQuadrature:
    """Polar nodes (r, u) relative to the vertex direction, with area weights."""

    alpha: float
    delta: float
    r: np.ndarray
    u: np.ndarray
    weights: np.ndarray
    cap: float
    cap_area: float

    def points(self, vertex) -> np.ndarray:
        vertex = np.asarray(vertex, dtype=float)
        return self.r * np.exp(1j * (vertex[..., None] + self.u))

    @property
    def size(self) -> int:
        return self.r.size


@lru_cache(maxsize=64)
def cone_quadrature(
    alpha: float = DEFAULT_ALPHA,
    delta: float = 1.0,
    eps_bnd: float = EPS_BND,
    radial: int = 12,
    angular: int = 24,
    full_angular: int = 48,
    min_nodes: int = 256,
) -> ConeQuadrature:
    """Tensor Gauss-Legendre nodes inside the cone, graded towards the vertex."""
    _check_cone(alpha, delta)
    r0 = cone_corner(alpha)
    top = min(delta, 1.0 - eps_bnd)
    x, w = ext.gauss_legendre(radial)
    rs, us, ws = [], [], []
    inner = min(top, r0)
    ri = 0.5 * inner * (x + 1.0)
    wi = 0.5 * inner * w
    ui = 2.0 * np.pi * np.arange(full_angular) / full_angular - np.pi
    rs.append(np.repeat(ri, full_angular))
    us.append(np.tile(ui, radial))
    ws.append(np.repeat(wi * ri, full_angular) * (2.0 * np.pi / full_angular))
    if top > r0:
        # first panel in sqrt variable, then geometric panels towards the top
        breaks = [r0]
        b = r0 + 0.5 * (1.0 - r0)
        while b < top:
            breaks.append(b)
            b += 0.5 * (1.0 - b)
        breaks.append(top)
        xa, wa = ext.gauss_legendre(angular)
        for j, (lo, hi) in enumerate(zip(breaks[:-1], breaks[1:])):
            if j == 0:
                s = 0.5 * np.sqrt(hi - r0) * (x + 1.0)
                r = r0 + s * s
                wr = 2.0 * s * 0.5 * np.sqrt(hi - r0) * w
            else:
                r = lo + 0.5 * (hi - lo) * (x + 1.0)
                wr = 0.5 * (hi - lo) * w
            umax = cone_half_width(r, alpha)
            rs.append(np.repeat(r, angular))
            us.append((umax[:, None] * xa[None, :]).ravel())
            ws.append(((wr * r * umax)[:, None] * wa[None, :]).ravel())
    r = np.concatenate(rs)
    if r.size < min_nodes:
        raise ValueError(f"cone quadrature under-resolved: {r.size} nodes < floor {min_nodes}")
    cap_area = max(cone_area(alpha, delta) - cone_area(alpha, top), 0.0) if top < delta else 0.0
    return ConeQuadrature(alpha, delta, r, np.concatenate(us), np.concatenate(ws), top, cap_area)


def vertex_grid(n: int) -> np.ndarray:
    """n uniformly spaced cone vertices, offset half a step from angle 0."""
    return 2.0 * np.pi * (np.arange(n) + 0.5) / n


@dataclass
class AreaResult:
    """Squared area function values at the vertices plus the dropped-cap bound."""

    vertices: np.ndarray
    squared: np.ndarray
    cap_bound: float = 0.0


def cone_integrals(
    f: CircleFun,
    alpha: float = DEFAULT_ALPHA,
    vertices=None,
    delta: float = 1.0,
    quad: ConeQuadrature | None = None,
    method: str = "auto",
) -> AreaResult:
    """int_{Gamma_alpha(t, delta)} |grad f|^2 dxdy for each vertex angle t."""
    _check_cone(alpha, delta)
    vertices = vertex_grid(64) if vertices is None else np.atleast_1d(np.asarray(vertices, dtype=float))
    if method == "auto":
        method = "exact" if isinstance(f, BandLimited) else "quadrature"
    if method == "exact":
        if not isinstance(f, BandLimited):
            raise TypeError("exact cone integration needs a band-limited function")
        gx = ext.GradientExpansion(f)
        c = gx.table
        tab = radial_table(alpha, delta, c.shape[0] - 1, gx.kmax)
        k = np.arange(-gx.kmax, gx.kmax + 1)
        rk = tab[1:, :] * np.exp(1j * k[None, :] * vertices[:, None, None])
        out = np.einsum("tmk,mkij->tij", rk, c)
        return AreaResult(vertices, opalg.hermitian_part(out), 0.0)
    quad = quad or cone_quadrature(alpha, delta)
    cap = 0.0
    if isinstance(f, PiecewiseConst):
        out = _piecewise_cone(f, quad, vertices)
    else:
        out = np.empty((vertices.size, f.dim, f.dim), dtype=complex)
        for i, t in enumerate(vertices):
            g = ext.grad_sq(f, quad.points(t))
            out[i] = np.einsum("n,nij->ij", quad.weights, g)
    if quad.cap_area > 0:
        u = np.linspace(-1.0, 1.0, 33) * cone_half_width(quad.cap, alpha)
        ring = quad.cap * np.exp(1j * (vertices[:, None] + u[None, :]))
        cap = float(np.max(opalg.op_norm(ext.grad_sq(f, ring)))) * quad.cap_area
    return AreaResult(vertices, opalg.hermitian_part(out), cap)


def _piecewise_cone(f: PiecewiseConst, quad: ConeQuadrature, vertices: np.ndarray, chunk: int = 16) -> np.ndarray:
    # grad f = (1/pi) sum_j J_j (Im s_j, Re s_j) with s_j = 1/(p_j - z), so
    # |grad f|^2 = pi^-2 sum_{j,l} J_j* J_l Re(conj(s_j) s_l): integrate the
    # scalar kernel first, then contract with the jump matrices once
    p = np.exp(1j * f.edges[:-1])
    jumps = f.values - np.roll(f.values, 1, axis=0)
    jj = np.einsum("jba,lbc->jlac", jumps.conj(), jumps)
    out = np.empty((vertices.size, f.dim, f.dim), dtype=complex)
    for s in range(0, vertices.size, chunk):
        z = quad.points(vertices[s : s + chunk])
        sj = 1.0 / (p - z[..., None])
        ker = (np.swapaxes(sj.conj() * quad.weights[:, None], 1, 2) @ sj).real / np.pi**2
        out[s : s + chunk] = np.einsum("vjl,jlac->vac", ker, jj)
    return out


def area_fun(f: CircleFun, alpha: float = DEFAULT_ALPHA, t=0.0, delta: float = 1.0, **kw) -> np.ndarray:
    """[A_c(f, alpha)](t, delta) as PSD matrices (one per vertex in ``t``)."""
    res = cone_integrals(f, alpha, np.atleast_1d(t), delta, **kw)
    out = opalg.psd_sqrt(res.squared)
    return out[0] if np.ndim(t) == 0 else out


def area_fun_row(f: CircleFun, alpha: float = DEFAULT_ALPHA, t=0.0, delta: float = 1.0, **kw) -> np.ndarray:
    return area_fun(adjoint(f), alpha, t, delta, **kw)


def g_integrals(f: CircleFun, vertices, delta: float = 1.0, eps_bnd: float = EPS_BND, order: int = 24) -> np.ndarray:
    """int_0^delta |grad f(r t)|^2 (1 - r^2) dr for each vertex angle."""
    if not 0 < delta <= 1:
        raise ValueError("truncation must lie in (0, 1]")
    vertices = np.atleast_1d(np.asarray(vertices, dtype=float))
    if isinstance(f, BandLimited):
        gx = ext.GradientExpansion(f)
        m = np.arange(gx.table.shape[0])
        mom = delta ** (m + 1) / (m + 1) - delta ** (m + 3) / (m + 3)
        k = np.arange(-gx.kmax, gx.kmax + 1)
        ph = np.exp(1j * k[None, :] * vertices[:, None])
        out = np.einsum("m,tk,mkij->tij", mom, ph, gx.table)
        return opalg.hermitian_part(out)
    top = min(delta, 1.0 - eps_bnd)
    x, w = ext.gauss_legendre(order)
    breaks = [0.0]
    b = 0.5
    while b < top:
        breaks.append(b)
        b += 0.5 * (1.0 - b)
    breaks = np.array(breaks + [top])
    lo, hi = breaks[:-1], breaks[1:]
    r = (0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * x).ravel()
    wr = (0.5 * (hi - lo)[:, None] * w).ravel() * (1.0 - r * r)
    z = r[None, :] * np.exp(1j * vertices[:, None])
    return opalg.hermitian_part(np.einsum("n,tnij->tij", wr, ext.grad_sq(f, z)))


def g_fun(f: CircleFun, t=0.0, delta: float = 1.0) -> np.ndarray:
    """[g_c(f)](t, delta) as PSD matrices."""
    out = opalg.psd_sqrt(g_integrals(f, np.atleast_1d(t), delta))
    return out[0] if np.ndim(t) == 0 else out


def g_fun_row(f: CircleFun, t=0.0, delta: float = 1.0) -> np.ndarray:
    return g_fun(adjoint(f), t, delta)


def sq_l1_norm(values) -> float:
    """int_T tr F(t) dm for PSD-valued F sampled on a uniform vertex grid."""
    values = np.asarray(values)
    return float(np.mean(np.trace(values, axis1=-2, axis2=-1).real))


def h1c_area_norm(f: BandLimited, alpha: float = DEFAULT_ALPHA, vertices: int = 64, variant: str = "area") -> float:
    """||f(0)||_1 + ||A_c(f)||_{L^1} (or the g-function version)."""
    if not isinstance(f, BandLimited) or not f.is_analytic():
        raise ValueError("expects an analytic band-limited function")
    ts = vertex_grid(vertices)
    if variant == "area":
        sq = cone_integrals(f, alpha, ts).squared
    elif variant == "g":
        sq = g_integrals(f, ts)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return float(opalg.schatten_norm(f.coeff(0), 1)) + sq_l1_norm(opalg.psd_sqrt(sq))


def lemma_constant_sq(g_sq: np.ndarray, a_sq: np.ndarray, rel: float = 1e-10) -> float:
    """Smallest C^2 with g_sq <= C^2 a_sq (PSD order), via a generalised eigenproblem.

    Directions where ``a_sq`` vanishes are ignored when ``g_sq`` vanishes there
    too; otherwise the answer is ``inf``.
    """
    w, u = np.linalg.eigh(opalg.hermitian_part(a_sq))
    keep = w > rel * max(w.max(), 1e-300)
    gp = opalg.adjoint(u) @ g_sq @ u
    if np.any(~keep):
        null = gp[np.ix_(~keep, ~keep)]
        if np.abs(null).max() > rel * max(np.abs(gp).max(), 1e-300):
            return float("inf")
    s = 1.0 / np.sqrt(w[keep])
    m = s[:, None] * gp[np.ix_(keep, keep)] * s[None, :]
    return float(max(np.linalg.eigvalsh(opalg.hermitian_part(m)).max(), 0.0))
