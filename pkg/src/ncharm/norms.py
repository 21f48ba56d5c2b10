"""BMO-side norms computed as grid suprema.

Every supremum over arcs or disk points is a maximum over a finite
:class:`NormSearchGrid`, hence a lower bound for the continuum value. The
maximising arc/point is returned alongside the value.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import circfun as cf
from . import extension as ext
from . import opalg
from .circfun import Arc, BandLimited, CircleFun, PiecewiseConst


def chebyshev_lobatto(n: int, rmax: float) -> np.ndarray:
    """n radii on [0, rmax], clustered at both ends, including both endpoints."""
    if n == 1:
        return np.array([0.0])
    return rmax * 0.5 * (1.0 - np.cos(np.pi * np.arange(n) / (n - 1)))


@dataclass(frozen=True)
class NormSearchGrid:
    centers: int = 256
    levels: int = 11
    disk_radii: int = 32
    disk_angles: int = 128
    rmax: float = 1.0 - 1e-4
    extra_arcs: tuple = field(default=())

    def __post_init__(self):
        if min(self.centers, self.levels, self.disk_radii, self.disk_angles) < 1:
            raise ValueError("grid dimensions must be positive")
        if not 0.0 <= self.rmax <= 1.0 - 1e-6:
            raise ValueError("rmax must lie in [0, 1 - 1e-6]")

    @property
    def radii(self) -> np.ndarray:
        """Chordal radii 2 * 2^-k, k = 0 .. levels - 1."""
        return 2.0 * 2.0 ** -np.arange(self.levels)

    @property
    def center_angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.centers) / self.centers

    def arcs(self) -> list[Arc]:
        out = [Arc(float(c), float(r)) for r in self.radii for c in self.center_angles]
        return out + list(self.extra_arcs)

    def points(self) -> np.ndarray:
        r = chebyshev_lobatto(self.disk_radii, self.rmax)
        t = 2.0 * np.pi * np.arange(self.disk_angles) / self.disk_angles
        pts = (r[:, None] * np.exp(1j * t[None, :])).ravel()
        # the origin appears once per angle; keep one copy
        return np.concatenate([[0j], pts[np.abs(pts) > 0]]) if r[0] == 0 else pts

    def refined(self, factor: int = 2) -> "NormSearchGrid":
        return replace(
            self,
            centers=self.centers * factor,
            levels=self.levels + int(np.log2(factor)),
            disk_radii=self.disk_radii * factor,
            disk_angles=self.disk_angles * factor,
        )

    def with_arcs(self, arcs) -> "NormSearchGrid":
        return replace(self, extra_arcs=tuple(self.extra_arcs) + tuple(arcs))

    @classmethod
    def parse(cls, spec: str | None) -> "NormSearchGrid":
        """Parse ``"centers=64,levels=8,disk_radii=16,disk_angles=64,rmax=0.999"``."""
        if not spec:
            return cls()
        kw = {}
        for part in spec.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            if key not in {"centers", "levels", "disk_radii", "disk_angles", "rmax"}:
                raise ValueError(f"unknown grid field {key!r}")
            kw[key] = float(val) if key == "rmax" else int(val)
        return cls(**kw)

    def describe(self) -> dict:
        return {
            "centers": self.centers,
            "levels": self.levels,
            "disk_radii": self.disk_radii,
            "disk_angles": self.disk_angles,
            "rmax": self.rmax,
            "extra_arcs": len(self.extra_arcs),
        }


DEFAULT_GRID = NormSearchGrid()


def argmax_first(values, rel: float = 1e-12) -> int:
    """Index of the maximum; near-ties (within ``rel``) go to the smallest index."""
    values = np.asarray(values, dtype=float)
    top = values.max()
    return int(np.flatnonzero(values >= top - rel * abs(top))[0])


# relative size below which an arc variance is cancellation noise
VARIANCE_FLOOR = 1e-11


def _arc_variances(f: CircleFun, arcs) -> tuple[np.ndarray, np.ndarray]:
    first, second, m = cf.arc_moments(f, arcs)
    mu = first / m[:, None, None]
    avg = second / m[:, None, None]
    return opalg.hermitian_part(avg - opalg.adjoint(mu) @ mu), avg


def arc_variances(f: CircleFun, arcs) -> np.ndarray:
    """(1/|I|) int_I |f - f_I|^2 dm for each arc (PSD matrices)."""
    return _arc_variances(f, arcs)[0]


def star_c_norm(f: CircleFun, grid: NormSearchGrid = DEFAULT_GRID) -> tuple[float, Arc]:
    """||f||_{*,c} over the grid arcs, with the maximising arc."""
    arcs = grid.arcs()
    if not arcs:
        raise ValueError("empty arc grid")
    var, avg = _arc_variances(f, arcs)
    lam = opalg.max_eig(var)
    # the variance is a difference of two moments of size ||avg||
    lam = np.where(lam <= VARIANCE_FLOOR * opalg.max_eig(avg), 0.0, lam)
    i = argmax_first(lam)
    return float(np.sqrt(max(lam[i], 0.0))), arcs[i]


def star_r_norm(f: CircleFun, grid: NormSearchGrid = DEFAULT_GRID) -> tuple[float, Arc]:
    return star_c_norm(cf.adjoint(f), grid)


def bmo_c_norm(f: CircleFun, grid: NormSearchGrid = DEFAULT_GRID) -> float:
    return float(opalg.op_norm(cf.mean(f))) + star_c_norm(f, grid)[0]


def bmo_r_norm(f: CircleFun, grid: NormSearchGrid = DEFAULT_GRID) -> float:
    return bmo_c_norm(cf.adjoint(f), grid)


def bmo_cr_norm(f: CircleFun, grid: NormSearchGrid = DEFAULT_GRID) -> float:
    return max(bmo_c_norm(f, grid), bmo_r_norm(f, grid))


def star_c_scalar_bound(f: CircleFun, grid: NormSearchGrid = DEFAULT_GRID, nodes: int = 96) -> float:
    """sup_I ((1/|I|) int_I ||f - f_I||_op^2 dm)^{1/2} over the grid arcs.

    Exact cell sums for piecewise-constant f; Gauss-Legendre on each arc for
    band-limited f.
    """
    arcs = grid.arcs()
    first, _, m = cf.arc_moments(f, arcs)
    means = first / m[:, None, None]
    if isinstance(f, PiecewiseConst):
        lo = np.array([a.interval[0] for a in arcs])
        hi = np.array([a.interval[1] for a in arcs])
        ov = cf.circle_overlap(f.edges[None, :-1], f.edges[None, 1:], lo[:, None], hi[:, None])
        dev = opalg.op_norm(f.values[None] - means[:, None]) ** 2
        vals = (ov * dev).sum(axis=1) / (2.0 * np.pi * m)
    else:
        x, w = ext.gauss_legendre(nodes)
        h = np.array([a.half_width for a in arcs])
        c = np.array([a.center for a in arcs])
        theta = c[:, None] + h[:, None] * x[None, :]
        dev = opalg.op_norm(cf.evaluate(f, theta) - means[:, None]) ** 2
        vals = 0.5 * (dev * w).sum(axis=1)
    return float(np.sqrt(vals.max()))


def linf_c_norm(f: CircleFun) -> float:
    """||f||_{L^inf_c} = ||int |f|^2 dm||_op^{1/2}."""
    return float(np.sqrt(max(opalg.max_eig(cf.gram(f)), 0.0)))


def linf_r_norm(f: CircleFun) -> float:
    return linf_c_norm(cf.adjoint(f))


def poisson_oscillation(f: CircleFun, z) -> np.ndarray:
    """int |f - f(z)|^2 P_z dm, exact, for each disk point."""
    z = ext.disk_points(z)
    if isinstance(f, BandLimited):
        first, second = cf.moments_bandlimited(f, ext.poisson_moments(z, 2 * f.degree))
    else:
        first, second = cf.moments_piecewise(f, ext.cell_masses(f, z))
    return opalg.hermitian_part(second - opalg.adjoint(first) @ first)


def garsia_norm(f: CircleFun, grid: NormSearchGrid = DEFAULT_GRID) -> tuple[float, complex]:
    """||f||_{**,c} over the grid disk points, with the maximising point.

    The inner integral is exact: int e^{ik theta} P_z dm = r^{|k|} e^{ik phi}
    truncates at the degree of |f|^2, so no kernel tail is dropped.
    """
    z = grid.points()
    lam = opalg.max_eig(poisson_oscillation(f, z))
    i = argmax_first(lam)
    return float(np.sqrt(max(lam[i], 0.0))), complex(z[i])


def garsia_r_norm(f: CircleFun, grid: NormSearchGrid = DEFAULT_GRID) -> tuple[float, complex]:
    return garsia_norm(cf.adjoint(f), grid)


def default_mobius_grid() -> list[ext.Mobius]:
    out = [ext.Mobius(0.0, 0j)]
    for r in (0.25, 0.5, 0.7, 0.85, 0.95):
        for k in range(16):
            out.append(ext.Mobius(0.0, r * np.exp(2j * np.pi * k / 16)))
    return out


DEFAULT_GAMMAS = (0.5, 0.75, 0.9, 0.97, 0.99)


def _orbit_gram(f: BandLimited, psi: ext.Mobius, gamma: float, tol: float, max_nodes: int) -> np.ndarray:
    base = ext.poisson_extend(f, psi(0j))
    nodes = max(16, 4 * f.degree + 8)
    prev = None
    while True:
        t = 2.0 * np.pi * np.arange(nodes) / nodes
        g = ext.poisson_extend(f, psi(gamma * np.exp(1j * t))) - base
        cur = np.einsum("nji,njk->ik", g.conj(), g) / nodes
        if prev is not None and np.linalg.norm(cur - prev) <= tol * max(np.linalg.norm(cur), 1e-300):
            return opalg.hermitian_part(cur)
        if nodes >= max_nodes:
            return opalg.hermitian_part(cur)
        prev = cur
        nodes *= 2


def mobius_orbit_norm(
    f: BandLimited,
    psis=None,
    gammas=DEFAULT_GAMMAS,
    tol: float = 1e-12,
    max_nodes: int = 1 << 15,
) -> tuple[float, tuple[ext.Mobius, float]]:
    """sup over psi, gamma of ||(f o psi - f(psi(0)))_gamma||_{L^inf_c}.

    The trapezoid rule on the circle converges geometrically for these
    analytic integrands; the node count doubles until successive Gram
    matrices agree to ``tol``.
    """
    if not isinstance(f, BandLimited) or not f.is_analytic():
        raise ValueError("Moebius-orbit norm is defined for analytic band-limited functions")
    psis = default_mobius_grid() if psis is None else list(psis)
    gammas = list(gammas)
    if not psis or not gammas:
        raise ValueError("empty Moebius or dilation grid")
    best, arg = -1.0, None
    for psi in psis:
        for gamma in gammas:
            lam = float(opalg.max_eig(_orbit_gram(f, psi, gamma, tol, max_nodes)))
            if lam > best:
                best, arg = lam, (psi, gamma)
    return float(np.sqrt(max(best, 0.0))), arg


def lp_cr_norm(f: CircleFun, p: float, splitting=None, tol: float = 1e-10) -> float:
    """Column/row norm: max of the two for p > 2; for p <= 2 the sum
    ||g||_{L^p_c} + ||h||_{L^p_r} of the supplied splitting f = g + h, which
    is an upper bound of the infimum defining the norm.
    """
    if p > 2:
        return max(cf.lp_c_norm(f, p), cf.lp_r_norm(f, p))
    if splitting is None:
        g, h = f, cf.scale(f, 0.0)
    else:
        g, h = splitting
    resid = cf.l2_norm(cf.subtract(cf.add(g, h), f))
    if resid > tol * (1.0 + cf.l2_norm(f)):
        raise ValueError(f"splitting does not reproduce f (L2 residual {resid:.3e})")
    return cf.lp_c_norm(g, p) + cf.lp_r_norm(h, p)
