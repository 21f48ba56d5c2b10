"""Operator-valued measures on the disk, Carleson tubes and the Poisson functional.

Measures are discrete: a list of disk nodes with PSD weights. Nodes built
from a polar grid also carry the angular cell they stand for, so a tube
takes the exact fraction of each cell it overlaps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import circfun as cf
from . import extension as ext
from . import opalg
from .circfun import TWO_PI, Arc, BandLimited, CircleFun
from .norms import DEFAULT_GRID, NormSearchGrid, argmax_first, chebyshev_lobatto

R_INNER = 2.0**-20
OUTER_LEVELS = 24
RADIAL_ORDER = 8
ANGULAR_CELLS = 128


@dataclass(frozen=True)
class Tube:
    """{r e^{it} : 1 - delta <= r < 1, |e^{it} - e^{it0}| < delta}."""

    t0: float
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("tube width must be positive")

    @property
    def arc(self) -> Arc:
        return Arc(self.t0, self.delta)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        chord = np.abs(np.exp(1j * np.angle(z)) - np.exp(1j * self.t0))
        ang = np.ones_like(r, dtype=bool) if self.arc.is_full else chord < self.delta
        return (r >= 1.0 - self.delta) & (r < 1.0) & ang


@dataclass(eq=False)
class OperatorMeasure:
    nodes: np.ndarray
    weights: np.ndarray
    cells: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)
    polar: tuple | None = None

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=complex).ravel()
        self.weights = np.asarray(self.weights, dtype=complex)
        if self.weights.shape[:1] != self.nodes.shape or self.weights.ndim != 3:
            raise ValueError("weights must have shape (nodes, d, d)")
        if self.cells is not None:
            self.cells = np.asarray(self.cells, dtype=float).reshape(-1, 2)
            if self.cells.shape[0] != self.nodes.size:
                raise ValueError("one angular cell per node")

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def total(self) -> np.ndarray:
        return opalg.hermitian_part(self.weights.sum(axis=0))

    def tube_fractions(self, tubes) -> np.ndarray:
        """Share of each node's mass inside each tube (shape ``(tubes, nodes)``)."""
        tubes = list(tubes)
        r = np.abs(self.nodes)
        lo = np.array([t.arc.interval[0] for t in tubes])[:, None]
        hi = np.array([t.arc.interval[1] for t in tubes])[:, None]
        full = np.array([t.arc.is_full for t in tubes])[:, None]
        radial = r[None, :] >= 1.0 - np.array([t.delta for t in tubes])[:, None]
        if self.cells is not None:
            c0, c1 = self.cells[:, 0][None], self.cells[:, 1][None]
            frac = cf.circle_overlap(c0, c1, lo, hi) / (c1 - c0)
        else:
            ang = np.angle(self.nodes)[None]
            frac = (np.mod(ang - lo, TWO_PI) < hi - lo).astype(float)
        frac = np.where(full, 1.0, frac)
        return radial * frac

    def tube_mass(self, tube: Tube) -> np.ndarray:
        w = self.tube_fractions([tube])[0]
        return opalg.hermitian_part(np.einsum("n,nij->ij", w, self.weights))

    def to_dict(self) -> dict:
        return {
            "nodes": cf._enc(self.nodes),
            "weights": cf._enc(self.weights),
            "cells": None if self.cells is None else self.cells.tolist(),
            "metadata": self.metadata,
            "polar": None if self.polar is None else [np.asarray(x).tolist() for x in self.polar],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "OperatorMeasure":
        nodes = cf._dec(doc["nodes"]).ravel()
        w = cf._dec(doc["weights"]).reshape(nodes.size, -1)
        d = int(round(np.sqrt(w.shape[1])))
        polar = doc.get("polar")
        if polar is not None:
            polar = tuple(np.asarray(x, dtype=float) for x in polar)
        return cls(nodes, w.reshape(-1, d, d), doc.get("cells"), dict(doc.get("metadata", {})), polar)


def radial_nodes(r1: float = R_INNER, levels: int = OUTER_LEVELS, order: int = RADIAL_ORDER):
    """Gauss-Legendre radii and weights on graded panels covering [r1, 1 - 2^-levels].

    Inner panels double from r1 to 1/2; outer panel edges sit
    at 1 - 2^-k so that the radial side of every dyadic tube is a panel edge.
    """
    inner = [r1]
    while inner[-1] * 2.0 < 0.5:
        inner.append(inner[-1] * 2.0)
    edges = np.array(inner + [0.5] + [1.0 - 2.0**-k for k in range(2, levels + 1)])
    x, w = ext.gauss_legendre(order)
    a, b = edges[:-1, None], edges[1:, None]
    r = 0.5 * (a + b) + 0.5 * (b - a) * x
    wr = 0.5 * (b - a) * w
    return r.ravel(), wr.ravel()


def _inner_grad_bound(f: CircleFun, r1: float) -> float:
    """Certified bound for ||grad f||_op^2 on |z| <= r1."""
    if isinstance(f, BandLimited):
        n = f.degree
        k = np.arange(1, n + 1)
        pa = opalg.op_norm(f.coeffs[n + 1 :]) if n else np.zeros(0)
        pb = opalg.op_norm(f.coeffs[:n][::-1]) if n else np.zeros(0)
        sa = float(np.sum(k * pa * r1 ** (k - 1)))
        sb = float(np.sum(k * pb * r1 ** (k - 1)))
        return 2.0 * (sa + sb) ** 2
    jumps = f.values - np.roll(f.values, 1, axis=0)
    s = float(np.sum(opalg.op_norm(jumps))) / (np.pi * (1.0 - r1))
    return 2.0 * s**2


def measure_from_gradient(
    f: CircleFun,
    weight: str = "poisson",
    levels: int = OUTER_LEVELS,
    angular: int = ANGULAR_CELLS,
    order: int = RADIAL_ORDER,
    r1: float = R_INNER,
) -> OperatorMeasure:
    """d nu = |grad f|^2 (1 - |z|^2) dxdy, or |grad f|^2 log(1/|z|) dxdy for ``weight="log"``.

    Both weights use the same nodes, so the two measures compare node by
    node. The discarded disk |z| < r1 is bounded in ``metadata["inner_bound"]``.
    """
    if weight not in ("poisson", "log"):
        raise ValueError(f"unknown weight {weight!r}")
    r, wr = radial_nodes(r1, levels, order)
    edges = TWO_PI * np.arange(angular + 1) / angular
    phi = 0.5 * (edges[:-1] + edges[1:])
    z = (r[:, None] * np.exp(1j * phi[None, :])).ravel()
    dens = ext.grad_sq(f, z)
    w_rad = (1.0 - r**2) if weight == "poisson" else np.log(1.0 / r)
    mass = (w_rad * r * wr)[:, None] * np.full(angular, TWO_PI / angular)[None, :]
    weights = dens * mass.ravel()[:, None, None]
    cells = np.tile(np.stack([edges[:-1], edges[1:]], axis=1), (r.size, 1))
    if weight == "poisson":
        inner_w = r1**2 / 2.0
    else:
        inner_w = r1**2 / 2.0 * np.log(1.0 / r1) + r1**2 / 4.0
    meta = {
        "weight": weight,
        "r1": r1,
        "outer_radius": 1.0 - 2.0**-levels,
        "angular_cells": angular,
        "radial_order": order,
        "inner_bound": TWO_PI * inner_w * _inner_grad_bound(f, r1),
    }
    return OperatorMeasure(z, weights, cells, meta, polar=(r, edges))


def tubes_from_grid(grid: NormSearchGrid) -> list[Tube]:
    return [Tube(a.center, a.radius) for a in grid.arcs()]


def _polar_tube_values(nu: OperatorMeasure, tubes) -> np.ndarray:
    # tensor grid: tube mass = sum over cells of overlap fraction x radial tail sum
    r, edges = nu.polar
    d = nu.dim
    w = nu.weights.reshape(r.size, edges.size - 1, d * d)
    tail = np.cumsum(w[::-1], axis=0)[::-1]
    tail = np.concatenate([tail, np.zeros_like(tail[:1])])
    cut = np.searchsorted(r, 1.0 - np.array([t.delta for t in tubes]), side="left")
    lo = np.array([t.arc.interval[0] for t in tubes])[:, None]
    hi = np.array([t.arc.interval[1] for t in tubes])[:, None]
    full = np.array([t.arc.is_full for t in tubes])[:, None]
    frac = cf.circle_overlap(edges[None, :-1], edges[None, 1:], lo, hi) / np.diff(edges)[None]
    frac = np.where(full, 1.0, frac)
    masses = np.einsum("ta,tax->tx", frac, tail[cut]).reshape(-1, d, d)
    deltas = np.array([t.delta for t in tubes])
    return opalg.max_eig(opalg.hermitian_part(masses)) / deltas


def carleson_norm(nu: OperatorMeasure, grid: NormSearchGrid = DEFAULT_GRID, chunk: int = 256) -> tuple[float, Tube]:
    """sup over grid tubes of ||nu(tube)||_op / delta, with the maximising tube."""
    tubes = tubes_from_grid(grid)
    if not tubes:
        raise ValueError("empty tube grid")
    if nu.metadata.get("outer_radius") is not None:
        floor = 1.0 - nu.metadata["outer_radius"]
        if min(t.delta for t in tubes) < 2.0 * floor:
            raise ValueError("tube grid finer than the radial resolution of the measure")
    d = nu.dim
    if nu.polar is not None:
        vals = _polar_tube_values(nu, tubes)
        i = argmax_first(vals)
        return float(max(vals[i], 0.0)), tubes[i]
    flat = nu.weights.reshape(nu.nodes.size, d * d)
    vals = np.empty(len(tubes))
    for s in range(0, len(tubes), chunk):
        part = tubes[s : s + chunk]
        masses = (nu.tube_fractions(part) @ flat).reshape(-1, d, d)
        deltas = np.array([t.delta for t in part])
        vals[s : s + chunk] = opalg.max_eig(opalg.hermitian_part(masses)) / deltas
    i = argmax_first(vals)
    return float(max(vals[i], 0.0)), tubes[i]


def _polar_poisson_values(nu: OperatorMeasure, rho: np.ndarray) -> np.ndarray:
    # z on rings rho at angles 2 pi m / A, nodes at cell midpoints: the kernel
    # depends on j - m only, so each ring is a circular correlation done by FFT
    r, edges = nu.polar
    a = edges.size - 1
    d = nu.dim
    w = nu.weights.reshape(r.size, a, d * d)
    theta = TWO_PI * (np.arange(a) + 0.5) / a
    s = rho[:, None, None] * r[None, :, None]
    ker = (1.0 - rho**2)[:, None, None] / (1.0 - 2.0 * s * np.cos(theta) + s * s)
    spec = np.einsum("pra,rax->pax", np.conj(np.fft.fft(ker, axis=2)), np.fft.fft(w, axis=1))
    vals = np.fft.ifft(spec, axis=1).reshape(rho.size, a, d, d)
    return opalg.max_eig(opalg.hermitian_part(vals))


def poisson_functional(nu: OperatorMeasure, z=None, chunk: int = 256) -> tuple[float, complex]:
    """sup_z ||int P_z(w) d nu(w)||_op over a point array or a :class:`NormSearchGrid`.

    A polar measure on a grid whose angle count matches its angular cells
    takes an FFT path; other inputs are summed directly.
    """
    grid = DEFAULT_GRID if z is None else z
    if isinstance(grid, NormSearchGrid):
        if nu.polar is not None and grid.disk_angles == nu.polar[1].size - 1:
            rho = chebyshev_lobatto(grid.disk_radii, grid.rmax)
            vals = _polar_poisson_values(nu, rho)
            i = argmax_first(vals.ravel())
            p, m = divmod(i, vals.shape[1])
            return float(max(vals.ravel()[i], 0.0)), complex(rho[p] * np.exp(1j * TWO_PI * m / vals.shape[1]))
        z = grid.points()
    z = ext.disk_points(np.ravel(z))
    if z.size == 0:
        raise ValueError("empty point grid")
    d = nu.dim
    flat = nu.weights.reshape(nu.nodes.size, d * d)
    flat = np.concatenate([flat.real, flat.imag], axis=1)
    # |1 - conj(z) w|^2 = 1 - 2 Re(conj(z) w) + |z|^2 |w|^2, with Re(conj(z) w) as a real product
    wxy = np.stack([nu.nodes.real, nu.nodes.imag])
    w2 = np.abs(nu.nodes) ** 2
    vals = np.empty(z.size)
    for s in range(0, z.size, chunk):
        zz = z[s : s + chunk]
        z2 = np.abs(zz) ** 2
        re = np.stack([zz.real, zz.imag], axis=1) @ wxy
        k = (1.0 - z2)[:, None] / (1.0 - 2.0 * re + z2[:, None] * w2[None, :])
        m = k @ flat
        m = (m[:, : d * d] + 1j * m[:, d * d :]).reshape(-1, d, d)
        vals[s : s + chunk] = opalg.max_eig(opalg.hermitian_part(m))
    i = argmax_first(vals)
    return float(max(vals[i], 0.0)), complex(z[i])
