"""Poisson/Cauchy extensions into the disk, gradients, Moebius maps, dilations.

All evaluators are vectorised: a disk-point array of shape ``S`` gives matrix
output of shape ``S + (d, d)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import opalg
from .circfun import TWO_PI, BandLimited, CircleFun, PiecewiseConst, fourier_coefficients

DISK_CAP = 1.0 - 1e-12


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached Gauss-Legendre nodes and weights on [-1, 1] (read-only)."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def disk_points(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > DISK_CAP):
        raise ValueError("disk points must satisfy |z| <= 1 - 1e-12")
    return z


def poisson_kernel(z, t) -> np.ndarray:
    """P_z(e^{it}) = (1 - |z|^2) / |1 - conj(z) e^{it}|^2."""
    z = disk_points(z)
    w = np.exp(1j * np.asarray(t, dtype=float))
    return (1.0 - np.abs(z) ** 2) / np.abs(1.0 - np.conj(z) * w) ** 2


def poisson_kernel_disk(z, w) -> np.ndarray:
    """P_z(w) for interior w (same formula, w in the closed disk)."""
    z = disk_points(z)
    w = np.asarray(w, dtype=complex)
    return (1.0 - np.abs(z) ** 2) / np.abs(1.0 - np.conj(z) * w) ** 2


def _lift(u: np.ndarray, r: np.ndarray) -> np.ndarray:
    # continuous antiderivative of 2 pi P_r(u) in u
    k = np.round(u / TWO_PI)
    v = u - TWO_PI * k
    return 2.0 * np.arctan2((1.0 + r) * np.sin(v / 2.0), (1.0 - r) * np.cos(v / 2.0)) + TWO_PI * k


def harmonic_measure(z, start, stop) -> np.ndarray:
    """int_{start}^{stop} P_z dm for the counterclockwise arc, via the arctan antiderivative."""
    z = disk_points(z)
    r, phi = np.abs(z), np.angle(z)
    return (_lift(np.asarray(stop) - phi, r) - _lift(np.asarray(start) - phi, r)) / TWO_PI


def cell_masses(f: PiecewiseConst, z) -> np.ndarray:
    """Harmonic measures of the cells of ``f`` seen from ``z`` (shape ``S + (K,)``)."""
    z = disk_points(z)[..., None]
    return harmonic_measure(z, f.edges[:-1], f.edges[1:])


def poisson_moments(z, degree: int) -> np.ndarray:
    """int e^{ik theta} P_z dm = r^{|k|} e^{ik phi} for |k| <= degree."""
    z = disk_points(z)[..., None]
    ks = np.arange(-degree, degree + 1)
    r, phi = np.abs(z), np.angle(z)
    return r ** np.abs(ks) * np.exp(1j * ks * phi)


def _powers(z: np.ndarray, n: int) -> np.ndarray:
    out = np.empty(z.shape + (n + 1,), dtype=complex)
    out[..., 0] = 1.0
    for k in range(1, n + 1):
        out[..., k] = out[..., k - 1] * z
    return out


def poisson_extend(f: CircleFun, z) -> np.ndarray:
    """P[f](z) = int P_z f dm."""
    z = disk_points(z)
    if isinstance(f, BandLimited):
        n = f.degree
        zp = _powers(z, n)
        zc = np.conj(zp)
        out = np.einsum("...n,nij->...ij", zp, f.coeffs[n:])
        if n:
            out = out + np.einsum("...n,nij->...ij", zc[..., 1:], f.coeffs[:n][::-1])
        return out
    return np.einsum("...k,kij->...ij", cell_masses(f, z), f.values)


def cauchy_integral(f: CircleFun, z) -> np.ndarray:
    """C(f)(z) = int f(t) / (1 - conj(t) z) dm(t); analytic in z."""
    z = disk_points(z)
    if isinstance(f, BandLimited):
        n = f.degree
        return np.einsum("...n,nij->...ij", _powers(z, n), f.coeffs[n:])
    zz = z[..., None]
    a, b = np.exp(1j * f.edges[:-1]), np.exp(1j * f.edges[1:])
    sweep = np.pi * harmonic_measure(zz, f.edges[:-1], f.edges[1:]) + 0.5 * f.lengths
    w = (sweep - 1j * np.log(np.abs(b - zz) / np.abs(a - zz))) / TWO_PI
    return np.einsum("...k,kij->...ij", w, f.values)


def cauchy_boundary(f: CircleFun) -> BandLimited:
    """Boundary values of C(f) for band-limited f: the analytic projection."""
    if not isinstance(f, BandLimited):
        raise TypeError("analytic projection is only finite for band-limited data")
    c = f.coeffs.copy()
    c[: f.degree] = 0.0
    return BandLimited(c)


def derivative(f: BandLimited, z) -> np.ndarray:
    """f'(z) for analytic band-limited f."""
    if not f.is_analytic():
        raise ValueError("complex derivative requires an analytic function")
    return _holo_derivatives(f, disk_points(z))[0]


def _holo_derivatives(f: BandLimited, z: np.ndarray):
    # f = A(z) + B(conj z) with A = sum_{n>=0} a_n z^n, B(w) = sum_{k>=1} a_{-k} w^k
    n = f.degree
    d = f.dim
    if n == 0:
        zero = np.zeros(z.shape + (d, d), dtype=complex)
        return zero, zero
    zp = _powers(z, n - 1)
    k = np.arange(1, n + 1)[:, None, None]
    ca = k * f.coeffs[n + 1 :]
    cb = k * f.coeffs[:n][::-1]
    da = np.einsum("...n,nij->...ij", zp, ca)
    db = np.einsum("...n,nij->...ij", np.conj(zp), cb)
    return da, db


def gradient(f: CircleFun, z) -> tuple[np.ndarray, np.ndarray]:
    """Real partials (d/dx, d/dy) of the harmonic extension at z = x + iy."""
    z = disk_points(z)
    if isinstance(f, BandLimited):
        da, db = _holo_derivatives(f, z)
        return da + db, 1j * (da - db)
    p = np.exp(1j * f.edges[:-1])
    jumps = f.values - np.roll(f.values, 1, axis=0)
    s = 1.0 / (p - z[..., None])
    gx = np.einsum("...k,kij->...ij", s.imag, jumps) / np.pi
    gy = np.einsum("...k,kij->...ij", s.real, jumps) / np.pi
    return gx + 0j, gy + 0j


def grad_sq(f: CircleFun, z) -> np.ndarray:
    """|grad f|^2 = |f_x|^2 + |f_y|^2 (PSD matrix per point)."""
    gx, gy = gradient(f, z)
    return opalg.hermitian_part(opalg.adjoint(gx) @ gx + opalg.adjoint(gy) @ gy)


def analytic_grad_sq(f: BandLimited, z) -> np.ndarray:
    """2 |f'(z)|^2, valid for analytic f."""
    fp = derivative(f, z)
    return opalg.hermitian_part(2.0 * opalg.adjoint(fp) @ fp)


def dilate(f: CircleFun, gamma: float, tol: float = 1e-16) -> BandLimited:
    """Boundary function t -> P[f](gamma t).

    Band-limited input keeps its degree; piecewise-constant input is truncated
    where ``gamma^n < tol``.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("dilation factor must lie in (0, 1)")
    if isinstance(f, BandLimited):
        return BandLimited(f.coeffs * gamma ** np.abs(f.modes)[:, None, None])
    n = int(min(4096, np.ceil(np.log(tol) / np.log(gamma))))
    c = fourier_coefficients(f, n)
    return BandLimited(c * gamma ** np.abs(np.arange(-n, n + 1))[:, None, None])


@dataclass(frozen=True)
class Mobius:
    """psi(z) = e^{i theta} (z - z0) / (1 - conj(z0) z)."""

    theta: float = 0.0
    z0: complex = 0j

    def __post_init__(self):
        if not abs(self.z0) < 1:
            raise ValueError("Moebius base point must lie in the open disk")

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.theta) * (z - self.z0) / (1.0 - np.conj(self.z0) * z)

    def inverse(self, w) -> np.ndarray:
        v = np.exp(-1j * self.theta) * np.asarray(w, dtype=complex)
        return (v + self.z0) / (1.0 + np.conj(self.z0) * v)

    def boundary(self, theta) -> np.ndarray:
        """Angle of psi(e^{i theta}), unwrapped along the input."""
        out = np.angle(self(np.exp(1j * np.asarray(theta, dtype=float))))
        return np.unwrap(out) if np.ndim(out) else out


def mobius_apply(psi: Mobius, z) -> np.ndarray:
    return psi(disk_points(z))


def mobius_boundary(psi: Mobius, theta) -> np.ndarray:
    return psi.boundary(theta)


class GradientExpansion:
    """|grad f(r e^{i phi})|^2 = sum_{m,k} C[m, k] r^m e^{ik phi} for band-limited f.

    Integrals of |grad f|^2 against weights built from powers, logs and Fourier
    modes then reduce to closed-form radial moments.
    """

    def __init__(self, f: BandLimited):
        self.f = f
        self.degree = f.degree
        self.dim = f.dim

    @cached_property
    def table(self) -> np.ndarray:
        """``C[m, k + K]`` with ``0 <= m <= 2N - 2`` and ``|k| <= K = N - 1``."""
        n, d = self.degree, self.dim
        kmax = max(n - 1, 0)
        c = np.zeros((max(2 * n - 1, 1), 2 * kmax + 1, d, d), dtype=complex)
        if n == 0:
            return c
        j = np.arange(n)
        ca = (j + 1)[:, None, None] * self.f.coeffs[n + 1 :]
        cb = (j + 1)[:, None, None] * self.f.coeffs[:n][::-1]
        prod_a = np.einsum("jba,lbc->jlac", ca.conj(), ca)
        prod_b = np.einsum("jba,lbc->jlac", cb.conj(), cb)
        for jj in range(n):
            for ll in range(n):
                c[jj + ll, ll - jj + kmax] += 2.0 * prod_a[jj, ll]
                c[jj + ll, jj - ll + kmax] += 2.0 * prod_b[jj, ll]
        return c

    @property
    def kmax(self) -> int:
        return max(self.degree - 1, 0)

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        r, phi = np.abs(z), np.angle(z)
        m = np.arange(self.table.shape[0])
        k = np.arange(-self.kmax, self.kmax + 1)
        basis = r[..., None, None] ** m[:, None] * np.exp(1j * k * phi[..., None, None])
        return opalg.hermitian_part(np.einsum("...mk,mkij->...ij", basis, self.table))

    def radial_integral(self, moment) -> np.ndarray:
        """int_D |grad f|^2 w(|z|) dA given ``moment(p) = int_0^1 r^p w(r) dr``."""
        m = np.arange(self.table.shape[0])
        mom = np.array([moment(int(p) + 1) for p in m], dtype=float)
        return opalg.hermitian_part(TWO_PI * np.einsum("m,mij->ij", mom, self.table[:, self.kmax]))

    def kernel_integral(self, moment) -> np.ndarray:
        """int_D |grad f|^2 W dA for W(r, phi) = sum_k kappa_k(r) e^{ik phi}.

        ``moment(m, k)`` must return ``int_0^1 r^{m+1} kappa_{-k}(r) dr``; an
        array ``moment[m, k + K]`` of the same values is accepted as well.
        """
        m = np.arange(self.table.shape[0])
        k = np.arange(-self.kmax, self.kmax + 1)
        if callable(moment):
            # the table vanishes unless |k| <= m; skip those moments
            live = np.abs(self.table).reshape(m.size, k.size, -1).max(axis=2) > 0
            mom = np.zeros((m.size, k.size), dtype=complex)
            for a, b in zip(*np.nonzero(live)):
                mom[a, b] = moment(int(m[a]), int(k[b]))
        else:
            mom = np.asarray(moment, dtype=complex)
        return opalg.hermitian_part(TWO_PI * np.einsum("mk,mkij->ij", mom, self.table))


def log_moment(p: int) -> float:
    """int_0^1 r^p log(1/r) dr."""
    return 1.0 / (p + 1) ** 2


def poisson_weight_moment(p: int) -> float:
    """int_0^1 r^p (1 - r^2) dr."""
    return 2.0 / ((p + 1) * (p + 3))
