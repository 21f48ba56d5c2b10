"""M_c-atoms, atomic decompositions and two-sided bounds for the H^1_c norm.

The H^1_c norm is an infimum over decompositions and is never computed
exactly: :func:`h1c_upper_bound` produces an explicit decomposition and
:func:`h1c_lower_bound` a duality estimate against BMO_c witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import circfun as cf
from . import norms
from . import opalg
from .circfun import TWO_PI, Arc, BandLimited, CircleFun, PiecewiseConst

MEAN_TOL = 1e-12
SIZE_TOL = 1e-12
L1_TOL = 1e-10
FULL_CIRCLE = Arc(0.0, 2.0)


@dataclass(frozen=True, eq=False)
class Atom:
    support: Arc
    data: CircleFun

    def to_dict(self) -> dict:
        return {
            "support": {"center": self.support.center, "radius": self.support.radius},
            "data": cf.to_dict(self.data),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Atom":
        s = doc["support"]
        return cls(Arc(float(s["center"]), float(s["radius"])), cf.from_dict(doc["data"]))


@dataclass
class AtomReport:
    ok: bool
    violated: list = field(default_factory=list)
    margins: dict = field(default_factory=dict)
    full_circle: bool = False


def _support_excess(a: Atom) -> float:
    """Angular length of the non-zero part of ``a.data`` lying outside the support arc."""
    if a.support.is_full:
        return 0.0
    f = a.data
    if isinstance(f, BandLimited):
        return 0.0 if not np.any(f.coeffs) else TWO_PI
    lo, hi = a.support.interval
    inside = cf.circle_overlap(f.edges[:-1], f.edges[1:], lo, hi)
    live = np.abs(f.values).max(axis=(1, 2)) > 0
    return float(np.sum((f.lengths - inside)[live]))


def validate_atom(a: Atom) -> AtomReport:
    """Check support, mean-zero and size clauses plus the L^1(L^1) consequence."""
    size = a.support.measure ** -0.5
    norm = cf.lp_c_norm(a.data, 1.0)
    mean = float(opalg.op_norm(cf.mean(a.data)))
    l1 = cf.boundary_l1_schatten(a.data)
    excess = _support_excess(a)
    mean_tol = MEAN_TOL * max(1.0, norm)
    margins = {
        "support": -excess,
        "mean": mean_tol - mean,
        "size": (1.0 + SIZE_TOL) * size - norm,
        "l1": 1.0 + L1_TOL - l1,
    }
    violated = []
    if excess > 1e-12:
        violated.append("support")
    if mean > mean_tol:
        violated.append("mean")
    if norm > (1.0 + SIZE_TOL) * size:
        violated.append("size")
    if margins["l1"] < 0:
        violated.append("l1")
    return AtomReport(not violated, violated, margins, a.support.is_full)


def restrict(f: PiecewiseConst, lo: float, hi: float) -> PiecewiseConst:
    """f on the arc [lo, hi], zero elsewhere."""
    g = cf.refine(f, [lo, hi])
    mids = 0.5 * (g.edges[:-1] + g.edges[1:])
    inside = np.mod(mids - lo, TWO_PI) < (hi - lo)
    if hi - lo >= TWO_PI - cf.PARTITION_TOL:
        inside[:] = True
    return PiecewiseConst(g.edges, np.where(inside[:, None, None], g.values, 0.0))


def random_atom(seed, d: int, arc: Arc, cells: int = 4) -> Atom:
    """Random piecewise-constant atom on ``arc``, normalised to equality in the size clause."""
    if cells < 2:
        raise ValueError("an atom needs at least two cells")
    rng = np.random.default_rng(seed)
    lo, hi = arc.interval
    widths = rng.uniform(0.5, 1.5, cells)
    cuts = lo + (hi - lo) * np.concatenate([[0.0], np.cumsum(widths) / widths.sum()])
    vals = np.stack([opalg.random_matrix(rng, d) for _ in range(cells)])
    w = np.diff(cuts)
    vals = vals - np.einsum("k,kij->ij", w / w.sum(), vals)
    if arc.is_full:
        edges = cuts.copy()
    else:
        edges = np.append(cuts, lo + TWO_PI)
        vals = np.concatenate([vals, np.zeros((1, d, d))])
    f = PiecewiseConst(edges, vals)
    norm = cf.lp_c_norm(f, 1.0)
    if not norm > 0:
        raise ValueError("degenerate atom draw")
    return Atom(arc, cf.scale(f, arc.measure ** -0.5 / norm))


@dataclass
class Decomposition:
    """f = sum_k lam_k piece_k with atoms or constant matrices of trace norm <= 1."""

    terms: list = field(default_factory=list)
    scheme: str = "global"

    @property
    def total(self) -> float:
        return float(sum(abs(lam) for lam, _ in self.terms))

    def atoms(self) -> list[Atom]:
        return [p for _, p in self.terms if isinstance(p, Atom)]

    def reconstruct(self, like: CircleFun) -> CircleFun:
        out = cf.scale(like, 0.0)
        for lam, piece in self.terms:
            if isinstance(piece, Atom):
                out = cf.add(out, cf.scale(piece.data, lam))
            else:
                out = cf.add(out, type(like).constant(lam * np.asarray(piece)))
        return out

    def to_dict(self) -> dict:
        terms = []
        for lam, piece in self.terms:
            entry = {"lambda": [float(np.real(lam)), float(np.imag(lam))]}
            if isinstance(piece, Atom):
                entry["atom"] = piece.to_dict()
            else:
                entry["constant"] = cf._enc(piece)
            terms.append(entry)
        return {"scheme": self.scheme, "terms": terms}

    @classmethod
    def from_dict(cls, doc: dict) -> "Decomposition":
        terms = []
        for entry in doc["terms"]:
            lam = complex(*entry["lambda"])
            if "atom" in entry:
                terms.append((lam, Atom.from_dict(entry["atom"])))
            else:
                terms.append((lam, cf._dec(entry["constant"])))
        return cls(terms, doc.get("scheme", "global"))


def _constant_term(c: np.ndarray):
    lam = float(opalg.schatten_norm(c, 1))
    return [(lam, c / lam)] if lam > 0 else []


def _global(f: CircleFun) -> Decomposition:
    c = cf.mean(f)
    terms = _constant_term(c)
    rest = cf.subtract(f, type(f).constant(c))
    lam = cf.lp_c_norm(rest, 1.0)
    if lam > 0:
        terms.append((lam, Atom(FULL_CIRCLE, cf.scale(rest, 1.0 / lam))))
    return Decomposition(terms, "global")


def _dyadic(f: PiecewiseConst, levels: int) -> Decomposition:
    n = 2**levels
    cuts = TWO_PI * np.arange(n + 1) / n
    g = cf.refine(f, cuts[:-1])
    terms = _constant_term(cf.mean(g))

    def arc_of(k, j):
        span = TWO_PI / 2**k
        return j * span, (j + 1) * span

    def mean_on(lo, hi):
        return cf.arc_mean(g, Arc.from_interval(lo, hi))

    for j in range(n):
        lo, hi = arc_of(levels, j)
        piece = restrict(g, lo, hi)
        piece = cf.subtract(piece, restrict(PiecewiseConst.constant(mean_on(lo, hi)), lo, hi))
        arc = Arc.from_interval(lo, hi)
        lam = cf.lp_c_norm(piece, 1.0) * arc.measure**0.5
        if lam > 0:
            terms.append((lam, Atom(arc, cf.scale(piece, 1.0 / lam))))
    for k in range(1, levels + 1):
        for j in range(2 ** (k - 1)):
            plo, phi = arc_of(k - 1, j)
            parent = mean_on(plo, phi)
            piece = None
            for c in (2 * j, 2 * j + 1):
                lo, hi = arc_of(k, c)
                part = restrict(PiecewiseConst.constant(mean_on(lo, hi) - parent), lo, hi)
                piece = part if piece is None else cf.add(piece, part)
            arc = Arc.from_interval(plo, phi)
            lam = cf.lp_c_norm(piece, 1.0) * arc.measure**0.5
            if lam > 0:
                terms.append((lam, Atom(arc, cf.scale(piece, 1.0 / lam))))
    return Decomposition(terms, f"dyadic({levels})")


def h1c_upper_bound(f: CircleFun, scheme="global") -> tuple[float, Decomposition]:
    """Upper bound for ||f||_{H^1_c} with the decomposition that realises it.

    ``scheme`` is ``"global"`` or ``("dyadic", K)``; the dyadic scheme
    returns the best of levels 0..K and needs piecewise-constant input
    (band-limited input falls back to the global scheme). An :class:`Atom`
    also competes with its own one-term decomposition.
    """
    if isinstance(f, Atom):
        total, dec = h1c_upper_bound(f.data, scheme)
        if validate_atom(f).ok and total > 1.0:
            return 1.0, Decomposition([(1.0, f)], "identity")
        return total, dec
    if scheme == "global":
        dec = _global(f)
        return dec.total, dec
    kind, levels = scheme
    if kind != "dyadic":
        raise ValueError(f"unknown scheme {scheme!r}")
    best = _global(f)
    if isinstance(f, PiecewiseConst):
        for k in range(1, int(levels) + 1):
            dec = _dyadic(f, k)
            if dec.total < best.total:
                best = dec
    return best.total, best


def default_witnesses(f: CircleFun) -> list[CircleFun]:
    """BMO_c test functions that pair well with f."""
    out = []
    rest = cf.subtract(f, type(f).constant(cf.mean(f)))
    if cf.l2_norm(rest) > 0:
        out.append(rest)
    if isinstance(f, BandLimited):
        for n in f.modes:
            a = f.coeff(int(n))
            if np.any(a):
                out.append(BandLimited.from_modes({int(n): opalg.polar_unitary(a)}, f.dim))
    else:
        c = cf.mean(f)
        if np.any(c):
            out.append(PiecewiseConst.constant(opalg.polar_unitary(c)))
        out.append(f)
    return out


def h1c_lower_bound(f: CircleFun, witnesses=None, grid: norms.NormSearchGrid = norms.DEFAULT_GRID) -> float:
    """max_g |tau(int g* f dm)| / ||g||_{BMO_c} over the witnesses.

    The BMO_c norms are grid suprema, so this is a lower bound up to the
    resolution of the arc grid.
    """
    witnesses = default_witnesses(f) if witnesses is None else list(witnesses)
    if not witnesses or cf.l2_norm(f) == 0:
        return 0.0
    best, live = 0.0, False
    for g in witnesses:
        b = norms.bmo_c_norm(g, grid)
        if b <= 0:
            continue
        live = True
        best = max(best, abs(cf.pairing(f, g)) / b)
    if not live:
        raise ValueError("all witnesses have zero BMO_c norm")
    return best


def trace_h1_norm(f: CircleFun, m=None, nodes: int = 8192) -> float:
    """int_T |tau(m f)| dm (the scalar H^1 norm when tau(m f) is analytic)."""
    s = cf.trace_function(f, m)
    if isinstance(s, PiecewiseConst):
        return float(np.dot(s.lengths / TWO_PI, np.abs(s.values[:, 0, 0])))
    th = (np.arange(nodes) + 0.5) * TWO_PI / nodes
    return float(np.mean(np.abs(cf.evaluate(s, th)[:, 0, 0])))
