"""Registered studies: corpus runs with ratio envelopes and hard assertions.

Each study takes a :class:`StudyConfig` and returns a :class:`StudyResult`
holding the summary, the assertion outcomes, flat rows for the CSV output
and the ratio reports used for figures.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace

import numpy as np

from . import atoms
from . import carleson as ca
from . import circfun as cf
from . import extension as ext
from . import norms
from . import opalg
from . import squarefun as sq
from . import verify as vf
from .circfun import Arc, BandLimited, PiecewiseConst
from .verify import CorpusSpec, RatioReport

STUDIES = (
    "identity-2.16",
    "equiv-2.17",
    "equiv-2.20",
    "equiv-4.4",
    "carleson-4.1",
    "duality-5.1",
    "lemma-6.1",
    "equiv-6.1",
    "atoms-validate",
)

_A = dict(kind="analytic-bandlimited", vary=True)
DEFAULTS = {
    "identity-2.16": dict(corpus=dict(_A, count=200, d=4, degree=8), tolerances={"identity": 1e-9}),
    "equiv-2.17": dict(corpus=dict(_A, count=200, d=4, degree=8),
                       tolerances={"lower": 1 / 16, "upper": 16.0, "stability": 0.05}),
    "equiv-2.20": dict(corpus=dict(_A, count=200, d=4, degree=8),
                       tolerances={"lower": 1 / 50, "upper": 50.0, "stability": 0.05}),
    "equiv-4.4": dict(corpus=dict(_A, count=50, d=3, degree=6),
                      tolerances={"lower": 1 / 100, "upper": 100.0, "stability": 0.05}),
    "carleson-4.1": dict(corpus=dict(_A, count=30, d=3, degree=6),
                         tolerances={"lower": 1 / 100, "upper": 100.0, "stability": 0.05, "weight": 1e-9}),
    "duality-5.1": dict(corpus=dict(kind="atoms", count=50, d=2, cells=4),
                        tolerances={"duality": 1e-9, "sandwich": 1e-10}, witnesses=20),
    "lemma-6.1": dict(corpus=dict(_A, count=40, d=3, degree=6),
                      tolerances={"psd": 1e-9, "inflation": 2.0}),
    "equiv-6.1": dict(corpus=dict(_A, count=100, d=3, degree=6),
                      tolerances={"lower": 1 / 100, "upper": 100.0, "stability": 0.05}),
    "atoms-validate": dict(corpus=dict(kind="atoms", count=500, d=4, cells=4, vary=True),
                           tolerances={"area": 100.0}),
}


@dataclass(frozen=True)
class StudyConfig:
    study: str
    corpus: CorpusSpec
    grid: norms.NormSearchGrid = norms.DEFAULT_GRID
    alpha: float = sq.DEFAULT_ALPHA
    tolerances: dict = field(default_factory=dict)
    refine: bool = True
    witnesses: int = 20

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ValueError(f"unknown study {self.study!r}; choose from {', '.join(STUDIES)}")
        if not self.alpha > 1:
            raise ValueError("aperture alpha must exceed 1")
        for k, v in self.tolerances.items():
            if not (isinstance(v, (int, float)) and v > 0):
                raise ValueError(f"tolerance {k!r} must be positive")
        if self.witnesses < 1:
            raise ValueError("need at least one witness")

    @classmethod
    def build(cls, study: str, corpus=None, tolerances=None, **kw) -> "StudyConfig":
        """Study defaults overlaid with the given corpus fields and tolerances."""
        if study not in DEFAULTS:
            raise ValueError(f"unknown study {study!r}; choose from {', '.join(STUDIES)}")
        base = copy.deepcopy(DEFAULTS[study])
        cdoc = dict(base["corpus"], **(corpus or {}))
        unknown = set(tolerances or {}) - set(base["tolerances"])
        if unknown:
            raise ValueError(f"unknown tolerances {sorted(unknown)} for {study}")
        tol = dict(base["tolerances"], **(tolerances or {}))
        if "witnesses" in base:
            kw.setdefault("witnesses", base["witnesses"])
        return cls(study, CorpusSpec.from_dict(cdoc), tolerances=tol, **kw)

    def describe(self) -> dict:
        return {
            "study": self.study,
            "corpus": self.corpus.to_dict(),
            "grid": self.grid.describe(),
            "alpha": self.alpha,
            "tolerances": dict(self.tolerances),
            "refine": self.refine,
            "witnesses": self.witnesses,
        }


@dataclass
class Assertion:
    name: str
    ok: bool
    value: float | None = None
    bound: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": bool(self.ok), "value": self.value, "bound": self.bound, "detail": self.detail}


@dataclass
class StudyResult:
    name: str
    summary: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    reports: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(a.ok for a in self.assertions)

    def check(self, name: str, ok: bool, value=None, bound=None, detail: str = ""):
        val = None if value is None else float(value)
        bnd = None if bound is None else float(bound)
        self.assertions.append(Assertion(name, bool(ok), val, bnd, detail))


def _envelope_checks(res: StudyResult, rep: RatioReport, tol: dict, label: str):
    env = rep.envelope()
    res.reports[label] = rep
    if env["min"] is None:
        res.check(f"{label}: envelope", False, detail="no usable items")
        return
    res.check(f"{label}: envelope >= {tol['lower']:.6g}", env["min"] >= tol["lower"], env["min"], tol["lower"])
    res.check(f"{label}: envelope <= {tol['upper']:.6g}", env["max"] <= tol["upper"], env["max"], tol["upper"])
    res.check(f"{label}: all finite", rep.to_dict()["failed"] == 0, rep.to_dict()["failed"], 0)


def _stability_check(res: StudyResult, base: RatioReport, fine: RatioReport, tol: dict, label: str):
    change = vf.envelope_change(base, fine)
    res.reports[label + " (refined)"] = fine
    res.summary.setdefault("refinement", {})[label] = {"change": change, "refined": fine.envelope()}
    res.check(f"{label}: refinement change < {tol['stability']:.3g}", change < tol["stability"], change, tol["stability"])


def _tr(m) -> float:
    return float(np.trace(m).real)


def _rows(rep: RatioReport, label: str, extra=None) -> list[dict]:
    out = []
    for i, row in enumerate(rep.to_rows()):
        r = {"report": label, "item": row["item"], "x": row[rep.x_name], "y": row[rep.y_name],
             "ratio": row["ratio"], "status": row["status"]}
        if extra is not None:
            r.update(extra[i])
        out.append(r)
    return out


# -- identity and weighted equivalences ----------------------------------------------

def study_identity(cfg: StudyConfig) -> StudyResult:
    res = StudyResult(cfg.study)
    fs = vf.corpus_generate(cfg.corpus).functions()
    tol = cfg.tolerances["identity"]
    rep = vf.ratio_study(lambda f: _tr(vf.ls_lhs(f)), lambda f: _tr(vf.ls_rhs(f)), fs,
                         ("lhs", "rhs"), metadata={"functional": "log-weighted gradient integral"})
    dev = float(np.nanmax(np.abs(rep.ratios - 1.0)))
    res.reports["identity"] = rep
    res.rows += _rows(rep, "identity")
    mat = max(float(np.abs(vf.ls_lhs(f) - vf.ls_rhs(f)).max() / max(np.abs(vf.ls_lhs(f)).max(), 1e-300)) for f in fs)
    z = BandLimited.from_modes({1: np.eye(1)}, 1)
    lz, rz = _tr(vf.ls_lhs(z)), _tr(vf.ls_rhs(z))
    res.check("max |rhs/lhs - 1|", dev <= tol, dev, tol)
    res.check("matrix-level relative error", mat <= tol, mat, tol)
    res.check("f(z) = z gives 1 = 1", abs(lz - 1) <= tol and abs(rz - 1) <= tol, max(abs(lz - 1), abs(rz - 1)), tol)
    # weighted (Green's function) identity on the w-grid
    ws = vf.w_grid()
    gdev = 0.0
    for f in fs:
        for w in ws:
            lhs, rhs = vf.weighted_lhs(f, w), vf.green_rhs(f, w)
            gdev = max(gdev, abs(_tr(rhs) / _tr(lhs) - 1.0))
    res.check("weighted Green identity max |ratio - 1|", gdev <= tol, gdev, tol)
    res.summary = {"max_deviation": dev, "matrix_error": mat, "z_instance": [lz, rz], "green_max_deviation": gdev,
                   "envelope": rep.envelope(), "items": len(fs), "w_points": int(ws.size)}
    return res


def _weighted_report(fs, ws) -> tuple[RatioReport, list]:
    items = [(f, w) for f in fs for w in ws]
    extra = [{"w_re": float(np.real(w)), "w_im": float(np.imag(w))} for _, w in items]
    gxs = {}

    def rhs(item):
        f, w = item
        gx = gxs.setdefault(id(f), ext.GradientExpansion(f))
        return _tr(gx.kernel_integral(vf._poisson_moments(complex(w), gx.table.shape[0] - 1, gx.kmax)))

    rep = vf.ratio_study(lambda it: _tr(vf.weighted_lhs(*it)), rhs, items, ("lhs", "rhs"))
    return rep, extra


def study_weighted(cfg: StudyConfig) -> StudyResult:
    res = StudyResult(cfg.study)
    fs = vf.corpus_generate(cfg.corpus).functions()
    tol = cfg.tolerances
    rep, extra = _weighted_report(fs, vf.w_grid(5, 8))
    _envelope_checks(res, rep, tol, "weighted")
    res.rows += _rows(rep, "weighted", extra)
    if cfg.refine:
        fine, extra_f = _weighted_report(fs, vf.w_grid(10, 16))
        _stability_check(res, rep, fine, tol, "weighted")
        res.rows += _rows(fine, "weighted-refined", extra_f)
    res.summary.update({"envelope": rep.envelope(), "items": len(fs)})
    return res


def study_area(cfg: StudyConfig) -> StudyResult:
    res = StudyResult(cfg.study)
    corpus = vf.corpus_generate(cfg.corpus)
    fs = corpus.functions()
    tol = cfg.tolerances

    def report(vertices):
        return vf.ratio_study(lambda f: _tr(vf.ls_lhs(f)), lambda f: _tr(vf.area_lhs(f, cfg.alpha, vertices)),
                              fs, ("oscillation", "area"), metadata={"alpha": cfg.alpha, "vertices": vertices})

    rep = report(64)
    _envelope_checks(res, rep, tol, "area")
    res.rows += _rows(rep, "area")
    if cfg.refine:
        fine = report(128)
        _stability_check(res, rep, fine, tol, "area")
        res.rows += _rows(fine, "area-refined")
    env = rep.envelope()
    if env["argmin"] is not None:
        res.artifacts["witness_min"] = cf.to_dict(fs[env["argmin"]])
        res.artifacts["witness_max"] = cf.to_dict(fs[env["argmax"]])
    res.summary.update({"envelope": env, "items": len(fs), "cone_area": sq.cone_area(cfg.alpha)})
    return res


# -- BMO-side equivalences ---------------------------------------------------------

def refined_mobius_grid() -> list[ext.Mobius]:
    out = [ext.Mobius(0.0, 0j)]
    for r in (0.25, 0.5, 0.7, 0.85, 0.95, 0.98):
        for k in range(32):
            out.append(ext.Mobius(0.0, r * np.exp(2j * np.pi * k / 32)))
    return out


def study_bmo(cfg: StudyConfig) -> StudyResult:
    res = StudyResult(cfg.study)
    fs = vf.corpus_generate(cfg.corpus).functions()
    tol = cfg.tolerances

    def values(grid, psis, gammas):
        return [
            (norms.star_c_norm(f, grid)[0], norms.mobius_orbit_norm(f, psis, gammas)[0], norms.garsia_norm(f, grid)[0])
            for f in fs
        ]

    def reports(vals, suffix=""):
        idx = list(range(len(vals)))
        pick = lambda j: (lambda i: vals[i][j])
        return {
            "orbit/star" + suffix: vf.ratio_study(pick(0), pick(1), idx, ("star", "orbit")),
            "garsia/star" + suffix: vf.ratio_study(pick(0), pick(2), idx, ("star", "garsia")),
            "garsia/orbit" + suffix: vf.ratio_study(pick(1), pick(2), idx, ("orbit", "garsia")),
        }

    base = reports(values(cfg.grid, None, norms.DEFAULT_GAMMAS))
    for label, rep in base.items():
        _envelope_checks(res, rep, tol, label)
        res.rows += _rows(rep, label)
    if cfg.refine:
        fine = reports(values(cfg.grid.refined(), refined_mobius_grid(), norms.DEFAULT_GAMMAS + (0.995,)))
        for label, rep in base.items():
            _stability_check(res, rep, fine[label], tol, label)
            res.rows += _rows(fine[label], label + " refined")
    res.summary.update({k: r.envelope() for k, r in base.items()})
    res.summary["items"] = len(fs)
    return res


def _carleson_values(f, grid, angular, order):
    nu = ca.measure_from_gradient(f, "poisson", angular=angular, order=order)
    lam = ca.measure_from_gradient(f, "log", angular=angular, order=order)
    star = norms.star_c_norm(f, grid)[0]
    cn = ca.carleson_norm(nu, grid)[0]
    cl = ca.carleson_norm(lam, grid)[0]
    pn = ca.poisson_functional(nu, grid)[0]
    diff = opalg.hermitian_part(2.0 * lam.weights - nu.weights)
    scale = max(float(opalg.op_norm(nu.total())), 1e-300)
    node_gap = float(opalg.min_eig(diff).min()) / scale
    return {"star_sq": star**2, "nu": cn, "lambda": cl, "N": pn, "node_gap": node_gap}


def study_carleson(cfg: StudyConfig) -> StudyResult:
    res = StudyResult(cfg.study)
    fs = vf.corpus_generate(cfg.corpus).functions()
    tol = cfg.tolerances
    grid = replace(cfg.grid, disk_angles=ca.ANGULAR_CELLS)

    def reports(vals, suffix=""):
        idx = list(range(len(vals)))
        get = lambda k: (lambda i: vals[i][k])
        return {
            "nu/star^2" + suffix: vf.ratio_study(get("star_sq"), get("nu"), idx, ("star_sq", "nu")),
            "lambda/star^2" + suffix: vf.ratio_study(get("star_sq"), get("lambda"), idx, ("star_sq", "lambda")),
            "nu/N" + suffix: vf.ratio_study(get("N"), get("nu"), idx, ("N", "nu")),
        }

    vals = [_carleson_values(f, grid, ca.ANGULAR_CELLS, ca.RADIAL_ORDER) for f in fs]
    base = reports(vals)
    for label, rep in base.items():
        _envelope_checks(res, rep, tol, label)
        res.rows += _rows(rep, label)
    gap = min(v["node_gap"] for v in vals)
    res.check("node-wise 2 lambda - nu >= 0", gap >= -tol["weight"], gap, -tol["weight"])
    worst = max(v["nu"] - 2.0 * v["lambda"] for v in vals)
    res.check("||nu||_c <= 2 ||lambda||_c", worst <= tol["weight"], worst, tol["weight"])
    if cfg.refine:
        fgrid = replace(grid.refined(), disk_angles=2 * ca.ANGULAR_CELLS)
        fvals = [_carleson_values(f, fgrid, 2 * ca.ANGULAR_CELLS, 12) for f in fs]
        fine = reports(fvals)
        for label, rep in base.items():
            _stability_check(res, rep, fine[label], tol, label)
            res.rows += _rows(fine[label], label + " refined")
    res.summary.update({k: r.envelope() for k, r in base.items()})
    res.summary.update({"items": len(fs), "min_node_gap": gap})
    return res


# -- duality -----------------------------------------------------------------------

def _decomposition_backed(spec: CorpusSpec) -> list[tuple]:
    """Functions built as sums of random atoms plus a small constant, with their decompositions."""
    out = []
    for s in np.random.SeedSequence(spec.seed).spawn(spec.count):
        rng = np.random.default_rng(s)
        k = int(rng.integers(1, 4))
        terms = []
        for _ in range(k):
            arc = Arc(float(rng.uniform(0, 2 * np.pi)), 2.0 * 2.0 ** -int(rng.integers(0, 6)))
            lam = complex(rng.standard_normal(), rng.standard_normal())
            terms.append((lam, atoms.random_atom(rng, spec.d, arc, spec.cells)))
        c = vf._gaussian(rng, (spec.d, spec.d))
        terms.append((0.5 * float(opalg.schatten_norm(c, 1)), c / opalg.schatten_norm(c, 1)))
        dec = atoms.Decomposition(terms, "construction")
        f = dec.reconstruct(PiecewiseConst.constant(np.zeros((spec.d, spec.d))))
        out.append((f, dec))
    return out


def _witnesses(count: int, d: int, seed: int) -> list:
    out = []
    for i, s in enumerate(np.random.SeedSequence([seed, 7]).spawn(count)):
        rng = np.random.default_rng(s)
        if i % 2 == 0:
            n = int(rng.integers(1, 6))
            modes = np.arange(-n, n + 1)
            out.append(BandLimited(vf._gaussian(rng, (2 * n + 1, d, d)) / (1 + np.abs(modes))[:, None, None]))
        else:
            k = int(rng.integers(2, 9))
            edges = np.concatenate([[0.0], np.sort(rng.uniform(0, 2 * np.pi, k - 1)), [2 * np.pi]])
            out.append(PiecewiseConst(edges, vf._gaussian(rng, (k, d, d))))
    return out


def _star_over(g, arcs) -> float:
    if not arcs:
        return 0.0
    return float(np.sqrt(max(opalg.max_eig(norms.arc_variances(g, arcs)).max(), 0.0)))


def study_duality(cfg: StudyConfig) -> StudyResult:
    res = StudyResult(cfg.study)
    tol = cfg.tolerances
    items = _decomposition_backed(cfg.corpus)
    gs = _witnesses(cfg.witnesses, cfg.corpus.d, cfg.corpus.seed)
    base_star = [norms.star_c_norm(g, cfg.grid)[0] for g in gs]
    means = [float(opalg.op_norm(cf.mean(g))) for g in gs]
    worst, sandwich, failures = np.inf, np.inf, 0
    for i, (f, dec) in enumerate(items):
        ub, best = atoms.h1c_upper_bound(f, ("dyadic", 3))
        if dec.total < ub:
            ub, best = dec.total, dec
        # support arcs of the bounding decomposition join the arc grid
        extra = [a.support for a in best.atoms()]
        bmos = [m + max(s, _star_over(g, extra)) for g, m, s in zip(gs, means, base_star)]
        for j, (g, b) in enumerate(zip(gs, bmos)):
            val = abs(vf.pairing(f, g))
            slack = (1.0 + tol["duality"]) * b * ub - val
            worst = min(worst, slack / max(b * ub, 1e-300))
            failures += slack < 0
            res.rows.append({"report": "duality", "item": i, "witness": j, "pairing": val, "bmo_c": b,
                             "upper": ub, "slack": slack})
        wits = atoms.default_witnesses(f) + list(gs)
        aug = cfg.grid.with_arcs(extra)
        lower = atoms.h1c_lower_bound(f, wits, aug)
        sandwich = min(sandwich, (1.0 + tol["sandwich"]) * ub - lower)
        res.rows.append({"report": "bracket", "item": i, "lower": lower, "upper": ub, "scheme": best.scheme})
    res.check("duality slack >= 0 on all pairs", failures == 0, worst, 0.0, f"{failures} violations")
    res.check("lower <= (1 + tol) upper on all items", sandwich >= 0, sandwich, 0.0)
    res.summary = {"pairs": len(items) * len(gs), "min_relative_slack": worst, "min_bracket_gap": sandwich}
    return res


# -- square functions ---------------------------------------------------------------

LEMMA_DELTAS = (0.5, 0.9, 1.0)


def _lemma_constants(fs, alpha, vertices) -> np.ndarray:
    ts = sq.vertex_grid(vertices)
    out = []
    for f in fs:
        for delta in LEMMA_DELTAS:
            g2 = sq.g_integrals(f, ts, delta)
            a2 = sq.cone_integrals(f, alpha, ts, 0.5 * (1.0 + delta)).squared
            out.append(max(sq.lemma_constant_sq(g, a) for g, a in zip(g2, a2)))
    return np.array(out)


def study_lemma(cfg: StudyConfig) -> StudyResult:
    res = StudyResult(cfg.study)
    tol = cfg.tolerances
    calib = vf.corpus_generate(cfg.corpus).functions()
    check = vf.corpus_generate(replace(cfg.corpus, seed=cfg.corpus.seed + 1)).functions()
    c2 = float(_lemma_constants(calib, cfg.alpha, 32).max())
    c2_used = c2 * tol["inflation"] ** 2
    ts = sq.vertex_grid(32)
    gap = np.inf
    for i, f in enumerate(check):
        for delta in LEMMA_DELTAS:
            g2 = sq.g_integrals(f, ts, delta)
            a2 = sq.cone_integrals(f, cfg.alpha, ts, 0.5 * (1.0 + delta)).squared
            d = opalg.min_eig(opalg.hermitian_part(c2_used * a2 - g2))
            scale = max(float(opalg.op_norm(g2).max()), 1e-300)
            rel = float(d.min()) / scale
            gap = min(gap, rel)
            res.rows.append({"report": "lemma", "item": i, "delta": delta, "min_eig_rel": rel})
    res.check("PSD domination g^2 <= C^2 A^2 on held-out corpus", gap >= -tol["psd"], gap, -tol["psd"])
    c2_check = float(_lemma_constants(check, cfg.alpha, 32).max())
    res.summary = {"C_calibrated": float(np.sqrt(c2)), "C_used": float(np.sqrt(c2_used)),
                   "C_heldout": float(np.sqrt(c2_check)), "min_relative_gap": gap, "alpha": cfg.alpha}
    res.check("calibrated constant finite", np.isfinite(c2), np.sqrt(c2))
    return res


def study_h1(cfg: StudyConfig) -> StudyResult:
    res = StudyResult(cfg.study)
    fs = vf.corpus_generate(cfg.corpus).functions()
    tol = cfg.tolerances

    def values(grid, vertices):
        out = []
        for f in fs:
            area = sq.h1c_area_norm(f, cfg.alpha, vertices)
            up = atoms.h1c_upper_bound(f)[0]
            lo = atoms.h1c_lower_bound(f, None, grid)
            out.append((area, up, lo))
        return out

    def reports(vals):
        idx = list(range(len(vals)))
        pick = lambda j: (lambda i: vals[i][j])
        return {
            "area/upper": vf.ratio_study(pick(1), pick(0), idx, ("upper", "area")),
            "area/lower": vf.ratio_study(pick(2), pick(0), idx, ("lower", "area")),
        }

    vals = values(cfg.grid, 64)
    base = reports(vals)
    for label, rep in base.items():
        _envelope_checks(res, rep, tol, label)
        res.rows += _rows(rep, label)
    bad = sum(lo > (1 + 1e-10) * up for _, up, lo in vals)
    res.check("bracket ordered (lower <= upper)", bad == 0, bad, 0)
    if cfg.refine:
        fine = reports(values(cfg.grid.refined(), 128))
        for label, rep in base.items():
            _stability_check(res, rep, fine[label], tol, label)
            res.rows += _rows(fine[label], label + " refined")
    # column/row splitting witness: f = g + h, g analytic, h* analytic
    g = fs[0]
    partner = next((x for x in fs[1:] if x.dim == g.dim), g)
    h = cf.adjoint(partner)
    ts = sq.vertex_grid(64)
    ac = sq.sq_l1_norm(sq.area_fun(g, cfg.alpha, ts))
    ar = sq.sq_l1_norm(sq.area_fun_row(h, cfg.alpha, ts))
    res.check("splitting witness finite", np.isfinite(ac) and np.isfinite(ar), ac + ar)
    res.summary.update({k: r.envelope() for k, r in base.items()})
    res.summary.update({"items": len(fs), "splitting": {"A_c(g)": ac, "A_r(h)": ar}})
    return res


def study_atoms(cfg: StudyConfig) -> StudyResult:
    res = StudyResult(cfg.study)
    corpus = vf.corpus_generate(cfg.corpus)
    tol = cfg.tolerances
    ts = sq.vertex_grid(64)
    bad, worst_l1, worst_area, full = 0, 0.0, 0.0, 0
    for i, a in enumerate(corpus.items):
        rep = atoms.validate_atom(a)
        bad += not rep.ok
        full += rep.full_circle
        l1 = cf.boundary_l1_schatten(a.data)
        area = sq.sq_l1_norm(opalg.psd_sqrt(sq.cone_integrals(a.data, cfg.alpha, ts).squared))
        worst_l1 = max(worst_l1, l1)
        worst_area = max(worst_area, area)
        res.rows.append({"report": "atoms", "item": i, "ok": rep.ok, "violated": "|".join(rep.violated),
                         "mean_margin": rep.margins["mean"], "size_margin": rep.margins["size"],
                         "l1": l1, "area_l1": area})
    res.check("all atoms valid", bad == 0, bad, 0)
    res.check("int ||a||_1 dm <= 1 + 1e-10", worst_l1 <= 1 + 1e-10, worst_l1, 1 + 1e-10)
    res.check(f"||A_c(a)||_L1 <= {tol['area']:g}", worst_area <= tol["area"], worst_area, tol["area"])
    res.summary = {"atoms": len(corpus), "invalid": bad, "full_circle": full, "max_l1": worst_l1,
                   "max_area_l1": worst_area}
    return res


RUNNERS = {
    "identity-2.16": study_identity,
    "equiv-2.17": study_weighted,
    "equiv-2.20": study_area,
    "equiv-4.4": study_bmo,
    "carleson-4.1": study_carleson,
    "duality-5.1": study_duality,
    "lemma-6.1": study_lemma,
    "equiv-6.1": study_h1,
    "atoms-validate": study_atoms,
}


def run_study(cfg: StudyConfig) -> StudyResult:
    return RUNNERS[cfg.study](cfg)
