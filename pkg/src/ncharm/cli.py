"""Command-line front end: ``ncharm run``, ``ncharm norm`` and ``ncharm corpus``.

Exit codes: 0 when every hard assertion passes, 2 on an assertion failure,
1 on configuration or IO errors.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import io
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import atoms
from . import circfun as cf
from . import norms
from . import squarefun as sq
from . import studies as st
from . import verify as vf
from .circfun import Arc

EXIT_OK, EXIT_CONFIG, EXIT_ASSERT = 0, 1, 2
CONFIG_KEYS = {"study", "corpus", "grid", "alpha", "tolerances", "refine", "witnesses", "output"}
OUTPUT_KEYS = {"dir", "prefix", "figures"}
NORMS = ("lp_c", "linf_c", "bmo_c", "bmo_r", "garsia", "h1c-upper", "h1c-lower", "area-h1")


class ConfigError(Exception):
    pass


# -- config ----------------------------------------------------------------------

def _grid_from(doc) -> norms.NormSearchGrid:
    if doc is None:
        return norms.DEFAULT_GRID
    if isinstance(doc, str):
        return norms.NormSearchGrid.parse(doc)
    if isinstance(doc, dict):
        return norms.NormSearchGrid.parse(",".join(f"{k}={v}" for k, v in doc.items()))
    raise ConfigError("grid must be a spec string or a mapping")


def load_config(path, overrides: dict | None = None) -> tuple[st.StudyConfig, dict]:
    """Parse a JSON study config; ``overrides`` (from flags) win over file values."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    if "study" not in doc:
        raise ConfigError("config needs a 'study' field")
    ov = overrides or {}
    corpus = dict(doc.get("corpus") or {})
    for key in ("seed", "count"):
        if ov.get(key) is not None:
            corpus[key] = ov[key]
    output = dict(doc.get("output") or {})
    if set(output) - OUTPUT_KEYS:
        raise ConfigError(f"unknown output keys {sorted(set(output) - OUTPUT_KEYS)}")
    if ov.get("out") is not None:
        output["dir"] = ov["out"]
    output.setdefault("dir", "results")
    output.setdefault("prefix", doc["study"])
    output.setdefault("figures", True)
    if ov.get("no_figures"):
        output["figures"] = False
    kw = {}
    for key in ("alpha", "refine", "witnesses"):
        if key in doc:
            kw[key] = doc[key]
    if ov.get("alpha") is not None:
        kw["alpha"] = ov["alpha"]
    if ov.get("no_refine"):
        kw["refine"] = False
    try:
        kw["grid"] = _grid_from(ov["grid"] if ov.get("grid") is not None else doc.get("grid"))
        cfg = st.StudyConfig.build(doc["study"], corpus=corpus, tolerances=doc.get("tolerances"), **kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg, output


# -- report emission ---------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(float(x.real)), _jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, Arc):
        return {"center": x.center, "radius": x.radius}
    if hasattr(x, "to_dict"):
        return _jsonable(x.to_dict())
    return x


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    """Flat CSV text: columns in first-seen order, complex columns split into re/im."""
    cols, cplx = [], set()
    for r in rows:
        for k, v in r.items():
            if k not in cols:
                cols.append(k)
            if isinstance(v, (complex, np.complexfloating)):
                cplx.add(k)
    header = []
    for k in cols:
        header += [f"{k}_re", f"{k}_im"] if k in cplx else [k]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        line = []
        for k in cols:
            v = r.get(k)
            if k in cplx:
                z = complex(v) if v is not None else None
                line += [_cell(None if z is None else z.real), _cell(None if z is None else z.imag)]
            else:
                line.append(_cell(v))
        w.writerow(line)
    return buf.getvalue()


def build_report(cfg: st.StudyConfig, res: st.StudyResult, config_path=None) -> dict:
    return _jsonable({
        "study": res.name,
        "ok": res.ok,
        "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
        "provenance": {
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "config_file": None if config_path is None else str(config_path),
            "seed": cfg.corpus.seed,
            "config": cfg.describe(),
        },
        "assertions": [a.to_dict() for a in res.assertions],
        "summary": res.summary,
        "reports": {k: r.to_dict() for k, r in res.reports.items()},
        "artifacts": res.artifacts,
    })


def write_outputs(cfg, res, output: dict, config_path=None) -> list[Path]:
    out = Path(output["dir"])
    out.mkdir(parents=True, exist_ok=True)
    prefix = output["prefix"]
    paths = [out / f"{prefix}.json", out / f"{prefix}.csv"]
    paths[0].write_text(json.dumps(build_report(cfg, res, config_path), indent=1, allow_nan=False) + "\n")
    paths[1].write_text(rows_to_csv(res.rows))
    if output.get("figures", True):
        from . import plotting

        png = plotting.write_figure(res, out / f"{prefix}.png")
        if png is not None:
            paths.append(png)
    return paths


# -- commands -----------------------------------------------------------------------

def cmd_run(args) -> int:
    overrides = {"seed": args.seed, "count": args.count, "out": args.out, "alpha": args.alpha,
                 "grid": args.grid, "no_refine": args.no_refine, "no_figures": args.no_figures}
    cfg, output = load_config(args.config, overrides)
    try:
        Path(output["dir"]).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {output['dir']}: {exc}") from exc
    res = st.run_study(cfg)
    try:
        paths = write_outputs(cfg, res, output, args.config)
    except OSError as exc:
        raise ConfigError(f"cannot write outputs: {exc}") from exc
    for a in res.assertions:
        print(f"{'PASS' if a.ok else 'FAIL'} {a.name}  value={a.value} bound={a.bound} {a.detail}".rstrip())
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK if res.ok else EXIT_ASSERT


def _load_function(path) -> tuple:
    """(function, atom or None) from a function or atom JSON file."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    try:
        if "support" in doc and "data" in doc:
            a = atoms.Atom.from_dict(doc)
            return a.data, a
        return cf.from_dict(doc), None
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot parse function in {path}: {exc}") from exc


def _arc_text(arc: Arc) -> str:
    return f"arc(center={arc.center!r}, radius={arc.radius!r})"


def evaluate_norm(f, name: str, p: float = 1.0, alpha: float = sq.DEFAULT_ALPHA,
                  grid: norms.NormSearchGrid = norms.DEFAULT_GRID, atom=None) -> tuple[float, str]:
    """Value of the named norm and a text description of its witness."""
    if name == "lp_c":
        return cf.lp_c_norm(f, p), "none"
    if name == "linf_c":
        return norms.linf_c_norm(f), "none"
    if name in ("bmo_c", "bmo_r"):
        g = f if name == "bmo_c" else cf.adjoint(f)
        star, arc = norms.star_c_norm(g, grid)
        value = norms.bmo_c_norm(g, grid)
        return value, (_arc_text(arc) if star > 0 else "none")
    if name == "garsia":
        value, z = norms.garsia_norm(f, grid)
        return value, (f"z={z!r}" if value > 0 else "none")
    if name == "h1c-upper":
        value, dec = atoms.h1c_upper_bound(f if atom is None else atom, ("dyadic", 4))
        return value, f"decomposition {dec.scheme} with {len(dec.terms)} terms"
    if name == "h1c-lower":
        return atoms.h1c_lower_bound(f, grid=grid), "default witnesses"
    if name == "area-h1":
        return sq.h1c_area_norm(f, alpha), "none"
    raise ConfigError(f"unknown norm {name!r}; choose from {', '.join(NORMS)}")


def cmd_norm(args) -> int:
    f, atom = _load_function(args.file)
    try:
        grid = _grid_from(args.grid)
        value, witness = evaluate_norm(f, args.norm, args.p, args.alpha, grid, atom)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"{args.norm} = {value!r}")
    print(f"witness: {witness}")
    return EXIT_OK


def cmd_corpus(args) -> int:
    try:
        doc = json.loads(Path(args.spec).read_text())
        spec = vf.CorpusSpec.from_dict(doc)
    except OSError as exc:
        raise ConfigError(f"cannot read corpus spec {args.spec}: {exc}") from exc
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad corpus spec: {exc}") from exc
    corpus = vf.corpus_generate(spec)
    out = Path(args.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
        names = []
        for i, item in enumerate(corpus.items):
            name = f"item_{i:05d}.json"
            body = item.to_dict() if isinstance(item, atoms.Atom) else cf.to_dict(item)
            (out / name).write_text(json.dumps(body, indent=1) + "\n")
            names.append(name)
        manifest = {"spec": spec.to_dict(), "items": names, "version": __version__}
        (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write corpus: {exc}") from exc
    print(f"wrote {len(names)} items to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncharm", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"ncharm {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a study from a JSON config")
    run.add_argument("config")
    run.add_argument("--seed", type=int)
    run.add_argument("--count", type=int)
    run.add_argument("--out", help="output directory")
    run.add_argument("--alpha", type=float)
    run.add_argument("--grid", help="grid spec, e.g. centers=128,levels=8")
    run.add_argument("--no-refine", action="store_true", help="skip the refinement rerun")
    run.add_argument("--no-figures", action="store_true")
    run.set_defaults(func=cmd_run)

    nm = sub.add_parser("norm", help="evaluate a norm of a function file")
    nm.add_argument("file")
    nm.add_argument("--norm", required=True, choices=NORMS)
    nm.add_argument("--p", type=float, default=1.0)
    nm.add_argument("--alpha", type=float, default=sq.DEFAULT_ALPHA)
    nm.add_argument("--grid")
    nm.set_defaults(func=cmd_norm)

    co = sub.add_parser("corpus", help="generate a corpus from a JSON spec")
    co.add_argument("spec")
    co.add_argument("-o", "--output", required=True)
    co.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"ncharm: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
