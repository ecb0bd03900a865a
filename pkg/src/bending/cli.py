"""Command line entry point: ``bend classify|volume|plot|sandwich|bendcheck``.

Exit codes: 0 success, 1 input error, 2 degeneracy detected, 3 numerical
failure.  Outputs contain no timestamps and use sorted JSON keys, so equal
inputs and seeds give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import projective
from .classify import PeripheralData, affine_circle_developing, classify, horoball_sandwich
from .cusps import CuspLattice, cusp_volume_estimate, omega_x_section
from .domains import Epigraph, Paraboloid
from .errors import BendingError, IllFormedBending, InputError, UnsupportedPlot
from .representation import BendingData, bend, irreducibility_heuristic
from .svg import bent_slice_curves, circle_curves, polylines_svg

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("classify", "volume", "plot", "sandwich", "bendcheck")


@dataclass
class RunConfig:
    command: str
    input: Path
    out: Path
    seed: int = 0
    t: list = field(default_factory=lambda: [0.5])
    tol: float | None = None


def _t_values(raw):
    out = []
    for item in raw:
        out.extend(float(x) for x in str(item).replace(",", " ").split())
    return out


def _fmt_t(t):
    return f"{t:+.3f}".replace("+", "p").replace("-", "m").replace(".", "_")


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def dump_json(doc):
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_classify(cfg):
    doc = load_json(cfg.input)
    cusps = doc["cusps"] if "cusps" in doc else [doc]
    status = EXIT_OK
    written = []
    for raw in cusps:
        raw = dict(raw)
        raw.setdefault("dimension", doc.get("dimension"))
        data = PeripheralData.from_dict(raw)
        for t in cfg.t:
            kw = {} if cfg.tol is None else {"tol": cfg.tol}
            report = classify(data, t, **kw)
            stem = f"{data.name or 'cusp'}_t{_fmt_t(t)}"
            written.append(write_atomic(cfg.out / f"{stem}.json", report.to_json()))
            print(f"{data.name}\tt={t:g}\t{report.kind}\tbeta={report.beta:.12g}")
            if report.degenerate:
                status = EXIT_DEGENERATE
                written.append(write_atomic(cfg.out / f"{stem}_witness.json",
                                            dump_json(report.witness)))
    return status


def _volume_csv(series):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["X", "value", "stderr", "samples", "seed", "flag"])
    for X, est in zip(series.X, series.estimates):
        writer.writerow([repr(float(X)), repr(est.value), repr(est.stderr), est.samples,
                         est.seed, ""])
    total = float(np.sum(series.values))
    total_err = float(np.sqrt(np.sum(series.stderrs ** 2)))
    writer.writerow(["total", repr(total), repr(total_err),
                     sum(e.samples for e in series.estimates), "", series.flag or "none"])
    return buf.getvalue()


def cmd_volume(cfg):
    doc = load_json(cfg.input)
    try:
        kind, d = doc["kind"], int(doc["dimension"])
        lattice = CuspLattice(kind, doc.get("basis", np.eye(d - 1)), doc.get("origin"))
    except KeyError as exc:
        raise InputError(f"missing field {exc.args[0]!r}") from exc
    series = cusp_volume_estimate(kind, d, lattice, X0=doc.get("X0"),
                                  shells=int(doc.get("shells", 9)),
                                  samples=int(doc.get("samples", 10**6)), seed=cfg.seed)
    path = write_atomic(cfg.out / f"volume_{kind}_d{d}_seed{cfg.seed}.csv", _volume_csv(series))
    print(f"{path}\tflag={series.flag or 'none'}")
    return EXIT_OK


def cmd_plot(cfg):
    doc = load_json(cfg.input)
    kind = doc.get("plot")
    if kind == "slice":
        if int(doc.get("dimension", 3)) < 2:
            raise UnsupportedPlot("slices need d >= 2")
        curves, title = bent_slice_curves(0.0), "bent domain slice v = 0"
    elif kind == "section":
        sec = omega_x_section(np.array(doc["point"], float))
        curves, title = bent_slice_curves(sec.domain.level), "omega_x section"
    elif kind == "circle":
        ts = cfg.t if "t" not in doc else [float(doc["t"])]
        circle = affine_circle_developing(doc.get("crossings", []), ts[0])
        curves, title = circle_curves(circle), f"affine developing map t={ts[0]:g}"
    else:
        raise UnsupportedPlot(f"unsupported plot request {kind!r}")
    path = write_atomic(cfg.out / f"plot_{kind}.svg", polylines_svg(curves, title=title))
    print(path)
    return EXIT_OK


def sandwich_domain(desc, kind, d, t):
    typ = desc.get("type", "paraboloid")
    if typ == "paraboloid":
        return Paraboloid(d)
    if typ == "bent":
        from .domains import BentDomain
        return BentDomain(d)
    amp = float(desc.get("amplitude", desc.get("amplitude_per_t", 0.0) * t))

    if typ == "perturbed":
        def height(w):
            return 0.5 * np.sum(w * w, axis=-1) + amp * np.sin(2 * np.pi * w[..., -1])
        return Epigraph(d, height)
    if typ == "bent_perturbed":
        def height(w):
            y, v = w[..., 0], w[..., 1:]
            return (0.5 * np.sum(v * v, axis=-1) - np.log(y)
                    + amp * np.sin(2 * np.pi * np.log(y)) * np.cos(2 * np.pi * v[..., 0]))
        return Epigraph(d, height)
    raise InputError(f"unknown domain type {typ!r}")


def cmd_sandwich(cfg):
    doc = load_json(cfg.input)
    kind, d = doc["kind"], int(doc["dimension"])
    lattice = CuspLattice(kind, doc.get("basis", np.eye(d - 1)))
    rows = {}
    for t in cfg.t:
        dom = sandwich_domain(doc.get("domain", {}), kind, d, t)
        rep = horoball_sandwich(dom, kind, lattice, grid=int(doc.get("grid", 64)))
        rows[_fmt_t(t)] = {"t": t, "D": rep.D, "E": rep.E, "margin": rep.margin,
                           "periodicity_residual": rep.periodicity_residual, "grid": rep.grid}
        print(f"t={t:g}\tD={rep.D:.6g}\tE={rep.E:.6g}")
    write_atomic(cfg.out / "sandwich.json", dump_json({"kind": kind, "dimension": d,
                                                       "seed": cfg.seed, "reports": rows}))
    return EXIT_OK


def cmd_bendcheck(cfg):
    data = BendingData.from_dict(load_json(cfg.input))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "relator", "residual", "seed"])
    status = EXIT_OK
    tol = 1e-8 if cfg.tol is None else cfg.tol
    for t in cfg.t:
        rep = bend(data, t, tol=tol, check=False)
        for i, r in enumerate(rep.relator_residuals()):
            writer.writerow([repr(float(t)), i, repr(r), cfg.seed])
            if r > tol:
                status = EXIT_NUMERIC
        irr = irreducibility_heuristic(rep, words=100, seed=cfg.seed)
        print(f"t={t:g}\tmax residual={max(rep.relator_residuals(), default=0.0):.3g}\t{irr.summary}")
    write_atomic(cfg.out / f"bendcheck_{data.name or data.case}.csv", buf.getvalue())
    if status == EXIT_NUMERIC:
        raise IllFormedBending("relator residual above tolerance")
    return status


DISPATCH = {"classify": cmd_classify, "volume": cmd_volume, "plot": cmd_plot,
            "sandwich": cmd_sandwich, "bendcheck": cmd_bendcheck}


def build_parser():
    parser = argparse.ArgumentParser(prog="bend", description="Bending deformations toolkit")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", required=True, type=Path, help="JSON configuration")
    parser.add_argument("--t", nargs="+", default=["0.5"], help="bending parameters")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=Path("out"))
    parser.add_argument("--tol", type=float, default=None, help="override tolerances")
    return parser


_NUMBERS = re.compile(r"^[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?(,[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)*$")


def _attach_negative_t(argv):
    """Fold the numbers after ``--t`` into ``--t=a,b,...``.

    Without this argparse reads a value such as ``-0.5`` as an option.
    """
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--t":
            vals = []
            while i + 1 < len(argv) and _NUMBERS.match(argv[i + 1]):
                i += 1
                vals.append(argv[i])
            out.append("--t=" + ",".join(vals) if vals else tok)
        else:
            out.append(tok)
        i += 1
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_negative_t(argv))
    try:
        cfg = RunConfig(args.command, args.input, args.out, args.seed,
                        _t_values(args.t), args.tol)
    except ValueError as exc:
        print(f"error: bad --t value: {exc}", file=sys.stderr)
        return EXIT_INPUT
    old_tol = projective.TOLERANCE
    try:
        return DISPATCH[cfg.command](cfg)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BendingError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (KeyError, TypeError, ValueError) as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        projective.set_tolerance(old_tol)


if __name__ == "__main__":
    sys.exit(main())
