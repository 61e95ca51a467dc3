"""Command-line front end: projgasket {gen,verify,dims,export,section,reference}."""
from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import fractal_analysis as fa
from .lattice_tree import (Basis, NodeCapError, TreeOverflowError, children_array, edge_section,
                           fibonacci_section, format_index, int_det, iter_levels, level_indices,
                           resolve_basis, simplex_basis)
from .proj_geometry import Chart, ChartError, default_chart, level_measures
from .dimension_lab import (FitRangeError, ResolutionError, boxcount_barycenters, boxcount_set,
                            build_ledger, count_samples, default_cloud_range, default_set_range,
                            eps_schedule, loglog_fit, midpoint_children, midpoint_levels,
                            minkowski_band_n3, minkowski_table, reference_root)


def fmt(x) -> str:
    """12 significant digits, '.' decimal; integers verbatim."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


@dataclass
class RunConfig:
    n: int = 2
    basis: str = ""
    depth: int | None = None
    chart: str = ""
    lmin: int | None = None
    lmax: int | None = None
    eps_base: float = 1.2
    mmax: int | None = None
    cap: int | None = 50_000_000
    seed: int = 0
    out: str | None = None
    workers: int = 1
    reference: str | None = None

    def root(self) -> Basis:
        if self.reference:
            return reference_root({"sierpinski": 2, "tetrix": 3}[self.reference])
        if self.basis:
            return resolve_basis(self.basis)
        return simplex_basis(self.n)

    def depth_or(self, default: int) -> int:
        return default if self.depth is None else self.depth

    def child_rule(self):
        return midpoint_levels if self.reference else None

    def resolve_chart(self, root: Basis) -> Chart:
        if self.chart:
            return Chart.parse(self.chart, len(root), root)
        return default_chart(root)

    def to_argv(self) -> list[str]:
        """Flags that rebuild this config (parse-print round trip)."""
        defaults = RunConfig()
        argv = []
        for k, v in asdict(self).items():
            if v == getattr(defaults, k):
                continue
            flag = "--" + k.replace("_", "-")
            argv += [flag, "none" if v is None else str(v)]
        return argv

    @classmethod
    def from_namespace(cls, ns) -> "RunConfig":
        return cls(**{k: getattr(ns, k) for k in cls.__dataclass_fields__ if hasattr(ns, k)})


def _cap(text):
    return None if text.lower() == "none" else int(text)


def _opt_int(text):
    return None if text.lower() == "none" else int(text)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, default=2, help="dimension (root defaults to the corner simplex basis)")
    p.add_argument("--basis", default="", help="named root (simplex2, simplex3, ET, EC, n1, ...) or rows 'a,b,c;d,e,f;...'")
    p.add_argument("--depth", type=int, default=None, help="tree depth (default depends on the command)")
    p.add_argument("--chart", default="", help="axis number, 'sum' or 'simplex'; default picks one per root")
    p.add_argument("--cap", type=_cap, default=50_000_000, help="node/pair cap, 'none' for unlimited")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (or prefix for dims); stdout if omitted")
    p.add_argument("--plot", action="store_true", help="also write PNG figures next to --out")


# -- writers -------------------------------------------------------------------

def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(v if isinstance(v, str) else fmt(v) for v in r) + "\n")
    return buf.getvalue()


def _png(out: str | None, suffix: str) -> str:
    if out is None:
        raise SystemExit("--plot needs --out")
    p = Path(out)
    return str(p.with_name(p.stem + suffix + ".png"))


# -- gen / reference -------------------------------------------------------------

def body_table(root: Basis, depth: int, chart: Chart, cap=None, child_rule=None):
    """Header and rows of the body table in natural tree order."""
    n = root.n
    header = ["multiindex"] + [f"b{k}" for k in range(n + 1)] + ["b_inf", "b_2", "volume", "diameter", "radius"]
    if n == 3:
        header.append("surface")
    want = ("volume", "surface", "radius", "diameter") if n > 1 else ("volume",)
    levels = child_rule(root, depth, (), cap) if child_rule else iter_levels(root, depth, cap=cap)
    rows = []
    for d, bases in levels:
        det = abs(int_det(bases[0].tolist()))
        meas = level_measures(bases, chart, det, want=want)
        bary = bases.sum(axis=1)
        idx = level_indices(n, d)
        for p in range(len(bases)):
            b = bary[p]
            row = ["".join(map(str, idx[p]))] + [int(x) for x in b]
            row += [int(np.abs(b).max()), float(np.sqrt((b.astype(float) ** 2).sum()))]
            if n == 1:
                row += [0.0, 0.0, 0.0]
            else:
                row += [meas["volume"][p], meas["diameter"][p], meas["radius"][p]]
            if n == 3:
                row.append(meas["surface"][p])
            rows.append(row)
    return header, rows


def cmd_gen(cfg: RunConfig, plot: bool) -> int:
    root = cfg.root()
    chart = cfg.resolve_chart(root)
    depth = cfg.depth_or(4)
    header, rows = body_table(root, depth, chart, cfg.cap, cfg.child_rule())
    _write(_csv(header, rows), cfg.out)
    if plot:
        from .plotting import plot_cloud
        pts, norms = _bary_cloud(root, depth, chart, cfg.child_rule())
        plot_cloud(pts, norms, _png(cfg.out, ""), title=f"barycenters, depth {depth}")
    return 0


def _bary_cloud(root, depth, chart, child_rule=None):
    levels = child_rule(root, depth, ()) if child_rule else iter_levels(root, depth)
    pts, norms = [], []
    for _, bases in levels:
        B = bases.sum(axis=1)
        H = chart.homogeneous(B)
        ok = H[:, -1] != 0
        pts.append(H[ok, :-1] / H[ok, -1:])
        norms.append(np.sqrt((B[ok].astype(float) ** 2).sum(axis=1)))
    return np.concatenate(pts), np.concatenate(norms)


# -- verify ------------------------------------------------------------------------

def cmd_verify(cfg: RunConfig, suite: str, corrupt: str | None) -> int:
    root = resolve_basis(cfg.basis) if cfg.basis else None
    reports = fa.run_suite(suite, n=cfg.n, depth=cfg.depth, seed=cfg.seed, root=root, corrupt=corrupt)
    _write(fa.reports_json(reports) + "\n", cfg.out)
    return 0 if all(r.ok for r in reports) else 1


# -- dims -----------------------------------------------------------------------------

def _fit_range(text, default):
    if not text:
        return default()
    lo, hi = text.split(":")
    return int(lo), int(hi)


def cmd_dims(cfg: RunConfig, method: str, fit: str, plot: bool) -> int:
    root = cfg.root()
    chart = cfg.resolve_chart(root)
    rule = cfg.child_rule()
    extra_cols = None
    n = root.n
    if method in ("boxset", "boxbary"):
        lmin = cfg.lmin if cfg.lmin is not None else 0
        if method == "boxset":
            depth = cfg.depth_or(12 if n == 2 else 6)
            lmax = cfg.lmax if cfg.lmax is not None else depth
            counts = boxcount_set(root, depth, range(lmin, lmax + 1), chart, workers=cfg.workers,
                                  cap=cfg.cap, child_rule=rule)
            info = {}
            rng = _fit_range(fit, lambda: default_set_range(sorted(counts)))
        else:
            depth = cfg.depth_or(13 if n == 2 else 8)
            lmax = cfg.lmax if cfg.lmax is not None else 16
            counts, dropped = boxcount_barycenters(root, depth, range(lmin, lmax + 1), chart,
                                                   workers=cfg.workers, child_rule=rule)
            npts = sum(len(root) ** d for d in range(depth + 1)) - dropped
            info = {"points": npts, "dropped_at_infinity": dropped}
            rng = _fit_range(fit, lambda: default_cloud_range(counts, npts))
        est = loglog_fit(count_samples(counts), rng, method=method)
        est.extra.update(info)
        est.extra.update({"root": root.format(), "chart": chart.format(), "depth": depth})
        rows = [[l, 2.0 ** -l, counts[l]] for l in sorted(counts)]
        table = _csv(["l_or_m", "epsilon", "count_or_volume"], rows)
        result = est.as_dict()
    elif method == "minkowski":
        mmax = cfg.mmax if cfg.mmax is not None else (50 if root.n == 2 else 48)
        ledger = build_ledger(root, cfg.eps_base ** -mmax, chart,
                              children=midpoint_children if rule else children_array, cap=cfg.cap)
        tab = minkowski_table(ledger, eps_schedule(cfg.eps_base, mmax))
        slope, icept = ledger.decay_exponent()
        result = {"method": "minkowski", "root": root.format(), "chart": chart.format(),
                  "eps_base": cfg.eps_base, "m_max": mmax, "bodies": len(ledger),
                  "radius_decay_exponent": slope, "radius_decay_intercept": icept,
                  "estimate": tab[-1]["dimension"]}
        if root.n == 3:
            result["pointwise_band"] = [tab[-1]["dimension"], tab[-1]["dimension_upper"]]
            result["envelope"] = minkowski_band_n3(ledger)
            result["band"] = [result["envelope"]["lower"], result["envelope"]["upper"]]
            extra_cols = ["upper_volume"]
        rows = [[r["m"], r["epsilon"], r["volume"]] + ([r["upper"]] if extra_cols else []) for r in tab]
        table = _csv(["l_or_m", "epsilon", "count_or_volume"] + (extra_cols or []), rows)
    else:
        raise SystemExit(f"unknown method {method}")
    js = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if cfg.out is None:
        sys.stdout.write(table + "\n" + js)
    else:
        _write(table, cfg.out + ".csv")
        _write(js, cfg.out + ".json")
    if plot:
        from . import plotting
        if method == "minkowski":
            plotting.plot_minkowski(tab, _png(cfg.out, "_dimension"))
            plotting.plot_radii(ledger.radius, _png(cfg.out, "_radii"), slope, icept)
        else:
            plotting.plot_loglog(est, _png(cfg.out, "_loglog"))
    return 0


# -- export ------------------------------------------------------------------------

def cmd_export(cfg: RunConfig, fmt_: str, what: str, plot: bool) -> int:
    root = cfg.root()
    if fmt_ == "ply" and root.n != 3:
        raise ValueError("ply export needs n = 3")
    chart = cfg.resolve_chart(root)
    rule = cfg.child_rule()
    depth = cfg.depth_or(5)
    levels = rule(root, depth, (), cfg.cap) if rule else iter_levels(root, depth, cap=cfg.cap)
    labels, pts, norms = [], [], []
    for d, bases in levels:
        idx = ["".join(map(str, r)) for r in level_indices(root.n, d)]
        if what == "barycenters":
            V = bases.sum(axis=1)[:, None, :]
        else:
            m = len(root)
            V = np.stack([bases[:, i] + bases[:, j] for i in range(m) for j in range(i + 1, m)], axis=1)
        N, k, _ = V.shape
        flat = V.reshape(N * k, -1)
        H = chart.homogeneous(flat)
        ok = H[:, -1] != 0
        P = np.full((N * k, root.n), np.nan)
        P[ok] = H[ok, :-1] / H[ok, -1:]
        keep = ok
        labels += [idx[p // k] for p in np.nonzero(keep)[0]]
        pts.append(P[keep])
        norms.append(np.sqrt((flat[keep].astype(float) ** 2).sum(axis=1)))
    pts = np.concatenate(pts)
    norms = np.concatenate(norms)
    cols = ["x", "y", "z"][:root.n]
    if fmt_ == "csv":
        text = _csv(["multiindex"] + cols + ["b_2"],
                    [[lab] + list(p) + [v] for lab, p, v in zip(labels, pts, norms)])
    elif fmt_ == "json":
        text = json.dumps({"root": root.format(), "chart": chart.format(), "what": what,
                           "points": [{"multiindex": lab, "coords": [float(fmt(x)) for x in p],
                                       "b_2": float(fmt(v))} for lab, p, v in zip(labels, pts, norms)]},
                          indent=1) + "\n"
    else:
        head = ["ply", "format ascii 1.0", f"element vertex {len(pts)}",
                "property double x", "property double y", "property double z",
                "property double b_2", "end_header"]
        body = [" ".join(fmt(x) for x in list(p) + [v]) for p, v in zip(pts, norms)]
        text = "\n".join(head + body) + "\n"
    _write(text, cfg.out)
    if plot:
        from .plotting import plot_cloud
        plot_cloud(pts, norms, _png(cfg.out, ""), title=what)
    return 0


# -- section -----------------------------------------------------------------------

def cmd_section(cfg: RunConfig, kind: str, start: int, direction: int, length: int, plot: bool) -> int:
    root = cfg.root()
    chart = cfg.resolve_chart(root)
    if kind == "fibonacci":
        sec = fibonacci_section(root, start, direction, length)
    else:
        sec = edge_section(root, start, length)
    n = root.n
    header = ["step", "multiindex"] + [f"b{k}" for k in range(n + 1)] + [f"v{k}" for k in range(n)]
    rows, pts = [], []
    for step, (idx, b) in enumerate(sec):
        bary = [sum(col) for col in zip(*b.vectors)]
        p = chart.project(bary)
        pts.append(p)
        rows.append([step, format_index(idx)] + bary + list(p))
    _write(_csv(header, rows), cfg.out)
    if plot:
        from .plotting import plot_section
        plot_section(np.array(pts), _png(cfg.out, ""))
    return 0


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="projgasket", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="body table in natural tree order")
    _common(p)

    p = sub.add_parser("reference", help="body table of the Sierpinski / Tetrix reference")
    _common(p)
    p.add_argument("kind", choices=["sierpinski", "tetrix"])

    p = sub.add_parser("verify", help="run a check suite; exit 0 iff no violations")
    _common(p)
    p.add_argument("suite", choices=fa.SUITES)
    p.add_argument("--corrupt", default=None, help="multi-index whose volume is corrupted (fault injection)")

    p = sub.add_parser("dims", help="dimension estimate: boxset, boxbary or minkowski")
    _common(p)
    p.add_argument("method", choices=["boxset", "boxbary", "minkowski"])
    p.add_argument("--reference", choices=["sierpinski", "tetrix"], default=None)
    p.add_argument("--lmin", type=_opt_int, default=None)
    p.add_argument("--lmax", type=_opt_int, default=None)
    p.add_argument("--fit", default="", help="fit range lo:hi in l (default: automatic)")
    p.add_argument("--eps-base", dest="eps_base", type=float, default=1.2)
    p.add_argument("--mmax", type=_opt_int, default=None, help="finest eps = base^-mmax")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("export", help="point clouds as csv, json or ply")
    _common(p)
    p.add_argument("--format", dest="fmt", choices=["csv", "json", "ply"], default="csv")
    p.add_argument("--what", choices=["barycenters", "bodies"], default="barycenters")
    p.add_argument("--reference", choices=["sierpinski", "tetrix"], default=None)

    p = sub.add_parser("section", help="Fibonacci or edge section table")
    _common(p)
    p.add_argument("--kind", choices=["fibonacci", "edge"], default="fibonacci")
    p.add_argument("--start", type=int, default=1)
    p.add_argument("--direction", type=int, choices=[1, -1], default=1)
    p.add_argument("--length", type=int, default=10)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    cfg = RunConfig.from_namespace(ns)
    try:
        if ns.command == "gen":
            return cmd_gen(cfg, ns.plot)
        if ns.command == "reference":
            cfg.reference = ns.kind
            return cmd_gen(cfg, ns.plot)
        if ns.command == "verify":
            return cmd_verify(cfg, ns.suite, ns.corrupt)
        if ns.command == "dims":
            return cmd_dims(cfg, ns.method, ns.fit, ns.plot)
        if ns.command == "export":
            return cmd_export(cfg, ns.fmt, ns.what, ns.plot)
        if ns.command == "section":
            return cmd_section(cfg, ns.kind, ns.start, ns.direction, ns.length, ns.plot)
    except (TreeOverflowError, NodeCapError, ChartError, ResolutionError, FitRangeError, ValueError) as exc:
        print(f"projgasket: error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
