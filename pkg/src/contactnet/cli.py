"""Command-line pipeline.

    contactnet summary|degrees|structure|communities|render|all \
        --vertices vertices.csv --edges edges.csv --out results/ [--config run.toml]

Each subcommand writes ``<out>/<command>.json`` plus CSV/SVG sidecars.
Exit codes: 0 success, 2 invalid configuration, 3 data error, 4 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import enum
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__, kernels
from .community import (
    atypicality_report, cluster_graph, greedy_modularity, recursive_subclustering, resolution_limit,
)
from .degree import (
    DegreeSource, degree_anova, degree_distribution, hill_scan, joint_degree_analysis, k0_scan,
)
from .errors import ConfigError, ContactNetError, DataError, IoFailure, MissingCovariate, NoTriples
from .graph import (
    ContactGraph, articulation_points, clustering_coefficient, connected_components, geodesic_summary,
    giant_component, maximal_cliques,
)
from .io import csv_text, load_dataset_files, present_columns, write_report, write_text
from .layout import LayoutConfig, minimize_layout
from .mixing import assortativity, covariate_partition, detection_lag, mixing_matrix, modularity
from .nullmodel import SwapChainConfig, null_modularity, significance
from .records import NamedBy, Orientation
from .render import render_cluster_svg, render_vertex_svg

log = logging.getLogger("contactnet")

COMMANDS = ("summary", "degrees", "structure", "communities", "render", "all")
DEFAULT_COVARIATES = ("orientation", "region", "age", "detection_mode")
STRATA = (("pooled", None), ("women", Orientation.WOMAN),
          ("heterosexual_men", Orientation.HETEROSEXUAL_MAN), ("msm", Orientation.MSM))


@dataclass
class PipelineConfig:
    vertices: str
    edges: str
    out: str
    seed: int = 0
    replicates: int = 100
    sub_replicates: int | None = None
    restarts: int = 8
    covariates: list[str] = field(default_factory=lambda: list(DEFAULT_COVARIATES))
    oriented: bool = False
    degree_source: str = "declared"
    permutations: int = 10_000
    layout_iterations: int = 500

    def validate(self) -> None:
        for name in ("vertices", "edges", "out"):
            if not getattr(self, name):
                raise ConfigError(f"{name} path is required")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        for name in ("replicates", "restarts"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.sub_replicates is not None and self.sub_replicates < 1:
            raise ConfigError("sub_replicates must be positive")
        if self.permutations < 0 or self.layout_iterations < 0:
            raise ConfigError("permutations and layout_iterations must be non-negative")
        if self.degree_source not in ("declared", "observed"):
            raise ConfigError("degree_source must be 'declared' or 'observed'")


# -- plain-data conversion ---------------------------------------------------


def plain(obj: Any) -> Any:
    """Recursively convert dataclasses, numpy values, enums and tuple keys to JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if not f.name.startswith("_")}
    if isinstance(obj, dict):
        return {(",".join(str(x) for x in k) if isinstance(k, tuple) else str(k)): plain(v)
                for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [plain(x) for x in items]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


class Run:
    """Shared state for one pipeline invocation."""

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.columns = present_columns(cfg.vertices)
        self.g = load_dataset_files(cfg.vertices, cfg.edges)
        self._giant: ContactGraph | None = None

    @property
    def giant(self) -> ContactGraph:
        if self._giant is None:
            self._giant = giant_component(self.g)
        return self._giant

    def has(self, column: str) -> bool:
        return column in self.columns

    def report(self, command: str, results: dict) -> dict:
        body = {
            "schema_version": "1.0",
            "command": command,
            "tool_version": __version__,
            "kernel_backend": kernels.BACKEND,
            "config": plain(dataclasses.asdict(self.cfg)),
            "results": plain(results),
        }
        write_report(body, self.out / f"{command}.json")
        return body

    def sidecar(self, name: str, text: str) -> str:
        write_text(self.out / name, text)
        return name


def _shares(values: list[str], total: int) -> dict:
    counts: dict[str, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return {k: {"count": c, "percent": round(100.0 * c / total, 2) if total else math.nan}
            for k, c in sorted(counts.items())}


# -- subcommands -------------------------------------------------------------


def run_summary(run: Run) -> dict:
    g = run.g
    ci = connected_components(g)
    deg = g.degree
    giant = run.giant
    sizes_hist: dict[int, int] = {}
    for s in ci.sizes:
        sizes_hist[s] = sizes_hist.get(s, 0) + 1
    res = {
        "vertices": g.n,
        "edges": g.m,
        "orientation": _shares([v.orientation.value for v in g.vertices], g.n),
        "men": int(sum(v.orientation in (Orientation.MSM, Orientation.HETEROSEXUAL_MAN) for v in g.vertices)),
        "detection_mode": _shares([v.detection_mode.value for v in g.vertices], g.n),
        "region": _shares([v.region or "U" for v in g.vertices], g.n) if run.has("region") else None,
        "isolated_vertices": int((deg == 0).sum()),
        "components": {
            "count": ci.count,
            "largest_sizes": ci.sizes[:10],
            "size_histogram": dict(sorted(sizes_hist.items())),
            "giant_vertices": giant.n,
            "giant_edges": giant.m,
            "giant_vertex_percent": 100.0 * giant.n / g.n if g.n else math.nan,
            "giant_edge_percent": 100.0 * giant.m / g.m if g.m else math.nan,
        },
    }
    return run.report("summary", res)


def _fits(d) -> dict:
    scan = k0_scan(d)
    return {
        "n_total": d.n_total,
        "excluded_missing": d.excluded,
        "zero_degree": d.counts.get(0, 0),
        "k_max": d.k_max,
        "k0_scan": scan,
    }


def run_degrees(run: Run) -> dict:
    g = run.g
    res: dict[str, Any] = {"strata": {}, "notes": []}
    sources = ["observed"]
    if run.has("declared_partners"):
        sources.insert(0, "declared")
    elif run.cfg.degree_source == "declared":
        res["notes"].append("declared_partners column absent; declared-degree fits skipped")
    primary = run.cfg.degree_source if run.cfg.degree_source in sources else "observed"
    res["primary_source"] = primary
    for source in sources:
        per = {}
        for name, orient in STRATA:
            mask = None if orient is None else np.array([v.orientation is orient for v in g.vertices])
            if mask is not None and not mask.any():
                per[name] = {"note": "stratum empty"}
                continue
            try:
                d = degree_distribution(g, source, mask)
            except MissingCovariate as exc:
                per[name] = {"note": str(exc)}
                continue
            entry = _fits(d)
            if all(e.flag for e in entry["k0_scan"]):
                entry["note"] = "DegenerateTail: no threshold admits a fit"
            tag = f"{source}_{name}"
            entry["k0_scan_csv"] = run.sidecar(
                f"k0_scan_{tag}.csv",
                csv_text(["k0", "alpha"], [(e.k0, e.alpha) for e in entry["k0_scan"]]))
            hs = hill_scan(d)
            entry["hill_scan_csv"] = run.sidecar(
                f"hill_scan_{tag}.csv",
                csv_text(["m", "alpha_paper", "alpha_log"], [(h.m, h.alpha_paper, h.alpha_log) for h in hs]))
            per[name] = entry
        res["strata"][source] = per
    try:
        jd = joint_degree_analysis(g, run.cfg.permutations, run.cfg.seed)
        res["joint_degree"] = {
            "correlation": jd.correlation, "chi2_stat": jd.chi2_stat, "chi2_dof": jd.chi2_dof,
            "chi2_pvalue": jd.chi2_pvalue, "perm_pvalue": jd.perm_pvalue, "bins": jd.bins,
            "small_expected": jd.small_expected,
            "cells_csv": run.sidecar("joint_degree.csv", csv_text(
                ["k_ego", "k_alter", "count"], [(a, b, c) for (a, b), c in sorted(jd.cells.items())])),
        }
    except DataError as exc:
        res["joint_degree"] = {"note": str(exc)}
    res["anova"] = {}
    for cov in ("orientation", "detection_mode", "region"):
        try:
            res["anova"][cov] = degree_anova(g, cov, DegreeSource(primary))
        except MissingCovariate as exc:
            res["anova"][cov] = {"note": str(exc)}
    return run.report("degrees", res)


def _geodesics(g: ContactGraph) -> dict:
    s = geodesic_summary(g)
    return {"mean_L": s.mean_L, "mean_L_conventional": s.mean_L_conventional,
            "harmonic_mean": s.harmonic_mean, "diameter": s.diameter_delta,
            "histogram": s.per_pair_histogram}


def run_structure(run: Run) -> dict:
    g, giant = run.g, run.giant
    res: dict[str, Any] = {"geodesics": {"whole_graph": _geodesics(g), "giant": _geodesics(giant)}}
    oriented = g.named_by is not None and any(nb is not NamedBy.UNKNOWN for nb in g.named_by)
    if oriented:
        og = geodesic_summary(giant, oriented=True)
        res["geodesics"]["giant_oriented"] = {
            "mean_L": og.mean_L, "harmonic_mean": og.harmonic_mean, "diameter": og.diameter_delta}
    elif run.cfg.oriented:
        res["geodesics"]["giant_oriented"] = {"note": "no naming direction in the edge table"}
    cuts = articulation_points(g)
    res["articulation_points"] = {"count": len(cuts), "giant_count": len(articulation_points(giant)),
                                  "ids": sorted(cuts)}
    try:
        res["clustering_coefficient"] = clustering_coefficient(g)
    except NoTriples as exc:
        res["clustering_coefficient"] = math.nan
        res["clustering_note"] = str(exc)
    cliques = maximal_cliques(g)
    by_size: dict[int, int] = {}
    for c in cliques:
        by_size[len(c)] = by_size.get(len(c), 0) + 1
    top = len(cliques[0]) if cliques else 0
    res["maximal_cliques"] = {"count_by_size": dict(sorted(by_size.items(), reverse=True)),
                              "largest": [c for c in cliques if len(c) == top and top >= 3]}
    mixing = {}
    for cov in run.cfg.covariates:
        try:
            part = covariate_partition(g, cov)
            mm = mixing_matrix(g, part, skip_unassigned=True)
            entry = {"groups": part.labels, "edges_counted": mm.edges, "modularity": modularity(mm),
                     "matrix_csv": mm.to_csv()}
            try:
                entry["assortativity"] = assortativity(mm)
            except DataError as exc:
                entry["assortativity"] = math.nan
                entry["note"] = str(exc)
            mixing[cov] = entry
        except (MissingCovariate, DataError) as exc:
            mixing[cov] = {"note": str(exc)}
    res["mixing"] = mixing
    try:
        lag = detection_lag(g)
        res["detection_lag"] = {"by_mode": lag["by_mode"], "excluded_edges": lag["excluded_edges"]}
    except MissingCovariate as exc:
        res["detection_lag"] = {"note": str(exc)}
    return run.report("structure", res)


def _cluster_layout(cg, seed: int, iterations: int):
    return minimize_layout(cg.as_graph(), LayoutConfig(delta=1.0, max_iterations=max(iterations, 1), seed=seed))


def run_communities(run: Run) -> dict:
    cfg = run.cfg
    giant = run.giant
    if giant.m < 2:
        return run.report("communities", {"giant_vertices": giant.n, "giant_edges": giant.m,
                                          "note": "giant component has fewer than two edges"})
    part = greedy_modularity(giant, cfg.seed, cfg.restarts)
    nd = null_modularity(giant, SwapChainConfig.for_graph(giant, cfg.replicates, cfg.seed), cfg.restarts)
    verdict = significance(part.Q, nd)
    cg = cluster_graph(giant, part, "orientation")
    res: dict[str, Any] = {
        "giant_vertices": giant.n,
        "giant_edges": giant.m,
        "modularity": part.Q,
        "clusters": part.J,
        "intra_cluster_edges": sum(cg.intra_edges),
        "inter_cluster_edges": cg.inter_edges,
        "cluster_links": len(cg.links),
        "single_links": sum(1 for w in cg.links.values() if w == 1),
        "resolution_limit": resolution_limit(giant.m),
        "null": {"replicates": cfg.replicates, "mean": nd.mean, "max": nd.max,
                 "significant": verdict.significant, "exceedance": verdict.exceedance,
                 "samples_csv": run.sidecar("null_modularity.csv", nd.to_csv())},
        "partition_csv": run.sidecar("partition.csv", part.to_csv(giant)),
        "cluster_nodes_csv": run.sidecar("cluster_nodes.csv", cg.nodes_csv(["F", "HM", "MSM", "U"])),
        "cluster_links_csv": run.sidecar("cluster_links.csv", cg.links_csv()),
    }
    atyp = None
    try:
        atyp = atypicality_report(giant, part, "orientation", seed=cfg.seed)
        res["atypicality"] = {
            "categories": atyp.categories,
            "reference": atyp.reference,
            "clusters_p_below_0_05": sum(1 for r in atyp.results if r.pvalue < 0.05),
            "group_clusters": atyp.group_clusters,
            "group_sizes": atyp.group_sizes,
            "inter_group_edges": atyp.inter_group_edges,
            "per_cluster": [{"cluster": c, "size": cg.sizes[c], "label": atyp.labels[c], "pvalue": r.pvalue,
                             "statistic": r.statistic, "mc_pvalue": r.mc_pvalue}
                            for c, r in enumerate(atyp.results)],
        }
    except MissingCovariate as exc:
        res["atypicality"] = {"note": str(exc)}
    subs = recursive_subclustering(giant, part, cfg.sub_replicates or cfg.replicates, cfg.seed, cfg.restarts)
    limit = res["resolution_limit"]
    res["substructure"] = [{
        "cluster": s.parent_cluster, "vertices": s.n_vertices, "edges": s.n_edges,
        "subclusters": s.subclusters, "sub_modularity": s.subpartition.Q if s.subpartition else math.nan,
        "null_mean": s.null_mean, "null_max": s.null_max, "significant": s.significant,
        "below_resolution": s.below_resolution, "note": s.note,
        "orientation_pvalue": atyp.results[s.parent_cluster].pvalue if atyp else None,
        "type": atyp.labels[s.parent_cluster] if atyp else None,
    } for s in subs]
    res["clusters_below_resolution"] = sum(1 for e in cg.intra_edges if e < limit)
    if part.J >= 2:
        pos = _cluster_layout(cg, cfg.seed, cfg.layout_iterations)
        figs = {"clusters": run.sidecar("clusters.svg", render_cluster_svg(cg, pos))}
        if atyp is not None:
            figs["pvalues"] = run.sidecar("clusters_pvalues.svg", render_cluster_svg(
                cg, pos, pvalues=[r.pvalue for r in atyp.results]))
            figs["groups"] = run.sidecar("clusters_groups.svg", render_cluster_svg(cg, pos, groups=atyp.labels))
        res["figures"] = figs
    return run.report("communities", res)


def run_render(run: Run) -> dict:
    giant = run.giant
    cfg = run.cfg
    res: dict[str, Any] = {}
    if giant.n >= 2:
        pos = minimize_layout(giant, LayoutConfig(delta=1.0, max_iterations=max(cfg.layout_iterations, 1),
                                                  seed=cfg.seed))
        res = {"vertices": giant.n, "edges": giant.m, "final_energy": pos.final_energy,
               "converged": pos.converged, "iterations": pos.iterations,
               "figure": run.sidecar("giant_layout.svg", render_vertex_svg(giant, pos, "orientation"))}
    else:
        res = {"note": "giant component has fewer than two vertices"}
    return run.report("render", res)


RUNNERS: dict[str, Callable[[Run], dict]] = {
    "summary": run_summary,
    "degrees": run_degrees,
    "structure": run_structure,
    "communities": run_communities,
    "render": run_render,
}


# -- argument handling -------------------------------------------------------


def _load_toml(path: str) -> dict:
    try:
        import tomllib  # type: ignore[import-not-found]
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="contactnet", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="TOML file with default values; flags take precedence")
    p.add_argument("--vertices")
    p.add_argument("--edges")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--replicates", type=int)
    p.add_argument("--sub-replicates", type=int, dest="sub_replicates")
    p.add_argument("--restarts", type=int)
    p.add_argument("--covariate", action="append", dest="covariates",
                   help="covariate for mixing analysis (repeatable)")
    p.add_argument("--oriented", action="store_true", default=None)
    p.add_argument("--degree-source", choices=("declared", "observed"), dest="degree_source")
    p.add_argument("--permutations", type=int)
    p.add_argument("--layout-iterations", type=int, dest="layout_iterations")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    values: dict[str, Any] = _load_toml(args.config) if args.config else {}
    for f in dataclasses.fields(PipelineConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    missing = [k for k in ("vertices", "edges", "out") if not values.get(k)]
    if missing:
        raise ConfigError(f"missing required setting(s): {', '.join(missing)}")
    try:
        cfg = PipelineConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        for path in (cfg.vertices, cfg.edges):
            if not os.path.exists(path):
                raise IoFailure(f"no such file: {path}")
        run = Run(cfg)
        commands = list(RUNNERS) if args.command == "all" else [args.command]
        for name in commands:
            log.info("running %s", name)
            RUNNERS[name](run)
    except ConfigError as exc:
        print(f"contactnet: configuration error: {exc}", file=sys.stderr)
        return 2
    except ContactNetError as exc:
        print(f"contactnet: data error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"contactnet: internal error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
