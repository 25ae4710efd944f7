"""Mixing matrices, modularity, assortativity and covariate homogeneity."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import DegenerateMatrix, EmptyGraph, EmptyObservation, MissingCovariate, UnassignedVertex
from .graph import ContactGraph
from .records import NamedBy, Orientation

AGE_BINS = tuple(range(15, 65, 5))  # [15,20), ..., [60,65)


def age_group(age: int | None) -> str | None:
    if age is None:
        return None
    if age < AGE_BINS[0]:
        return f"<{AGE_BINS[0]}"
    if age >= AGE_BINS[-1] + 5:
        return f"{AGE_BINS[-1] + 5}+"
    lo = AGE_BINS[0] + 5 * ((age - AGE_BINS[0]) // 5)
    return f"[{lo},{lo + 5})"


def covariate_labels(g: ContactGraph, covariate: str) -> list[str | None]:
    """Per-vertex category label for a covariate; ``None`` marks missing."""
    out: list[str | None] = []
    for v in g.vertices:
        if covariate == "orientation":
            lab = None if v.orientation is Orientation.UNKNOWN else v.orientation.value
        elif covariate == "detection_mode":
            lab = None if v.detection_mode.value == "U" else v.detection_mode.value
        elif covariate == "region":
            lab = v.region
        elif covariate in ("age", "age_at_detection"):
            lab = age_group(v.age_at_detection)
        elif covariate == "declared_partners":
            lab = None if v.declared_partners is None else str(v.declared_partners)
        else:
            raise MissingCovariate(f"unknown covariate {covariate!r}")
        out.append(lab)
    return out


@dataclass(frozen=True)
class CovariatePartition:
    labels: list[str]
    assignment: np.ndarray  # group index per vertex, -1 when unassigned

    @property
    def J(self) -> int:
        return len(self.labels)


def covariate_partition(g: ContactGraph, covariate: str) -> CovariatePartition:
    labs = covariate_labels(g, covariate)
    groups = sorted({x for x in labs if x is not None})
    if not groups:
        raise MissingCovariate(f"covariate {covariate!r} has no values")
    index = {lab: i for i, lab in enumerate(groups)}
    assign = np.array([index[x] if x is not None else -1 for x in labs], dtype=np.int64)
    return CovariatePartition(groups, assign)


@dataclass(frozen=True)
class MixingMatrix:
    m: np.ndarray
    labels: list[str]
    edges: int  # number of edges counted

    @property
    def row_sums(self) -> np.ndarray:
        return self.m.sum(axis=1)

    def to_csv(self) -> str:
        rows = [",".join([""] + self.labels)]
        for lab, row in zip(self.labels, self.m):
            rows.append(",".join([lab] + [repr(float(x)) for x in row]))
        return "\n".join(rows) + "\n"


def mixing_counts(g: ContactGraph, assignment: np.ndarray, J: int, skip_unassigned: bool = False):
    """Integer matrix ``E`` with ``E / (2m)`` the mixing matrix, plus ``m``."""
    a = np.asarray(assignment)
    e = g.edges
    ga, gb = a[e[:, 0]], a[e[:, 1]]
    ok = (ga >= 0) & (gb >= 0)
    if not skip_unassigned and not ok.all():
        raise UnassignedVertex("edge endpoint without a group")
    ga, gb = ga[ok], gb[ok]
    counts = np.zeros((J, J), dtype=np.int64)
    np.add.at(counts, (ga, gb), 1)
    np.add.at(counts, (gb, ga), 1)
    return counts, int(ok.sum())


def mixing_matrix(g: ContactGraph, p: CovariatePartition, skip_unassigned: bool = False) -> MixingMatrix:
    """Fractions of edges between groups.

    A between-group edge adds ``1/(2m)`` to both ``m[i,j]`` and ``m[j,i]``;
    a within-group edge adds ``1/m`` to ``m[i,i]``.  With
    ``skip_unassigned`` only edges whose endpoints both have a group count.
    """
    counts, m = mixing_counts(g, p.assignment, p.J, skip_unassigned)
    if m == 0:
        raise EmptyGraph("no edges to mix")
    return MixingMatrix(counts / (2.0 * m), list(p.labels), m)


def modularity(mm: MixingMatrix) -> float:
    """``Tr(M) - ||M^2||`` with ``||.||`` the sum of all entries."""
    a = mm.row_sums
    return float(np.trace(mm.m) - np.dot(a, a))


def assortativity(mm: MixingMatrix) -> float:
    a = mm.row_sums
    sq = float(np.dot(a, a))
    if sq >= 1.0 - 1e-15:
        raise DegenerateMatrix("||M^2|| = 1: a single group carries every edge end")
    return (float(np.trace(mm.m)) - sq) / (1.0 - sq)


# -- homogeneity -------------------------------------------------------------


@dataclass(frozen=True)
class HomogeneityResult:
    statistic: float
    dof: int
    pvalue: float
    expected: list[float]
    observed: list[int]
    small_expected: bool = False
    mc_pvalue: float | None = None


def _gof(obs: np.ndarray, exp: np.ndarray) -> float:
    pos = exp > 0
    if np.any(obs[~pos] > 0):
        return math.inf
    return float(np.sum((obs[pos] - exp[pos]) ** 2 / exp[pos]))


def homogeneity_test(
    observed: Sequence[int],
    reference: Sequence[float],
    mc_draws: int = 10_000,
    seed: int = 0,
) -> HomogeneityResult:
    """Chi-square goodness of fit of category counts to reference proportions.

    When some expected count is below 5 a Monte Carlo p-value from
    multinomial draws is added.
    """
    obs = np.asarray(observed, dtype=np.int64)
    ref = np.asarray(reference, dtype=np.float64)
    total = int(obs.sum())
    if total <= 0:
        raise EmptyObservation("no observations")
    if len(obs) != len(ref):
        raise ValueError("observed and reference lengths differ")
    ref = ref / ref.sum()
    exp = ref * total
    stat = _gof(obs, exp)
    dof = max(int((ref > 0).sum()) - 1, 0)
    if dof == 0:
        pval = 1.0 if stat == 0 else 0.0
    else:
        pval = float(stats.chi2.sf(stat, dof))
    small = bool(np.any(exp[ref > 0] < 5))
    mc = None
    if small and mc_draws > 0:
        rng = np.random.default_rng(seed)
        draws = rng.multinomial(total, ref, size=mc_draws)
        pos = exp > 0
        sims = np.sum((draws[:, pos] - exp[pos]) ** 2 / exp[pos], axis=1)
        mc = float((np.count_nonzero(sims >= stat - 1e-9) + 1) / (mc_draws + 1))
    return HomogeneityResult(stat, dof, pval, exp.tolist(), obs.tolist(), small, mc)


# -- detection lag -----------------------------------------------------------


@dataclass(frozen=True)
class LagSummary:
    count: int
    mean_days: float
    median_days: float


def edge_ego(g: ContactGraph, k: int) -> tuple[int, int]:
    """(ego, alter) vertex indices for edge ``k``.

    The named endpoint is the ego when naming direction is known; otherwise
    the later-detected endpoint (``src`` on ties or missing dates).
    """
    a, b = (int(x) for x in g.edges[k])
    nb = g.named_by[k] if g.named_by is not None else NamedBy.UNKNOWN
    if nb is NamedBy.SRC:
        return b, a
    if nb is NamedBy.DST:
        return a, b
    da, db = g.vertices[a].detection_date, g.vertices[b].detection_date
    if da is not None and db is not None and db > da:
        return b, a
    return a, b


def detection_lag(g: ContactGraph) -> dict:
    """Days between the two detections along each edge, by ego's detection mode."""
    lags: dict[str, list[int]] = {}
    excluded = 0
    any_date = False
    for k in range(g.m):
        ego, alter = edge_ego(g, k)
        de, da = g.vertices[ego].detection_date, g.vertices[alter].detection_date
        if de is None or da is None:
            excluded += 1
            continue
        any_date = True
        lags.setdefault(g.vertices[ego].detection_mode.value, []).append(abs((de - da).days))
    if not any_date:
        raise MissingCovariate("no edge has detection dates on both endpoints")
    summary = {
        mode: LagSummary(len(v), statistics.fmean(v), float(statistics.median(v)))
        for mode, v in sorted(lags.items())
    }
    return {"by_mode": summary, "excluded_edges": excluded}
