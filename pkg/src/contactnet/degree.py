"""Degree distributions and power-law tail estimation.

Tail fits minimise the Kullback-Leibler divergence between the empirical
degree distribution conditioned on ``k >= k0`` and the discrete power law
``k**-alpha / C(alpha, k0)`` on ``{k0, k0+1, ...}``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .errors import (
    AlphaOutOfRange, BadM, DegenerateTail, EmptyTail, MissingCovariate, ZeroVariance,
)
from .graph import ContactGraph

ALPHA_MIN = 1.0 + 1e-6
ALPHA_MAX = 20.0
ALPHA_CAP = 1000.0
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_DIRECT_TERMS = 1_000


class DegreeSource(enum.Enum):
    DECLARED = "declared"
    OBSERVED = "observed"


@dataclass(frozen=True)
class DegreeDistribution:
    source: DegreeSource
    counts: dict[int, int]
    n_total: int
    excluded: int = 0  # vertices without a declared value

    @property
    def p(self) -> dict[int, float]:
        return {k: c / self.n_total for k, c in self.counts.items()}

    @property
    def k_max(self) -> int:
        return max(self.counts) if self.counts else 0

    def values(self) -> np.ndarray:
        """Expanded degree sample (ascending)."""
        ks = sorted(self.counts)
        return np.repeat(np.array(ks, dtype=np.int64), [self.counts[k] for k in ks])

    @classmethod
    def from_values(cls, values: Iterable[int], source=DegreeSource.OBSERVED, excluded: int = 0):
        vals = [int(v) for v in values]
        counts: dict[int, int] = {}
        for v in vals:
            counts[v] = counts.get(v, 0) + 1
        return cls(source, dict(sorted(counts.items())), len(vals), excluded)


def degree_distribution(
    g: ContactGraph,
    source: DegreeSource | str = DegreeSource.OBSERVED,
    mask: Sequence[bool] | np.ndarray | None = None,
) -> DegreeDistribution:
    """Degree frequencies over all vertices (or those selected by ``mask``)."""
    source = DegreeSource(source)
    sel = np.ones(g.n, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if source is DegreeSource.OBSERVED:
        return DegreeDistribution.from_values(g.degree[sel], source)
    declared = [v.declared_partners for v, keep in zip(g.vertices, sel) if keep]
    known = [x for x in declared if x is not None]
    if not known:
        raise MissingCovariate("no declared_partners values")
    return DegreeDistribution.from_values(known, source, excluded=len(declared) - len(known))


# -- normaliser and divergence -----------------------------------------------


def _scaled_zeta(alpha: float, k0: int, k_max: int | None = None) -> float:
    """``sum (k / k0)**-alpha`` over the tail; stays representable for large ``alpha``."""
    if not alpha > 1.0:
        raise AlphaOutOfRange(f"alpha must exceed 1, got {alpha}")
    if k0 < 1:
        raise ValueError("k0 must be >= 1")
    if k_max is not None:
        ks = np.arange(k0, k_max + 1, dtype=np.float64)
        return math.fsum(np.power(ks / k0, -alpha))
    big_n = max(k0, _DIRECT_TERMS)
    head = 0.0
    if big_n > k0:
        ks = np.arange(k0, big_n, dtype=np.float64)
        head = math.fsum(np.power(ks / k0, -alpha))
    nf = float(big_n)
    base = (nf / k0) ** -alpha
    tail = (
        nf * base / (alpha - 1.0)
        + 0.5 * base
        + alpha * base / (12.0 * nf)
        - alpha * (alpha + 1.0) * (alpha + 2.0) * base / (720.0 * nf ** 3)
        + alpha * (alpha + 1.0) * (alpha + 2.0) * (alpha + 3.0) * (alpha + 4.0) * base / (30240.0 * nf ** 5)
    )
    return head + tail


def zeta_tail(alpha: float, k0: int, k_max: int | None = None) -> float:
    """``sum_{k >= k0} k**-alpha`` for ``alpha > 1`` (or up to ``k_max`` inclusive).

    Terms below ``max(k0, 1000)`` are summed directly; the remainder uses
    the Euler-Maclaurin expansion through the fifth derivative, whose
    truncation error is far below double precision for ``alpha > 1``.
    """
    return float(k0) ** -alpha * _scaled_zeta(alpha, k0, k_max)


def log_zeta_tail(alpha: float, k0: int, k_max: int | None = None) -> float:
    return -alpha * math.log(k0) + math.log(_scaled_zeta(alpha, k0, k_max))


def _tail(d: DegreeDistribution, k0: int) -> tuple[np.ndarray, np.ndarray]:
    """Support (k >= k0, k >= 1) and conditional probabilities of the tail."""
    ks = np.array(sorted(k for k in d.counts if k >= max(k0, 1) and d.counts[k] > 0), dtype=np.int64)
    if len(ks) == 0:
        return ks, np.zeros(0)
    w = np.array([d.counts[k] for k in ks], dtype=np.float64)
    return ks, w / w.sum()


def _kl(q: np.ndarray, logk: np.ndarray, alpha: float, k0: int, k_max: int | None = None) -> float:
    return float(np.dot(q, np.log(q) + alpha * logk) + log_zeta_tail(alpha, k0, k_max))


def kl_divergence(d: DegreeDistribution, k0: int, alpha: float, strict: bool = False,
                  truncated: bool = False) -> float:
    """Divergence between the conditional tail at ``k0`` and the power law.

    The power law is normalised over all ``k >= k0``; with ``truncated`` it
    is normalised over ``k0..k_max`` only.  An empty tail (``k0 > k_max``)
    gives 0, or raises ``EmptyTail`` when ``strict`` is set.
    """
    if not alpha > 1.0:
        raise AlphaOutOfRange(f"alpha must exceed 1, got {alpha}")
    if k0 < 1:
        raise ValueError("k0 must be >= 1")
    ks, q = _tail(d, k0)
    if len(ks) == 0:
        if strict:
            raise EmptyTail(f"no mass at or above k0={k0}")
        return 0.0
    return _kl(q, np.log(ks.astype(np.float64)), alpha, k0, int(ks[-1]) if truncated else None)


@dataclass(frozen=True)
class PowerLawFit:
    k0: int
    alpha: float
    kl_value: float
    tail_mass: float
    normalizer: float


def fit_alpha(d: DegreeDistribution, k0: int, tol: float = 1e-7, truncated: bool = False) -> PowerLawFit:
    """Minimum-divergence exponent at threshold ``k0``.

    A coarse grid brackets the minimum on ``(1, 20]``, widened up to 1000
    when the minimum sits on the upper edge, and golden-section
    search narrows the bracket below ``tol``.  ``truncated`` normalises the
    power law over the observed range ``k0..k_max`` instead of all ``k >= k0``.
    """
    ks, q = _tail(d, k0)
    if len(ks) == 0:
        raise EmptyTail(f"no mass at or above k0={k0}")
    if len(ks) < 2:
        raise DegenerateTail(f"tail at k0={k0} has a single support point")
    logk = np.log(ks.astype(np.float64))
    upper = int(ks[-1]) if truncated else None

    def f(a):
        return _kl(q, logk, a, k0, upper)

    grid = np.linspace(ALPHA_MIN, ALPHA_MAX, 77)
    vals = [f(a) for a in grid]
    i = int(np.argmin(vals))
    # steep tails can put the minimum beyond the initial range: widen it
    while i == len(grid) - 1 and grid[-1] < ALPHA_CAP:
        grid = np.linspace(grid[-2], min(2.0 * grid[-1], ALPHA_CAP), 77)
        vals = [f(a) for a in grid]
        i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    alpha = 0.5 * (lo + hi)
    tail_mass = sum(c for k, c in d.counts.items() if k >= k0) / d.n_total
    return PowerLawFit(k0, alpha, max(f(alpha), 0.0), tail_mass, zeta_tail(alpha, k0, upper))


@dataclass(frozen=True)
class ScanEntry:
    k0: int
    alpha: float | None
    kl_value: float | None
    flag: str | None = None  # "EmptyTail" / "DegenerateTail" for infeasible thresholds


def k0_scan(d: DegreeDistribution, truncated: bool = False) -> list[ScanEntry]:
    """``fit_alpha`` for every threshold ``1..k_max``; infeasible ones flagged."""
    out = []
    for k0 in range(1, max(d.k_max, 1) + 1):
        try:
            fit = fit_alpha(d, k0, truncated=truncated)
        except (EmptyTail, DegenerateTail) as exc:
            out.append(ScanEntry(k0, None, None, type(exc).__name__))
        else:
            out.append(ScanEntry(k0, fit.alpha, fit.kl_value))
    return out


# -- Hill estimator ----------------------------------------------------------


@dataclass(frozen=True)
class HillEstimate:
    m: int
    alpha_paper: float
    alpha_log: float


def _positive_desc(d: DegreeDistribution) -> np.ndarray:
    vals = d.values()
    return vals[vals >= 1][::-1].astype(np.float64)


def _hill(sorted_desc: np.ndarray, m: int) -> HillEstimate:
    top = sorted_desc[:m]
    ratio = top / top[-1]
    alpha_paper = 1.0 / float(np.mean(ratio))
    s = float(np.sum(np.log(ratio)))
    alpha_log = 1.0 + m / s if s > 0 else math.inf
    return HillEstimate(m, alpha_paper, alpha_log)


def hill_estimator(d: DegreeDistribution, m: int) -> HillEstimate:
    """Hill-type estimates from the ``m`` largest positive degrees.

    ``alpha_paper`` is the inverse mean of ``k_(j) / k_(m)``; ``alpha_log``
    is ``1 + m / sum(log(k_(j) / k_(m)))``, the classical log-ratio Hill
    estimate shifted onto the probability-mass exponent scale.
    """
    desc = _positive_desc(d)
    if not 1 <= m <= len(desc):
        raise BadM(f"m must be in [1, {len(desc)}], got {m}")
    return _hill(desc, m)


def hill_scan(d: DegreeDistribution) -> list[HillEstimate]:
    desc = _positive_desc(d)
    return [_hill(desc, m) for m in range(1, len(desc) + 1)]


# -- joint degrees -----------------------------------------------------------

BIN_EDGES = (1, 2, 3, 4, 5, 6, 11)  # lower bounds of {1,2,3,4,5,6-10,11+}
BIN_LABELS = ("1", "2", "3", "4", "5", "6-10", "11+")


@dataclass
class JointDegreeTable:
    cells: dict[tuple[int, int], int]
    correlation: float
    chi2_stat: float
    chi2_dof: int
    chi2_pvalue: float
    perm_pvalue: float
    bins: list[str] = field(default_factory=list)
    small_expected: bool = False


def _pool(full: np.ndarray, groups: list[list[int]]) -> list[list[int]]:
    """Merge adjacent bin groups (same on both margins) until every expected count is >= 5."""
    groups = [list(gr) for gr in groups]
    while len(groups) > 2:
        table = _grouped(full, groups)
        tot = table.sum(axis=1)
        expected = np.outer(tot, table.sum(axis=0)) / table.sum()
        if expected.min() >= 5:
            break
        i = int(np.argmin(tot))
        if i == 0:
            j = 1
        elif i == len(groups) - 1:
            j = i - 1
        else:
            j = i - 1 if tot[i - 1] <= tot[i + 1] else i + 1
        lo, hi = min(i, j), max(i, j)
        groups[lo] += groups.pop(hi)
    return groups


def _grouped(full: np.ndarray, groups: list[list[int]]) -> np.ndarray:
    k = len(groups)
    out = np.zeros((k, k), dtype=np.int64)
    for a, ga in enumerate(groups):
        for b, gb in enumerate(groups):
            out[a, b] = full[np.ix_(ga, gb)].sum()
    return out


def _group_label(gr: list[int]) -> str:
    first, last = BIN_LABELS[gr[0]], BIN_LABELS[gr[-1]]
    if len(gr) == 1:
        return first
    lo = first.split("-")[0]
    if last.endswith("+"):
        return f"{lo}+"
    return f"{lo}-{last.split('-')[-1]}"


def _chi2_table(table: np.ndarray) -> float:
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / table.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(expected > 0, (table - expected) ** 2 / expected, 0.0)
    return float(terms.sum())


def joint_degree_analysis(g: ContactGraph, permutations: int = 10_000, seed: int = 0) -> JointDegreeTable:
    """Degree-degree dependence across edges.

    Every undirected edge contributes both ordered endpoint pairs.  The
    correlation is Pearson's over those ``2m`` pairs; independence is tested
    with a chi-square statistic on binned degrees, with both the asymptotic
    and a permutation p-value.
    """
    if g.m < 2:
        raise ZeroVariance("need at least two edges")
    deg = g.degree
    e = g.edges
    x = np.concatenate([deg[e[:, 0]], deg[e[:, 1]]]).astype(np.int64)
    y = np.concatenate([deg[e[:, 1]], deg[e[:, 0]]]).astype(np.int64)
    n = len(x)
    sx, sy = int(x.sum()), int(y.sum())
    vx = n * int((x * x).sum()) - sx * sx
    vy = n * int((y * y).sum()) - sy * sy
    if vx == 0 or vy == 0:
        raise ZeroVariance("all edge endpoints have the same degree")
    cov = n * int((x * y).sum()) - sx * sy
    corr = cov / vx if vx == vy else cov / math.sqrt(vx * vy)

    cells: dict[tuple[int, int], int] = {}
    for a, b in zip(x.tolist(), y.tolist()):
        cells[(a, b)] = cells.get((a, b), 0) + 1

    bx = np.searchsorted(BIN_EDGES, x, side="right") - 1
    by = np.searchsorted(BIN_EDGES, y, side="right") - 1
    nb = len(BIN_EDGES)
    full = np.zeros((nb, nb), dtype=np.int64)
    np.add.at(full, (bx, by), 1)
    groups = _pool(full, [[i] for i in range(nb) if full[i].sum() > 0])
    labels = [_group_label(gr) for gr in groups]
    if len(groups) < 2:
        return JointDegreeTable(cells, corr, math.nan, 0, math.nan, math.nan, labels)
    pooled_of = np.full(nb, -1, dtype=np.int64)
    for gi, gr in enumerate(groups):
        pooled_of[gr] = gi
    px, py = pooled_of[bx], pooled_of[by]
    k = len(groups)
    table = _grouped(full, groups)
    stat = _chi2_table(table)
    dof = (k - 1) * (k - 1)
    pval = float(stats.chi2.sf(stat, dof))
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / table.sum()
    perm_p = math.nan
    if permutations > 0:
        rng = np.random.default_rng(seed)
        hits = 0
        for _ in range(permutations):
            t = np.bincount(px * k + rng.permutation(py), minlength=k * k).reshape(k, k)
            if _chi2_table(t) >= stat - 1e-9:
                hits += 1
        perm_p = (hits + 1) / (permutations + 1)
    return JointDegreeTable(cells, corr, stat, dof, pval, perm_p, labels, bool(expected.min() < 5))


# -- one-way ANOVA -----------------------------------------------------------


@dataclass(frozen=True)
class AnovaResult:
    covariate: str
    groups: dict[str, int]
    f_stat: float
    pvalue: float


def degree_anova(g: ContactGraph, covariate: str, source=DegreeSource.DECLARED) -> AnovaResult:
    """One-way F-test of (declared) degree across the levels of a covariate."""
    from .mixing import covariate_labels

    labels = covariate_labels(g, covariate)
    if DegreeSource(source) is DegreeSource.DECLARED:
        deg = [v.declared_partners for v in g.vertices]
    else:
        deg = g.degree.tolist()
    samples: dict[str, list[int]] = {}
    for lab, k in zip(labels, deg):
        if lab is None or k is None:
            continue
        samples.setdefault(lab, []).append(k)
    if not samples:
        raise MissingCovariate(f"no vertices with both {covariate} and degree")
    groups = {k: len(v) for k, v in sorted(samples.items())}
    usable = [v for _, v in sorted(samples.items()) if len(v) > 0]
    if len(usable) < 2 or sum(len(v) for v in usable) <= len(usable):
        return AnovaResult(covariate, groups, math.nan, math.nan)
    res = stats.f_oneway(*usable)
    return AnovaResult(covariate, groups, float(res.statistic), float(res.pvalue))
