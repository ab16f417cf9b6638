"""Hardness, success-probability estimates and the scaling fit."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .exact import ENUMERATION_LIMIT, count_independent_sets, independence_polynomial
from .graph import Graph

__all__ = ["HardnessReport", "hardness", "count_independent_sets", "PmisEstimate",
           "estimate_pmis", "estimate_success", "ScalingFit", "fit_scaling", "pearson"]


@dataclass(frozen=True)
class HardnessReport:
    mis_size: int
    degeneracy_at_mis: int
    degeneracy_below: int
    hardness: float

    def to_dict(self) -> dict:
        return asdict(self)


def hardness(graph: Graph, limit: int = ENUMERATION_LIMIT) -> HardnessReport:
    """H = D_{a-1} / (a * D_a) with a the MIS size and D_k the number of size-k independent sets."""
    if graph.n == 0:
        raise ValueError("hardness is undefined for the empty graph")
    poly = independence_polynomial(graph, limit)
    alpha = len(poly) - 1
    d_a, d_b = poly[alpha], poly[alpha - 1]
    return HardnessReport(alpha, d_a, d_b, d_b / (alpha * d_a))


@dataclass(frozen=True)
class PmisEstimate:
    p_mis: float
    ci_low: float
    ci_high: float
    n_runs: int

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_success(successes, bootstrap_samples: int = 10000, seed=0,
                     level: float = 0.9) -> PmisEstimate:
    """Success fraction of a 0/1 sequence with a percentile-bootstrap interval."""
    x = np.asarray(successes, dtype=float).reshape(-1)
    if x.size == 0:
        raise ValueError("need at least one run")
    p = float(x.mean())
    rng = np.random.default_rng(seed)
    # resampling a 0/1 vector only depends on how many ones are drawn
    boot = rng.binomial(x.size, p, size=bootstrap_samples) / x.size
    a = (1 - level) / 2
    lo, hi = np.quantile(boot, [a, 1 - a])
    # percentile bounds can miss a skewed point estimate by a hair
    return PmisEstimate(p, float(min(lo, p)), float(max(hi, p)), int(x.size))


def estimate_pmis(reports, optimum: int, bootstrap_samples: int = 10000, seed=0) -> PmisEstimate:
    """Fraction of solves whose incumbent reaches ``optimum``."""
    if optimum < 1:
        raise ValueError("optimum must be >= 1")
    reports = list(reports)
    if not reports:
        raise ValueError("need at least one report")
    hits = [len(r.incumbent) == optimum for r in reports]
    return estimate_success(hits, bootstrap_samples, seed)


@dataclass(frozen=True)
class ScalingFit:
    C: float
    beta: float
    residual: float
    used: int
    excluded: int


def fit_scaling(points) -> ScalingFit:
    """Least squares for P = 1 - exp(-C H^-beta) in the form log(-log(1-P)) = log C - beta log H.

    Saturated points (P of 0 or 1) have no transform and are excluded.
    """
    pts = [(float(h), float(p)) for h, p in points]
    usable = [(h, p) for h, p in pts if 0 < p < 1 and h > 0]
    excluded = len(pts) - len(usable)
    if len(usable) < 3:
        raise ValueError(f"need at least 3 points with 0 < P < 1, got {len(usable)} "
                         f"({excluded} excluded)")
    lh = np.log([h for h, _ in usable])
    if np.ptp(lh) == 0:
        raise ValueError("all points share one hardness value")
    y = np.log(-np.log1p(-np.array([p for _, p in usable])))
    A = np.column_stack([np.ones_like(lh), -lh])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.sum((A @ coef - y) ** 2))
    return ScalingFit(math.exp(coef[0]), float(coef[1]), res, len(usable), excluded)


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("need two equal-length vectors with at least 2 entries")
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = math.sqrt(dx @ dx), math.sqrt(dy @ dy)
    if sx == 0 or sy == 0:
        raise ValueError("zero variance")
    return float(dx @ dy / (sx * sy))
