"""Statistical post-processing of campaign outputs.

Variance-based sensitivity indices from Saltelli sample matrices (the 2010
first-order estimator and Jansen's total-effect estimator) with percentile
bootstrap confidence intervals; one-at-a-time variance rankings; and
polynomial response-surface meta-models over one or two factors.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "AnalysisError",
    "SobolFactorIndices",
    "SobolResult",
    "OatRanking",
    "MetaModel",
    "sobol_indices",
    "oat_ranking",
    "fit_metamodel",
    "eval_metamodel",
    "surface",
    "write_sobol_json",
    "write_ranking_json",
    "write_metamodel_json",
    "load_metamodel_json",
]

BOOTSTRAP_RESAMPLES = 1000
CONFIDENCE_LEVEL = 0.95


class AnalysisError(ValueError):
    """Analysis inputs are unusable (layout mismatch, zero variance, ...)."""


# --------------------------------------------------------------------------
# Sobol indices
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SobolFactorIndices:
    name: str
    s1: float
    s1_conf: float
    st: float
    st_conf: float


@dataclass(frozen=True)
class SobolResult:
    metric: str
    factors: tuple[SobolFactorIndices, ...]
    variance: float
    n: int
    k: int

    def by_name(self, name: str) -> SobolFactorIndices:
        for f in self.factors:
            if f.name == name:
                return f
        raise KeyError(name)


def _estimate(f_a: np.ndarray, f_b: np.ndarray, f_ab: np.ndarray) -> tuple[float, float]:
    """(S1, ST) from one factor's blocks: Saltelli-2010 and Jansen."""
    variance = np.concatenate([f_a, f_b]).var()
    if variance == 0.0:
        return math.nan, math.nan
    s1 = float(np.mean(f_b * (f_ab - f_a)) / variance)
    st = float(np.mean((f_a - f_ab) ** 2) / (2.0 * variance))
    return s1, st


def sobol_indices(meta: dict, outputs, metric: str = "",
                  rng: np.random.Generator | None = None,
                  n_resamples: int = BOOTSTRAP_RESAMPLES) -> SobolResult:
    """First-order and total-effect indices with bootstrap half-widths.

    ``meta`` is a saltelli design's meta dict; ``outputs`` holds one value per
    run, ordered by run_id (i.e. block-major in the recorded layout). The
    bootstrap resamples base-sample indices, so rows stay paired across the
    A/B/AB blocks. Raises on zero output variance or a layout mismatch.
    """
    n = meta["n"]
    k = meta["k"]
    blocks = meta["blocks"]
    names = meta["factors"]
    outputs = np.asarray(outputs, dtype=float)
    if outputs.ndim != 1 or outputs.size != n * len(blocks):
        raise AnalysisError(
            f"outputs length {outputs.size} does not match layout "
            f"{len(blocks)} blocks x {n} rows"
        )
    if not np.all(np.isfinite(outputs)):
        raise AnalysisError("outputs contain non-finite values (failed runs?)")

    by_block = {name: outputs[j * n:(j + 1) * n] for j, name in enumerate(blocks)}
    f_a = by_block["A"]
    f_b = by_block["B"]
    f_ab = [by_block[f"AB_{i}"] for i in range(k)]

    variance = float(np.concatenate([f_a, f_b]).var())
    if variance == 0.0:
        raise AnalysisError("zero output variance: the model is constant "
                            "over the sampled factors")

    rng = rng if rng is not None else np.random.default_rng(0)
    resample = rng.integers(0, n, size=(n_resamples, n))
    lo_q = 100.0 * (1.0 - CONFIDENCE_LEVEL) / 2.0
    hi_q = 100.0 - lo_q
    a_r = f_a[resample]
    b_r = f_b[resample]
    var_r = np.concatenate([a_r, b_r], axis=1).var(axis=1)

    factors = []
    for i in range(k):
        s1, st = _estimate(f_a, f_b, f_ab[i])
        ab_r = f_ab[i][resample]
        with np.errstate(divide="ignore", invalid="ignore"):
            s1_r = np.mean(b_r * (ab_r - a_r), axis=1) / var_r
            st_r = np.mean((a_r - ab_r) ** 2, axis=1) / (2.0 * var_r)
        s1_r = s1_r[np.isfinite(s1_r)]
        st_r = st_r[np.isfinite(st_r)]
        s1_conf = float(np.percentile(s1_r, hi_q) - np.percentile(s1_r, lo_q)) / 2.0 \
            if s1_r.size else 0.0
        st_conf = float(np.percentile(st_r, hi_q) - np.percentile(st_r, lo_q)) / 2.0 \
            if st_r.size else 0.0
        if st < s1 - s1_conf - st_conf:
            warnings.warn(
                f"factor {names[i]!r}: total effect {st:.4f} fell below the "
                f"first-order index {s1:.4f} beyond the confidence widths; "
                "estimates may be under-sampled"
            )
        factors.append(SobolFactorIndices(names[i], s1, s1_conf, st, st_conf))

    return SobolResult(metric=metric, factors=tuple(factors),
                       variance=variance, n=n, k=k)


def write_sobol_json(results: list[SobolResult], path: str | Path) -> None:
    doc = {
        r.metric: {
            "variance": r.variance,
            "n": r.n,
            "k": r.k,
            "factors": {
                f.name: {"s1": f.s1, "s1_conf": f.s1_conf,
                         "st": f.st, "st_conf": f.st_conf}
                for f in r.factors
            },
        }
        for r in results
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


# --------------------------------------------------------------------------
# OAT ranking
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OatRanking:
    """Per-metric factor orderings by output variance over each OAT triple.

    ``rankings`` maps metric -> ordered (factor, score) list, highest
    variance first, ties broken by factor name; ``aggregate`` maps factor ->
    mean rank across metrics (1 = most influential).
    """

    rankings: dict[str, list[tuple[str, float]]]
    aggregate: dict[str, float]


def oat_ranking(meta: dict, metric_values: dict[str, dict[int, float]]) -> OatRanking:
    """Rank factors per metric from an OAT campaign.

    ``metric_values`` maps metric name -> {run_id: value}. Factors whose
    triple has a missing run are dropped with a warning; a missing base run
    is fatal.
    """
    triples: dict[str, list[int]] = meta["triples"]
    rankings: dict[str, list[tuple[str, float]]] = {}
    ranks_acc: dict[str, list[int]] = {}

    for metric, values in metric_values.items():
        scores: list[tuple[str, float]] = []
        for factor, runs in triples.items():
            try:
                triple = [values[r] for r in runs]
            except KeyError as missing:
                warnings.warn(f"OAT ranking: factor {factor!r} dropped for metric "
                              f"{metric!r}; run {missing} is missing")
                continue
            scores.append((factor, float(np.var(triple))))
        scores.sort(key=lambda item: (-item[1], item[0]))
        rankings[metric] = scores
        for rank, (factor, _) in enumerate(scores, start=1):
            ranks_acc.setdefault(factor, []).append(rank)

    aggregate = {f: float(np.mean(r)) for f, r in sorted(ranks_acc.items())}
    return OatRanking(rankings=rankings, aggregate=aggregate)


def write_ranking_json(ranking: OatRanking, path: str | Path) -> None:
    doc = {
        "rankings": {
            metric: [{"factor": f, "score": s, "rank": i + 1}
                     for i, (f, s) in enumerate(scores)]
            for metric, scores in ranking.rankings.items()
        },
        "aggregate": ranking.aggregate,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


# --------------------------------------------------------------------------
# Polynomial meta-models
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MetaModel:
    """Total-degree polynomial response surface over 1 or 2 normalized axes.

    Inputs are mapped to [-1, 1] per axis before fitting; ``powers`` lists
    the monomial exponents in graded order, matching ``coefficients``.
    """

    axes: tuple[str, ...]
    axis_ranges: tuple[tuple[float, float], ...]
    degree: int
    powers: tuple[tuple[int, ...], ...]
    coefficients: tuple[float, ...]
    r_squared: float
    max_abs_residual: float


def _monomial_powers(degree: int, n_axes: int) -> list[tuple[int, ...]]:
    if n_axes == 1:
        return [(d,) for d in range(degree + 1)]
    powers = []
    for total in range(degree + 1):
        for i in range(total, -1, -1):
            powers.append((i, total - i))
    return powers


def _normalize(x: np.ndarray, ranges) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    for j, (lo, hi) in enumerate(ranges):
        if hi == lo:
            raise AnalysisError(f"axis {j}: degenerate normalization range [{lo}, {hi}]")
        out[:, j] = 2.0 * (x[:, j] - lo) / (hi - lo) - 1.0
    return out


def _design_matrix(z: np.ndarray, powers) -> np.ndarray:
    cols = [np.prod([z[:, j] ** p for j, p in enumerate(pw)], axis=0)
            for pw in powers]
    return np.column_stack(cols)


def fit_metamodel(x, y, axes: list[str], axis_ranges, degree: int) -> MetaModel:
    """Least-squares polynomial fit of y over the given axes.

    ``x`` is (n_samples, n_axes), ``axis_ranges`` the per-axis (min, max)
    used for normalization. Requires at least as many samples as
    coefficients; a rank-deficient design matrix (e.g. collinear duplicated
    inputs) is an error.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] == 1 and len(axes) == 1 and x.shape[1] > 1:
        x = x.T
    y = np.asarray(y, dtype=float)
    if degree < 0:
        raise AnalysisError("degree must be non-negative")
    if len(axes) not in (1, 2):
        raise AnalysisError("meta-models support exactly 1 or 2 axes")
    if x.shape[1] != len(axes):
        raise AnalysisError(f"x has {x.shape[1]} columns for {len(axes)} axes")

    powers = _monomial_powers(degree, len(axes))
    n_coeff = len(powers)
    if x.shape[0] < n_coeff:
        raise AnalysisError(
            f"{x.shape[0]} samples cannot determine {n_coeff} coefficients"
        )

    z = _normalize(x, axis_ranges)
    design = _design_matrix(z, powers)
    coeffs, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < n_coeff:
        raise AnalysisError(
            f"rank-deficient design matrix (rank {rank} < {n_coeff} coefficients); "
            "sample locations do not span the polynomial basis"
        )

    residuals = y - design @ coeffs
    sse = float(residuals @ residuals)
    sst = float(((y - y.mean()) ** 2).sum())
    r_squared = 1.0 - sse / sst if sst > 0.0 else (1.0 if sse <= 1e-18 else 0.0)

    return MetaModel(
        axes=tuple(axes),
        axis_ranges=tuple((float(lo), float(hi)) for lo, hi in axis_ranges),
        degree=degree,
        powers=tuple(tuple(p) for p in powers),
        coefficients=tuple(float(c) for c in coeffs),
        r_squared=r_squared,
        max_abs_residual=float(np.max(np.abs(residuals))) if residuals.size else 0.0,
    )


def eval_metamodel(model: MetaModel, x) -> float:
    """Evaluate the surface at one point (in original axis units).

    Points outside the normalization range are flagged with a warning but
    still evaluated (extrapolation).
    """
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if x.shape[1] != len(model.axes):
        raise AnalysisError(f"expected {len(model.axes)} coordinates")
    for j, (lo, hi) in enumerate(model.axis_ranges):
        if not (lo <= x[0, j] <= hi):
            warnings.warn(f"evaluating outside the {model.axes[j]!r} range "
                          f"[{lo}, {hi}]: extrapolation")
    z = _normalize(x, model.axis_ranges)
    return float((_design_matrix(z, model.powers) @ np.asarray(model.coefficients))[0])


def surface(model: MetaModel, points_per_axis: int = 25) -> list[tuple[float, ...]]:
    """Tabulate the surface on a regular grid, row-major, for plotting.

    Rows are (x, yhat) for one axis or (x1, x2, yhat) for two.
    """
    grids = [np.linspace(lo, hi, points_per_axis) for lo, hi in model.axis_ranges]
    rows = []
    if len(model.axes) == 1:
        for v in grids[0]:
            rows.append((float(v), eval_metamodel(model, [v])))
    else:
        for v1 in grids[0]:
            for v2 in grids[1]:
                rows.append((float(v1), float(v2), eval_metamodel(model, [v1, v2])))
    return rows


def write_metamodel_json(model: MetaModel, path: str | Path) -> None:
    doc = {
        "axes": [{"name": a, "min": lo, "max": hi}
                 for a, (lo, hi) in zip(model.axes, model.axis_ranges)],
        "degree": model.degree,
        "powers": [list(p) for p in model.powers],
        "coefficients": list(model.coefficients),
        "stats": {"r_squared": model.r_squared,
                  "max_abs_residual": model.max_abs_residual},
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_metamodel_json(path: str | Path) -> MetaModel:
    doc = json.loads(Path(path).read_text())
    return MetaModel(
        axes=tuple(a["name"] for a in doc["axes"]),
        axis_ranges=tuple((a["min"], a["max"]) for a in doc["axes"]),
        degree=doc["degree"],
        powers=tuple(tuple(p) for p in doc["powers"]),
        coefficients=tuple(doc["coefficients"]),
        r_squared=doc["stats"]["r_squared"],
        max_abs_residual=doc["stats"]["max_abs_residual"],
    )
