"""Regularization-factor sweep for a linear classifier over a grid of models.

Each model ``theta`` in a uniform grid on ``[-h, h]^2`` labels a 2-D pattern
``x`` with the first label when ``<x, theta> >= 0`` and with the second label
otherwise.  The 0-1 risk of every grid model forms the risk profile; both
regularized solutions are computed on the training profile and scored on the
training and test profiles.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from ..errors import EmptyDataset, LengthMismatch
from ..measure import DiscreteMeasure, RiskProfile, build_measure, risk_summary
from ..type1 import solve_type1
from ..type2 import DEFAULT_CONFIG, SolverConfig, solve_type2
from .hog import hog
from .idx import ingest_idx
from .pca import Projection, pca_fit, pca_project

log = logging.getLogger(__name__)

CSV_HEADER = ("repetition", "lambda", "type", "train_risk", "test_risk", "gap")
MODEL_CHUNK = 4096


def default_lambda_grid() -> tuple[float, ...]:
    return tuple(float(x) for x in np.logspace(-3, 1, 40))


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    grid_half_width: float = 50.0
    grid_points_per_axis: int = 201
    lambda_grid: tuple[float, ...] = field(default_factory=default_lambda_grid)
    train_size: int = 2000
    test_size: int = 500
    repetitions: int = 5
    rng_seed: int = 0
    label_pair: tuple[int, int] = (6, 7)

    def __post_init__(self):
        n = self.grid_points_per_axis
        if not isinstance(n, int) or n < 3 or n % 2 == 0:
            raise ConfigError("grid_points_per_axis must be an odd integer >= 3")
        if not self.grid_half_width > 0:
            raise ConfigError("grid_half_width must be positive")
        grid = tuple(float(x) for x in self.lambda_grid)
        if not grid or not all(x > 0 and math.isfinite(x) for x in grid):
            raise ConfigError("lambda_grid must be a nonempty list of positive reals")
        object.__setattr__(self, "lambda_grid", tuple(sorted(grid)))
        for name in ("train_size", "test_size", "repetitions"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if not isinstance(self.rng_seed, int) or self.rng_seed < 0:
            raise ConfigError("rng_seed must be a nonnegative integer")
        pair = tuple(self.label_pair)
        if len(pair) != 2 or pair[0] == pair[1]:
            raise ConfigError("label_pair must hold two distinct labels")
        object.__setattr__(self, "label_pair", (int(pair[0]), int(pair[1])))


def config_from_json(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kw = dict(doc)
    for key in ("lambda_grid", "label_pair"):
        if key in kw:
            kw[key] = tuple(kw[key])
    try:
        return ExperimentConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_json(doc)


@dataclass(frozen=True, eq=False)
class Dataset:
    patterns: np.ndarray
    labels: np.ndarray
    label_pair: tuple[int, int]
    projection: Projection | None = None

    def __post_init__(self):
        if self.patterns.shape[0] != self.labels.shape[0]:
            raise LengthMismatch("patterns and labels differ in length")
        extra = set(np.unique(self.labels).tolist()) - set(self.label_pair)
        if extra:
            raise ValueError(f"labels outside the label pair: {sorted(extra)}")

    def __len__(self) -> int:
        return self.labels.shape[0]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.patterns[idx], self.labels[idx], self.label_pair, self.projection)


@dataclass(frozen=True)
class SweepRow:
    repetition: int
    lam: float
    type: str
    train_risk: float
    test_risk: float
    gap: float
    normalizer: float = math.nan  # K̄(lam) for type II, log-partition for type I


def build_model_grid(cfg: ExperimentConfig) -> tuple[DiscreteMeasure, np.ndarray]:
    """Uniform measure on the square grid; returns the measure and the
    ``(n, 2)`` model coordinates, first coordinate varying slowest."""
    axis = np.linspace(-cfg.grid_half_width, cfg.grid_half_width, cfg.grid_points_per_axis)
    a, b = np.meshgrid(axis, axis, indexing="ij")
    thetas = np.column_stack([a.ravel(), b.ravel()])
    n = thetas.shape[0]
    Q = build_measure(np.full(n, 1.0 / n))
    return Q, thetas


def synthetic_dataset(
    rng: np.random.Generator, size: int, label_pair: tuple[int, int] = (6, 7)
) -> Dataset:
    """Two unit-covariance Gaussian clusters; the first label sits at +(1, 1)."""
    first = rng.random(size) < 0.5
    centers = np.where(first[:, None], 1.0, -1.0) * np.ones((size, 2))
    X = centers + rng.standard_normal((size, 2))
    y = np.where(first, label_pair[0], label_pair[1])
    return Dataset(X, y, tuple(label_pair))


def empirical_risk_profile(thetas: np.ndarray, data: Dataset) -> RiskProfile:
    """Fraction of patterns each model misclassifies (ties go to the first label)."""
    m = len(data)
    if m == 0:
        raise EmptyDataset("cannot compute a risk profile on an empty dataset")
    X = data.patterns
    if X.shape[1] != thetas.shape[1]:
        raise LengthMismatch(f"patterns of dimension {X.shape[1]}, models of {thetas.shape[1]}")
    x_first = X[data.labels == data.label_pair[0]]
    x_second = X[data.labels == data.label_pair[1]]
    errors = np.empty(thetas.shape[0], dtype=np.int64)
    for start in range(0, thetas.shape[0], MODEL_CHUNK):
        T = thetas[start:start + MODEL_CHUNK].T
        wrong = (x_first @ T < 0).sum(axis=0) + (x_second @ T >= 0).sum(axis=0)
        errors[start:start + MODEL_CHUNK] = wrong
    return RiskProfile(errors / m)


def _weighted(Q: DiscreteMeasure, rn: np.ndarray, L: RiskProfile) -> float:
    return float((Q.weights * rn) @ L.values)


def sweep_repetition(
    rep: int,
    cfg: ExperimentConfig,
    Q: DiscreteMeasure,
    thetas: np.ndarray,
    train: Dataset,
    test: Dataset,
    solver: SolverConfig = DEFAULT_CONFIG,
) -> list[SweepRow]:
    L_tr = empirical_risk_profile(thetas, train)
    L_te = empirical_risk_profile(thetas, test)
    rows = []
    for lam in cfg.lambda_grid:
        s1 = solve_type1(Q, L_tr, lam)
        p1 = s1.rn_derivative
        tr, te = _weighted(Q, p1, L_tr), _weighted(Q, p1, L_te)
        rows.append(SweepRow(rep, lam, "I", tr, te, te - tr, s1.log_partition))
        s2 = solve_type2(Q, L_tr, lam, solver)
        p2 = s2.rn_derivative
        tr, te = _weighted(Q, p2, L_tr), _weighted(Q, p2, L_te)
        rows.append(SweepRow(rep, lam, "II", tr, te, te - tr, s2.beta))
    return rows


def _draw(rng: np.random.Generator, pool: Dataset, size: int) -> Dataset:
    idx = rng.choice(len(pool), size=size, replace=size > len(pool))
    return pool.subset(idx)


def project_pair(train: Dataset, test: Dataset) -> tuple[Dataset, Dataset]:
    """Fit the projection on the training patterns and apply it to both sets."""
    proj = pca_fit(train.patterns)
    tr = Dataset(pca_project(proj, train.patterns), train.labels, train.label_pair, proj)
    te = Dataset(pca_project(proj, test.patterns), test.labels, test.label_pair, proj)
    return tr, te


def run_sweep(
    cfg: ExperimentConfig,
    train_pool: Dataset | None = None,
    test_pool: Dataset | None = None,
    solver: SolverConfig = DEFAULT_CONFIG,
) -> list[SweepRow]:
    """Rows ordered by repetition, then factor ascending, then type I before II.

    Without pools, each repetition draws fresh synthetic data.  With pools,
    each repetition subsamples them; high-dimensional pools are projected to
    2-D with a projection fit on that repetition's training sample.
    Repetition ``r`` uses ``numpy.random.default_rng(rng_seed + r)``.
    """
    Q, thetas = build_model_grid(cfg)
    rows: list[SweepRow] = []
    for rep in range(cfg.repetitions):
        rng = np.random.default_rng(cfg.rng_seed + rep)
        if train_pool is None:
            train = synthetic_dataset(rng, cfg.train_size, cfg.label_pair)
            test = synthetic_dataset(rng, cfg.test_size, cfg.label_pair)
        else:
            train = _draw(rng, train_pool, cfg.train_size)
            test = _draw(rng, test_pool if test_pool is not None else train_pool, cfg.test_size)
            if train.patterns.shape[1] != 2:
                train, test = project_pair(train, test)
        rows.extend(sweep_repetition(rep, cfg, Q, thetas, train, test, solver))
    return rows


def hog_dataset(records, label_pair: tuple[int, int]) -> Dataset:
    if not records:
        raise EmptyDataset("no images with the requested labels")
    X = np.stack([hog(img) for img, _ in records])
    y = np.array([lab for _, lab in records])
    return Dataset(X, y, tuple(label_pair))


def load_image_pools(
    images: str | Path,
    labels: str | Path,
    label_pair: tuple[int, int],
    test_images: str | Path | None = None,
    test_labels: str | Path | None = None,
    seed: int = 0,
    test_fraction: float = 0.2,
) -> tuple[Dataset, Dataset]:
    """HOG feature pools for training and testing.

    Without separate test files the training file is split at random
    (seeded) into ``1 - test_fraction`` and ``test_fraction``.
    """
    train = hog_dataset(ingest_idx(images, labels, label_pair), label_pair)
    if test_images is not None and test_labels is not None:
        test = hog_dataset(ingest_idx(test_images, test_labels, label_pair), label_pair)
        return train, test
    perm = np.random.default_rng(seed).permutation(len(train))
    n_test = max(1, int(round(test_fraction * len(train))))
    if n_test >= len(train):
        raise EmptyDataset("too few images to split into training and test sets")
    return train.subset(perm[n_test:]), train.subset(perm[:n_test])


def write_csv(rows: Sequence[SweepRow], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([
            r.repetition, f"{r.lam:.12g}", r.type,
            f"{r.train_risk:.12g}", f"{r.test_risk:.12g}", f"{r.gap:.12g}",
        ])


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


@dataclass(frozen=True)
class SweepSummary:
    lambdas: tuple[float, ...]
    mean_gap_type1: tuple[float, ...]
    mean_gap_type2: tuple[float, ...]

    @property
    def type2_lower_gap(self) -> tuple[float, ...]:
        """Factors at which the reverse-KL solution has the smaller mean gap."""
        return tuple(
            lam for lam, g1, g2 in zip(self.lambdas, self.mean_gap_type1, self.mean_gap_type2)
            if g2 < g1
        )


def summarize(rows: Sequence[SweepRow]) -> SweepSummary:
    lams = sorted({r.lam for r in rows})
    g1, g2 = [], []
    for lam in lams:
        g1.append(float(np.mean([r.gap for r in rows if r.lam == lam and r.type == "I"])))
        g2.append(float(np.mean([r.gap for r in rows if r.lam == lam and r.type == "II"])))
    return SweepSummary(tuple(lams), tuple(g1), tuple(g2))


def log_summary(summary: SweepSummary) -> None:
    lower = summary.type2_lower_gap
    log.info(
        "type II has the smaller mean generalization gap at %d of %d factors",
        len(lower), len(summary.lambdas),
    )
    if lower:
        log.info("  factors: %s", ", ".join(f"{x:.4g}" for x in lower))


def check_type2_rows(rows: Sequence[SweepRow]) -> float:
    """Largest deviation of a type II training risk from ``lam - K̄(lam)``."""
    return max(
        (abs(r.train_risk - (r.lam - r.normalizer)) for r in rows if r.type == "II"),
        default=0.0,
    )


def training_minimum(thetas: np.ndarray, Q: DiscreteMeasure, train: Dataset) -> float:
    return risk_summary(Q, empirical_risk_profile(thetas, train)).delta_star
