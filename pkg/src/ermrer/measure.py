"""Finitely supported probability measures and empirical-risk profiles.

Every integral against a reference measure reduces to a weighted sum over the
stored atoms, so the types here are thin, immutable wrappers over numpy arrays.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import AllZeroWeights, InvalidRisk, LengthMismatch, NegativeWeight

NORMALIZATION_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Probability measure on atoms ``0..n-1`` with strictly positive weights.

    Build instances with :func:`build_measure`; the constructor assumes its
    input already satisfies the invariants.
    """

    weights: np.ndarray
    labels: tuple | None = field(default=None)

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"weights": [float(w) for w in self.weights]}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out


@dataclass(frozen=True, eq=False)
class RiskProfile:
    """Empirical risk of every atom, aligned with a measure's atoms."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise InvalidRisk("risk values must be finite")
        if np.any(v < 0):
            raise InvalidRisk("risk values must be nonnegative")
        object.__setattr__(self, "values", _frozen(v))

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class RiskSummary:
    delta_star: float
    lstar_ids: frozenset[int]
    separable: bool


def _normalized(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalized weights and the mask of atoms that keep positive mass."""
    keep = w > 0
    if not np.any(keep):
        raise AllZeroWeights("at least one weight must be positive")
    total = math.fsum(w[keep])
    # leave already-normalized input untouched so rebuilding is bit-exact
    if abs(total - 1.0) > NORMALIZATION_TOL:
        w = w / total
        keep = w > 0  # subnormal weights can underflow here
    return w, keep


def build_measure(weights: Sequence[float], labels: Sequence | None = None) -> DiscreteMeasure:
    """Drop zero-weight atoms and renormalize the rest to total mass one.

    ``labels``, when given, is filtered alongside the weights.
    """
    w = np.asarray(weights, dtype=float).reshape(-1)
    if not np.all(np.isfinite(w)):
        raise NegativeWeight("weights must be finite")
    if np.any(w < 0):
        raise NegativeWeight(f"negative weight {w[w < 0][0]!r}")
    if labels is not None and len(labels) != w.shape[0]:
        raise LengthMismatch(f"{len(labels)} labels for {w.shape[0]} weights")
    w, keep = _normalized(w)
    w = w[keep]
    kept_labels = None
    if labels is not None:
        kept_labels = tuple(lab for lab, k in zip(labels, keep) if k)
    return DiscreteMeasure(_frozen(np.array(w, dtype=float)), kept_labels)


def as_values(L: RiskProfile | np.ndarray | Sequence[float]) -> np.ndarray:
    """Raw risk array from a profile or any finite real sequence.

    Transformed risks (log or exponential reweightings) can be negative, so
    plain arrays skip the nonnegativity check a :class:`RiskProfile` enforces.
    """
    if isinstance(L, RiskProfile):
        return L.values
    v = np.asarray(L, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise InvalidRisk("risk values must be finite")
    return v


def check_aligned(Q: DiscreteMeasure, values: np.ndarray) -> None:
    if values.shape[0] != Q.size:
        raise LengthMismatch(f"{values.shape[0]} risk values for a support of size {Q.size}")


def risk_summary(Q: DiscreteMeasure, L: RiskProfile | np.ndarray) -> RiskSummary:
    v = as_values(L)
    check_aligned(Q, v)
    lo = float(v.min())
    ids = frozenset(int(i) for i in np.flatnonzero(v == lo))
    return RiskSummary(delta_star=lo, lstar_ids=ids, separable=bool(v.max() - lo > 0))


def rashomon_mass(Q: DiscreteMeasure, L: RiskProfile | np.ndarray, delta: float) -> float:
    """Reference mass of the models whose risk is at most ``delta``."""
    v = as_values(L)
    check_aligned(Q, v)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return math.fsum(Q.weights[v <= delta])


def load_fixture(path: str | Path) -> tuple[DiscreteMeasure, RiskProfile]:
    """Read ``{"weights": [...], "risks": [...], "labels": [...]}``.

    Risks of zero-weight atoms are discarded together with the atoms.
    """
    with open(path) as fh:
        doc = json.load(fh)
    return fixture_from_json(doc)


def fixture_from_json(doc: dict) -> tuple[DiscreteMeasure, RiskProfile]:
    if not isinstance(doc, dict) or "weights" not in doc or "risks" not in doc:
        raise ValueError("fixture must be an object with 'weights' and 'risks'")
    unknown = set(doc) - {"weights", "risks", "labels"}
    if unknown:
        raise ValueError(f"unknown fixture keys: {sorted(unknown)}")
    w = np.asarray(doc["weights"], dtype=float).reshape(-1)
    r = np.asarray(doc["risks"], dtype=float).reshape(-1)
    if w.shape != r.shape:
        raise LengthMismatch(f"{r.shape[0]} risks for {w.shape[0]} weights")
    Q = build_measure(w, doc.get("labels"))
    return Q, RiskProfile(r[_normalized(w)[1]])


def fixture_to_json(Q: DiscreteMeasure, L: RiskProfile) -> dict[str, Any]:
    doc = Q.to_json()
    doc["risks"] = [float(x) for x in L.values]
    return doc
