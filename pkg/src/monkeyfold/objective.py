"""Weighted three-term objective for C-alpha traces.

``f = gamma1 * f1 + gamma2 * f2 + gamma3 * f3`` where

* ``f1`` sums the distances of all pairs at least three residues apart
  (compactness),
* ``f2`` sums ``exp_plus(th - d)`` over all pairs at least two residues apart
  (clash penalty),
* ``f3`` sums ``(d(x_i, x_{i+2}) - c) ** 2`` (helix-like i, i+2 spacing).

Every term reads distances only, so all of them are invariant under rigid
motions of the conformation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import distance_matrix

PRESETS = {
    "test1": (0.1, 1.2, 0.1),
    "test2": (0.1, 1.0, 0.1),
    "test3": (0.5, 1.0, 0.1),
    "test4": (0.1, 1.0, 0.5),
}


@dataclass(frozen=True)
class ObjectiveParams:
    gamma1: float = 0.1
    gamma2: float = 1.0
    gamma3: float = 0.1
    th: float = 4.30
    c: float = 5.50

    def __post_init__(self):
        if min(self.gamma1, self.gamma2, self.gamma3) < 0:
            raise ValueError("weights must be non-negative")
        if not (self.th > 0 and self.c > 0):
            raise ValueError("th and c must be positive")

    @classmethod
    def preset(cls, name, **kwargs):
        try:
            g1, g2, g3 = PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown weight preset {name!r}") from None
        return cls(g1, g2, g3, **kwargs)

    @property
    def weights(self):
        return (self.gamma1, self.gamma2, self.gamma3)


def exp_plus(t: float) -> float:
    """``exp(t)`` for ``t >= 0`` and ``0`` otherwise."""
    return math.exp(t) if t >= 0 else 0.0


@lru_cache(maxsize=64)
def _pairs(n, min_sep):
    i, j = np.triu_indices(n, k=min_sep)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


def _term_values(D, th, c):
    n = len(D)
    i1, j1 = _pairs(n, 3)
    f1 = float(D[i1, j1].sum())
    i2, j2 = _pairs(n, 2)
    t = th - D[i2, j2]
    f2 = float(np.exp(t[t >= 0]).sum())
    d2 = np.diagonal(D, offset=2)
    f3 = float(((d2 - c) ** 2).sum())
    return f1, f2, f3


def compactness_term(X) -> float:
    """Sum of ``d(x_i, x_j)`` over pairs with ``j - i >= 3``."""
    return _term_values(distance_matrix(X), 1.0, 1.0)[0]


def clash_term(X, th: float = 4.30) -> float:
    """Sum of ``exp_plus(th - d(x_i, x_j))`` over pairs with ``j - i >= 2``.

    A pair at exactly ``d == th`` contributes ``exp(0) = 1``, so the term
    vanishes only when every such pair is strictly farther apart than ``th``.
    """
    return _term_values(distance_matrix(X), th, 1.0)[1]


def helix_term(X, c: float = 5.50) -> float:
    """Sum of squared deviations of the ``(i, i + 2)`` distances from ``c``."""
    return _term_values(distance_matrix(X), 1.0, c)[2]


def terms(X, params: ObjectiveParams = ObjectiveParams()):
    """Return ``(f1, f2, f3)`` sharing a single distance matrix."""
    return _term_values(distance_matrix(X), params.th, params.c)


def evaluate(X, params: ObjectiveParams = ObjectiveParams()) -> float:
    f1, f2, f3 = terms(X, params)
    return params.gamma1 * f1 + params.gamma2 * f2 + params.gamma3 * f3
