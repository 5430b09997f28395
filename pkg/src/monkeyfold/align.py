"""Optimal rigid superposition (Kabsch) and RMSD of paired point sets."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RigidTransform:
    rotation: np.ndarray
    translation: np.ndarray

    def apply(self, P):
        return np.asarray(P, dtype=float) @ self.rotation.T + self.translation

    __call__ = apply

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))


def _paired(P, Q):
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3 or Q.ndim != 2 or Q.shape[1] != 3:
        raise ValueError("point sets must have shape (n, 3)")
    if len(P) != len(Q):
        raise ValueError(f"point sets differ in length ({len(P)} != {len(Q)})")
    if len(P) == 0:
        raise ValueError("point sets are empty")
    return P, Q


def superpose(P, Q) -> RigidTransform:
    """Proper rigid motion ``T`` minimizing ``sum |T(P_i) - Q_i|^2``.

    Reflections are excluded. For rank-deficient input (collinear or
    coincident points) the rotation is not unique; a minimizer is still
    returned and a ``RuntimeWarning`` is issued.
    """
    P, Q = _paired(P, Q)
    p0 = P.mean(axis=0)
    q0 = Q.mean(axis=0)
    H = (P - p0).T @ (Q - q0)
    U, S, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    if d == 0:
        d = 1.0
    R = Vt.T @ np.diag([1.0, 1.0, d]) @ U.T
    if S[0] == 0 or S[1] <= 1e-12 * S[0]:
        warnings.warn("degenerate point set: superposition is not unique", RuntimeWarning, stacklevel=2)
    return RigidTransform(R, q0 - R @ p0)


def rmsd(P, Q) -> float:
    """Root mean square deviation after optimal proper superposition."""
    P, Q = _paired(P, Q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        T = superpose(P, Q)
    diff = T.apply(P) - Q
    return float(np.sqrt((diff * diff).sum() / len(P)))


def deviations(P, Q):
    """Per-point distances after superposition, as a plain list."""
    P, Q = _paired(P, Q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        T = superpose(P, Q)
    return np.linalg.norm(T.apply(P) - Q, axis=1).tolist()
