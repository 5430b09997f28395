import math
import warnings

import numpy as np
import pytest

from monkeyfold.align import RigidTransform, deviations, rmsd, superpose


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def rot_z(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def test_identity_and_translation():
    rng = np.random.default_rng(0)
    P = rng.normal(size=(10, 3))
    assert rmsd(P, P) == pytest.approx(0, abs=1e-12)
    assert rmsd(P, P + [5, -3, 2]) < 1e-12
    T = RigidTransform.identity()
    assert np.array_equal(T(P), P)


def test_recovers_rigid_motion():
    rng = np.random.default_rng(1)
    for _ in range(50):
        P = rng.normal(scale=10, size=(12, 3))
        R, t = random_rotation(rng), rng.normal(scale=20, size=3)
        T = superpose(P, P @ R.T + t)
        np.testing.assert_allclose(T.rotation, R, atol=1e-9)
        np.testing.assert_allclose(T.translation, t, atol=1e-9)
        np.testing.assert_allclose(T.rotation @ T.rotation.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(T.rotation) == pytest.approx(1.0, abs=1e-12)


def test_known_value():
    # a uniform scaling cannot be undone by a rigid motion
    P = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
    Q = np.array([[1.0, 0, 0], [-1.0, 0, 0]]) * 2
    assert rmsd(P, Q) == pytest.approx(1.0)


def test_reflection_excluded():
    rng = np.random.default_rng(2)
    P = rng.normal(size=(8, 3))
    P -= P.mean(axis=0)
    mirror = P * [1, 1, -1]
    T = superpose(P, mirror)
    assert np.linalg.det(T.rotation) == pytest.approx(1.0)
    assert rmsd(P, mirror) > 1e-3


def collinear_oracle(P, Q, steps=3600):
    # brute force over rotations in the plane of the points
    best = math.inf
    Pc, Qc = P - P.mean(axis=0), Q - Q.mean(axis=0)
    for a in np.linspace(0, 2 * math.pi, steps, endpoint=False):
        d = Pc @ rot_z(a).T - Qc
        best = min(best, math.sqrt((d * d).sum() / len(P)))
    return best


def test_collinear_input_matches_grid_search():
    P = np.array([[0.0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]])
    Q = np.array([[0.0, 0, 0], [0, 2, 0], [0, 4, 0], [0, 6, 0]])
    want = collinear_oracle(P, Q)
    assert want == pytest.approx(math.sqrt(1.25), abs=1e-6)
    assert rmsd(P, Q) == pytest.approx(want, abs=1e-6)
    with pytest.warns(RuntimeWarning):
        superpose(P, Q)


def test_deviations():
    P = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]])
    d = deviations(P, P + 3)
    assert len(d) == 3 and max(d) < 1e-12
    rng = np.random.default_rng(3)
    A, B = rng.normal(size=(2, 9, 3))
    d = np.array(deviations(A, B))
    assert math.sqrt((d * d).mean()) == pytest.approx(rmsd(A, B))


def test_errors():
    with pytest.raises(ValueError):
        rmsd(np.zeros((3, 3)), np.zeros((4, 3)))
    with pytest.raises(ValueError):
        rmsd(np.zeros((3, 2)), np.zeros((3, 2)))
    with pytest.raises(ValueError):
        rmsd(np.zeros((0, 3)), np.zeros((0, 3)))


def test_rmsd_symmetric():
    rng = np.random.default_rng(4)
    A, B = rng.normal(size=(2, 15, 3))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert rmsd(A, B) == pytest.approx(rmsd(B, A), rel=1e-10)
