import math
import pickle

import numpy as np
import pytest

from oracles import random_unimodular
from ptscatter import ContractViolation, EverywhereFixed
from ptscatter.moebius import (
    INFINITY,
    HalfSpacePoint,
    MoebiusType,
    classify_mobius,
    dilate,
    fixed_points,
    hyperbolic_distance,
    invert,
    mobius_apply,
    mobius_apply_halfspace,
    translate,
)


def via_elementary_maps(m, p):
    """Poincare extension assembled from translations, one inversion and a dilation."""
    (a, b), (c, d) = np.asarray(m, dtype=complex) / np.sqrt(np.linalg.det(m))
    if c == 0:
        return translate(dilate(p, a / d), b / d)
    return translate(dilate(invert(translate(p, d / c)), 1 / c**2), a / c)


def test_halfspace_closed_form_against_elementary_maps():
    rng = np.random.default_rng(12)
    for _ in range(50):
        m = random_unimodular(rng)
        p = HalfSpacePoint(complex(*rng.normal(size=2)), rng.uniform(0.1, 2))
        got, ref = mobius_apply_halfspace(m, p), via_elementary_maps(m, p)
        assert abs(got.w - ref.w) <= 1e-10 * max(1, abs(ref.w))
        assert abs(got.z - ref.z) <= 1e-10 * max(1, ref.z)


def test_upper_triangular_halfspace():
    p = HalfSpacePoint(0.5 + 0.5j, 0.3)
    m = np.array([[2, 1j], [0, 0.5]])
    got, ref = mobius_apply_halfspace(m, p), via_elementary_maps(m, p)
    assert got.w == pytest.approx(ref.w) and got.z == pytest.approx(ref.z)


def test_halfspace_extends_boundary_map():
    rng = np.random.default_rng(13)
    m = random_unimodular(rng)
    w = 0.4 - 0.7j
    assert mobius_apply_halfspace(m, HalfSpacePoint(w, 1e-9)).w == pytest.approx(mobius_apply(m, w), abs=1e-7)


def test_riemann_sphere_totality():
    m = np.array([[1, 2], [1, -1]])
    assert mobius_apply(m, INFINITY) == 1
    assert mobius_apply(m, 1) is INFINITY
    assert mobius_apply(np.array([[1, 2], [0, 1]]), INFINITY) is INFINITY
    with pytest.raises(ContractViolation):
        mobius_apply(np.zeros((2, 2)), 1)


def test_infinity_survives_pickling():
    assert pickle.loads(pickle.dumps(INFINITY)) is INFINITY


def test_distance_golden():
    assert hyperbolic_distance(HalfSpacePoint(0, 1), HalfSpacePoint(0, math.e)) == pytest.approx(1.0)
    assert hyperbolic_distance(HalfSpacePoint(1j, 2), HalfSpacePoint(1j, 2)) == 0
    # nearby points keep full relative accuracy
    d = hyperbolic_distance(HalfSpacePoint(0, 1), HalfSpacePoint(1e-9, 1))
    assert d == pytest.approx(1e-9, rel=1e-12)


def test_halfspace_height_must_be_positive():
    with pytest.raises(ContractViolation):
        HalfSpacePoint(0, 0)


def test_fixed_point_cases():
    assert fixed_points(np.diag([2, 0.5])) == (INFINITY, 0)
    w, other = fixed_points(np.array([[1, 3], [0, 1]]))
    assert w is INFINITY and other is None
    w, other = fixed_points(np.array([[2, -1], [1, 0]]))  # tr = 2, fixed point 1
    assert w == pytest.approx(1) and other is None
    with pytest.raises(EverywhereFixed):
        fixed_points(-np.eye(2))


def test_fixed_points_are_fixed_and_stable():
    # tiny m21 would cancel catastrophically in the textbook quadratic formula
    m = np.array([[2, 1], [1e-12, 0.5 + 5e-13]])
    m = m / np.sqrt(np.linalg.det(m))
    for fp in fixed_points(m):
        assert abs(mobius_apply(m, fp) - fp) <= 1e-12 * max(1, abs(fp))


@pytest.mark.parametrize(
    "m, label, param",
    [
        (np.eye(2), MoebiusType.IDENTITY, 0),
        (-np.eye(2), MoebiusType.IDENTITY, 0),
        (np.array([[1, 1], [0, 1]]), MoebiusType.PARABOLIC, 1),
        (np.array([[-1, 3], [0, -1]]), MoebiusType.PARABOLIC, -3),
        (np.diag([math.exp(0.5), math.exp(-0.5)]), MoebiusType.HYPERBOLIC, 1),
        (-np.diag([math.exp(0.5), math.exp(-0.5)]), MoebiusType.HYPERBOLIC, 1),
        (np.array([[0.5, -math.sqrt(3) / 2], [math.sqrt(3) / 2, 0.5]]), MoebiusType.ELLIPTIC, 2 * math.pi / 3),
        (np.diag([2 * np.exp(1j), np.exp(-1j) / 2]), MoebiusType.LOXODROMIC, 2 * math.log(2) + 2j),
    ],
)
def test_classification_golden(m, label, param):
    cls = classify_mobius(m)
    assert cls.label is label
    assert cls.canonical_parameter == pytest.approx(param, abs=1e-12)


def test_classification_needs_unimodular():
    with pytest.raises(ContractViolation):
        classify_mobius(2 * np.eye(2))
