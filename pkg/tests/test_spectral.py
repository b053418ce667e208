import cmath
import math

import numpy as np
import pytest
from scipy.optimize import fsolve

from oracles import square_well_kappas, square_well_node_count
from ptscatter import (
    ContractViolation,
    ExpGrating,
    PiecewiseConstant,
    PTDimer,
    Segment,
    Slab,
    TransferMatrix,
    coefficients_from_transfer,
    transfer_of_potential,
)
from ptscatter.spectral import (
    Box,
    InvisibilityLabel,
    SingularityKind,
    classify_invisibility,
    find_bound_states,
    find_lasing_threshold,
    find_spectral_singularities,
    phasor_residuals,
    pt_symmetry_residual,
    scan_spectrum,
    winding_number,
)

# threshold of the slab U = 1 + i g on [0, 1], from the closed-form oracle below
G_STAR = 2.3577813849333245
K_STAR = 1.2189261271020364


def oracle_m22(u, k, d=1.0):
    q = cmath.sqrt(k * k - u)
    return cmath.exp(1j * k * d) * (cmath.cos(q * d) - 1j * (k * k + q * q) / (2 * k) * cmath.sin(q * d) / q)


def gain_slab(g):
    return PiecewiseConstant((Segment(0.0, 1.0, complex(1.0, g)),))


def test_threshold_oracle_is_frozen():
    def eqs(x):
        v = oracle_m22(complex(1, x[1]), x[0])
        return [v.real, v.imag]

    k, g = fsolve(eqs, [1.2, 2.3], xtol=1e-12)
    assert k == pytest.approx(K_STAR, abs=1e-10)
    assert g == pytest.approx(G_STAR, abs=1e-10)


def test_lasing_threshold_search():
    g, k = find_lasing_threshold(gain_slab, np.linspace(0.5, 4.0, 15), 0.5, 3.0)
    assert g == pytest.approx(G_STAR, abs=1e-9)
    assert k == pytest.approx(K_STAR, abs=1e-9)


def test_loss_slab_never_lases():
    # absorption (negative imaginary part) cannot produce a real zero of m22
    assert find_spectral_singularities(PiecewiseConstant((Segment(0, 1, 1 - G_STAR * 1j),)), 0.2, 5) == []


def test_singularity_found_at_threshold():
    roots = find_spectral_singularities(gain_slab(G_STAR), 0.5, 3.0)
    assert len(roots) == 1
    assert roots[0].kind is SingularityKind.SPECTRAL_SINGULARITY
    assert roots[0].k_star.real == pytest.approx(K_STAR, abs=1e-9)
    assert roots[0].residual <= 1e-8


def test_scan_marks_singular_rows():
    scan = scan_spectrum(gain_slab(G_STAR), K_STAR, K_STAR + 1, 2)
    assert scan.rows[0].singular and scan.rows[0].coefficients is None
    assert not scan.rows[1].singular


def test_scan_parallel_matches_serial():
    p = PiecewiseConstant.from_layers([(2 + 1j, 0.5), (-1, 0.7)])
    serial = scan_spectrum(p, 0.5, 3, 12)
    parallel = scan_spectrum(p, 0.5, 3, 12, workers=2)
    assert np.array_equal(serial.k, parallel.k)
    for a, b in zip(serial.rows, parallel.rows):
        assert np.array_equal(a.matrix.array, b.matrix.array)


def test_scan_contract():
    with pytest.raises(ContractViolation):
        scan_spectrum(Slab(1, 1), 2.0, 1.0, 5)


def test_winding_number_counts_zeros():
    box = Box(-1, 1, 0.1, 2)
    assert round(winding_number(lambda z: (z - 0.3j - 0.2) * (z - 1.5j), box)) == 2
    assert round(winding_number(lambda z: z - 5, box)) == 0


@pytest.mark.parametrize("depth", [4.0, 30.0, 100.0])
def test_square_well_bound_states(depth):
    roots = find_bound_states(Slab(-depth, 1.0), Box(-3.0, 3.0, 1e-3, math.sqrt(depth) + 1))
    expected = square_well_kappas(depth, 1.0)
    assert len(expected) == square_well_node_count(depth, 1.0)
    assert len(roots) == len(expected)
    for r, kappa in zip(sorted(roots, key=lambda r: r.k_star.imag), expected):
        assert abs(r.k_star.real) <= 1e-8
        assert r.k_star.imag == pytest.approx(kappa, abs=1e-8)
        assert r.kind is SingularityKind.BOUND_STATE


def test_barrier_has_no_bound_states():
    assert find_bound_states(Slab(4.0, 1.0), Box(-3.0, 3.0, 0.05, 3.0)) == []


def test_pt_dimer_symmetry_checks():
    m = transfer_of_potential(PTDimer(1.0, 3.0, 0.7), 1.6)
    assert pt_symmetry_residual(m) <= 1e-9
    assert max(phasor_residuals(coefficients_from_transfer(m))) <= 1e-9
    m = transfer_of_potential(Slab(1 + 3j, 0.7), 1.6)
    assert pt_symmetry_residual(m) > 1e-3


@pytest.mark.parametrize(
    "matrix, label",
    [
        ([[1, 0.5], [0, 1]], InvisibilityLabel.LEFT_INVISIBLE),
        ([[1, 0], [0.5j, 1]], InvisibilityLabel.RIGHT_INVISIBLE),
        ([[2, 0.5], [0, 0.5]], InvisibilityLabel.LEFT_REFLECTIONLESS),
        ([[0.5, 0], [1, 2]], InvisibilityLabel.RIGHT_REFLECTIONLESS),
        ([[1, 0], [0, 1]], InvisibilityLabel.NOT_INVISIBLE),
        ([[2, 1], [1, 1]], InvisibilityLabel.NOT_INVISIBLE),
    ],
)
def test_invisibility_labels(matrix, label):
    verdict = classify_invisibility(TransferMatrix.from_array(matrix))
    assert verdict.label is label
    assert verdict.defective == (label is not InvisibilityLabel.NOT_INVISIBLE)


def test_invisibility_rejects_non_unimodular():
    with pytest.raises(ContractViolation):
        classify_invisibility(TransferMatrix.from_array([[2, 0], [0, 2]]))


def test_weak_grating_is_left_invisible():
    m = transfer_of_potential(ExpGrating(0.02, 1.0, 2 * math.pi), 1.0)
    verdict = classify_invisibility(m, tol_unit=1e-3)
    assert verdict.label is InvisibilityLabel.LEFT_INVISIBLE
    assert abs(m.m12) > 1e-3


def test_grating_reflection_is_one_sided():
    for alpha in (0.05, 0.1, 0.2):
        m = transfer_of_potential(ExpGrating(alpha, 1.0, 2 * math.pi), 1.0)
        # m21 is third order in alpha, m12 first order
        assert abs(m.m21) < 0.1 * alpha**3
        assert abs(m.m12) > 2 * alpha
