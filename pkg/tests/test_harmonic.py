import numpy as np
import pytest

from threespheres.errors import NonHarmonic, SingularPoint, StencilOutOfDomain
from threespheres.geometry import solve_inversion_center
from threespheres.harmonic import (
    HarmonicPolynomial,
    KelvinFunction,
    PolynomialEvaluator,
    harmonicity_defect,
    holomorphic_polynomial,
    laplacian_residual,
    random_harmonic_polynomial,
)


def lap_coeff_ratio(poly):
    lap = poly.laplacian_coefficients()
    if not lap:
        return 0.0
    scale = max(abs(c) for c in poly.terms.values())
    return max(abs(c) for c in lap.values()) / scale


def test_low_degree_always_harmonic():
    f = random_harmonic_polynomial(2, 1, seed=0)
    assert f.degree <= 1
    assert set(f.terms) <= {(0, 0), (1, 0), (0, 1)}


def test_synthesis_laplacian_residual():
    for n in (2, 3, 4):
        for seed in range(5):
            f = random_harmonic_polynomial(n, 8, seed=seed)
            assert lap_coeff_ratio(f) < 1e-13


def test_classical_harmonic_accepted():
    f = HarmonicPolynomial(2, {(2, 0): 1.0, (0, 2): -1.0})
    assert f.degree == 2
    pts = np.array([[0.3, 0.4], [1.0, 2.0]])
    np.testing.assert_allclose(f(pts).real, [0.09 - 0.16, 1.0 - 4.0])


def test_non_harmonic_rejected():
    with pytest.raises(NonHarmonic):
        HarmonicPolynomial(2, {(2, 0): 1.0, (0, 2): 1.0})  # |y|^2


def test_determinism():
    a = random_harmonic_polynomial(3, 6, seed=42)
    b = random_harmonic_polynomial(3, 6, seed=42)
    assert a.terms == b.terms
    c = random_harmonic_polynomial(3, 6, seed=43)
    assert a.terms != c.terms


def test_homogeneous_parts_are_harmonic():
    f = random_harmonic_polynomial(3, 6, seed=1)
    parts = f.homogeneous_parts()
    recomposed = {}
    for k, part in parts.items():
        assert lap_coeff_ratio(part) < 1e-13
        for e, c in part.terms.items():
            assert sum(e) == k
            recomposed[e] = recomposed.get(e, 0.0) + c
    assert set(recomposed) == set(f.terms)


def test_json_roundtrip():
    f = random_harmonic_polynomial(3, 5, seed=11)
    g = HarmonicPolynomial.from_json(f.to_json())
    assert g.dimension == f.dimension
    assert g.terms == f.terms


def test_evaluator_matches_single_evaluation(rng):
    polys = [random_harmonic_polynomial(2, 6, seed=s) for s in range(4)]
    ev = PolynomialEvaluator(polys)
    pts = rng.uniform(-1, 1, size=(50, 2))
    vals = ev.values(pts)
    for j, p in enumerate(polys):
        np.testing.assert_allclose(vals[:, j], p(pts), rtol=1e-13, atol=1e-13)
    sq = ev.squared_values(pts)
    np.testing.assert_allclose(sq, np.abs(vals) ** 2, rtol=1e-13)


def test_kelvin_constant_n2_is_one(rng):
    inv = solve_inversion_center(0.5, 0.2, dimension=2)
    one = HarmonicPolynomial(2, {(0, 0): 1.0})
    kel = KelvinFunction(one, inv)
    pts = rng.uniform(-0.6, 0.6, size=(20, 2))
    np.testing.assert_allclose(kel(pts), np.ones(20), rtol=1e-14)


def test_kelvin_constant_n3_prefactor(rng):
    inv = solve_inversion_center(0.5, 0.2, dimension=3)
    one = HarmonicPolynomial(3, {(0, 0, 0): 1.0})
    kel = KelvinFunction(one, inv)
    pts = rng.uniform(-0.5, 0.5, size=(20, 3))
    expected = inv.rho / np.linalg.norm(pts - inv.a, axis=1)
    np.testing.assert_allclose(kel(pts).real, expected, rtol=1e-14)
    # rho/|y-a| is harmonic in R^3 away from a: check by the FD oracle
    for y in pts[:5]:
        assert harmonicity_defect(kel, y, 1e-3) < 1e-5


def test_kelvin_n2_is_conjugated_composition(rng):
    from threespheres.geometry import inversion_map

    inv = solve_inversion_center(0.5, 0.2, dimension=2)
    f = random_harmonic_polynomial(2, 5, seed=9)
    kel = KelvinFunction(f, inv)
    pts = rng.uniform(-0.6, 0.6, size=(30, 2))
    np.testing.assert_allclose(kel(pts), np.conj(f(inversion_map(inv, pts))),
                               rtol=1e-14)


def test_kelvin_singular_point():
    inv = solve_inversion_center(0.5, 0.2, dimension=2)
    f = random_harmonic_polynomial(2, 3, seed=2)
    kel = KelvinFunction(f, inv)
    with pytest.raises(SingularPoint):
        kel(inv.a)
    with pytest.raises(StencilOutOfDomain):
        laplacian_residual(kel, inv.a + np.array([1e-3, 0.0]), 1e-3)


def test_laplacian_residual_exact_cases():
    f = HarmonicPolynomial(2, {(2, 0): 1.0, (0, 2): -1.0})
    assert laplacian_residual(f, np.array([0.3, 0.2]), 1e-3) < 1e-9

    def norm2(pts):
        pts = np.asarray(pts)
        return np.einsum("ij,ij->i", pts, pts)

    resid = laplacian_residual(norm2, np.array([0.3, 0.2]), 1e-3)
    assert abs(resid - 4.0) < 1e-6  # Laplacian of |y|^2 is 2n
    assert harmonicity_defect(norm2, np.array([0.3, 0.2]), 1e-3) > 0.5


def test_kelvin_harmonicity_defect_corpus(rng):
    inv3 = solve_inversion_center(0.5, 0.2, dimension=3)
    f = random_harmonic_polynomial(3, 4, seed=5)
    kel = KelvinFunction(f, inv3)
    for _ in range(100):
        y = rng.standard_normal(3)
        y *= 0.95 * rng.uniform(0, 1) ** (1 / 3) / np.linalg.norm(y)
        assert harmonicity_defect(kel, y, 1e-3) < 1e-5


def test_holomorphic_polynomial_expansion(rng):
    coeffs = [1.0, 2.0 - 1.0j, 0.0, 0.5j]
    f = holomorphic_polynomial(coeffs)
    pts = rng.uniform(-1, 1, size=(25, 2))
    z = pts[:, 0] + 1j * pts[:, 1]
    expected = sum(c * z ** k for k, c in enumerate(coeffs))
    np.testing.assert_allclose(f(pts), expected, rtol=1e-13, atol=1e-13)
    assert lap_coeff_ratio(f) < 1e-13
