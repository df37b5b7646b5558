import math

import numpy as np
import pytest

from threespheres.errors import (
    BetaOutOfRange,
    DeltaOutOfRange,
    NonpositiveL,
    OutOfRange,
    PreconditionViolated,
)
from threespheres.geometry import CorrelatedFamily
from threespheres.harmonic import HarmonicPolynomial, random_harmonic_polynomial
from threespheres.quadrature import ball_volume
from threespheres.verify import (
    derivative_identity_check,
    embedded_bound_check,
    embedding_identity_check,
    gradient_identity_check,
    holomorphic_variant_check,
    log_convexity_check,
    three_balls_check,
    three_spheres_check,
    transfer_identity_check,
)

ONE2 = HarmonicPolynomial(2, {(0, 0): 1.0})
Y1_2 = HarmonicPolynomial(2, {(1, 0): 1.0})
ONE3 = HarmonicPolynomial(3, {(0, 0, 0): 1.0})


class Norm2:
    degree = 2

    def __call__(self, pts):
        pts = np.asarray(pts)
        return np.einsum("ij,ij->i", pts, pts)


def test_gradient_identity_constant():
    reps = gradient_identity_check(ONE2, [0.3, 0.1], 0.25)
    by = {r.name: r for r in reps}
    assert by["gradient_identity_eq2"].passed
    assert by["gradient_identity_eq3"].passed
    # d a / d r = |S^1| r for the constant
    assert abs(by["gradient_identity_eq3"].rhs - 2 * math.pi * 0.25) < 1e-12


def test_gradient_identity_coordinate():
    reps = gradient_identity_check(Y1_2, [0.2, -0.3], 0.3, e=[1.0, 0.0])
    assert all(r.passed for r in reps)
    # a(x, r, y1) = x1 nu_2 r^2, so the directional derivative is nu_2 r^2
    eq2 = [r for r in reps if r.name.endswith("eq2")][0]
    assert abs(eq2.lhs - ball_volume(2) * 0.09) < 1e-7


def test_gradient_identity_random_and_nonharmonic(rng):
    for n in (2, 3):
        f = random_harmonic_polynomial(n, 6, seed=3)
        x = np.zeros(n)
        x[0] = 0.25
        assert all(r.passed for r in gradient_identity_check(f, x, 0.3))
        # the identities hold for any continuous f, harmonic or not
        assert all(r.passed for r in gradient_identity_check(Norm2(), x, 0.3))


def test_derivative_identity_constant_and_polys(rng):
    fam = CorrelatedFamily.create([0.5, 0.0], 0.2)
    for f in (ONE2, Y1_2, Norm2(), random_harmonic_polynomial(2, 8, seed=4)):
        reps = derivative_identity_check(f, fam, 0.3)
        assert {r.name for r in reps} == {"derivative_identity_eq5",
                                          "derivative_identity_eq13"}
        assert all(r.passed for r in reps)


def test_derivative_identity_many_t(rng):
    fam = CorrelatedFamily.create([0.4, 0.1, 0.0], 0.3)
    f = random_harmonic_polynomial(3, 6, seed=5)
    for t in np.linspace(0.05, 0.95, 20) * fam.x_norm:
        assert all(r.passed for r in derivative_identity_check(f, fam, t))


def test_derivative_identity_requires_interior_t():
    fam = CorrelatedFamily.create([0.5, 0.0], 0.2)
    with pytest.raises(OutOfRange):
        derivative_identity_check(ONE2, fam, 0.5)


def test_transfer_identity():
    fam2 = CorrelatedFamily.create([0.5, 0.0], 0.2)
    for f in (ONE2, Y1_2):
        rep = transfer_identity_check(f, fam2, 0.25)
        assert rep.passed
        assert abs(rep.ratio - 1) < 1e-8
    fam3 = CorrelatedFamily.create([0.5, 0.0, 0.0], 0.2)
    f = random_harmonic_polynomial(3, 8, seed=6)
    rep = transfer_identity_check(f, fam3, 0.35)
    assert rep.passed and abs(rep.ratio - 1) < 1e-8


def test_transfer_identity_harsh_geometry():
    fam = CorrelatedFamily.create([0.7, 0.0], 0.25)  # |a| close to 1
    f = random_harmonic_polynomial(2, 8, seed=7)
    rep = transfer_identity_check(f, fam, 0.5 * 0.7)
    assert rep.passed and abs(rep.ratio - 1) < 1e-8


def test_log_convexity_power_equality_and_counterexample():
    grid = np.linspace(0.1, 0.9, 8)
    rep = log_convexity_check(lambda r: r ** 3, grid)
    assert rep.passed
    assert abs(rep.margin) < 1e-12  # exact log-linear: equality
    rep = log_convexity_check(lambda r: 2 - r, grid)
    assert not rep.passed
    assert rep.margin < -1e-3
    with pytest.raises(NonpositiveL):
        log_convexity_check(lambda r: r - 0.5, grid)
    with pytest.raises(OutOfRange):
        log_convexity_check(lambda r: r, [0.3, 0.2, 0.5])


def test_log_convexity_of_harmonic_l2(rng):
    from threespheres.quadrature import SphereRule, l2_sphere_norm

    for n in (2, 3):
        f = random_harmonic_polynomial(n, 8, seed=8)
        rule = SphereRule.product(n, 16)

        def L(r):
            return complex(l2_sphere_norm(f, np.zeros(n), r, rule).value).real

        rep = log_convexity_check(L, np.linspace(0.05, 0.95, 12))
        assert rep.passed


def test_three_spheres_endpoint_ratio_one():
    rep = three_spheres_check(ONE2, [0.5, 0.0], 0.2, t=0.5, beta="alpha")
    assert rep.passed
    assert abs(rep.ratio - 1.0) < 1e-12
    assert abs(rep.exponent_used - 1.0) < 1e-12


def test_three_spheres_corpus(rng):
    for n in (2, 3):
        for seed in range(5):
            f = random_harmonic_polynomial(n, 8, seed=seed)
            x = np.zeros(n)
            x[0] = rng.uniform(0.2, 0.6)
            r = rng.uniform(0.05, 1 - x[0] - 0.1)
            for t in (0.3 * x[0], 0.7 * x[0], x[0]):
                rep = three_spheres_check(f, x, r, t)
                assert rep.passed, (n, seed, t, rep)
                assert rep.lhs <= rep.rhs * (1 + 1e-9)


def test_three_spheres_beta_validation_and_negative_control():
    f = random_harmonic_polynomial(2, 6, seed=11)
    with pytest.raises(BetaOutOfRange):
        three_spheres_check(f, [0.5, 0.0], 0.2, t=0.25, beta=0.5)
    # at t = |x| the sharp exponent is 1; any beta > 1 must produce a
    # genuine violation since the inner term is strictly below the outer
    rep = three_spheres_check(f, [0.5, 0.0], 0.2, t=0.5, beta=1.05,
                              unchecked_beta=True)
    assert not rep.passed
    assert rep.lhs > rep.rhs


def test_three_spheres_alpha_mode(rng):
    f = random_harmonic_polynomial(2, 8, seed=12)
    rep = three_spheres_check(f, [0.5, 0.0], 0.2, t=0.25, beta="alpha")
    assert rep.passed


def test_holomorphic_variant():
    # constants and pure powers z^k up to degree 6
    for coeffs in ([1.0],) + tuple([0.0] * k + [1.0] for k in range(1, 7)):
        rep = holomorphic_variant_check(coeffs, [0.5, 0.0], 0.2, 0.25)
        assert rep.passed, coeffs
    rep = holomorphic_variant_check([1.0, 1.0j, -0.5], [0.4, 0.2], 0.25, 0.2)
    assert rep.passed
    # negative control with inflated exponent at the endpoint
    x_norm = math.hypot(0.5, 0.0)
    rep = holomorphic_variant_check([1.0, 0.3], [0.5, 0.0], 0.2, x_norm,
                                    beta=1.05, unchecked_beta=True)
    assert not rep.passed


def test_three_balls_constant_and_corpus(rng):
    rep = three_balls_check(ONE2, [0.5, 0.0], 0.2, 0.25)
    assert rep.passed
    assert abs(rep.exponent_used - 0.006203772525307899) < 1e-12
    for n in (2, 3):
        for seed in range(3):
            u = random_harmonic_polynomial(n, 8, seed=seed)
            x0 = np.zeros(n)
            x0[0] = 0.5
            rep = three_balls_check(u, x0, 0.2, 0.25)
            assert rep.passed, (n, seed)


def test_three_balls_delta_validation_and_small_delta():
    u = random_harmonic_polynomial(2, 6, seed=13)
    with pytest.raises(DeltaOutOfRange):
        three_balls_check(u, [0.5, 0.0], 0.2, 0.25, delta=0.5)
    rep = three_balls_check(u, [0.5, 0.0], 0.2, 0.25, delta=1e-9)
    assert rep.passed  # rhs tends to the full-ball mass, dominating lhs


def test_embedded_bounds_corpus_and_lambda_limit(rng):
    for n in (2, 3):
        u = random_harmonic_polynomial(n, 8, seed=14)
        x0 = np.zeros(n)
        x0[0] = 0.5
        for lam in (0.3, 0.6, 0.9):
            reps = embedded_bound_check(u, x0, 0.2, 0.25, lam)
            assert {r.name for r in reps} == {"embedded_bound_eq29",
                                              "embedded_bound_eq36",
                                              "embedded_bound_eq37"}
            assert all(r.passed for r in reps)
        # tiny lambda: lhs shrinks toward zero, trivially passing
        reps = embedded_bound_check(u, x0, 0.2, 0.25, 0.01)
        assert all(r.passed for r in reps)


def test_embedded_bound_preconditions():
    u = random_harmonic_polynomial(2, 4, seed=15)
    with pytest.raises(PreconditionViolated):
        embedded_bound_check(u, [0.2, 0.0], 0.1, 0.1, 0.5)
    with pytest.raises(OutOfRange):
        embedded_bound_check(u, [0.5, 0.0], 0.2, 0.25, 1.5)


def test_embedded_bound_scale_coherence():
    u = random_harmonic_polynomial(2, 6, seed=16)

    class Scaled:
        degree = u.degree

        def __call__(self, pts):
            return u(np.asarray(pts) / 2.0)

    reps1 = embedded_bound_check(u, [0.5, 0.0], 0.2, 0.25, 0.6, R=1.0)
    reps2 = embedded_bound_check(Scaled(), [1.0, 0.0], 0.4, 0.5, 0.6, R=2.0)
    r1 = [r for r in reps1 if r.name == "embedded_bound_eq36"][0]
    r2 = [r for r in reps2 if r.name == "embedded_bound_eq36"][0]
    assert abs(r1.ratio - r2.ratio) < 1e-12 * max(1.0, abs(r1.ratio))
    r1 = [r for r in reps1 if r.name == "embedded_bound_eq37"][0]
    r2 = [r for r in reps2 if r.name == "embedded_bound_eq37"][0]
    assert abs(r1.ratio - r2.ratio) < 1e-12 * max(1.0, abs(r1.ratio))


def test_embedding_identity_volume_oracle():
    for n in (2, 3):
        b = np.zeros(n)
        b[0] = 0.2
        one = lambda p: np.ones(len(p))
        rep = embedding_identity_check(one, b, 0.8, g_degree=0)
        assert rep.passed
        # the adopted reading reproduces the (n+5)-volume
        assert abs(rep.lhs - ball_volume(n + 5) * 0.8 ** (n + 5)) < 1e-10
        printed = embedding_identity_check(one, b, 0.8, g_degree=0,
                                           convention="printed")
        assert not printed.passed  # the as-printed slice radius overshoots
        assert printed.rhs > printed.lhs * 1.5
        # both readings coincide at l = 1
        at_one = embedding_identity_check(one, b * 0 + b, 1.0, g_degree=0,
                                          convention="printed")
        assert at_one.passed


def test_embedding_identity_analytic_and_odd():
    n = 2

    def g_extra_norm2(p):
        p = np.asarray(p)
        return np.einsum("ij,ij->i", p[:, n:], p[:, n:])

    # exact value: int_{B^7_l} |y|^2 over the last 5 coordinates
    from conftest import exact_ball_monomial

    exact = 5 * exact_ball_monomial(7, [2, 0, 0, 0, 0, 0, 0], 0.8)
    rep = embedding_identity_check(g_extra_norm2, [0.0, 0.0], 0.8, g_degree=2)
    assert rep.passed
    assert abs(rep.lhs - exact) < 1e-9 * exact

    def g_odd(p):
        return np.asarray(p)[:, n]  # first extra coordinate

    rep = embedding_identity_check(g_odd, [0.2, 0.0], 0.7, g_degree=1)
    assert rep.passed
    assert abs(rep.lhs) < 1e-12 and abs(rep.rhs) < 1e-12


def test_embedding_identity_generic_polynomial():
    n = 2

    def g(p):
        p = np.asarray(p)
        extra2 = np.einsum("ij,ij->i", p[:, n:], p[:, n:])
        return p[:, 0] ** 2 * extra2 + 0.5 * p[:, 1] ** 4 + 1.0

    rep = embedding_identity_check(g, [0.15, -0.1], 0.9, g_degree=6)
    assert rep.passed
    assert abs(rep.ratio - 1) < 1e-6


def test_sweep_rows_match_single_checks():
    from threespheres.sweep import (SweepConfig, run_sweep, sample_corpus,
                                    sample_geometries)

    cfg = SweepConfig.from_dict({
        "dimensions": [2],
        "corpus": {"count": 2, "max_degree": 6, "seed": 3},
        "geometry": {"count": 1, "seed": 5, "t_count": 2},
        "checks": ["three_spheres", "three_balls", "transfer_identity"],
    })
    reports, _ = run_sweep(cfg)
    polys = sample_corpus(2, 2, 6, 3)
    (x_vec, r), = sample_geometries(2, 1, 5)
    x_norm = float(np.linalg.norm(x_vec))
    rows = [r_ for r_ in reports if r_.name == "three_spheres_eq24"]
    # rows are ordered polynomial-major within each t
    t1 = 0.5 * x_norm
    direct = three_spheres_check(polys[0], x_vec, r, t1, degree=6)
    assert abs(rows[0].lhs - direct.lhs) < 1e-11 * max(1.0, direct.lhs)
    assert abs(rows[0].rhs - direct.rhs) < 1e-11 * max(1.0, direct.rhs)
    row3 = [r_ for r_ in reports if r_.name == "three_balls_eq27"][0]
    direct = three_balls_check(polys[0], x_vec, r, 0.5 * x_norm, degree=6)
    assert abs(row3.lhs - direct.lhs) < 1e-9 * max(1.0, direct.lhs)
    assert abs(row3.rhs - direct.rhs) < 1e-9 * max(1.0, direct.rhs)
    rowt = [r_ for r_ in reports if r_.name == "transfer_identity_eq22"][0]
    direct = transfer_identity_check(polys[0], CorrelatedFamily.create(x_vec, r),
                                     t1, degree=6)
    assert abs(rowt.lhs - direct.lhs) < 1e-10 * max(1.0, direct.lhs)
