"""Numerical checks for the derivative identities, the transfer identity,
log-convexity, and the three-spheres / three-balls inequalities.

Every check emits an :class:`InequalityReport`.  Upper-bound checks pass iff

    lhs <= rhs * (1 + tolerance) + stderr_budget,

identity checks iff |lhs - rhs| <= tolerance * max(|lhs|, |rhs|) +
stderr_budget.  The stderr budget is 4x the combined Monte Carlo standard
error and is zero for deterministic quadrature.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BetaOutOfRange,
    DeltaOutOfRange,
    NonpositiveL,
    OutOfRange,
    PreconditionViolated,
)
from .geometry import (
    Ball,
    CorrelatedFamily,
    correlated_radius_general,
    delta0,
)
from .harmonic import KelvinFunction, holomorphic_polynomial
from .quadrature import (
    BallRule,
    NormValue,
    SphereRule,
    analytic_degree,
    ball_integral,
    ball_volume,
    surface_integral,
    weighted_ball_integral_mua,
    weighted_surface_integral_sa,
)

__all__ = [
    "ConvexityGridReport",
    "InequalityReport",
    "derivative_identity_check",
    "embedded_bound_check",
    "embedding_identity_check",
    "gradient_identity_check",
    "holomorphic_variant_check",
    "log_convexity_check",
    "three_balls_check",
    "three_spheres_check",
    "transfer_identity_check",
]

log = logging.getLogger(__name__)

IDENTITY_FD_TOL = 1e-5
TRANSFER_TOL = 1e-8
INEQUALITY_TOL = 1e-9
EMBEDDING_TOL = 1e-6
CONVEXITY_SLACK = 1e-10

EMBED_CONSTANT = 405.0


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one verification: sides, ratio, exponent, pass decision.

    ``mode`` records which pass rule produced ``passed``: "upper" for the
    one-sided inequality form, "identity" for two-sided equality checks.
    """

    name: str
    lhs: float
    rhs: float
    ratio: float
    exponent_used: float
    tolerance: float
    stderr_budget: float
    passed: bool
    mode: str = "upper"
    n: int | None = None
    x_norm: float | None = None
    r: float | None = None
    t: float | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "exponent_used": self.exponent_used,
            "tolerance": self.tolerance,
            "stderr_budget": self.stderr_budget,
            "pass": self.passed,
            "mode": self.mode,
            "n": self.n,
            "x_norm": self.x_norm,
            "r": self.r,
            "t": self.t,
        }


def _ratio(lhs: float, rhs: float) -> float:
    if rhs == 0.0:
        return math.inf if lhs > 0 else 1.0
    return lhs / rhs


def upper_report(name, lhs, rhs, tolerance, budget=0.0, exponent=math.nan,
                 **meta) -> InequalityReport:
    lhs, rhs = float(lhs), float(rhs)
    passed = lhs <= rhs * (1 + tolerance) + budget
    return InequalityReport(name=name, lhs=lhs, rhs=rhs, ratio=_ratio(lhs, rhs),
                            exponent_used=float(exponent), tolerance=tolerance,
                            stderr_budget=float(budget), passed=bool(passed),
                            mode="upper", **meta)


def identity_report(name, lhs, rhs, tolerance, budget=0.0, exponent=math.nan,
                    scale_floor=0.0, **meta) -> InequalityReport:
    """Two-sided comparison; complex sides are recorded by magnitude but the
    pass decision uses the full complex gap.  ``scale_floor`` keeps the
    relative test meaningful when both sides nearly vanish."""
    gap = abs(complex(lhs) - complex(rhs))
    lhs, rhs = abs(complex(lhs)), abs(complex(rhs))
    scale = max(lhs, rhs, scale_floor, 1e-300)
    passed = gap <= tolerance * scale + budget
    return InequalityReport(name=name, lhs=lhs, rhs=rhs, ratio=_ratio(lhs, rhs),
                            exponent_used=float(exponent), tolerance=tolerance,
                            stderr_budget=float(budget), passed=bool(passed),
                            mode="identity", **meta)


@dataclass(frozen=True)
class ConvexityGridReport:
    """Triple-wise log-convexity scan over a radius grid."""

    radii: np.ndarray
    values: np.ndarray
    worst_triple: tuple
    margin: float
    tolerance: float
    passed: bool


def _degree_of(f, default: int = 8) -> int:
    return int(getattr(f, "degree", default))


def _abs2(f):
    def g(pts):
        v = np.asarray(f(pts))
        return v.real ** 2 + v.imag ** 2 if np.iscomplexobj(v) else v * v
    return g


def _sphere_rule(n, degree, kappa=None, digits=12, mc_samples=200_000, seed=0,
                 pole_order=4):
    if n <= 3:
        return SphereRule.product(n, analytic_degree(degree, kappa, digits,
                                                     pole_order))
    return SphereRule.monte_carlo(n, samples=mc_samples, seed=seed)


def _ball_rule(n, degree, kappa=None, digits=12, radial=32, mc_samples=200_000,
               seed=0):
    return BallRule(_sphere_rule(n, degree, kappa, digits, mc_samples, seed),
                    radial_points=radial)


def _wsa_sq(f, fam: CorrelatedFamily, center_norm: float, radius: float,
            degree: int, mc_samples: int, seed: int) -> NormValue:
    """int |f|^2 ds_a over the sphere at center_norm * e with given radius."""
    inv = fam.inversion
    kappa = (inv.a_norm - center_norm) / radius
    rule = _sphere_rule(fam.dimension, degree, kappa, mc_samples=mc_samples,
                        seed=seed)
    return weighted_surface_integral_sa(_abs2(f), center_norm * fam.e, radius,
                                        inv, rule)


# ---------------------------------------------------------------------------
# derivative identities


def gradient_identity_check(f, x, r: float, e=None, h: float = 1e-5,
                            degree: int | None = None) -> list[InequalityReport]:
    """Check the two ball-average derivative identities.

    The directional derivative of a(x, r, f) = int_{B_{x,r}} f equals
    int_{S_{x,r}} f (e . n) ds, and its radial derivative equals
    int_{S_{x,r}} f ds; both finite-difference derivatives (step ``h``) must
    match quadrature to relative 1e-5.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    deg = degree if degree is not None else _degree_of(f)
    if e is None:
        e = np.zeros(n)
        e[0] = 1.0
    else:
        e = np.asarray(e, dtype=float)
        e = e / np.linalg.norm(e)
    brule = _ball_rule(n, deg)
    srule = _sphere_rule(n, deg + 1)

    def vol(center, radius):
        return complex(ball_integral(f, Ball(center, radius), brule).value)

    fd_dir = (vol(x + h * e, r) - vol(x - h * e, r)) / (2 * h)
    fd_rad = (vol(x, r + h) - vol(x, r - h)) / (2 * h)

    def f_en(pts):
        normal = (pts - x) / r
        return np.asarray(f(pts)) * (normal @ e)

    quad_dir = complex(surface_integral(f_en, x, r, srule).value)
    quad_rad = complex(surface_integral(f, x, r, srule).value)
    # derivative-magnitude floor keeps the relative test sane when the
    # directional derivative vanishes by symmetry
    floor = 1e-3 * max(1.0, abs(quad_rad))
    meta = {"n": n, "x_norm": float(np.linalg.norm(x)), "r": float(r)}
    return [
        identity_report("gradient_identity_eq2", fd_dir, quad_dir,
                        IDENTITY_FD_TOL, scale_floor=floor, **meta),
        identity_report("gradient_identity_eq3", fd_rad, quad_rad,
                        IDENTITY_FD_TOL, scale_floor=floor, **meta),
    ]


def derivative_identity_check(f, fam: CorrelatedFamily, t: float,
                              h: float = 1e-5,
                              degree: int | None = None) -> list[InequalityReport]:
    """Check d/dt int_{B_{x_t,r_t}} f dy against the two surface forms.

    The curve form integrates f (e . n + r_t'); substituting the closed-form
    r_t' turns it into -(2|a| r_t)^{-1} int f [|y-a|^2 + R^2 - |y|^2] ds.
    Both must match the central finite difference of the family volume
    integral to relative 1e-5.
    """
    x_norm = fam.x_norm
    if not 0 < t < x_norm:
        raise OutOfRange("t must be interior to (0, |x|) for the central "
                         "difference")
    n = fam.dimension
    deg = degree if degree is not None else _degree_of(f)
    brule = _ball_rule(n, deg)
    srule = _sphere_rule(n, deg + 2)
    inv = fam.inversion

    def vol(s):
        return complex(ball_integral(f, fam.ball(s), brule).value)

    fd = (vol(t + h) - vol(t - h)) / (2 * h)

    rt = float(fam.radius(t))
    rpt = float(fam.radius_derivative(t))
    center = fam.center(t)

    def f_curve(pts):
        normal = (pts - center) / rt
        return np.asarray(f(pts)) * (normal @ fam.e + rpt)

    def f_weighted(pts):
        d = pts - inv.a
        bracket = (np.einsum("ij,ij->i", d, d) + inv.R ** 2
                   - np.einsum("ij,ij->i", pts, pts))
        return np.asarray(f(pts)) * bracket

    rhs5 = complex(surface_integral(f_curve, center, rt, srule).value)
    rhs13 = complex(surface_integral(f_weighted, center, rt, srule).value)
    rhs13 *= -1.0 / (2 * inv.a_norm * rt)
    floor = 1e-3 * max(1.0, abs(complex(surface_integral(f, center, rt,
                                                         srule).value)))
    meta = {"n": n, "x_norm": x_norm, "r": fam.r, "t": float(t)}
    return [
        identity_report("derivative_identity_eq5", fd, rhs5, IDENTITY_FD_TOL,
                        scale_floor=floor, **meta),
        identity_report("derivative_identity_eq13", fd, rhs13,
                        IDENTITY_FD_TOL, scale_floor=floor, **meta),
    ]


# ---------------------------------------------------------------------------
# transfer identity and log-convexity


def transfer_identity_check(f, fam: CorrelatedFamily, t: float,
                            degree: int | None = None,
                            mc_samples: int = 200_000,
                            seed: int = 0) -> InequalityReport:
    """Check L_2^2(r_t*, f*) = rho^2 (r_t/r_t*) int_{S_{x_t,r_t}} |f|^2 ds_a."""
    x_norm = fam.x_norm
    if not 0 < t <= x_norm * (1 + 1e-12):
        raise OutOfRange("t must lie in (0, |x|]")
    n = fam.dimension
    deg2 = 2 * (degree if degree is not None else _degree_of(f))
    inv = fam.inversion
    rt = float(fam.radius(t))
    rts = float(fam.image_radius(t))

    rhs_int = _wsa_sq(f, fam, t, rt, deg2, mc_samples, seed)
    rhs = inv.rho2 * (rt / rts) * rhs_int.real

    kelvin = KelvinFunction(f, inv)
    kappa = inv.a_norm / rts
    # |f(phi(y))|^2 has a high-order pole at a: generous pole allowance
    lhs_rule = _sphere_rule(n, deg2, kappa, mc_samples=mc_samples,
                            seed=seed + 1, pole_order=12)
    lhs_int = surface_integral(_abs2(kelvin), np.zeros(n), rts, lhs_rule,
                               axis=inv.a)
    lhs = lhs_int.real

    budget = 4.0 * (lhs_int.stderr + inv.rho2 * (rt / rts) * rhs_int.stderr)
    return identity_report("transfer_identity_eq22", lhs, rhs, TRANSFER_TOL,
                           budget=budget, n=n, x_norm=x_norm, r=fam.r,
                           t=float(t))


def log_convexity_check(L, grid, tolerance: float = CONVEXITY_SLACK
                        ) -> ConvexityGridReport:
    """Scan all triples r1 < r < r2 of the grid for log-log convexity of L.

    Passes iff L(r) <= L(r1)^alpha L(r2)^(1-alpha) (alpha from the log ratio)
    up to the relative slack for every triple; the worst triple and its
    signed log-margin are reported.
    """
    radii = np.asarray(grid, dtype=float)
    if radii.ndim != 1 or radii.size < 3:
        raise OutOfRange("grid needs at least three radii")
    if np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise OutOfRange("grid must be positive and strictly increasing")
    values = np.asarray([float(L(r)) for r in radii])
    if np.any(values <= 0):
        raise NonpositiveL("log-convexity requires L > 0 on the grid")
    logs = np.log(values)
    logr = np.log(radii)
    worst = (0, 1, 2)
    margin = math.inf
    m = radii.size
    for i in range(m - 2):
        for j in range(i + 1, m - 1):
            for k in range(j + 1, m):
                alpha = (logr[k] - logr[j]) / (logr[k] - logr[i])
                bound = alpha * logs[i] + (1 - alpha) * logs[k]
                gap = bound - logs[j]
                if gap < margin:
                    margin = gap
                    worst = (i, j, k)
    passed = margin >= -tolerance
    return ConvexityGridReport(radii=radii, values=values,
                               worst_triple=tuple(radii[list(worst)]),
                               margin=float(margin), tolerance=tolerance,
                               passed=bool(passed))


# ---------------------------------------------------------------------------
# the three-spheres inequality


def _resolve_beta(rec, beta, unchecked: bool) -> float:
    if beta == "omega" or beta is None:
        return rec.omega
    if beta == "alpha":
        return rec.alpha
    beta = float(beta)
    if not unchecked and not 0 < beta <= rec.alpha * (1 + 1e-12):
        raise BetaOutOfRange(
            f"beta = {beta} outside (0, alpha] with alpha = {rec.alpha}")
    return beta


def three_spheres_check(f, x, r: float, t: float, beta="omega",
                        unchecked_beta: bool = False,
                        degree: int | None = None,
                        mc_samples: int = 200_000, seed: int = 0,
                        tolerance: float = INEQUALITY_TOL) -> InequalityReport:
    """Check the weighted three-spheres inequality on the correlated family.

        rbar * int_{S_{xbar,rbar}} |f|^2 ds_a
            <= (r * int_{S_{x,r}} |f|^2 ds_a)^beta (int_S |f|^2 ds_a)^(1-beta)

    with (xbar, rbar) the family ball at arclength t, beta in (0, alpha]
    (default the explicit bound omega).  ``unchecked_beta`` admits beta >
    alpha for negative controls, where the inequality may genuinely fail.
    """
    fam = CorrelatedFamily.create(x, r, R=1.0)
    n = fam.dimension
    if not 0 < t <= fam.x_norm * (1 + 1e-12):
        raise OutOfRange("t must lie in (0, |x|]")
    rec = fam.exponents(t)
    beta_val = _resolve_beta(rec, beta, unchecked_beta)
    deg2 = 2 * (degree if degree is not None else _degree_of(f))

    rbar = float(fam.radius(t))
    inner = _wsa_sq(f, fam, fam.x_norm, r, deg2, mc_samples, seed)
    outer = _wsa_sq(f, fam, 0.0, 1.0, deg2, mc_samples, seed + 1)
    middle = _wsa_sq(f, fam, t, rbar, deg2, mc_samples, seed + 2)

    lhs = rbar * middle.real
    rhs = (r * inner.real) ** beta_val * outer.real ** (1 - beta_val)
    budget = 4.0 * (rbar * middle.stderr + rhs * (
        beta_val * inner.stderr / max(inner.real, 1e-300)
        + (1 - beta_val) * outer.stderr / max(outer.real, 1e-300)))
    return upper_report("three_spheres_eq24", lhs, rhs, tolerance,
                        budget=budget, exponent=beta_val, n=n,
                        x_norm=fam.x_norm, r=float(r), t=float(t))


def holomorphic_variant_check(coeffs, x, r: float, t: float, beta="omega",
                              unchecked_beta: bool = False,
                              mc_samples: int = 200_000,
                              seed: int = 0) -> InequalityReport:
    """Planar holomorphic variant: ds_a replaced by (|y-a|^2+1-|y|^2) ds.

    Implemented by applying the three-spheres check to (z - z_a)^2 f(z),
    which multiplies the |f|^2 integrand by |y-a|^4 and cancels the
    denominator of the s_a density.
    """
    x = np.asarray(x, dtype=float)
    if x.size != 2:
        raise OutOfRange("holomorphic variant is planar (n = 2)")
    fam = CorrelatedFamily.create(x, r, R=1.0)
    za = complex(fam.inversion.a[0], fam.inversion.a[1])
    coeffs = [complex(c) for c in coeffs]
    shifted = [0.0j] * (len(coeffs) + 2)
    for k, c in enumerate(coeffs):
        shifted[k] += c * za * za
        shifted[k + 1] += -2 * za * c
        shifted[k + 2] += c
    g = holomorphic_polynomial(shifted)
    report = three_spheres_check(g, x, r, t, beta=beta,
                                 unchecked_beta=unchecked_beta,
                                 degree=g.degree, mc_samples=mc_samples,
                                 seed=seed)
    return replace(report, name="holomorphic_variant_remark3")


# ---------------------------------------------------------------------------
# three balls and the embedded bounds


def three_balls_check(u, x0, r0: float, xbar_norm: float, delta=None,
                      delta0_variant: str = "scaled",
                      degree: int | None = None, mc_samples: int = 200_000,
                      seed: int = 0,
                      tolerance: float = INEQUALITY_TOL) -> InequalityReport:
    """Check the weighted three-balls inequality

        int_{B_{xbar,rbar}} |u|^2 dmu_a
            <= (int_{B_{x0,r0}} |u|^2 dmu_a)^delta (int_B |u|^2 dmu_a)^(1-delta)

    for delta in (0, delta_0] (default delta_0 itself).
    """
    x0 = np.asarray(x0, dtype=float)
    fam = CorrelatedFamily.create(x0, r0, R=1.0)
    n = fam.dimension
    inv = fam.inversion
    x0n = fam.x_norm
    if not 0 < xbar_norm <= x0n * (1 + 1e-12):
        raise OutOfRange("need 0 < |xbar| <= |x0|")
    rbar = correlated_radius_general(x0n, r0, xbar_norm, 1.0)
    d0 = delta0(x0n, r0, xbar_norm, 1.0, variant=delta0_variant)
    delta_val = d0 if delta is None else float(delta)
    if not 0 < delta_val <= d0 * (1 + 1e-12):
        raise DeltaOutOfRange(f"delta = {delta_val} outside (0, {d0}]")
    deg2 = 2 * (degree if degree is not None else _degree_of(u))

    def mua_ball(center_norm, radius, s):
        kappa = (inv.a_norm - center_norm) / radius
        rule = _ball_rule(n, deg2, kappa, mc_samples=mc_samples, seed=s)
        return weighted_ball_integral_mua(_abs2(u),
                                          Ball(center_norm * fam.e, radius),
                                          rule, inv)

    inner = mua_ball(x0n, r0, seed)
    middle = mua_ball(xbar_norm, rbar, seed + 1)
    outer = mua_ball(0.0, 1.0, seed + 2)
    lhs = middle.real
    rhs = inner.real ** delta_val * outer.real ** (1 - delta_val)
    budget = 4.0 * (middle.stderr + rhs * (
        delta_val * inner.stderr / max(inner.real, 1e-300)
        + (1 - delta_val) * outer.stderr / max(outer.real, 1e-300)))
    return upper_report("three_balls_eq27", lhs, rhs, tolerance, budget=budget,
                        exponent=delta_val, n=n, x_norm=x0n, r=float(r0),
                        t=float(xbar_norm))


def embedded_bound_check(u, x0, r0: float, xbar_norm: float, lam: float,
                         R: float = 1.0, delta=None,
                         degree: int | None = None,
                         mc_samples: int = 200_000, seed: int = 0,
                         tolerance: float = INEQUALITY_TOL
                         ) -> list[InequalityReport]:
    """Check the unweighted (plain dx) propagation bounds.

    Emits, at R = 1, the bound with constant 405/(rbar (1-lam^2)^{5/2});
    for any R the (R/rbar)^5 form; and the normalized-average form with
    prefactor sqrt(405)/(1-lam^2)^{5/4} (R/rbar)^{(n+5)/2}.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    x0n = float(np.linalg.norm(x0))
    if x0n < R / 2 - 1e-12:
        raise PreconditionViolated(f"|x0| = {x0n} < R/2 = {R / 2}")
    if not 0 < lam < 1:
        raise OutOfRange("lambda must lie in (0, 1)")
    if not 0 < xbar_norm <= x0n * (1 + 1e-12):
        raise OutOfRange("need 0 < |xbar| <= |x0|")
    rbar = correlated_radius_general(x0n, r0, xbar_norm, R)
    d0 = delta0(x0n, r0, xbar_norm, R, variant="scaled")
    delta_val = d0 if delta is None else float(delta)
    if not 0 < delta_val <= d0 * (1 + 1e-12):
        raise DeltaOutOfRange(f"delta = {delta_val} outside (0, {d0}]")
    deg2 = 2 * (degree if degree is not None else _degree_of(u))
    e = x0 / x0n
    rule = _ball_rule(n, deg2, mc_samples=mc_samples, seed=seed)

    b_in = Ball(x0, r0)
    b_lam = Ball(xbar_norm * e, lam * rbar)
    b_out = Ball(np.zeros(n), R)
    I_in = ball_integral(_abs2(u), b_in, rule)
    I_lam = ball_integral(_abs2(u), b_lam, rule)
    I_out = ball_integral(_abs2(u), b_out, rule)

    def budget_for(lhs_err, rhs, in_v, out_v):
        return 4.0 * (lhs_err + rhs * (
            delta_val * in_v.stderr / max(in_v.real, 1e-300)
            + (1 - delta_val) * out_v.stderr / max(out_v.real, 1e-300)))

    meta = {"n": n, "x_norm": x0n, "r": float(r0), "t": float(xbar_norm)}
    reports = []
    core = I_in.real ** delta_val * I_out.real ** (1 - delta_val)
    if abs(R - 1.0) < 1e-14:
        rhs29 = EMBED_CONSTANT / (rbar * (1 - lam * lam) ** 2.5) * core
        reports.append(upper_report("embedded_bound_eq29", I_lam.real, rhs29,
                                    tolerance,
                                    budget=budget_for(I_lam.stderr, rhs29, I_in, I_out),
                                    exponent=delta_val, **meta))
    rhs36 = EMBED_CONSTANT / (1 - lam * lam) ** 2.5 * (R / rbar) ** 5 * core
    reports.append(upper_report("embedded_bound_eq36", I_lam.real, rhs36,
                                tolerance,
                                budget=budget_for(I_lam.stderr, rhs36, I_in, I_out),
                                exponent=delta_val, **meta))

    def a2_from(I, ball):
        vol = ball_volume(n) * ball.radius ** n
        return math.sqrt(max(I.real, 0.0) / vol)

    a2_lam = a2_from(I_lam, b_lam)
    a2_in = a2_from(I_in, b_in)
    a2_out = a2_from(I_out, b_out)
    rhs37 = (math.sqrt(EMBED_CONSTANT) / (1 - lam * lam) ** 1.25
             * (R / rbar) ** ((n + 5) / 2)
             * a2_in ** delta_val * a2_out ** (1 - delta_val))
    budget37 = 2.0 * (I_lam.stderr / max(I_lam.real, 1e-300)
                      + delta_val * I_in.stderr / max(I_in.real, 1e-300)
                      + (1 - delta_val) * I_out.stderr / max(I_out.real, 1e-300)
                      ) * max(a2_lam, rhs37)
    reports.append(upper_report("embedded_bound_eq37", a2_lam, rhs37,
                                tolerance, budget=budget37,
                                exponent=delta_val, **meta))
    return reports


def embedding_identity_check(g, b, l: float, g_degree: int = 6,
                             convention: str = "squared",
                             tolerance: float = EMBEDDING_TOL
                             ) -> InequalityReport:
    """Check the slice identity behind the R^{n+5} embedding.

    lhs integrates g over the (n+5)-ball centered ((b, 0_5), radius l);
    rhs iterates: outer over B^n_{b,l}, inner over the 5-ball of radius
    sqrt(l^2 - |x-b|^2) written in polar form with density t^4.

    ``convention="squared"`` uses the slice radius sqrt(l^2 - |x-b|^2) (the
    reading that reproduces the (n+5)-volume); ``"printed"`` keeps
    sqrt(l - |x-b|^2) as displayed in the source.
    """
    b = np.asarray(b, dtype=float)
    n = b.size
    if not 0 < l <= 1:
        raise OutOfRange("l must lie in (0, 1]")
    m = n + 5
    lhs_rule = BallRule(SphereRule.product(m, g_degree + 2), radial_points=32)
    center = np.concatenate([b, np.zeros(5)])
    big_ball = Ball(center, l)
    lhs = ball_integral(g, big_ball, lhs_rule).real
    # absolute scale so odd integrands (both sides ~ 0) compare sanely
    abs_scale = ball_integral(lambda p: np.abs(np.asarray(g(p))), big_ball,
                              lhs_rule).real

    # inner 5-ball template: displacements and weights for unit radius
    s4 = SphereRule.product(5, g_degree + 2)
    tref, wref = np.polynomial.legendre.leggauss(24)
    tref = (tref + 1) / 2
    wref = wref / 2
    disp = (tref[:, None, None] * s4.nodes[None, :, :]).reshape(-1, 5)
    wq = (wref * tref ** 4)[:, None] * s4.weights[None, :]
    wq = wq.reshape(-1)

    out_sphere = SphereRule.product(n, g_degree + 2)
    rout, wout = np.polynomial.legendre.leggauss(48)
    rout = (rout + 1) / 2 * l
    wout = wout / 2 * l

    rhs = 0.0
    for j in range(rout.size):
        radius = rout[j]
        xs = b + radius * out_sphere.nodes
        s2 = l * l - radius * radius if convention == "squared" else l - radius * radius
        if s2 <= 0:
            continue
        s = math.sqrt(s2)
        # block-evaluate g on (outer node, inner node) pairs
        pts = np.concatenate([
            np.repeat(xs, disp.shape[0], axis=0),
            np.tile(s * disp, (xs.shape[0], 1)),
        ], axis=1)
        vals = np.asarray(g(pts), dtype=float).reshape(xs.shape[0], disp.shape[0])
        inner_vals = s ** 5 * (vals @ wq)
        rhs += wout[j] * radius ** (n - 1) * float(out_sphere.weights @ inner_vals)

    report = identity_report(f"embedding_identity_eq30_{convention}", lhs, rhs,
                             tolerance, scale_floor=1e-3 * abs_scale, n=n,
                             r=float(l))
    log.debug("embedding identity (%s): lhs=%.12g rhs=%.12g", convention, lhs,
              rhs)
    return report
