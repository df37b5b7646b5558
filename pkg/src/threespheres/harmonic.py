"""Exact harmonic polynomials, the Kelvin transform, and harmonicity oracles.

Polynomials are stored as sparse multi-index -> complex coefficient maps.
Random test functions are produced by drawing dense random coefficients and
projecting each homogeneous component onto its harmonic part: p = h + |y|^2 q
where q solves the linear system Laplacian(|y|^2 q) = Laplacian(p) degree by
degree.
"""

from __future__ import annotations

import json
import math
from itertools import product as _iproduct

import numpy as np

from .errors import NonHarmonic, OutOfRange, SingularPoint, StencilOutOfDomain
from .geometry import InversionData

__all__ = [
    "HarmonicPolynomial",
    "KelvinFunction",
    "PolynomialEvaluator",
    "harmonicity_defect",
    "holomorphic_polynomial",
    "laplacian_residual",
    "random_harmonic_polynomial",
]

HARMONICITY_TOL = 1e-13


def _laplacian_terms(terms: dict, n: int) -> dict:
    out: dict = {}
    for e, c in terms.items():
        for k in range(n):
            if e[k] >= 2:
                e2 = list(e)
                e2[k] -= 2
                key = tuple(e2)
                out[key] = out.get(key, 0.0) + c * e[k] * (e[k] - 1)
    return out


def _times_norm2(terms: dict, n: int) -> dict:
    out: dict = {}
    for e, c in terms.items():
        for k in range(n):
            e2 = list(e)
            e2[k] += 2
            key = tuple(e2)
            out[key] = out.get(key, 0.0) + c
    return out


def _monomials(n: int, degree: int) -> list:
    return [e for e in _iproduct(range(degree + 1), repeat=n) if sum(e) == degree]


def _harmonic_component(homog: dict, degree: int, n: int) -> dict:
    """Harmonic part of a homogeneous polynomial via the correction solve."""
    if degree < 2:
        return dict(homog)
    basis = _monomials(n, degree - 2)
    index = {e: i for i, e in enumerate(basis)}
    mat = np.zeros((len(basis), len(basis)))
    for j, e in enumerate(basis):
        for e2, c in _laplacian_terms(_times_norm2({e: 1.0}, n), n).items():
            mat[index[e2], j] = c
    rhs = np.zeros(len(basis), dtype=complex)
    for e, c in _laplacian_terms(homog, n).items():
        rhs[index[e]] = c
    q = np.linalg.solve(mat, rhs)
    h = dict(homog)
    for e, c in _times_norm2({basis[i]: q[i] for i in range(len(basis))}, n).items():
        h[e] = h.get(e, 0.0) - c
    return h


class HarmonicPolynomial:
    """Complex-coefficient polynomial with identically zero Laplacian.

    Parameters
    ----------
    dimension : int
        Number of variables, >= 2.
    terms : dict
        Map from exponent tuple (length ``dimension``) to complex coefficient.

    Construction validates the symbolic Laplacian; coefficients whose
    Laplacian exceeds ``HARMONICITY_TOL`` relative to the coefficient scale
    raise :class:`NonHarmonic`.
    """

    def __init__(self, dimension: int, terms: dict, validate: bool = True):
        if dimension < 2:
            raise OutOfRange("dimension must be >= 2")
        self.dimension = int(dimension)
        clean = {}
        for e, c in terms.items():
            e = tuple(int(k) for k in e)
            if len(e) != dimension or any(k < 0 for k in e):
                raise OutOfRange(f"bad exponent tuple {e}")
            c = complex(c)
            if c != 0:
                clean[e] = clean.get(e, 0.0) + c
        self.terms = clean
        self._evaluator = None
        if validate and clean:
            scale = max(abs(c) for c in clean.values())
            lap = _laplacian_terms(clean, dimension)
            resid = max((abs(c) for c in lap.values()), default=0.0)
            # constructor gate is 10x the synthesis tolerance to admit
            # round-tripped coefficients
            if resid > 10 * HARMONICITY_TOL * max(scale, 1.0):
                raise NonHarmonic(
                    f"Laplacian coefficient residual {resid:.3e} exceeds "
                    f"tolerance for coefficient scale {scale:.3e}")

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def laplacian_coefficients(self) -> dict:
        return _laplacian_terms(self.terms, self.dimension)

    def homogeneous_parts(self) -> dict:
        """Degree -> harmonic homogeneous component (each itself harmonic)."""
        parts: dict = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {
            k: HarmonicPolynomial(self.dimension, t, validate=False)
            for k, t in sorted(parts.items())
        }

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if self._evaluator is None:
            self._evaluator = PolynomialEvaluator([self])
        vals = self._evaluator.values(pts)[:, 0]
        return vals[0] if single else vals

    def __add__(self, other: "HarmonicPolynomial") -> "HarmonicPolynomial":
        if other.dimension != self.dimension:
            raise OutOfRange("dimension mismatch")
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return HarmonicPolynomial(self.dimension, terms, validate=False)

    def scaled(self, factor: complex) -> "HarmonicPolynomial":
        return HarmonicPolynomial(
            self.dimension, {e: factor * c for e, c in self.terms.items()},
            validate=False)

    def to_json(self) -> str:
        return json.dumps({
            "n": self.dimension,
            "terms": [
                {"exp": list(e), "re": c.real, "im": c.imag}
                for e, c in sorted(self.terms.items())
            ],
        })

    @classmethod
    def from_json(cls, text: str) -> "HarmonicPolynomial":
        data = json.loads(text)
        terms = {tuple(t["exp"]): complex(t["re"], t["im"]) for t in data["terms"]}
        return cls(data["n"], terms)

    def __repr__(self):
        return (f"HarmonicPolynomial(n={self.dimension}, degree={self.degree}, "
                f"terms={len(self.terms)})")


class PolynomialEvaluator:
    """Vectorized evaluation of a batch of same-dimension polynomials.

    Builds the shared monomial basis once; ``values(points)`` returns the
    (N_points, N_polys) complex matrix via one basis-matrix product, which is
    what the corpus sweeps rely on.
    """

    def __init__(self, polys):
        polys = list(polys)
        if not polys:
            raise OutOfRange("empty polynomial batch")
        self.dimension = polys[0].dimension
        if any(p.dimension != self.dimension for p in polys):
            raise OutOfRange("mixed dimensions in polynomial batch")
        exps = sorted({e for p in polys for e in p.terms})
        if not exps:
            exps = [tuple([0] * self.dimension)]
        self.exponents = np.array(exps, dtype=np.int64)
        coeffs = np.zeros((len(exps), len(polys)), dtype=complex)
        index = {e: i for i, e in enumerate(exps)}
        for j, p in enumerate(polys):
            for e, c in p.terms.items():
                coeffs[index[e], j] = c
        self.coeffs = coeffs
        # split parts keep the basis product in real dgemm territory
        self._re = np.ascontiguousarray(coeffs.real)
        self._im = np.ascontiguousarray(coeffs.imag)

    def _basis(self, pts: np.ndarray) -> np.ndarray:
        n = self.dimension
        basis = np.ones((pts.shape[0], self.exponents.shape[0]))
        for k in range(n):
            maxe = int(self.exponents[:, k].max())
            if maxe == 0:
                continue
            powers = np.empty((pts.shape[0], maxe + 1))
            powers[:, 0] = 1.0
            for p in range(1, maxe + 1):
                powers[:, p] = powers[:, p - 1] * pts[:, k]
            basis *= powers[:, self.exponents[:, k]]
        return basis

    def values(self, points, chunk: int = 32768) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise OutOfRange("points must be an (N, n) array")
        out = np.empty((pts.shape[0], self.coeffs.shape[1]), dtype=complex)
        for lo in range(0, pts.shape[0], chunk):
            hi = min(lo + chunk, pts.shape[0])
            basis = self._basis(pts[lo:hi])
            out[lo:hi].real = basis @ self._re
            out[lo:hi].imag = basis @ self._im
        return out

    def squared_values(self, points, chunk: int = 32768) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise OutOfRange("points must be an (N, n) array")
        out = np.empty((pts.shape[0], self.coeffs.shape[1]))
        for lo in range(0, pts.shape[0], chunk):
            hi = min(lo + chunk, pts.shape[0])
            basis = self._basis(pts[lo:hi])
            re = basis @ self._re
            im = basis @ self._im
            out[lo:hi] = re * re + im * im
        return out


def random_harmonic_polynomial(n: int, max_degree: int, seed: int) -> HarmonicPolynomial:
    """Random harmonic polynomial of degree <= max_degree, deterministic in seed.

    Dense standard complex-normal coefficients are drawn for every monomial
    and each homogeneous slice is replaced by its harmonic part.
    """
    if n < 2 or max_degree < 0:
        raise OutOfRange("need n >= 2 and max_degree >= 0")
    rng = np.random.default_rng(seed)
    terms: dict = {}
    for degree in range(max_degree + 1):
        homog = {}
        for e in _monomials(n, degree):
            homog[e] = complex(rng.standard_normal(), rng.standard_normal())
        for e, c in _harmonic_component(homog, degree, n).items():
            terms[e] = terms.get(e, 0.0) + c
    return HarmonicPolynomial(n, terms)


def holomorphic_polynomial(coeffs) -> HarmonicPolynomial:
    """Planar harmonic polynomial sum_k c_k (y1 + i y2)^k from z-coefficients."""
    terms: dict = {}
    for k, c in enumerate(coeffs):
        c = complex(c)
        if c == 0:
            continue
        for j in range(k + 1):
            e = (k - j, j)
            terms[e] = terms.get(e, 0.0) + c * math.comb(k, j) * (1j ** j)
    return HarmonicPolynomial(2, terms)


class KelvinFunction:
    """Kelvin transform f*(y) = (rho/|y-a|)^(n-2) * conj(f(phi(y))).

    Harmonic wherever f is harmonic on the image of the domain; for n = 2 the
    prefactor is identically one and the transform reduces to the conjugated
    composition with the inversion.
    """

    def __init__(self, base, inversion: InversionData):
        self.base = base
        self.inversion = inversion
        self.dimension = inversion.dimension

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        d = pts - self.inversion.a
        dist2 = np.einsum("ij,ij->i", d, d)
        if np.any(dist2 == 0.0):
            raise SingularPoint("Kelvin transform undefined at y = a")
        image = self.inversion.a + (self.inversion.rho2 / dist2)[:, None] * d
        vals = np.conj(np.asarray(self.base(image), dtype=complex))
        n = self.dimension
        if n != 2:
            vals = vals * (self.inversion.rho2 / dist2) ** ((n - 2) / 2.0)
        return vals[0] if single else vals


def _stencil_values(f, y: np.ndarray, h: float, order4: bool):
    n = y.size
    pts = [y]
    for k in range(n):
        step = np.zeros(n)
        step[k] = h
        pts += [y + step, y - step]
        if order4:
            pts += [y + 2 * step, y - 2 * step]
    try:
        vals = np.asarray(f(np.array(pts)), dtype=complex)
    except SingularPoint as exc:
        raise StencilOutOfDomain(str(exc)) from exc
    return vals


def laplacian_residual(f, y, h: float) -> float:
    """|sum_k (f(y+h e_k) + f(y-h e_k) - 2 f(y))/h^2|, the raw FD Laplacian.

    Zero (up to rounding) for harmonic polynomials of degree <= 3; for smooth
    harmonic functions it equals O(h^2) times the local fourth-derivative
    scale, so it detects a genuinely nonzero Laplacian at any fixed h.
    """
    if h <= 0:
        raise OutOfRange("h must be positive")
    y = np.asarray(y, dtype=float)
    vals = _stencil_values(f, y, h, order4=False)
    center = vals[0]
    acc = 0.0 + 0.0j
    for k in range(y.size):
        acc += vals[1 + 2 * k] + vals[2 + 2 * k] - 2 * center
    return float(abs(acc)) / (h * h)


def harmonicity_defect(f, y, h: float = 1e-3) -> float:
    """FD Laplacian residual normalized by the local function scale.

    The scale is max(1, |f(y)|, sum_k |delta^4_k f|/h^4): the per-axis fourth
    central differences measure the same local derivative magnitude that
    drives the O(h^2) truncation of the Laplacian stencil, so a harmonic
    function scores ~h^2/12 regardless of its degree, while any function with
    a genuine Laplacian scores >> h^2.
    """
    if h <= 0:
        raise OutOfRange("h must be positive")
    y = np.asarray(y, dtype=float)
    vals = _stencil_values(f, y, h, order4=True)
    center = vals[0]
    lap = 0.0 + 0.0j
    fourth = 0.0
    for k in range(y.size):
        p1, m1, p2, m2 = vals[1 + 4 * k:5 + 4 * k]
        lap += p1 + m1 - 2 * center
        fourth += abs(p2 - 4 * p1 + 6 * center - 4 * m1 + m2)
    residual = abs(lap) / (h * h)
    scale = max(1.0, abs(center), fourth / h ** 4)
    return float(residual / scale)
