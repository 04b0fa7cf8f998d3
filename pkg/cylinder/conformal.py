# conformal.py - Circle diffeomorphisms, Schwarzian, weighted maps and primary-field checks
from dataclasses import dataclass, field
from math import pi
from typing import Callable, List, Optional, Sequence, Tuple
import json
import logging

import numpy as np

from config import (
    NEWTON_MAX_ITER,
    NEWTON_TOL,
    POSITIVITY_GRID,
    QUADRATURE_GRID,
    RICHARDSON_STEP,
    TORUS_GRID,
)
from cylinder import ChartError
from cylinder.functionals import TestFnCircle, TrigPoly
from cylinder.kernels import DIAG_LIMIT, ParametrixKernel

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * pi


class Jet3:
    """Value and first three derivatives at a point; arrays are handled elementwise."""

    __slots__ = ("value", "d1", "d2", "d3")

    def __init__(self, value, d1=0.0, d2=0.0, d3=0.0):
        self.value = value
        self.d1 = d1
        self.d2 = d2
        self.d3 = d3

    @classmethod
    def variable(cls, x) -> "Jet3":
        return cls(x, np.ones_like(x, dtype=float) if isinstance(x, np.ndarray) else 1.0, 0.0, 0.0)

    @classmethod
    def constant(cls, c) -> "Jet3":
        return cls(c, 0.0, 0.0, 0.0)

    def _lift(self, other) -> "Jet3":
        return other if isinstance(other, Jet3) else Jet3.constant(other)

    def __add__(self, other):
        o = self._lift(other)
        return Jet3(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.value, -self.d1, -self.d2, -self.d3)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return Jet3(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2 * self.d1 * o.d1 + self.value * o.d2,
            self.d3 * o.value + 3 * self.d2 * o.d1 + 3 * self.d1 * o.d2 + self.value * o.d3,
        )

    __rmul__ = __mul__

    def chain(self, f0, f1, f2, f3) -> "Jet3":
        """Jet of F∘self given F and its derivatives evaluated at self.value (Faà di Bruno)."""
        g1, g2, g3 = self.d1, self.d2, self.d3
        return Jet3(
            f0,
            f1 * g1,
            f2 * g1 * g1 + f1 * g2,
            f3 * g1 ** 3 + 3 * f2 * g1 * g2 + f1 * g3,
        )

    def compose_into(self, outer: "Jet3") -> "Jet3":
        """Jet of outer∘self, where outer holds the outer map's derivatives at self.value."""
        return self.chain(outer.value, outer.d1, outer.d2, outer.d3)

    def reciprocal(self) -> "Jet3":
        x = self.value
        return self.chain(1.0 / x, -1.0 / x ** 2, 2.0 / x ** 3, -6.0 / x ** 4)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def exp(self) -> "Jet3":
        e = np.exp(self.value)
        return self.chain(e, e, e, e)

    def log(self) -> "Jet3":
        x = self.value
        return self.chain(np.log(x), 1.0 / x, -1.0 / x ** 2, 2.0 / x ** 3)

    def sin(self) -> "Jet3":
        s, c = np.sin(self.value), np.cos(self.value)
        return self.chain(s, c, -s, -c)

    def cos(self) -> "Jet3":
        s, c = np.sin(self.value), np.cos(self.value)
        return self.chain(c, -s, -c, s)

    def __repr__(self):
        return f"Jet3({self.value}, {self.d1}, {self.d2}, {self.d3})"


class NullMap:
    """Orientation-preserving map of one null coordinate."""

    periodic = False

    def jet(self, u) -> Jet3:
        raise NotImplementedError

    def __call__(self, u):
        return self.jet(u).value

    def derivative(self, u):
        return self.jet(u).d1

    def difference(self, x1, x2):
        """μ(x2) - μ(x1); subclasses override with cancellation-free forms."""
        return self(x2) - self(x1)

    def inverse(self, w):
        raise NotImplementedError


@dataclass(frozen=True)
class ClosedFormMap(NullMap):
    """identity, exp, affine u -> αu + β, or Möbius u -> (au + b)/(cu + d)."""
    kind: str = "identity"
    params: Tuple[float, ...] = ()

    def __post_init__(self):
        expected = {"identity": 0, "exp": 0, "affine": 2, "mobius": 4}
        if self.kind not in expected:
            raise ChartError(f"Unknown closed-form map '{self.kind}'")
        if len(self.params) != expected[self.kind]:
            raise ChartError(f"Map '{self.kind}' takes {expected[self.kind]} parameters")
        if self.kind == "affine" and self.params[0] <= 0:
            raise ChartError("Affine map must have positive slope")
        if self.kind == "mobius":
            a, b, c, d = self.params
            if a * d - b * c <= 0:
                raise ChartError("Möbius map must have ad - bc > 0")

    @classmethod
    def identity(cls) -> "ClosedFormMap":
        return cls("identity")

    @classmethod
    def exponential(cls) -> "ClosedFormMap":
        return cls("exp")

    @classmethod
    def affine(cls, slope: float, offset: float = 0.0) -> "ClosedFormMap":
        return cls("affine", (float(slope), float(offset)))

    @classmethod
    def mobius(cls, a: float, b: float, c: float, d: float) -> "ClosedFormMap":
        return cls("mobius", (float(a), float(b), float(c), float(d)))

    @property
    def periodic(self) -> bool:
        return self.kind == "identity" or (self.kind == "affine" and self.params[0] == 1.0)

    def jet(self, u) -> Jet3:
        u = np.asarray(u, dtype=float)
        zeros = np.zeros_like(u)
        if self.kind == "identity":
            return Jet3(u, np.ones_like(u), zeros, zeros)
        if self.kind == "exp":
            e = np.exp(u)
            return Jet3(e, e, e, e)
        if self.kind == "affine":
            slope, offset = self.params
            return Jet3(slope * u + offset, np.full_like(u, slope), zeros, zeros)
        a, b, c, d = self.params
        den = c * u + d
        if np.any(den == 0):
            raise ChartError("Möbius map evaluated at its pole")
        det = a * d - b * c
        return Jet3(
            (a * u + b) / den,
            det / den ** 2,
            -2.0 * c * det / den ** 3,
            6.0 * c * c * det / den ** 4,
        )

    def difference(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if self.kind == "identity":
            return x2 - x1
        if self.kind == "exp":
            return 2.0 * np.exp(0.5 * (x1 + x2)) * np.sinh(0.5 * (x2 - x1))
        if self.kind == "affine":
            return self.params[0] * (x2 - x1)
        a, b, c, d = self.params
        return (a * d - b * c) * (x2 - x1) / ((c * x1 + d) * (c * x2 + d))

    def inverse(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == "identity":
            return w
        if self.kind == "exp":
            if np.any(w <= 0):
                raise ChartError("exp is not invertible at non-positive values")
            return np.log(w)
        if self.kind == "affine":
            slope, offset = self.params
            return (w - offset) / slope
        a, b, c, d = self.params
        return (d * w - b) / (a - c * w)


class CircleDiffeo(NullMap):
    """μ(u) = u + a_0 + Σ_{k>=1} (a_k cos ku + b_k sin ku) with μ' > 0 checked on a grid."""

    periodic = True

    def __init__(self, fourier_terms: Sequence[Tuple[int, float, float]] = ()):
        terms = []
        for k, a, b in fourier_terms:
            k = int(k)
            if k < 0:
                raise ChartError(f"Fourier index must be non-negative, got {k}")
            if k == 0 and b != 0:
                raise ChartError("The k = 0 term takes no sine coefficient")
            terms.append((k, float(a), float(b)))
        self.fourier_terms: Tuple[Tuple[int, float, float], ...] = tuple(sorted(terms))
        self._k = np.array([t[0] for t in self.fourier_terms if t[0] > 0], dtype=float)
        self._a = np.array([t[1] for t in self.fourier_terms if t[0] > 0], dtype=float)
        self._b = np.array([t[2] for t in self.fourier_terms if t[0] > 0], dtype=float)
        self._shift = sum(t[1] for t in self.fourier_terms if t[0] == 0)
        grid = np.linspace(0.0, TWO_PI, POSITIVITY_GRID, endpoint=False)
        slope = self.derivative(grid)
        if np.min(slope) <= 0:
            logger.error(f"Circle diffeo not orientation-preserving: min μ' = {np.min(slope)}")
            raise ChartError(f"μ' must be positive; minimum on grid is {np.min(slope):.3e}")

    @classmethod
    def identity(cls) -> "CircleDiffeo":
        return cls(())

    @classmethod
    def rotation(cls, theta: float) -> "CircleDiffeo":
        return cls([(0, theta, 0.0)])

    @classmethod
    def random(cls, rng: np.random.Generator, max_k: int = 3, amplitude: float = 0.3) -> "CircleDiffeo":
        """Random perturbation with Σ k(|a_k| + |b_k|) = amplitude < 1, hence μ' > 0."""
        if not 0 < amplitude < 1:
            raise ChartError(f"amplitude must be in (0, 1), got {amplitude}")
        a = rng.normal(size=max_k)
        b = rng.normal(size=max_k)
        ks = np.arange(1, max_k + 1)
        norm = float(np.sum(ks * (np.abs(a) + np.abs(b))))
        a *= amplitude / norm
        b *= amplitude / norm
        shift = float(rng.uniform(-0.5, 0.5))
        return cls([(0, shift, 0.0)] + [(int(k), float(x), float(y)) for k, x, y in zip(ks, a, b)])

    def jet(self, u) -> Jet3:
        u = np.asarray(u, dtype=float)
        if self._k.size == 0:
            zeros = np.zeros_like(u)
            return Jet3(u + self._shift, np.ones_like(u), zeros, zeros)
        ku = np.multiply.outer(u, self._k)
        c, s = np.cos(ku), np.sin(ku)
        k, a, b = self._k, self._a, self._b
        return Jet3(
            u + self._shift + c @ a + s @ b,
            1.0 + (-s * k) @ a + (c * k) @ b,
            (-c * k ** 2) @ a + (-s * k ** 2) @ b,
            (s * k ** 3) @ a + (-c * k ** 3) @ b,
        )

    def difference(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if self._k.size == 0:
            return x2 - x1
        mid = np.multiply.outer(0.5 * (x1 + x2), self._k)
        half = np.multiply.outer(0.5 * (x2 - x1), self._k)
        # cos A - cos B = -2 sin((A+B)/2) sin((A-B)/2), sin A - sin B = 2 cos((A+B)/2) sin((A-B)/2)
        sh = np.sin(half)
        return (x2 - x1) + (-2.0 * np.sin(mid) * sh) @ self._a + (2.0 * np.cos(mid) * sh) @ self._b

    def inverse(self, w):
        w = np.asarray(w, dtype=float)
        u = w - self._shift
        for _ in range(NEWTON_MAX_ITER):
            j = self.jet(u)
            step = (j.value - w) / j.d1
            u = u - step
            if np.max(np.abs(step), initial=0.0) < NEWTON_TOL:
                return u
        residual = float(np.max(np.abs(self(u) - w), initial=0.0))
        if residual > 1e-10:
            logger.error(f"Newton inverse did not converge, residual {residual:.3e}")
            raise ChartError(f"Inverse did not converge (residual {residual:.3e})")
        return u

    def to_json(self) -> str:
        return json.dumps([[k, a, b] for k, a, b in self.fourier_terms])

    @classmethod
    def from_json(cls, text: str) -> "CircleDiffeo":
        data = json.loads(text)
        return cls([(int(k), float(a), float(b)) for k, a, b in data])

    def __eq__(self, other):
        return isinstance(other, CircleDiffeo) and self.fourier_terms == other.fourier_terms

    def __hash__(self):
        return hash(self.fourier_terms)

    def __repr__(self):
        return f"CircleDiffeo({list(self.fourier_terms)})"


class ComposedMap(NullMap):
    """outer∘inner."""

    def __init__(self, outer: NullMap, inner: NullMap):
        self.outer = outer
        self.inner = inner
        self.periodic = bool(getattr(outer, "periodic", False) and getattr(inner, "periodic", False))

    def jet(self, u) -> Jet3:
        j_inner = self.inner.jet(u)
        return j_inner.compose_into(self.outer.jet(j_inner.value))

    def inverse(self, w):
        return self.inner.inverse(self.outer.inverse(w))


def compose(outer: NullMap, inner: NullMap) -> ComposedMap:
    return ComposedMap(outer, inner)


def schwarzian(mu: NullMap, u):
    """S(μ) = μ'''/μ' - (3/2)(μ''/μ')²."""
    j = mu.jet(u)
    d1 = np.asarray(j.d1, dtype=float)
    if np.any(d1 == 0):
        raise ChartError("Schwarzian undefined where μ' = 0")
    ratio = j.d2 / d1
    result = j.d3 / d1 - 1.5 * ratio * ratio
    return float(result) if np.ndim(result) == 0 else result


def hadamard_diag_limit(mu: NullMap, u, s: float):
    """μ'(x1)μ'(x2)/(μ(x2) - μ(x1))² - 1/s² at x1,2 = u ∓ s/2; tends to S(μ)(u)/6 as O(s²)."""
    if s == 0:
        raise ChartError("hadamard_diag_limit needs s != 0; use the S(μ)/6 limit")
    u = np.asarray(u, dtype=float)
    x1 = u - 0.5 * s
    x2 = u + 0.5 * s
    gap = mu.difference(x1, x2)
    result = mu.derivative(x1) * mu.derivative(x2) / gap ** 2 - 1.0 / (x2 - x1) ** 2
    return float(result) if np.ndim(result) == 0 else result


def richardson_limit(fn: Callable[[float], object], s: float):
    """Two-grid extrapolation (4·F(s/2) - F(s))/3 for an even O(s²) error."""
    return (4.0 * fn(0.5 * s) - fn(s)) / 3.0


def diag_limit_extrapolated(mu: NullMap, u, s: float = RICHARDSON_STEP):
    return richardson_limit(lambda h: hadamard_diag_limit(mu, u, h), s)


def _circle_grid(n: int = QUADRATURE_GRID) -> np.ndarray:
    return np.linspace(0.0, TWO_PI, n, endpoint=False)


def _trapezoid(values: np.ndarray) -> float:
    return float(np.real(np.sum(values)) * TWO_PI / values.size)


def stress_anomaly(
    mu: NullMap,
    f: TrigPoly,
    hbar_value: float,
    s: float = RICHARDSON_STEP,
    grid: int = QUADRATURE_GRID,
) -> Tuple[float, float]:
    """(lhs, rhs) of the stress-tensor transformation defect.

    lhs = (ħ/2)∫ f·(-1/4π)·D(u) du with D the extrapolated diagonal limit,
    rhs = -(1/4π)(ħ/12)∫ f·S(μ) du.
    """
    u = _circle_grid(grid)
    fu = np.real(f.evaluate(u))
    d = diag_limit_extrapolated(mu, u, s)
    lhs = 0.5 * hbar_value * _trapezoid(fu * (-1.0 / (4.0 * pi)) * d)
    rhs = -(1.0 / (4.0 * pi)) * (hbar_value / 12.0) * _trapezoid(fu * schwarzian(mu, u))
    return lhs, rhs


def anomaly_with_hadamard(
    mu: CircleDiffeo,
    f: TrigPoly,
    hbar_value: float,
    smooth_diag: Callable[[np.ndarray], np.ndarray],
    grid: int = QUADRATURE_GRID,
) -> float:
    """Defect computed with H' = H_sing + h', where smooth_diag(w) = (∂⊗∂)h'(w, w).

    The h' terms enter once pulled back on the u-grid and once against the
    pushed-forward smearing function on the w-grid.
    """
    if not getattr(mu, "periodic", False):
        raise ChartError("anomaly_with_hadamard integrates over the circle; μ must be periodic")
    lhs, _ = stress_anomaly(mu, f, hbar_value, grid=grid)
    u = _circle_grid(grid)
    pulled = _trapezoid(np.real(f.evaluate(u)) * mu.derivative(u) ** 2 * smooth_diag(mu(u)))
    w = _circle_grid(grid)
    pre = mu.inverse(w)
    pushed = _trapezoid(smooth_diag(w) * mu.derivative(pre) * np.real(f.evaluate(pre)))
    return lhs + 0.5 * hbar_value * (pulled - pushed)


def anomaly_independence(mu: CircleDiffeo, f: TrigPoly, hbar_value: float, g: Optional[TrigPoly] = None) -> Tuple[float, float]:
    """Defect for two choices of H': the cylinder vacuum and the vacuum plus g(w)g(w')."""
    g = g or TrigPoly({-1: 0.25, 0: 0.5, 1: 0.25, 2: 0.1j, -2: -0.1j})
    vacuum = lambda w: np.full_like(np.asarray(w, dtype=float), DIAG_LIMIT)
    shifted = lambda w: DIAG_LIMIT + np.real(g.evaluate(w)) ** 2
    return (
        anomaly_with_hadamard(mu, f, hbar_value, vacuum),
        anomaly_with_hadamard(mu, f, hbar_value, shifted),
    )


def parametrix_pullback_diag(mu: NullMap, nu: NullMap, u: float, v: float, s: float, lam: float = 1.0) -> float:
    """W_sing(χx, χy) - W_sing(x, y) at centred separation (s, s); tends to -(1/2π)·log Ω."""
    if s == 0:
        raise ChartError("parametrix_pullback_diag needs s != 0")
    kernel = ParametrixKernel(lam)
    x1, x2 = u - 0.5 * s, u + 0.5 * s
    y1, y2 = v - 0.5 * s, v + 0.5 * s
    du = mu.difference(x1, x2)
    dv = nu.difference(y1, y2)
    return float(kernel.value(du, dv) - kernel.value(x2 - x1, y2 - y1))


def log_conformal_factor(mu: NullMap, nu: NullMap, u, v):
    """log Ω with Ω² = μ'(u)ν'(v)."""
    return 0.5 * (np.log(mu.derivative(u)) + np.log(nu.derivative(v)))


@dataclass(frozen=True)
class WeightPair:
    """Conformal weights (h, h̃)."""
    h: float
    h_tilde: float

    @property
    def scaling_dimension(self) -> float:
        return self.h + self.h_tilde

    @property
    def spin(self) -> float:
        return self.h - self.h_tilde

    @classmethod
    def from_dimension_spin(cls, delta: float, spin: float) -> "WeightPair":
        return cls(0.5 * (delta + spin), 0.5 * (delta - spin))


@dataclass(frozen=True)
class FramedMorphism:
    """Null-coordinate map χ(u, v) = (μ(u), ν(v)) with constant frame rescalings.

    Frame factors: ω_ℓ = scale_left·μ', ω_r = scale_right·ν'.
    """
    mu: NullMap = field(default_factory=ClosedFormMap.identity)
    nu: NullMap = field(default_factory=ClosedFormMap.identity)
    scale_left: float = 1.0
    scale_right: float = 1.0
    label: str = "chi"

    def omega_left(self, u):
        return self.scale_left * self.mu.derivative(u)

    def omega_right(self, v):
        return self.scale_right * self.nu.derivative(v)

    def is_admissible(self, grid: int = POSITIVITY_GRID) -> bool:
        """Both frame factors are positive on a sample grid."""
        pts = _circle_grid(grid)
        try:
            return bool(np.all(self.omega_left(pts) > 0) and np.all(self.omega_right(pts) > 0))
        except ChartError:
            return False

    def weight_factor(self, weights: WeightPair, u, v):
        """ω_ℓ^h·ω_r^h̃."""
        return self.omega_left(u) ** weights.h * self.omega_right(v) ** weights.h_tilde


def boost(alpha: float) -> FramedMorphism:
    """Identity embedding with frame (e_ℓ/α, α·e_r)."""
    return FramedMorphism(scale_left=1.0 / alpha, scale_right=alpha, label=f"boost({alpha})")


def dilation(alpha: float) -> FramedMorphism:
    return FramedMorphism(scale_left=alpha, scale_right=alpha, label=f"dilation({alpha})")


TorusFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def conformal_coupling_dimension(d: int) -> float:
    """Δ = (d - 2)/2 read from the conformally coupled Lagrangian."""
    return (d - 2) / 2.0


def pullback(phi: TorusFn, maps: Tuple[NullMap, NullMap]) -> TorusFn:
    mu, nu = maps
    return lambda u, v: phi(mu(u), nu(v))


def weighted_pullback(phi: TorusFn, maps: Tuple[NullMap, NullMap], Delta: float) -> TorusFn:
    """χ^*_{(Δ)}φ = Ω^Δ·(φ∘χ); plain pullback when Δ = 0."""
    if Delta == 0:
        return pullback(phi, maps)
    mu, nu = maps
    return lambda u, v: np.exp(Delta * log_conformal_factor(mu, nu, u, v)) * phi(mu(u), nu(v))


def weighted_pushforward(f: TorusFn, maps: Tuple[NullMap, NullMap], Delta: float) -> TorusFn:
    """χ_*^{(Δ)}f = (Ω^{-Δ}f)∘χ^{-1}."""
    mu, nu = maps

    def pushed(w, z):
        u = mu.inverse(w)
        v = nu.inverse(z)
        return np.exp(-Delta * log_conformal_factor(mu, nu, u, v)) * f(u, v)

    return pushed


def weighted_pushforward_pair(f: TorusFn, morphism: FramedMorphism, weights: WeightPair) -> TorusFn:
    """D^{(h,h̃)}χ f = (ω_ℓ^{-(1-h)}·ω_r^{-(1-h̃)}·f)∘χ^{-1}."""

    def pushed(w, z):
        u = morphism.mu.inverse(w)
        v = morphism.nu.inverse(z)
        factor = morphism.omega_left(u) ** (weights.h - 1.0) * morphism.omega_right(v) ** (weights.h_tilde - 1.0)
        return factor * f(u, v)

    return pushed


class TorusTrigPoly:
    """Doubly periodic trig polynomial Σ c[k, l] e^{i(ku + lv)}."""

    def __init__(self, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 2 or coeffs.shape[0] % 2 == 0 or coeffs.shape[1] % 2 == 0:
            raise ValueError("Torus coefficients must be a 2D array with odd side lengths")
        self.coeffs = coeffs
        self.band_u = coeffs.shape[0] // 2
        self.band_v = coeffs.shape[1] // 2

    @classmethod
    def random_real(cls, band: int, rng: np.random.Generator) -> "TorusTrigPoly":
        raw = rng.normal(size=(2 * band + 1, 2 * band + 1)) + 1j * rng.normal(size=(2 * band + 1, 2 * band + 1))
        sym = 0.5 * (raw + np.conj(raw[::-1, ::-1]))
        return cls(sym / (2 * band + 1))

    def __call__(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        ku = np.arange(-self.band_u, self.band_u + 1)
        kv = np.arange(-self.band_v, self.band_v + 1)
        eu = np.exp(1j * u[..., None] * ku)
        ev = np.exp(1j * v[..., None] * kv)
        return np.einsum("...k,kl,...l->...", eu, self.coeffs, ev)

    def d_first(self) -> "TorusTrigPoly":
        ku = np.arange(-self.band_u, self.band_u + 1)
        return TorusTrigPoly(1j * ku[:, None] * self.coeffs)


def _torus_mesh(n: int) -> Tuple[np.ndarray, np.ndarray]:
    g = _circle_grid(n)
    return np.meshgrid(g, g, indexing="ij")


def torus_integral(fn: TorusFn, n: int = TORUS_GRID) -> complex:
    uu, vv = _torus_mesh(n)
    return complex(np.sum(fn(uu, vv)) * (TWO_PI / n) ** 2)


def _spectral_d_first(samples: np.ndarray) -> np.ndarray:
    n = samples.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return np.fft.ifft(1j * k[:, None] * np.fft.fft(samples, axis=0), axis=0)


def primary_check_dphi(
    mu: NullMap,
    nu: NullMap,
    f: TorusFn,
    phi_config: TorusTrigPoly,
    grid: int = TORUS_GRID,
) -> Tuple[complex, complex]:
    """(∂Φ(D^{(1,0)}χ f)[φ], ∂Φ(f)[χ*φ]) for weight (1, 0).

    The first integrates over the target with exact ∂_w φ; the second
    differentiates the sampled φ∘χ spectrally on the source grid.
    """
    if not (getattr(mu, "periodic", False) and getattr(nu, "periodic", False)):
        raise ChartError("primary_check_dphi integrates over the torus; maps must be periodic")
    morphism = FramedMorphism(mu, nu)
    pushed = weighted_pushforward_pair(f, morphism, WeightPair(1.0, 0.0))
    d_phi = phi_config.d_first()
    upper = torus_integral(lambda w, z: pushed(w, z) * d_phi(w, z), grid)

    uu, vv = _torus_mesh(grid)
    pulled = phi_config(mu(uu), nu(vv))
    lower = complex(np.sum(f(uu, vv) * _spectral_d_first(pulled)) * (TWO_PI / grid) ** 2)
    return upper, lower
