# functionals.py - Chiral functionals of band-limited configurations, evaluated spectrally
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import factorial, pi, sqrt
from typing import Mapping, Optional, Tuple, Union
import logging

import numpy as np

from cylinder import AlgebraError
from cylinder.kernels import central_term_pairing, squared_coeff

logger = logging.getLogger(__name__)

SQRT_PI = sqrt(pi)
_REALITY_TOL = 1e-12


class TrigPoly:
    """Trigonometric polynomial Σ_{|k| <= band} c_k e^{iku} on the circle."""

    __slots__ = ("coeffs", "band")

    def __init__(self, coeffs, band: Optional[int] = None):
        if isinstance(coeffs, Mapping):
            band = max((abs(int(k)) for k in coeffs), default=0) if band is None else band
            arr = np.zeros(2 * band + 1, dtype=complex)
            for k, v in coeffs.items():
                if abs(k) > band:
                    raise ValueError(f"Frequency {k} outside band {band}")
                arr[k + band] = v
        else:
            arr = np.asarray(coeffs, dtype=complex)
            if arr.ndim != 1 or arr.size % 2 == 0:
                raise ValueError("Coefficient array must have odd length 2*band + 1")
            band = arr.size // 2
        self.coeffs = arr
        self.band = band

    @classmethod
    def monomial(cls, n: int, scale: complex = 1.0) -> "TrigPoly":
        return cls({n: scale})

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.band:
            return 0j
        return complex(self.coeffs[k + self.band])

    def evaluate(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        ks = np.arange(-self.band, self.band + 1)
        return np.exp(1j * np.multiply.outer(u, ks)) @ self.coeffs

    def derivative(self) -> "TrigPoly":
        ks = np.arange(-self.band, self.band + 1)
        return TrigPoly(1j * ks * self.coeffs)

    def integral(self) -> complex:
        """∫_0^{2π} f(u) du."""
        return 2.0 * pi * self.coefficient(0)

    def pair(self, other: "TrigPoly") -> complex:
        """∫_0^{2π} f(u)·g(u) du = 2π Σ_k f_k g_{-k}."""
        return self.__mul__(other).integral()

    def is_real(self, tol: float = _REALITY_TOL) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.coeffs), initial=0.0)))
        return bool(np.allclose(self.coeffs, np.conj(self.coeffs[::-1]), atol=tol * scale, rtol=0.0))

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        band = max(self.band, other.band)
        out = np.zeros(2 * band + 1, dtype=complex)
        out[band - self.band: band + self.band + 1] += self.coeffs
        out[band - other.band: band + other.band + 1] += other.coeffs
        return TrigPoly(out)

    def __mul__(self, other) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            return TrigPoly(np.convolve(self.coeffs, other.coeffs))
        return TrigPoly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __repr__(self):
        return f"TrigPoly(band={self.band})"


class ChiralConfig(TrigPoly):
    """Real band-limited ψ = ∂_u φ on the circle, stored by Fourier coefficients ψ̂_k."""

    __slots__ = ()

    def __init__(self, coeffs, band: Optional[int] = None):
        super().__init__(coeffs, band)
        if not self.is_real():
            raise AlgebraError("ChiralConfig coefficients must satisfy ψ̂_{-k} = conj(ψ̂_k)")
        grid = np.linspace(0.0, 2.0 * pi, 4 * self.band + 8, endpoint=False)
        values = self.evaluate(grid)
        if np.max(np.abs(values.imag), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(values))):
            raise AlgebraError("ChiralConfig does not evaluate to a real function")

    @classmethod
    def from_real_coefficients(cls, a, b) -> "ChiralConfig":
        """ψ = a_0 + Σ_{k>=1} (a_k cos ku + b_k sin ku)."""
        a = list(a)
        b = list(b)
        band = max(len(a), len(b)) - 1
        a += [0.0] * (band + 1 - len(a))
        b += [0.0] * (band + 1 - len(b))
        coeffs = {0: complex(a[0])}
        for k in range(1, band + 1):
            coeffs[k] = 0.5 * (a[k] - 1j * b[k])
            coeffs[-k] = 0.5 * (a[k] + 1j * b[k])
        return cls(coeffs, max(band, 0))

    @classmethod
    def zero(cls, band: int = 0) -> "ChiralConfig":
        return cls(np.zeros(2 * band + 1, dtype=complex))

    @classmethod
    def random(cls, band: int, rng: np.random.Generator, scale: float = 1.0) -> "ChiralConfig":
        a = rng.normal(scale=scale, size=band + 1)
        b = rng.normal(scale=scale, size=band + 1)
        b[0] = 0.0
        return cls.from_real_coefficients(a, b)

    def on_grid(self, points: int) -> np.ndarray:
        """Real samples ψ(2πj/points), j = 0..points-1."""
        grid = np.linspace(0.0, 2.0 * pi, points, endpoint=False)
        return np.real(self.evaluate(grid))

    def __repr__(self):
        return f"ChiralConfig(band={self.band})"


class TestFnCircle(TrigPoly):
    """Smearing function on the circle with finitely supported spectrum."""

    __test__ = False
    __slots__ = ()

    @classmethod
    def random_real(cls, band: int, rng: np.random.Generator, scale: float = 1.0) -> "TestFnCircle":
        psi = ChiralConfig.random(band, rng, scale)
        return cls(psi.coeffs)

    @classmethod
    def constant(cls, value: float = 1.0) -> "TestFnCircle":
        return cls({0: value})


class Family(Enum):
    A = "A"
    B = "B"
    T = "T"


@dataclass(frozen=True)
class FunctionalId:
    """One member of the A_n, B_n or T(f) families."""
    family: Family
    index: int = 0
    smearing: Optional[TestFnCircle] = field(default=None, compare=False)

    @classmethod
    def A(cls, n: int) -> "FunctionalId":
        return cls(Family.A, n)

    @classmethod
    def B(cls, n: int) -> "FunctionalId":
        return cls(Family.B, n)

    @classmethod
    def T(cls, f: TestFnCircle) -> "FunctionalId":
        return cls(Family.T, 0, f)

    @property
    def degree(self) -> int:
        return 1 if self.family is Family.A else 2

    def __str__(self):
        if self.family is Family.T:
            return "T(f)"
        return f"{self.family.value}_{self.index}"


FunctionalLike = Union[FunctionalId, Tuple[str, int]]


def _resolve(F) -> FunctionalId:
    if isinstance(F, FunctionalId):
        if F.family is Family.T and F.smearing is None:
            raise AlgebraError("T(f) needs a smearing function")
        return F
    if isinstance(F, tuple) and len(F) == 2 and F[0] in ("A", "B"):
        return FunctionalId(Family(F[0]), int(F[1]))
    raise AlgebraError(f"Unsupported functional {F!r}; expected A_n, B_n or T(f)")


def _require_config(psi) -> ChiralConfig:
    if not isinstance(psi, ChiralConfig):
        raise AlgebraError("Numeric evaluation needs a band-limited ChiralConfig")
    return psi


def eval_A(n: int, psi: ChiralConfig) -> complex:
    """A_n[ψ] = (1/√π)∫ e^{inu} ψ du = 2√π·ψ̂_{-n}."""
    return 2.0 * SQRT_PI * psi.coefficient(-n)


def eval_B(n: int, psi: ChiralConfig) -> complex:
    """B_n[ψ] = ∫ e^{inu} ψ² du = 2π Σ_k ψ̂_k ψ̂_{-n-k}."""
    return 2.0 * pi * (psi * psi).coefficient(-n)


def eval_T(f: TestFnCircle, psi: ChiralConfig) -> complex:
    """T(f)[ψ] = (1/2)∫ f ψ² du."""
    return 0.5 * f.pair(psi * psi)


def eval_functional(F, psi: ChiralConfig) -> complex:
    F = _resolve(F)
    psi = _require_config(psi)
    if F.family is Family.A:
        return eval_A(F.index, psi)
    if F.family is Family.B:
        return eval_B(F.index, psi)
    return eval_T(F.smearing, psi)


def first_derivative(F, psi: ChiralConfig) -> TrigPoly:
    """Density of δF/δψ(u) as a trig polynomial."""
    F = _resolve(F)
    if F.family is Family.A:
        return TrigPoly.monomial(F.index, 1.0 / SQRT_PI)
    if F.family is Family.B:
        return TrigPoly.monomial(F.index, 2.0) * psi
    return F.smearing * psi


def second_derivative_weight(F) -> Optional[TrigPoly]:
    """w with δ²F/δψ(u)δψ(u') = w(u)·δ(u - u'); None for linear functionals."""
    F = _resolve(F)
    if F.family is Family.A:
        return None
    if F.family is Family.B:
        return TrigPoly.monomial(F.index, 2.0)
    return F.smearing


def chiral_bracket_numeric(F, G, psi: ChiralConfig) -> complex:
    """{F, G} = (1/2)∫ F'(u)·∂_u G'(u) du, the pairing through (1/2)δ'(u - u')."""
    psi = _require_config(psi)
    fp = first_derivative(F, psi)
    gp = first_derivative(G, psi)
    return 0.5 * fp.pair(gp.derivative())


def _positive_frequency_pairing(fp: TrigPoly, gp: TrigPoly) -> complex:
    # ⟨(∂⊗∂)W_cyl, F'⊗G'⟩ = π Σ_{k>=1} k F'_k G'_{-k}
    top = min(fp.band, gp.band)
    return pi * sum(k * fp.coefficient(k) * gp.coefficient(-k) for k in range(1, top + 1))


def star_numeric_coeffs(F, G, psi: ChiralConfig) -> Tuple[complex, complex, complex]:
    """ħ^0, ħ^1 and ħ^2 coefficients of F ⋆ G at ψ for the cylinder vacuum."""
    psi = _require_config(psi)
    F = _resolve(F)
    G = _resolve(G)
    c0 = eval_functional(F, psi) * eval_functional(G, psi)
    c1 = _positive_frequency_pairing(first_derivative(F, psi), first_derivative(G, psi))
    wf = second_derivative_weight(F)
    wg = second_derivative_weight(G)
    if wf is None or wg is None:
        c2 = 0j
    elif F.family is Family.B and G.family is Family.B:
        c2 = complex(float(central_term_pairing(F.index, G.index, abs(F.index))))
    else:
        # (1/2)∫∫ wF(u) wG(u') [(∂⊗∂)W_cyl]² = (1/8) Σ_k squared_coeff(k)·wF_k·wG_{-k}
        top = min(wf.band, wg.band)
        c2 = sum(
            float(squared_coeff(k)) * wf.coefficient(k) * wg.coefficient(-k)
            for k in range(2, top + 1)
        ) / 8.0
    return complex(c0), complex(c1), complex(c2)


def star_numeric(F, G, psi: ChiralConfig, hbar_value: float) -> complex:
    c0, c1, c2 = star_numeric_coeffs(F, G, psi)
    return c0 + hbar_value * c1 + hbar_value ** 2 * c2


def hbar_series_terms(n: int, m: int, psi: ChiralConfig, k_max: int) -> np.ndarray:
    """Terms k·A_{n-k}·A_{m+k} for k = 1..k_max."""
    return np.array(
        [k * eval_A(n - k, psi) * eval_A(m + k, psi) for k in range(1, k_max + 1)],
        dtype=complex,
    )


def hbar_series_sum(n: int, m: int, psi: ChiralConfig) -> complex:
    """Σ_{k>=1} k A_{n-k} A_{m+k}; terms past k = n + band vanish identically."""
    k_max = max(0, n + psi.band)
    return complex(np.sum(hbar_series_terms(n, m, psi, k_max))) if k_max else 0j


def witt_series_identity(n: int, m: int, psi: ChiralConfig) -> Tuple[complex, complex]:
    """(Σ_{k∈ℤ} k A_{n-k}A_{m+k}, (1/2)(n-m) Σ_k A_k A_{n+m-k})."""
    band = psi.band
    lhs = sum(
        k * eval_A(n - k, psi) * eval_A(m + k, psi) for k in range(n - band, n + band + 1)
    )
    rhs = 0.5 * (n - m) * sum(
        eval_A(k, psi) * eval_A(n + m - k, psi) for k in range(-band, band + 1)
    )
    return complex(lhs), complex(rhs)


def vertex_alpha_coeff(a: float, logOmega: float, order: int) -> float:
    """ħ^order coefficient of Ω^{ħa²/4π}: ((a²/4π)·log Ω)^order / order!."""
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    return (a * a * logOmega / (4.0 * pi)) ** order / factorial(order)


def vertex_alpha_rational(a_squared: Fraction, order: int) -> Fraction:
    """Exact coefficient (a²/4)^n/n! multiplying (log Ω/π)^n."""
    return (Fraction(a_squared) / 4) ** order / factorial(order)


def parametrix_pullback_limit(log_omega: float) -> float:
    """Coincidence limit of W_sing(χx, χy) - W_sing(x, y) = -(1/2π)·log Ω."""
    return -log_omega / (2.0 * pi)


def vertex_order_term(a: float, log_omega: float, order: int) -> float:
    """Order-n term of the covariant re-ordering of :e^{iaΦ}: under constant Ω.

    (1/n!)(ħ/2)^n pairs n copies of (-a²)·[pullback limit]; the ħ^n coefficient
    equals vertex_alpha_coeff.
    """
    return (0.5 * -a * a * parametrix_pullback_limit(log_omega)) ** order / factorial(order)
