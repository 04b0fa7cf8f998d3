# kernels.py - Propagators and two-point kernels on Minkowski space and the cylinder
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, factorial, floor, pi
from pathlib import Path
from typing import List, Tuple, Union
import logging

import mpmath
import numpy as np

from config import CSV_SIGNIFICANT_DIGITS, DIAG_LIMIT_THRESHOLD, KERNEL_NAMES, ORACLE_DPS
from cylinder import AlgebraError, ChartError
from cylinder.scalars import bernoulli
from utils import write_csv_atomic

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * pi
DIAG_LIMIT = -1.0 / (48.0 * pi)
_SERIES_RADIUS = 0.5
_SERIES_TERMS = 14

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class NullPoint:
    """Point in null coordinates u = t - x, v = t + x."""
    u: float
    v: float

    def canonical(self) -> "NullPoint":
        """Cylinder representative with u in [0, 2π) under (u, v) ~ (u + 2π, v - 2π)."""
        k = floor(self.u / TWO_PI)
        return NullPoint(self.u - TWO_PI * k, self.v + TWO_PI * k)

    def translate(self, k: int) -> "NullPoint":
        """Deck transformation applied k times."""
        return NullPoint(self.u + TWO_PI * k, self.v - TWO_PI * k)


def _theta(x: ArrayLike) -> ArrayLike:
    # θ(0) = 1/2 keeps E = E_ret - E_adv exact on the light cone
    return 0.5 * (1.0 + np.sign(x))


def _e_mink(du: ArrayLike, dv: ArrayLike) -> ArrayLike:
    return -0.25 * (np.sign(du) + np.sign(dv))


def _e_cyl(du: ArrayLike, dv: ArrayLike) -> ArrayLike:
    return -0.5 * (np.floor(du / TWO_PI) + np.floor(dv / TWO_PI) + 1.0)


def eval_E_mink(x: NullPoint, y: NullPoint) -> float:
    """Pauli-Jordan function -(1/4)[sgn(u-u') + sgn(v-v')]."""
    return float(_e_mink(x.u - y.u, x.v - y.v))


def eval_E_ret(x: NullPoint, y: NullPoint) -> float:
    """Retarded propagator -(1/2)θ(u-u')θ(v-v'); supported where x is in the future of y."""
    return float(-0.5 * _theta(x.u - y.u) * _theta(x.v - y.v))


def eval_E_adv(x: NullPoint, y: NullPoint) -> float:
    """Advanced propagator -(1/2)θ(u'-u)θ(v'-v)."""
    return float(-0.5 * _theta(y.u - x.u) * _theta(y.v - x.v))


def eval_E_left(x: NullPoint, y: NullPoint) -> float:
    """Chiral part of E depending on u only."""
    return float(-0.25 * np.sign(x.u - y.u))


def eval_E_right(x: NullPoint, y: NullPoint) -> float:
    """Chiral part of E depending on v only."""
    return float(-0.25 * np.sign(x.v - y.v))


def eval_E_cyl(x: NullPoint, y: NullPoint) -> float:
    """Cylinder Pauli-Jordan function -(1/2)(⌊Δu/2π⌋ + ⌊Δv/2π⌋ + 1)."""
    return float(_e_cyl(x.u - y.u, x.v - y.v))


def image_stabilization_bound(x: NullPoint, y: NullPoint) -> int:
    """Smallest N past which images_partial_sum no longer changes."""
    return ceil((abs(x.u - y.u) + abs(x.v - y.v)) / TWO_PI) + 1


def images_partial_sum(x: NullPoint, y: NullPoint, N: int) -> float:
    """Σ_{|k| <= N} E_mink(x, deck^k y)."""
    du = x.u - y.u
    dv = x.v - y.v
    ks = np.arange(-N, N + 1, dtype=float)
    return float(np.sum(_e_mink(du - TWO_PI * ks, dv + TWO_PI * ks)))


def eval_dW_cyl(u: float, uprime: float, eps: float, N: int) -> complex:
    """Mode sum (1/4π) Σ_{k=1..N} k·e^{-ik(u-u')}·e^{-kε}."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    k = np.arange(1, N + 1, dtype=float)
    terms = k * np.exp(-k * (eps + 1j * (u - uprime)))
    return complex(np.sum(terms) / (4.0 * pi))


def eval_dW_cyl_closed(u: float, uprime: float, eps: float) -> complex:
    """Closed form (1/4π)·w/(1-w)² with w = e^{-i(u-u'-iε)}.

    x/(1-x)² is invariant under x -> 1/x, so this equals the e^{iz}/(1-e^{iz})² form.
    """
    w = np.exp(-1j * (u - uprime) - eps)
    return complex(w / (1.0 - w) ** 2 / (4.0 * pi))


def dW_tail_bound(eps: float, N: int) -> float:
    """(1/4π) Σ_{k>N} k·e^{-kε}, the largest possible gap between mode sum and closed form."""
    q = np.exp(-eps)
    return float(q ** (N + 1) * ((N + 1) - N * q) / (1.0 - q) ** 2 / (4.0 * pi))


def w_cyl(u_sep: ArrayLike) -> ArrayLike:
    """ε -> 0 boundary value Re[(1/4π)·e^{iu}/(1-e^{iu})²] = -1/(16π·sin²(u/2))."""
    return -1.0 / (16.0 * pi * np.sin(0.5 * np.asarray(u_sep)) ** 2)


def _diag_series_coeffs() -> List[float]:
    # (1/4π)(1/u² - 1/(4 sin²(u/2))) = (1/4π) Σ_{k>=1} (-1)^k (2k-1) B_{2k} u^{2k-2}/(2k)!
    return [
        float(Fraction((-1) ** k * (2 * k - 1)) * bernoulli(2 * k) / factorial(2 * k)) / (4.0 * pi)
        for k in range(1, _SERIES_TERMS + 1)
    ]


_DIAG_SERIES = _diag_series_coeffs()


def diag_difference(u_sep: float) -> float:
    """Smooth remainder (∂⊗∂)(H_cyl - H_sing) at chiral separation u_sep.

    Below DIAG_LIMIT_THRESHOLD the analytic limit -1/(48π) is returned; up to
    |u_sep| = 0.5 the exact Taylor series replaces the cancelling closed form.
    """
    s = abs(float(u_sep))
    if s >= TWO_PI:
        logger.error(f"diag_difference outside chart: u_sep={u_sep}")
        raise ChartError(f"|u_sep| must be below 2π, got {u_sep}")
    if s < DIAG_LIMIT_THRESHOLD:
        return DIAG_LIMIT
    if s < _SERIES_RADIUS:
        x2 = s * s
        total = 0.0
        for c in reversed(_DIAG_SERIES):
            total = total * x2 + c
        return total
    return float((1.0 / s ** 2 - 1.0 / (4.0 * np.sin(0.5 * s) ** 2)) / (4.0 * pi))


def diag_difference_oracle(u_sep: float, dps: int = ORACLE_DPS) -> mpmath.mpf:
    """High-precision reference for diag_difference."""
    with mpmath.workdps(dps):
        s = mpmath.mpf(u_sep)
        if s == 0:
            return -1 / (48 * mpmath.pi)
        return (1 / s ** 2 - 1 / (4 * mpmath.sin(s / 2) ** 2)) / (4 * mpmath.pi)


def abel_zeta_estimate(eps: float, N: int) -> float:
    """4π·Re dW_cyl(0, 0; ε, N) minus the continuum integral 1/ε²; tends to ζ(-1)."""
    return 4.0 * pi * eval_dW_cyl(0.0, 0.0, eps, N).real - 1.0 / eps ** 2


def abel_zeta_oracle(eps: float, dps: int = ORACLE_DPS) -> mpmath.mpf:
    """Exact ε-series value 1/(4 sinh²(ε/2)) - 1/ε² at high precision."""
    with mpmath.workdps(dps):
        e = mpmath.mpf(eps)
        return 1 / (4 * mpmath.sinh(e / 2) ** 2) - 1 / e ** 2


def squared_coeff(k: int) -> Fraction:
    """k-th Cauchy-product coefficient Σ_{l=0..k} l(k-l) of the squared chiral kernel."""
    if k < 0:
        raise ValueError(f"squared_coeff needs k >= 0, got {k}")
    return Fraction(sum(l * (k - l) for l in range(k + 1)))


def squared_coeff_closed(k: int) -> Fraction:
    return Fraction(k ** 3 - k, 6)


def central_term_pairing(n: int, m: int, K: int) -> Fraction:
    """(1/2)·squared_coeff(n)·[n > 0]·[n + m = 0] = n(n²-1)/12·θ(n)·δ_{n+m,0}."""
    if K < abs(n):
        raise AlgebraError(f"central_term_pairing needs K >= |n|, got K={K}, n={n}")
    if n > 0 and n + m == 0:
        return Fraction(1, 2) * squared_coeff(n)
    return Fraction(0)


@dataclass(frozen=True)
class ParametrixKernel:
    """Hadamard parametrix W_sing = -(1/4π)·log((u-u')(v-v')/λ²)."""
    lam: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"Parametrix length scale must be positive, got {self.lam}")

    def value(self, du: ArrayLike, dv: ArrayLike) -> ArrayLike:
        return -np.log(np.abs(np.asarray(du) * np.asarray(dv)) / self.lam ** 2) / (4.0 * pi)

    @staticmethod
    def chiral_derivative(du: ArrayLike) -> ArrayLike:
        """∂_u∂_u' W_sing = -1/(4π(u-u')²); independent of λ."""
        return -1.0 / (4.0 * pi * np.asarray(du) ** 2)

    def scale_shift(self, other: "ParametrixKernel") -> float:
        """Constant value(λ) - value(λ') = (1/2π)·log(λ/λ')."""
        return float(np.log(self.lam / other.lam) / (2.0 * pi))


def _separation_grid(grid: int) -> np.ndarray:
    # Half-step offset keeps exact zeros (and ±2π) off the grid.
    step = 2.0 * TWO_PI / grid
    return -TWO_PI + (np.arange(grid) + 0.5) * step


def kernel_grid(name: str, grid: int) -> List[Tuple[float, float, float]]:
    """Rows (u_sep, v_sep, value) on a grid x grid lattice of separations in (-2π, 2π)."""
    if name not in KERNEL_NAMES:
        raise ValueError(f"Unknown kernel '{name}'. Known kernels: {', '.join(KERNEL_NAMES)}")
    if grid < 1:
        raise ValueError(f"Grid size must be positive, got {grid}")
    seps = _separation_grid(grid)
    uu, vv = np.meshgrid(seps, seps, indexing="ij")
    if name == "e-mink":
        values = _e_mink(uu, vv)
    elif name == "e-cyl":
        values = _e_cyl(uu, vv)
    elif name == "w-cyl":
        values = w_cyl(uu)
    else:
        column = np.array([diag_difference(s) for s in seps])
        values = np.repeat(column[:, None], grid, axis=1)
    return list(zip(uu.ravel().tolist(), vv.ravel().tolist(), values.ravel().tolist()))


def dump_kernel_csv(name: str, grid: int, path: Path) -> Path:
    """Write a kernel grid as CSV with a header row and 17 significant digits."""
    rows = kernel_grid(name, grid)
    fmt = f"{{:.{CSV_SIGNIFICANT_DIGITS}g}}"
    body = [[fmt.format(a), fmt.format(b), fmt.format(c)] for a, b, c in rows]
    write_csv_atomic(Path(path), ["u_sep", "v_sep", "value"], body)
    logger.info(f"Wrote {len(body)} rows of {name} to {path}")
    return Path(path)
