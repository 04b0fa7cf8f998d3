# scalars.py - Exact coefficient arithmetic: complex rationals and ħ-series
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, List, Sequence, Union
import logging

from config import DEFAULT_HBAR_TRUNC
from cylinder import TruncationError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"Expected int or Fraction, got {type(x).__name__}")


class GaussianRational:
    """Complex number re + i·im with arbitrary-precision rational parts.

    Fraction keeps both parts in lowest terms with positive denominators,
    so equality is structural.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Rational = 0, im: Rational = 0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value, 0)
        if isinstance(value, tuple) and len(value) == 2:
            return cls(value[0], value[1])
        raise TypeError(f"Cannot convert {value!r} to GaussianRational")

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        if self.im == 0 and o.im == 0:
            return GaussianRational(self.re * o.re, 0)
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("GaussianRational division by zero")
        norm = o.re * o.re + o.im * o.im
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / norm,
            (self.im * o.re - self.re * o.im) / norm,
        )

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re} {sign} {abs(self.im)}*i"


ZERO = GaussianRational(0, 0)
ONE = GaussianRational(1, 0)
I = GaussianRational(0, 1)


class HbarSeries:
    """Formal power series in ħ truncated at a fixed order N.

    coeffs[k] is the coefficient of ħ^k; len(coeffs) == N + 1 always.
    """

    __slots__ = ("coeffs", "trunc_order")

    def __init__(self, coeffs: Iterable = (), trunc_order: int = DEFAULT_HBAR_TRUNC):
        if trunc_order < 0:
            raise TruncationError(f"Truncation order must be non-negative, got {trunc_order}")
        values = [GaussianRational.coerce(c) for c in coeffs]
        if len(values) > trunc_order + 1:
            if any(not c.is_zero() for c in values[trunc_order + 1:]):
                raise TruncationError(
                    f"Series has nonzero terms beyond order {trunc_order}"
                )
            values = values[: trunc_order + 1]
        values.extend([ZERO] * (trunc_order + 1 - len(values)))
        object.__setattr__(self, "coeffs", tuple(values))
        object.__setattr__(self, "trunc_order", trunc_order)

    def __setattr__(self, name, value):
        raise AttributeError("HbarSeries is immutable")

    @classmethod
    def constant(cls, c, trunc_order: int = DEFAULT_HBAR_TRUNC) -> "HbarSeries":
        return cls([c], trunc_order)

    @classmethod
    def hbar(cls, power: int = 1, coefficient=1, trunc_order: int = DEFAULT_HBAR_TRUNC) -> "HbarSeries":
        """coefficient·ħ^power."""
        if power > trunc_order:
            raise TruncationError(f"ħ^{power} exceeds truncation order {trunc_order}")
        coeffs = [ZERO] * power + [GaussianRational.coerce(coefficient)]
        return cls(coeffs, trunc_order)

    @classmethod
    def zero(cls, trunc_order: int = DEFAULT_HBAR_TRUNC) -> "HbarSeries":
        return cls((), trunc_order)

    def coefficient(self, k: int) -> GaussianRational:
        if 0 <= k <= self.trunc_order:
            return self.coeffs[k]
        return ZERO

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def lowest_order(self) -> int:
        """Smallest k with nonzero ħ^k coefficient, or -1 for the zero series."""
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                return k
        return -1

    def with_order(self, trunc_order: int) -> "HbarSeries":
        return HbarSeries(self.coeffs[: trunc_order + 1], trunc_order)

    def evaluate(self, hbar_value: float) -> complex:
        total = 0j
        for c in reversed(self.coeffs):
            total = total * hbar_value + c.to_complex()
        return total

    def _check(self, other: "HbarSeries") -> None:
        if self.trunc_order != other.trunc_order:
            logger.error(
                f"Truncation mismatch: {self.trunc_order} vs {other.trunc_order}"
            )
            raise TruncationError(
                f"Mismatched truncation orders {self.trunc_order} and {other.trunc_order}"
            )

    def _coerce_series(self, other) -> "HbarSeries":
        if isinstance(other, HbarSeries):
            self._check(other)
            return other
        return HbarSeries.constant(GaussianRational.coerce(other), self.trunc_order)

    def __add__(self, other):
        try:
            o = self._coerce_series(other)
        except TypeError:
            return NotImplemented
        return HbarSeries([a + b for a, b in zip(self.coeffs, o.coeffs)], self.trunc_order)

    __radd__ = __add__

    def __neg__(self):
        return HbarSeries([-c for c in self.coeffs], self.trunc_order)

    def __sub__(self, other):
        try:
            o = self._coerce_series(other)
        except TypeError:
            return NotImplemented
        return HbarSeries([a - b for a, b in zip(self.coeffs, o.coeffs)], self.trunc_order)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "HbarSeries":
        g = GaussianRational.coerce(c)
        return HbarSeries([g * a for a in self.coeffs], self.trunc_order)

    def shift(self, power: int, strict: bool = True) -> "HbarSeries":
        """Multiply by ħ^power.

        With strict=False the product is truncated like any series product;
        with strict=True dropping a nonzero term raises TruncationError.
        """
        if power == 0:
            return self
        top = self.trunc_order - power
        if top < 0:
            if strict and not self.is_zero():
                raise TruncationError(
                    f"ħ^{power} exceeds truncation order {self.trunc_order}"
                )
            return HbarSeries.zero(self.trunc_order)
        if strict and any(not c.is_zero() for c in self.coeffs[top + 1:]):
            raise TruncationError(
                f"Multiplying by ħ^{power} overflows truncation order {self.trunc_order}"
            )
        return HbarSeries([ZERO] * power + list(self.coeffs[: top + 1]), self.trunc_order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return series_mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, HbarSeries):
            return self.trunc_order == other.trunc_order and self.coeffs == other.coeffs
        try:
            return self == HbarSeries.constant(GaussianRational.coerce(other), self.trunc_order)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.trunc_order))

    def __repr__(self):
        return f"HbarSeries({[str(c) for c in self.coeffs]}, trunc_order={self.trunc_order})"

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            body = str(c) if c.is_real() or c.re == 0 else f"({c})"
            if k == 0:
                parts.append(body)
            elif k == 1:
                parts.append(f"{body}*ħ")
            else:
                parts.append(f"{body}*ħ^{k}")
        return " + ".join(parts) if parts else "0"


def series_mul(a: HbarSeries, b: HbarSeries) -> HbarSeries:
    """Cauchy product of two ħ-series truncated back to their common order."""
    a._check(b)
    n = a.trunc_order
    nz_a = [(i, c) for i, c in enumerate(a.coeffs) if not c.is_zero()]
    nz_b = [(j, c) for j, c in enumerate(b.coeffs) if not c.is_zero()]
    out: List[GaussianRational] = [ZERO] * (n + 1)
    for i, ca in nz_a:
        for j, cb in nz_b:
            if i + j > n:
                break
            out[i + j] = out[i + j] + ca * cb
    return HbarSeries(out, n)


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """Bernoulli number B_k with z/(e^z - 1) = Σ B_k z^k/k!, so B_1 = -1/2."""
    if k < 0:
        raise ValueError(f"Bernoulli index must be non-negative, got {k}")
    if k == 0:
        return Fraction(1)
    if k > 1 and k % 2 == 1:
        return Fraction(0)
    total = sum((comb(k + 1, j) * bernoulli(j) for j in range(k)), Fraction(0))
    return -total / (k + 1)


def zeta_neg(n: int) -> Fraction:
    """ζ(-n) = (-1)^n B_{n+1}/(n+1)."""
    if n < 0:
        raise ValueError(f"zeta_neg needs n >= 0, got {n}")
    return (-1) ** n * bernoulli(n + 1) / (n + 1)


def series_reciprocal(coeffs: Sequence[Rational], order: int) -> List[Fraction]:
    """Coefficients of 1/f up to z^order for a power series f with f(0) != 0."""
    c = [_as_fraction(x) for x in coeffs] + [Fraction(0)] * max(0, order + 1 - len(coeffs))
    if c[0] == 0:
        raise ZeroDivisionError("Series reciprocal needs a nonzero constant term")
    inv = [Fraction(1) / c[0]]
    for k in range(1, order + 1):
        acc = sum((c[j] * inv[k - j] for j in range(1, k + 1)), Fraction(0))
        inv.append(-acc / c[0])
    return inv


def series_exp(coeffs: Sequence[Rational], order: int) -> List[Fraction]:
    """Coefficients of exp(f) up to z^order for f with f(0) == 0.

    Uses g' = f'·g, i.e. k·g_k = Σ_{j=1..k} j·f_j·g_{k-j}.
    """
    f = [_as_fraction(x) for x in coeffs] + [Fraction(0)] * max(0, order + 1 - len(coeffs))
    if f[0] != 0:
        raise ValueError("series_exp needs a zero constant term")
    g = [Fraction(1)]
    for k in range(1, order + 1):
        acc = sum((j * f[j] * g[k - j] for j in range(1, k + 1)), Fraction(0))
        g.append(acc / k)
    return g


def zeta_generating_coeffs(order: int) -> List[Fraction]:
    """Taylor coefficients of 1/(1 - e^z) + 1/z - 1 at z = 0.

    Computed from the reciprocal of (e^z - 1)/z = Σ z^k/(k+1)!, which does
    not go through the Bernoulli recurrence.
    """
    r = series_reciprocal([Fraction(1, factorial(k + 1)) for k in range(order + 2)], order + 1)
    # 1/(1 - e^z) = -(1/z)·r(z)
    out = [-r[1] - 1]
    out.extend(-r[j + 1] for j in range(1, order + 1))
    return out


def zeta_series_coeffs(order: int) -> List[Fraction]:
    """Coefficients ζ(-k)/k! for k = 0..order."""
    return [zeta_neg(k) / factorial(k) for k in range(order + 1)]

