# modes.py - Normal-ordered polynomial algebra over chiral modes a_n
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import pi, sqrt
from types import MappingProxyType
from typing import Callable, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple
import logging

import numpy as np

from config import DEFAULT_HBAR_TRUNC
from cylinder import AlgebraError, TruncationError
from cylinder.scalars import ONE, ZERO, GaussianRational, HbarSeries

logger = logging.getLogger(__name__)


class ModeMonomial(tuple):
    """Multiset of generator indices, stored sorted so equal multisets compare equal."""

    __slots__ = ()

    def __new__(cls, indices: Iterable[int] = ()):
        return super().__new__(cls, sorted(int(i) for i in indices))

    @property
    def degree(self) -> int:
        return len(self)

    def __str__(self):
        if not self:
            return "1"
        return "*".join(f"a[{i}]" for i in self)


EMPTY = ModeMonomial()


class ModePolynomial:
    """Finite sum of ModeMonomials with HbarSeries coefficients.

    Immutable: every operation returns a new polynomial, and terms with an
    identically zero coefficient are never stored.
    """

    __slots__ = ("_terms", "trunc_order")

    def __init__(self, terms: Optional[Mapping] = None, trunc_order: int = DEFAULT_HBAR_TRUNC):
        clean: Dict[ModeMonomial, HbarSeries] = {}
        for key, value in (terms or {}).items():
            mono = key if isinstance(key, ModeMonomial) else ModeMonomial(key)
            if isinstance(value, HbarSeries):
                if value.trunc_order != trunc_order:
                    raise TruncationError(
                        f"Coefficient order {value.trunc_order} does not match polynomial order {trunc_order}"
                    )
                coeff = value
            else:
                coeff = HbarSeries.constant(value, trunc_order)
            if mono in clean:
                coeff = clean[mono] + coeff
            clean[mono] = coeff
        object.__setattr__(
            self, "_terms", {m: c for m, c in clean.items() if not c.is_zero()}
        )
        object.__setattr__(self, "trunc_order", trunc_order)

    def __setattr__(self, name, value):
        raise AttributeError("ModePolynomial is immutable")

    @classmethod
    def _from_clean(cls, terms: Dict[ModeMonomial, HbarSeries], trunc_order: int) -> "ModePolynomial":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_terms", {m: c for m, c in terms.items() if not c.is_zero()})
        object.__setattr__(obj, "trunc_order", trunc_order)
        return obj

    @classmethod
    def scalar(cls, c, trunc_order: int = DEFAULT_HBAR_TRUNC) -> "ModePolynomial":
        if isinstance(c, HbarSeries):
            return cls({EMPTY: c}, c.trunc_order)
        return cls({EMPTY: c}, trunc_order)

    @property
    def terms(self) -> Mapping[ModeMonomial, HbarSeries]:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, monomial: Iterable[int]) -> HbarSeries:
        key = monomial if isinstance(monomial, ModeMonomial) else ModeMonomial(monomial)
        return self._terms.get(key, HbarSeries.zero(self.trunc_order))

    def constant_term(self) -> HbarSeries:
        return self.coefficient(EMPTY)

    def degree(self) -> int:
        return max((len(m) for m in self._terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({len(m) for m in self._terms}) <= 1

    def indices(self) -> set:
        return {i for m in self._terms for i in m}

    def hbar_coefficient(self, k: int) -> "ModePolynomial":
        """The ħ^k part as a polynomial with ħ-independent coefficients."""
        out = {
            m: HbarSeries.constant(c.coefficient(k), self.trunc_order)
            for m, c in self._terms.items()
        }
        return ModePolynomial._from_clean(out, self.trunc_order)

    def _check(self, other: "ModePolynomial") -> None:
        if self.trunc_order != other.trunc_order:
            raise TruncationError(
                f"Mismatched truncation orders {self.trunc_order} and {other.trunc_order}"
            )

    def __add__(self, other):
        if not isinstance(other, ModePolynomial):
            other = ModePolynomial.scalar(other, self.trunc_order)
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out[m] + c if m in out else c
        return ModePolynomial._from_clean(out, self.trunc_order)

    __radd__ = __add__

    def __neg__(self):
        return ModePolynomial._from_clean({m: -c for m, c in self._terms.items()}, self.trunc_order)

    def __sub__(self, other):
        if not isinstance(other, ModePolynomial):
            other = ModePolynomial.scalar(other, self.trunc_order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "ModePolynomial":
        """Multiply every coefficient by a scalar or an HbarSeries."""
        if isinstance(c, HbarSeries):
            if c.trunc_order != self.trunc_order:
                raise TruncationError(
                    f"Mismatched truncation orders {self.trunc_order} and {c.trunc_order}"
                )
            out = {m: coeff * c for m, coeff in self._terms.items()}
        else:
            g = GaussianRational.coerce(c)
            out = {m: coeff.scale(g) for m, coeff in self._terms.items()}
        return ModePolynomial._from_clean(out, self.trunc_order)

    def __mul__(self, other):
        if isinstance(other, ModePolynomial):
            return classical_mul(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def __eq__(self, other):
        if not isinstance(other, ModePolynomial):
            return NotImplemented
        return self.trunc_order == other.trunc_order and self._terms == other._terms

    def __hash__(self):
        return hash((frozenset(self._terms.items()), self.trunc_order))

    def __repr__(self):
        return f"ModePolynomial({self}, trunc_order={self.trunc_order})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=lambda x: (len(x), tuple(x))):
            c = self._terms[m]
            if m == EMPTY:
                parts.append(f"({c})")
            else:
                parts.append(f"({c})*{m}")
        return " + ".join(parts)


def generator(n: int, trunc_order: int = DEFAULT_HBAR_TRUNC) -> ModePolynomial:
    """The single generator a_n."""
    return ModePolynomial({ModeMonomial((n,)): 1}, trunc_order)


def monomial(indices: Iterable[int], coefficient=1, trunc_order: int = DEFAULT_HBAR_TRUNC) -> ModePolynomial:
    return ModePolynomial({ModeMonomial(indices): coefficient}, trunc_order)


@dataclass(frozen=True)
class ContractionKernel:
    """Two-point pairing <a_m a_n> used to contract a left generator a_m with a right a_n.

    antidiagonal=True promises pairing(m, n) == 0 unless m + n == 0, which
    lets contractions look up partners instead of scanning.
    """
    label: str
    pairing: Callable[[int, int], GaussianRational]
    antidiagonal: bool = True

    def __call__(self, m: int, n: int) -> GaussianRational:
        if self.antidiagonal and m + n != 0:
            return ZERO
        return GaussianRational.coerce(self.pairing(m, n))

    def shifted(self, other: "ContractionKernel", label: Optional[str] = None) -> "ContractionKernel":
        """Kernel with pairing self(m, n) + other(m, n)."""
        return ContractionKernel(
            label=label or f"{self.label}+{other.label}",
            pairing=lambda m, n: self(m, n) + other(m, n),
            antidiagonal=self.antidiagonal and other.antidiagonal,
        )

    def negated(self) -> "ContractionKernel":
        return ContractionKernel(
            label=f"-{self.label}",
            pairing=lambda m, n: -self(m, n),
            antidiagonal=self.antidiagonal,
        )


def _vacuum_pairing(m: int, n: int) -> GaussianRational:
    if m > 0 and m + n == 0:
        return GaussianRational(m)
    return ZERO


def _heisenberg_pairing(m: int, n: int) -> GaussianRational:
    # {a_m, a_n} = -i·m·δ_{m+n,0}
    if m + n == 0:
        return GaussianRational(0, -m)
    return ZERO


def cylinder_vacuum_kernel() -> ContractionKernel:
    """<a_m a_n> = m·θ(m)·δ_{m+n,0} for the cylinder ground state."""
    return ContractionKernel("cylinder-vacuum", _vacuum_pairing)


CHIRAL_BRACKET = ContractionKernel("chiral-bracket", _heisenberg_pairing)


def symmetric_kernel(label: str, d: Callable[[int, int], object], antidiagonal: bool = True) -> ContractionKernel:
    """Kernel from a symmetric pairing d(m, n) = d(n, m); d is not checked."""
    return ContractionKernel(label, lambda m, n: GaussianRational.coerce(d(m, n)), antidiagonal)


def zero_mode_kernel(d0) -> ContractionKernel:
    """Pairing 2·d0 on (a_0, a_0) only.

    Under alpha_map this adds ħ·d0 to B_0 = (1/2)a_0² + ... and nothing to B_{n≠0}.
    """
    value = GaussianRational.coerce(d0) * 2
    return ContractionKernel(
        f"zero-mode({d0})", lambda m, n: value if (m == 0 and n == 0) else ZERO
    )


def _partner_positions(x: int, right: Sequence[int], kernel: ContractionKernel) -> List[int]:
    if kernel.antidiagonal:
        return [r for r, y in enumerate(right) if y == -x]
    return list(range(len(right)))


def _bipartite_contractions(
    left: Sequence[int],
    right: Sequence[int],
    kernel: ContractionKernel,
    max_pairs: int,
) -> Dict[Tuple[int, ModeMonomial], GaussianRational]:
    """All partial matchings with at least one pair between left and right positions.

    Returns {(pairs, leftover monomial): summed weight}.
    """
    out: Dict[Tuple[int, ModeMonomial], GaussianRational] = defaultdict(lambda: ZERO)
    partners = [_partner_positions(x, right, kernel) for x in left]

    def walk(i: int, used: int, weight: GaussianRational, pairs: int, rest: Tuple[int, ...]):
        if i == len(left):
            if pairs:
                leftover = rest + tuple(y for r, y in enumerate(right) if not used >> r & 1)
                key = (pairs, ModeMonomial(leftover))
                out[key] = out[key] + weight
            return
        walk(i + 1, used, weight, pairs, rest + (left[i],))
        if pairs >= max_pairs:
            return
        for r in partners[i]:
            if used >> r & 1:
                continue
            w = kernel(left[i], right[r])
            if w.is_zero():
                continue
            walk(i + 1, used | (1 << r), weight * w, pairs + 1, rest)

    walk(0, 0, ONE, 0, ())
    return out


def _index_by_generator(q: ModePolynomial) -> Dict[int, List[ModeMonomial]]:
    index: Dict[int, List[ModeMonomial]] = defaultdict(list)
    for m in q._terms:
        for i in set(m):
            index[i].append(m)
    return index


def _contract(
    p: ModePolynomial,
    q: ModePolynomial,
    kernel: ContractionKernel,
    max_pairs: int,
    with_hbar: bool,
) -> ModePolynomial:
    p._check(q)
    n = p.trunc_order
    acc: Dict[ModeMonomial, HbarSeries] = {}
    by_generator = _index_by_generator(q) if kernel.antidiagonal else None

    for m1, c1 in p._terms.items():
        if not m1:
            continue
        if by_generator is not None:
            seen = set()
            candidates = []
            for x in set(m1):
                for m2 in by_generator.get(-x, ()):
                    if m2 not in seen:
                        seen.add(m2)
                        candidates.append(m2)
        else:
            candidates = [m2 for m2 in q._terms if m2]
        for m2 in candidates:
            c2 = q._terms[m2]
            coeff = None
            for (pairs, rest), weight in _bipartite_contractions(m1, m2, kernel, max_pairs).items():
                if weight.is_zero():
                    continue
                if with_hbar and pairs > n:
                    logger.error(f"Contraction of order {pairs} exceeds truncation order {n}")
                    raise TruncationError(
                        f"Star product needs ħ^{pairs} but truncation order is {n}"
                    )
                if coeff is None:
                    coeff = c1 * c2
                term = coeff.shift(pairs, strict=False) if with_hbar else coeff
                term = term.scale(weight)
                acc[rest] = acc[rest] + term if rest in acc else term
    return ModePolynomial._from_clean(acc, n)


def classical_mul(p: ModePolynomial, q: ModePolynomial) -> ModePolynomial:
    """Commutative product: multiset union of monomials, coefficients multiplied."""
    p._check(q)
    acc: Dict[ModeMonomial, HbarSeries] = {}
    for m1, c1 in p._terms.items():
        for m2, c2 in q._terms.items():
            key = ModeMonomial(m1 + m2) if m1 and m2 else (m1 or m2)
            c = c1 * c2
            acc[key] = acc[key] + c if key in acc else c
    return ModePolynomial._from_clean(acc, p.trunc_order)


def chiral_bracket(p: ModePolynomial, q: ModePolynomial) -> ModePolynomial:
    """Biderivation extending {a_n, a_m} = -i·n·δ_{n+m,0}."""
    return _contract(p, q, CHIRAL_BRACKET, max_pairs=1, with_hbar=False)


def contraction_part(p: ModePolynomial, q: ModePolynomial, kernel: ContractionKernel) -> ModePolynomial:
    """star_product(p, q, kernel) minus classical_mul(p, q)."""
    max_pairs = min(p.degree(), q.degree())
    return _contract(p, q, kernel, max_pairs=max_pairs, with_hbar=True)


def star_product(p: ModePolynomial, q: ModePolynomial, kernel: ContractionKernel) -> ModePolynomial:
    """Wick expansion: each contraction of a_m (from p) with a_n (from q) contributes ħ·pairing(m, n)."""
    return classical_mul(p, q) + contraction_part(p, q, kernel)


def commutator(p: ModePolynomial, q: ModePolynomial, kernel: ContractionKernel) -> ModePolynomial:
    # Classical parts cancel by commutativity.
    return contraction_part(p, q, kernel) - contraction_part(q, p, kernel)


def star_chain(indices: Sequence[int], kernel: ContractionKernel, trunc_order: int = DEFAULT_HBAR_TRUNC) -> ModePolynomial:
    """a_{i1} ⋆ a_{i2} ⋆ ... evaluated left to right."""
    if not indices:
        return ModePolynomial.scalar(1, trunc_order)
    gens = [generator(i, trunc_order) for i in indices]
    return reduce(lambda acc, g: star_product(acc, g, kernel), gens[1:], gens[0])


def build_B(n: int, K: int, trunc_order: int = DEFAULT_HBAR_TRUNC) -> ModePolynomial:
    """(1/2)·Σ a_k·a_{n-k} over |k| <= K and |n-k| <= K.

    Raises AlgebraError when the sum is empty, i.e. |n| > 2K. For K < |n| <= 2K
    only the boundary terms survive, e.g. build_B(2, 1) = (1/2)·a_1².
    """
    if K < 0 or abs(n) > 2 * K:
        logger.error(f"Empty truncation for B_{n} at K={K}")
        raise AlgebraError(f"build_B({n}, K={K}) has no terms: need |n| <= 2K")
    half = Fraction(1, 2)
    terms: Dict[ModeMonomial, Fraction] = defaultdict(Fraction)
    for k in range(max(-K, n - K), min(K, n + K) + 1):
        terms[ModeMonomial((k, n - k))] += half
    return ModePolynomial(terms, trunc_order)


class VirasoroSplit(NamedTuple):
    witt: ModePolynomial
    central: HbarSeries
    residual: ModePolynomial


def residual_in_window(residual: ModePolynomial, K: int, width: int) -> bool:
    """True when every residual monomial has an index with |index| > K - 2·width."""
    bound = K - 2 * width
    return all(any(abs(i) > bound for i in m) for m in residual.terms)


def virasoro_commutator(
    n: int,
    m: int,
    K: int,
    d0=0,
    trunc_order: int = DEFAULT_HBAR_TRUNC,
) -> VirasoroSplit:
    """[B_n, B_m] for the cylinder kernel split into ħ(n-m)·B_{n+m}, central and residual parts.

    A nonzero d0 replaces every B by alpha_shift_quadratic(B, d0) before
    commuting and splitting.
    """
    width = max(abs(n), abs(m))
    if K < 4 * width:
        logger.error(f"K={K} below boundary margin 4*{width}")
        raise AlgebraError(f"virasoro_commutator needs K >= 4*max(|n|,|m|) = {4 * width}, got {K}")
    if trunc_order < 2:
        raise TruncationError(f"Central term lives at ħ^2; truncation order {trunc_order} too small")

    kernel = cylinder_vacuum_kernel()
    b_n = build_B(n, K, trunc_order)
    b_m = build_B(m, K, trunc_order)
    target = build_B(n + m, K, trunc_order)
    if d0:
        b_n = alpha_shift_quadratic(b_n, d0)
        b_m = alpha_shift_quadratic(b_m, d0)
        target = alpha_shift_quadratic(target, d0)

    full = commutator(b_n, b_m, kernel)
    witt = target.scale(HbarSeries.hbar(1, n - m, trunc_order))
    central = full.constant_term() - witt.constant_term()
    residual = full - witt - ModePolynomial.scalar(central)
    logger.debug(f"[B_{n}, B_{m}] at K={K}: central={central}, residual terms={len(residual)}")
    return VirasoroSplit(witt, central, residual)


def witt_bracket_split(n: int, m: int, K: int, trunc_order: int = DEFAULT_HBAR_TRUNC) -> Tuple[ModePolynomial, ModePolynomial]:
    """{B_n, B_m} split into -i(n-m)·B_{n+m} and a boundary residual."""
    width = max(abs(n), abs(m))
    if K < 4 * width:
        raise AlgebraError(f"witt_bracket_split needs K >= {4 * width}, got {K}")
    bracket = chiral_bracket(build_B(n, K, trunc_order), build_B(m, K, trunc_order))
    witt = build_B(n + m, K, trunc_order).scale(GaussianRational(0, -(n - m)))
    return witt, bracket - witt


def _self_contractions(indices: Sequence[int], kernel: ContractionKernel) -> Dict[Tuple[int, ModeMonomial], GaussianRational]:
    """Partial matchings of positions within one monomial, including the empty matching."""
    out: Dict[Tuple[int, ModeMonomial], GaussianRational] = defaultdict(lambda: ZERO)
    size = len(indices)

    def walk(i: int, used: int, weight: GaussianRational, pairs: int, rest: Tuple[int, ...]):
        while i < size and used >> i & 1:
            i += 1
        if i == size:
            key = (pairs, ModeMonomial(rest))
            out[key] = out[key] + weight
            return
        walk(i + 1, used | (1 << i), weight, pairs, rest + (indices[i],))
        for j in range(i + 1, size):
            if used >> j & 1:
                continue
            w = kernel(indices[i], indices[j])
            if w.is_zero():
                continue
            walk(i + 1, used | (1 << i) | (1 << j), weight * w, pairs + 1, rest)

    walk(0, 0, ONE, 0, ())
    return out


def alpha_map(p: ModePolynomial, d: ContractionKernel) -> ModePolynomial:
    """exp((ħ/2)·Σ d(i,l)·∂_i∂_l) for a symmetric pairing d.

    On a monomial this sums over sets of disjoint self-contractions, each
    pair contributing ħ·d. The inverse is alpha_map(·, d.negated()).
    """
    n = p.trunc_order
    acc: Dict[ModeMonomial, HbarSeries] = {}
    for m, c in p._terms.items():
        for (pairs, rest), weight in _self_contractions(m, d).items():
            if weight.is_zero():
                continue
            term = c.shift(pairs, strict=False).scale(weight)
            acc[rest] = acc[rest] + term if rest in acc else term
    return ModePolynomial._from_clean(acc, n)


def alpha_shift_quadratic(p: ModePolynomial, d0) -> ModePolynomial:
    """Re-ordering shift for a translation-invariant difference kernel with diagonal value d0.

    Adds ħ·2·d0·coef(a_0·a_0) to the constant term, so B_0 -> B_0 + ħ·d0
    and B_{n≠0} is unchanged.
    """
    if p.degree() > 2:
        logger.error(f"alpha_shift_quadratic got degree {p.degree()}")
        raise AlgebraError(f"alpha_shift_quadratic only handles degree <= 2, got {p.degree()}")
    if not p.is_homogeneous():
        logger.error("alpha_shift_quadratic got a polynomial mixing degrees")
        raise AlgebraError("alpha_shift_quadratic needs a homogeneous polynomial")
    if GaussianRational.coerce(d0).is_zero():
        return p
    return alpha_map(p, zero_mode_kernel(d0))


def mode_values(psi, indices: Iterable[int]) -> Dict[int, complex]:
    """a_n -> 2·√π·ψ̂_{-n} for any configuration exposing coefficient(k)."""
    scale = 2.0 * sqrt(pi)
    return {i: scale * complex(psi.coefficient(-i)) for i in indices}


def evaluate_many(p: ModePolynomial, psis: Sequence, hbar_value: float) -> np.ndarray:
    """Evaluate p on several configurations at once, one column per configuration."""
    total = np.zeros(len(psis), dtype=complex)
    if not psis or p.is_zero():
        return total
    idx = sorted(p.indices())
    row = {i: r for r, i in enumerate(idx)}
    values = np.empty((len(idx), len(psis)), dtype=complex)
    for col, psi in enumerate(psis):
        for i, value in mode_values(psi, idx).items():
            values[row[i], col] = value
    by_degree: Dict[int, List[Tuple[ModeMonomial, HbarSeries]]] = defaultdict(list)
    for m, c in p.items():
        by_degree[len(m)].append((m, c))
    # monomials of equal degree share one fancy-indexed product
    for degree, group in by_degree.items():
        coeffs = np.array([c.evaluate(hbar_value) for _, c in group], dtype=complex)
        if degree == 0:
            total += coeffs.sum()
            continue
        rows = np.array([[row[i] for i in m] for m, _ in group], dtype=int)
        products = np.prod(values[rows], axis=1)
        total += coeffs @ products
    return total


def evaluate(p: ModePolynomial, psi, hbar_value: float) -> complex:
    """Substitute a_n -> A_n[ψ] and ħ -> hbar_value."""
    return complex(evaluate_many(p, [psi], hbar_value)[0])
