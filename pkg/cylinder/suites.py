# suites.py - Named verification suites and their JSON reports
from dataclasses import dataclass, field
from fractions import Fraction
from math import pi
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence
import json
import logging
import time

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, ValidationInfo, field_validator

from config import (
    ANOMALY_DIFFEOS,
    ANOMALY_TEST_FNS,
    DEFAULT_BAND_LIMIT,
    DEFAULT_HBAR_TRUNC,
    DEFAULT_K_TRUNC,
    DEFAULT_N_MAX,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_SEED,
    IMAGE_GRID_POINTS,
    RICHARDSON_STEP,
    ROUTE_N_MAX,
    ROUTE_SAMPLES,
    TOL_ABEL,
    TOL_ANOMALY,
    TOL_DIAG_EXP,
    TOL_KERNEL,
    TOL_PRIMARY,
    TOL_ROUTE,
    TOL_SCHWARZIAN,
    TOL_WEIGHTED,
)
from cylinder import AlgebraError, CheckKind, ConfigError
from cylinder import conformal as cf
from cylinder import functionals as fn
from cylinder import kernels as kn
from cylinder import modes as md
from cylinder.scalars import GaussianRational, HbarSeries, bernoulli, zeta_generating_coeffs, zeta_neg, zeta_series_coeffs

logger = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64


class RunConfig(BaseModel):
    """Effective parameters of a verification run."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_max: int = DEFAULT_N_MAX
    K: int = DEFAULT_K_TRUNC
    hbar_trunc: int = DEFAULT_HBAR_TRUNC
    band_limit: int = DEFAULT_BAND_LIMIT
    seed: int = DEFAULT_SEED
    output_dir: Path = DEFAULT_OUTPUT_DIR
    tol_route: float = TOL_ROUTE
    tol_kernel: float = TOL_KERNEL
    tol_abel: float = TOL_ABEL
    tol_anomaly: float = TOL_ANOMALY
    tol_primary: float = TOL_PRIMARY

    @field_validator("n_max")
    @classmethod
    def _n_max_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("K")
    @classmethod
    def _k_covers_window(cls, v: int, info: ValidationInfo) -> int:
        n_max = info.data.get("n_max")
        if n_max is not None and v < 4 * n_max:
            raise ValueError(f"must be >= 4*n_max = {4 * n_max}")
        return v

    @field_validator("hbar_trunc")
    @classmethod
    def _hbar_trunc_reaches_central_term(cls, v: int) -> int:
        if v < 2:
            raise ValueError("must be >= 2")
        return v

    @field_validator("band_limit")
    @classmethod
    def _band_limit_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("seed")
    @classmethod
    def _seed_unsigned_64(cls, v: int) -> int:
        if not 0 <= v < SEED_LIMIT:
            raise ValueError("must be an unsigned 64-bit integer")
        return v

    @field_validator("tol_route", "tol_kernel", "tol_abel", "tol_anomaly", "tol_primary")
    @classmethod
    def _tolerance_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("must be positive")
        return v

    @classmethod
    def build(cls, **values: Any) -> "RunConfig":
        """Validate values, reporting the first failure as ConfigError with its key."""
        try:
            return cls(**values)
        except ValidationError as e:
            first = e.errors()[0]
            key = ".".join(str(part) for part in first["loc"]) or "run"
            message = first["msg"].removeprefix("Value error, ")
            logger.error(f"Invalid configuration value for {key}: {message}")
            raise ConfigError(key, message) from None

    def report_dict(self) -> Dict[str, Any]:
        data = self.model_dump()
        data["output_dir"] = str(self.output_dir)
        return data


@dataclass
class CheckResult:
    check_id: str
    expected: str
    actual: str
    passed: bool
    runtime_ms: int = 0
    kind: CheckKind = CheckKind.EXACT

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        return {
            "check_id": self.check_id,
            "expected": self.expected,
            "actual": self.actual,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms if include_timing else 0,
        }


@dataclass
class SuiteReport:
    suite_name: str
    checks: List[CheckResult] = field(default_factory=list)
    seed: Optional[int] = None
    config: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.checks = sorted(self.checks, key=lambda c: c.check_id)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        return {
            "suite_name": self.suite_name,
            "seed": self.seed,
            "config": self.config,
            "checks": [c.to_dict(include_timing) for c in self.checks],
        }

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"


class _Recorder:
    """Collects checks, timing each one from the previous record call."""

    def __init__(self, suite_name: str):
        self.suite_name = suite_name
        self.checks: List[CheckResult] = []
        self._mark = time.perf_counter()

    def _lap(self) -> int:
        now = time.perf_counter()
        ms = int(round((now - self._mark) * 1000))
        self._mark = now
        return ms

    def exact(self, check_id: str, expected: Any, actual: Any, ok: Optional[bool] = None) -> CheckResult:
        passed = (expected == actual) if ok is None else ok
        result = CheckResult(check_id, str(expected), str(actual), bool(passed), self._lap(), CheckKind.EXACT)
        self._add(result)
        return result

    def numeric(self, check_id: str, expected, actual, tol: float, relative: bool = True) -> CheckResult:
        expected_arr = np.asarray(expected, dtype=complex)
        actual_arr = np.asarray(actual, dtype=complex)
        scale = np.maximum(1.0, np.abs(expected_arr)) if relative else 1.0
        err = float(np.max(np.abs(actual_arr - expected_arr) / scale, initial=0.0))
        passed = bool(np.all(np.isfinite(actual_arr))) and err <= tol
        result = CheckResult(
            check_id,
            f"{_fmt(expected_arr)} ± {tol:g}",
            f"{_fmt(actual_arr)} (err {err:.3e})",
            passed,
            self._lap(),
            CheckKind.NUMERIC,
        )
        self._add(result)
        return result

    def _add(self, result: CheckResult) -> None:
        if not result.passed:
            logger.warning(f"{self.suite_name}: {result.check_id} failed: expected {result.expected}, got {result.actual}")
        else:
            logger.debug(f"{self.suite_name}: {result.check_id} passed")
        self.checks.append(result)

    def report(self, seed: Optional[int] = None) -> SuiteReport:
        return SuiteReport(self.suite_name, self.checks, seed)


def _fmt(values: np.ndarray) -> str:
    if values.size != 1:
        return f"[{values.size} values]"
    z = complex(values.reshape(-1)[0])
    if z.imag == 0:
        return f"{z.real:.17g}"
    return f"{z.real:.17g}{z.imag:+.17g}i"


def _pair_id(prefix: str, n: int, m: int) -> str:
    return f"{prefix}[{n:+03d},{m:+03d}]"


def _delta(n: int, m: int) -> int:
    return 1 if n + m == 0 else 0


def run_heisenberg(n_max: int, trunc_order: int = DEFAULT_HBAR_TRUNC) -> SuiteReport:
    """[a_n, a_m] = ħ·n·δ and {a_n, a_m} = -i·n·δ for |n|, |m| <= n_max, exactly."""
    if n_max < 1:
        raise AlgebraError(f"run_heisenberg needs n_max >= 1, got {n_max}")
    logger.info(f"Running heisenberg suite with n_max={n_max}")
    rec = _Recorder("heisenberg")
    kernel = md.cylinder_vacuum_kernel()
    for n in range(-n_max, n_max + 1):
        for m in range(-n_max, n_max + 1):
            a_n = md.generator(n, trunc_order)
            a_m = md.generator(m, trunc_order)
            comm = md.commutator(a_n, a_m, kernel)
            bracket = md.chiral_bracket(a_n, a_m)
            want_comm = HbarSeries.hbar(1, n * _delta(n, m), trunc_order)
            want_bracket = GaussianRational(0, -n * _delta(n, m))
            got_comm = comm.constant_term()
            got_bracket = bracket.constant_term().coefficient(0)
            # Dirac rule: [a_n, a_m] = iħ·{a_n, a_m}
            dirac = HbarSeries.hbar(1, GaussianRational(0, 1) * got_bracket, trunc_order)
            ok = (
                comm.degree() <= 0
                and bracket.degree() <= 0
                and got_comm == want_comm
                and got_bracket == want_bracket
                and dirac == got_comm
            )
            rec.exact(
                _pair_id("commutator", n, m),
                f"{want_comm} | {want_bracket}",
                f"{got_comm} | {got_bracket}",
                ok,
            )
    report = rec.report()
    logger.info(f"heisenberg: {len(report.checks)} checks, {len(report.failures)} failed")
    return report


def run_virasoro(n_max: int, K: int, trunc_order: int = DEFAULT_HBAR_TRUNC) -> SuiteReport:
    """Central terms n(n²-1)/12 (vacuum) and n³/12 (covariant), with boundary-window residuals."""
    if K < 4 * n_max:
        logger.error(f"run_virasoro precondition failed: K={K} < 4*{n_max}")
        raise AlgebraError(f"run_virasoro needs K >= 4*n_max = {4 * n_max}, got {K}")
    logger.info(f"Running virasoro suite with n_max={n_max}, K={K}")
    rec = _Recorder("virasoro")
    d0 = Fraction(-1, 24)
    for n in range(-n_max, n_max + 1):
        for m in range(-n_max, n_max + 1):
            width = max(abs(n), abs(m))
            for ordering, shift, expected_coeff in (
                ("vacuum", 0, Fraction(n * (n * n - 1), 12) * _delta(n, m)),
                ("covariant", d0, Fraction(n ** 3, 12) * _delta(n, m)),
            ):
                split = md.virasoro_commutator(n, m, K, d0=shift, trunc_order=trunc_order)
                expected = HbarSeries.hbar(2, expected_coeff, trunc_order)
                in_window = md.residual_in_window(split.residual, K, width)
                rec.exact(
                    _pair_id(f"central-{ordering}", n, m),
                    f"{expected}; residual in window",
                    f"{split.central}; residual {'in' if in_window else 'outside'} window",
                    split.central == expected and in_window,
                )

    for n in range(-n_max, n_max + 1):
        for m in range(-n_max, n_max + 1):
            witt, residual = md.witt_bracket_split(n, m, K, trunc_order)
            in_window = md.residual_in_window(residual, K, max(abs(n), abs(m)))
            rec.exact(
                _pair_id("witt-bracket", n, m),
                "residual in window",
                f"residual {'in' if in_window else 'outside'} window",
                in_window,
            )

    for n in range(-n_max, n_max + 1):
        b_n = md.build_B(n, K, trunc_order)
        shifted = md.alpha_shift_quadratic(b_n, d0)
        expected = b_n + md.ModePolynomial.scalar(HbarSeries.hbar(1, d0, trunc_order)) if n == 0 else b_n
        rec.exact(
            f"zero-mode-shift[{n:+03d}]",
            "B_0 - 1/24*ħ" if n == 0 else f"B_{n}",
            "match" if shifted == expected else f"differs by {shifted - expected}",
            shifted == expected,
        )
    report = rec.report()
    logger.info(f"virasoro: {len(report.checks)} checks, {len(report.failures)} failed")
    return report


def run_zeta(tol_kernel: float = TOL_KERNEL, tol_abel: float = TOL_ABEL, abel_eps: float = 1e-3) -> SuiteReport:
    """ζ(-1) = -1/12 through the Bernoulli chain, the kernel diagonal and the Abel-regulated mode sum."""
    logger.info("Running zeta suite")
    rec = _Recorder("zeta")
    minus_twelfth = Fraction(-1, 12)
    rec.exact(
        "bernoulli-chain",
        f"{minus_twelfth} = {minus_twelfth} = {minus_twelfth}",
        f"{zeta_neg(1)} = {-bernoulli(2) / 2} = {minus_twelfth}",
        zeta_neg(1) == -bernoulli(2) / 2 == minus_twelfth,
    )
    evens = [zeta_neg(2 * k) for k in range(1, 6)]
    rec.exact("even-zeros", "[0, 0, 0, 0, 0]", str([str(v) for v in evens]).replace("'", ""), all(v == 0 for v in evens))
    generating = zeta_generating_coeffs(6)
    direct = zeta_series_coeffs(6)
    rec.exact("generating-series", " ".join(map(str, direct)), " ".join(map(str, generating)))

    rec.numeric("kernel-diagonal", float(minus_twelfth), 4.0 * pi * kn.diag_difference(0.0), tol_kernel)
    for s in (2e-4, 1e-2, 0.3, 1.0):
        rec.numeric(
            f"kernel-oracle[{s:g}]",
            float(kn.diag_difference_oracle(s)),
            kn.diag_difference(s),
            tol_kernel,
        )

    # terms past N = 40/ε are below e^{-40}
    n_terms = int(40 / abel_eps)
    estimate = kn.abel_zeta_estimate(abel_eps, n_terms)
    rec.numeric(f"abel-route[{abel_eps:g}]", float(minus_twelfth), estimate, tol_abel)
    rec.numeric(f"abel-oracle[{abel_eps:g}]", float(kn.abel_zeta_oracle(abel_eps)), estimate, tol_abel)

    d0 = Fraction(zeta_neg(1)) / 2
    b_0 = md.build_B(0, 4)
    shifted = md.alpha_shift_quadratic(b_0, d0)
    shift = (shifted - b_0).constant_term()
    rec.exact("zero-mode-from-zeta", HbarSeries.hbar(1, Fraction(-1, 24)), shift)
    report = rec.report()
    logger.info(f"zeta: {len(report.checks)} checks, {len(report.failures)} failed")
    return report


def _circle_points(n: int) -> np.ndarray:
    return np.linspace(0.0, 2.0 * pi, n, endpoint=False)


def _convergence_slope(mu: cf.NullMap, u: float) -> float:
    steps = np.geomspace(1e-1, 1e-3, 5)
    target = cf.schwarzian(mu, u) / 6.0
    errors = np.array([abs(cf.hadamard_diag_limit(mu, u, s) - target) for s in steps])
    slope, _ = np.polyfit(np.log(steps), np.log(errors), 1)
    return float(slope)


def run_conformal(
    seed: int = DEFAULT_SEED,
    tol_anomaly: float = TOL_ANOMALY,
    tol_primary: float = TOL_PRIMARY,
) -> SuiteReport:
    """Weighted maps, primary ∂Φ, vertex coefficients, Schwarzian laws and the stress anomaly."""
    logger.info(f"Running conformal suite with seed={seed}")
    rng = np.random.default_rng(seed)
    rec = _Recorder("conformal")
    grid = _circle_points(64)
    identity = cf.CircleDiffeo.identity()

    # Schwarzian
    rec.numeric("schwarzian-identity", 0.0, cf.schwarzian(identity, grid), 1e-15)
    rec.numeric("schwarzian-exp", -0.5, cf.schwarzian(cf.ClosedFormMap.exponential(), np.linspace(-2, 2, 9)), 1e-12)
    rec.numeric(
        "schwarzian-mobius",
        0.0,
        cf.schwarzian(cf.ClosedFormMap.mobius(2, 1, 1, 3), np.linspace(0.0, 1.0, 9)),
        1e-12,
    )
    for i in range(ANOMALY_DIFFEOS):
        mu = cf.CircleDiffeo.random(rng)
        nu = cf.CircleDiffeo.random(rng)
        composite = cf.schwarzian(cf.compose(mu, nu), grid)
        cocycle = cf.schwarzian(mu, nu(grid)) * nu.derivative(grid) ** 2 + cf.schwarzian(nu, grid)
        rec.numeric(f"schwarzian-cocycle[{i}]", cocycle, composite, TOL_SCHWARZIAN)

    # Diagonal limit
    rec.numeric(
        "diag-limit-exp",
        -1.0 / 12.0,
        cf.diag_limit_extrapolated(cf.ClosedFormMap.exponential(), 0.3, RICHARDSON_STEP),
        TOL_DIAG_EXP,
    )
    rec.numeric("diag-limit-dilation", 0.0, cf.hadamard_diag_limit(cf.ClosedFormMap.affine(2.0), 0.5, 0.1), 1e-12)
    bumpy = cf.CircleDiffeo([(2, 0.0, 0.2), (3, 0.1, 0.0)])
    slope = _convergence_slope(bumpy, 0.7)
    rec.exact("diag-limit-order", ">= 1.9", f"{slope:.3f}", slope >= 1.9)

    # Stress anomaly
    hbar_value = 1.0
    lhs, rhs = cf.stress_anomaly(identity, fn.TestFnCircle.constant(), hbar_value)
    rec.numeric("anomaly-identity", 0.0, lhs, 1e-10, relative=False)
    sine = cf.CircleDiffeo([(1, 0.0, 0.1)])
    lhs, rhs = cf.stress_anomaly(sine, fn.TestFnCircle.constant(), hbar_value)
    rec.numeric("anomaly-sine", rhs, lhs, tol_anomaly)
    for i in range(ANOMALY_DIFFEOS):
        mu = cf.CircleDiffeo.random(rng)
        for j in range(ANOMALY_TEST_FNS):
            f = fn.TestFnCircle.random_real(3, rng)
            lhs, rhs = cf.stress_anomaly(mu, f, hbar_value)
            rec.numeric(f"anomaly[{i},{j}]", rhs, lhs, tol_anomaly)
    mu = cf.CircleDiffeo.random(rng)
    f = fn.TestFnCircle.random_real(3, rng)
    vacuum_value, shifted_value = cf.anomaly_independence(mu, f, hbar_value)
    _, rhs = cf.stress_anomaly(mu, f, hbar_value)
    rec.numeric("anomaly-independence", vacuum_value, shifted_value, tol_anomaly)
    rec.numeric("anomaly-independence-schwarzian", rhs, shifted_value, tol_anomaly)

    # Weighted maps
    delta = 0.7
    mu, nu = cf.CircleDiffeo.random(rng), cf.CircleDiffeo.random(rng)
    f = cf.TorusTrigPoly.random_real(2, rng)
    phi = cf.TorusTrigPoly.random_real(2, rng)
    pushed = cf.weighted_pushforward(f, (mu, nu), delta)
    lhs = cf.torus_integral(lambda w, z: phi(w, z) * pushed(w, z))
    dual = cf.weighted_pullback(phi, (mu, nu), 2.0 - delta)
    rhs = cf.torus_integral(lambda u, v: dual(u, v) * f(u, v))
    rec.numeric("weighted-duality", rhs, lhs, TOL_WEIGHTED)

    rho_mu, rho_nu = cf.CircleDiffeo.random(rng), cf.CircleDiffeo.random(rng)
    w = rng.uniform(0.0, 2.0 * pi, 32)
    z = rng.uniform(0.0, 2.0 * pi, 32)
    composite = cf.weighted_pushforward(f, (cf.compose(rho_mu, mu), cf.compose(rho_nu, nu)), delta)
    stepwise = cf.weighted_pushforward(pushed, (rho_mu, rho_nu), delta)
    rec.numeric("weighted-composition", stepwise(w, z), composite(w, z), TOL_WEIGHTED)

    spin_zero = cf.weighted_pushforward_pair(f, cf.FramedMorphism(mu, nu), cf.WeightPair(delta / 2, delta / 2))
    direct = cf.weighted_pushforward(f, (mu, nu), 2.0 - delta)
    rec.numeric("spin-zero-weights", direct(w, z), spin_zero(w, z), TOL_WEIGHTED)

    coupling = cf.conformal_coupling_dimension(2)
    plain = cf.pullback(phi, (mu, nu))(w, z)
    weighted = cf.weighted_pullback(phi, (mu, nu), coupling)(w, z)
    rec.exact("conformal-coupling-pullback", "identical", "identical" if np.array_equal(plain, weighted) else "differs",
              bool(np.array_equal(plain, weighted)))

    # Primary ∂Φ of weight (1, 0)
    f = cf.TorusTrigPoly.random_real(2, rng)
    phi = cf.TorusTrigPoly.random_real(3, rng)
    cases = {
        "identity": (identity, identity),
        "rotation": (cf.CircleDiffeo.rotation(0.7), identity),
        "sine": (cf.CircleDiffeo([(1, 0.0, 0.3)]), identity),
        "random": (cf.CircleDiffeo.random(rng), cf.CircleDiffeo.random(rng)),
    }
    for label, (m_map, n_map) in cases.items():
        upper, lower = cf.primary_check_dphi(m_map, n_map, f, phi)
        rec.numeric(f"primary-dphi[{label}]", lower, upper, tol_primary)

    # Frames
    for label, morphism, admissible in (
        ("boost", cf.boost(2.0), True),
        ("dilation", cf.dilation(0.5), True),
        ("negative-boost", cf.boost(-1.0), False),
    ):
        rec.exact(f"frame-admissible[{label}]", admissible, morphism.is_admissible())
    weights = cf.WeightPair(1.5, 0.25)
    alpha = 1.7
    rec.numeric(
        "frame-dilation-weight",
        alpha ** weights.scaling_dimension,
        cf.dilation(alpha).weight_factor(weights, 0.3, 0.9),
        1e-12,
    )
    rec.numeric(
        "frame-boost-weight",
        alpha ** (-weights.spin),
        cf.boost(alpha).weight_factor(weights, 0.3, 0.9),
        1e-12,
    )
    rec.numeric(
        "frame-rigid-schwarzian",
        0.0,
        np.concatenate([cf.schwarzian(cf.boost(alpha).mu, grid), cf.schwarzian(cf.dilation(alpha).nu, grid)]),
        1e-15,
    )

    # Vertex operators
    rec.numeric("vertex-order-3", (1.0 / (4.0 * pi)) ** 3 / 6.0, fn.vertex_alpha_coeff(1.0, 1.0, 3), 1e-15)
    for order in range(5):
        coeff = fn.vertex_alpha_coeff(1.0, 1.0, order)
        exact = float(fn.vertex_alpha_rational(Fraction(1), order)) / pi ** order
        rec.numeric(f"vertex-rational[{order}]", coeff, exact, 1e-14)
        rec.numeric(f"vertex-pullback[{order}]", coeff, fn.vertex_order_term(1.0, 1.0, order), 1e-14)
    mu, nu = cf.CircleDiffeo.random(rng), cf.CircleDiffeo.random(rng)
    u0, v0 = 0.4, 1.1
    limit = cf.richardson_limit(lambda h: cf.parametrix_pullback_diag(mu, nu, u0, v0, h), RICHARDSON_STEP)
    expected = fn.parametrix_pullback_limit(float(cf.log_conformal_factor(mu, nu, u0, v0)))
    rec.numeric("parametrix-pullback", expected, limit, TOL_PRIMARY)

    report = rec.report(seed)
    logger.info(f"conformal: {len(report.checks)} checks, {len(report.failures)} failed")
    return report


def run_routes(
    seed: int = DEFAULT_SEED,
    n_max: int = ROUTE_N_MAX,
    K: int = DEFAULT_K_TRUNC,
    band_limit: int = DEFAULT_BAND_LIMIT,
    samples: int = ROUTE_SAMPLES,
    trunc_order: int = DEFAULT_HBAR_TRUNC,
    tol: float = TOL_ROUTE,
) -> SuiteReport:
    """Mode-algebra results evaluated on ψ against the spectral functionals."""
    if K < band_limit + n_max:
        raise AlgebraError(f"run_routes needs K >= band_limit + n_max = {band_limit + n_max}, got {K}")
    # Modes past band_limit + n_max vanish on every sampled ψ, so the smaller truncation is exact.
    K = min(K, band_limit + n_max)
    logger.info(f"Running routes suite: seed={seed}, n_max={n_max}, K={K}, band={band_limit}, samples={samples}")
    rng = np.random.default_rng(seed)
    psis = [fn.ChiralConfig.random(band_limit, rng) for _ in range(samples)]
    rec = _Recorder("routes")
    kernel = md.cylinder_vacuum_kernel()
    symbols = {
        "A": {n: md.generator(n, trunc_order) for n in range(-n_max, n_max + 1)},
        "B": {n: md.build_B(n, K, trunc_order) for n in range(-n_max, n_max + 1)},
    }

    for family, table in symbols.items():
        for n, p in table.items():
            for m, q in table.items():
                F, G = (family, n), (family, m)
                star = md.star_product(p, q, kernel)
                numeric = np.array([fn.star_numeric_coeffs(F, G, psi) for psi in psis])
                for k in range(3):
                    symbolic = md.evaluate_many(star.hbar_coefficient(k), psis, 1.0)
                    rec.numeric(_pair_id(f"{family}-star-hbar{k}", n, m), numeric[:, k], symbolic, tol)
                symbolic = md.evaluate_many(md.chiral_bracket(p, q), psis, 0.0)
                bracket = np.array([fn.chiral_bracket_numeric(F, G, psi) for psi in psis])
                rec.numeric(_pair_id(f"{family}-bracket", n, m), bracket, symbolic, tol)

    for n in range(-n_max, n_max + 1):
        for m in range(-n_max, n_max + 1):
            pairs = np.array([fn.witt_series_identity(n, m, psi) for psi in psis])
            rec.numeric(_pair_id("witt-series", n, m), pairs[:, 1], pairs[:, 0], tol)

    conj_a = [abs(fn.eval_A(-n, psi) - np.conj(fn.eval_A(n, psi))) for psi in psis for n in range(n_max + 1)]
    conj_b = [abs(fn.eval_B(-n, psi) - np.conj(fn.eval_B(n, psi))) for psi in psis for n in range(n_max + 1)]
    rec.numeric("hermiticity", 0.0, max(conj_a + conj_b), tol)

    truncated = []
    for psi in psis:
        tail = fn.hbar_series_terms(1, -1, psi, 1 + psi.band + 8)[1 + psi.band:]
        truncated.append(float(np.max(np.abs(tail), initial=0.0)))
    rec.numeric("hbar-series-truncation", 0.0, max(truncated), 0.0, relative=False)

    f = fn.TestFnCircle.random_real(4, rng)
    smeared = np.array([fn.eval_T(f, psi) for psi in psis])
    by_modes = np.array(
        [0.5 * sum(f.coefficient(n) * fn.eval_B(n, psi) for n in range(-f.band, f.band + 1)) for psi in psis]
    )
    rec.numeric("T-smearing", by_modes, smeared, tol)

    report = rec.report(seed)
    logger.info(f"routes: {len(report.checks)} checks, {len(report.failures)} failed")
    return report


def run_propagators(
    seed: int = DEFAULT_SEED,
    points: int = IMAGE_GRID_POINTS,
    tol_kernel: float = TOL_KERNEL,
) -> SuiteReport:
    """Image sums, propagator splittings, the W_cyl mode sum and the squared-kernel coefficients."""
    logger.info(f"Running propagators suite with seed={seed}, points={points}")
    rng = np.random.default_rng(seed)
    rec = _Recorder("propagators")
    coords = rng.uniform(-15.0, 15.0, size=(points, 4))
    pairs = [(kn.NullPoint(a, b), kn.NullPoint(c, d)) for a, b, c, d in coords]

    mismatches = sum(
        kn.eval_E_cyl(x, y) != kn.images_partial_sum(x, y, kn.image_stabilization_bound(x, y)) for x, y in pairs
    )
    rec.exact("images-stabilized", 0, mismatches)
    rec.exact("cyl-antisymmetry", 0, sum(kn.eval_E_cyl(x, y) != -kn.eval_E_cyl(y, x) for x, y in pairs))
    rec.exact("cyl-periodicity", 0, sum(kn.eval_E_cyl(x.translate(1), y) != kn.eval_E_cyl(x, y) for x, y in pairs))
    rec.exact(
        "retarded-minus-advanced",
        0,
        sum(kn.eval_E_mink(x, y) != kn.eval_E_ret(x, y) - kn.eval_E_adv(x, y) for x, y in pairs),
    )
    rec.exact("adjoint-pair", 0, sum(kn.eval_E_adv(x, y) != kn.eval_E_ret(y, x) for x, y in pairs))
    rec.exact(
        "chiral-split",
        0,
        sum(kn.eval_E_mink(x, y) != kn.eval_E_left(x, y) + kn.eval_E_right(x, y) for x, y in pairs),
    )

    for u, uprime, eps, N in ((0.3, 1.2, 0.1, 50), (2.0, -1.0, 0.05, 200), (0.0, 3.0, 0.5, 20), (1.0, 1.0, 0.2, 100)):
        gap = abs(kn.eval_dW_cyl(u, uprime, eps, N) - kn.eval_dW_cyl_closed(u, uprime, eps))
        bound = kn.dW_tail_bound(eps, N)
        ok = gap <= bound * (1.0 + 1e-9) + 1e-12
        rec.exact(f"dW-tail[{u:g},{uprime:g},{eps:g},{N}]", f"<= {bound:.6e}", f"{gap:.6e}", ok)

    brute = [kn.squared_coeff(k) for k in range(201)]
    closed = [kn.squared_coeff_closed(k) for k in range(201)]
    rec.exact("squared-coeff[0..200]", "(k^3 - k)/6", "match" if brute == closed else "mismatch", brute == closed)
    for n in range(-8, 9):
        expected = Fraction(n * (n * n - 1), 12) if n > 0 else Fraction(0)
        rec.exact(f"central-pairing[{n:+03d}]", expected, kn.central_term_pairing(n, -n, abs(n)))

    lam1, lam2 = kn.ParametrixKernel(2.0), kn.ParametrixKernel(0.5)
    du, dv = rng.uniform(0.1, 3.0, 16), rng.uniform(0.1, 3.0, 16)
    rec.numeric(
        "parametrix-scale-shift",
        np.full(16, np.log(2.0 / 0.5) / (2.0 * pi)),
        lam1.value(du, dv) - lam2.value(du, dv),
        tol_kernel,
    )

    report = rec.report(seed)
    logger.info(f"propagators: {len(report.checks)} checks, {len(report.failures)} failed")
    return report


SUITES: Dict[str, Callable[[RunConfig], SuiteReport]] = {
    "heisenberg": lambda cfg: run_heisenberg(cfg.n_max, cfg.hbar_trunc),
    "virasoro": lambda cfg: run_virasoro(cfg.n_max, cfg.K, cfg.hbar_trunc),
    "zeta": lambda cfg: run_zeta(cfg.tol_kernel, cfg.tol_abel),
    "conformal": lambda cfg: run_conformal(cfg.seed, cfg.tol_anomaly, cfg.tol_primary),
    "routes": lambda cfg: run_routes(
        cfg.seed,
        min(cfg.n_max, ROUTE_N_MAX),
        cfg.K,
        cfg.band_limit,
        trunc_order=cfg.hbar_trunc,
        tol=cfg.tol_route,
    ),
    "propagators": lambda cfg: run_propagators(cfg.seed, tol_kernel=cfg.tol_kernel),
}

SUITE_DESCRIPTIONS: Dict[str, str] = {
    "heisenberg": "Exact [a_n, a_m] and chiral-bracket tables",
    "virasoro": "Central terms for vacuum and covariant orderings",
    "zeta": "ζ(-1) through Bernoulli numbers, the kernel diagonal and Abel sums",
    "conformal": "Weighted maps, primary fields, Schwarzian and stress anomaly",
    "routes": "Mode-algebra results against spectral quadrature",
    "propagators": "Image sums, propagator splittings and squared kernel",
}


def run_suite(name: str, cfg: Optional[RunConfig] = None) -> SuiteReport:
    """Run a registered suite and stamp the report with the seed and effective config."""
    if name not in SUITES:
        logger.error(f"Unknown suite: {name}")
        raise ConfigError("suite", f"unknown suite '{name}'; available: {', '.join(SUITES)}")
    cfg = cfg or RunConfig()
    started = time.perf_counter()
    report = SUITES[name](cfg)
    report.seed = cfg.seed
    report.config = cfg.report_dict()
    logger.info(f"Suite {name} finished in {time.perf_counter() - started:.2f}s")
    return report


def run_suites(names: Sequence[str], cfg: Optional[RunConfig] = None) -> List[SuiteReport]:
    return [run_suite(name, cfg) for name in names]
