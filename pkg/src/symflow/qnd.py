"""Decoherence exponent of the QND exchange-coupled Ohmic bath.

Everything is dimensionless: ``theta = omega_c t``, ``b = beta hbar omega_c``
and ``g = eta / hbar^2``.  The exponent is

    I(theta) = g int_0^inf e^{-x} (1 - cos x theta) coth(b x / 2) / x dx,

and an off-diagonal (mixed exchange parity) element of the reduced density
operator is multiplied by exp(-4 I).  For theta >> theta / b >> 1 the growth
becomes linear, giving the semigroup decoherence time tau = 2 pi g theta / b.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc

from .quadrature import integrate

CUTOFFS = ("exponential", "step")
X_SMALL = 1e-3
SERIES_TERMS = 4
J_MIN = 1000
J_CAP = 10_000_000
REGIME_FACTOR = 10.0


class RegimeWarning(UserWarning):
    """Parameters sit outside the regime where an approximation is claimed."""


@dataclass(frozen=True)
class SpectralModel:
    g: float
    b: float
    cutoff_kind: str = "exponential"

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"coupling g must be > 0, got {self.g}")
        if not self.b > 0:
            raise ValueError(f"inverse temperature b must be > 0, got {self.b}")
        if self.cutoff_kind not in CUTOFFS:
            raise ValueError(f"cutoff_kind must be one of {CUTOFFS}")


# -- quadrature ------------------------------------------------------------------

def _series_coefficients(theta: float, b: float, n_terms: int = SERIES_TERMS) -> np.ndarray:
    """Coefficients c_k of (1 - cos x theta) coth(b x / 2) / x = sum_k c_k x^{2k}."""
    # coth z = sum_m c_m z^{2m-1}: 1/z + z/3 - z^3/45 + 2 z^5/945 - z^7/4725
    coth = [1.0, 1.0 / 3.0, -1.0 / 45.0, 2.0 / 945.0, -1.0 / 4725.0]
    out = np.zeros(n_terms)
    for k in range(n_terms):
        acc = 0.0
        for n in range(1, k + 2):
            m = k + 1 - n
            one_minus_cos = (-1) ** (n + 1) * theta ** (2 * n) / math.factorial(2 * n)
            acc += one_minus_cos * coth[m] * (b / 2.0) ** (2 * m - 1)
        out[k] = acc
    return out


def _x_small(theta: float, b: float) -> float:
    # keeps (theta x) and (b x) well inside the series' convergence radius
    return min(X_SMALL, 0.05 / max(theta, b, 1.0))


def _integrand(theta, b, exponential):
    def f(x):
        val = 2.0 * np.sin(0.5 * x * theta) ** 2 / (x * np.tanh(0.5 * b * x))
        return val * np.exp(-x) if exponential else val
    return f


def _oscillation_breakpoints(theta, lo, hi, max_points=4000):
    if theta <= 0:
        return None
    n = min(max_points, int(theta * (hi - lo) / (2 * np.pi)))
    return list(np.linspace(lo, hi, n + 2)[1:-1]) if n > 0 else None


def _head(theta, b, xs, exponential):
    coeffs = _series_coefficients(theta, b)
    powers = 2 * np.arange(SERIES_TERMS) + 1
    if exponential:
        moments = gamma_fn(powers) * gammainc(powers, xs)
    else:
        moments = xs ** powers / powers
    return float(np.dot(coeffs, moments))


def decoherence_exponent_quadrature(model: SpectralModel, theta: float,
                                    epsabs: float = 1e-10) -> float:
    """I(theta) by series near x = 0 plus adaptive Gauss-Kronrod beyond."""
    if theta < 0:
        raise ValueError("theta must be >= 0")
    if model.cutoff_kind != "exponential":
        raise ValueError("use step_cutoff_exploration for the step cutoff")
    if theta == 0:
        return 0.0
    b = model.b
    xs = _x_small(theta, b)
    # e^{-X} * 2 coth(b/2) bounds the neglected tail
    x_max = max(1.0, math.log(2.0 / math.tanh(0.5 * b) / 1e-12))
    body, _ = integrate(_integrand(theta, b, True), xs, x_max,
                        epsabs=epsabs / model.g, epsrel=1e-12,
                        breakpoints=_oscillation_breakpoints(theta, xs, x_max),
                        limit=50_000)
    return model.g * (_head(theta, b, xs, True) + body)


def step_cutoff_exploration(model: SpectralModel, theta: float,
                            epsabs: float = 1e-10) -> float:
    """Exponent with the density of states cut sharply at omega_c (x <= 1).

    Purely numerical.  Warns when b is not small, the regime in which linear
    growth in theta is expected.
    """
    if theta < 0:
        raise ValueError("theta must be >= 0")
    if model.cutoff_kind != "step":
        raise ValueError("step_cutoff_exploration needs cutoff_kind='step'")
    if model.b * REGIME_FACTOR > 1.0:
        warnings.warn(f"b = {model.b} is not << 1; no linear-growth claim applies",
                      RegimeWarning, stacklevel=2)
    if theta == 0:
        return 0.0
    b = model.b
    xs = _x_small(theta, b)
    body, _ = integrate(_integrand(theta, b, False), xs, 1.0,
                        epsabs=epsabs / model.g, epsrel=1e-12,
                        breakpoints=_oscillation_breakpoints(theta, xs, 1.0),
                        limit=50_000)
    return model.g * (_head(theta, b, xs, False) + body)


# -- closed forms ----------------------------------------------------------------

def _log_factor_tail(theta, b, j):
    """Euler-Maclaurin estimate of sum_{k > j} ln(1 + theta^2 / (k b + 1)^2)."""
    y = b * j + 1.0
    integral = (2.0 * theta * math.atan(theta / y) - y * math.log1p((theta / y) ** 2)) / b
    f = math.log1p((theta / y) ** 2)
    fprime = -2.0 * b * theta ** 2 / (y * (y * y + theta * theta))
    return integral - 0.5 * f - fprime / 12.0


def product_terms(model: SpectralModel, theta: float) -> int:
    return int(min(J_CAP, max(J_MIN, math.ceil(100.0 * theta / model.b))))


def decoherence_exponent_closed(model: SpectralModel, theta: float) -> float:
    """(g/2) ln(1 + theta^2) + g sum_j ln(1 + theta^2 / (j b + 1)^2).

    The product is summed to J = max(1000, 100 theta / b) factors and the
    remainder added by Euler-Maclaurin.
    """
    if theta < 0:
        raise ValueError("theta must be >= 0")
    if theta == 0:
        return 0.0
    j_max = product_terms(model, theta)
    j = np.arange(1, j_max + 1, dtype=float)
    terms = np.log1p((theta / (j * model.b + 1.0)) ** 2)
    log_prod = math.fsum(terms[::-1]) + _log_factor_tail(theta, model.b, j_max)
    return model.g * (0.5 * math.log1p(theta ** 2) + log_prod)


def _log_sinhc(z: float) -> float:
    """ln(sinh(z) / z) without overflow."""
    if z < 1e-4:
        return z * z / 6.0
    if z < 20.0:
        return math.log(math.sinh(z) / z)
    return z + math.log1p(-math.exp(-2.0 * z)) - math.log(2.0) - math.log(z)


def decoherence_exponent_high_temperature(model: SpectralModel, theta: float) -> float:
    """(g/2) ln(theta^2 + 1) + g ln(sinh(pi theta / b) / (pi theta / b)), valid for b >> 1."""
    return model.g * (0.5 * math.log1p(theta ** 2) + _log_sinhc(math.pi * theta / model.b))


def weierstrass_product(x: float, n_terms: int = 100_000) -> float:
    """prod_{j <= n} [1 + x^2 / (pi j)^2], which tends to sinh(x) / x."""
    j = np.arange(1, n_terms + 1, dtype=float)
    return float(np.exp(math.fsum(np.log1p((x / (np.pi * j)) ** 2))))


def weierstrass_product_tail_corrected(x: float, n_terms: int = 100_000) -> float:
    """Truncated product times its Euler-Maclaurin remainder factor."""
    j = np.arange(1, n_terms + 1, dtype=float)
    head = math.fsum(np.log1p((x / (np.pi * j)) ** 2))
    y = np.pi * n_terms
    integral = (2.0 * x * math.atan(x / y) - y * math.log1p((x / y) ** 2)) / np.pi
    f = math.log1p((x / y) ** 2)
    fprime = -2.0 * np.pi * x * x / (y * (y * y + x * x))
    return float(np.exp(head + integral - 0.5 * f - fprime / 12.0))


def decoherence_factor(model: SpectralModel, theta: float, parity_bra: int, parity_ket: int) -> float:
    """exp{2 [parity_bra * parity_ket - 1] I(theta)}: 1 on diagonal blocks, e^{-4I} off them."""
    deficit = 2 * (1 - parity_bra * parity_ket)
    if deficit == 0:
        return 1.0
    return math.exp(-deficit * decoherence_exponent_closed(model, theta))


# -- semigroup regime ------------------------------------------------------------

@dataclass(frozen=True)
class SemigroupRegime:
    theta: float
    tau: float
    exponent_rate: float
    log_prefactor_offdiagonal: float
    small_parameter: float
    regime_ok: bool
    warnings: tuple = field(default_factory=tuple)

    def exponent(self, parity_bra: int, parity_ket: int) -> float:
        """-(1 - parity_bra parity_ket) tau: 0 on diagonal blocks, -2 tau off them."""
        return -(1 - parity_bra * parity_ket) * self.tau

    def prefactor(self, parity_bra: int, parity_ket: int) -> float:
        """(2 pi / b)^{2 g [1 - parity product]}."""
        return math.exp(0.5 * (1 - parity_bra * parity_ket) * self.log_prefactor_offdiagonal)


def semigroup_regime_problems(model: SpectralModel, theta: float) -> list[str]:
    problems = []
    if model.b < REGIME_FACTOR:
        problems.append(f"b = {model.b:g} is not >> 1")
    if theta < REGIME_FACTOR * model.b:
        problems.append(f"theta / b = {theta / model.b:g} is not >> 1 "
                        "(the linear form is non-uniform as t -> 0)")
    small = 4.0 * model.g * math.log(model.b / (2 * math.pi))
    if abs(small) > 1.0 / REGIME_FACTOR:
        problems.append(f"4 g ln(b / 2 pi) = {small:.3g} is not << 1")
    return problems


def decoherence_exponent_semigroup(model: SpectralModel, theta: float, warn: bool = True) -> SemigroupRegime:
    """Linear-in-time exponent tau = 2 pi g theta / b and its regime diagnostics."""
    tau = 2.0 * math.pi * model.g * theta / model.b
    problems = semigroup_regime_problems(model, theta)
    if warn:
        for msg in problems:
            warnings.warn(msg, RegimeWarning, stacklevel=2)
    return SemigroupRegime(
        theta=theta,
        tau=tau,
        exponent_rate=math.pi * model.g / model.b,
        log_prefactor_offdiagonal=4.0 * model.g * math.log(2 * math.pi / model.b),
        small_parameter=4.0 * model.g * math.log(model.b / (2 * math.pi)),
        regime_ok=not problems,
        warnings=tuple(problems),
    )


# -- derivative cross-check ------------------------------------------------------

@dataclass(frozen=True)
class SeriesCheck:
    lhs: float
    rhs: float
    tail_bound: float
    fd_error: float

    @property
    def tolerance(self) -> float:
        return self.tail_bound + self.fd_error


def derivative_series(model: SpectralModel, theta: float, n_terms: int) -> tuple[float, float]:
    """Truncated dI/dtheta series and a bound on the omitted terms."""
    n = np.arange(1, n_terms + 1, dtype=float)
    g, b = model.g, model.b
    s = math.fsum((1.0 / (theta ** 2 + (1.0 + n * b) ** 2))[::-1])
    rhs = 2.0 * g * theta * s + g * theta / (theta ** 2 + 1.0)
    tail = 2.0 * g / b * math.atan(theta / (1.0 + n_terms * b))
    return rhs, tail


def derivative_series_check(model: SpectralModel, theta: float, n_terms: int = 10_000,
                            step: float | None = None) -> SeriesCheck:
    """Central difference of the quadrature against the geometric-series derivative."""
    if theta <= 0:
        raise ValueError("theta must be > 0")
    h = step if step is not None else 1e-3 * max(1.0, theta)
    h = min(h, 0.5 * theta)

    def central(hh):
        hi = decoherence_exponent_quadrature(model, theta + hh, epsabs=1e-12)
        lo = decoherence_exponent_quadrature(model, theta - hh, epsabs=1e-12)
        return (hi - lo) / (2 * hh)

    d1 = central(h)
    d2 = central(2 * h)
    # Richardson estimate of the O(h^2) error plus quadrature noise
    fd_error = abs(d2 - d1) / 3.0 + 2e-12 * model.g / h
    rhs, tail = derivative_series(model, theta, n_terms)
    return SeriesCheck(d1, rhs, tail, fd_error)


def curve_rows(model: SpectralModel, thetas) -> list[list[float]]:
    """CSV rows: theta, I_quadrature, I_closed, I_highT_approx, tau_semigroup, regime_ok."""
    rows = []
    for th in thetas:
        th = float(th)
        if model.cutoff_kind == "exponential":
            iq = decoherence_exponent_quadrature(model, th)
            ic = decoherence_exponent_closed(model, th)
            ih = decoherence_exponent_high_temperature(model, th)
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RegimeWarning)
                iq = step_cutoff_exploration(model, th)
            ic = ih = float("nan")
        reg = decoherence_exponent_semigroup(model, th, warn=False)
        rows.append([th, iq, ic, ih, reg.tau, int(reg.regime_ok)])
    return rows


CURVE_HEADER = ["theta", "I_quadrature", "I_closed", "I_highT_approx", "tau_semigroup", "regime_ok"]
