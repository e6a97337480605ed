"""Stationary isotropic DPP kernel families in the Shannon regime.

A `KernelSpec` pins one family instance at one dimension n with intensity
e^{n rho}.  The module knows, per family: the existence bound on the scale
parameter, radial kernel values (signed log), the radial Fourier transform
where available, the reduced-Palm kernel, and the closed-form squared
L2 norm that drives every repulsion quantity.

Fourier convention: ordinary frequency, unitary, i.e.
K_hat(xi) = int K(x) exp(-2 pi i x.xi) dx.  All family formulas are
normalized in this convention and the Parseval test in the suite asserts it.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
import numpy as np

from .special import (
    LogValue,
    laguerre,
    ln_ball_volume,
    ln_bessel_j_ratio,
    ln_binom,
    ln_gamma,
    log_sum_signed,
)

__all__ = [
    "Family",
    "KernelSpec",
    "InvalidSpecError",
    "UnsupportedFamilyError",
    "ValidationReport",
    "intensity_log",
    "max_param",
    "validate",
    "effective_alpha",
    "indicator_radius",
    "kernel_radial",
    "log_kernel_radial_array",
    "spectral_radial",
    "palm_kernel",
    "squared_norm_log",
    "spec_to_dict",
    "spec_from_dict",
    "spec_from_json",
]

_NEG_INF = float("-inf")


class Family(str, enum.Enum):
    LAGUERRE_GAUSS = "LaguerreGauss"
    POWER_EXPONENTIAL = "PowerExponential"
    BESSEL_TYPE = "BesselType"
    WHITTLE_MATERN = "WhittleMatern"
    CAUCHY = "Cauchy"
    INDICATOR_SPECTRAL = "IndicatorSpectral"


class InvalidSpecError(ValueError):
    """The spec fails validation (existence bound or parameter domain)."""


class UnsupportedFamilyError(ValueError):
    """The requested operation has no exact route for this family."""


_FIELDS_BY_FAMILY = {
    Family.LAGUERRE_GAUSS: ("m", "alpha"),
    Family.POWER_EXPONENTIAL: ("nu", "alpha", "alpha_rule"),
    Family.BESSEL_TYPE: ("sigma", "alpha"),
    Family.WHITTLE_MATERN: ("nu", "alpha"),
    Family.CAUCHY: ("nu", "alpha", "alpha_rule"),
    Family.INDICATOR_SPECTRAL: ("c",),
}


@dataclass(frozen=True)
class KernelSpec:
    """One DPP family instance: family tag, dimension, intensity exponent,
    and the family's parameters.  Fields irrelevant to the family stay None.
    """

    family: Family
    n: int
    rho: float = 0.0
    m: int = None
    alpha: float = None
    alpha_rule: str = "fixed"
    nu: float = None
    sigma: float = None
    c: float = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 1:
            raise InvalidSpecError(f"dimension n must be >= 1, got {self.n}")
        if self.alpha_rule not in ("fixed", "scaled"):
            raise InvalidSpecError(f"alpha_rule must be fixed|scaled, got {self.alpha_rule!r}")

    def with_n(self, n: int) -> "KernelSpec":
        return replace(self, n=n)


def intensity_log(spec: KernelSpec) -> float:
    """log intensity; the intensity is e^{n rho} by definition."""
    return spec.n * spec.rho


def effective_alpha(spec: KernelSpec) -> float:
    """Scale actually entering the kernel at this n (alpha_n under 'scaled').

    scaled fixes alpha_n = alpha n^{1/nu - 1/2} (PowerExponential) and
    alpha_n = alpha sqrt(n) (Cauchy) exactly, the canonical representative
    of the asymptotic scaling the limit statements assume.
    """
    fam = spec.family
    if fam == Family.INDICATOR_SPECTRAL:
        raise UnsupportedFamilyError("IndicatorSpectral has no alpha scale")
    if spec.alpha_rule == "fixed":
        return float(spec.alpha)
    if fam == Family.POWER_EXPONENTIAL:
        return spec.alpha * spec.n ** (1.0 / spec.nu - 0.5)
    if fam == Family.CAUCHY:
        return spec.alpha * math.sqrt(spec.n)
    raise InvalidSpecError(f"alpha_rule='scaled' undefined for {fam.value}")


def indicator_radius(spec: KernelSpec) -> float:
    """Spectral ball radius r_n with Vol(B_n(r_n)) = e^{n rho}."""
    n = spec.n
    return math.exp((n * spec.rho - ln_ball_volume(n, 1.0)) / n)


def max_param(spec: KernelSpec, n_uniform: bool = False) -> float:
    """Strict upper existence bound on alpha (alpha_n) at this exact n.

    For LaguerreGauss, n_uniform=True returns the n-independent sufficient
    bound e^{-rho} (m pi)^{-1/2}; the exact bound exceeds it and decreases
    toward it as n grows.  For IndicatorSpectral the bounded parameter is c
    and the bound is 1.
    """
    fam, n, rho = spec.family, spec.n, spec.rho
    if fam == Family.LAGUERRE_GAUSS:
        if n_uniform:
            return math.exp(-rho) / math.sqrt(spec.m * math.pi)
        lb = ln_binom(spec.m - 1 + 0.5 * n, spec.m - 1)
        return math.exp(-rho + lb / n) / math.sqrt(spec.m * math.pi)
    if fam == Family.POWER_EXPONENTIAL:
        return math.exp((ln_gamma(n / spec.nu + 1.0) - ln_gamma(0.5 * n + 1.0)) / n
                        + 0.5 * math.log(math.pi) - rho)
    if fam == Family.BESSEL_TYPE:
        s = spec.sigma
        return math.exp(0.5 * math.log((s + n) / (2.0 * math.pi)) - rho
                        + (ln_gamma(0.5 * s + 1.0) - ln_gamma(0.5 * (s + n) + 1.0)) / n)
    if fam == Family.WHITTLE_MATERN:
        return math.exp((ln_gamma(spec.nu) - ln_gamma(spec.nu + 0.5 * n)) / n
                        - math.log(2.0 * math.sqrt(math.pi)) - rho)
    if fam == Family.CAUCHY:
        return math.exp((ln_gamma(spec.nu + 0.5 * n) - ln_gamma(spec.nu)) / n
                        - 0.5 * math.log(math.pi) - rho)
    if fam == Family.INDICATOR_SPECTRAL:
        return 1.0
    raise UnsupportedFamilyError(fam.value)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple = ()
    notes: tuple = ()

    def __bool__(self):
        return self.ok


def validate(spec: KernelSpec) -> ValidationReport:
    """Existence check: spectrum strictly inside [0, 1) plus parameter domains."""
    fam = spec.family
    bad, notes = [], []
    required = _FIELDS_BY_FAMILY[fam]
    for name in ("m", "alpha", "nu", "sigma", "c"):
        val = getattr(spec, name)
        if name in required and val is None:
            bad.append((name, f"{fam.value} requires {name}"))
    if bad:
        return ValidationReport(False, tuple(bad))
    if fam == Family.LAGUERRE_GAUSS and spec.m < 1:
        bad.append(("m", f"m must be a positive integer, got {spec.m}"))
    for name in ("alpha", "nu"):
        if name in required and not getattr(spec, name) > 0:
            bad.append((name, f"{name} must be > 0, got {getattr(spec, name)}"))
    if fam == Family.BESSEL_TYPE:
        if spec.sigma < 0:
            bad.append(("sigma", f"sigma must be >= 0, got {spec.sigma}"))
        elif spec.sigma == 0.0:
            notes.append("sigma = 0 accepted, but the no-reach statement assumes sigma > 0")
    if fam in (Family.POWER_EXPONENTIAL, Family.CAUCHY):
        pass  # both alpha rules are legal here
    elif spec.alpha_rule != "fixed":
        bad.append(("alpha_rule", f"'scaled' is undefined for {fam.value}"))
    if bad:
        return ValidationReport(False, tuple(bad), tuple(notes))
    if fam == Family.INDICATOR_SPECTRAL:
        if not (0.0 < spec.c < 1.0):
            bad.append(("c", f"need 0 < c < 1 (spectrum strictly below 1), got {spec.c}"))
        return ValidationReport(not bad, tuple(bad), tuple(notes))
    a_eff = effective_alpha(spec)
    bound = max_param(spec)
    if not a_eff < bound:
        bad.append(("alpha", f"effective scale {a_eff:.6g} >= existence bound "
                             f"{bound:.6g} at n={spec.n} (excess {a_eff - bound:.3g})"))
    return ValidationReport(not bad, tuple(bad), tuple(notes))


def _require_valid(spec: KernelSpec):
    rep = validate(spec)
    if not rep.ok:
        raise InvalidSpecError("; ".join(msg for _, msg in rep.violations))


# ---------------------------------------------------------------------------
# Radial kernel, spectral side, Palm kernel
# ---------------------------------------------------------------------------

_POSITION_FAMILIES = (Family.LAGUERRE_GAUSS, Family.BESSEL_TYPE,
                      Family.WHITTLE_MATERN, Family.CAUCHY,
                      Family.INDICATOR_SPECTRAL, Family.POWER_EXPONENTIAL)


def kernel_radial_supported(spec: KernelSpec) -> bool:
    if spec.family == Family.POWER_EXPONENTIAL:
        return spec.nu == 2.0  # Gaussian spectrum has a closed position kernel
    return spec.family in _POSITION_FAMILIES


def log_kernel_radial_array(spec: KernelSpec, r) -> tuple[np.ndarray, np.ndarray]:
    """(log|K_n|, sign) at radii r, vectorized.  r = 0 gives the exact limit."""
    fam, n, rho = spec.family, spec.n, spec.rho
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0):
        raise ValueError("radius must be >= 0")
    if not kernel_radial_supported(spec):
        raise UnsupportedFamilyError(
            f"{fam.value} (nu={spec.nu}) has no closed-form position kernel; "
            "use the spectral side")
    nrho = n * rho
    if fam == Family.LAGUERRE_GAUSS:
        m, alpha = spec.m, spec.alpha
        u = r * r / (m * alpha * alpha)
        lag = np.atleast_1d(laguerre(m - 1, 0.5 * n, u))
        lb = ln_binom(m - 1 + 0.5 * n, m - 1)
        with np.errstate(divide="ignore"):
            logmag = nrho - lb + np.log(np.abs(lag)) - u
        return np.where(lag == 0, _NEG_INF, logmag), np.sign(lag).astype(int)
    if fam == Family.POWER_EXPONENTIAL:  # nu == 2: Gaussian closed form
        a_n = effective_alpha(spec)
        logmag = nrho - (math.pi * r / a_n) ** 2
        return logmag, np.ones(r.shape, dtype=int)
    if fam == Family.CAUCHY:
        a_n = effective_alpha(spec)
        logmag = nrho - (spec.nu + 0.5 * n) * np.log1p((r / a_n) ** 2)
        return logmag, np.ones(r.shape, dtype=int)
    if fam == Family.WHITTLE_MATERN:
        nu, alpha = spec.nu, spec.alpha
        z = r / alpha
        logmag = np.full(r.shape, nrho)
        sign = np.ones(r.shape, dtype=int)
        pos = z > 0
        if np.any(pos):
            from scipy.special import kve
            zp = z[pos]
            k = kve(nu, zp)
            lnk = np.where(k > 0, np.log(np.where(k > 0, k, 1.0)) - zp, _NEG_INF)
            if np.any(~np.isfinite(k)):  # kve overflow corner: tiny z, use limit form
                from .special import bessel_k
                bad = ~np.isfinite(k)
                lnk[bad] = [bessel_k(nu, float(zz)).log_magnitude for zz in zp[bad]]
            logmag[pos] = (nrho + (1.0 - nu) * math.log(2.0) - ln_gamma(nu)
                           + nu * np.log(zp) + lnk)
        return logmag, sign
    if fam == Family.BESSEL_TYPE:
        s, alpha = spec.sigma, spec.alpha
        mu = 0.5 * (s + n)
        y = (2.0 / alpha) * math.sqrt(mu) * r
        log_ratio, sign = ln_bessel_j_ratio(mu, y)
        logmag = nrho + mu * math.log(2.0) + ln_gamma(mu + 1.0) + log_ratio
        return logmag, sign
    # IndicatorSpectral: inverse transform of sqrt(c) 1_{B(r_n)}
    r_n = indicator_radius(spec)
    y = 2.0 * math.pi * r_n * r
    log_ratio, sign = ln_bessel_j_ratio(0.5 * n, y)
    logmag = (0.5 * math.log(spec.c) + 0.5 * n * math.log(2.0 * math.pi * r_n * r_n)
              + log_ratio)
    return logmag, sign


def kernel_radial(spec: KernelSpec, r: float) -> LogValue:
    """Signed log of K_n at |x| = r."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    logmag, sign = log_kernel_radial_array(spec, np.array([float(r)]))
    return LogValue.from_log(float(logmag[0]), int(sign[0]))


def spectral_radial(spec: KernelSpec, xi: float) -> float:
    """Radial Fourier transform K_hat at frequency radius xi; in [0, 1)."""
    if xi < 0:
        raise ValueError("frequency radius must be >= 0")
    fam, n = spec.family, spec.n
    if fam == Family.POWER_EXPONENTIAL:
        a_n = effective_alpha(spec)
        log_amp = (n * spec.rho + ln_gamma(0.5 * n + 1.0) + n * math.log(a_n)
                   - 0.5 * n * math.log(math.pi) - ln_gamma(n / spec.nu + 1.0))
        return math.exp(log_amp - (a_n * xi) ** spec.nu)
    if fam == Family.INDICATOR_SPECTRAL:
        return math.sqrt(spec.c) if xi <= indicator_radius(spec) else 0.0
    if fam == Family.LAGUERRE_GAUSS and spec.m == 1:
        alpha = spec.alpha
        log_amp = n * spec.rho + 0.5 * n * math.log(math.pi * alpha * alpha)
        return math.exp(log_amp - (math.pi * alpha * xi) ** 2)
    raise UnsupportedFamilyError(
        f"spectral form implemented for PowerExponential, IndicatorSpectral, "
        f"LaguerreGauss(m=1); got {fam.value}")


def palm_kernel(spec: KernelSpec, x_dist: float, y_dist: float,
                xy_dist: float) -> LogValue:
    """Reduced-Palm kernel K(x-y) - K(x) K(y) / K(0), signed log.

    The three arguments are |x|, |y|, |x-y|; they must form a feasible
    triangle with the origin.
    """
    for d in (x_dist, y_dist, xy_dist):
        if d < 0:
            raise ValueError("distances must be >= 0")
    if not (abs(x_dist - y_dist) - 1e-12 <= xy_dist <= x_dist + y_dist + 1e-12):
        raise ValueError(
            f"infeasible distance triple |x|={x_dist}, |y|={y_dist}, |x-y|={xy_dist}")
    k_xy = kernel_radial(spec, xy_dist)
    k_x = kernel_radial(spec, x_dist)
    k_y = kernel_radial(spec, y_dist)
    k_0 = kernel_radial(spec, 0.0)
    return k_xy - (k_x * k_y) / k_0


# ---------------------------------------------------------------------------
# Squared L2 norms (closed forms)
# ---------------------------------------------------------------------------

def _laguerre_double_sum_log_shifted(n: int, m: int, shift: Fraction) -> float:
    """log of S = sum_{k,j<m} (-1)^{k+j} b_k b_j G(n/2+w+k+j) / (2^{k+j} k! j! G(n/2+w)),
    b_k = binom(m-1+n/2, m-1-k), w = shift (rational, w = 0 for the norm, k/2 for
    moments).  Signed log accumulation with compensated summation; falls back to
    exact rationals when the alternating sum cancels by more than 1e6.
    """
    halfn = 0.5 * n
    base = halfn + float(shift)
    log_b = [ln_binom(m - 1 + halfn, m - 1 - k) for k in range(m)]
    logs, signs = [], []
    for k in range(m):
        for j in range(m):
            s = k + j
            lg = ln_gamma(base + s) - ln_gamma(base)
            logs.append(log_b[k] + log_b[j] + lg
                        - s * math.log(2.0) - ln_gamma(k + 1.0) - ln_gamma(j + 1.0))
            signs.append(1 if s % 2 == 0 else -1)
    total = log_sum_signed(logs, signs)
    peak = max(logs)
    if total.sign <= 0 or peak - total.log_magnitude > 6.0 * math.log(10.0):
        return _laguerre_double_sum_log_exact(n, m, shift)
    return total.log_magnitude


def _laguerre_double_sum_log(n: int, m: int) -> float:
    return _laguerre_double_sum_log_shifted(n, m, Fraction(0))


def _laguerre_double_sum_log_exact(n: int, m: int, shift: Fraction = Fraction(0)) -> float:
    halfn = Fraction(n, 2)
    base = halfn + shift

    def binom_frac(k):
        # C(m-1+n/2, m-1-k), a rational since n/2 is
        num, den = Fraction(1), Fraction(1)
        for i in range(m - 1 - k):
            num *= (m - 1 + halfn - i)
            den *= (i + 1)
        return num / den

    def gamma_ratio(s):
        out = Fraction(1)
        for i in range(s):
            out *= (base + i)
        return out

    bs = [binom_frac(k) for k in range(m)]
    total = Fraction(0)
    for k in range(m):
        for j in range(m):
            s = k + j
            term = bs[k] * bs[j] * gamma_ratio(s)
            term /= Fraction(2 ** s) * math.factorial(k) * math.factorial(j)
            total += term if s % 2 == 0 else -term
    if total <= 0:
        raise ArithmeticError(f"Laguerre norm sum not positive at n={n}, m={m}")
    return math.log(total.numerator) - math.log(total.denominator)


def squared_norm_log(spec: KernelSpec) -> float:
    """log ||K_n||_2^2 via the family's closed form."""
    _require_valid(spec)
    fam, n, rho = spec.family, spec.n, spec.rho
    if fam == Family.LAGUERRE_GAUSS:
        m, alpha = spec.m, spec.alpha
        lb = ln_binom(m - 1 + 0.5 * n, m - 1)
        return (2.0 * n * rho + n * math.log(alpha)
                + 0.5 * n * math.log(0.5 * m * math.pi) - 2.0 * lb
                + _laguerre_double_sum_log(n, m))
    if fam == Family.POWER_EXPONENTIAL:
        a_n = effective_alpha(spec)
        return (2.0 * n * rho - (n / spec.nu) * math.log(2.0) + n * math.log(a_n)
                + ln_gamma(0.5 * n + 1.0) - 0.5 * n * math.log(math.pi)
                - ln_gamma(n / spec.nu + 1.0))
    if fam == Family.BESSEL_TYPE:
        s, alpha = spec.sigma, spec.alpha
        return (2.0 * n * rho + 0.5 * n * math.log(2.0 * math.pi) + n * math.log(alpha)
                - 0.5 * n * math.log(s + n)
                + ln_gamma(s + 1.0) + 2.0 * ln_gamma(0.5 * s + 0.5 * n + 1.0)
                - 2.0 * ln_gamma(0.5 * s + 1.0) - ln_gamma(s + 0.5 * n + 1.0))
    if fam == Family.WHITTLE_MATERN:
        nu, alpha = spec.nu, spec.alpha
        return (2.0 * n * rho + n * math.log(2.0) + 0.5 * n * math.log(math.pi)
                + n * math.log(alpha) + ln_gamma(0.5 * n + 2.0 * nu)
                + 2.0 * ln_gamma(0.5 * n + nu) - 2.0 * ln_gamma(nu)
                - ln_gamma(n + 2.0 * nu))
    if fam == Family.CAUCHY:
        a_n = effective_alpha(spec)
        nu = spec.nu
        log_beta = (ln_gamma(0.5 * n) + ln_gamma(2.0 * nu + 0.5 * n)
                    - ln_gamma(2.0 * nu + n))
        return (2.0 * n * rho + 0.5 * n * math.log(math.pi) + n * math.log(a_n)
                - ln_gamma(0.5 * n) + log_beta)
    if fam == Family.INDICATOR_SPECTRAL:
        return math.log(spec.c) + n * rho
    raise UnsupportedFamilyError(fam.value)


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

_JSON_FIELDS = ("family", "n", "rho", "m", "alpha", "alpha_rule", "nu", "sigma", "c")


def spec_to_dict(spec: KernelSpec) -> dict:
    """Flat snake_case object; family-irrelevant fields omitted."""
    out = {"family": spec.family.value, "n": spec.n, "rho": spec.rho}
    for name in _FIELDS_BY_FAMILY[spec.family]:
        out[name] = getattr(spec, name)
    return out


def spec_from_dict(d: dict) -> KernelSpec:
    unknown = set(d) - set(_JSON_FIELDS)
    if unknown:
        raise InvalidSpecError(f"unknown KernelSpec fields: {sorted(unknown)}")
    if "family" not in d or "n" not in d:
        raise InvalidSpecError("KernelSpec JSON requires 'family' and 'n'")
    try:
        fam = Family(d["family"])
    except ValueError:
        raise InvalidSpecError(f"unknown family {d['family']!r}") from None
    kwargs = {k: d[k] for k in _JSON_FIELDS if k in d and k != "family"}
    return KernelSpec(family=fam, **kwargs)


def spec_from_json(text: str) -> KernelSpec:
    return spec_from_dict(json.loads(text))
