import math

import numpy as np
import pytest

from dpp_repulsion.kernels import (
    Family,
    KernelSpec,
    indicator_radius,
    log_kernel_radial_array,
)
from dpp_repulsion.quadrature import (
    LogIntegrand,
    bessel_sq_moment_log,
    integrate_log_panels,
)
from dpp_repulsion.special import ln_gamma


def surface_log(n: int) -> float:
    """log of the (n-1)-sphere surface area 2 pi^{n/2} / Gamma(n/2)."""
    return math.log(2.0) + 0.5 * n * math.log(math.pi) - ln_gamma(0.5 * n)


def quadrature_norm_log(spec: KernelSpec, rel_tol: float = 1e-10) -> float:
    """||K||_2^2 by direct radial quadrature of the position kernel squared.

    The independent route used against the closed forms; Bessel-type and
    indicator-spectral kernels go through the oscillatory J^2 machinery.
    """
    n = spec.n
    if spec.family == Family.BESSEL_TYPE:
        mu = 0.5 * (spec.sigma + n)
        s = spec.alpha / math.sqrt(2.0 * (spec.sigma + n))
        const = 2 * n * spec.rho + 2 * mu * math.log(2.0) + 2 * ln_gamma(mu + 1.0)
        return (surface_log(n) + const + n * math.log(s)
                + bessel_sq_moment_log(mu, spec.sigma + 1.0, rel_tol=1e-9))
    if spec.family == Family.INDICATOR_SPECTRAL:
        r_n = indicator_radius(spec)
        const = (math.log(spec.c) + n * math.log(2 * math.pi * r_n * r_n)
                 - n * math.log(2 * math.pi * r_n))
        return surface_log(n) + const + bessel_sq_moment_log(0.5 * n, 1.0, rel_tol=1e-9)

    def log_f(r):
        r = np.asarray(r, dtype=float)
        logk, _ = log_kernel_radial_array(spec, r)
        with np.errstate(divide="ignore"):
            logr = np.where(r > 0, np.log(np.maximum(r, 1e-300)), -np.inf)
        return (n - 1) * logr + 2.0 * logk

    ps = integrate_log_panels(LogIntegrand(log_f, 0.0, math.inf), rel_tol=rel_tol)
    return surface_log(n) + ps.log_total


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260811)
