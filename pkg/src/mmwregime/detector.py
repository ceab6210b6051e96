"""Regime hypothesis test: densities, maximum-entropy fit, threshold, sweeps.

Under the noise-limited hypothesis the received power is the known signal
power phi plus squared Gaussian noise, a scaled chi-square with one degree
of freedom.  Under the interference-limited hypothesis the exact law is
only available through its MGF, so it is replaced by the maximum-entropy
density matching the first moment: a shifted exponential with rate lambda.
The likelihood ratio of the two densities feeds a Neyman-Pearson test whose
threshold is set by the significance level through an inverse-erf formula.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import numerics
from .blockage import BlockageConfig, GeometryConfig, blockage_probability
from .interference import ChannelConfig, mean_received_power
from .numerics import DEFAULT_TOL, DomainError, Tolerance
from .spectral import BandConfig, SpectralModel

__all__ = [
    "NoiseConfig",
    "MeFit",
    "DetectionResult",
    "RegimePoint",
    "InfeasibleFitError",
    "FIT_MODES",
    "thermal_noise_power",
    "h0_pdf",
    "h0_cdf",
    "fit_me_lambda",
    "h1_pdf",
    "h1_cdf",
    "lrt",
    "np_threshold",
    "detection_probability",
    "lrt_area",
    "roc_curve",
    "detect",
    "regime_map",
]

FIT_MODES = ("transcendental", "closed_form")

NOISE_LIMITED = "noise_limited"
INTERFERENCE_LIMITED = "interference_limited"


class InfeasibleFitError(numerics.NumericsError):
    """The interference mean does not exceed the signal power; no rate fits."""


def thermal_noise_power(bandwidth_hz: float, psd_dbm_per_hz: float = -174.0) -> float:
    """Thermal noise power in watts over a bandwidth (default -174 dBm/Hz)."""
    if bandwidth_hz <= 0.0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth_hz}")
    return 10.0 ** ((psd_dbm_per_hz + 10.0 * math.log10(bandwidth_hz) - 30.0) / 10.0)


@dataclass(frozen=True)
class NoiseConfig:
    """Noise variance (= mean noise power, watts) and known signal power."""

    sigma2: float
    phi: float = 0.0

    def __post_init__(self):
        if not (self.sigma2 > 0.0):
            raise DomainError(f"sigma2 must be > 0, got {self.sigma2}")
        if not (self.phi >= 0.0):
            raise DomainError(f"phi must be >= 0, got {self.phi}")


@dataclass(frozen=True)
class MeFit:
    """Fitted shifted-exponential rate for the interference hypothesis."""

    lam: float
    mode: str
    mean_used: float

    def __post_init__(self):
        if not (self.lam > 0.0):
            raise DomainError(f"lambda must be > 0, got {self.lam}")


@dataclass(frozen=True)
class DetectionResult:
    """Threshold test outcome at one operating point."""

    eta_prime: float
    beta_th: float
    p_d: float
    lrt_area: float
    verdict: str


@dataclass(frozen=True)
class RegimePoint:
    """One location of a regime sweep; numeric fields are None on failure."""

    v0_norm: float
    p_b: Optional[float]
    mean_y: Optional[float]
    lam: Optional[float]
    eta_prime: Optional[float]
    p_d: Optional[float]
    lrt_area: Optional[float]
    verdict: str
    error: Optional[str] = None


# ---------------------------------------------------------------------------
# hypothesis densities
# ---------------------------------------------------------------------------

def h0_pdf(y, noise: NoiseConfig):
    """Noise-limited density of the received power (1/W).

    Scaled chi-square(1) shifted by phi; diverges integrably as y -> phi+
    and is zero at or below phi.
    """
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    out = np.zeros_like(y)
    pos = y > noise.phi
    u = (y[pos] - noise.phi) / (2.0 * noise.sigma2)
    out[pos] = np.exp(-u) / (math.gamma(0.5) * np.sqrt(2.0 * noise.sigma2 * (y[pos] - noise.phi)))
    return float(out[0]) if scalar else out


def h0_cdf(y, noise: NoiseConfig):
    """Noise-limited CDF: regularized lower incomplete gamma of order 1/2."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    out = np.zeros_like(y)
    pos = y > noise.phi
    u = (y[pos] - noise.phi) / (2.0 * noise.sigma2)
    out[pos] = numerics.reg_lower_gamma(0.5, u)
    return float(out[0]) if scalar else out


_FIT_TOL = Tolerance(rel=1e-15, abs=1e-15, max_iter=500)


def fit_me_lambda(mean_y: float, phi: float, mode: str = "transcendental") -> MeFit:
    """Rate of the maximum-entropy shifted exponential matching mean_y.

    mode "closed_form" uses the textbook solution lambda = 1/(mean_y - phi)
    of the entropy problem with normalization and first-moment constraints.
    mode "transcendental" instead solves the alternative matching condition
    (lambda*phi + 1)*exp(-lambda*phi) - mean_y*lambda^2 = 0, which reduces
    to lambda = 1/sqrt(mean_y) at phi = 0.  The two disagree in general;
    both are exposed so results can be compared.
    """
    if mode not in FIT_MODES:
        raise DomainError(f"mode must be one of {FIT_MODES}, got {mode!r}")
    if not (mean_y > phi):
        raise InfeasibleFitError(
            f"mean received power {mean_y!r} must exceed the signal power {phi!r} "
            "for an exponential tail to fit"
        )
    if mode == "closed_form":
        return MeFit(lam=1.0 / (mean_y - phi), mode=mode, mean_used=mean_y)

    def equation(lam):
        lp = lam * phi
        return (lp + 1.0) * math.exp(-lp) - mean_y * lam * lam

    scale = max(phi, mean_y - phi)
    lam = numerics.find_root(equation, 1e-12 / scale, 1e12 / scale, _FIT_TOL)
    return MeFit(lam=lam, mode=mode, mean_used=mean_y)


def h1_pdf(y, fit: MeFit, phi: float):
    """Interference-limited density: shifted exponential with rate fit.lam."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    out = np.zeros_like(y)
    pos = y >= phi
    out[pos] = fit.lam * np.exp(-fit.lam * (y[pos] - phi))
    return float(out[0]) if scalar else out


def h1_cdf(y, fit: MeFit, phi: float):
    """CDF of the shifted exponential."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    out = np.zeros_like(y)
    pos = y >= phi
    out[pos] = -np.expm1(-fit.lam * (y[pos] - phi))
    return float(out[0]) if scalar else out


def lrt(y, fit: MeFit, noise: NoiseConfig):
    """Likelihood ratio of the interference density to the noise density.

    Closed form 2*Gamma(1/2)*sigma2*lambda * sqrt(u) * exp((1/(2 sigma2) -
    lambda)(y - phi)) with u = (y - phi)/(2 sigma2); tends to 0 as y ->
    phi+ because the noise density diverges there.  Requires y > phi.
    """
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    if np.any(y <= noise.phi):
        raise DomainError(f"lrt requires y > phi = {noise.phi}")
    s2 = noise.sigma2
    shifted = y - noise.phi
    # overflow to inf is meaningful here: the quadrature layer detects the
    # non-finite value and raises a typed error, so numpy need not warn
    with np.errstate(over="ignore"):
        out = (
            2.0 * math.gamma(0.5) * s2 * fit.lam
            * np.sqrt(shifted / (2.0 * s2))
            * np.exp((1.0 / (2.0 * s2) - fit.lam) * shifted)
        )
    if __debug__:
        # cross-check against the defining ratio where the denominator
        # is representable (the closed form is exact algebra, so any
        # disagreement means a coding slip, not roundoff)
        u = shifted / (2.0 * s2)
        safe = u < 600.0
        if np.any(safe):
            ratio = h1_pdf(y[safe], fit, noise.phi) / h0_pdf(y[safe], noise)
            assert np.allclose(out[safe], ratio, rtol=1e-9), "lrt closed form diverged from density ratio"
    return float(out[0]) if scalar else out


def np_threshold(beta_th: float, noise: NoiseConfig) -> float:
    """Power threshold with false-alarm probability exactly beta_th.

    eta' = 2*sigma2*(erf_inv(1 - beta))^2 + phi, evaluated through the
    complementary inverse so significance levels down to 1e-300 keep full
    precision.  beta = 1 collapses to phi; beta = 0 would be infinite and
    raises DomainError.
    """
    if not (0.0 < beta_th <= 1.0):
        raise DomainError(
            f"beta_th must be in (0, 1] (threshold infinite at 0), got {beta_th}"
        )
    if beta_th == 1.0:
        return noise.phi
    z = numerics.erfc_inv(beta_th)  # == erf_inv(1 - beta_th)
    return 2.0 * noise.sigma2 * z * z + noise.phi


def detection_probability(fit: MeFit, eta_prime: float, phi: float) -> float:
    """Probability the interference hypothesis exceeds the threshold."""
    if eta_prime < phi:
        raise DomainError(f"eta_prime must be >= phi, got {eta_prime} < {phi}")
    return math.exp(-fit.lam * (eta_prime - phi))


_AREA_TOL = Tolerance(rel=1e-9, abs=0.0, max_iter=4000)


def lrt_area(
    fit: MeFit,
    noise: NoiseConfig,
    y_max: Optional[float] = None,
    tol: Tolerance = _AREA_TOL,
) -> float:
    """Area under the likelihood-ratio curve from phi up to y_max.

    A scalar summary of how strongly the interference hypothesis dominates:
    larger rate (weaker interference) shrinks it.  The default y_max spans
    twenty times the wider of the two hypothesis scales, past which the
    integrand either decays (lam > 1/(2 sigma2)) or the window already
    dominates the value.  The y -> phi+ endpoint is integrable and never
    evaluated by the quadrature.
    """
    phi = noise.phi
    if y_max is None:
        y_max = phi + 20.0 * max(2.0 * noise.sigma2, 1.0 / fit.lam)
    if not (y_max > phi):
        raise DomainError(f"y_max must exceed phi, got {y_max} <= {phi}")
    return numerics.integrate(lambda y: lrt(y, fit, noise), phi, y_max, tol)


def roc_curve(
    fit: MeFit, noise: NoiseConfig, betas: Sequence[float]
) -> list[tuple[float, float]]:
    """(false alarm, detection) pairs over a significance grid, sorted by P_F.

    By construction of the threshold the false-alarm probability equals the
    significance level itself, so the curve is parameterized directly.
    """
    pts = []
    for beta in betas:
        eta = np_threshold(beta, noise)
        pts.append((float(beta), detection_probability(fit, eta, noise.phi)))
    return sorted(pts)


def detect(
    fit: MeFit, noise: NoiseConfig, beta_th: float, tol: Tolerance = _AREA_TOL
) -> DetectionResult:
    """Full threshold-test summary at one significance level."""
    eta = np_threshold(beta_th, noise)
    p_d = detection_probability(fit, eta, noise.phi)
    area = lrt_area(fit, noise, tol=tol)
    verdict = INTERFERENCE_LIMITED if p_d > 0.5 else NOISE_LIMITED
    return DetectionResult(eta_prime=eta, beta_th=beta_th, p_d=p_d,
                           lrt_area=area, verdict=verdict)


def _regime_point(
    v0: float,
    blockage_cfg: BlockageConfig,
    geo: GeometryConfig,
    channel: ChannelConfig,
    band: BandConfig,
    model: SpectralModel,
    noise: NoiseConfig,
    beta_th: float,
    fit_mode: str,
    tol: Tolerance,
    p_b_override: Optional[float],
) -> RegimePoint:
    geo_v = replace(geo, v0_norm=float(v0))
    p_b = mean_y = None
    try:
        if p_b_override is None:
            p_b = blockage_probability(blockage_cfg, geo_v, tol).p_b
        else:
            p_b = float(p_b_override)
        mean_y = mean_received_power(noise.phi, p_b, channel, geo_v, band, model, tol)
        fit = fit_me_lambda(mean_y, noise.phi, fit_mode)
        result = detect(fit, noise, beta_th)
    except InfeasibleFitError as exc:
        # no interference mean above the signal power: trivially noise-limited
        return RegimePoint(
            v0_norm=float(v0), p_b=p_b, mean_y=mean_y, lam=None, eta_prime=None,
            p_d=None, lrt_area=None, verdict=NOISE_LIMITED, error=str(exc),
        )
    except numerics.NumericsError as exc:
        return RegimePoint(
            v0_norm=float(v0), p_b=p_b, mean_y=mean_y, lam=None, eta_prime=None,
            p_d=None, lrt_area=None, verdict="error", error=str(exc),
        )
    return RegimePoint(
        v0_norm=float(v0), p_b=p_b, mean_y=mean_y, lam=fit.lam,
        eta_prime=result.eta_prime, p_d=result.p_d, lrt_area=result.lrt_area,
        verdict=result.verdict, error=None,
    )


def regime_map(
    blockage_cfg: BlockageConfig,
    geo: GeometryConfig,
    channel: ChannelConfig,
    band: BandConfig,
    model: SpectralModel,
    noise: NoiseConfig,
    v0_grid: Sequence[float],
    beta_th: float,
    fit_mode: str = "transcendental",
    tol: Tolerance = DEFAULT_TOL,
    p_b_override: Optional[float] = None,
    workers: int = 1,
) -> list[RegimePoint]:
    """Recompute the full detection chain at each receiver offset.

    Per-location failures are recorded on the returned point instead of
    aborting the sweep.  Points are independent, so the sweep may run on a
    thread pool; results are returned in grid order regardless of worker
    count and are bitwise identical for any worker count.

    p_b_override replaces the analytic blockage probability at every
    location (0.0 reproduces a blockage-free network).
    """
    for v in v0_grid:
        if not (0.0 <= v < geo.radius):
            raise DomainError(f"v0 grid value {v} outside [0, radius)")
    args = (blockage_cfg, geo, channel, band, model, noise, beta_th,
            fit_mode, tol, p_b_override)
    if workers <= 1:
        return [_regime_point(v, *args) for v in v0_grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda v: _regime_point(v, *args), v0_grid))
