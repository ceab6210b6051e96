"""Aggregate interference-power statistics via moment generating functions.

The received power from one interferer is q * h * ell^(-alpha) * Upsilon(omega)
with Nakagami-m power fading h (unit-mean Gamma), random position (disk
distance density) and random spectral offset.  Averaging exp(s * power)
over all three produces a power series in s whose n-th coefficient splits
into a fading moment, a pathloss moment kappa_n and an overlap moment
gamma_n.  Thinning by occupancy and blockage then lifts the single-AP MGF
to the network MGF.

kappa_n integrands ell^(1 - n*alpha) are non-integrable at the origin once
n*alpha >= 2 (already true at n = 1 for typical alpha), so those moments
are cut off at the geometry's exclusion radius eps_min; the Monte-Carlo
oracle applies the same truncation.  Series terms are assembled in log
space because kappa_n alone overflows double precision near n ~ 100.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import numerics
from .blockage import GeometryConfig
from .numerics import DEFAULT_TOL, DomainError, Tolerance
from .spectral import BandConfig, SpectralModel, upsilon_table

__all__ = [
    "ChannelConfig",
    "SeriesControl",
    "DEFAULT_SERIES",
    "SeriesDivergenceError",
    "DivergentIntegralError",
    "MgfValue",
    "kappa_n",
    "gamma_n",
    "interferer_power_mgf",
    "aggregate_mgf",
    "mean_interferer_power",
    "mean_received_power",
    "dbm_to_watts",
    "watts_to_dbm",
]


class SeriesDivergenceError(numerics.NumericsError):
    """The MGF power series grew instead of converging (|s| too large)."""


class DivergentIntegralError(numerics.NumericsError):
    """A pathloss moment diverges at the origin and no exclusion radius is set."""


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def watts_to_dbm(x_watts: float) -> float:
    if x_watts <= 0.0:
        raise DomainError(f"watts_to_dbm requires a positive power, got {x_watts}")
    return 10.0 * math.log10(x_watts) + 30.0


@dataclass(frozen=True)
class ChannelConfig:
    """Per-interferer channel and population parameters.

    alpha: pathloss exponent.
    m: Nakagami shape of the small-scale fading (power gain ~ Gamma(m, 1/m)).
    q: transmit power of every interfering AP, in watts.
    n: number of candidate interfering APs.
    p: occupancy probability of each candidate (space-frequency slot busy).
    """

    alpha: float
    m: float
    q: float
    n: int
    p: float

    def __post_init__(self):
        if not (self.alpha > 0.0):
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if not (self.m >= 0.5):
            raise DomainError(f"Nakagami shape m must be >= 0.5, got {self.m}")
        if not (self.q > 0.0):
            raise DomainError(f"q must be > 0 watts, got {self.q}")
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n}")
        if not (0.0 <= self.p <= 1.0):
            raise DomainError(f"p must be in [0, 1], got {self.p}")


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the MGF power series."""

    n_max: int = 400
    term_rel_floor: float = 1e-14

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError(f"n_max must be >= 1, got {self.n_max}")
        if not (self.term_rel_floor >= 0.0):
            raise DomainError(f"term_rel_floor must be >= 0, got {self.term_rel_floor}")


DEFAULT_SERIES = SeriesControl()


class MgfValue(NamedTuple):
    """A truncated series value together with the order actually used."""

    value: float
    order: int


# ---------------------------------------------------------------------------
# pathloss moments kappa_n
# ---------------------------------------------------------------------------

def _arccos_weight(l, R: float, v: float):
    arg = np.clip((v * v - R * R + l * l) / (2.0 * l * v), -1.0, 1.0)
    return np.arccos(arg) / math.pi


@lru_cache(maxsize=4096)
def _kappa_cached(n: int, geo: GeometryConfig, alpha: float, tol: Tolerance) -> float:
    R, v = geo.radius, geo.v0_norm
    na = n * alpha
    lo = 0.0
    if na >= 2.0:
        if geo.eps_min <= 0.0:
            raise DivergentIntegralError(
                f"kappa_{n} diverges at the origin for n*alpha = {na} >= 2; "
                "a positive eps_min exclusion radius is required"
            )
        lo = geo.eps_min
    total = 0.0
    if R - v > lo:
        total += numerics.integrate(lambda l: l ** (1.0 - na), lo, R - v, tol)
    if v > 0.0:
        start = max(R - v, lo)
        if R + v > start:
            total += numerics.integrate(
                lambda l: l ** (1.0 - na) * _arccos_weight(l, R, v), start, R + v, tol
            )
    return total


def kappa_n(n: int, geo: GeometryConfig, alpha: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """n-th pathloss moment: integral of ell^(1 - n*alpha) over the disk-distance law.

    Relates to the plain distance moment through E[ell^(-n*alpha)] =
    2*kappa_n / R^2.  The lower limit is replaced by eps_min whenever
    n*alpha >= 2 (otherwise the integral diverges and
    DivergentIntegralError is raised for eps_min = 0).
    """
    if n < 0:
        raise DomainError(f"series order n must be >= 0, got {n}")
    return _kappa_cached(int(n), geo, float(alpha), tol)


@lru_cache(maxsize=65536)
def _log_kappa_cached(n: int, geo: GeometryConfig, alpha: float, tol: Tolerance) -> float:
    """log(kappa_n), evaluated in a scaled variable so large n cannot overflow."""
    na = n * alpha
    if na < 2.0:
        return math.log(_kappa_cached(n, geo, alpha, tol))
    eps = geo.eps_min
    if eps <= 0.0:
        raise DivergentIntegralError(
            f"kappa_{n} diverges at the origin for n*alpha = {na} >= 2"
        )
    R, v = geo.radius, geo.v0_norm
    # substitute u = ell / eps: kappa_n = eps^(2 - na) * J_n with J_n bounded
    total = 0.0
    u_break = (R - v) / eps
    if u_break > 1.0:
        total += numerics.integrate(lambda u: u ** (1.0 - na), 1.0, u_break, tol)
    if v > 0.0:
        u_start = max(u_break, 1.0)
        u_top = (R + v) / eps
        if u_top > u_start:
            total += numerics.integrate(
                lambda u: u ** (1.0 - na) * _arccos_weight(u * eps, R, v),
                u_start, u_top, tol,
            )
    if total <= 0.0:
        return -math.inf
    return (2.0 - na) * math.log(eps) + math.log(total)


# ---------------------------------------------------------------------------
# overlap moments gamma_n
# ---------------------------------------------------------------------------

def gamma_n(
    n: int, band: BandConfig, model: SpectralModel, tol: Tolerance = DEFAULT_TOL
) -> float:
    """n-th overlap moment (Hz): Upsilon^n integrated over both offset slabs.

    Relates to the offset law through E[Upsilon^n] = gamma_n / (f_e - f_s).
    Order 0 is exact (the slab lengths sum to the band span); higher orders
    integrate the shared overlap table, whose tail past the cutoff is
    numerically zero.
    """
    if n < 0:
        raise DomainError(f"series order n must be >= 0, got {n}")
    near, far = band.offset_edges
    if n == 0:
        return near + far
    table = upsilon_table(band, model)
    return table.power_integral(n, near) + table.power_integral(n, far)


# ---------------------------------------------------------------------------
# MGF series
# ---------------------------------------------------------------------------

def _log_series_coefficient(
    n: int, geo: GeometryConfig, band: BandConfig, model: SpectralModel,
    alpha: float, tol: Tolerance,
) -> float:
    """log of 2 * gamma_n * kappa_n / (R^2 * (f_e - f_s)) = log E[Upsilon^n] E[ell^-n*alpha]."""
    g = gamma_n(n, band, model, tol)
    if g <= 0.0:
        return -math.inf
    lk = _log_kappa_cached(n, geo, alpha, tol)
    if lk == -math.inf:
        return -math.inf
    return (
        math.log(2.0) + math.log(g) + lk
        - 2.0 * math.log(geo.radius) - math.log(band.f_e - band.f_s)
    )


def interferer_power_mgf(
    s: float,
    cfg: ChannelConfig,
    geo: GeometryConfig,
    band: BandConfig,
    model: SpectralModel,
    ctl: SeriesControl = DEFAULT_SERIES,
    tol: Tolerance = DEFAULT_TOL,
) -> MgfValue:
    """MGF of a single interferer's received power, E[exp(s * P)].

    Power series in (q*s) with per-order fading, pathloss and overlap
    moments; terms are accumulated until they fall below term_rel_floor of
    the running sum or the order cap n_max is hit.  The series has a finite
    convergence radius set by the fading shape, the transmit power and the
    exclusion radius; sustained term growth in the back half of the budget
    raises SeriesDivergenceError, which is the signal to shrink |s|.
    """
    s = float(s)
    if s == 0.0:
        return MgfValue(1.0, 0)
    log_qs = math.log(abs(cfg.q * s))
    negative = s < 0.0
    log_gamma_m = numerics.log_gamma(cfg.m)
    log_m = math.log(cfg.m)

    total = 0.0
    prev_mag = math.inf
    growth_run = 0
    order = ctl.n_max
    for n in range(0, ctl.n_max + 1):
        log_coef = _log_series_coefficient(n, geo, band, model, cfg.alpha, tol)
        if log_coef == -math.inf:
            order = n
            break
        log_term = (
            n * log_qs
            - numerics.log_gamma(n + 1.0)
            + numerics.log_gamma(n + cfg.m) - log_gamma_m - n * log_m
            + log_coef
        )
        if log_term > 700.0:  # the term alone would overflow a double
            raise SeriesDivergenceError(
                f"MGF series term at order {n} exceeds double range "
                f"(log magnitude {log_term:.1f}); s = {s!r} is outside the "
                "series' convergence radius - reduce |s|"
            )
        mag = math.exp(log_term)
        term = -mag if (negative and n % 2 == 1) else mag
        total += term
        if n >= 2 and mag <= ctl.term_rel_floor * max(abs(total), 1e-300):
            order = n
            break
        if n > ctl.n_max // 2:
            growth_run = growth_run + 1 if mag > prev_mag else 0
            if growth_run >= 3:
                raise SeriesDivergenceError(
                    f"MGF series terms are growing at order {n} (|term| = {mag:.3e}); "
                    f"s = {s!r} is outside the series' convergence radius - "
                    "reduce |s|"
                )
        prev_mag = mag
    return MgfValue(total, order)


def aggregate_mgf(
    s: float,
    phi: float,
    p_b: float,
    cfg: ChannelConfig,
    geo: GeometryConfig,
    band: BandConfig,
    model: SpectralModel,
    ctl: SeriesControl = DEFAULT_SERIES,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """MGF of the total received power under the interference hypothesis.

    exp(phi*s) times the thinned single-AP MGF raised to the candidate
    count: each of the n candidates contributes independently with
    probability p*(1 - p_b).  When that probability is zero (idle network
    or total blockage) the result is exactly exp(phi*s) and the series is
    never evaluated.
    """
    s = float(s)
    if not (0.0 <= p_b <= 1.0):
        raise DomainError(f"p_b must be in [0, 1], got {p_b}")
    if s == 0.0:
        return 1.0
    thin = cfg.p * (1.0 - p_b)
    if thin == 0.0 or cfg.n == 0:
        return math.exp(phi * s)
    m_p = interferer_power_mgf(s, cfg, geo, band, model, ctl, tol).value
    return math.exp(phi * s) * (1.0 - thin + thin * m_p) ** cfg.n


def mean_interferer_power(
    cfg: ChannelConfig,
    geo: GeometryConfig,
    band: BandConfig,
    model: SpectralModel,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Mean received power from one active, non-blocked interferer (watts).

    First-order series coefficient in closed form: the unit-mean fading
    drops out and E[P] = q * E[Upsilon] * E[ell^-alpha].
    """
    k1 = kappa_n(1, geo, cfg.alpha, tol)
    g1 = gamma_n(1, band, model, tol)
    return cfg.q * 2.0 * g1 * k1 / (geo.radius**2 * (band.f_e - band.f_s))


def mean_received_power(
    phi: float,
    p_b: float,
    cfg: ChannelConfig,
    geo: GeometryConfig,
    band: BandConfig,
    model: SpectralModel,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Mean total received power under the interference hypothesis (watts).

    phi plus the expected count of active non-blocked interferers times the
    per-interferer mean; equals the derivative of aggregate_mgf at s = 0
    without any numerical differentiation.
    """
    if phi < 0.0:
        raise DomainError(f"phi must be >= 0, got {phi}")
    if not (0.0 <= p_b <= 1.0):
        raise DomainError(f"p_b must be in [0, 1], got {p_b}")
    if cfg.n == 0 or cfg.p == 0.0 or p_b == 1.0:
        return phi
    return phi + cfg.n * cfg.p * (1.0 - p_b) * mean_interferer_power(cfg, geo, band, model, tol)
