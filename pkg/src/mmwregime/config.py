"""Experiment configuration: JSON schema, unit handling, defaults.

A run is described by one versioned JSON file.  Power quantities must name
their unit in the field itself (q_dbm vs q_watts; exactly one of the pair).
Fields the underlying literature leaves open get defaults here, and every
defaulted field is recorded so output files can echo the list.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .blockage import BlockageConfig, GeometryConfig
from .detector import FIT_MODES, NoiseConfig, thermal_noise_power
from .interference import ChannelConfig, SeriesControl, dbm_to_watts
from .mcsim import BLOCKING_MODES
from .numerics import DomainError
from .spectral import BandConfig, GaussianPsd, RaisedCosineFilter, RectangularPsd, SpectralModel

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "SweepSpec",
    "NetworkConfig",
    "RunConfig",
    "load_config",
    "config_hash",
]

SCHEMA_VERSION = 1


class ConfigError(Exception):
    """A configuration file violates the schema or a component invariant."""


@dataclass(frozen=True)
class SweepSpec:
    """Grids for the experiment commands."""

    v0_grid: tuple[float, ...]
    beta_grid: tuple[float, ...]
    rho_list: tuple[float, ...]
    n_list: tuple[int, ...]

    def __post_init__(self):
        for name in ("v0_grid", "beta_grid", "rho_list", "n_list"):
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"sweeps.{name}: must be a non-empty list")


@dataclass(frozen=True)
class NetworkConfig:
    """Everything the analytic pipeline needs about one deployment."""

    geo: GeometryConfig
    band: BandConfig
    spectral: SpectralModel
    channel: ChannelConfig
    noise: NoiseConfig


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved experiment description."""

    network: NetworkConfig
    blockage: BlockageConfig
    series: SeriesControl
    sweeps: SweepSpec
    beta_th: float
    fit_mode: str
    blocking: str
    trials: int
    seed: int
    defaulted: tuple[str, ...]
    resolved: dict


class _Section:
    """Typed accessor over one JSON object with field-precise errors."""

    def __init__(self, data: dict, path: str, defaulted: list[str]):
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected an object, got {type(data).__name__}")
        self._data = dict(data)
        self._path = path
        self._seen: set[str] = set()
        self._defaulted = defaulted

    def _name(self, key: str) -> str:
        return f"{self._path}.{key}" if self._path else key

    def require(self, key: str, kind, constraint=None, describe: str = ""):
        if key not in self._data:
            raise ConfigError(f"{self._name(key)}: required field is missing")
        return self._convert(key, self._data[key], kind, constraint, describe)

    def optional(self, key: str, kind, default, constraint=None, describe: str = ""):
        if key not in self._data:
            self._defaulted.append(self._name(key))
            return default
        return self._convert(key, self._data[key], kind, constraint, describe)

    def _convert(self, key, value, kind, constraint, describe):
        self._seen.add(key)
        try:
            if kind is float:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise TypeError
                value = float(value)
            elif kind is int:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise TypeError
            elif kind is str:
                if not isinstance(value, str):
                    raise TypeError
            elif kind is list:
                if not isinstance(value, list):
                    raise TypeError
        except TypeError:
            raise ConfigError(
                f"{self._name(key)}: value {value!r} must be of type {kind.__name__}"
            ) from None
        if constraint is not None and not constraint(value):
            raise ConfigError(
                f"{self._name(key)}: value {value!r} violates constraint: {describe}"
            )
        return value

    def subsection(self, key: str, optional: bool = False) -> Optional["_Section"]:
        if key not in self._data:
            if optional:
                return None
            raise ConfigError(f"{self._name(key)}: required section is missing")
        self._seen.add(key)
        return _Section(self._data[key], self._name(key), self._defaulted)

    def power_watts(self, base: str, default: Optional[float] = None) -> float:
        """Read a power given as <base>_dbm or <base>_watts (exactly one)."""
        dbm_key, watt_key = f"{base}_dbm", f"{base}_watts"
        has_dbm, has_watt = dbm_key in self._data, watt_key in self._data
        if has_dbm and has_watt:
            raise ConfigError(
                f"{self._name(dbm_key)} / {self._name(watt_key)}: "
                "exactly one unit variant may be given, found both"
            )
        if has_dbm:
            return dbm_to_watts(self.require(dbm_key, float))
        if has_watt:
            return self.require(watt_key, float, lambda v: v >= 0.0, ">= 0 watts")
        if default is not None:
            self._defaulted.append(self._name(watt_key))
            return default
        raise ConfigError(
            f"{self._name(watt_key)}: required power is missing "
            f"(provide {dbm_key} or {watt_key})"
        )

    def reject_unknown(self):
        unknown = set(self._data) - self._seen
        if unknown:
            name = sorted(unknown)[0]
            raise ConfigError(f"{self._name(name)}: unknown field")


def _positive(v) -> bool:
    return v > 0


def load_config(path) -> RunConfig:
    """Parse, validate and resolve a run configuration file.

    Component invariants are enforced by the component types themselves;
    schema errors name the offending field, its value and the violated
    constraint.  Fields with documented defaults are filled in and listed
    in RunConfig.defaulted.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc

    defaulted: list[str] = []
    root = _Section(raw, "", defaulted)
    version = root.optional("schema_version", int, SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: value {version!r} violates constraint: "
            f"this build reads version {SCHEMA_VERSION}"
        )

    try:
        geo_sec = root.subsection("geometry")
        radius = geo_sec.require("radius_m", float, _positive, "> 0")
        v0 = geo_sec.require("v0_norm_m", float, lambda v: v >= 0.0, ">= 0")
        theta_deg = geo_sec.require(
            "beam_halfwidth_deg", float, lambda v: 0.0 < v < 90.0, "in (0, 90)"
        )
        eps_min = geo_sec.optional("eps_min_m", float, 0.1, _positive, "> 0")
        geo_sec.reject_unknown()
        geo = GeometryConfig(
            radius=radius, v0_norm=v0, theta=math.radians(theta_deg), eps_min=eps_min
        )

        blk_sec = root.subsection("blockage")
        blockage = BlockageConfig(
            rho=blk_sec.require("rho_per_m2", float, lambda v: v >= 0.0, ">= 0"),
            d_s=blk_sec.require("d_s_m", float, _positive, "> 0"),
            d_e=blk_sec.require("d_e_m", float, _positive, "> 0"),
            mode=blk_sec.optional(
                "mode", str, "length_weighted",
                lambda v: v in ("reciprocal_length", "length_weighted"),
                "one of reciprocal_length, length_weighted",
            ),
        )
        blk_sec.reject_unknown()

        band_sec = root.subsection("band")
        f_s = band_sec.require("f_s_hz", float, _positive, "> 0")
        f_e = band_sec.require("f_e_hz", float, _positive, "> 0")
        f_0 = band_sec.require("f_0_hz", float, _positive, "> 0")
        bandwidth = band_sec.optional("filter_bandwidth_hz", float, 1e8, _positive, "> 0")
        band_sec.reject_unknown()
        band = BandConfig(f_s=f_s, f_e=f_e, f_0=f_0, bandwidth=bandwidth)

        spec_sec = root.subsection("spectral", optional=True)
        if spec_sec is None:
            defaulted.append("spectral")
            psd = GaussianPsd(std=bandwidth / 4.0)
            filt = RaisedCosineFilter(rolloff=0.0, width=bandwidth)
        else:
            psd_sec = spec_sec.subsection("psd", optional=True)
            if psd_sec is None:
                defaulted.append("spectral.psd")
                psd = GaussianPsd(std=bandwidth / 4.0)
            else:
                shape = psd_sec.require(
                    "shape", str, lambda v: v in ("gaussian", "rectangular"),
                    "one of gaussian, rectangular",
                )
                if shape == "gaussian":
                    psd = GaussianPsd(
                        std=psd_sec.optional("std_hz", float, bandwidth / 4.0, _positive, "> 0")
                    )
                else:
                    psd = RectangularPsd(
                        width=psd_sec.require("width_hz", float, _positive, "> 0")
                    )
                psd_sec.reject_unknown()
            filt_sec = spec_sec.subsection("filter", optional=True)
            if filt_sec is None:
                defaulted.append("spectral.filter")
                filt = RaisedCosineFilter(rolloff=0.0, width=bandwidth)
            else:
                filt_sec.require(
                    "shape", str, lambda v: v == "raised_cosine", "raised_cosine"
                )
                filt = RaisedCosineFilter(
                    rolloff=filt_sec.optional(
                        "rolloff", float, 0.0, lambda v: 0.0 <= v <= 1.0, "in [0, 1]"
                    ),
                    width=filt_sec.optional("width_hz", float, bandwidth, _positive, "> 0"),
                )
                filt_sec.reject_unknown()
            spec_sec.reject_unknown()
        model = SpectralModel(psd=psd, filter=filt)

        chan_sec = root.subsection("channel")
        channel = ChannelConfig(
            alpha=chan_sec.require("alpha", float, _positive, "> 0"),
            m=chan_sec.require("m", float, lambda v: v >= 0.5, ">= 0.5"),
            q=chan_sec.power_watts("q"),
            n=chan_sec.require("n_interferers", int, lambda v: v >= 0, ">= 0"),
            p=chan_sec.require(
                "occupancy", float, lambda v: 0.0 <= v <= 1.0, "in [0, 1]"
            ),
        )
        chan_sec.reject_unknown()

        noise_sec = root.subsection("noise", optional=True)
        if noise_sec is None:
            defaulted.extend(["noise.sigma2_watts", "noise.phi_watts"])
            noise = NoiseConfig(sigma2=thermal_noise_power(bandwidth), phi=0.0)
        else:
            sigma2 = noise_sec.power_watts("sigma2", default=thermal_noise_power(bandwidth))
            phi = noise_sec.power_watts("phi", default=0.0)
            noise_sec.reject_unknown()
            noise = NoiseConfig(sigma2=sigma2, phi=phi)

        series_sec = root.subsection("series", optional=True)
        if series_sec is None:
            defaulted.append("series")
            series = SeriesControl()
        else:
            series = SeriesControl(
                n_max=series_sec.optional("n_max", int, 400, lambda v: v >= 1, ">= 1"),
                term_rel_floor=series_sec.optional(
                    "term_rel_floor", float, 1e-14, lambda v: v >= 0.0, ">= 0"
                ),
            )
            series_sec.reject_unknown()

        det_sec = root.subsection("detection", optional=True)
        if det_sec is None:
            defaulted.extend(["detection.beta_th", "detection.fit_mode"])
            beta_th, fit_mode = 0.05, "transcendental"
        else:
            beta_th = det_sec.optional(
                "beta_th", float, 0.05, lambda v: 0.0 < v <= 1.0, "in (0, 1]"
            )
            fit_mode = det_sec.optional(
                "fit_mode", str, "transcendental",
                lambda v: v in FIT_MODES, f"one of {FIT_MODES}",
            )
            det_sec.reject_unknown()

        sweep_sec = root.subsection("sweeps", optional=True)
        if sweep_sec is None:
            defaulted.append("sweeps")
            sweeps = SweepSpec(
                v0_grid=tuple(float(v) for v in range(10) if v < geo.radius),
                beta_grid=(1e-300, 1e-12, 1e-6, 1e-3, 0.01, 0.05, 0.1, 0.2,
                           0.3, 0.5, 0.7, 0.9, 0.99, 1.0),
                rho_list=(blockage.rho,),
                n_list=(channel.n,),
            )
        else:
            v0_grid = sweep_sec.optional(
                "v0_grid_m", list,
                [float(v) for v in range(10) if v < geo.radius],
            )
            beta_grid = sweep_sec.optional(
                "beta_grid", list,
                [1e-300, 1e-12, 1e-6, 1e-3, 0.01, 0.05, 0.1, 0.2, 0.3, 0.5,
                 0.7, 0.9, 0.99, 1.0],
            )
            rho_list = sweep_sec.optional("rho_list", list, [blockage.rho])
            n_list = sweep_sec.optional("n_list", list, [channel.n])
            sweep_sec.reject_unknown()
            for v in v0_grid:
                if not (0.0 <= float(v) < geo.radius):
                    raise ConfigError(
                        f"sweeps.v0_grid_m: value {v!r} violates constraint: in [0, radius)"
                    )
            for b in beta_grid:
                if not (0.0 < float(b) <= 1.0):
                    raise ConfigError(
                        f"sweeps.beta_grid: value {b!r} violates constraint: in (0, 1]"
                    )
            for r in rho_list:
                if float(r) < 0.0:
                    raise ConfigError(
                        f"sweeps.rho_list: value {r!r} violates constraint: >= 0"
                    )
            for n in n_list:
                if not isinstance(n, int) or n < 0:
                    raise ConfigError(
                        f"sweeps.n_list: value {n!r} violates constraint: integer >= 0"
                    )
            sweeps = SweepSpec(
                v0_grid=tuple(float(v) for v in v0_grid),
                beta_grid=tuple(float(b) for b in beta_grid),
                rho_list=tuple(float(r) for r in rho_list),
                n_list=tuple(int(n) for n in n_list),
            )

        sim_sec = root.subsection("simulation", optional=True)
        if sim_sec is None:
            defaulted.append("simulation.blocking")
            blocking = "thinning"
        else:
            blocking = sim_sec.optional(
                "blocking", str, "thinning",
                lambda v: v in BLOCKING_MODES, f"one of {BLOCKING_MODES}",
            )
            sim_sec.reject_unknown()

        trials = root.optional("trials", int, 100000, lambda v: v >= 1, ">= 1")
        seed = root.optional("seed", int, 0, lambda v: v >= 0, ">= 0")
        root.reject_unknown()
    except DomainError as exc:
        # component invariants re-raised on the config surface
        raise ConfigError(str(exc)) from exc

    network = NetworkConfig(geo=geo, band=band, spectral=model, channel=channel, noise=noise)
    run = RunConfig(
        network=network, blockage=blockage, series=series, sweeps=sweeps,
        beta_th=beta_th, fit_mode=fit_mode, blocking=blocking,
        trials=trials, seed=seed, defaulted=tuple(defaulted),
        resolved=_resolved_dict(network, blockage, series, sweeps, beta_th,
                                fit_mode, blocking, trials, seed),
    )
    return run


def _resolved_dict(network, blockage, series, sweeps, beta_th, fit_mode,
                   blocking, trials, seed) -> dict:
    """Canonical physical-unit view of a run, used for hashing and echoes."""
    geo, band, model, channel, noise = (
        network.geo, network.band, network.spectral, network.channel, network.noise
    )
    psd = (
        {"shape": "gaussian", "std_hz": model.psd.std}
        if isinstance(model.psd, GaussianPsd)
        else {"shape": "rectangular", "width_hz": model.psd.width}
    )
    return {
        "schema_version": SCHEMA_VERSION,
        "geometry": {
            "radius_m": geo.radius, "v0_norm_m": geo.v0_norm,
            "beam_halfwidth_deg": math.degrees(geo.theta), "eps_min_m": geo.eps_min,
        },
        "blockage": {
            "rho_per_m2": blockage.rho, "d_s_m": blockage.d_s,
            "d_e_m": blockage.d_e, "mode": blockage.mode,
        },
        "band": {
            "f_s_hz": band.f_s, "f_e_hz": band.f_e, "f_0_hz": band.f_0,
            "filter_bandwidth_hz": band.bandwidth,
        },
        "spectral": {
            "psd": psd,
            "filter": {
                "shape": "raised_cosine",
                "rolloff": model.filter.rolloff,
                "width_hz": model.filter.width,
            },
        },
        "channel": {
            "alpha": channel.alpha, "m": channel.m, "q_watts": channel.q,
            "n_interferers": channel.n, "occupancy": channel.p,
        },
        "noise": {"sigma2_watts": noise.sigma2, "phi_watts": noise.phi},
        "series": {"n_max": series.n_max, "term_rel_floor": series.term_rel_floor},
        "detection": {"beta_th": beta_th, "fit_mode": fit_mode},
        "sweeps": {
            "v0_grid_m": list(sweeps.v0_grid), "beta_grid": list(sweeps.beta_grid),
            "rho_list": list(sweeps.rho_list), "n_list": list(sweeps.n_list),
        },
        "simulation": {"blocking": blocking},
        "trials": trials,
        "seed": seed,
    }


def config_hash(resolved: dict) -> str:
    """Stable short hash of a resolved configuration."""
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
