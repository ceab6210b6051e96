"""Does the analytic pipeline agree with brute-force simulation?

Runs the bundled validation suite: sampled distances and spectral offsets
against their densities, the thinned interferer count against its Binomial
law, the simulated mean received power against the closed-form moment, the
noise-power law against its CDF, and false-alarm calibration.  The
geometric cone-shadow blockage rate is reported alongside the closed-form
probability; the two describe different blockage physics, so that row is
informational rather than a pass/fail gate.
"""

import math
import time

from mmwregime import (
    BandConfig,
    BlockageConfig,
    ChannelConfig,
    GaussianPsd,
    GeometryConfig,
    NoiseConfig,
    RaisedCosineFilter,
    SpectralModel,
    dbm_to_watts,
    validate_suite,
)

geo = GeometryConfig(radius=10.0, v0_norm=0.0, theta=math.radians(10.0), eps_min=0.5)
band = BandConfig(f_s=58e9, f_e=64e9, f_0=62e9, bandwidth=1e8)
model = SpectralModel(psd=GaussianPsd(std=2.5e7), filter=RaisedCosineFilter(rolloff=0.0, width=1e8))
channel = ChannelConfig(alpha=2.5, m=3.0, q=dbm_to_watts(27.0), n=200, p=0.5)
noise = NoiseConfig(sigma2=5e-3, phi=1e-3)
blockage = BlockageConfig(rho=1.0, d_s=0.2, d_e=0.8, mode="reciprocal_length")

start = time.monotonic()
report = validate_suite(
    channel, geo, band, model, noise, blockage, trials=50_000, seed=2026
)
elapsed = time.monotonic() - start

print(f"{'check':38s} {'analytic':>12} {'empirical':>12} {'pass':>5}")
for c in report.checks:
    print(f"{c.name:38s} {c.analytic:12.5g} {c.empirical:12.5g} {str(c.passed):>5}")
print()
print(f"overall: {'PASS' if report.passed else 'FAIL'}  ({elapsed:.1f}s, 50k trials)")
print()
print("note the last row: the literal cone-shadow simulation blocks far more")
print("links than the closed-form probability at this obstacle density; the")
print("closed form is an approximation fitted to different shadow bookkeeping,")
print("so the pipeline treats it as the modeling input and reports the gap.")
