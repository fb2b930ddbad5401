"""Cooperative detection of primary activity through amplify-and-forward reports.

Each relay squares-and-forwards its received primary energy to the
destination over a fixed-gain AF link; the destination also listens
directly. A sample trips the detector when any of the forwarded or direct
observations exceeds the threshold, and a frame detects when any of its
samples trips (OR fusion). Everything here works in noise-normalised SNR
units: absolute powers divide by the noise floor once at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fading
from .fading import LinkSet, PrimaryModel, activity_mixture, max_exp_expectation
from .specfun import bessel_k1_scaled, exp_scaled_gamma_upper_0


@dataclass
class SecondaryPolicy:
    """Radio limits shared by the secondary nodes.

    Powers in watts: p_max is the per-node amplifier cap, interference_cap
    the allowed average interference at any primary receiver, noise_power
    the thermal floor, threshold the detector level (received power),
    p_circuit_tx / p_circuit_rx the electronics draw while transmitting and
    listening. eta is the RF harvesting efficiency.
    """

    p_max: float
    interference_cap: float
    noise_power: float
    bandwidth: float
    threshold: float
    eta: float
    p_circuit_tx: float
    p_circuit_rx: float

    def __post_init__(self):
        for name in ("p_max", "interference_cap", "noise_power", "bandwidth",
                     "threshold", "p_circuit_tx", "p_circuit_rx"):
            if getattr(self, name) < 0.0 or (name != "threshold" and getattr(self, name) == 0.0):
                raise ValueError("%s must be positive" % name)
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("harvest efficiency must lie in (0, 1]")


@dataclass
class ReportGain:
    """Per-relay fixed AF gain constants for the reporting phase.

    u_report[i] is the dimensionless gain normaliser of relay i's report
    link; when the saturation constants are solved, k_report[i] is the
    amplifier clipping level (W) and sat_threshold[i] the received level
    (normalised) above which the amplifier leaves the fixed-gain branch.
    """

    u_report: tuple
    k_report: tuple = None
    sat_threshold: tuple = None

    def __post_init__(self):
        if any(u <= 0.0 for u in self.u_report):
            raise ValueError("fixed gains must be positive")
        if self.k_report is not None and any(k <= 0.0 for k in self.k_report):
            raise ValueError("solved clipping constants must be positive")


def report_power(links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy, i: int):
    """Reporting-phase transmit power of relay i under both power limits.

    The amplifier cap and the average-interference cap combine
    harmonically: p = 1 / (1/p_max + E[peak gain to a primary]/cap).
    """
    eq = max_exp_expectation(links.gain_pu_relay(i))
    return 1.0 / (1.0 / policy.p_max + eq / policy.interference_cap)


def fixed_gain_report(links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy, i: int):
    """Fixed AF gain normaliser of relay i: 1 / E[1/(x+1)] under the
    continuous part of the received interference-to-noise ratio x."""
    mix_scale = primary.tx_power / policy.noise_power
    _, parts = activity_mixture(links.gain_pu_relay(i), primary.duty)
    acc = 0.0
    for prob, sub, w in parts:
        c = 1.0 / (mix_scale * sub)
        acc += prob * np.sum(w * c * exp_scaled_gamma_upper_0(c))
    return 1.0 / acc


def report_e2e_cdf(x, links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy,
                   i: int, u: float = None, p_rep: float = None):
    """CDF of the end-to-end forwarded interference SNR of relay i.

    x is in noise-normalised units. The distribution has an atom at zero
    (no primary active during the sample) and a continuous part shaped by
    the dual-hop fixed-gain chain.
    """
    if u is None:
        u = fixed_gain_report(links, primary, policy, i)
    if p_rep is None:
        p_rep = report_power(links, primary, policy, i)
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise ValueError("SNR threshold must be non-negative")
    mix_scale = primary.tx_power / policy.noise_power
    b = p_rep * links.gain_relay_dst(i) / policy.noise_power
    atom, parts = activity_mixture(links.gain_pu_relay(i), primary.duty)
    out = np.full_like(x, atom)
    pos = x > 0.0
    xp = x[pos]
    for prob, sub, w in parts:
        mm = mix_scale * sub
        s = 2.0 * np.sqrt(xp[:, None] * u / (mm * b))
        kernel = np.exp(-xp[:, None] / mm - s) * s * bessel_k1_scaled(np.maximum(s, 1e-300))
        out[pos] += prob * (1.0 - np.sum(w * kernel, axis=-1))
    return float(out[0]) if scalar else out


def direct_cdf(x, links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy):
    """CDF of the primary SNR observed directly at the destination."""
    return fading.hypoexp_cdf(
        x, links.gain_pu_dst(), scale=primary.tx_power / policy.noise_power,
        duty=primary.duty)


def sample_miss_probability(lam_norm, links: LinkSet, primary: PrimaryModel,
                            policy: SecondaryPolicy, report: ReportGain = None,
                            powers=None):
    """Probability that one sample's observations all stay below the
    normalised threshold, across the direct path and every relay report."""
    if report is None:
        report = build_report_gain(links, primary, policy)
    if powers is None:
        powers = [report_power(links, primary, policy, i) for i in range(links.n_relays)]
    miss = float(direct_cdf(lam_norm, links, primary, policy))
    for i in range(links.n_relays):
        miss *= float(report_e2e_cdf(lam_norm, links, primary, policy, i,
                                     u=report.u_report[i], p_rep=powers[i]))
    return miss


def detection_probability(lam, n_samples, links: LinkSet, primary: PrimaryModel,
                          policy: SecondaryPolicy, report: ReportGain = None,
                          powers=None):
    """Frame detection probability with OR fusion over n_samples samples.

    lam is the absolute threshold in watts; n_samples may be fractional
    (the optimiser treats the sample count as continuous).
    """
    if n_samples <= 0:
        raise ValueError("need a positive sample count")
    delta = sample_miss_probability(lam / policy.noise_power, links, primary,
                                    policy, report=report, powers=powers)
    return 1.0 - delta**n_samples


def build_report_gain(links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy,
                      solve_clipping: bool = False) -> ReportGain:
    """Assemble the per-relay fixed gains, optionally with clipping levels."""
    us = tuple(fixed_gain_report(links, primary, policy, i) for i in range(links.n_relays))
    if not solve_clipping:
        return ReportGain(u_report=us)
    ks, ts = [], []
    for i, u in enumerate(us):
        k, t = solve_saturation_gain(links, primary, policy, i, u=u)
        ks.append(k)
        ts.append(t)
    return ReportGain(u_report=us, k_report=tuple(ks), sat_threshold=tuple(ts))


# --- amplifier saturation -------------------------------------------------

def avg_clipped_gain(threshold_t, links: LinkSet, primary: PrimaryModel,
                     policy: SecondaryPolicy, i: int, u: float = None):
    """Mean squared gain of the clipped amplifier.

    Below the received level threshold_t (normalised) the amplifier applies
    the constant squared gain 1/u; above it the gain follows 1/(x+1).
    """
    if u is None:
        u = fixed_gain_report(links, primary, policy, i)
    t = max(float(threshold_t), 0.0)
    mix_scale = primary.tx_power / policy.noise_power
    atom, parts = activity_mixture(links.gain_pu_relay(i), primary.duty)
    if threshold_t < 0.0:
        # clipping region empty: the zero atom rides the 1/(x+1) branch
        head = atom
    else:
        head = fading.hypoexp_cdf(t, links.gain_pu_relay(i), scale=mix_scale,
                                  duty=primary.duty) / u
    tail = 0.0
    for prob, sub, w in parts:
        mm = mix_scale * sub
        c = (t + 1.0) / mm
        tail += prob * np.sum(w * np.exp(-t / mm) * exp_scaled_gamma_upper_0(c) / mm)
    return head + tail


def solve_saturation_gain(links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy,
                          i: int, u: float = None, bracket=(1e-6, 1e6)):
    """Clipping level K (W) at which the clipped amplifier's mean squared
    gain equals the fixed-gain value 1/u. Returns (K, threshold_t).

    The received-level threshold is t = K*u/noise - 1. The residual
    avg_clipped_gain(t) - 1/u starts at atom/u for t = 0 and decreases
    through zero exactly once, so a coarse scan plus bisection is safe.
    """
    if u is None:
        u = fixed_gain_report(links, primary, policy, i)
    n0 = policy.noise_power
    k_lo, k_hi = bracket[0] * n0, bracket[1] * n0

    def resid(k):
        t = k * u / n0 - 1.0
        return avg_clipped_gain(t, links, primary, policy, i, u=u) - 1.0 / u

    atom = (1.0 - primary.duty) ** links.n_primary
    if atom == 0.0:
        # residual is exactly zero on the whole branch t <= 0: the root is
        # the plateau edge where clipping first bites
        k = n0 / u
        if not k_lo <= k <= k_hi:
            raise ValueError("saturation root %g W outside bracket [%g, %g] W" % (k, k_lo, k_hi))
        return k, 0.0

    grid = np.geomspace(k_lo, k_hi, 200)
    vals = np.array([resid(k) for k in grid])
    idx = np.nonzero((vals[:-1] > 0.0) & (vals[1:] <= 0.0))[0]
    if idx.size == 0:
        raise ValueError(
            "clipped-gain residual has no sign change for K in [%g, %g] W" % (k_lo, k_hi))
    lo, hi = grid[idx[0]], grid[idx[0] + 1]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if resid(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    k = 0.5 * (lo + hi)
    return k, k * u / n0 - 1.0
