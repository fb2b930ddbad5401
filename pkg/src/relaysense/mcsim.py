"""Monte Carlo cross-checks for every closed-form quantity in the package.

Estimates are built from counter-based Philox streams keyed by
(seed, stream, chunk), with per-chunk partial sums reduced in chunk order.
That makes every estimate bit-identical for a given seed no matter how many
worker threads run the chunks, which the validation harness relies on.

The simulators share the analytic layer's power allocations and gain
constants (those are design choices of the network, not outputs being
tested) but draw every random quantity themselves.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .energy_opt import EnergyModel
from .fading import LinkSet, PrimaryModel
from .sensing import SecondaryPolicy, build_report_gain, report_power
from .transmission import build_trans_coeffs

CHUNK = 1 << 16

_MIX_SEED = 0x9E3779B97F4A7C15
_MIX_STREAM = 0xBF58476D1CE4E5B9
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class MCEstimate:
    """A simulation estimate: sample mean, its standard error, and the
    run's size and seed for reproducibility."""

    mean: float
    stderr: float
    trials: int
    seed: int

    def __post_init__(self):
        if self.stderr < 0.0 or not math.isfinite(self.stderr):
            raise ValueError("standard error must be finite and non-negative")
        if self.trials < 1:
            raise ValueError("need at least one trial")

    def z_score(self, reference: float) -> float:
        """Standardised distance to a reference value (inf if degenerate).

        The chunked reduction only resolves the mean to a few ulps, so
        differences inside that resolution count as an exact match; this is
        what keeps saturated regimes (constant samples, zero stderr) from
        reading as disagreement."""
        diff = self.mean - reference
        scale = max(abs(self.mean), abs(reference))
        if abs(diff) <= 16.0 * math.ulp(scale):
            return 0.0
        if self.stderr == 0.0:
            return math.inf
        return diff / self.stderr


def _key(seed: int, stream: int, chunk: int) -> int:
    hi = (int(seed) * _MIX_SEED + int(stream) * _MIX_STREAM) & _MASK64
    return (hi << 64) | (int(chunk) & _MASK64)


def _chunk_rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=_key(seed, stream, chunk)))


def _reduce_mean(sampler, trials: int, seed: int, stream: int = 0, workers: int = 1):
    """Mean and standard error of sampler(rng, n) over `trials` draws."""
    trials = int(trials)
    if trials < 2:
        raise ValueError("need at least two trials")
    n_chunks = (trials + CHUNK - 1) // CHUNK

    def one(ci):
        n = min(CHUNK, trials - ci * CHUNK)
        v = np.asarray(sampler(_chunk_rng(seed, stream, ci), n), dtype=float)
        return float(v.sum()), float(np.dot(v, v))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(one, range(n_chunks)))
    else:
        partials = [one(ci) for ci in range(n_chunks)]
    total = 0.0
    sumsq = 0.0
    for s, s2 in partials:
        total += s
        sumsq += s2
    mean = total / trials
    var = max(sumsq - trials * mean * mean, 0.0) / (trials - 1)
    return mean, math.sqrt(var / trials)


def _reduce_ratio(sampler, trials: int, seed: int, stream: int = 0, workers: int = 1):
    """Ratio-of-means estimate for sampler(rng, n) -> (num, den) with a
    delta-method standard error."""
    trials = int(trials)
    if trials < 2:
        raise ValueError("need at least two trials")
    n_chunks = (trials + CHUNK - 1) // CHUNK

    def one(ci):
        n = min(CHUNK, trials - ci * CHUNK)
        c, h = sampler(_chunk_rng(seed, stream, ci), n)
        c = np.asarray(c, dtype=float)
        h = np.asarray(h, dtype=float)
        return (float(c.sum()), float(h.sum()), float(np.dot(c, c)),
                float(np.dot(h, h)), float(np.dot(c, h)))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(one, range(n_chunks)))
    else:
        partials = [one(ci) for ci in range(n_chunks)]
    sc = sh = scc = shh = sch = 0.0
    for a, b, aa, bb, ab in partials:
        sc += a
        sh += b
        scc += aa
        shh += bb
        sch += ab
    n = trials
    cbar, hbar = sc / n, sh / n
    if hbar == 0.0:
        raise ZeroDivisionError("ratio denominator averaged to zero")
    var_c = max(scc - n * cbar * cbar, 0.0) / (n - 1)
    var_h = max(shh - n * hbar * hbar, 0.0) / (n - 1)
    cov = (sch - n * cbar * hbar) / (n - 1)
    r = cbar / hbar
    var_r = max(var_c - 2.0 * r * cov + r * r * var_h, 0.0) / (n * hbar * hbar)
    return r, math.sqrt(var_r)


# --- detection ------------------------------------------------------------

def _sample_exceed_sampler(links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy,
                           lam_norm: float, report=None, powers=None):
    if report is None:
        report = build_report_gain(links, primary, policy)
    if powers is None:
        powers = [report_power(links, primary, policy, i) for i in range(links.n_relays)]
    mix_scale = primary.tx_power / policy.noise_power
    g_dst = links.gain_pu_dst()
    g_rel = [links.gain_pu_relay(i) for i in range(links.n_relays)]
    b = [powers[i] * links.gain_relay_dst(i) / policy.noise_power
         for i in range(links.n_relays)]
    u = report.u_report
    duty = primary.duty
    n_pu = links.n_primary

    def sampler(rng, n):
        theta = rng.random((n, n_pu)) < duty
        draws = rng.exponential(1.0, (n, n_pu)) * g_dst
        exceed = mix_scale * np.sum(theta * draws, axis=1) > lam_norm
        for i in range(links.n_relays):
            theta_i = rng.random((n, n_pu)) < duty
            draws_i = rng.exponential(1.0, (n, n_pu)) * g_rel[i]
            first = mix_scale * np.sum(theta_i * draws_i, axis=1)
            second = rng.exponential(b[i], n)
            e2e = first * second / (second + u[i])
            exceed |= e2e > lam_norm
        return exceed.astype(float)

    return sampler


def mc_detection(links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy,
                 lam: float, n_samples: float, trials: int, seed: int,
                 workers: int = 1, report=None, powers=None) -> MCEstimate:
    """Simulated frame detection probability.

    Draws single observation rounds (every path sees fresh activity and
    fading, as the closed form assumes) and raises the per-sample hit rate
    to the frame level through the OR rule, with the matching delta-method
    standard error.
    """
    sampler = _sample_exceed_sampler(links, primary, policy,
                                     lam / policy.noise_power, report, powers)
    p_hit, se = _reduce_mean(sampler, trials, seed, stream=0, workers=workers)
    p_hit = min(max(p_hit, 0.0), 1.0)
    if p_hit == 0.0:
        # no hits at all: quote the one-count scale, not a zero error bar
        se = 1.0 / trials
    miss = 1.0 - p_hit
    mean = 1.0 - miss**n_samples
    se_frame = n_samples * miss ** (n_samples - 1.0) * se if miss > 0.0 else 0.0
    return MCEstimate(mean=mean, stderr=se_frame, trials=int(trials), seed=int(seed))


# --- transmission ---------------------------------------------------------

def _pair_exponentials(rng, n, m, rho):
    """Correlated (estimate, truth) exponential pairs with common means m:
    the underlying complex Gaussians satisfy est = rho*h + sqrt(1-rho^2)*w."""
    k = m.size
    hr = rng.standard_normal((n, k))
    hi = rng.standard_normal((n, k))
    wr = rng.standard_normal((n, k))
    wi = rng.standard_normal((n, k))
    mix = math.sqrt(max(1.0 - rho * rho, 0.0))
    er = rho * hr + mix * wr
    ei = rho * hi + mix * wi
    true = 0.5 * (hr * hr + hi * hi) * m
    est = 0.5 * (er * er + ei * ei) * m
    return est, true


def mc_outage(links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy,
              gamma_th: float, p_detect: float, rho: float, trials: int,
              seed: int, workers: int = 1, coeffs=None) -> MCEstimate:
    """Simulated outage probability of best-estimate relay selection with
    outdated CSI. gamma_th is the absolute threshold in watts."""
    if coeffs is None:
        coeffs = build_trans_coeffs(links, primary, policy, p_detect)
    m = np.asarray(coeffs.snr_means, dtype=float)
    a = np.array([coeffs.p_src * links.gain_src_relay(i) / policy.noise_power
                  for i in range(links.n_relays)])
    u = np.asarray(coeffs.u_trans, dtype=float)
    x = gamma_th / policy.noise_power

    def sampler(rng, n):
        est, true = _pair_exponentials(rng, n, m, rho)
        sel = np.argmax(est, axis=1)
        rows = np.arange(n)
        second = true[rows, sel]
        first = rng.exponential(1.0, n) * a[sel]
        e2e = first * second / (second + u[sel])
        return (e2e <= x).astype(float)

    mean, se = _reduce_mean(sampler, trials, seed, stream=3, workers=workers)
    if mean in (0.0, 1.0):
        # all-or-nothing outcome: one-count floor keeps z-tests meaningful
        se = max(se, 1.0 / trials)
    return MCEstimate(mean=mean, stderr=se, trials=int(trials), seed=int(seed))


# --- harvesting -----------------------------------------------------------

def _harvest_power_sampler(links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy,
                           i: int):
    g = links.gain_pu_relay(i)
    duty = primary.duty
    n_pu = links.n_primary
    eta_pp = policy.eta * primary.tx_power

    def sampler(rng, n):
        theta = rng.random((n, n_pu)) < duty
        draws = rng.exponential(1.0, (n, n_pu)) * g
        return eta_pp * np.sum(theta * draws * g, axis=1)

    return sampler


def mc_harvest(links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy,
               i: int, p_detect: float, trials: int, seed: int,
               workers: int = 1) -> MCEstimate:
    """Simulated usable harvested power of relay i: raw harvested RF power
    scaled by the probability the frame banks it."""
    if not 0.0 <= p_detect <= 1.0:
        raise ValueError("detection probability must lie in [0, 1]")
    base = _harvest_power_sampler(links, primary, policy, i)

    def sampler(rng, n):
        return p_detect * base(rng, n)

    mean, se = _reduce_mean(sampler, trials, seed, stream=5, workers=workers)
    return MCEstimate(mean=mean, stderr=se, trials=int(trials), seed=int(seed))


# --- amplifier saturation -------------------------------------------------

def mc_clipped_gain(links: LinkSet, primary: PrimaryModel, policy: SecondaryPolicy,
                    i: int, threshold_t: float, u: float, trials: int, seed: int,
                    workers: int = 1) -> MCEstimate:
    """Simulated mean squared gain of the clipped amplifier at relay i."""
    mix_scale = primary.tx_power / policy.noise_power
    g = links.gain_pu_relay(i)
    duty = primary.duty
    n_pu = links.n_primary

    def sampler(rng, n):
        theta = rng.random((n, n_pu)) < duty
        draws = rng.exponential(1.0, (n, n_pu)) * g
        lvl = mix_scale * np.sum(theta * draws, axis=1)
        return np.where(lvl <= threshold_t, 1.0 / u, 1.0 / (lvl + 1.0))

    mean, se = _reduce_mean(sampler, trials, seed, stream=7, workers=workers)
    return MCEstimate(mean=mean, stderr=se, trials=int(trials), seed=int(seed))


# --- frame energy ---------------------------------------------------------

def _detect_prob_hat(model: EnergyModel, n_samples: float, trials: int, seed: int,
                     workers: int):
    sampler = _sample_exceed_sampler(
        model.links, model.primary, model.policy,
        model.policy.threshold / model.policy.noise_power,
        report=model.report, powers=list(model.p_report))
    p_hit, se = _reduce_mean(sampler, trials, seed, stream=11, workers=workers)
    p_hit = min(max(p_hit, 0.0), 1.0)
    miss = 1.0 - p_hit
    p_det = 1.0 - miss**n_samples
    se_det = n_samples * miss ** (n_samples - 1.0) * se if miss > 0.0 else 0.0
    return p_det, se_det


def mc_frame_energy(model: EnergyModel, i: int, t_sense: float, trials: int,
                    seed: int, workers: int = 1, harvesting: bool = True) -> MCEstimate:
    """Simulated expected frame energy of relay i at sensing time t_sense.

    Detection is estimated from single-sample draws and applied at the
    frame level; detected frames bank a fresh harvest draw, missed frames
    pay the transmit slot of whichever relay wins selection. The standard
    error folds the detection-estimate uncertainty in quadrature.
    """
    model._check_t(t_sense)
    w = model.policy.bandwidth
    n_samples = max(round(t_sense * w), 1)
    t_data = model.t_listen - t_sense
    p_det_hat, se_det = _detect_prob_hat(model, n_samples, trials, seed, workers)

    coeffs = model.trans_coeffs(t_sense)
    m = np.asarray(coeffs.snr_means, dtype=float)
    e_t = coeffs.p_relay[i] + model.policy.p_circuit_tx
    base = (model.e_sense * t_sense * t_sense * w
            + model.e_report[i] * model.t_report * t_sense * w)
    harv = _harvest_power_sampler(model.links, model.primary, model.policy, i)

    def sampler(rng, n):
        u01 = rng.random(n)
        p_h = harv(rng, n)
        est = rng.exponential(1.0, (n, m.size)) * m
        sel = np.argmax(est, axis=1)
        detected = u01 < p_det_hat
        val = np.full(n, base)
        if harvesting:
            val[detected] -= p_h[detected] * t_data
        val[(~detected) & (sel == i)] += e_t * t_data
        return val

    mean, se = _reduce_mean(sampler, trials, seed, stream=13, workers=workers)
    prr = model.selection_prob(i, t_sense)
    sens = t_data * (prr * e_t + (model.harvest_mean[i] if harvesting else 0.0))
    se_total = math.sqrt(se * se + (sens * se_det) ** 2)
    return MCEstimate(mean=mean, stderr=se_total, trials=int(trials), seed=int(seed))


def mc_ecg(model: EnergyModel, i: int, t_sense: float, trials: int, seed: int,
           workers: int = 1) -> MCEstimate:
    """Simulated consumed-to-harvested ratio at the frame level for relay i."""
    model._check_t(t_sense)
    w = model.policy.bandwidth
    n_samples = max(round(t_sense * w), 1)
    t_data = model.t_listen - t_sense
    p_det_hat, _ = _detect_prob_hat(model, n_samples, trials, seed, workers)
    if p_det_hat == 0.0:
        raise ZeroDivisionError("no detections in simulation: ratio is infinite")

    coeffs = model.trans_coeffs(t_sense)
    m = np.asarray(coeffs.snr_means, dtype=float)
    e_t = coeffs.p_relay[i] + model.policy.p_circuit_tx
    listen = (model.e_sense * t_sense
              + model.e_report[i] * model.t_report * t_sense * w)
    harv = _harvest_power_sampler(model.links, model.primary, model.policy, i)

    def sampler(rng, n):
        u01 = rng.random(n)
        p_h = harv(rng, n)
        est = rng.exponential(1.0, (n, m.size)) * m
        sel = np.argmax(est, axis=1)
        detected = u01 < p_det_hat
        consumed = np.full(n, listen)
        consumed[(~detected) & (sel == i)] += e_t * t_data
        harvested = np.where(detected, p_h * t_data, 0.0)
        return consumed, harvested

    mean, se = _reduce_ratio(sampler, trials, seed, stream=17, workers=workers)
    return MCEstimate(mean=mean, stderr=se, trials=int(trials), seed=int(seed))
