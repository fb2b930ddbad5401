"""Channel geometry, primary-user activity, and interference-sum distributions.

All links are Rayleigh, so squared channel magnitudes are exponential with
mean equal to the path-loss gain d**(-alpha) (distances in km, normalised to
a 1 km reference). The aggregate interference seen from L randomly active
primary transmitters is a Bernoulli-thinned sum of non-identical
exponentials: a mixture, over active subsets, of hypoexponential densities
plus a point mass at zero when no transmitter is on.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

# exact subset enumeration only; larger populations need a different method
MAX_POPULATION = 20

# relative gap under which two means are treated as a tie and rejected
DISTINCT_RTOL = 1e-9


def mean_channel_gain(d, alpha):
    """Mean squared channel magnitude of a link of length d km."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError("link distance must be positive")
    return d ** (-alpha)


def _check_distinct(means, label):
    m = np.sort(np.asarray(means, dtype=float))
    if m.size < 2:
        return
    gaps = np.diff(m)
    if np.any(gaps <= DISTINCT_RTOL * m[1:]):
        raise ValueError(
            "%s means are not pairwise distinct at relative tolerance %g; "
            "perturb the geometry instead of relying on tie-breaking" % (label, DISTINCT_RTOL)
        )


@dataclass
class LinkSet:
    """Distances (km) of every link in the network.

    d_pu_relay is indexed [l][i]: primary transmitter l to relay i. The
    secondary-side distances may repeat (identical relays are a valid
    deployment); the primary-side gain families feeding partial-fraction
    expansions must be pairwise distinct per receiver.
    """

    d_src_relay: tuple
    d_relay_dst: tuple
    d_pu_src: tuple
    d_pu_relay: tuple
    d_pu_dst: tuple
    alpha: float = 4.0

    def __post_init__(self):
        self.d_src_relay = tuple(float(d) for d in self.d_src_relay)
        self.d_relay_dst = tuple(float(d) for d in self.d_relay_dst)
        self.d_pu_src = tuple(float(d) for d in self.d_pu_src)
        self.d_pu_relay = tuple(tuple(float(d) for d in row) for row in self.d_pu_relay)
        self.d_pu_dst = tuple(float(d) for d in self.d_pu_dst)
        if not self.d_src_relay or len(self.d_relay_dst) != len(self.d_src_relay):
            raise ValueError("need one source->relay and one relay->destination distance per relay")
        if not self.d_pu_src:
            raise ValueError("need at least one primary transmitter")
        if len(self.d_pu_relay) != len(self.d_pu_src) or len(self.d_pu_dst) != len(self.d_pu_src):
            raise ValueError("primary-side distance lists disagree on the transmitter count")
        for row in self.d_pu_relay:
            if len(row) != len(self.d_src_relay):
                raise ValueError("d_pu_relay rows must have one entry per relay")
        for name, ds in (
            ("d_src_relay", self.d_src_relay),
            ("d_relay_dst", self.d_relay_dst),
            ("d_pu_src", self.d_pu_src),
            ("d_pu_dst", self.d_pu_dst),
        ):
            if any(d <= 0.0 for d in ds):
                raise ValueError("%s distances must be positive" % name)
        if any(d <= 0.0 for row in self.d_pu_relay for d in row):
            raise ValueError("d_pu_relay distances must be positive")
        if not 2.0 <= self.alpha <= 6.0:
            warnings.warn("path-loss exponent %g outside the usual 2..6 range" % self.alpha)
        _check_distinct(self.gain_pu_src(), "primary->source")
        _check_distinct(self.gain_pu_dst(), "primary->destination")
        for i in range(self.n_relays):
            _check_distinct(self.gain_pu_relay(i), "primary->relay %d" % i)

    @property
    def n_relays(self):
        return len(self.d_src_relay)

    @property
    def n_primary(self):
        return len(self.d_pu_src)

    def gain_src_relay(self, i):
        return float(mean_channel_gain(self.d_src_relay[i], self.alpha))

    def gain_relay_dst(self, i):
        return float(mean_channel_gain(self.d_relay_dst[i], self.alpha))

    def gain_pu_src(self):
        return mean_channel_gain(np.array(self.d_pu_src), self.alpha)

    def gain_pu_dst(self):
        return mean_channel_gain(np.array(self.d_pu_dst), self.alpha)

    def gain_pu_relay(self, i):
        return mean_channel_gain(np.array([row[i] for row in self.d_pu_relay]), self.alpha)


@dataclass
class PrimaryModel:
    """Primary network: transmitter count, common transmit power (W), duty cycle."""

    count: int
    tx_power: float
    duty: float

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("need at least one primary transmitter")
        if self.tx_power <= 0.0:
            raise ValueError("primary transmit power must be positive")
        if not 0.0 <= self.duty <= 1.0:
            raise ValueError("duty cycle must lie in [0, 1]")


def active_count_pmf(r, count, duty):
    """Probability that exactly r of `count` independent transmitters are on."""
    if not 0 <= r <= count:
        raise ValueError("active count r must lie in 0..count")
    return math.comb(count, r) * duty**r * (1.0 - duty) ** (count - r)


def partial_fraction_weights(means):
    """Weights w_k of the density of a sum of independent exponentials.

    For pairwise-distinct means m_k the density is
    sum_k w_k * exp(-x/m_k) / m_k with w_k = prod_{j!=k} m_k / (m_k - m_j);
    the weights sum to one.
    """
    m = np.asarray(means, dtype=float)
    if m.size == 1:
        return np.ones(1)
    diff = m[:, None] - m[None, :]
    np.fill_diagonal(diff, 1.0)
    ratios = m[:, None] / diff
    np.fill_diagonal(ratios, 1.0)
    return np.prod(ratios, axis=1)


def activity_mixture(means, duty):
    """Decompose the thinned interference sum into weighted hypoexponential parts.

    Returns (atom, parts) where atom is the probability that nothing is
    active and parts is a list of (prob, sub_means, pf_weights) over the
    non-empty active subsets.
    """
    m = np.asarray(means, dtype=float)
    n = m.size
    if n == 0:
        raise ValueError("need at least one mean")
    if n > MAX_POPULATION:
        raise ValueError("exact subset enumeration capped at %d transmitters" % MAX_POPULATION)
    if np.any(m <= 0.0):
        raise ValueError("means must be positive")
    atom = (1.0 - duty) ** n
    parts = []
    for size in range(1, n + 1):
        p_sub = duty**size * (1.0 - duty) ** (n - size)
        for idx in itertools.combinations(range(n), size):
            sub = m[list(idx)]
            parts.append((p_sub, sub, partial_fraction_weights(sub)))
    return atom, parts


def hypoexp_pdf(x, means, scale=1.0, duty=1.0):
    """Density of the continuous part of the thinned interference sum.

    `means` are the per-transmitter channel gains and `scale` the common
    power-to-noise factor applied to each. Integrates to 1 - (1-duty)**L;
    the missing mass is the all-off atom at zero.
    """
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise ValueError("interference power cannot be negative")
    _, parts = activity_mixture(means, duty)
    out = np.zeros_like(x)
    for prob, sub, w in parts:
        mm = scale * sub
        out += prob * np.sum((w / mm) * np.exp(-x[:, None] / mm), axis=-1)
    return float(out[0]) if scalar else out


def hypoexp_cdf(x, means, scale=1.0, duty=1.0):
    """CDF of the thinned interference sum, including the atom at zero."""
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise ValueError("interference power cannot be negative")
    atom, parts = activity_mixture(means, duty)
    out = np.full_like(x, atom)
    for prob, sub, w in parts:
        mm = scale * sub
        out += prob * (1.0 - np.sum(w * np.exp(-x[:, None] / mm), axis=-1))
    return float(out[0]) if scalar else out


def max_exp_expectation(means):
    """Mean of the maximum of independent exponentials by inclusion-exclusion."""
    m = np.asarray(means, dtype=float)
    if m.size == 0:
        raise ValueError("need at least one mean")
    if m.size > MAX_POPULATION:
        raise ValueError("exact subset enumeration capped at %d terms" % MAX_POPULATION)
    if np.any(m <= 0.0):
        raise ValueError("means must be positive")
    rates = 1.0 / m
    total = 0.0
    for size in range(1, m.size + 1):
        sign = 1.0 if size % 2 == 1 else -1.0
        for idx in itertools.combinations(range(m.size), size):
            total += sign / rates[list(idx)].sum()
    return total


def max_exp_pdf(x, means):
    """Density of the maximum of independent exponentials with the given means."""
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise ValueError("the maximum of exponentials is non-negative")
    m = np.asarray(means, dtype=float)
    if m.size == 0 or np.any(m <= 0.0):
        raise ValueError("means must be a non-empty positive list")
    out = np.zeros_like(x)
    cdfs = 1.0 - np.exp(-x[:, None] / m)
    for j in range(m.size):
        others = np.prod(np.delete(cdfs, j, axis=-1), axis=-1)
        out += (1.0 / m[j]) * np.exp(-x / m[j]) * others
    return float(out[0]) if scalar else out
