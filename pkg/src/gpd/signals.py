"""Graph-signal synthesis, noise injection, and error metrics.

piecewise_constant_signal: one value per planted community
bandlimited_signal: signal spanned by the leading eigenvectors
random_signal: iid standard-normal vector
graph_median: per-node median over the closed neighborhood
diffused_white_signal: graph-median of low-pass filtered white noise
NoiseSpec / add_noise: power-normalized or label-flipping perturbations
nmse, error_rate: reconstruction metrics
"""

from dataclasses import dataclass

import numpy as np

from .errors import ZeroSignalError
from .graphs import graph_filter, normalize_adjacency

SPECTRAL_SUPPORT_TOL = 1e-10


def piecewise_constant_signal(assignments):
    """Signal whose value at each node is its community label.

    Labels are 1-based so that no community is an all-zero block.
    """
    return np.asarray(assignments, dtype=float) + 1.0


def bandlimited_signal(spectrum, k, freq_coeffs):
    """Signal with the k leading frequency components ``freq_coeffs``.

    Its frequency representation is zero (below ``SPECTRAL_SUPPORT_TOL``)
    beyond index k.
    """
    if not 1 <= k <= spectrum.n:
        raise ValueError(f"bandwidth {k} outside [1, {spectrum.n}]")
    freq_coeffs = np.asarray(freq_coeffs, dtype=float)
    if freq_coeffs.shape != (k,):
        raise ValueError(f"expected {k} frequency coefficients, got {freq_coeffs.shape}")
    return spectrum.leading(k) @ freq_coeffs


def random_signal(n_nodes, seed):
    """iid standard-normal signal."""
    return np.random.default_rng(seed).standard_normal(n_nodes)


def graph_median(g, x):
    """Median of ``x`` over each node's closed neighborhood.

    The neighborhood of node i is {i} plus all nodes with a positive edge to
    i; even-sized neighborhoods take the midpoint of the two middle values.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for i, neighbors in enumerate(g.neighbor_lists()):
        out[i] = np.median(np.append(x[neighbors], x[i]))
    return out


def random_lowpass_coeffs(order, seed):
    """Nonnegative filter coefficients with unit l1 norm, drawn uniformly."""
    raw = np.random.default_rng(seed).random(order)
    return raw / raw.sum()


def diffused_white_signal(g, filter_coeffs=None, seed=None):
    """Graph-median of a low-pass filtered white vector.

    A white standard-normal vector is diffused by a low-pass polynomial of
    the normalized adjacency and passed through ``graph_median``. When
    ``filter_coeffs`` is None, three coefficients are drawn uniformly on
    [0, 1] and l1-normalized (drawn before the white vector, so a fixed seed
    pins both).
    """
    rng = np.random.default_rng(seed)
    if filter_coeffs is None:
        raw = rng.random(3)
        filter_coeffs = raw / raw.sum()
    filter_coeffs = np.asarray(filter_coeffs, dtype=float)
    if filter_coeffs.size == 1:
        # order-0 filter never touches the adjacency (covers edgeless graphs)
        h = filter_coeffs[0] * np.eye(g.n_nodes)
    else:
        h = graph_filter(normalize_adjacency(g), filter_coeffs)
    white = rng.standard_normal(g.n_nodes)
    return graph_median(g, h @ white)


@dataclass(frozen=True)
class NoiseSpec:
    """How an observation is perturbed.

    distribution: "gaussian" | "uniform" | "bernoulli-flip"
    power: target of ||n||^2 / ||x0||^2 for gaussian/uniform noise
    flip_fraction: fraction of binary entries flipped for bernoulli-flip
    """

    distribution: str
    power: float | None = None
    flip_fraction: float | None = None

    def __post_init__(self):
        if self.distribution in ("gaussian", "uniform"):
            if self.power is None or self.power < 0.0:
                raise ValueError("gaussian/uniform noise needs power >= 0")
        elif self.distribution == "bernoulli-flip":
            if self.flip_fraction is None or not 0.0 <= self.flip_fraction <= 1.0:
                raise ValueError("bernoulli-flip needs flip_fraction in [0, 1]")
        else:
            raise ValueError(f"unknown noise distribution {self.distribution!r}")


def add_noise(x0, spec, seed):
    """Perturbed observation and the noise realization, as (x, n).

    Gaussian and uniform noise is rescaled so that ||n||^2 / ||x0||^2 equals
    ``spec.power`` exactly; this requires a nonzero reference signal.
    Bernoulli-flip flips exactly round(flip_fraction * N) entries of a binary
    signal, chosen without replacement.
    """
    x0 = np.asarray(x0, dtype=float)
    rng = np.random.default_rng(seed)
    n_nodes = x0.shape[0]

    if spec.distribution == "bernoulli-flip":
        if not np.all(np.isin(x0, (0.0, 1.0))):
            raise ValueError("bernoulli-flip requires a binary reference signal")
        n_flips = int(round(spec.flip_fraction * n_nodes))
        flipped = x0.copy()
        idx = rng.choice(n_nodes, size=n_flips, replace=False)
        flipped[idx] = 1.0 - flipped[idx]
        return flipped, flipped - x0

    norm0 = np.linalg.norm(x0)
    if norm0 == 0.0:
        raise ZeroSignalError("power-normalized noise needs a nonzero signal")
    if spec.power == 0.0:
        noise = np.zeros(n_nodes)
        return x0.copy(), noise
    if spec.distribution == "gaussian":
        raw = rng.standard_normal(n_nodes)
    else:
        raw = rng.random(n_nodes)
    noise = raw * (np.sqrt(spec.power) * norm0 / np.linalg.norm(raw))
    return x0 + noise, noise


def nmse(x0, estimate):
    """||x0 - estimate||^2 / ||x0||^2."""
    x0 = np.asarray(x0, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    if x0.shape != estimate.shape:
        raise ValueError("signals must have equal length")
    denom = float(x0 @ x0)
    if denom == 0.0:
        raise ZeroSignalError("nmse is undefined for a zero reference")
    diff = x0 - estimate
    return float(diff @ diff) / denom


def error_rate(x0, estimate):
    """Fraction of binary labels recovered incorrectly.

    The estimate is thresholded at 0.5 (values >= 0.5 count as label 1)
    before comparison with the binary reference.
    """
    x0 = np.asarray(x0, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    if x0.shape != estimate.shape:
        raise ValueError("signals must have equal length")
    if not np.all(np.isin(x0, (0.0, 1.0))):
        raise ValueError("reference signal must be binary")
    labels = (estimate >= 0.5).astype(float)
    return float(np.mean(labels != x0))
