"""Spectral diagnostics of the untrained architectures.

The fitting dynamics of the two-layer generators are governed by the
eigenspace of the expected squared Jacobian of the network output with
respect to the Gaussian weights. For an operator M (graph filter or
upsampler) with unit-normalized row Gram matrix R, the closed form is

    0.5 * (1 - arccos(R) / pi)  (entrywise)  Hadamard  M M^T,

the Gaussian expectation of step-function outer products scaled by the
operator Gram. This module provides:

expected_sq_jacobian_gcg / expected_sq_jacobian_gdec: the closed form
monte_carlo_sq_jacobian: sampled estimate for the two-layer forms
monte_carlo_deep_jacobian: sampled estimate for deep models
procrustes_align: orthonormal aligner between two eigenbases
eigenvector_similarity: (1/K) || V_K - W_K Q ||_F
BoundInputs / fit_error_bound: the three-term gradient-descent error bound
width_requirement: the (astronomical) feature-count diagnostic
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ZeroRowError
from .graphs import Spectrum, spectral_decomposition
from .models import init_model, output_jacobian, output_jacobian_fd

MC_BLOCK_COLUMNS = 1 << 14


@dataclass(frozen=True)
class SquaredJacobian:
    """Expected squared Jacobian with its eigendecomposition attached."""

    matrix: np.ndarray
    spectrum: Spectrum

    @property
    def eigenvectors(self):
        return self.spectrum.eigenvectors

    @property
    def eigenvalues(self):
        return self.spectrum.eigenvalues


def _closed_form(operator):
    operator = np.asarray(operator, dtype=float)
    gram = operator @ operator.T
    gram = (gram + gram.T) / 2.0
    squared_norms = np.diag(gram)
    zero = np.flatnonzero(squared_norms == 0.0)
    if zero.size:
        raise ZeroRowError(int(zero[0]))
    row_norms = np.sqrt(squared_norms)
    # floating drift can push |cos| marginally past 1; clamp before arccos,
    # and pin the diagonal (a row is exactly aligned with itself)
    cosine = np.clip(gram / np.outer(row_norms, row_norms), -1.0, 1.0)
    np.fill_diagonal(cosine, 1.0)
    matrix = 0.5 * (1.0 - np.arccos(cosine) / np.pi) * gram
    matrix = (matrix + matrix.T) / 2.0
    return SquaredJacobian(matrix=matrix, spectrum=spectral_decomposition(matrix))


def expected_sq_jacobian_gcg(filter_matrix):
    """Closed-form expected squared Jacobian of the two-layer convolutional
    generator with graph filter ``filter_matrix``."""
    return _closed_form(filter_matrix)


def expected_sq_jacobian_gdec(upsampler):
    """Closed-form expected squared Jacobian of the two-layer decoder with
    upsampling operator ``upsampler``."""
    return _closed_form(upsampler)


def monte_carlo_sq_jacobian(kind, operator, n_features, n_samples, seed):
    """Sampled squared Jacobian of a two-layer generator.

    Draws ``n_samples`` weight matrices with ``n_features`` iid
    standard-normal columns, averages the step-function outer products of
    the operator responses, and scales by the operator Gram. Converges to
    the closed form as the sample count grows. Accumulation is blockwise in
    a fixed order, so a fixed seed gives a bitwise reproducible matrix.
    """
    if kind not in ("gcg", "gdec"):
        raise ValueError(f"unknown architecture kind {kind!r}")
    if n_features % 2 != 0:
        raise ValueError("the two-layer forms use an even feature count")
    operator = np.asarray(operator, dtype=float)
    rng = np.random.default_rng(seed)
    n = operator.shape[0]
    total = n_samples * n_features
    accum = np.zeros((n, n))
    remaining = total
    while remaining > 0:
        block = min(remaining, MC_BLOCK_COLUMNS)
        draws = rng.standard_normal((operator.shape[1], block))
        steps = ((operator @ draws) > 0.0).astype(float)
        accum += steps @ steps.T
        remaining -= block
    gram = operator @ operator.T
    return (accum / total) * gram


def monte_carlo_deep_jacobian(model_factory, n_realizations, probe_step=None, seed=None):
    """Average of J J^T over random initializations of a deep model.

    ``model_factory(seed)`` must build one architecture instance; its
    Jacobian rows (one per output node) come from per-output reverse passes,
    or from central finite differences with step ``probe_step`` when that is
    given. Realizations are reduced in index order, so the result depends
    only on the seed.
    """
    children = np.random.SeedSequence(seed).spawn(n_realizations)
    accum = None
    for child in children:
        model = model_factory(child)
        if probe_step is None:
            jac = output_jacobian(model)
        else:
            jac = output_jacobian_fd(model, probe_step)
        outer = jac @ jac.T
        accum = outer if accum is None else accum + outer
    return accum / n_realizations


def two_layer_factory(kind, operator, n_features, init_mode="standard-normal"):
    """Factory of two-layer models over a fixed operator, for the sampled
    deep-Jacobian estimate."""
    model_kind = "gcg2" if kind == "gcg" else "gdec2"

    def build(seed):
        return init_model(model_kind, [operator], [n_features], seed, init_mode=init_mode)

    return build


def procrustes_align(v_k, w_k):
    """Orthonormal Q minimizing || v_k - w_k Q ||_F.

    Both inputs must have orthonormal columns. Q comes from the singular
    decomposition of w_k^T v_k; a rank-deficient cross-product means the
    aligner is not unique, which is reported as a warning while the
    (Frobenius-optimal) alignment is still returned.
    """
    v_k = np.asarray(v_k, dtype=float)
    w_k = np.asarray(w_k, dtype=float)
    if v_k.shape != w_k.shape:
        raise ValueError("bases must have identical shapes")
    k = v_k.shape[1]
    for name, basis in (("v_k", v_k), ("w_k", w_k)):
        gram = basis.T @ basis
        if np.max(np.abs(gram - np.eye(k))) > 1e-6:
            raise ValueError(f"{name} does not have orthonormal columns")
    left, singulars, right_t = np.linalg.svd(w_k.T @ v_k)
    if singulars.size and singulars[-1] <= 1e-12 * max(1.0, singulars[0]):
        warnings.warn(
            "cross-product is rank deficient; the alignment is not unique",
            RuntimeWarning,
            stacklevel=2,
        )
    return left @ right_t


def eigenvector_similarity(v_k, w_k):
    """(1/K) || v_k - w_k Q ||_F with Q the Procrustes aligner.

    Zero for identical (or identically rotated) bases; sqrt(2K)/K for fully
    orthogonal subspaces.
    """
    k = v_k.shape[1]
    q = procrustes_align(v_k, w_k)
    return float(np.linalg.norm(v_k - w_k @ q, "fro")) / k


@dataclass(frozen=True)
class BoundInputs:
    """Inputs of the gradient-descent fit-error bound.

    eigenvalues/eigenvectors describe the expected squared Jacobian;
    ``bandwidth`` is the number of leading components carrying the clean
    signal; ``subspace_error`` bounds the eigenbasis mismatch and
    ``width_tolerance`` the finite-width error. Requires
    step_size * eigenvalues[0]^2 <= 1.
    """

    step_size: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    bandwidth: int
    subspace_error: float
    width_tolerance: float
    clean_signal: np.ndarray
    observed_signal: np.ndarray
    noise: np.ndarray

    def __post_init__(self):
        n = self.eigenvalues.shape[0]
        if not 1 <= self.bandwidth <= n:
            raise ValueError("bandwidth outside [1, N]")
        if self.step_size * self.eigenvalues[0] ** 2 > 1.0 + 1e-12:
            raise ValueError("step size violates step_size * sigma_1^2 <= 1")


class BoundTerms(NamedTuple):
    total: float
    term_signal: float
    term_width: float
    term_noise: float


def fit_error_bound(inputs, epoch):
    """Three-term error bound on || clean - estimate || after ``epoch`` steps.

    term_signal: residual of the not-yet-fitted signal,
        ((1 - eta s_K^2)^t + subspace_error (1 - eta s_N^2)^t) ||x0||
    term_width: width_tolerance * ||x||
    term_noise: sqrt( sum_i ((1 - eta s_i^2)^t - 1)^2 (w_i^T n)^2 )

    term_signal is non-increasing and term_noise non-decreasing in the
    epoch; at epoch 0 they equal (1 + subspace_error) ||x0|| and 0, and for
    eta s_i^2 in (0, 1) they tend to 0 and || W^T n ||.
    """
    decay = (1.0 - inputs.step_size * inputs.eigenvalues**2) ** epoch
    norm0 = float(np.linalg.norm(inputs.clean_signal))
    term_signal = (
        decay[inputs.bandwidth - 1] + inputs.subspace_error * decay[-1]
    ) * norm0
    term_width = inputs.width_tolerance * float(np.linalg.norm(inputs.observed_signal))
    projections = inputs.eigenvectors.T @ inputs.noise
    term_noise = float(np.sqrt(np.sum((decay - 1.0) ** 2 * projections**2)))
    return BoundTerms(
        total=term_signal + term_width + term_noise,
        term_signal=float(term_signal),
        term_width=term_width,
        term_noise=term_noise,
    )


class WidthRequirement(NamedTuple):
    features: float
    log10_features: float


def width_requirement(sigma_max, sigma_min, tolerance, n_nodes):
    """Feature count (sigma_max^2 / sigma_min^2)^26 * tolerance^-8 * N.

    The value is usually astronomically large, so it is computed in logs and
    reported alongside its log10; it is a diagnostic, never enforced.
    """
    if sigma_min <= 0.0:
        raise ValueError("the requirement is undefined for sigma_min <= 0")
    if not 0.0 < tolerance < 1.0:
        raise ValueError("tolerance must lie in (0, 1)")
    log10_features = (
        52.0 * math.log10(sigma_max / sigma_min)
        - 8.0 * math.log10(tolerance)
        + math.log10(n_nodes)
    )
    features = 10.0**log10_features if log10_features < 308 else math.inf
    return WidthRequirement(features=features, log10_features=log10_features)
