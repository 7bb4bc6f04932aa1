"""Classical graph-signal denoisers used as comparison baselines.

bl_denoise: orthogonal projection onto the leading eigenspace
lr_denoise: Laplacian-regularized least squares (I + alpha L)^-1 x
tv_denoise: edge-wise l1 total variation by subgradient descent
med_denoise: repeated graph-median filtering
"""

import numpy as np
import scipy.sparse.linalg

from .errors import SolverConvergenceError
from .signals import graph_median


def bl_denoise(spectrum, x, k):
    """Project ``x`` onto the span of the k leading eigenvectors."""
    if not 1 <= k <= spectrum.n:
        raise ValueError(f"bandwidth {k} outside [1, {spectrum.n}]")
    basis = spectrum.leading(k)
    return basis @ (basis.T @ x)


def laplacian(g, normalized=False):
    """Combinatorial Laplacian D - A, or its symmetric normalization."""
    degrees = g.degrees()
    lap = np.diag(degrees) - g.adjacency
    if normalized:
        scale = 1.0 / np.sqrt(degrees)
        lap = lap * np.outer(scale, scale)
    return lap


def lr_denoise(g, x, alpha, normalized=False, tol=1e-10, max_iter=None):
    """Solve (I + alpha L) z = x by conjugate gradients.

    ``alpha`` >= 0 weights the quadratic Laplacian penalty; the system is
    symmetric positive definite, solved to relative residual ``tol``.
    """
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    x = np.asarray(x, dtype=float)
    if alpha == 0.0:
        return x.copy()
    system = np.eye(g.n_nodes) + alpha * laplacian(g, normalized=normalized)
    if max_iter is None:
        max_iter = 20 * g.n_nodes
    z, info = scipy.sparse.linalg.cg(system, x, rtol=tol, atol=0.0, maxiter=max_iter)
    if info != 0:
        raise SolverConvergenceError(
            f"conjugate gradients stopped with status {info} after {max_iter} iterations"
        )
    return z


def tv_objective(g, x, z, alpha):
    """||x - z||^2 + alpha * sum over edges of w_ij |z_i - z_j|."""
    i, j, w = g.edge_list()
    diff = x - z
    return float(diff @ diff) + alpha * float(w @ np.abs(z[i] - z[j]))


def tv_denoise(g, x, alpha, iters=2000, step=0.5):
    """Approximately minimize the total-variation objective.

    Subgradient descent from z = x with decaying step ``step / sqrt(k)``;
    returns the iterate with the smallest objective, which by construction
    never exceeds the objective at z = x.
    """
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    if iters < 1:
        raise ValueError("at least one iteration is required")
    x = np.asarray(x, dtype=float)
    if alpha == 0.0:
        return x.copy()
    i, j, w = g.edge_list()
    z = x.copy()
    best = z.copy()
    best_objective = tv_objective(g, x, z, alpha)
    for k in range(1, iters + 1):
        signs = np.sign(z[i] - z[j])
        grad = 2.0 * (z - x)
        np.add.at(grad, i, alpha * w * signs)
        np.add.at(grad, j, -alpha * w * signs)
        z -= (step / np.sqrt(k)) * grad
        objective = tv_objective(g, x, z, alpha)
        if objective < best_objective:
            best_objective = objective
            best = z.copy()
    return best


def med_denoise(g, x, passes=1):
    """Apply the graph median ``passes`` times."""
    if passes < 1:
        raise ValueError("at least one pass is required")
    z = np.asarray(x, dtype=float)
    for _ in range(passes):
        z = graph_median(g, z)
    return z
