"""Graph containers, spectral machinery, and random-graph generators.

Graph: dense symmetric weighted adjacency with validation
normalize_adjacency: symmetric degree normalization D^{-1/2} A D^{-1/2}
Spectrum / spectral_decomposition: ordered eigenbasis of a symmetric matrix
graph_filter: polynomial of the normalized adjacency
gft / inverse_gft: projection onto / back from the eigenvector basis
SbmModel / sample_sbm: planted-community random graphs
sample_graph: caveman, regular, small-world and power-law cluster graphs
is_connected: connectivity check on a dense adjacency

All randomized constructors take a ``seed`` accepted by
``numpy.random.default_rng`` and are bitwise reproducible for a fixed seed.
"""

from dataclasses import dataclass

import networkx as nx
import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from .errors import (
    DisconnectedAfterRetriesError,
    IsolatedNodeError,
    NotSymmetricError,
)

SYMMETRY_TOL = 1e-10
SIGN_TOL = 1e-10  # entries below this are skipped by the eigenvector sign rule
CONNECTIVITY_RETRIES = 100


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph on ``n_nodes`` nodes.

    The adjacency must be exactly symmetric, with zero diagonal and
    nonnegative weights; violations raise ``ValueError`` at construction.
    """

    n_nodes: int
    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=float)
        object.__setattr__(self, "adjacency", adj)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        if adj.shape[0] != self.n_nodes:
            raise ValueError(
                f"n_nodes={self.n_nodes} does not match adjacency of size {adj.shape[0]}"
            )
        if self.n_nodes < 1:
            raise ValueError("graph needs at least one node")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be exactly symmetric")
        if np.any(np.diag(adj) != 0.0):
            raise ValueError("adjacency diagonal must be zero")
        if np.any(adj < 0.0):
            raise ValueError("adjacency weights must be nonnegative")

    @classmethod
    def from_adjacency(cls, adjacency):
        adjacency = np.asarray(adjacency, dtype=float)
        return cls(adjacency.shape[0], adjacency)

    def degrees(self):
        """Weighted degree of every node."""
        return self.adjacency.sum(axis=1)

    def neighbor_lists(self):
        """Index array of neighbors for each node (edges with weight > 0)."""
        return [np.flatnonzero(self.adjacency[i] > 0.0) for i in range(self.n_nodes)]

    def edge_list(self):
        """Arrays (i, j, w) over undirected edges with i < j."""
        i, j = np.nonzero(np.triu(self.adjacency, k=1))
        return i, j, self.adjacency[i, j]


def is_connected(adjacency):
    """Whether the graph with the given dense adjacency is connected."""
    sparse = scipy.sparse.csr_matrix(adjacency > 0.0)
    n_components = scipy.sparse.csgraph.connected_components(
        sparse, directed=False, return_labels=False
    )
    return n_components == 1


def normalize_adjacency(g):
    """Symmetric degree normalization D^{-1/2} A D^{-1/2} of ``g``.

    The result is exactly symmetric with spectrum inside [-1, 1].
    Raises ``IsolatedNodeError`` when some node has zero degree.
    """
    degrees = g.degrees()
    zero = np.flatnonzero(degrees == 0.0)
    if zero.size:
        raise IsolatedNodeError(int(zero[0]))
    scale = 1.0 / np.sqrt(degrees)
    return g.adjacency * np.outer(scale, scale)


@dataclass(frozen=True)
class Spectrum:
    """Eigenbasis of a symmetric matrix.

    ``eigenvectors`` holds orthonormal columns; ``eigenvalues`` is sorted in
    descending order. The sign of each eigenvector is fixed so that its first
    entry with magnitude above ``SIGN_TOL`` is positive, which makes repeated
    decompositions of the same matrix identical.
    """

    eigenvectors: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    def leading(self, k):
        """The k columns associated with the largest eigenvalues."""
        return self.eigenvectors[:, :k]


def spectral_decomposition(matrix, tol=SYMMETRY_TOL):
    """Eigendecomposition of a symmetric matrix with descending eigenvalues.

    Raises ``NotSymmetricError`` if the asymmetry exceeds ``tol``.
    """
    matrix = np.asarray(matrix, dtype=float)
    asym = np.max(np.abs(matrix - matrix.T)) if matrix.size else 0.0
    if asym > tol:
        raise NotSymmetricError(f"asymmetry {asym:.3e} exceeds tolerance {tol:.0e}")
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]
    for col in range(eigenvectors.shape[1]):
        v = eigenvectors[:, col]
        lead = np.flatnonzero(np.abs(v) > SIGN_TOL)
        if lead.size and v[lead[0]] < 0.0:
            eigenvectors[:, col] = -v
    return Spectrum(eigenvectors=eigenvectors, eigenvalues=eigenvalues)


def graph_filter(adjacency, coeffs):
    """Polynomial sum_m coeffs[m] * adjacency^m evaluated by Horner's rule.

    ``adjacency`` is typically the normalized adjacency; the number of
    coefficients may not exceed the node count. The result is symmetrized to
    remove the tiny rounding asymmetry of repeated matrix products.
    """
    adjacency = np.asarray(adjacency, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    n = adjacency.shape[0]
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise ValueError("coeffs must be a nonempty vector")
    if coeffs.size > n:
        raise ValueError(f"filter order {coeffs.size} exceeds node count {n}")
    h = np.eye(n) * coeffs[-1]
    for c in coeffs[-2::-1]:
        h = h @ adjacency
        h[np.diag_indices(n)] += c
    return (h + h.T) / 2.0


def gft(spectrum, x):
    """Frequency representation of ``x`` in the eigenvector basis."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spectrum.n,):
        raise ValueError(f"signal of length {x.shape} does not match n={spectrum.n}")
    return spectrum.eigenvectors.T @ x


def inverse_gft(spectrum, x_hat):
    """Signal whose frequency representation is ``x_hat``."""
    x_hat = np.asarray(x_hat, dtype=float)
    if x_hat.shape != (spectrum.n,):
        raise ValueError(f"vector of length {x_hat.shape} does not match n={spectrum.n}")
    return spectrum.eigenvectors @ x_hat


@dataclass(frozen=True)
class SbmModel:
    """Stochastic block model with per-pair link probabilities.

    ``assignments[i]`` is the community of node i; ``link_probabilities`` is
    the symmetric K x K matrix of Bernoulli edge probabilities.
    """

    n_nodes: int
    assignments: np.ndarray
    link_probabilities: np.ndarray

    def __post_init__(self):
        assignments = np.asarray(self.assignments, dtype=int)
        probs = np.asarray(self.link_probabilities, dtype=float)
        object.__setattr__(self, "assignments", assignments)
        object.__setattr__(self, "link_probabilities", probs)
        if assignments.shape != (self.n_nodes,):
            raise ValueError("one community assignment per node is required")
        k = probs.shape[0]
        if probs.shape != (k, k) or not np.allclose(probs, probs.T):
            raise ValueError("link probabilities must be a symmetric square matrix")
        if np.any(probs < 0.0) or np.any(probs > 1.0):
            raise ValueError("link probabilities must lie in [0, 1]")
        counts = np.bincount(assignments, minlength=k)
        if assignments.min() < 0 or assignments.max() >= k or np.any(counts == 0):
            raise ValueError("every community must be a nonempty block 0..K-1")

    @property
    def k_communities(self):
        return self.link_probabilities.shape[0]

    @classmethod
    def balanced(cls, n_nodes, k_communities, p_in, p_out):
        """Model with contiguous communities of (near) equal size."""
        sizes = np.full(k_communities, n_nodes // k_communities)
        sizes[: n_nodes % k_communities] += 1
        assignments = np.repeat(np.arange(k_communities), sizes)
        probs = np.full((k_communities, k_communities), float(p_out))
        np.fill_diagonal(probs, float(p_in))
        return cls(n_nodes, assignments, probs)

    def indicator_matrix(self):
        """One-hot node-to-community matrix B."""
        b = np.zeros((self.n_nodes, self.k_communities))
        b[np.arange(self.n_nodes), self.assignments] = 1.0
        return b

    def expected_adjacency(self):
        """B Omega B^T with zeroed diagonal."""
        b = self.indicator_matrix()
        expected = b @ self.link_probabilities @ b.T
        np.fill_diagonal(expected, 0.0)
        return expected


def sample_sbm(model, seed, max_retries=CONNECTIVITY_RETRIES):
    """Draw a connected graph from ``model``.

    Every upper-triangular entry is an independent Bernoulli draw with the
    probability of its community pair; disconnected draws are resampled up to
    ``max_retries`` times before ``DisconnectedAfterRetriesError`` is raised.
    """
    rng = np.random.default_rng(seed)
    n = model.n_nodes
    probs = model.link_probabilities[model.assignments[:, None], model.assignments[None, :]]
    iu = np.triu_indices(n, k=1)
    upper_probs = probs[iu]
    for _ in range(max_retries):
        adjacency = np.zeros((n, n))
        adjacency[iu] = (rng.random(upper_probs.size) < upper_probs).astype(float)
        adjacency = adjacency + adjacency.T
        if is_connected(adjacency):
            return Graph(n, adjacency)
    raise DisconnectedAfterRetriesError(max_retries)


GRAPH_FAMILIES = ("sbm", "caveman", "regular", "small_world", "powerlaw_cluster")


def sample_graph(family, params, seed, max_retries=CONNECTIVITY_RETRIES):
    """Draw a connected graph from one of the standard random families.

    family / params:
      "sbm":              n, communities, p_in, p_out
      "caveman":          cliques, clique_size   (one edge per clique rewired
                          to the next clique, so the result is connected)
      "regular":          n, degree              (uniform random d-regular)
      "small_world":      n, neighbors, rewire_prob
      "powerlaw_cluster": n, attach_edges, triangle_prob
    """
    if family == "sbm":
        model = SbmModel.balanced(
            params["n"], params["communities"], params["p_in"], params["p_out"]
        )
        return sample_sbm(model, seed, max_retries=max_retries)

    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = sequence.generate_state(max_retries)
    for attempt in range(max_retries):
        nx_seed = int(seeds[attempt])
        if family == "caveman":
            graph = nx.connected_caveman_graph(params["cliques"], params["clique_size"])
        elif family == "regular":
            graph = nx.random_regular_graph(params["degree"], params["n"], seed=nx_seed)
        elif family == "small_world":
            graph = nx.watts_strogatz_graph(
                params["n"], params["neighbors"], params["rewire_prob"], seed=nx_seed
            )
        elif family == "powerlaw_cluster":
            graph = nx.powerlaw_cluster_graph(
                params["n"], params["attach_edges"], params["triangle_prob"], seed=nx_seed
            )
        else:
            raise ValueError(f"unknown graph family {family!r}")
        adjacency = nx.to_numpy_array(graph, nodelist=sorted(graph.nodes()), dtype=float)
        if is_connected(adjacency):
            return Graph.from_adjacency(adjacency)
    raise DisconnectedAfterRetriesError(max_retries)
