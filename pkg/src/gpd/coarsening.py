"""Hierarchical graph coarsening and upsampling operators.

build_dendrogram: average-linkage clustering on hop distances
cut_dendrogram: partition with a requested number of clusters
cut_hierarchy: nested memberships for a chain of layer sizes
coarse_adjacency: normalized cluster-level adjacency
upsampling_operator: parent copy blended with a one-hop average
build_hierarchy / CoarseningHierarchy: the full per-layer stack
save_hierarchy: JSON export of sizes, assignments and the blend constant

Everything here is deterministic: clustering ties are broken by the smallest
(cluster id, cluster id) pair, and cluster labels at every layer are ordered
by each cluster's smallest original node.
"""

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from .errors import IsolatedClusterError
from .graphs import Graph, is_connected, normalize_adjacency


@dataclass(frozen=True)
class Dendrogram:
    """Merge tree over ``n_leaves`` singleton clusters.

    ``merges`` holds ``n_leaves - 1`` triples (a, b, height): clusters ``a``
    and ``b`` (original nodes are 0..N-1, merged clusters N, N+1, ...) join
    at dissimilarity ``height``. Heights are non-decreasing.
    """

    n_leaves: int
    merges: tuple

    def __post_init__(self):
        if len(self.merges) != self.n_leaves - 1:
            raise ValueError("a binary dendrogram has exactly N-1 merges")
        heights = [m[2] for m in self.merges]
        if any(b < a for a, b in zip(heights, heights[1:])):
            raise ValueError("merge heights must be non-decreasing")


def hop_distances(g):
    """Unweighted shortest-path distances between all node pairs."""
    sparse = scipy.sparse.csr_matrix(g.adjacency > 0.0)
    dist = scipy.sparse.csgraph.shortest_path(sparse, method="D", unweighted=True)
    return dist


def build_dendrogram(g):
    """Average-linkage dendrogram of ``g`` under hop-distance dissimilarity.

    Requires a connected graph. When several pairs are at the minimum
    dissimilarity, the smallest (id_a, id_b) pair merges first, so the result
    depends only on the graph.
    """
    if not is_connected(g.adjacency):
        raise ValueError("dendrogram construction needs a connected graph")
    n = g.n_nodes
    total = 2 * n - 1
    # dist[i, j] = average-linkage dissimilarity between active clusters i, j
    dist = np.full((total, total), np.inf)
    dist[:n, :n] = hop_distances(g)
    np.fill_diagonal(dist, np.inf)
    active = np.zeros(total, dtype=bool)
    active[:n] = True
    sizes = np.zeros(total, dtype=int)
    sizes[:n] = 1

    merges = []
    for step in range(n - 1):
        sub = dist[np.ix_(active, active)]
        ids = np.flatnonzero(active)
        minimum = np.min(sub)
        # row-major scan of exact ties yields the smallest (id_a, id_b) pair
        tie_rows, tie_cols = np.nonzero(sub == minimum)
        a, b = ids[tie_rows[0]], ids[tie_cols[0]]
        if a > b:
            a, b = b, a
        new = n + step
        others = ids[(ids != a) & (ids != b)]
        merged = (sizes[a] * dist[a, others] + sizes[b] * dist[b, others]) / (
            sizes[a] + sizes[b]
        )
        dist[new, others] = merged
        dist[others, new] = merged
        sizes[new] = sizes[a] + sizes[b]
        active[[a, b]] = False
        active[new] = True
        merges.append((int(a), int(b), float(minimum)))
    return Dendrogram(n_leaves=n, merges=tuple(merges))


def cut_dendrogram(dendrogram, n_clusters):
    """Node-to-cluster assignment with exactly ``n_clusters`` clusters.

    The partition is the state after the first N - n_clusters merges; labels
    are 0..n_clusters-1 ordered by each cluster's smallest member.
    """
    n = dendrogram.n_leaves
    if not 1 <= n_clusters <= n:
        raise ValueError(f"cluster count {n_clusters} outside [1, {n}]")
    parent = {}
    for step, (a, b, _) in enumerate(dendrogram.merges[: n - n_clusters]):
        parent[a] = n + step
        parent[b] = n + step
    roots = np.arange(n)
    for i in range(n):
        r = i
        while r in parent:
            r = parent[r]
        roots[i] = r
    members = {}
    for i, r in enumerate(roots):
        members.setdefault(r, []).append(i)
    ordered = sorted(members.values(), key=lambda nodes: nodes[0])
    assignment = np.empty(n, dtype=int)
    for label, nodes in enumerate(ordered):
        assignment[nodes] = label
    return assignment


def membership_matrix(child_assignment, parent_assignment):
    """Binary child-cluster to parent-cluster matrix between two layers.

    Row i has a single 1 in the column of the parent cluster that contains
    child cluster i; the child partition must refine the parent partition.
    """
    n_child = child_assignment.max() + 1
    n_parent = parent_assignment.max() + 1
    matrix = np.zeros((n_child, n_parent))
    for child in range(n_child):
        nodes = np.flatnonzero(child_assignment == child)
        parents = np.unique(parent_assignment[nodes])
        if parents.size != 1:
            raise ValueError(f"child cluster {child} straddles {parents.size} parents")
        matrix[child, parents[0]] = 1.0
    return matrix


def cut_hierarchy(dendrogram, sizes):
    """Membership matrices for a strictly increasing chain of layer sizes.

    ``sizes`` is [N0, ..., NL] with NL equal to the leaf count; the result
    has one matrix per consecutive pair (L of them; empty for a single
    layer).
    """
    sizes = [int(s) for s in sizes]
    if sizes[-1] != dendrogram.n_leaves:
        raise ValueError("the last layer size must equal the node count")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("layer sizes must be strictly increasing")
    assignments = [cut_dendrogram(dendrogram, s) for s in sizes]
    return [
        membership_matrix(assignments[i], assignments[i - 1])
        for i in range(1, len(sizes))
    ]


def coarse_adjacency(g, assignment):
    """Degree-normalized cluster adjacency under ``assignment``.

    The raw weight between two clusters is the total adjacency weight of
    original edges joining them (the edge count on unweighted graphs); the
    diagonal is zeroed before symmetric degree normalization. A cluster with
    no outgoing edges raises ``IsolatedClusterError``.
    """
    assignment = np.asarray(assignment, dtype=int)
    n_clusters = assignment.max() + 1
    one_hot = np.zeros((g.n_nodes, n_clusters))
    one_hot[np.arange(g.n_nodes), assignment] = 1.0
    raw = one_hot.T @ g.adjacency @ one_hot
    np.fill_diagonal(raw, 0.0)
    raw = (raw + raw.T) / 2.0
    degrees = raw.sum(axis=1)
    zero = np.flatnonzero(degrees == 0.0)
    if zero.size:
        raise IsolatedClusterError(int(zero[0]))
    scale = 1.0 / np.sqrt(degrees)
    return raw * np.outer(scale, scale)


def upsampling_operator(adjacency, membership, gamma):
    """(gamma I + (1 - gamma) A) P: copy from the parent, then blend.

    ``adjacency`` is the (normalized) child-layer adjacency and
    ``membership`` the child-to-parent matrix of that layer.
    """
    adjacency = np.asarray(adjacency, dtype=float)
    membership = np.asarray(membership, dtype=float)
    n = adjacency.shape[0]
    if adjacency.shape != (n, n) or membership.shape[0] != n:
        raise ValueError("adjacency and membership dimensions do not match")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    return (gamma * np.eye(n) + (1.0 - gamma) * adjacency) @ membership


@dataclass(frozen=True)
class CoarseningHierarchy:
    """Per-layer coarsening stack for a graph.

    sizes:        [N0, ..., NL] with NL = N (strictly increasing)
    assignments:  original-node labels at each layer
    memberships:  child-to-parent matrices P(l), l = 1..L
    adjacencies:  normalized coarse adjacency at each layer (a single-cluster
                  layer stores a 1x1 zero matrix, so its blend is gamma I)
    upsamplers:   U(l) = (gamma I + (1-gamma) A(l)) P(l), l = 1..L
    """

    sizes: tuple
    gamma: float
    assignments: tuple
    memberships: tuple
    adjacencies: tuple
    upsamplers: tuple

    @property
    def n_layers(self):
        return len(self.sizes) - 1


def build_hierarchy(g, sizes, gamma):
    """Dendrogram, cuts, coarse adjacencies, and upsamplers in one pass."""
    sizes = [int(s) for s in sizes]
    dendrogram = build_dendrogram(g)
    memberships = cut_hierarchy(dendrogram, sizes)
    assignments = [cut_dendrogram(dendrogram, s) for s in sizes]
    adjacencies = []
    for size, assignment in zip(sizes, assignments):
        if size == 1:
            adjacencies.append(np.zeros((1, 1)))
        elif size == g.n_nodes:
            adjacencies.append(normalize_adjacency(g))
        else:
            adjacencies.append(coarse_adjacency(g, assignment))
    upsamplers = [
        upsampling_operator(adjacencies[level], memberships[level - 1], gamma)
        for level in range(1, len(sizes))
    ]
    return CoarseningHierarchy(
        sizes=tuple(sizes),
        gamma=float(gamma),
        assignments=tuple(assignments),
        memberships=tuple(memberships),
        adjacencies=tuple(adjacencies),
        upsamplers=tuple(upsamplers),
    )


def default_layer_sizes(n_nodes, n_latent, n_layers):
    """Geometric interpolation from ``n_latent`` up to ``n_nodes``."""
    if n_layers < 1:
        raise ValueError("at least one layer is required")
    if not 1 <= n_latent < n_nodes:
        raise ValueError("latent size must lie in [1, n_nodes)")
    ratio = (n_nodes / n_latent) ** (1.0 / n_layers)
    sizes = [int(round(n_latent * ratio**i)) for i in range(n_layers + 1)]
    sizes[0], sizes[-1] = n_latent, n_nodes
    for i in range(1, n_layers + 1):
        sizes[i] = min(max(sizes[i], sizes[i - 1] + 1), n_nodes - (n_layers - i))
    return sizes


def save_hierarchy(hierarchy, path):
    """JSON export of the hierarchy (sizes, per-layer assignments, gamma)."""
    payload = {
        "sizes": list(hierarchy.sizes),
        "gamma": hierarchy.gamma,
        "assignments": [a.tolist() for a in hierarchy.assignments],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
