"""Directed-tree generalization of the HV map.

For a tree with node weights ``c_i`` and edge weights ``c_ij``, rooting it
at ``r`` orients every edge away from the root, and the transformation

    s_{i,(r)} = s_i * prod_{j in children_r(i)} (1 + (c_ij / c_i) s_{j,(r)})

is evaluated from the deepest nodes up. Non-root leaves are left unchanged.
With two nodes and unit weights it reduces to ``(s1 (1 + s2), s2)``, the
shape of the HV map's ``V = X (1 + U)``.

Vectors are dicts keyed by node id; values may be scalars or equal-length
arrays (one entry per Monte Carlo draw).
"""

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .distributions import GammaParams, KummerParams, draw
from .errors import DomainError
from .rng import generator

__all__ = ["TreeSpec", "phi_forward", "phi_inverse", "corollary_marginals",
           "NodeLaw", "tree_joint_sample"]


def _edge(u, v):
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class TreeSpec:
    """A weighted tree. Build with :meth:`from_dict` or the constructor."""

    node_weights: dict
    edge_weights: dict
    _orient: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = {int(k): float(v) for k, v in self.node_weights.items()}
        edges = {}
        for key, w in self.edge_weights.items():
            u, v = (int(t) for t in key)
            if u == v:
                raise DomainError(f"self-loop at node {u}")
            if u not in nodes or v not in nodes:
                raise DomainError(f"edge {key} references an unknown node")
            e = _edge(u, v)
            if e in edges:
                raise DomainError(f"duplicate edge {e}")
            edges[e] = float(w)
        for name, weights in (("node", nodes), ("edge", edges)):
            for k, w in weights.items():
                if not (w > 0 and np.isfinite(w)):
                    raise DomainError(f"{name} weight at {k} must be positive, got {w}")
        if len(nodes) < 2:
            raise DomainError("a tree needs at least two nodes")
        if len(edges) != len(nodes) - 1:
            raise DomainError(f"{len(nodes)} nodes need {len(nodes) - 1} edges, got {len(edges)}")
        object.__setattr__(self, "node_weights", nodes)
        object.__setattr__(self, "edge_weights", edges)
        # Connectivity: |E| = |V| - 1 plus one component means acyclic.
        start = min(nodes)
        if len(self._bfs(start)[0]) != len(nodes):
            raise DomainError("graph is not connected")

    @classmethod
    def from_dict(cls, d):
        """Parse ``{"nodes": [{"id": 1, "c": 1.0}], "edges": [{"u": 1, "v": 2, "c": 2.0}]}``."""
        try:
            nodes = {int(n["id"]): float(n["c"]) for n in d["nodes"]}
            edges = {(int(e["u"]), int(e["v"])): float(e["c"]) for e in d["edges"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed tree description: {exc}") from exc
        return cls(nodes, edges)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        return {
            "nodes": [{"id": i, "c": c} for i, c in sorted(self.node_weights.items())],
            "edges": [{"u": u, "v": v, "c": c} for (u, v), c in sorted(self.edge_weights.items())],
        }

    @property
    def nodes(self):
        return sorted(self.node_weights)

    def neighbors(self, i):
        return sorted(v if u == i else u for (u, v) in self.edge_weights if i in (u, v))

    def leaves(self):
        return [i for i in self.nodes if len(self.neighbors(i)) == 1]

    def edge_weight(self, i, j):
        return self.edge_weights[_edge(i, j)]

    def _bfs(self, root):
        adj = {i: [] for i in self.node_weights}
        for u, v in self.edge_weights:
            adj[u].append(v)
            adj[v].append(u)
        order, parent = [root], {root: None}
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in sorted(adj[i]):
                if j not in parent:
                    parent[j] = i
                    order.append(j)
                    queue.append(j)
        return order, parent

    def orientation(self, root):
        """``(order, parent, children)`` of the tree directed away from ``root``.

        ``order`` is breadth-first, so reversing it visits children before
        parents. Results are cached per root.
        """
        if root not in self.node_weights:
            raise DomainError(f"root {root!r} is not a node of the tree")
        cached = self._orient.get(root)
        if cached is None:
            order, parent = self._bfs(root)
            children = {i: [] for i in order}
            for i in order[1:]:
                children[parent[i]].append(i)
            cached = (tuple(order), parent, children)
            self._orient[root] = cached
        return cached


def _check_vector(tree, s, name):
    if set(s) != set(tree.node_weights):
        raise DomainError(f"{name} must have exactly one entry per node {tree.nodes}")
    out = {}
    for i, v in s.items():
        arr = np.asarray(v, dtype=float)
        if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
            raise DomainError(f"{name}[{i}] must be finite and positive")
        out[i] = arr
    return out


def _factor(tree, i, j, value):
    return 1.0 + tree.edge_weight(i, j) / tree.node_weights[i] * value


def phi_forward(tree, root, s):
    """Apply the rooted tree transformation to the vector ``s`` (dict node -> value)."""
    order, _, children = tree.orientation(root)
    s = _check_vector(tree, s, "s")
    out = {}
    for i in reversed(order):
        val = s[i]
        for j in children[i]:
            val = val * _factor(tree, i, j, out[j])
        out[i] = val
    return {i: out[i] for i in tree.nodes}


def phi_inverse(tree, root, t):
    """Invert :func:`phi_forward`: ``s_i = t_i / prod_j (1 + (c_ij/c_i) t_j)``."""
    order, _, children = tree.orientation(root)
    t = _check_vector(tree, t, "t")
    out = {}
    for i in order:
        val = t[i]
        for j in children[i]:
            val = val / _factor(tree, i, j, t[j])
        out[i] = val
    return {i: out[i] for i in tree.nodes}


@dataclass(frozen=True)
class NodeLaw:
    """Law of ``scale * X_{i,(r)}``."""

    spec: object
    scale: float


def _check_shapes(tree, a, c):
    if set(a) != set(tree.node_weights):
        raise DomainError("shape vector a must have one entry per node")
    for i, v in a.items():
        if not v > 0:
            raise DomainError(f"a[{i}] must be positive, got {v}")
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")


def corollary_marginals(tree, root, a, c):
    """Marginal laws of the components of ``phi_forward(tree, root, X)``.

    The root component is Gamma(a_r, c c_r) with scale 1. For any other
    node ``i`` with parent ``p``, ``(c_pi / c_p) X_{i,(r)}`` is
    Kummer(a_i, a_p - a_i, c c_p c_i / c_pi); the returned scale is that
    ``c_pi / c_p`` multiplier.
    """
    if root not in tree.node_weights:
        raise DomainError(f"root {root!r} is not a node of the tree")
    if root not in tree.leaves():
        raise DomainError(f"root {root!r} is not a leaf")
    _check_shapes(tree, a, c)
    _, parent, _ = tree.orientation(root)
    cw = tree.node_weights
    laws = {}
    for i in tree.nodes:
        if i == root:
            laws[i] = NodeLaw(GammaParams(a[i], c * cw[i]), 1.0)
            continue
        p = parent[i]
        cpi = tree.edge_weight(p, i)
        laws[i] = NodeLaw(KummerParams(a[i], a[p] - a[i], c * cw[p] * cw[i] / cpi), cpi / cw[p])
    return laws


def tree_joint_sample(tree, ref_leaf, a, c, n, seed, stream_base=0):
    """Joint draws of ``X`` whose image at ``ref_leaf`` has the corollary's laws.

    Independent components are drawn from :func:`corollary_marginals` at
    ``ref_leaf`` (node ``i`` on stream ``stream_base + position``), unscaled,
    and pulled back through :func:`phi_inverse`.
    """
    laws = corollary_marginals(tree, ref_leaf, a, c)
    image = {}
    for pos, i in enumerate(tree.nodes):
        law = laws[i]
        image[i] = draw(law.spec, n, generator(seed, stream_base + pos)) / law.scale
    return phi_inverse(tree, ref_leaf, image)
