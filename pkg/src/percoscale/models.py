"""Percolation samplers: Bernoulli site/bond, divide-and-color, loop soup.

All samplers are pure functions of (graph, parameters, master_seed,
sample_index); see `seeding` for the derivation scheme.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .graphs import Graph
from .seeding import rng_for, uniform_from_hash


@dataclass(frozen=True)
class Provenance:
    model: str
    params: tuple
    master_seed: int
    sample_index: int


@dataclass
class SiteConfig:
    """Open/closed assignment on vertices; state[v] == True means open."""

    graph: Graph
    states: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        if len(self.states) != self.graph.n:
            raise ValueError("state vector length does not match graph")
        self.states = np.asarray(self.states, dtype=bool)

    def is_open(self, v: int) -> bool:
        return bool(self.states[v])

    @property
    def all_open(self) -> bool:
        return bool(self.states.all())

    @property
    def open_fraction(self) -> float:
        return float(self.states.mean())


@dataclass
class BondConfig:
    """Open/closed assignment on edges, indexed as in graph.edges."""

    graph: Graph
    states: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        if len(self.states) != self.graph.edge_count:
            raise ValueError("state vector length does not match edge count")
        self.states = np.asarray(self.states, dtype=bool)


class ConstantSiteConfig:
    """All-open (or all-closed) configuration without a per-vertex array.

    Lets event detectors run on implicit substrates too large to materialize.
    """

    def __init__(self, graph, value: bool, provenance: Provenance | None = None):
        self.graph = graph
        self.value = bool(value)
        self.provenance = provenance or Provenance(
            "constant", (("value", self.value),), 0, 0)

    def is_open(self, v: int) -> bool:
        return self.value

    @property
    def all_open(self) -> bool:
        return self.value


def sample_bernoulli_site(g: Graph, p: float, master_seed: int,
                          sample_index: int = 0) -> SiteConfig:
    """Independent Bernoulli(p) open/closed coin per vertex."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = rng_for(master_seed, "bernoulli-site", sample_index)
    states = rng.random(g.n) < p
    return SiteConfig(g, states, Provenance(
        "bernoulli-site", (("p", p),), master_seed, sample_index))


def sample_bernoulli_bond(g: Graph, p: float, master_seed: int,
                          sample_index: int = 0) -> BondConfig:
    """Independent Bernoulli(p) open/closed coin per edge."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = rng_for(master_seed, "bernoulli-bond", sample_index)
    states = rng.random(g.edge_count) < p
    return BondConfig(g, states, Provenance(
        "bernoulli-bond", (("p", p),), master_seed, sample_index))


# -- cluster labeling ----------------------------------------------------------


NO_CLUSTER = -1


@dataclass
class ClusterLabeling:
    """Per-vertex cluster ids; NO_CLUSTER marks closed vertices (site mode).

    Ids are 0..count-1 in order of first appearance, so labelings are
    deterministic and relabeling-stable.
    """

    graph: Graph
    labels: np.ndarray
    count: int
    mode: str  # "site" or "bond"

    @cached_property
    def sizes(self) -> np.ndarray:
        valid = self.labels[self.labels >= 0]
        return np.bincount(valid, minlength=self.count)

    @cached_property
    def min_vertex(self) -> np.ndarray:
        """Smallest vertex id in each cluster (stable color key)."""
        out = np.full(self.count, -1, dtype=np.int64)
        for v in range(self.graph.n - 1, -1, -1):
            c = self.labels[v]
            if c >= 0:
                out[c] = v
        return out

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cid)

    def diameter(self, cid: int) -> int:
        from .graphs import set_diameter
        return set_diameter(self.graph, self.members(cid))


def _canonical_labels(raw: np.ndarray) -> tuple[np.ndarray, int]:
    """Renumber labels in order of first appearance."""
    remap: dict[int, int] = {}
    out = np.empty_like(raw)
    nxt = 0
    for i, lab in enumerate(raw):
        j = remap.get(lab)
        if j is None:
            j = remap[lab] = nxt
            nxt += 1
        out[i] = j
    return out, nxt


def clusters(g: Graph, cfg) -> ClusterLabeling:
    """Connected components of the open subgraph.

    SiteConfig: components over open vertices through open-open edges; closed
    vertices get NO_CLUSTER.  BondConfig: components over all vertices through
    open edges (closed-edge-isolated vertices become singletons).
    """
    if isinstance(cfg, SiteConfig):
        open_idx = np.flatnonzero(cfg.states)
        labels = np.full(g.n, NO_CLUSTER, dtype=np.int64)
        if len(open_idx) == 0:
            return ClusterLabeling(g, labels, 0, "site")
        sub = g.csr[open_idx][:, open_idx]
        _, raw = connected_components(sub, directed=False)
        canon, count = _canonical_labels(raw)
        labels[open_idx] = canon
        return ClusterLabeling(g, labels, count, "site")
    if isinstance(cfg, BondConfig):
        open_edges = g.edges[cfg.states]
        if len(open_edges):
            rows = np.concatenate([open_edges[:, 0], open_edges[:, 1]])
            cols = np.concatenate([open_edges[:, 1], open_edges[:, 0]])
            mat = sp.csr_matrix(
                (np.ones(len(rows), dtype=np.int8), (rows, cols)),
                shape=(g.n, g.n))
        else:
            mat = sp.csr_matrix((g.n, g.n), dtype=np.int8)
        _, raw = connected_components(mat, directed=False)
        canon, count = _canonical_labels(raw)
        return ClusterLabeling(g, canon, count, "bond")
    raise TypeError(f"cannot cluster configuration of type {type(cfg)!r}")


# -- divide and color -----------------------------------------------------------


def divide_and_color(g: Graph, p: float, q: float, master_seed: int,
                     sample_index: int = 0) -> SiteConfig:
    """Bond percolation at density p, then i.i.d. black/white cluster coloring.

    Black (probability q) is encoded as open.  Each cluster's color is keyed
    by (master_seed, sample_index, cluster's minimal vertex id), so colors are
    stable under any relabeling of the clusters.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    bond = sample_bernoulli_bond(g, p, master_seed, sample_index)
    lab = clusters(g, bond)
    color = np.empty(lab.count, dtype=bool)
    for cid in range(lab.count):
        u = uniform_from_hash(master_seed, f"dac-color|{sample_index}",
                              int(lab.min_vertex[cid]))
        color[cid] = u < q
    states = color[lab.labels]
    return SiteConfig(g, states, Provenance(
        "divide-and-color", (("p", p), ("q", q)), master_seed, sample_index))


# -- random-walk loop soup -------------------------------------------------------


@dataclass(frozen=True)
class Loop:
    """Closed walk with k >= 2 edges, stored as its lexicographically
    minimal rotation of (x_0, ..., x_{k-1}); x_{k-1} is adjacent to x_0."""

    vertices: tuple

    @property
    def length(self) -> int:
        return len(self.vertices)

    @staticmethod
    def canonical_rotation(verts: tuple) -> tuple:
        k = len(verts)
        return min(tuple(verts[(i + j) % k] for j in range(k))
                   for i in range(k))

    @classmethod
    def from_walk(cls, walk, graph: Graph | None = None) -> "Loop":
        """Build from a rooted closed walk (x_0, ..., x_k) with x_k == x_0."""
        walk = [int(v) for v in walk]
        if len(walk) < 3 or walk[0] != walk[-1]:
            raise ValueError("walk must be closed with at least 2 edges")
        verts = tuple(walk[:-1])
        if graph is not None:
            for a, b in zip(walk, walk[1:]):
                if b not in graph.adj[a]:
                    raise ValueError(f"walk step {a}->{b} is not an edge")
        return cls(cls.canonical_rotation(verts))

    def is_valid(self, graph: Graph) -> bool:
        k = len(self.vertices)
        return all(self.vertices[(i + 1) % k] in graph.adj[self.vertices[i]]
                   for i in range(k))


@dataclass
class LoopSoupRealization:
    graph: Graph
    loops: list  # list of Loop; multiset semantics
    beta: float
    kappa: float
    k_max: int
    truncation_mass: float  # upper bound on expected count of discarded loops
    provenance: Provenance

    def counts_by_length(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for lp in self.loops:
            out[lp.length] = out.get(lp.length, 0) + 1
        return out


class _WalkTable:
    """Adjacency-power tables for closed-walk counting and bridge sampling.

    Exact integer tables for |V| <= 64 and k <= 20 (cross-validation mode);
    float64 with per-step max renormalization otherwise.  Sampling only uses
    within-step ratios, so the renormalization is harmless.
    """

    EXACT_N = 64
    EXACT_K = 20

    def __init__(self, g: Graph, k_max: int, exact: bool | None = None):
        self.g = g
        self.k_max = k_max
        if exact is None:
            exact = g.n <= self.EXACT_N and k_max <= self.EXACT_K
        self.exact = exact
        if exact:
            a = np.zeros((g.n, g.n), dtype=object)
            for v in range(g.n):
                for w in g.adj[v]:
                    a[v, w] = 1
            self.powers = [np.eye(g.n, dtype=object)]
            for _ in range(k_max):
                self.powers.append(self.powers[-1] @ a)
            self.log_scale = [0.0] * (k_max + 1)
        else:
            a = np.zeros((g.n, g.n), dtype=np.float64)
            for v in range(g.n):
                for w in g.adj[v]:
                    a[v, w] = 1.0
            self.powers = [np.eye(g.n)]
            self.log_scale = [0.0]
            for j in range(k_max):
                nxt = self.powers[-1] @ a
                scale = nxt.max()
                if scale <= 0:
                    raise ValueError("adjacency power vanished")
                self.powers.append(nxt / scale)
                self.log_scale.append(self.log_scale[-1] + float(np.log(scale)))

    def log_trace(self, k: int) -> float:
        tr = self.powers[k].trace()
        if self.exact:
            return float(np.log(float(tr))) if tr > 0 else -np.inf
        tr = float(tr)
        return (np.log(tr) + self.log_scale[k]) if tr > 0 else -np.inf

    def diag(self, k: int) -> np.ndarray:
        return np.array([float(self.powers[k][i, i]) for i in range(self.g.n)])

    def column(self, k: int, root: int) -> np.ndarray:
        return np.array([float(self.powers[k][i, root])
                         for i in range(self.g.n)])


def loop_length_intensity(g: Graph, kappa: float, k: int) -> float:
    """Total mass of rooted loops with k edges: trace(A^k) / (k (Delta(1+kappa))^k)."""
    if g.is_regular is None:
        raise ValueError("loop soup intensity requires a regular graph")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if k < 2:
        raise ValueError("loop length counts edges and must be >= 2")
    table = _WalkTable(g, k)
    log_tr = table.log_trace(k)
    if log_tr == -np.inf:
        return 0.0
    delta = g.is_regular
    return float(np.exp(log_tr - np.log(k) - k * np.log(delta * (1.0 + kappa))))


def _tail_mass(n_vertices: int, beta: float, kappa: float, k_max: int) -> float:
    """beta * |V| * sum_{k > k_max} (1+kappa)^{-k} / k, computed in closed form."""
    q = 1.0 / (1.0 + kappa)
    if q >= 1.0:
        return float("inf")
    total = -np.log1p(-q)
    partial = sum(q ** k / k for k in range(1, k_max + 1))
    return beta * n_vertices * max(0.0, float(total - partial))


def _choose_k_max(n_vertices: int, beta: float, kappa: float, eps: float) -> int:
    if kappa <= 0:
        raise ValueError(
            "kappa=0 gives a divergent loop-count tail on this finite graph; "
            "pass k_max explicitly")
    k = 2
    while _tail_mass(n_vertices, beta, kappa, k) >= eps:
        k += 1
        if k > 100_000:
            raise ValueError("k_max search did not converge; increase eps")
    return k


def _sample_rooted_walk(g: Graph, table: _WalkTable, k: int, rng) -> list[int]:
    """Uniform rooted closed walk with k edges via bridge sampling."""
    diag = table.diag(k)
    total = diag.sum()
    if total <= 0:
        raise ValueError(f"no closed walks of length {k}")
    root = int(rng.choice(g.n, p=diag / total))
    walk = [root]
    v = root
    for step in range(k - 1):
        remaining = k - step - 1
        col = table.column(remaining, root)
        nbrs = g.adj[v]
        weights = np.array([col[w] for w in nbrs])
        s = weights.sum()
        if s <= 0:
            raise RuntimeError("bridge sampling dead end; table inconsistent")
        v = int(nbrs[int(rng.choice(len(nbrs), p=weights / s))])
        walk.append(v)
    walk.append(root)
    return walk


def sample_loop_soup(g: Graph, beta: float, kappa: float, eps: float,
                     master_seed: int, sample_index: int = 0,
                     k_max: int | None = None) -> LoopSoupRealization:
    """Poisson soup of unrooted loops with per-loop mass (1/k)(Delta(1+kappa))^-k.

    Per length k the loop count is Poisson(beta * mu_k); each loop is drawn
    uniformly among rooted closed k-walks (root weighted by diag(A^k), then
    sequential bridge sampling) and projected to its canonical unrooted
    representative.  k_max is the smallest cutoff whose expected discarded
    count falls below eps; with kappa == 0 that tail diverges, so k_max must
    be passed explicitly and the recorded truncation mass is infinite.
    """
    if g.is_regular is None:
        raise ValueError("loop soup requires a regular graph")
    if beta <= 0:
        raise ValueError("beta must be positive")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if k_max is None:
        k_max = _choose_k_max(g.n, beta, kappa, eps)
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    truncation = _tail_mass(g.n, beta, kappa, k_max)
    table = _WalkTable(g, k_max)
    delta = g.is_regular
    rng = rng_for(master_seed, "loop-soup", sample_index)
    loops: list[Loop] = []
    for k in range(2, k_max + 1):
        log_tr = table.log_trace(k)
        if log_tr == -np.inf:
            continue
        mu_k = np.exp(log_tr - np.log(k) - k * np.log(delta * (1.0 + kappa)))
        count = int(rng.poisson(beta * mu_k))
        for _ in range(count):
            walk = _sample_rooted_walk(g, table, k, rng)
            loops.append(Loop.from_walk(walk))
    return LoopSoupRealization(
        g, loops, beta, kappa, k_max, float(truncation),
        Provenance("loop-soup",
                   (("beta", beta), ("kappa", kappa), ("eps", eps),
                    ("k_max", k_max)),
                   master_seed, sample_index))


def occupied_vacant(real: LoopSoupRealization) -> tuple[np.ndarray, np.ndarray]:
    """Union of loop ranges and its complement, as sorted id arrays."""
    occ: set[int] = set()
    for lp in real.loops:
        occ.update(lp.vertices)
    occupied = np.array(sorted(occ), dtype=np.int64)
    mask = np.ones(real.graph.n, dtype=bool)
    if len(occupied):
        mask[occupied] = False
    vacant = np.flatnonzero(mask).astype(np.int64)
    return occupied, vacant
