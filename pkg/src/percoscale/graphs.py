"""Finite graph substrates and metric primitives.

Everything downstream (samplers, event detectors, renormalization nets) works
on the `Graph` class defined here: an immutable, simple, connected, undirected
graph with 0-based integer vertex ids.  Balls, spheres, boundaries and
diameters are all in the graph metric.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

GENERATOR_TAGS = ("torus", "box", "cycle", "ladder", "complete", "custom")


class GraphValidationError(ValueError):
    """Input graph violates simplicity or connectivity requirements."""


class BudgetExceededError(RuntimeError):
    """An exhaustive enumeration would exceed its configured budget."""


class NoGeodesicError(ValueError):
    """No geodesic segment of the requested length exists in the graph."""


class GeodesicVerificationError(RuntimeError):
    """A candidate segment failed the exact pairwise-distance check."""


@dataclass(frozen=True)
class GeometryProfile:
    """Candidate volume-growth and isoperimetry constants for a graph.

    ``|B(x,r)| <= c_u * r**d_u`` and ``|B(x,r)| >= c_l * r**d_l`` for the
    radii where the candidate is meant to apply, and
    ``|boundary(A)| >= c_i * |A|**((d_i-1)/d_i)`` for finite sets A.
    These are candidates measured or declared at construction, not certified
    bounds; finite graphs always break them at large enough scales.
    """

    d_u: float
    c_u: float
    d_l: float
    c_l: float
    d_i: float
    c_i: float

    def __post_init__(self):
        for name in ("d_u", "c_u", "d_l", "c_l", "d_i", "c_i"):
            if getattr(self, name) <= 0:
                raise ValueError(f"GeometryProfile.{name} must be positive")

    @property
    def supports_tree_argument(self) -> bool:
        """Whether d_i exceeds one, as required by the main renorm theorems."""
        return self.d_i > 1.0


class Graph:
    """Immutable finite simple connected undirected graph.

    Parameters
    ----------
    adjacency : sequence of sequences of int
        Neighbor lists; will be sorted and validated.
    generator_tag : str
        One of GENERATOR_TAGS.
    params : dict, optional
        Generator parameters (side, dim, n, ...).
    profile : GeometryProfile, optional
        Candidate growth/isoperimetry constants.
    """

    def __init__(self, adjacency, generator_tag="custom", params=None,
                 profile=None, validate=True):
        if generator_tag not in GENERATOR_TAGS:
            raise ValueError(f"unknown generator tag {generator_tag!r}")
        self.adj = [sorted(set(int(w) for w in nbrs)) for nbrs in adjacency]
        self.n = len(self.adj)
        self.generator_tag = generator_tag
        self.params = dict(params or {})
        self.profile = profile
        if validate:
            self._validate(adjacency)
        degs = [len(nbrs) for nbrs in self.adj]
        self.is_regular = degs[0] if degs and len(set(degs)) == 1 else None

    def _validate(self, raw_adjacency):
        if self.n == 0:
            raise GraphValidationError("graph has no vertices")
        for v, nbrs in enumerate(self.adj):
            if len(nbrs) != len(list(raw_adjacency[v])):
                raise GraphValidationError(f"duplicate edges at vertex {v}")
            for w in nbrs:
                if w == v:
                    raise GraphValidationError(f"self-loop at vertex {v}")
                if not 0 <= w < self.n:
                    raise GraphValidationError(f"vertex id {w} out of range")
                if v not in self.adj[w]:
                    raise GraphValidationError(
                        f"asymmetric adjacency between {v} and {w}")
        seen = self._bfs_distances(0)
        if (seen < 0).any():
            raise GraphValidationError("graph is not connected")

    # -- basic accessors ---------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return self.n

    def neighbors(self, v: int):
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @cached_property
    def edges(self) -> np.ndarray:
        """Edge list as an (m, 2) array with u < v, lexicographically sorted."""
        pairs = [(v, w) for v in range(self.n) for w in self.adj[v] if v < w]
        if not pairs:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(pairs, dtype=np.int64)

    @cached_property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_index(self) -> dict:
        return {(int(u), int(v)): i for i, (u, v) in enumerate(self.edges)}

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """Sparse 0/1 adjacency matrix (both orientations)."""
        e = self.edges
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(len(rows), dtype=np.int8)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def __repr__(self):
        return (f"Graph({self.generator_tag}, n={self.n}, "
                f"m={self.edge_count}, params={self.params})")

    # -- metric primitives ---------------------------------------------------

    def _bfs_distances(self, x: int, cutoff: int | None = None) -> np.ndarray:
        """Distances from x as an int32 array, -1 beyond cutoff/unreached."""
        dist = np.full(self.n, -1, dtype=np.int32)
        dist[x] = 0
        queue = deque([x])
        adj = self.adj
        while queue:
            v = queue.popleft()
            dv = dist[v]
            if cutoff is not None and dv >= cutoff:
                continue
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
        return dist

    def distances_from(self, x: int, cutoff: int | None = None) -> np.ndarray:
        self._check_vertex(x)
        return self._bfs_distances(x, cutoff)

    def distance(self, u: int, v: int) -> int:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            return 0
        dist = self._bfs_distances(u)
        return int(dist[v])

    def eccentricity(self, x: int) -> int:
        return int(self.distances_from(x).max())

    def has_sphere(self, x: int, r: int) -> bool:
        """True iff some vertex lies at distance exactly r from x."""
        if r == 0:
            return True
        dist = self._bfs_distances(x, cutoff=r)
        return bool((dist == r).any())

    def geodesic_to_radius(self, x: int, r: int) -> list[int] | None:
        """A shortest path from x to some vertex at distance exactly r.

        Returns None when the sphere at radius r is empty.  Ties are broken
        toward smaller vertex ids, so the result is deterministic.
        """
        self._check_vertex(x)
        if r == 0:
            return [x]
        dist = np.full(self.n, -1, dtype=np.int32)
        parent = np.full(self.n, -1, dtype=np.int64)
        dist[x] = 0
        queue = deque([x])
        hit = -1
        while queue:
            v = queue.popleft()
            dv = dist[v]
            if dv == r:
                hit = v
                break
            for w in self.adj[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    parent[w] = v
                    queue.append(w)
        if hit < 0:
            return None
        path = [hit]
        while path[-1] != x:
            path.append(int(parent[path[-1]]))
        path.reverse()
        return path

    def _check_vertex(self, x: int):
        if not 0 <= x < self.n:
            raise ValueError(f"vertex id {x} out of range for n={self.n}")


# -- generators --------------------------------------------------------------


def _torus_profile(dim: int) -> GeometryProfile:
    import math
    return GeometryProfile(d_u=dim, c_u=3.0 ** dim,
                           d_l=dim, c_l=2.0 ** dim / math.factorial(dim),
                           d_i=float(dim), c_i=1.0)


def torus(dim: int, side: int) -> Graph:
    """d-dimensional discrete torus (Z/side)^dim, nearest-neighbor edges."""
    if dim < 1:
        raise ValueError("torus dimension must be >= 1")
    if side < 3:
        raise ValueError("torus side must be >= 3 to stay simple")
    n = side ** dim
    strides = [side ** i for i in range(dim)]
    adj = []
    for v in range(n):
        nbrs = []
        for axis in range(dim):
            s = strides[axis]
            coord = (v // s) % side
            for delta in (-1, 1):
                c2 = (coord + delta) % side
                nbrs.append(v + (c2 - coord) * s)
        adj.append(nbrs)
    return Graph(adj, "torus", {"dim": dim, "side": side},
                 profile=_torus_profile(dim))


def box(dim: int, side: int) -> Graph:
    """d-dimensional grid box {0..side-1}^dim with free boundary."""
    import math
    if dim < 1:
        raise ValueError("box dimension must be >= 1")
    if side < 2:
        raise ValueError("box side must be >= 2")
    n = side ** dim
    strides = [side ** i for i in range(dim)]
    adj = []
    for v in range(n):
        nbrs = []
        for axis in range(dim):
            s = strides[axis]
            coord = (v // s) % side
            if coord > 0:
                nbrs.append(v - s)
            if coord < side - 1:
                nbrs.append(v + s)
        adj.append(nbrs)
    profile = GeometryProfile(d_u=dim, c_u=3.0 ** dim,
                              d_l=dim, c_l=1.0 / math.factorial(dim),
                              d_i=float(dim), c_i=1.0)
    return Graph(adj, "box", {"dim": dim, "side": side}, profile=profile)


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs >= 3 vertices")
    adj = [[(v - 1) % n, (v + 1) % n] for v in range(n)]
    profile = GeometryProfile(d_u=1, c_u=3.0, d_l=1, c_l=2.0, d_i=1, c_i=2.0)
    return Graph(adj, "cycle", {"n": n}, profile=profile)


def ladder(rungs: int) -> Graph:
    """2 x rungs grid: two rails joined by rungs."""
    if rungs < 2:
        raise ValueError("ladder needs >= 2 rungs")
    n = 2 * rungs
    adj = [[] for _ in range(n)]
    for i in range(rungs):
        a, b = 2 * i, 2 * i + 1
        adj[a].append(b)
        adj[b].append(a)
        if i + 1 < rungs:
            adj[a].append(a + 2)
            adj[a + 2].append(a)
            adj[b].append(b + 2)
            adj[b + 2].append(b)
    profile = GeometryProfile(d_u=1, c_u=6.0, d_l=1, c_l=2.0, d_i=1, c_i=2.0)
    return Graph(adj, "ladder", {"rungs": rungs}, profile=profile)


def complete(n: int) -> Graph:
    if n < 2:
        raise ValueError("complete graph needs >= 2 vertices")
    adj = [[w for w in range(n) if w != v] for v in range(n)]
    profile = GeometryProfile(d_u=1, c_u=float(n), d_l=1, c_l=float(n),
                              d_i=1, c_i=1.0)
    return Graph(adj, "complete", {"n": n}, profile=profile)


def gen_graph(kind: str, **params) -> Graph:
    """Dispatch to a generator by tag; used by the CLI and test harness."""
    if kind == "torus":
        return torus(params["dim"], params["side"])
    if kind == "box":
        return box(params["dim"], params["side"])
    if kind == "cycle":
        return cycle(params["n"])
    if kind == "ladder":
        return ladder(params["rungs"])
    if kind == "complete":
        return complete(params["n"])
    raise ValueError(f"unknown generator kind {kind!r}")


# -- ball / sphere / boundary / diameter --------------------------------------


def ball(g: Graph, x: int, r: int) -> np.ndarray:
    """Closed ball {y : d(x, y) <= r} as a sorted id array."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    dist = g.distances_from(x, cutoff=r)
    return np.flatnonzero((dist >= 0) & (dist <= r)).astype(np.int64)


def sphere(g: Graph, x: int, r: int) -> np.ndarray:
    """Sphere {y : d(x, y) = r}; may be empty on a finite graph."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    dist = g.distances_from(x, cutoff=r)
    return np.flatnonzero(dist == r).astype(np.int64)


def boundary(g: Graph, A, mode: str = "edge"):
    """Edge boundary or internal vertex boundary of a vertex set A.

    mode="edge" returns the list of edges (u, v) with u in A, v outside,
    normalized to u < v.  mode="internal_vertex" returns the sorted array of
    vertices of A having a neighbor outside A.
    """
    A_set = set(int(a) for a in A)
    for a in A_set:
        g._check_vertex(a)
    if mode == "edge":
        out = []
        for a in sorted(A_set):
            for w in g.adj[a]:
                if w not in A_set:
                    out.append((min(a, w), max(a, w)))
        return sorted(set(out))
    if mode == "internal_vertex":
        verts = [a for a in sorted(A_set)
                 if any(w not in A_set for w in g.adj[a])]
        return np.array(verts, dtype=np.int64)
    raise ValueError(f"unknown boundary mode {mode!r}")


def set_diameter(g: Graph, A) -> int:
    """max over a, b in A of d_G(a, b); distances in the ambient graph."""
    A_list = sorted(set(int(a) for a in A))
    if not A_list:
        raise ValueError("set_diameter of empty set")
    best = 0
    A_arr = np.array(A_list, dtype=np.int64)
    for a in A_list:
        dist = g.distances_from(a)
        best = max(best, int(dist[A_arr].max()))
    return best


# -- growth profiling ----------------------------------------------------------


@dataclass
class GrowthReport:
    r_values: list[int]
    v_bar: list[int]          # sup_x |B(x, r)|
    v_min: list[int]          # min_x |B(x, r)|
    d_u: float
    c_u_min: float            # minimal c_u with v_bar(r) <= c_u r^d_u for sampled r
    d_l: float
    c_l_max: float            # maximal c_l with v_min(r) >= c_l r^d_l for sampled r


def growth_profile(g: Graph, r_max: int, d_u: float, d_l: float) -> GrowthReport:
    """Tabulate the growth function and fit the extremal constants.

    Runs a BFS from every vertex, so intended for small/medium graphs.
    """
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    counts = np.zeros((g.n, r_max + 1), dtype=np.int64)
    max_ecc = 0
    for x in range(g.n):
        dist = g.distances_from(x)
        max_ecc = max(max_ecc, int(dist.max()))
        binc = np.bincount(dist[dist <= r_max], minlength=r_max + 1)
        counts[x] = np.cumsum(binc)
    if r_max > max_ecc:
        raise ValueError(f"r_max={r_max} exceeds max eccentricity {max_ecc}")
    rs = list(range(1, r_max + 1))
    v_bar = [int(counts[:, r].max()) for r in rs]
    v_min = [int(counts[:, r].min()) for r in rs]
    c_u_min = max(vb / r ** d_u for r, vb in zip(rs, v_bar))
    c_l_max = min(vm / r ** d_l for r, vm in zip(rs, v_min))
    return GrowthReport(rs, v_bar, v_min, d_u, c_u_min, d_l, c_l_max)


# -- isoperimetry check --------------------------------------------------------


@dataclass
class IsoReport:
    c_i: float
    d_i: float
    s_max: int
    exhaustive: bool          # False when the budget stopped enumeration
    subsets_checked: int
    holds: bool               # min ratio >= c_i over everything checked
    worst_ratio: float
    worst_set: tuple
    sampled_sizes: int = 0    # extra non-exhaustive samples at larger sizes


def _iso_ratio(g: Graph, A: tuple, d_i: float) -> float:
    b = len(boundary(g, A, "edge"))
    return b / len(A) ** ((d_i - 1.0) / d_i)


def enumerate_connected_subsets(g: Graph, s_max: int, budget: int):
    """Yield all connected vertex subsets of size <= s_max, each exactly once.

    Canonical ordering: subsets are grouped by their minimum vertex and grown
    by adding larger neighbors, so output is deterministic.  Raises
    BudgetExceededError if more than `budget` subsets would be produced.
    """
    produced = 0
    for v0 in range(g.n):
        # Subsets whose minimum vertex is v0; only vertices > v0 may extend.
        seen = {frozenset((v0,))}
        stack = [(v0,)]
        while stack:
            verts = stack.pop()
            produced += 1
            if produced > budget:
                raise BudgetExceededError(
                    f"connected-subset enumeration exceeded budget {budget}")
            yield verts
            if len(verts) >= s_max:
                continue
            vset = set(verts)
            grow = sorted({w for v in verts for w in g.adj[v]
                           if w > v0 and w not in vset})
            for w in grow:
                key = frozenset(vset | {w})
                if key not in seen:
                    seen.add(key)
                    stack.append(tuple(sorted(vset | {w})))


def check_isoperimetry(g: Graph, c_i: float, d_i: float, s_max: int,
                       budget: int = 2_000_000, n_samples: int = 0,
                       sample_size: int = 0, seed: int = 0) -> IsoReport:
    """Check |boundary(A)| >= c_i |A|^((d_i-1)/d_i) over connected subsets.

    Exhaustive up to s_max (guarded by `budget`); optionally also samples
    `n_samples` random connected subsets of size `sample_size`, which is
    reported as non-exhaustive evidence only.
    """
    if c_i <= 0:
        raise ValueError("c_i must be positive")
    worst_ratio = float("inf")
    worst_set: tuple = ()
    checked = 0
    for A in enumerate_connected_subsets(g, s_max, budget):
        checked += 1
        ratio = _iso_ratio(g, A, d_i)
        if ratio < worst_ratio:
            worst_ratio = ratio
            worst_set = A
    sampled = 0
    if n_samples > 0 and sample_size > s_max:
        rng = np.random.default_rng(seed)
        for _ in range(n_samples):
            A = _random_connected_subset(g, sample_size, rng)
            sampled += 1
            ratio = _iso_ratio(g, A, d_i)
            if ratio < worst_ratio:
                worst_ratio = ratio
                worst_set = A
    return IsoReport(c_i=c_i, d_i=d_i, s_max=s_max, exhaustive=True,
                     subsets_checked=checked, holds=worst_ratio >= c_i,
                     worst_ratio=worst_ratio, worst_set=tuple(worst_set),
                     sampled_sizes=sampled)


def _random_connected_subset(g: Graph, size: int, rng) -> tuple:
    size = min(size, g.n)
    start = int(rng.integers(g.n))
    chosen = {start}
    frontier = set(g.adj[start])
    while len(chosen) < size and frontier:
        w = sorted(frontier)[int(rng.integers(len(frontier)))]
        frontier.discard(w)
        chosen.add(w)
        frontier.update(u for u in g.adj[w] if u not in chosen)
    return tuple(sorted(chosen))


# -- geodesic segments ---------------------------------------------------------


def _shortest_path(g: Graph, u: int, w: int) -> list[int]:
    dist = np.full(g.n, -1, dtype=np.int32)
    parent = np.full(g.n, -1, dtype=np.int64)
    dist[u] = 0
    queue = deque([u])
    while queue:
        v = queue.popleft()
        if v == w:
            break
        for z in g.adj[v]:
            if dist[z] < 0:
                dist[z] = dist[v] + 1
                parent[z] = v
                queue.append(z)
    path = [w]
    while path[-1] != u:
        path.append(int(parent[path[-1]]))
    path.reverse()
    return path


def verify_geodesic_segment(g: Graph, segment: list[int]) -> bool:
    """Exact check that d(seg[i], seg[j]) == |i - j| for all pairs."""
    seg = np.asarray(segment, dtype=np.int64)
    for i, v in enumerate(segment):
        dist = g.distances_from(int(v))
        if not (dist[seg] == np.abs(np.arange(len(seg)) - i)).all():
            return False
    return True


def find_geodesic_segment(g: Graph, length: int) -> list[int]:
    """A vertex sequence sigma(0..length) with d(sigma(i), sigma(j)) = |i-j|.

    Double-sweep BFS finds candidate endpoints; falls back to a full
    diameter scan before declaring that no segment exists.  The returned
    segment is re-verified exactly; a verification failure (which a shortest
    path cannot produce) is raised as GeodesicVerificationError to keep the
    two error cases distinct.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    if length == 0:
        return [0]
    d0 = g.distances_from(0)
    u = int(d0.argmax())
    du = g.distances_from(u)
    w = int(du.argmax())
    if int(du[w]) < length:
        # Double sweep is only a lower bound on the diameter; do it exactly.
        best = (-1, 0, 0)
        for x in range(g.n):
            dist = g.distances_from(x)
            y = int(dist.argmax())
            if int(dist[y]) > best[0]:
                best = (int(dist[y]), x, y)
        if best[0] < length:
            raise NoGeodesicError(
                f"graph diameter {best[0]} < requested length {length}")
        u, w = best[1], best[2]
    path = _shortest_path(g, u, w)
    segment = path[:length + 1]
    if not verify_geodesic_segment(g, segment):
        raise GeodesicVerificationError(
            "candidate segment failed exact pairwise verification")
    return segment


# -- adjacency-list text format -------------------------------------------------


def parse_adjacency(text: str, generator_tag: str = "custom") -> Graph:
    """Parse the 'n m' + edge-lines format into a validated Graph."""
    lines = [ln for ln in (s.strip() for s in text.splitlines())
             if ln and not ln.startswith("#")]
    if not lines:
        raise GraphValidationError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphValidationError("first line must be 'n m'")
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise GraphValidationError(f"expected {m} edge lines, got {len(lines) - 1}")
    adj = [[] for _ in range(n)]
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphValidationError(f"bad edge line: {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphValidationError(f"edge {u} {v} out of range")
        if u == v:
            raise GraphValidationError(f"self-loop at {u}")
        adj[u].append(v)
        adj[v].append(u)
    return Graph(adj, generator_tag)


def format_adjacency(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"
