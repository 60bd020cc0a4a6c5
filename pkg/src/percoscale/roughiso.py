"""Rough isometries: distortion checks, rough inverses, image-size bounds.

A map phi between graphs is a C-rough isometry when

    (1/C) d(x, y) - 1 < d(phi(x), phi(y)) <= C d(x, y)

for all pairs, and every target vertex lies within distance C of the image.
The lower inequality is strict and all quantities are integers or exact
rationals, so checks use no epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph
from .seeding import rng_for


@dataclass
class RoughMap:
    source: Graph
    target: Graph
    mapping: tuple  # mapping[v] = image vertex id, total on source
    C: float

    def __post_init__(self):
        self.mapping = tuple(int(v) for v in self.mapping)
        if len(self.mapping) != self.source.n:
            raise ValueError("mapping must be total on source vertices")
        for w in self.mapping:
            if not 0 <= w < self.target.n:
                raise ValueError(f"image vertex {w} out of range")
        if self.C < 1:
            raise ValueError("rough-isometry constant must be >= 1")

    def __call__(self, v: int) -> int:
        return self.mapping[v]

    def image(self, A) -> np.ndarray:
        return np.unique([self.mapping[int(a)] for a in A]).astype(np.int64)


@dataclass
class RoughIsometryReport:
    holds: bool
    distortion_ok: bool
    surjectivity_ok: bool
    exhaustive: bool
    pairs_checked: int
    worst_pair: tuple | None       # pair with minimal slack in (1.1)
    worst_pair_slack: float        # negative => violated
    worst_uncovered: int | None    # target vertex farthest from the image
    covering_radius: int           # max over targets of distance to image
    min_upper_ratio: float         # empirical distortion, recorded not asserted


def _pair_slacks(d_src: int, d_img: int, C: float) -> tuple[float, float]:
    """(lower, upper) slack: lower must be strictly positive, upper >= 0."""
    lower = d_img - (d_src / C - 1.0)
    upper = C * d_src - d_img
    return lower, upper


def _pair_ok(lower: float, upper: float) -> bool:
    return lower > 0.0 and upper >= 0.0


def check_rough_isometry(m: RoughMap, pair_budget: int = 2_000_000,
                         sample_pairs: int = 200_000,
                         seed: int = 0) -> RoughIsometryReport:
    """Verify both defining inequalities plus rough surjectivity.

    Exhaustive over all source pairs when n*(n-1)/2 fits the budget,
    otherwise over a seeded random sample (reported as non-exhaustive).
    """
    g, h = m.source, m.target
    n_pairs = g.n * (g.n - 1) // 2
    exhaustive = n_pairs <= pair_budget
    dist_h_cache: dict[int, np.ndarray] = {}

    def dist_h(u: int) -> np.ndarray:
        if u not in dist_h_cache:
            dist_h_cache[u] = h.distances_from(u)
        return dist_h_cache[u]

    worst_slack = math.inf
    worst_pair = None
    all_pairs_ok = True
    min_upper_ratio = math.inf
    pairs_checked = 0
    mapping = m.mapping

    def note_pair(x: int, y: int, d_src: int, d_img: int):
        nonlocal worst_slack, worst_pair, all_pairs_ok, min_upper_ratio
        lower, upper = _pair_slacks(d_src, d_img, m.C)
        if not _pair_ok(lower, upper):
            all_pairs_ok = False
        slack = min(lower, upper)
        if slack < worst_slack:
            worst_slack = slack
            worst_pair = (x, y)
        if d_src > 0 and d_img > 0:
            min_upper_ratio = min(min_upper_ratio, d_img / d_src)

    if exhaustive:
        for x in range(g.n):
            dist_x = g.distances_from(x)
            dh = dist_h(mapping[x])
            for y in range(x + 1, g.n):
                note_pair(x, y, int(dist_x[y]), int(dh[mapping[y]]))
                pairs_checked += 1
    else:
        rng = rng_for(seed, "rough-iso-pairs")
        for _ in range(sample_pairs):
            x = int(rng.integers(g.n))
            y = int(rng.integers(g.n))
            if x == y:
                continue
            d_src = g.distance(x, y)
            d_img = h.distance(mapping[x], mapping[y])
            note_pair(min(x, y), max(x, y), d_src, d_img)
            pairs_checked += 1

    # Rough surjectivity: one multi-source BFS from the image set.
    image = set(mapping)
    dist_to_image = _multi_source_distances(h, image)
    covering_radius = int(dist_to_image.max())
    worst_uncovered = int(dist_to_image.argmax())
    surjectivity_ok = covering_radius <= m.C
    distortion_ok = all_pairs_ok

    return RoughIsometryReport(
        holds=distortion_ok and surjectivity_ok,
        distortion_ok=distortion_ok,
        surjectivity_ok=surjectivity_ok,
        exhaustive=exhaustive,
        pairs_checked=pairs_checked,
        worst_pair=worst_pair,
        worst_pair_slack=worst_slack if worst_pair else math.inf,
        worst_uncovered=worst_uncovered,
        covering_radius=covering_radius,
        min_upper_ratio=min_upper_ratio,
    )


def _multi_source_distances(g: Graph, sources) -> np.ndarray:
    from collections import deque
    dist = np.full(g.n, -1, dtype=np.int32)
    queue = deque()
    for s in sorted(sources):
        dist[s] = 0
        queue.append(s)
    while queue:
        v = queue.popleft()
        for w in g.adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


class RoughMapInvalidError(ValueError):
    """Input map failed its rough-isometry verification."""


def rough_inverse(m: RoughMap, verify_input: bool = True) -> RoughMap:
    """The almost-inverse psi(x') = argmin_x d(x', phi(x)), constant 4C^2.

    Ties break toward the smallest source vertex id.  The returned map
    satisfies d(x, phi(psi(x))) <= C for every target vertex x.
    """
    if verify_input:
        rep = check_rough_isometry(m)
        if not rep.holds:
            raise RoughMapInvalidError(
                f"input map fails verification (worst pair {rep.worst_pair}, "
                f"slack {rep.worst_pair_slack}, covering {rep.covering_radius})")
    g, h = m.source, m.target
    # Order sources by vertex id so the first minimizer wins ties.
    inverse = np.full(h.n, -1, dtype=np.int64)
    best = np.full(h.n, np.iinfo(np.int32).max, dtype=np.int64)
    for x in range(g.n):
        d = h.distances_from(m.mapping[x])
        better = d < best
        best[better] = d[better]
        inverse[better] = x
    return RoughMap(h, g, tuple(int(v) for v in inverse), 4.0 * m.C * m.C)


def inverse_closeness(m: RoughMap, inv: RoughMap) -> int:
    """max over target vertices x of d(x, phi(psi(x)))."""
    h = m.target
    worst = 0
    for x in range(h.n):
        worst = max(worst, h.distance(x, m.mapping[inv.mapping[x]]))
    return worst


def compose(m1: RoughMap, m2: RoughMap, C: float | None = None) -> RoughMap:
    """phi2 after phi1.  The upper distortion composes to C1*C2; the claimed
    constant defaults to C1*C2 + C2 which also covers the additive slack in
    the lower inequality at verification time."""
    if m1.target is not m2.source and m1.target.n != m2.source.n:
        raise ValueError("composition domains do not match")
    mapping = tuple(m2.mapping[v] for v in m1.mapping)
    claimed = C if C is not None else m1.C * m2.C + m2.C
    return RoughMap(m1.source, m2.target, mapping, claimed)


@dataclass
class ImageBoundReport:
    image_size: int
    bound: float
    holds: bool


def image_size_lower_bound(m: RoughMap, A) -> ImageBoundReport:
    """|phi(A)| against the bound |A| / v_bar_source(C).

    Vertices at distance >= C share no image, so any fiber sits inside a
    source ball of radius floor(C); the bound divides |A| by the largest
    such ball.
    """
    A_list = sorted(set(int(a) for a in A))
    if not A_list:
        return ImageBoundReport(0, 0.0, True)
    image_size = len(m.image(A_list))
    r = int(math.floor(m.C))
    v_bar = 0
    for x in range(m.source.n):
        dist = m.source.distances_from(x, cutoff=r)
        v_bar = max(v_bar, int(((dist >= 0) & (dist <= r)).sum()))
    bound = len(A_list) / v_bar
    return ImageBoundReport(image_size, bound, image_size >= bound)


# -- stock families used by tests and the CLI ---------------------------------


def torus_translation(g: Graph, shift) -> RoughMap:
    """Distance-preserving translation of a torus by an integer vector."""
    if g.generator_tag != "torus":
        raise ValueError("torus_translation requires a torus graph")
    dim, side = g.params["dim"], g.params["side"]
    shift = [int(s) % side for s in shift]
    if len(shift) != dim:
        raise ValueError("shift length must equal torus dimension")
    strides = [side ** i for i in range(dim)]
    mapping = []
    for v in range(g.n):
        w = 0
        for axis in range(dim):
            coord = (v // strides[axis]) % side
            w += ((coord + shift[axis]) % side) * strides[axis]
        mapping.append(w)
    return RoughMap(g, g, tuple(mapping), 1.0)


def cycle_rotation(g: Graph, shift: int) -> RoughMap:
    if g.generator_tag != "cycle":
        raise ValueError("cycle_rotation requires a cycle graph")
    n = g.params["n"]
    return RoughMap(g, g, tuple((v + shift) % n for v in range(n)), 1.0)


def identity_map(g: Graph) -> RoughMap:
    return RoughMap(g, g, tuple(range(g.n)), 1.0)


def parse_map(text: str, source: Graph, target: Graph, C: float) -> RoughMap:
    """Map file format: one 'src dst' pair per line."""
    mapping = [-1] * source.n
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad map line: {ln!r}")
        src, dst = int(parts[0]), int(parts[1])
        mapping[src] = dst
    if any(v < 0 for v in mapping):
        missing = [i for i, v in enumerate(mapping) if v < 0]
        raise ValueError(f"map not total; missing sources {missing[:5]}")
    return RoughMap(source, target, tuple(mapping), C)


def format_map(m: RoughMap) -> str:
    return "\n".join(f"{v} {w}" for v, w in enumerate(m.mapping)) + "\n"
