"""Independent oracles and small generators shared across the test modules.

Everything here deliberately avoids the library's own shortest-path and
enumeration machinery: brute-force simple-path search, coordinate BFS on the
integer grid, and matrix arithmetic for the nilpotent model, so the tests
check two genuinely different routes.
"""

from collections import deque
from itertools import count
import random

from floydlab.graph_core import build_ball


def min_floyd_over_simple_paths(weighting, u, v):
    """Exhaustive minimum of Floyd path lengths over all simple u-v paths."""
    ball = weighting.ball
    if u == v:
        return 0.0
    best = [float("inf")]
    seen = [False] * ball.vertex_count
    seen[u] = True

    def dfs(x, acc):
        if acc >= best[0]:
            return
        if x == v:
            best[0] = acc
            return
        for y in ball.adjacency[x]:
            if not seen[y]:
                seen[y] = True
                dfs(y, acc + weighting.weight_map[(x, y)])
                seen[y] = False

    dfs(u, 0.0)
    return best[0]


def random_connected_edges(rng: random.Random, n_vertices: int):
    """Random connected simple graph on 0..n_vertices-1: spanning tree plus
    a few extra edges."""
    edges = set()
    for v in range(1, n_vertices):
        edges.add((rng.randrange(v), v))
    extras = rng.randrange(0, n_vertices)
    for _ in range(extras):
        a = rng.randrange(n_vertices)
        b = rng.randrange(n_vertices)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return sorted(edges)


def random_small_ball(rng: random.Random, max_vertices: int = 8):
    n = rng.randrange(2, max_vertices + 1)
    edges = random_connected_edges(rng, n)
    return build_ball(edges, 0, n)


def grid_punctured_distance(a, b, c, threshold, box):
    """BFS on Z^2 coordinates from a to b avoiding the closed L1 ball of
    radius `threshold` around c, restricted to the L1 box of radius `box`
    around the origin. Returns None when disconnected. Independent of any
    GraphBall machinery."""

    def l1(p, q):
        return abs(p[0] - q[0]) + abs(p[1] - q[1])

    def allowed(p):
        return l1(p, (0, 0)) <= box and l1(p, c) > threshold

    if not (allowed(a) and allowed(b)):
        raise ValueError("endpoints must be allowed")
    dist = {a: 0}
    queue = deque([a])
    while queue:
        p = queue.popleft()
        if p == b:
            return dist[p]
        x, y = p
        for q in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if q not in dist and allowed(q):
                dist[q] = dist[p] + 1
                queue.append(q)
    return None


def heisenberg_matrix_words(radius):
    """Word-length table for the discrete Heisenberg group computed with
    3x3 upper-triangular integer matrices, enumerating all words up to the
    given length. Returns {matrix_entries: word_length}."""

    def mul(m, g):
        return tuple(
            tuple(sum(m[i][k] * g[k][j] for k in range(3)) for j in range(3))
            for i in range(3))

    def mat(x, y, z):
        return ((1, x, z), (0, 1, y), (0, 0, 1))

    gens = [mat(1, 0, 0), mat(-1, 0, 0), mat(0, 1, 0), mat(0, -1, 0)]
    identity = mat(0, 0, 0)
    lengths = {identity: 0}
    frontier = [identity]
    for step in range(1, radius + 1):
        nxt = []
        for m in frontier:
            for g in gens:
                image = mul(m, g)
                if image not in lengths:
                    lengths[image] = step
                    nxt.append(image)
        frontier = nxt
    return lengths


def brute_force_word_lengths(model, radius):
    """Word lengths via plain breadth-first multiplication, keyed by
    canonical key; independent of cayley_ball's edge bookkeeping."""
    lengths = {model.canonical_key(model.identity()): 0}
    frontier = [model.identity()]
    for step in range(1, radius + 1):
        nxt = []
        for el in frontier:
            for g in model.generator_labels():
                image = model.multiply(el, g)
                key = model.canonical_key(image)
                if key not in lengths:
                    lengths[key] = step
                    nxt.append(image)
        frontier = nxt
    return lengths


def python_punctured_bfs(ball, source, target, forbidden):
    """Pure-python BFS in ball minus a forbidden vertex set; None if cut."""
    if source == target:
        return 0
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in ball.adjacency[x]:
            if y not in dist and y not in forbidden:
                if y == target:
                    return dist[x] + 1
                dist[y] = dist[x] + 1
                queue.append(y)
    return None


def naive_div_triple(ball, a, b, c, delta, gamma):
    """Reference divergence value using only python BFS over the ball."""
    from floydlab.graph_core import bfs_distances

    d_c = bfs_distances(ball.adjacency, c)
    r = min(d_c[a], d_c[b])
    assert r > 0
    threshold = delta * r - gamma
    if threshold <= 0:
        forbidden = set()
    else:
        forbidden = {v for v, d in enumerate(d_c) if d <= threshold}
    return python_punctured_bfs(ball, a, b, forbidden)
