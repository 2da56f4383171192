"""Verification of declared thick structures on a ball.

A structure declares a constant C, a claimed order, a list of named vertex
subsets (optionally carrying their own nested structures), and D_min, the
finite-scale stand-in for "infinite diameter": no finite computation can
certify infinity, so chain intersections only need diameter >= D_min and
every verdict records the surrogate used.

Order-0 leaves are checked as wide: the probe must find a mid-anchored
quasi-geodesic segment near every eligible vertex, and the divergence of the
subset in its induced metric must fit as linear. The induced metric is the
shortest-path metric of the induced subgraph; a disconnected subset fails
immediately (the stricter of the two readings, and the documented one).
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .divergence import DivergenceParams, div_function_estimate, growth_fit
from .errors import InsufficientData, StructureDepthMismatch
from .graph_core import GraphBall, bfs_distances
from .quasigeodesic import wideness_probe


@dataclass(frozen=True)
class ThickSubset:
    name: str
    vertices: tuple[int, ...]
    substructure: "ThickStructure | None" = None


@dataclass(frozen=True)
class ThickStructure:
    """A declared cover of a ball by subsets with order assignments."""

    C: float
    order: int
    D_min: int
    subsets: tuple[ThickSubset, ...]

    def __post_init__(self):
        if self.C < 0:
            raise ValueError("C must be >= 0")
        if self.order < 0:
            raise ValueError("order must be >= 0")
        if self.D_min < 1:
            raise ValueError("D_min must be >= 1")
        if not self.subsets:
            raise ValueError("structure needs at least one subset")
        for s in self.subsets:
            if not s.vertices:
                raise ValueError(f"subset {s.name!r} is empty")


def structure_from_dict(doc: dict) -> ThickStructure:
    subsets = []
    for entry in doc["subsets"]:
        sub = entry.get("substructure")
        subsets.append(ThickSubset(
            name=entry["name"],
            vertices=tuple(int(v) for v in entry["vertices"]),
            substructure=structure_from_dict(sub) if sub else None,
        ))
    return ThickStructure(C=float(doc["C"]), order=int(doc["order"]),
                          D_min=int(doc["D_min"]), subsets=tuple(subsets))


def structure_to_dict(structure: ThickStructure) -> dict:
    return {
        "C": structure.C,
        "order": structure.order,
        "D_min": structure.D_min,
        "subsets": [
            {
                "name": s.name,
                "vertices": list(s.vertices),
                "substructure": structure_to_dict(s.substructure)
                if s.substructure else None,
            }
            for s in structure.subsets
        ],
    }


def load_structure(path) -> ThickStructure:
    with open(path, "r", encoding="utf-8") as fh:
        return structure_from_dict(json.load(fh))


@dataclass(frozen=True)
class CoverReport:
    ok: bool
    violators: tuple[int, ...]
    C: float


@dataclass(frozen=True)
class ChainReport:
    ok: bool
    edges: tuple[tuple[int, int], ...]
    component_count: int
    D_min: int


def _neighborhood_distances(ball: GraphBall, seeds: Sequence[int],
                            cap: int) -> list[int]:
    dist = [-1] * ball.vertex_count
    queue = deque()
    for s in seeds:
        if dist[s] < 0:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        if dist[u] >= cap:
            continue
        for v in ball.adjacency[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def verify_cover(ball: GraphBall, structure: ThickStructure) -> CoverReport:
    """Every ball vertex must lie within C of some subset; violators are
    reported as data, not errors."""
    for s in structure.subsets:
        for v in s.vertices:
            ball.check_index(v)
    cap = int(math.floor(structure.C))
    covered = [False] * ball.vertex_count
    for s in structure.subsets:
        dist = _neighborhood_distances(ball, s.vertices, cap)
        for v, d in enumerate(dist):
            if 0 <= d <= structure.C:
                covered[v] = True
    violators = tuple(v for v, ok in enumerate(covered) if not ok)
    return CoverReport(ok=not violators, violators=violators, C=structure.C)


def _set_diameter_at_least(ball: GraphBall, vertices: Sequence[int],
                           bound: int) -> bool:
    """Whether the set has ball-metric diameter >= bound (early exit)."""
    if len(vertices) < 2:
        return bound <= 0
    member = set(vertices)
    best = 0
    for s in sorted(member):
        dist = bfs_distances(ball.adjacency, s)
        ecc = max(dist[v] for v in member)
        best = max(best, ecc)
        if best >= bound:
            return True
    return best >= bound


def verify_chains(ball: GraphBall, structure: ThickStructure) -> ChainReport:
    """Chain connectivity: subsets i, j are linked when N_C(Y_i) meets Y_j in
    a set of diameter >= D_min (either orientation); ok iff the link graph
    is connected."""
    m = len(structure.subsets)
    cap = int(math.floor(structure.C))
    near = []
    for s in structure.subsets:
        dist = _neighborhood_distances(ball, s.vertices, cap)
        near.append([0 <= d <= structure.C for d in dist])
    edges = []
    linked = [[False] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            meet_ij = [v for v in structure.subsets[j].vertices if near[i][v]]
            meet_ji = [v for v in structure.subsets[i].vertices if near[j][v]]
            if (_set_diameter_at_least(ball, meet_ij, structure.D_min)
                    or _set_diameter_at_least(ball, meet_ji, structure.D_min)):
                edges.append((i, j))
                linked[i][j] = linked[j][i] = True
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in range(m):
            if linked[u][v] and v not in seen:
                seen.add(v)
                stack.append(v)
    components = m - len(seen) + 1 if len(seen) < m else 1
    return ChainReport(ok=len(seen) == m, edges=tuple(edges),
                       component_count=components, D_min=structure.D_min)


@dataclass(frozen=True)
class WidenessProbeConfig:
    segment_length: int = 8
    u_cap: int = 6


@dataclass(frozen=True)
class DivergenceCheckConfig:
    params: DivergenceParams = field(default_factory=DivergenceParams)
    margin: float = 3.0
    protocol: str = "auto"
    seed: int = 0
    n_min: int = 2
    n_max_cap: int = 12
    pairs_per_n: int = 8
    c_per_pair: int = 4
    slope_band: tuple[float, float] = (0.8, 1.2)


@dataclass(frozen=True)
class LeafVerdict:
    name: str
    connected: bool
    probe_pass_fraction: float | None
    divergence_verdict: str
    divergence_slope: float | None
    wide_ok: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": "leaf",
            "connected": self.connected,
            "probe_pass_fraction": self.probe_pass_fraction,
            "divergence_verdict": self.divergence_verdict,
            "divergence_slope": self.divergence_slope,
            "wide_ok": self.wide_ok,
        }


@dataclass(frozen=True)
class ThickVerdict:
    cover_ok: bool
    chain_ok: bool
    recursive_ok: bool
    overall: bool
    cover: CoverReport
    chain: ChainReport
    subset_verdicts: tuple
    D_min: int
    order: int

    def to_dict(self) -> dict:
        return {
            "kind": "structure",
            "order": self.order,
            "surrogate_D_min": self.D_min,
            "cover_ok": self.cover_ok,
            "chain_ok": self.chain_ok,
            "recursive_ok": self.recursive_ok,
            "overall": self.overall,
            "cover_violators": list(self.cover.violators[:50]),
            "chain_edges": [list(e) for e in self.chain.edges],
            "subsets": [v.to_dict() for v in self.subset_verdicts],
        }


@dataclass(frozen=True)
class SubsetVerdict:
    name: str
    verdict: "ThickVerdict | LeafVerdict"

    @property
    def ok(self) -> bool:
        if isinstance(self.verdict, ThickVerdict):
            return self.verdict.overall
        return self.verdict.wide_ok

    def to_dict(self) -> dict:
        doc = self.verdict.to_dict()
        doc["name"] = self.name
        return doc


def _check_nesting(structure: ThickStructure) -> None:
    for s in structure.subsets:
        if s.substructure is None:
            continue
        if structure.order == 0:
            raise StructureDepthMismatch(
                f"order-0 structure cannot nest a substructure ({s.name!r})")
        if s.substructure.order >= structure.order:
            raise StructureDepthMismatch(
                f"substructure {s.name!r} claims order {s.substructure.order} "
                f">= parent order {structure.order}")
        _check_nesting(s.substructure)


def induced_ball(ball: GraphBall, vertices: Sequence[int]):
    """Ball on the induced subgraph of `vertices`, or None if disconnected
    or too small to carry edges. Returns (sub_ball, original_labels)."""
    verts = sorted(set(vertices))
    rank = {v: i for i, v in enumerate(verts)}
    adjacency = []
    for v in verts:
        adjacency.append(tuple(rank[u] for u in ball.adjacency[v] if u in rank))
    if len(verts) < 2 or all(not a for a in adjacency):
        return None
    base = min(verts, key=lambda v: (ball.dist_to_base[v], v))
    dist = bfs_distances(adjacency, rank[base])
    if min(dist) < 0:
        return None
    sub = GraphBall(vertex_count=len(verts), base=rank[base],
                    radius=max(dist), adjacency=tuple(adjacency),
                    dist_to_base=tuple(dist))
    return sub, tuple(verts)


def _leaf_wideness(name: str, ball: GraphBall, C: float,
                   probe: WidenessProbeConfig,
                   div: DivergenceCheckConfig) -> LeafVerdict:
    effective_c = max(1.0, C)
    try:
        report = wideness_probe(ball, effective_c, probe.segment_length,
                                u_cap=probe.u_cap)
        frac = report.pass_fraction
    except Exception:
        return LeafVerdict(name=name, connected=True, probe_pass_fraction=None,
                           divergence_verdict="probe-failed",
                           divergence_slope=None, wide_ok=False)
    n_max = min(div.n_max_cap, int(math.floor(ball.radius / div.margin + 1e-9)))
    if n_max < max(div.n_min, 1):
        return LeafVerdict(name=name, connected=True, probe_pass_fraction=frac,
                           divergence_verdict="insufficient-scale",
                           divergence_slope=None, wide_ok=False)
    samples = div_function_estimate(
        ball, n_max, div.params, protocol=div.protocol, seed=div.seed,
        margin=div.margin, n_min=div.n_min, pairs_per_n=div.pairs_per_n,
        c_per_pair=div.c_per_pair)
    try:
        fit = growth_fit(samples, band=div.slope_band)
        verdict, slope = fit.verdict, fit.slope
    except InsufficientData:
        verdict, slope = "insufficient-data", None
    wide = frac == 1.0 and verdict == "linear-compatible"
    return LeafVerdict(name=name, connected=True, probe_pass_fraction=frac,
                       divergence_verdict=verdict, divergence_slope=slope,
                       wide_ok=wide)


def verify_thick(ball: GraphBall, structure: ThickStructure,
                 divergence_params: DivergenceCheckConfig | None = None,
                 qg_params: WidenessProbeConfig | None = None) -> ThickVerdict:
    """Full recursive verdict: coarse cover, chain connectivity through
    large-diameter intersections, and order-0 wideness at the leaves."""
    div = divergence_params or DivergenceCheckConfig()
    probe = qg_params or WidenessProbeConfig()
    _check_nesting(structure)
    cover = verify_cover(ball, structure)
    chain = verify_chains(ball, structure)
    subset_verdicts = []
    for s in structure.subsets:
        induced = induced_ball(ball, s.vertices)
        if induced is None:
            leaf = LeafVerdict(name=s.name, connected=False,
                               probe_pass_fraction=None,
                               divergence_verdict="disconnected",
                               divergence_slope=None, wide_ok=False)
            subset_verdicts.append(SubsetVerdict(name=s.name, verdict=leaf))
            continue
        sub_ball, labels = induced
        if s.substructure is not None:
            remap = {v: i for i, v in enumerate(labels)}
            nested = _remap_structure(s.substructure, remap)
            verdict = verify_thick(sub_ball, nested, div, probe)
        else:
            verdict = _leaf_wideness(s.name, sub_ball, structure.C, probe, div)
        subset_verdicts.append(SubsetVerdict(name=s.name, verdict=verdict))
    recursive_ok = all(v.ok for v in subset_verdicts)
    return ThickVerdict(
        cover_ok=cover.ok, chain_ok=chain.ok, recursive_ok=recursive_ok,
        overall=cover.ok and chain.ok and recursive_ok,
        cover=cover, chain=chain, subset_verdicts=tuple(subset_verdicts),
        D_min=structure.D_min, order=structure.order)


def _remap_structure(structure: ThickStructure, remap: dict) -> ThickStructure:
    subsets = []
    for s in structure.subsets:
        try:
            verts = tuple(remap[v] for v in s.vertices)
        except KeyError as exc:
            raise ValueError(
                f"substructure subset {s.name!r} uses vertex {exc} outside "
                f"its parent subset") from exc
        subsets.append(ThickSubset(
            name=s.name, vertices=verts,
            substructure=_remap_structure(s.substructure, remap)
            if s.substructure else None))
    return ThickStructure(C=structure.C, order=structure.order,
                          D_min=structure.D_min, subsets=tuple(subsets))
