"""Activity-aware path planning over a segment graph, and cost-map export.

Each graph segment may be viewed by one camera. Off-line planning prices a
segment by the camera's learned mean activity at the queried minute of
day, and excludes outright any segment whose time-collapsed binary profile
is empty: if no person ever crosses a location, the planner treats it as
untraversable. Real-time planning blends that long-term cost with the
current short-term bands.

The planner is a uniform-cost search over non-negative additive edge
costs; ties break on fewer edges, then lexicographic node ids.

Cost maps follow the ROS map-server convention: a P5 PGM raster plus a
YAML metadata file. Cell costs run 0 (free) to 254 (lethal), 255 meaning
unknown, encoded on disk as ``pixel = 255 - cost``. The activity layer is
splatted from block centers through per-camera homographies and combined
with the static layer by element-wise max, so lethal cells stay lethal.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
import yaml

from .errors import InvalidParameterError, RejectedInputError, UnknownSegmentError
from .filters import BandOutputs
from .isochron import IsochronalStore, minute_of_day
from .motion import MotionFrame

LETHAL_COST = 254
UNKNOWN_COST = 255


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Node:
    node_id: str
    x: float
    y: float


@dataclass(frozen=True)
class Segment:
    segment_id: str
    u: str
    v: str
    length_m: float
    camera_id: str | None = None
    base_cost: float | None = None  # defaults to length_m

    def __post_init__(self) -> None:
        if self.length_m <= 0:
            raise InvalidParameterError(f"segment {self.segment_id}: length must be > 0")
        if self.base_cost is not None and self.base_cost < 0:
            raise InvalidParameterError(f"segment {self.segment_id}: base cost must be >= 0")

    @property
    def traversal_cost(self) -> float:
        return self.length_m if self.base_cost is None else self.base_cost


class PathGraph:
    """Undirected waypoint graph with per-segment camera coverage."""

    def __init__(self, nodes: list[Node], segments: list[Segment]):
        self.nodes: dict[str, Node] = {n.node_id: n for n in nodes}
        self.segments: dict[str, Segment] = {}
        self._adj: dict[str, list[Segment]] = {nid: [] for nid in self.nodes}
        for seg in segments:
            if seg.u not in self.nodes or seg.v not in self.nodes:
                raise RejectedInputError(
                    f"segment {seg.segment_id} references unknown node ({seg.u}, {seg.v})"
                )
            self.segments[seg.segment_id] = seg
            self._adj[seg.u].append(seg)
            self._adj[seg.v].append(seg)

    def neighbors(self, node_id: str) -> list[tuple[str, Segment]]:
        out = []
        for seg in self._adj[node_id]:
            other = seg.v if seg.u == node_id else seg.u
            out.append((other, seg))
        return out

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PathGraph":
        nodes = [Node(str(n["id"]), float(n["x"]), float(n["y"])) for n in obj["nodes"]]
        segments = [
            Segment(
                segment_id=str(e.get("id", f"{e['u']}-{e['v']}")),
                u=str(e["u"]),
                v=str(e["v"]),
                length_m=float(e["len_m"]),
                camera_id=e.get("cam"),
                base_cost=None if e.get("base_cost") is None else float(e["base_cost"]),
            )
            for e in obj["edges"]
        ]
        return cls(nodes, segments)

    @classmethod
    def load(cls, path: str | Path) -> "PathGraph":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_obj(json.load(fh))


# ---------------------------------------------------------------------------
# Costs
# ---------------------------------------------------------------------------

def segment_cost(profile: MotionFrame | None, lam: float) -> float:
    """Activity price of one segment: lam times the view's mean density.

    ``None`` marks a segment without camera coverage, which is free.
    """
    if lam <= 0:
        raise InvalidParameterError(f"lam must be > 0, got {lam}")
    if profile is None:
        return 0.0
    return lam * float(profile.density.mean())


@dataclass
class PlanCost:
    value: float
    feasible: bool
    degraded: bool = False


def _segment_feasible(seg: Segment, profiles: Mapping[str, np.ndarray]) -> bool:
    # Segments without coverage are never excluded: no camera is not
    # evidence that people avoid the spot.
    if seg.camera_id is None:
        return True
    profile = profiles.get(seg.camera_id)
    if profile is None:
        return True
    return bool(profile.any())


def _store_profile(stores: Mapping[str, IsochronalStore], seg: Segment, minute: int):
    if seg.camera_id is None or seg.camera_id not in stores:
        return None
    mean, _, _ = stores[seg.camera_id].query(minute)
    return mean


def cost1(
    segment_ids: list[str],
    t_star: int,
    graph: PathGraph,
    stores: Mapping[str, IsochronalStore],
    profiles: Mapping[str, np.ndarray],
    lam: float = 1.0,
) -> PlanCost:
    """Off-line activity cost of a segment sequence at minute ``t_star``.

    Infeasible (non-finite) when any covered segment has an empty binary
    profile.
    """
    total = 0.0
    for sid in segment_ids:
        if sid not in graph.segments:
            raise UnknownSegmentError(sid)
        seg = graph.segments[sid]
        if not _segment_feasible(seg, profiles):
            return PlanCost(value=math.inf, feasible=False)
        total += segment_cost(_store_profile(stores, seg, t_star), lam)
    return PlanCost(value=total, feasible=True)


def cost2(
    segment_ids: list[str],
    t_ms: int,
    graph: PathGraph,
    stores: Mapping[str, IsochronalStore],
    live_bands: Mapping[str, BandOutputs],
    w1: float = 0.5,
    w2: float = 0.5,
    lam: float = 1.0,
    staleness_s: float = 5.0,
    include_moving: bool = False,
) -> PlanCost:
    """Real-time cost: w1 x off-line cost at the current minute plus w2 x
    live short-term activity.

    Live bands older than ``staleness_s`` (or missing) are dropped from
    the w2 term and the result is flagged degraded.
    """
    if w1 < 0 or w2 < 0:
        raise InvalidParameterError("weights must be >= 0")
    if w1 + w2 <= 0:
        raise InvalidParameterError("w1 + w2 must be > 0 in real-time mode")
    offline = cost1(segment_ids, minute_of_day(t_ms), graph, stores, profiles_from_stores(stores), lam)
    if not offline.feasible:
        return offline

    live_total = 0.0
    degraded = False
    for sid in segment_ids:
        seg = graph.segments[sid]
        if seg.camera_id is None:
            continue
        bands = live_bands.get(seg.camera_id)
        if bands is None or abs(t_ms - bands.timestamp_ms) > staleness_s * 1000.0:
            degraded = True
            continue
        live_total += segment_cost(bands.m_s1, lam)
        if include_moving:
            live_total += segment_cost(bands.m_s2, lam)
    return PlanCost(value=w1 * offline.value + w2 * live_total, feasible=True, degraded=degraded)


def profiles_from_stores(
    stores: Mapping[str, IsochronalStore], epsilon: float = 1e-3
) -> dict[str, np.ndarray]:
    """Binary support profiles for every camera with a store."""
    return {cam: store.binarize(epsilon) for cam, store in stores.items()}


# ---------------------------------------------------------------------------
# Planner
# ---------------------------------------------------------------------------

MODE_OFFLINE = "offline"
MODE_REALTIME = "realtime"


@dataclass(frozen=True)
class PlanQuery:
    origin: str
    goal: str
    mode: str = MODE_OFFLINE
    t_star: int = 0         # minute of day (offline mode)
    t_ms: int = 0           # wall clock ms (realtime mode)
    w1: float = 0.5
    w2: float = 0.5
    lam: float = 1.0
    staleness_s: float = 5.0
    include_moving: bool = False

    def __post_init__(self) -> None:
        if self.mode not in (MODE_OFFLINE, MODE_REALTIME):
            raise InvalidParameterError(f"unknown plan mode {self.mode!r}")
        if self.w1 < 0 or self.w2 < 0:
            raise InvalidParameterError("weights must be >= 0")
        if self.mode == MODE_REALTIME and self.w1 + self.w2 <= 0:
            raise InvalidParameterError("w1 + w2 must be > 0 in realtime mode")


@dataclass
class SegmentBreakdown:
    segment_id: str
    base: float
    activity: float


@dataclass
class PlanResult:
    found: bool
    nodes: list[str] = field(default_factory=list)
    segments: list[SegmentBreakdown] = field(default_factory=list)
    total_cost: float = math.inf
    degraded: bool = False

    def to_json_obj(self) -> dict:
        return {
            "feasible": self.found,
            "nodes": self.nodes,
            "total_cost": None if math.isinf(self.total_cost) else self.total_cost,
            "degraded": self.degraded,
            "segments": [
                {"id": s.segment_id, "base": s.base, "activity": s.activity}
                for s in self.segments
            ],
        }


def _edge_activity(
    seg: Segment,
    query: PlanQuery,
    stores: Mapping[str, IsochronalStore],
    profiles: Mapping[str, np.ndarray],
    live_bands: Mapping[str, BandOutputs],
) -> tuple[float, bool]:
    """Per-edge (activity cost, degraded flag) in the query's mode."""
    if query.mode == MODE_OFFLINE:
        return segment_cost(_store_profile(stores, seg, query.t_star), query.lam), False

    minute = minute_of_day(query.t_ms)
    longterm = segment_cost(_store_profile(stores, seg, minute), query.lam)
    live = 0.0
    degraded = False
    if seg.camera_id is not None:
        bands = live_bands.get(seg.camera_id)
        if bands is None or abs(query.t_ms - bands.timestamp_ms) > query.staleness_s * 1000.0:
            degraded = True
        else:
            live = segment_cost(bands.m_s1, query.lam)
            if query.include_moving:
                live += segment_cost(bands.m_s2, query.lam)
    return query.w1 * longterm + query.w2 * live, degraded


def plan_path(
    graph: PathGraph,
    query: PlanQuery,
    stores: Mapping[str, IsochronalStore] | None = None,
    live_bands: Mapping[str, BandOutputs] | None = None,
    profile_epsilon: float = 1e-3,
) -> PlanResult:
    """Minimum-cost feasible route from origin to goal.

    Edge cost is traversal cost plus mode-dependent activity cost; routes
    through never-active covered segments are excluded. Returns a
    not-found result (rather than raising) when origin and goal are
    disconnected after exclusions.
    """
    stores = stores or {}
    live_bands = live_bands or {}
    if query.origin not in graph.nodes or query.goal not in graph.nodes:
        raise UnknownSegmentError(f"unknown endpoint {query.origin!r} or {query.goal!r}")
    if query.origin == query.goal:
        raise InvalidParameterError("origin and goal must differ")

    profiles = profiles_from_stores(stores, profile_epsilon)

    edge_cost: dict[str, tuple[float, float, bool]] = {}
    for sid, seg in graph.segments.items():
        if not _segment_feasible(seg, profiles):
            continue
        activity, degraded = _edge_activity(seg, query, stores, profiles, live_bands)
        edge_cost[sid] = (seg.traversal_cost, activity, degraded)

    # Priority embeds the tie-break: cost, then hop count, then the node id
    # sequence. All components only grow along an edge, so the first goal
    # pop is optimal under the full ordering.
    start = (0.0, 0, (query.origin,), [])
    heap = [start]
    best: dict[str, tuple[float, int, tuple[str, ...]]] = {}
    while heap:
        cost, hops, path, seg_ids = heapq.heappop(heap)
        node = path[-1]
        key = (cost, hops, path)
        if node in best and best[node] <= key:
            continue
        best[node] = key
        if node == query.goal:
            breakdown = []
            degraded = False
            for sid in seg_ids:
                base, activity, dg = edge_cost[sid]
                breakdown.append(SegmentBreakdown(sid, base, activity))
                degraded = degraded or dg
            return PlanResult(
                found=True,
                nodes=list(path),
                segments=breakdown,
                total_cost=cost,
                degraded=degraded,
            )
        for other, seg in graph.neighbors(node):
            if other in path or seg.segment_id not in edge_cost:
                continue
            base, activity, _ = edge_cost[seg.segment_id]
            heapq.heappush(
                heap,
                (cost + base + activity, hops + 1, path + (other,), seg_ids + [seg.segment_id]),
            )
    return PlanResult(found=False)


# ---------------------------------------------------------------------------
# Cost maps
# ---------------------------------------------------------------------------

@dataclass
class CostMap:
    """Occupancy cost grid: 0 free .. 254 lethal, 255 unknown."""

    resolution_m: float
    origin_x: float
    origin_y: float
    cells: np.ndarray  # (rows, cols) uint8

    def __post_init__(self) -> None:
        if self.resolution_m <= 0:
            raise InvalidParameterError("resolution must be > 0")
        c = np.asarray(self.cells, dtype=np.uint8)
        if c.ndim != 2:
            raise RejectedInputError(f"cost grid must be 2-D, got shape {c.shape}")
        self.cells = c

    def copy(self) -> "CostMap":
        return CostMap(self.resolution_m, self.origin_x, self.origin_y, self.cells.copy())

    def cell_of(self, x_m: float, y_m: float) -> tuple[int, int] | None:
        col = int(math.floor((x_m - self.origin_x) / self.resolution_m))
        row = int(math.floor((y_m - self.origin_y) / self.resolution_m))
        if 0 <= row < self.cells.shape[0] and 0 <= col < self.cells.shape[1]:
            return row, col
        return None


def write_costmap(map_: CostMap, pgm_path: str | Path, yaml_path: str | Path) -> None:
    """ROS map-server pair. Cost c is stored as pixel 255 - c, so free
    space renders white and lethal cells near black."""
    pgm_path, yaml_path = Path(pgm_path), Path(yaml_path)
    pixels = (255 - map_.cells.astype(np.int16)).astype(np.uint8)
    with open(pgm_path, "wb") as fh:
        fh.write(f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())
    meta = {
        "image": pgm_path.name,
        "resolution": map_.resolution_m,
        "origin": [map_.origin_x, map_.origin_y, 0.0],
        "negate": 0,
        "occupied_thresh": 0.65,
        "free_thresh": 0.196,
    }
    with open(yaml_path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(meta, fh, default_flow_style=None, sort_keys=False)


def read_costmap(pgm_path: str | Path, yaml_path: str | Path) -> CostMap:
    with open(yaml_path, "r", encoding="utf-8") as fh:
        meta = yaml.safe_load(fh)
    from .motion import read_pgm

    gray = read_pgm(pgm_path)
    cells = (255 - gray.pixels.astype(np.int16)).astype(np.uint8)
    origin = meta.get("origin", [0.0, 0.0, 0.0])
    return CostMap(
        resolution_m=float(meta["resolution"]),
        origin_x=float(origin[0]),
        origin_y=float(origin[1]),
        cells=cells,
    )


@dataclass
class ExportReport:
    cells_touched: int
    blocks_skipped: int


def splat_activity(
    static_map: CostMap,
    activity_frames: Mapping[str, MotionFrame],
    homographies: Mapping[str, np.ndarray],
    density_scale: float = 254.0,
) -> tuple[CostMap, ExportReport]:
    """Overlay block activity onto a static map.

    Each camera's homography maps block-center coordinates (bx + 0.5,
    by + 0.5) to world meters; each block's density lands in the containing
    cell, scaled and clipped to [0, 254]. Blocks falling outside the map
    are skipped and counted. The combined map is the element-wise max of
    the static and activity layers.
    """
    if density_scale <= 0:
        raise InvalidParameterError("density_scale must be > 0")
    activity = np.zeros(static_map.cells.shape, dtype=np.uint8)
    skipped = 0
    touched = 0
    for cam_id, frame in sorted(activity_frames.items()):
        h = np.asarray(homographies[cam_id], dtype=np.float64)
        if h.shape != (3, 3):
            raise RejectedInputError(f"homography for {cam_id} must be 3x3, got {h.shape}")
        for by in range(frame.grid_h):
            for bx in range(frame.grid_w):
                d = frame.density[by, bx]
                if d <= 0:
                    continue
                vec = h @ np.array([bx + 0.5, by + 0.5, 1.0])
                if vec[2] == 0:
                    skipped += 1
                    continue
                cell = static_map.cell_of(vec[0] / vec[2], vec[1] / vec[2])
                if cell is None:
                    skipped += 1
                    continue
                cost = min(LETHAL_COST, int(round(d * density_scale)))
                if cost > activity[cell]:
                    activity[cell] = cost
                touched += 1
    combined = static_map.copy()
    combined.cells = np.maximum(static_map.cells, activity)
    return combined, ExportReport(cells_touched=touched, blocks_skipped=skipped)
