"""Core geometric types: structured point networks and panel orientation.

A network is a rectangular grid of 3-D points; the panel between grid
lines (i, j) and (i+1, j+1) is traversed corner-wise as

    (i, j) -> (i+1, j) -> (i+1, j+1) -> (i, j+1)

and its normal is the normalized cross product of the two diagonals.
With that traversal, a lifting-surface grid whose rows run root-to-tip
and whose columns run trailing edge to leading edge has normals pointing
up on the upper surface; a body of revolution ringed top -> starboard ->
bottom has normals pointing radially outward.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import DegeneratePanel

# Relative tolerance used for the degenerate-panel guard; scaled by the
# squared diagonal length so it is unit-agnostic.
DEGENERACY_RTOL = 1e-12


class ComponentKind(str, Enum):
    WING_UPPER = "wing_upper"
    WING_LOWER = "wing_lower"
    FUSELAGE = "fuselage"
    HTAIL_UPPER = "htail_upper"
    HTAIL_LOWER = "htail_lower"
    WAKE = "wake"


# Edge identifiers, used both for collapsed-edge flags and abutment pairing.
EDGE_SIDES = ("row0", "row_end", "col0", "col_end")


@dataclass(frozen=True)
class StructuredNetwork:
    """One rectangular surface patch of an aircraft model."""

    name: str
    kind: ComponentKind
    points: np.ndarray  # (n_rows, n_cols, 3) float64
    bc_class: str = "surface"  # "surface" (impermeable) or "wake"
    collapsed_edges: tuple[str, ...] = ()

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 3 or pts.shape[2] != 3:
            raise ValueError(f"network {self.name!r}: points must be (rows, cols, 3)")
        if pts.shape[0] < 2 or pts.shape[1] < 2:
            raise ValueError(f"network {self.name!r}: need at least a 2x2 grid")
        if not np.all(np.isfinite(pts)):
            raise ValueError(f"network {self.name!r}: non-finite coordinates")
        for side in self.collapsed_edges:
            if side not in EDGE_SIDES:
                raise ValueError(f"unknown collapsed edge {side!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        self._check_adjacency()

    def _check_adjacency(self):
        """Adjacent grid points must not coincide except on collapsed edges."""
        pts = self.points
        scale = bbox_diagonal([self])
        tol = 1e-9 * max(scale, 1e-300)
        drow = np.linalg.norm(pts[1:] - pts[:-1], axis=2)  # (r-1, c)
        dcol = np.linalg.norm(pts[:, 1:] - pts[:, :-1], axis=2)  # (r, c-1)
        # A collapsed edge is allowed to contain coincident consecutive points.
        bad_rows = dcol < tol  # (r, c-1): coincident along a row
        bad_cols = drow < tol  # (r-1, c): coincident along a column
        if "row0" in self.collapsed_edges:
            bad_rows[0, :] = False
        if "row_end" in self.collapsed_edges:
            bad_rows[-1, :] = False
        if "col0" in self.collapsed_edges:
            bad_cols[:, 0] = False
        if "col_end" in self.collapsed_edges:
            bad_cols[:, -1] = False
        if bad_rows.any() or bad_cols.any():
            raise ValueError(
                f"network {self.name!r}: coincident adjacent grid points "
                "outside any flagged collapsed edge"
            )

    @property
    def n_rows(self) -> int:
        return self.points.shape[0]

    @property
    def n_cols(self) -> int:
        return self.points.shape[1]

    @property
    def n_panels(self) -> int:
        return (self.n_rows - 1) * (self.n_cols - 1)

    def edge_points(self, side: str) -> np.ndarray:
        """Boundary points of one edge, in grid order."""
        if side == "row0":
            return self.points[0, :]
        if side == "row_end":
            return self.points[-1, :]
        if side == "col0":
            return self.points[:, 0]
        if side == "col_end":
            return self.points[:, -1]
        raise ValueError(f"unknown edge side {side!r}")

    def with_points(self, points: np.ndarray) -> "StructuredNetwork":
        return replace(self, points=points)


@dataclass(frozen=True)
class PanelMetrics:
    """Per-panel area, centroid and unit normal for a network."""

    area: np.ndarray  # (r-1, c-1)
    centroid: np.ndarray  # (r-1, c-1, 3)
    unit_normal: np.ndarray  # (r-1, c-1, 3)


@dataclass(frozen=True)
class OrientationReport:
    fraction_outward: float
    offending: tuple[tuple[int, int], ...] = field(default_factory=tuple)


def bbox_diagonal(networks) -> float:
    pts = np.concatenate([np.asarray(n.points).reshape(-1, 3) for n in networks])
    return float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))


def detect_collapsed_edges(points: np.ndarray, rtol: float = 1e-9) -> tuple[str, ...]:
    """Edges whose points all coincide (within rtol of the grid scale)."""
    pts = np.asarray(points, dtype=float)
    scale = float(np.linalg.norm(pts.reshape(-1, 3).max(axis=0) - pts.reshape(-1, 3).min(axis=0)))
    tol = rtol * max(scale, 1e-300)
    found = []
    for side, edge in (
        ("row0", pts[0, :]),
        ("row_end", pts[-1, :]),
        ("col0", pts[:, 0]),
        ("col_end", pts[:, -1]),
    ):
        spread = np.linalg.norm(edge - edge.mean(axis=0), axis=1).max()
        if spread <= tol:
            found.append(side)
    return tuple(found)


def panel_normal(p1, p2, p3, p4) -> np.ndarray:
    """Unit normal of a quad panel from the cross product of its diagonals.

    Corners are in traversal order; the orientation follows the right-hand
    rule of that ordering. Robust for warped quads and for quads with one
    collapsed (repeated-corner) edge, which degenerate to triangles.
    """
    p1, p2, p3, p4 = (np.asarray(p, dtype=float) for p in (p1, p2, p3, p4))
    d1 = p3 - p1
    d2 = p4 - p2
    n = np.cross(d1, d2)
    mag = np.linalg.norm(n)
    scale = max(np.linalg.norm(d1), np.linalg.norm(d2))
    if mag < DEGENERACY_RTOL * scale * scale or scale == 0.0:
        raise DegeneratePanel("diagonal cross product vanishes")
    return n / mag


def panel_corner_grids(points: np.ndarray):
    """Corner arrays (c1, c2, c3, c4) for every panel of a grid, traversal order."""
    c1 = points[:-1, :-1]
    c2 = points[1:, :-1]
    c3 = points[1:, 1:]
    c4 = points[:-1, 1:]
    return c1, c2, c3, c4


def panel_metrics(net: StructuredNetwork) -> PanelMetrics:
    """Vectorized area/centroid/normal for every panel of a network.

    Panels whose diagonal cross product vanishes entirely (fully collapsed)
    get area 0 and a zero normal; callers on flagged collapsed edges are
    expected to treat them as absent.
    """
    c1, c2, c3, c4 = panel_corner_grids(net.points)
    d1 = c3 - c1
    d2 = c4 - c2
    n = np.cross(d1, d2)
    mag = np.linalg.norm(n, axis=2)
    area = 0.5 * mag
    centroid = 0.25 * (c1 + c2 + c3 + c4)
    safe = np.where(mag > 0, mag, 1.0)
    unit = n / safe[..., None]
    unit[mag == 0] = 0.0
    return PanelMetrics(area=area, centroid=centroid, unit_normal=unit)


def check_orientation(net: StructuredNetwork, outward_ref) -> OrientationReport:
    """Fraction of panels whose normal agrees with an outward reference field.

    ``outward_ref`` maps an (n, 3) array of panel centroids to (n, 3)
    reference directions. Panels with non-positive dot product are listed.
    Zero-area (collapsed) panels are skipped.
    """
    m = panel_metrics(net)
    cent = m.centroid.reshape(-1, 3)
    ref = np.asarray(outward_ref(cent), dtype=float).reshape(-1, 3)
    dots = np.einsum("ij,ij->i", m.unit_normal.reshape(-1, 3), ref)
    live = m.area.reshape(-1) > 0
    bad = live & (dots <= 0.0)
    n_live = int(live.sum())
    frac = 1.0 if n_live == 0 else 1.0 - bad.sum() / n_live
    nc = net.n_cols - 1
    offending = tuple((int(k // nc), int(k % nc)) for k in np.nonzero(bad)[0])
    return OrientationReport(fraction_outward=float(frac), offending=offending)


def constant_direction(v):
    """Outward reference field that is the same direction everywhere."""
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)

    def ref(centroids):
        return np.broadcast_to(v, (len(centroids), 3))

    return ref


def radial_outward(axis_point, axis_dir):
    """Outward reference field pointing radially away from an axis line."""
    p0 = np.asarray(axis_point, dtype=float)
    d = np.asarray(axis_dir, dtype=float)
    d = d / np.linalg.norm(d)

    def ref(centroids):
        rel = centroids - p0
        rad = rel - np.outer(rel @ d, d)
        mag = np.linalg.norm(rad, axis=1)
        mag = np.where(mag > 0, mag, 1.0)
        return rad / mag[:, None]

    return ref


def radial_from_point(center):
    """Outward reference field pointing away from a single point."""
    c = np.asarray(center, dtype=float)

    def ref(centroids):
        rel = centroids - c
        mag = np.linalg.norm(rel, axis=1)
        mag = np.where(mag > 0, mag, 1.0)
        return rel / mag[:, None]

    return ref


def _remap_collapsed(edges: tuple[str, ...], mapping: dict) -> tuple[str, ...]:
    return tuple(mapping[e] for e in edges)


def reverse_rows(net: StructuredNetwork) -> StructuredNetwork:
    """Reverse the row order of the grid. Flips every panel normal."""
    pts = net.points[::-1].copy()
    mapping = {"row0": "row_end", "row_end": "row0", "col0": "col0", "col_end": "col_end"}
    return replace(net, points=pts, collapsed_edges=_remap_collapsed(net.collapsed_edges, mapping))


def reverse_cols(net: StructuredNetwork) -> StructuredNetwork:
    """Reverse the column order of the grid. Flips every panel normal."""
    pts = net.points[:, ::-1].copy()
    mapping = {"row0": "row0", "row_end": "row_end", "col0": "col_end", "col_end": "col0"}
    return replace(net, points=pts, collapsed_edges=_remap_collapsed(net.collapsed_edges, mapping))


def transpose(net: StructuredNetwork) -> StructuredNetwork:
    """Swap rows and columns of the grid. Flips every panel normal."""
    pts = np.transpose(net.points, (1, 0, 2)).copy()
    mapping = {"row0": "col0", "row_end": "col_end", "col0": "row0", "col_end": "row_end"}
    return replace(net, points=pts, collapsed_edges=_remap_collapsed(net.collapsed_edges, mapping))


def enclosed_volume(networks) -> float:
    """Volume enclosed by a set of networks via the divergence theorem.

    Exact for a closed, consistently outward-oriented surface; used as a
    geometry-change diagnostic around abutment repair.
    """
    total = 0.0
    for net in networks:
        if net.bc_class == "wake":
            continue
        m = panel_metrics(net)
        total += np.einsum("ijk,ijk,ij->", m.centroid, m.unit_normal, m.area)
    return abs(total) / 3.0
