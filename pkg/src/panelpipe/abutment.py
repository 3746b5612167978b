"""Network-edge abutment: reporting, polynomial resampling, and welding.

Un-abutted neighbouring edges let the simulated flow leak into the body,
so every network edge is classified (matched / mismatched / on the
symmetry plane / free / collapsed) and mismatched pairs within welding
range can be snapped together. The default snap moves both edges to their
midpoints, which halves the panel distortion of one-sided replacement;
the one-sided mode is kept for fidelity comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CountMismatch, GapTooLarge, IllConditionedFit, InsufficientPoints
from .geometry import EDGE_SIDES, StructuredNetwork, bbox_diagonal

# Default tolerances relative to the model bounding-box diagonal.
REL_TOL = 1e-4
REL_NEAR_LIMIT = 2e-2  # pairing horizon for "mismatched" classification
WELD_FACTOR = 10.0  # enforce refuses gaps beyond WELD_FACTOR * tol


@dataclass(frozen=True)
class EdgePair:
    network_a: str
    edge_a: str
    network_b: str
    edge_b: str
    max_gap: float
    matched: bool


@dataclass(frozen=True)
class AbutmentReport:
    tol: float
    pairs: tuple[EdgePair, ...]
    free_edges: tuple[tuple[str, str], ...]
    on_plane: tuple[tuple[str, str], ...] = ()
    collapsed: tuple[tuple[str, str], ...] = ()

    @property
    def mismatched(self) -> tuple[EdgePair, ...]:
        return tuple(p for p in self.pairs if not p.matched)

    def to_text(self) -> str:
        lines = [f"abutment report (tol {self.tol:g})"]
        for p in self.pairs:
            state = "matched" if p.matched else "MISMATCHED"
            lines.append(
                f"  {state:10s} {p.network_a}.{p.edge_a} <-> {p.network_b}.{p.edge_b} "
                f"gap {p.max_gap:.3e}"
            )
        for net, side in self.on_plane:
            lines.append(f"  on-plane   {net}.{side}")
        for net, side in self.collapsed:
            lines.append(f"  collapsed  {net}.{side}")
        for net, side in self.free_edges:
            lines.append(f"  free       {net}.{side}")
        lines.append(f"  {len(self.mismatched)} mismatched")
        return "\n".join(lines) + "\n"

    def to_records(self) -> str:
        """One machine-readable record per classified edge or pair."""
        recs = []
        for p in self.pairs:
            state = "matched" if p.matched else "mismatched"
            recs.append(
                f"pair {p.network_a} {p.edge_a} {p.network_b} {p.edge_b} {p.max_gap:.9e} {state}"
            )
        for net, side in self.on_plane:
            recs.append(f"edge {net} {side} on-plane")
        for net, side in self.collapsed:
            recs.append(f"edge {net} {side} collapsed")
        for net, side in self.free_edges:
            recs.append(f"edge {net} {side} free")
        return "\n".join(recs) + "\n"


# --- polynomial section fit -----------------------------------------------------


@dataclass(frozen=True)
class SectionFit:
    """Per-coordinate polynomial in the normalized arc-length parameter.

    Coefficients are monomial in u = 2t - 1 (shifted to [-1, 1] for
    conditioning); ``evaluate`` takes the t in [0, 1] parameterization.
    """

    coeffs: np.ndarray  # (3, degree+1)
    params: np.ndarray  # arc-length parameters of the input points, in [0, 1]
    endpoints: np.ndarray  # (2, 3) original first/last points
    degree: int

    def evaluate(self, t) -> np.ndarray:
        u = 2.0 * np.asarray(t, dtype=float) - 1.0
        powers = u[:, None] ** np.arange(self.degree + 1)[None, :]
        return powers @ self.coeffs.T

    def residual(self, points: np.ndarray) -> float:
        return float(np.linalg.norm(self.evaluate(self.params) - points, axis=1).max())


def arc_length_params(points: np.ndarray) -> np.ndarray:
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total <= 0.0:
        raise InsufficientPoints("section has zero arc length")
    return s / total

def fit_section_polynomial(points: np.ndarray, degree: int = 6) -> SectionFit:
    """Least-squares polynomial fit of a section curve over arc length.

    The fit interpolates the first and last points exactly (equality
    constraints via a KKT system); interior points are matched in the
    least-squares sense, coordinate by coordinate.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise ValueError("expected an (n, 2) or (n, 3) point array")
    if pts.shape[1] == 2:
        pts = np.column_stack([pts, np.zeros(len(pts))])
    n = len(pts)
    if n < degree + 2:
        raise InsufficientPoints(
            f"need at least {degree + 2} points for an over-determined degree-{degree} fit"
        )
    t = arc_length_params(pts)
    u = 2.0 * t - 1.0
    V = u[:, None] ** np.arange(degree + 1)[None, :]
    G = V.T @ V
    cond = np.linalg.cond(G)
    if cond > 1e12:
        raise IllConditionedFit(
            f"normal-equations condition {cond:.3e} exceeds 1e12; subdivide the section"
        )
    # KKT system: minimize |Va - y|^2 subject to a(0)=y0, a(1)=y1
    C = np.vstack([V[0], V[-1]])
    m = degree + 1
    kkt = np.zeros((m + 2, m + 2))
    kkt[:m, :m] = 2.0 * G
    kkt[:m, m:] = C.T
    kkt[m:, :m] = C
    coeffs = np.empty((3, m))
    for k in range(3):
        rhs = np.concatenate([2.0 * V.T @ pts[:, k], [pts[0, k], pts[-1, k]]])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError as exc:
            raise IllConditionedFit(str(exc)) from None
        coeffs[k] = sol[:m]
    return SectionFit(coeffs=coeffs, params=t, endpoints=pts[[0, -1]].copy(), degree=degree)


def resample_section(points_or_fit, target_count: int, degree: int = 6) -> np.ndarray:
    """Resample a section onto ``target_count`` uniform arc-length parameters.

    Endpoints are carried over bitwise from the input section.
    """
    if target_count < 2:
        raise ValueError("target_count must be at least 2")
    fit = (
        points_or_fit
        if isinstance(points_or_fit, SectionFit)
        else fit_section_polynomial(points_or_fit, degree=degree)
    )
    t = np.linspace(0.0, 1.0, target_count)
    out = fit.evaluate(t)
    out[0] = fit.endpoints[0]
    out[-1] = fit.endpoints[1]
    return out


# --- edge welding ----------------------------------------------------------------


def _pair_orientation(a: np.ndarray, b: np.ndarray):
    """Pointwise gaps for direct and reversed correspondence; pick the smaller."""
    d_fwd = np.linalg.norm(a - b, axis=1)
    d_rev = np.linalg.norm(a - b[::-1], axis=1)
    if d_fwd.max() <= d_rev.max():
        return d_fwd.max(), False
    return d_rev.max(), True


def enforce_abutment(edge_a: np.ndarray, edge_b: np.ndarray, tol: float, mode: str = "midpoint"):
    """Snap two nearly-coincident edges together; returns the new point rows.

    ``midpoint`` moves both edges to their common midpoints; ``one_sided``
    replaces edge_b's points with edge_a's. Refuses gaps beyond
    10x tolerance rather than welding edges that were never meant to abut.
    """
    a = np.asarray(edge_a, dtype=float)
    b = np.asarray(edge_b, dtype=float)
    if a.shape != b.shape:
        raise CountMismatch(
            f"edge point counts differ ({a.shape[0]} vs {b.shape[0]}); resample first"
        )
    gap, reverse = _pair_orientation(a, b)
    if gap > WELD_FACTOR * tol:
        raise GapTooLarge(
            f"pre-snap gap {gap:g} exceeds {WELD_FACTOR:g} x tol ({WELD_FACTOR * tol:g}); "
            "edges do not plausibly abut"
        )
    bb = b[::-1] if reverse else b
    if mode == "midpoint":
        snapped = 0.5 * (a + bb)
    elif mode == "one_sided":
        snapped = a.copy()
    else:
        raise ValueError(f"unknown snap mode {mode!r}")
    new_a = snapped
    new_b = snapped[::-1] if reverse else snapped
    return new_a.copy(), new_b.copy()


def _edge_assign(points: np.ndarray, side: str, values: np.ndarray) -> np.ndarray:
    pts = points.copy()
    if side == "row0":
        pts[0, :] = values
    elif side == "row_end":
        pts[-1, :] = values
    elif side == "col0":
        pts[:, 0] = values
    elif side == "col_end":
        pts[:, -1] = values
    else:
        raise ValueError(f"unknown edge side {side!r}")
    return pts


def weld_networks(networks, pairs, tol: float, mode: str = "midpoint"):
    """Apply enforce_abutment to the listed edge pairs, in order."""
    nets = {n.name: n for n in networks}
    for p in pairs:
        na = nets[p.network_a]
        nb = nets[p.network_b]
        ea = na.edge_points(p.edge_a)
        eb = nb.edge_points(p.edge_b)
        new_a, new_b = enforce_abutment(ea, eb, tol, mode=mode)
        nets[p.network_a] = na.with_points(_edge_assign(na.points, p.edge_a, new_a))
        na2 = nets[p.network_a]
        if p.network_b == p.network_a:
            nb = na2
        nets[p.network_b] = nb.with_points(_edge_assign(nb.points, p.edge_b, new_b))
    return [nets[n.name] for n in networks]


# --- reporting --------------------------------------------------------------------


@dataclass(frozen=True)
class _Edge:
    net: str
    side: str
    points: np.ndarray
    collapsed: bool


def _gather_edges(networks) -> list[_Edge]:
    edges = []
    for net in networks:
        for side in EDGE_SIDES:
            pts = np.asarray(net.edge_points(side))
            spread = np.linalg.norm(pts - pts.mean(axis=0), axis=1).max()
            scale = max(np.abs(pts).max(), 1.0)
            collapsed = side in net.collapsed_edges or spread <= 1e-12 * scale
            edges.append(_Edge(net.name, side, pts, collapsed))
    return edges


def abutment_report(
    networks,
    tol: float | None = None,
    near_limit: float | None = None,
    symmetric: bool = False,
) -> AbutmentReport:
    """Classify every network edge by its abutment state.

    Matched pairs have a pointwise gap within tolerance; mismatched pairs
    sit within the pairing horizon but outside tolerance (a flow leak);
    remaining edges are free, on the symmetry plane, or collapsed.
    """
    diag = bbox_diagonal(networks)
    if tol is None:
        tol = REL_TOL * diag
    if near_limit is None:
        near_limit = REL_NEAR_LIMIT * diag

    edges = _gather_edges(networks)
    pairs = []
    in_pair: set[int] = set()
    on_plane = []
    collapsed = []
    skip: set[int] = set()
    for idx, e in enumerate(edges):
        if e.collapsed:
            collapsed.append((e.net, e.side))
            skip.add(idx)
        elif symmetric and np.abs(e.points[:, 1]).max() <= tol:
            on_plane.append((e.net, e.side))
            skip.add(idx)

    for i in range(len(edges)):
        if i in skip:
            continue
        for j in range(i + 1, len(edges)):
            if j in skip:
                continue
            a, b = edges[i], edges[j]
            if len(a.points) != len(b.points):
                continue
            gap, _ = _pair_orientation(a.points, b.points)
            if gap <= near_limit:
                pairs.append(
                    EdgePair(
                        network_a=a.net,
                        edge_a=a.side,
                        network_b=b.net,
                        edge_b=b.side,
                        max_gap=float(gap),
                        matched=bool(gap <= tol),
                    )
                )
                in_pair.add(i)
                in_pair.add(j)

    free = [
        (e.net, e.side) for idx, e in enumerate(edges) if idx not in skip and idx not in in_pair
    ]
    return AbutmentReport(
        tol=float(tol),
        pairs=tuple(pairs),
        free_edges=tuple(free),
        on_plane=tuple(on_plane),
        collapsed=tuple(collapsed),
    )
