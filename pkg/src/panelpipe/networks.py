"""Build right-hand-rule-compliant networks from ordered cross-sections.

Sorting conventions (all machine-checked by orientation tests):

* lifting surfaces: rows run root to tip; upper-surface columns run
  trailing edge to leading edge, lower-surface columns leading edge to
  trailing edge; the two networks share their LE and TE point rows exactly
* fuselage: rows run nose to tail, columns clockwise from the top in the
  tail-on view; a collapsed nose/tail ring is allowed and flagged
* wake: two rows (TE, TE + length * direction), columns follow the TE row
"""

from __future__ import annotations

import numpy as np

from .errors import (
    AsymmetricGeometry,
    MissingTrailingEdge,
    NonMatchingSectionCounts,
    OpenSectionLoop,
)
from .geometry import ComponentKind, StructuredNetwork
from .meshfile import AXIS_INDEX, CrossSection, order_section_points

# Largest tolerated ratio of max to median consecutive spacing along a
# section loop before it is considered open (e.g. only one surface present).
_LOOP_GAP_RATIO = 6.0

_LIFTING_KINDS = {
    "wing": (ComponentKind.WING_UPPER, ComponentKind.WING_LOWER),
    "htail": (ComponentKind.HTAIL_UPPER, ComponentKind.HTAIL_LOWER),
}


def _dedup_closing_point(pts: np.ndarray, tol: float) -> np.ndarray:
    if len(pts) > 2 and np.linalg.norm(pts[0] - pts[-1]) <= tol:
        return pts[:-1]
    return pts


def _check_loop_closed(pts: np.ndarray, name: str):
    gaps = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    med = np.median(gaps)
    if med > 0 and gaps.max() > _LOOP_GAP_RATIO * med:
        raise OpenSectionLoop(
            f"{name}: largest gap along the section loop is {gaps.max():g} "
            f"vs median spacing {med:g}; section does not close"
        )


def _split_airfoil_loop(pts: np.ndarray, chord_axis: int, name: str):
    """Split a closed airfoil loop into TE->LE upper and LE->TE lower chains.

    LE is the point of minimum chordwise coordinate, TE the maximum; ties
    broken by z descending. The chain with the larger mean height is upper.
    """
    n = len(pts)
    c = pts[:, chord_axis]
    z = pts[:, 2]
    le = int(np.lexsort((-z, c))[0])
    te = int(np.lexsort((-z, -c))[0])
    if le == te:
        raise MissingTrailingEdge(f"{name}: cannot tell leading from trailing edge")

    def walk(i, j, step):
        idx = [i]
        k = i
        while k != j:
            k = (k + step) % n
            idx.append(k)
        return idx

    fwd = walk(te, le, +1)
    bwd = walk(te, le, -1)
    if np.mean(z[fwd]) >= np.mean(z[bwd]):
        upper_idx, lower_rev = fwd, bwd
    else:
        upper_idx, lower_rev = bwd, fwd
    upper = pts[upper_idx]  # TE -> LE
    lower = pts[lower_rev[::-1]]  # LE -> TE
    return upper, lower


def build_lifting_surface(
    sections: list[CrossSection],
    component: str = "wing",
    name: str | None = None,
    chord_axis: str = "x",
    loop_tol: float = 0.0,
):
    """Sort airfoil section loops into upper/lower networks.

    Sections must be closed loops with identical point counts; the result
    is independent of the loops' starting point and direction.
    """
    if component not in _LIFTING_KINDS:
        raise ValueError(f"component must be one of {sorted(_LIFTING_KINDS)}")
    upper_kind, lower_kind = _LIFTING_KINDS[component]
    name = name or component
    ca = AXIS_INDEX[chord_axis]

    span_axis = "y" if chord_axis == "x" else "x"
    uppers, lowers = [], []
    counts = set()
    for k, sec in enumerate(sections):
        pts = order_section_points(np.asarray(sec.points, dtype=float), span_axis)
        pts = _dedup_closing_point(pts, loop_tol)
        _check_loop_closed(pts, f"{name} section {k}")
        up, lo = _split_airfoil_loop(pts, ca, f"{name} section {k}")
        uppers.append(up)
        lowers.append(lo)
        counts.add((len(up), len(lo)))
    if len(counts) != 1:
        raise NonMatchingSectionCounts(
            f"{name}: sections split into differing point counts {sorted(counts)}"
        )

    upper = StructuredNetwork(name=f"{name}_upper", kind=upper_kind, points=np.stack(uppers))
    lower = StructuredNetwork(name=f"{name}_lower", kind=lower_kind, points=np.stack(lowers))
    return upper, lower


def build_fuselage(
    sections: list[CrossSection], name: str = "fuselage", axis: str = "x"
) -> StructuredNetwork:
    """Assemble body-of-revolution sections into one network.

    Rings are closed by duplicating the first point as a seam column;
    collapsed (zero-radius) nose/tail rings are detected and flagged.
    """
    if len(sections) < 2:
        raise ValueError(f"{name}: need at least two sections")
    counts = {len(s.points) for s in sections}
    if len(counts) != 1:
        raise NonMatchingSectionCounts(f"{name}: ring point counts differ: {sorted(counts)}")

    rows = []
    collapsed = []
    for sec in sections:
        pts = order_section_points(np.asarray(sec.points, dtype=float), axis)
        ring = np.vstack([pts, pts[:1]])  # seam duplicate closes the ring
        rows.append(ring)
        spread = np.linalg.norm(pts - pts.mean(axis=0), axis=1).max()
        collapsed.append(spread)
    grid = np.stack(rows)
    scale = np.linalg.norm(grid.reshape(-1, 3).max(axis=0) - grid.reshape(-1, 3).min(axis=0))
    flags = []
    if collapsed[0] <= 1e-9 * scale:
        flags.append("row0")
    if collapsed[-1] <= 1e-9 * scale:
        flags.append("row_end")
    return StructuredNetwork(
        name=name, kind=ComponentKind.FUSELAGE, points=grid, collapsed_edges=tuple(flags)
    )


def _seam_duplicated(net: StructuredNetwork, tol: float) -> bool:
    return bool(np.all(np.linalg.norm(net.points[:, 0] - net.points[:, -1], axis=1) <= tol))


def apply_symmetry(networks, tol: float = 1e-9):
    """Trim mirror-symmetric networks to their y >= 0 half.

    Returns (half_networks, True); the flag feeds the deck's symmetry
    option. Every retained off-plane point must have a mirror counterpart
    in its own network, else AsymmetricGeometry.
    """
    halves = []
    for net in networks:
        pts = net.points
        scale = max(np.abs(pts).max(), 1.0)
        atol = tol * scale

        y = pts[:, :, 1]
        row_keep = np.all(y >= -atol, axis=1)
        col_keep = np.all(y >= -atol, axis=0)
        if row_keep.all() and col_keep.all():
            _require_mirror(net, pts.reshape(-1, 3), atol)
            halves.append(net)
            continue
        # trim along whichever grid direction does not straddle the plane
        row_straddles = np.any((y.max(axis=1) > atol) & (y.min(axis=1) < -atol))
        col_straddles = np.any((y.max(axis=0) > atol) & (y.min(axis=0) < -atol))
        if not row_straddles and row_keep.any():
            trimmed, flags = _trim_rows(net, row_keep)
        elif not col_straddles and col_keep.any():
            trimmed, flags = _trim_cols(net, col_keep, atol)
        else:
            raise AsymmetricGeometry(
                f"network {net.name!r}: y >= 0 half is not a contiguous sub-grid"
            )
        _require_mirror(net, trimmed.reshape(-1, 3), atol)
        halves.append(
            StructuredNetwork(
                name=net.name,
                kind=net.kind,
                points=trimmed,
                bc_class=net.bc_class,
                collapsed_edges=flags,
            )
        )
    return halves, True


def _trim_rows(net: StructuredNetwork, keep: np.ndarray):
    idx = np.nonzero(keep)[0]
    if not np.all(np.diff(idx) == 1):
        raise AsymmetricGeometry(f"network {net.name!r}: y >= 0 rows are not contiguous")
    flags = []
    for side in net.collapsed_edges:
        if side == "row0" and 0 in idx:
            flags.append("row0")
        elif side == "row_end" and (net.n_rows - 1) in idx:
            flags.append("row_end")
        elif side in ("col0", "col_end"):
            flags.append(side)
    return net.points[idx].copy(), tuple(flags)


def _trim_cols(net: StructuredNetwork, keep: np.ndarray, atol: float):
    # A seam-duplicated ring keeps a non-contiguous column set (the
    # duplicate reappears at the far end); drop the duplicate first.
    pts = net.points
    if _seam_duplicated(net, atol) and keep[0] and keep[-1]:
        pts = pts[:, :-1]
        keep = keep[:-1]
    idx = np.nonzero(keep)[0]
    if not np.all(np.diff(idx) == 1):
        # the retained arc may wrap through the seam; rotate so it is contiguous
        gaps = np.nonzero(np.diff(idx) != 1)[0]
        if len(gaps) == 1 and keep[0] and keep[-1]:
            split = gaps[0] + 1
            idx = np.concatenate([idx[split:], idx[:split] + pts.shape[1]])
            pts = np.concatenate([pts, pts], axis=1)
        else:
            raise AsymmetricGeometry(f"network {net.name!r}: y >= 0 columns are not contiguous")
    flags = [s for s in net.collapsed_edges if s in ("row0", "row_end")]
    return pts[:, idx].copy(), tuple(flags)


def _require_mirror(net: StructuredNetwork, kept: np.ndarray, atol: float):
    off_plane = kept[kept[:, 1] > atol]
    if len(off_plane) == 0:
        return
    all_pts = net.points.reshape(-1, 3)
    mirrored = off_plane * np.array([1.0, -1.0, 1.0])
    # nearest-neighbour check; meshes are small enough for the dense form
    d = np.linalg.norm(mirrored[:, None, :] - all_pts[None, :, :], axis=2).min(axis=1)
    worst = float(d.max())
    if worst > 10.0 * atol:
        raise AsymmetricGeometry(
            f"network {net.name!r}: point mirror missing by {worst:g} "
            f"(tolerance {10.0 * atol:g})"
        )


def attach_wake(
    upper: StructuredNetwork,
    lower: StructuredNetwork,
    wake_length_chords: float = 20.0,
    direction=None,
    name: str | None = None,
) -> StructuredNetwork:
    """Extrude a flat wake network from the shared trailing-edge row.

    The wake is rigid and aligned with ``direction`` (freestream at zero
    incidence, +x by default); its length is measured in root chords.
    """
    te_u = upper.points[:, 0]
    te_l = lower.points[:, -1]
    scale = max(np.abs(upper.points).max(), 1.0)
    if te_u.shape != te_l.shape or not np.allclose(te_u, te_l, atol=1e-9 * scale):
        raise MissingTrailingEdge(
            f"{upper.name}/{lower.name}: upper and lower networks do not share a TE row"
        )
    chords = np.linalg.norm(upper.points[:, 0] - upper.points[:, -1], axis=1)
    root_chord = float(chords.max())  # grid row 0 may be a tip on full-span grids
    if root_chord <= 0:
        raise MissingTrailingEdge(f"{upper.name}: zero root chord")
    if direction is None:
        direction = np.array([1.0, 0.0, 0.0])
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    downstream = te_u + wake_length_chords * root_chord * d
    pts = np.stack([te_u, downstream])  # rows: TE, downstream
    return StructuredNetwork(
        name=name or f"{upper.name.rsplit('_', 1)[0]}_wake",
        kind=ComponentKind.WAKE,
        points=pts,
        bc_class="wake",
    )
