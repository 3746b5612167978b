import numpy as np
import pytest

from panelpipe.errors import DegeneratePanel
from panelpipe.geometry import (
    ComponentKind,
    StructuredNetwork,
    check_orientation,
    constant_direction,
    detect_collapsed_edges,
    enclosed_volume,
    panel_metrics,
    panel_normal,
    radial_from_point,
    reverse_cols,
    reverse_rows,
    transpose,
)
from panelpipe.samples import sphere_network


def _plane_fit_normal(pts):
    """Independent least-squares plane fit via SVD."""
    pts = np.asarray(pts, float)
    centered = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(centered)
    return vt[-1]


def _grid(rows, cols, rng=None, warp=0.0):
    x, y = np.meshgrid(np.arange(cols, dtype=float), np.arange(rows, dtype=float))
    z = np.zeros_like(x)
    pts = np.stack([x, y, z], axis=-1)
    if rng is not None and warp:
        pts = pts + warp * rng.standard_normal(pts.shape)
    return pts


def test_panel_normal_ccw_square():
    n = panel_normal((0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0))
    np.testing.assert_allclose(n, [0, 0, 1], atol=1e-15)


def test_panel_normal_reversed_square():
    n = panel_normal((0, 1, 0), (1, 1, 0), (1, 0, 0), (0, 0, 0))
    np.testing.assert_allclose(n, [0, 0, -1], atol=1e-15)


def test_panel_normal_skewed_quad_matches_plane_fit():
    corners = np.array([(0, 0, 0), (1, 0, 0), (1, 1, 0.2), (0, 1, 0.2)], float)
    n = panel_normal(*corners)
    ref = _plane_fit_normal(corners)
    if ref @ n < 0:
        ref = -ref
    angle = np.arccos(np.clip(n @ ref, -1, 1))
    assert angle < 1e-6


def test_panel_normal_antisymmetric_under_reversal(rng):
    for _ in range(50):
        c = rng.standard_normal((4, 3))
        try:
            n1 = panel_normal(*c)
        except DegeneratePanel:
            continue
        n2 = panel_normal(*c[::-1])
        np.testing.assert_allclose(n2, -n1, atol=1e-12)


def test_panel_normal_rotation_equivariant(rng):
    corners = rng.standard_normal((4, 3))
    n = panel_normal(*corners)
    for _ in range(20):
        q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        nr = panel_normal(*(corners @ q.T))
        np.testing.assert_allclose(nr, q @ n, atol=1e-12)


def test_panel_normal_degenerate_raises():
    with pytest.raises(DegeneratePanel):
        panel_normal((0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0))


def test_metrics_area_matches_shoelace_for_planar_quads(rng):
    # planar but non-rectangular quads: area from the diagonal cross equals
    # the shoelace/triangulation value exactly
    for _ in range(30):
        uv = rng.uniform(-1, 1, size=(4, 2))
        hull_angle = np.arctan2(uv[:, 1] - uv[:, 1].mean(), uv[:, 0] - uv[:, 0].mean())
        uv = uv[np.argsort(hull_angle)]
        pts3 = np.column_stack([uv, np.zeros(4)])
        shoelace = 0.5 * abs(
            sum(
                uv[i, 0] * uv[(i + 1) % 4, 1] - uv[(i + 1) % 4, 0] * uv[i, 1]
                for i in range(4)
            )
        )
        grid = np.array([[pts3[0], pts3[3]], [pts3[1], pts3[2]]])
        net = StructuredNetwork("q", ComponentKind.FUSELAGE, grid)
        area = panel_metrics(net).area[0, 0]
        assert area == pytest.approx(shoelace, rel=1e-12)


def test_unit_normal_magnitude(rng):
    pts = _grid(5, 6, rng, warp=0.05)
    net = StructuredNetwork("g", ComponentKind.FUSELAGE, pts)
    m = panel_metrics(net)
    mags = np.linalg.norm(m.unit_normal.reshape(-1, 3), axis=1)
    np.testing.assert_allclose(mags, 1.0, atol=1e-12)


def test_check_orientation_sphere_all_outward():
    sph = sphere_network(n_axial=12, n_ring=16)
    rep = check_orientation(sph, radial_from_point([0, 0, 0]))
    assert rep.fraction_outward == 1.0
    assert rep.offending == ()


def test_check_orientation_detects_injected_flip():
    sph = sphere_network(n_axial=12, n_ring=16)
    pts = sph.points.copy()
    pts[[5, 6]] = pts[[6, 5]]  # swap one interior row pair
    bad = StructuredNetwork("sphere", ComponentKind.FUSELAGE, pts,
                            collapsed_edges=sph.collapsed_edges)
    rep = check_orientation(bad, radial_from_point([0, 0, 0]))
    assert rep.fraction_outward < 1.0
    flipped_rows = {i for i, _ in rep.offending}
    assert 5 in flipped_rows


def test_check_orientation_flat_wing_up():
    # upper-surface convention: rows root->tip (+y), columns TE->LE (-x)
    pts = _grid(4, 7)[:, ::-1]
    net = StructuredNetwork("w", ComponentKind.WING_UPPER, pts)
    rep = check_orientation(net, constant_direction([0, 0, 1]))
    assert rep.fraction_outward == 1.0


def test_reverse_rows_is_involution(rng):
    pts = _grid(3, 4, rng, warp=0.1)
    net = StructuredNetwork("g", ComponentKind.FUSELAGE, pts)
    again = reverse_rows(reverse_rows(net))
    np.testing.assert_array_equal(again.points, net.points)


@pytest.mark.parametrize("move", [reverse_rows, reverse_cols, transpose])
def test_grid_moves_flip_every_normal(move, rng):
    for _ in range(10):
        pts = _grid(4, 4, rng, warp=0.05)
        net = StructuredNetwork("g", ComponentKind.FUSELAGE, pts)
        n0 = panel_metrics(net).unit_normal
        n1 = panel_metrics(move(net)).unit_normal
        flat0 = n0.reshape(-1, 3)
        flat1 = n1.reshape(-1, 3)
        # the panel set is identical; compare as sets via sorted centroids
        c0 = panel_metrics(net).centroid.reshape(-1, 3)
        c1 = panel_metrics(move(net)).centroid.reshape(-1, 3)
        order0 = np.lexsort(c0.T)
        order1 = np.lexsort(c1.T)
        np.testing.assert_allclose(flat1[order1], -flat0[order0], atol=1e-12)


def test_transpose_swaps_dims(rng):
    net = StructuredNetwork("g", ComponentKind.FUSELAGE, _grid(3, 5))
    t = transpose(net)
    assert (t.n_rows, t.n_cols) == (5, 3)
    np.testing.assert_array_equal(np.transpose(net.points, (1, 0, 2)), t.points)


def test_reverse_rows_flags_complement_on_convex_body():
    sph = sphere_network(n_axial=10, n_ring=12)
    rep = check_orientation(sph, radial_from_point([0, 0, 0]))
    rep_rev = check_orientation(reverse_rows(sph), radial_from_point([0, 0, 0]))
    n_live = sph.n_panels - len(
        [1 for i in (0, sph.n_rows - 2) for _ in range(sph.n_cols - 1)]
    )
    # all live panels outward before, none after
    assert rep.fraction_outward == 1.0
    assert rep_rev.fraction_outward == 0.0


def test_enclosed_volume_sphere():
    sph = sphere_network(n_axial=40, n_ring=48, radius=1.0)
    vol = enclosed_volume([sph])
    assert vol == pytest.approx(4.0 / 3.0 * np.pi, rel=5e-3)


def test_detect_collapsed_edges():
    sph = sphere_network(n_axial=8, n_ring=8)
    assert set(detect_collapsed_edges(sph.points)) == {"row0", "row_end"}


def test_adjacency_guard_rejects_unflagged_coincident_points():
    pts = _grid(3, 3)
    pts[1, 1] = pts[1, 0]
    with pytest.raises(ValueError):
        StructuredNetwork("bad", ComponentKind.FUSELAGE, pts)


def test_nonfinite_coordinates_rejected():
    pts = _grid(2, 2)
    pts[0, 0, 2] = np.nan
    with pytest.raises(ValueError):
        StructuredNetwork("bad", ComponentKind.FUSELAGE, pts)
