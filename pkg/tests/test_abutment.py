import numpy as np
import pytest

from panelpipe.abutment import (
    abutment_report,
    enforce_abutment,
    fit_section_polynomial,
    resample_section,
    weld_networks,
)
from panelpipe.errors import CountMismatch, GapTooLarge, InsufficientPoints
from panelpipe.geometry import ComponentKind, StructuredNetwork
from panelpipe.networks import build_fuselage
from panelpipe.samples import revolution_sections, wing_model


def _tet_volume_oracle(networks):
    """Independent divergence-theorem volume: signed tetrahedra from corner
    triangles of every panel, apexed at the origin."""
    total = 0.0
    for net in networks:
        p = net.points
        c1, c2, c3, c4 = p[:-1, :-1], p[1:, :-1], p[1:, 1:], p[:-1, 1:]
        for a, b, c in ((c1, c2, c3), (c1, c3, c4)):
            total += np.einsum("ijk,ijk->", a, np.cross(b, c)) / 6.0
    return abs(total)


def _split_body(n_rings=13, n_ring_pts=16):
    """Closed ogive-cylinder body split into two networks sharing a ring."""
    stations = np.linspace(0.0, 6.0, n_rings)
    radii = 0.8 * np.sin(np.pi * stations / 6.0) ** 0.7
    radii[0] = radii[-1] = 0.0
    secs = revolution_sections(stations, radii, n_ring=n_ring_pts)
    k = n_rings // 2
    front = build_fuselage(secs[: k + 1], name="front")
    rear = build_fuselage(secs[k:], name="rear")
    return front, rear


# --- polynomial fit ----------------------------------------------------------


def test_fit_reproduces_cubic_exactly():
    t = np.linspace(0.0, 1.0, 20)
    pts = np.column_stack([t, 1.0 + t - 2 * t**2 + 0.5 * t**3, np.zeros_like(t)])
    fit = fit_section_polynomial(pts, degree=6)
    assert fit.residual(pts) <= 1e-10


def test_fit_straight_line_kills_high_coefficients():
    t = np.linspace(0.0, 1.0, 12)
    pts = np.column_stack([t, 2.0 * t + 1.0, np.zeros_like(t)])
    fit = fit_section_polynomial(pts, degree=6)
    assert np.abs(fit.coeffs[:, 2:]).max() <= 1e-10


def _constrained_fit_oracle(pts, degree):
    """Independent route: subtract the endpoint line, fit t(t-1)*q(t) by lstsq."""
    from panelpipe.abutment import arc_length_params

    t = arc_length_params(pts)
    line = pts[0][None, :] + t[:, None] * (pts[-1] - pts[0])[None, :]
    w = t * (t - 1.0)
    basis = w[:, None] * (t[:, None] ** np.arange(degree - 1)[None, :])
    resid = pts - line
    sol, *_ = np.linalg.lstsq(basis, resid, rcond=None)
    fitted = line + basis @ sol
    return float(np.linalg.norm(fitted - pts, axis=1).max())


def test_circular_arc_residual_matches_independent_oracle():
    a = np.linspace(0.0, np.pi / 2, 20)
    pts = np.column_stack([np.cos(a), np.sin(a), np.zeros_like(a)])
    fit = fit_section_polynomial(pts, degree=6)
    oracle = _constrained_fit_oracle(pts, degree=6)
    assert abs(fit.residual(pts) - oracle) <= 1e-9


def test_fit_residual_nonincreasing_in_degree():
    a = np.linspace(0.0, np.pi / 2, 24)
    pts = np.column_stack([np.cos(a), np.sin(a), 0.1 * a])
    resid = [
        fit_section_polynomial(pts, degree=d).residual(pts) for d in range(2, 7)
    ]
    for lo_d, hi_d in zip(resid, resid[1:]):
        assert hi_d <= lo_d + 1e-14


def test_fit_needs_enough_points():
    pts = np.column_stack([np.linspace(0, 1, 6), np.zeros(6), np.zeros(6)])
    with pytest.raises(InsufficientPoints):
        fit_section_polynomial(pts, degree=6)


def test_resample_preserves_endpoints_bitwise():
    a = np.linspace(0.0, np.pi / 2, 10)
    pts = np.column_stack([np.cos(a), np.sin(a), np.zeros_like(a)])
    out = resample_section(pts, 17)
    assert out.shape == (17, 3)
    np.testing.assert_array_equal(out[0], pts[0])
    np.testing.assert_array_equal(out[-1], pts[-1])


def test_resample_to_original_count_recovers_points():
    a = np.linspace(0.0, np.pi / 2, 12)
    pts = np.column_stack([np.cos(a), np.sin(a), np.zeros_like(a)])
    fit = fit_section_polynomial(pts, degree=6)
    out = fit.evaluate(fit.params)
    assert np.linalg.norm(out - pts, axis=1).max() <= fit.residual(pts) + 1e-12


def test_resample_two_points_is_endpoints():
    a = np.linspace(0.0, np.pi / 2, 10)
    pts = np.column_stack([np.cos(a), np.sin(a), np.zeros_like(a)])
    out = resample_section(pts, 2)
    np.testing.assert_array_equal(out, pts[[0, -1]])


# --- enforcement --------------------------------------------------------------


def test_enforce_small_gap_welds_to_zero():
    a = np.column_stack([np.linspace(0, 1, 8), np.zeros(8), np.zeros(8)])
    b = a + np.array([0.0, 1e-6, 0.0])
    na, nb = enforce_abutment(a, b, tol=1e-4)
    np.testing.assert_array_equal(na, nb)
    assert np.linalg.norm(na - 0.5 * (a + b), axis=1).max() == 0.0


def test_enforce_far_edges_refused():
    a = np.column_stack([np.linspace(0, 1, 8), np.zeros(8), np.zeros(8)])
    b = a + np.array([0.0, 1.0, 0.0])
    with pytest.raises(GapTooLarge):
        enforce_abutment(a, b, tol=1e-4)


def test_enforce_count_mismatch():
    a = np.zeros((8, 3))
    a[:, 0] = np.linspace(0, 1, 8)
    b = np.zeros((9, 3))
    b[:, 0] = np.linspace(0, 1, 9)
    with pytest.raises(CountMismatch):
        enforce_abutment(a, b, tol=1e-4)


def test_enforce_handles_reversed_edges():
    a = np.column_stack([np.linspace(0, 1, 8), np.zeros(8), np.zeros(8)])
    b = (a + np.array([0.0, 2e-5, 0.0]))[::-1]
    na, nb = enforce_abutment(a, b, tol=1e-4)
    np.testing.assert_array_equal(na, nb[::-1])


def test_enforce_is_idempotent():
    a = np.column_stack([np.linspace(0, 1, 8), np.zeros(8), 0.01 * np.ones(8)])
    b = a + np.array([0.0, 3e-5, -1e-5])
    na, nb = enforce_abutment(a, b, tol=1e-4)
    na2, nb2 = enforce_abutment(na, nb, tol=1e-4)
    np.testing.assert_array_equal(na, na2)
    np.testing.assert_array_equal(nb, nb2)


def test_one_sided_mode_keeps_edge_a():
    a = np.column_stack([np.linspace(0, 1, 8), np.zeros(8), np.zeros(8)])
    b = a + np.array([0.0, 5e-5, 0.0])
    na, nb = enforce_abutment(a, b, tol=1e-4, mode="one_sided")
    np.testing.assert_array_equal(na, a)
    np.testing.assert_array_equal(nb, a)


def test_weld_restores_volume_within_tenth_percent():
    front, rear = _split_body()
    vol0 = _tet_volume_oracle([front, rear])
    pts = rear.points.copy()
    pts[0] += np.array([0.0, 0.008, 0.0])  # translate the shared ring
    rear_shifted = StructuredNetwork(rear.name, rear.kind, pts, collapsed_edges=rear.collapsed_edges)
    rep = abutment_report([front, rear_shifted], tol=1e-4)
    bad = rep.mismatched
    assert len(bad) == 1
    welded = weld_networks([front, rear_shifted], bad, rep.tol)
    rep2 = abutment_report(welded, tol=1e-4)
    assert not rep2.mismatched
    vol1 = _tet_volume_oracle(welded)
    assert abs(vol1 - vol0) / vol0 < 1e-3


# --- reporting ----------------------------------------------------------------


def test_clean_split_body_fully_matched():
    front, rear = _split_body()
    rep = abutment_report([front, rear], tol=1e-6)
    assert not rep.mismatched
    shared = [
        p
        for p in rep.pairs
        if {p.network_a, p.network_b} == {"front", "rear"}
    ]
    assert len(shared) == 1 and shared[0].matched


def test_fault_injection_reports_exactly_the_bordering_edges():
    front, rear = _split_body()
    pts = rear.points.copy()
    pts[0] += np.array([0.0, 0.01, 0.0])
    rear_shifted = StructuredNetwork(rear.name, rear.kind, pts, collapsed_edges=rear.collapsed_edges)
    rep = abutment_report([front, rear_shifted], tol=1e-4)
    bad = rep.mismatched
    assert len(bad) == 1
    names = {(bad[0].network_a, bad[0].edge_a), (bad[0].network_b, bad[0].edge_b)}
    assert names == {("front", "row_end"), ("rear", "row0")}
    assert bad[0].max_gap == pytest.approx(0.01, rel=1e-9)


def test_isolated_wing_wake_edge_is_free():
    up, lo, wake = wing_model(n_sections=7, n_chord=13)
    rep = abutment_report([up, lo, wake], tol=None)
    assert not rep.mismatched
    assert ("wing_wake", "row_end") in rep.free_edges


def test_wing_root_vs_fuselage_row_weld():
    # a wing-root-like edge sitting just off a fuselage surface row
    secs = revolution_sections(np.linspace(0, 4, 9), np.full(9, 0.5), n_ring=12)
    fus = build_fuselage(secs, name="fus")
    side_row = fus.edge_points("row0")
    shifted = side_row + np.array([2e-4, 0.0, 0.0])
    na, nb = enforce_abutment(side_row, shifted, tol=1e-3)
    assert np.linalg.norm(na - nb, axis=1).max() == 0.0


def test_on_plane_and_collapsed_classification(demo_cfg):
    from panelpipe.pipeline import build_networks

    built = build_networks(demo_cfg)
    rep = built.report
    assert not rep.mismatched
    assert ("fuselage_nose", "row0") in rep.collapsed
    assert ("fuselage_tail", "row_end") in rep.collapsed
    on_plane_nets = {n for n, _ in rep.on_plane}
    assert "wing_upper" in on_plane_nets and "fuselage_mid" in on_plane_nets
    free = set(rep.free_edges)
    assert ("wing_wake", "row_end") in free and ("htail_wake", "row_end") in free
