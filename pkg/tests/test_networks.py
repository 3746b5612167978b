import numpy as np
import pytest

from panelpipe.errors import AsymmetricGeometry, NonMatchingSectionCounts, OpenSectionLoop
from panelpipe.geometry import check_orientation, constant_direction, radial_outward
from panelpipe.meshfile import CrossSection
from panelpipe.networks import apply_symmetry, attach_wake, build_fuselage, build_lifting_surface
from panelpipe.samples import airfoil_loop, revolution_sections, wing_sections


def _biconvex_sections(n_sections=5, n_chord=15, camber=0.0):
    return wing_sections(
        half_span=2.0,
        root_chord=1.0,
        n_sections=n_sections,
        n_chord=n_chord,
        thickness=0.10,
        camber=camber,
        close_tip=False,
        half=False,
    )


def test_symmetric_sections_give_mirror_networks():
    up, lo = build_lifting_surface(_biconvex_sections(), name="w")
    mirrored = lo.points.copy()
    mirrored[:, :, 2] = -mirrored[:, :, 2]
    np.testing.assert_array_equal(up.points, mirrored[:, ::-1])


def test_shared_le_te_rows_exact():
    up, lo = build_lifting_surface(_biconvex_sections(camber=0.02), name="w")
    np.testing.assert_array_equal(up.points[:, 0], lo.points[:, -1])  # TE
    np.testing.assert_array_equal(up.points[:, -1], lo.points[:, 0])  # LE


def test_sorting_is_idempotent():
    secs = _biconvex_sections(camber=0.02)
    up1, lo1 = build_lifting_surface(secs, name="w")
    # feed the already-ordered loops back in
    secs2 = [
        CrossSection(station=s.station, points=s.points.copy()) for s in secs
    ]
    up2, lo2 = build_lifting_surface(secs2, name="w")
    np.testing.assert_array_equal(up1.points, up2.points)
    np.testing.assert_array_equal(lo1.points, lo2.points)


def test_reversed_loop_input_still_te_to_le(rng):
    secs = _biconvex_sections(camber=0.02)
    rev = [CrossSection(s.station, s.points[::-1].copy()) for s in secs]
    up, lo = build_lifting_surface(rev, name="w")
    # monotonicity oracle: chordwise coordinate strictly decreasing TE -> LE
    assert (np.diff(up.points[:, :, 0], axis=1) < 0).all()
    assert (np.diff(lo.points[:, :, 0], axis=1) > 0).all()
    assert check_orientation(up, constant_direction([0, 0, 1])).fraction_outward == 1.0
    assert check_orientation(lo, constant_direction([0, 0, -1])).fraction_outward == 1.0


def test_half_airfoil_raises_open_loop():
    loop = airfoil_loop(1.0, 15, thickness=0.1)
    upper_only = loop[:15]  # TE..LE upper chain only
    secs = [
        CrossSection(0.0, upper_only + np.array([0, 0.0, 0])),
        CrossSection(1.0, upper_only + np.array([0, 1.0, 0])),
    ]
    with pytest.raises(OpenSectionLoop):
        build_lifting_surface(secs, name="w")


def test_mismatched_section_counts_raise():
    secs = _biconvex_sections(n_sections=3)
    other = wing_sections(
        half_span=2.0, root_chord=1.0, n_sections=1, n_chord=10,
        thickness=0.10, close_tip=False, half=True,
    )
    bad = [secs[0], CrossSection(secs[1].station, other[0].points)]
    with pytest.raises(NonMatchingSectionCounts):
        build_lifting_surface(bad, name="w")


def _cylinder_sections(n=6, m=12, radius=0.5):
    stations = np.linspace(0.0, 4.0, n)
    radii = np.full(n, radius)
    return revolution_sections(stations, radii, n_ring=m)


def test_fuselage_normals_radial():
    net = build_fuselage(_cylinder_sections(), name="tube")
    rep = check_orientation(net, radial_outward([0, 0, 0], [1, 0, 0]))
    assert rep.fraction_outward == 1.0
    # interior ring normals radial to 1e-9
    from panelpipe.geometry import panel_metrics

    m = panel_metrics(net)
    cent = m.centroid[1:-1].reshape(-1, 3)
    nrm = m.unit_normal[1:-1].reshape(-1, 3)
    radial = cent * np.array([0.0, 1.0, 1.0])
    radial /= np.linalg.norm(radial, axis=1)[:, None]
    assert np.abs(np.cross(nrm, radial)).max() < 1e-9


def test_ogive_nose_collapsed_flagged():
    stations = np.linspace(0.0, 3.0, 7)
    radii = 0.5 * np.sin(0.5 * np.pi * np.minimum(stations, 1.0)) ** 0.8
    radii[0] = 0.0
    net = build_fuselage(revolution_sections(stations, radii, n_ring=10), name="ogive")
    assert "row0" in net.collapsed_edges
    assert check_orientation(net, radial_outward([0, 0, 0], [1, 0, 0])).fraction_outward == 1.0


def test_fuselage_shuffle_invariance(rng):
    secs = _cylinder_sections()
    shuffled = [
        CrossSection(s.station, s.points[rng.permutation(len(s.points))].copy())
        for s in secs
    ]
    a = build_fuselage(secs, name="tube")
    b = build_fuselage(shuffled, name="tube")
    np.testing.assert_array_equal(a.points, b.points)


def test_apply_symmetry_halves_wing():
    up, lo = build_lifting_surface(_biconvex_sections(n_sections=5), name="w")
    halves, flag = apply_symmetry([up, lo])
    assert flag is True
    h_up = halves[0]
    assert h_up.n_rows == (up.n_rows + 1) // 2
    assert np.abs(h_up.points[0, :, 1]).max() <= 1e-12
    assert h_up.points[:, :, 1].min() >= -1e-12


def test_apply_symmetry_counting_oracle():
    up, _ = build_lifting_surface(_biconvex_sections(n_sections=7), name="w")
    halves, _ = apply_symmetry([up])
    before = up.n_rows * up.n_cols
    on_plane = int((np.abs(up.points[:, :, 1]) <= 1e-12).sum())
    after = halves[0].n_rows * halves[0].n_cols
    assert after == (before + on_plane) // 2


def test_apply_symmetry_rejects_asymmetric():
    up, lo = build_lifting_surface(_biconvex_sections(n_sections=5), name="w")
    pts = up.points.copy()
    pts[-1, :, 2] += 0.25  # winglet on one side only
    from panelpipe.geometry import StructuredNetwork

    bent = StructuredNetwork(up.name, up.kind, pts)
    with pytest.raises(AsymmetricGeometry):
        apply_symmetry([bent])


def test_wake_geometry():
    up, lo = build_lifting_surface(_biconvex_sections(n_sections=5), name="w")
    wake = attach_wake(up, lo, wake_length_chords=20.0)
    assert wake.bc_class == "wake"
    assert wake.n_rows == 2
    assert wake.n_cols == up.n_rows
    np.testing.assert_array_equal(wake.points[0], up.points[:, 0])
    # direction +x at alpha = 0
    d = wake.points[1] - wake.points[0]
    np.testing.assert_allclose(d[:, 1:], 0.0, atol=1e-12)
    assert (d[:, 0] > 0).all()
    # analytic area for a straight TE: span x length
    span = up.points[-1, 0, 1] - up.points[0, 0, 1]
    from panelpipe.geometry import panel_metrics

    area = panel_metrics(wake).area.sum()
    assert area == pytest.approx(span * 20.0 * 1.0, rel=1e-9)


def test_wake_requires_shared_te():
    up, lo = build_lifting_surface(_biconvex_sections(n_sections=5), name="w")
    from panelpipe.errors import MissingTrailingEdge
    from panelpipe.geometry import StructuredNetwork

    pts = lo.points.copy()
    pts[:, -1, 2] += 0.1
    bad = StructuredNetwork(lo.name, lo.kind, pts)
    with pytest.raises(MissingTrailingEdge):
        attach_wake(up, bad)


def test_every_built_network_fully_outward(demo_mesh):
    from panelpipe.meshfile import extract_sections

    secs = extract_sections(demo_mesh, "wing", axis="y", station_tol=1e-6)
    up, lo = build_lifting_surface(secs, component="wing", name="wing")
    assert check_orientation(up, constant_direction([0, 0, 1])).fraction_outward == 1.0
    assert check_orientation(lo, constant_direction([0, 0, -1])).fraction_outward == 1.0
    fsecs = extract_sections(demo_mesh, "fuselage_nose", axis="x", station_tol=1e-6)
    nose = build_fuselage(fsecs, name="fuselage_nose")
    assert (
        check_orientation(nose, radial_outward([0, 0, 0], [1, 0, 0])).fraction_outward == 1.0
    )
