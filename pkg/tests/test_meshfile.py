import numpy as np
import pytest

from panelpipe.errors import AmbiguousStations, MalformedMesh
from panelpipe.meshfile import extract_sections, parse_msh, write_msh
from panelpipe.samples import coarse_wing_mesh

MINIMAL = """$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
1
2 1 "patch"
$EndPhysicalNames
$Nodes
4
1 0.0 0.0 0.0
2 1.0 0.0 0.0
3 1.0 1.0 0.0
4 0.0 1.0 0.0
$EndNodes
$Elements
1
1 3 2 1 1 1 2 3 4
$EndElements
"""


def _cylinder_mesh(n_rings=5, n_pts=8, radius=1.0):
    lines = ["$MeshFormat", "2.2 0 8", "$EndMeshFormat"]
    lines += ["$PhysicalNames", "1", '2 1 "tube"', "$EndPhysicalNames"]
    nodes = []
    nid = 1
    ids = []
    for i in range(n_rings):
        row = []
        for j in range(n_pts):
            a = 2 * np.pi * j / n_pts
            nodes.append((nid, float(i), float(radius * np.sin(a)), float(radius * np.cos(a))))
            row.append(nid)
            nid += 1
        ids.append(row)
    lines += ["$Nodes", str(len(nodes))]
    lines += [f"{n} {x!r} {y!r} {z!r}" for n, x, y, z in nodes]
    lines += ["$EndNodes", "$Elements"]
    els = []
    eid = 1
    for i in range(n_rings - 1):
        for j in range(n_pts):
            j2 = (j + 1) % n_pts
            els.append(f"{eid} 3 2 1 1 {ids[i][j]} {ids[i][j2]} {ids[i+1][j2]} {ids[i+1][j]}")
            eid += 1
    lines += [str(len(els))] + els + ["$EndElements"]
    return "\n".join(lines) + "\n"


def test_minimal_mesh_parses():
    mesh = parse_msh(MINIMAL)
    assert len(mesh.nodes) == 4
    assert len(mesh.elements) == 1
    assert mesh.groups == {"patch": [1]}


def test_node_count_mismatch_raises():
    broken = MINIMAL.replace("$Nodes\n4\n", "$Nodes\n5\n")
    with pytest.raises(MalformedMesh):
        parse_msh(broken)


def test_unresolved_node_reference_raises():
    broken = MINIMAL.replace("1 3 2 1 1 1 2 3 4", "1 3 2 1 1 1 2 3 9")
    with pytest.raises(MalformedMesh):
        parse_msh(broken)


def test_msh4_rejected_with_version_message():
    text = MINIMAL.replace("2.2 0 8", "4.1 0 8")
    with pytest.raises(MalformedMesh, match="2.2"):
        parse_msh(text)


def test_binary_msh_rejected():
    text = MINIMAL.replace("2.2 0 8", "2.2 1 8")
    with pytest.raises(MalformedMesh, match="ASCII"):
        parse_msh(text)


def test_unknown_section_skipped():
    text = MINIMAL.replace(
        "$Nodes", "$Comments\nanything at all\n$EndComments\n$Nodes"
    )
    mesh = parse_msh(text)
    assert len(mesh.nodes) == 4


def test_golden_wing_mesh_round_trips_exactly():
    mesh = coarse_wing_mesh()
    assert len(mesh.nodes) == 1938
    text = write_msh(mesh)
    back = parse_msh(text)
    assert set(back.nodes) == set(mesh.nodes)
    for nid, xyz in mesh.nodes.items():
        np.testing.assert_array_equal(back.nodes[nid], xyz)
    assert len(back.elements) == len(mesh.elements)
    assert back.groups.keys() == mesh.groups.keys()


def test_round_trip_identity_for_canonical_form():
    text = write_msh(parse_msh(MINIMAL))
    assert write_msh(parse_msh(text)) == text


def test_cylinder_sections():
    mesh = parse_msh(_cylinder_mesh())
    secs = extract_sections(mesh, "tube", axis="x", station_tol=1e-6)
    assert len(secs) == 5
    assert all(len(s.points) == 8 for s in secs)
    stations = [s.station for s in secs]
    assert stations == sorted(stations)
    for s in secs:
        # angular ordering starts at the topmost point, clockwise (toward +y)
        assert s.points[0, 2] == pytest.approx(1.0)
        assert s.points[1, 1] > 0


def test_station_tol_too_large_raises():
    mesh = parse_msh(_cylinder_mesh())
    with pytest.raises(AmbiguousStations):
        extract_sections(mesh, "tube", axis="x", station_tol=0.6)


def test_sections_match_exact_grouping_oracle(demo_mesh):
    secs = extract_sections(demo_mesh, "wing", axis="y", station_tol=1e-6)
    # oracle: group nodes of the component by exact y coordinate
    ids = demo_mesh.component_node_ids("wing")
    pts = np.array([demo_mesh.nodes[i] for i in ids])
    uniq = np.unique(pts[:, 1])
    assert len(secs) == len(uniq)
    for sec, y in zip(secs, uniq):
        oracle = pts[pts[:, 1] == y]
        assert sec.station == pytest.approx(y, abs=1e-12)
        assert len(sec.points) == len(oracle)
        got = {tuple(p) for p in sec.points}
        want = {tuple(p) for p in oracle}
        assert got == want


def test_no_node_lost_or_duplicated(demo_mesh):
    for comp, axis in [("fuselage_mid", "x"), ("htail", "y")]:
        secs = extract_sections(demo_mesh, comp, axis=axis, station_tol=1e-6)
        ids = demo_mesh.component_node_ids(comp)
        total = sum(len(s.points) for s in secs)
        assert total == len(ids)


def test_section_ordering_stable_under_node_permutation(rng):
    text = _cylinder_mesh()
    mesh = parse_msh(text)
    base = extract_sections(mesh, "tube", axis="x", station_tol=1e-6)

    # renumber nodes randomly; sections must come out identical
    ids = list(mesh.nodes)
    perm = dict(zip(ids, rng.permutation(ids)))
    nodes = {perm[k]: v for k, v in mesh.nodes.items()}
    from panelpipe.meshfile import Element, RawMesh

    elements = [
        Element(e.eid, e.etype, tuple(perm[n] for n in e.nodes)) for e in mesh.elements
    ]
    shuffled = RawMesh(nodes=nodes, elements=elements, groups=mesh.groups)
    other = extract_sections(shuffled, "tube", axis="x", station_tol=1e-6)
    for a, b in zip(base, other):
        np.testing.assert_allclose(a.points, b.points, atol=0)
