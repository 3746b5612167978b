"""MSH 2.2 ASCII reader/writer and cross-section extraction.

The accepted grammar is the 2.2 ASCII subset:

    $MeshFormat
    2.2 0 8
    $EndMeshFormat
    $PhysicalNames
    <count>
    <dim> <id> "<name>"
    $EndPhysicalNames
    $Nodes
    <count>
    <id> <x> <y> <z>
    $EndNodes
    $Elements
    <count>
    <id> <type> <ntags> <tags...> <nodes...>
    $EndElements

Element types 2 (tri) and 3 (quad) are accepted; other element types and
unknown sections are skipped with a warning. Binary files and MSH 4.x are
rejected outright.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousStations, EmptyComponent, MalformedMesh

log = logging.getLogger(__name__)

_ELEMENT_NODE_COUNT = {2: 3, 3: 4}  # tri, quad

AXIS_INDEX = {"x": 0, "y": 1, "z": 2}

# In-section plane coordinates (u, v) per section axis; the angular sort key
# is atan2(u - u0, v - v0), which for a fuselage (axis x) starts at the
# topmost point and proceeds clockwise in the tail-on view (top -> +y side).
_PLANE_AXES = {"x": (1, 2), "y": (0, 2), "z": (1, 0)}


@dataclass
class Element:
    eid: int
    etype: str  # "tri" | "quad"
    nodes: tuple[int, ...]


@dataclass
class RawMesh:
    """Nodes, elements and named component groups of a surface mesh."""

    nodes: dict[int, np.ndarray]
    elements: list[Element]
    groups: dict[str, list[int]] = field(default_factory=dict)

    def component_node_ids(self, component: str) -> list[int]:
        if component not in self.groups:
            raise EmptyComponent(f"component {component!r} not present in mesh")
        by_id = {e.eid: e for e in self.elements}
        seen: set[int] = set()
        order: list[int] = []
        for eid in self.groups[component]:
            for nid in by_id[eid].nodes:
                if nid not in seen:
                    seen.add(nid)
                    order.append(nid)
        if not order:
            raise EmptyComponent(f"component {component!r} has no nodes")
        return order


@dataclass
class CrossSection:
    """Nodes of one station of a component, angularly ordered in-plane."""

    station: float
    points: np.ndarray  # (n, 3)


class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.i = 0

    def next(self) -> str:
        while self.i < len(self.lines):
            line = self.lines[self.i]
            self.i += 1
            if line.strip():
                return line.strip()
        raise MalformedMesh("unexpected end of file", line=self.i)

    def peek(self):
        j = self.i
        while j < len(self.lines):
            if self.lines[j].strip():
                return self.lines[j].strip()
            j += 1
        return None

    @property
    def lineno(self) -> int:
        return self.i


def parse_msh(text: str) -> RawMesh:
    """Parse the MSH 2.2 ASCII subset into a RawMesh."""
    rd = _Lines(text)
    header = rd.next()
    if header != "$MeshFormat":
        raise MalformedMesh("expected $MeshFormat as first section", line=rd.lineno)
    version = rd.next()
    fields = version.split()
    if not fields or fields[0] != "2.2":
        raise MalformedMesh(
            f"unsupported MSH version {fields[0] if fields else '?'}; "
            "expected ASCII version 2.2",
            line=rd.lineno,
        )
    if len(fields) >= 2 and fields[1] != "0":
        raise MalformedMesh("binary MSH files are not supported; expected ASCII 2.2", line=rd.lineno)
    if rd.next() != "$EndMeshFormat":
        raise MalformedMesh("expected $EndMeshFormat", line=rd.lineno)

    nodes: dict[int, np.ndarray] = {}
    elements: list[Element] = []
    phys_names: dict[int, str] = {}
    raw_groups: dict[int, list[int]] = {}
    saw_nodes = saw_elements = False

    while rd.peek() is not None:
        section = rd.next()
        if not section.startswith("$"):
            raise MalformedMesh(f"expected a section marker, got {section!r}", line=rd.lineno)
        name = section[1:]
        if name == "PhysicalNames":
            count = _int(rd.next(), rd.lineno, "physical-name count")
            for _ in range(count):
                line = rd.next()
                parts = line.split(None, 2)
                if len(parts) != 3:
                    raise MalformedMesh(f"malformed physical name record {line!r}", line=rd.lineno)
                pid = _int(parts[1], rd.lineno, "physical id")
                phys_names[pid] = parts[2].strip().strip('"')
            _expect_end(rd, "PhysicalNames")
        elif name == "Nodes":
            saw_nodes = True
            count = _int(rd.next(), rd.lineno, "node count")
            for _ in range(count):
                line = rd.next()
                if line.startswith("$"):
                    raise MalformedMesh(
                        f"node block ended early: expected {count} records", line=rd.lineno
                    )
                parts = line.split()
                if len(parts) != 4:
                    raise MalformedMesh(f"malformed node record {line!r}", line=rd.lineno)
                nid = _int(parts[0], rd.lineno, "node id")
                xyz = np.array([float(v) for v in parts[1:]], dtype=float)
                if not np.all(np.isfinite(xyz)):
                    raise MalformedMesh(f"non-finite node coordinate in {line!r}", line=rd.lineno)
                nodes[nid] = xyz
            _expect_end(rd, "Nodes")
        elif name == "Elements":
            saw_elements = True
            count = _int(rd.next(), rd.lineno, "element count")
            for _ in range(count):
                line = rd.next()
                if line.startswith("$"):
                    raise MalformedMesh(
                        f"element block ended early: expected {count} records", line=rd.lineno
                    )
                parts = [_int(p, rd.lineno, "element field") for p in line.split()]
                if len(parts) < 3:
                    raise MalformedMesh(f"malformed element record {line!r}", line=rd.lineno)
                eid, etype, ntags = parts[0], parts[1], parts[2]
                if etype not in _ELEMENT_NODE_COUNT:
                    log.warning("skipping element %d of unsupported type %d", eid, etype)
                    continue
                tags = parts[3 : 3 + ntags]
                node_ids = parts[3 + ntags :]
                want = _ELEMENT_NODE_COUNT[etype]
                if len(node_ids) != want:
                    raise MalformedMesh(
                        f"element {eid}: expected {want} nodes, got {len(node_ids)}",
                        line=rd.lineno,
                    )
                elements.append(
                    Element(eid=eid, etype="tri" if etype == 2 else "quad", nodes=tuple(node_ids))
                )
                if tags:
                    raw_groups.setdefault(tags[0], []).append(eid)
            _expect_end(rd, "Elements")
        else:
            log.warning("skipping unknown MSH section $%s", name)
            while rd.peek() is not None and not rd.peek().startswith("$End"):
                rd.next()
            if rd.peek() is not None:
                rd.next()

    if not saw_nodes:
        raise MalformedMesh("missing required $Nodes section")
    if not saw_elements:
        raise MalformedMesh("missing required $Elements section")

    for el in elements:
        for nid in el.nodes:
            if nid not in nodes:
                raise MalformedMesh(f"element {el.eid} references unknown node {nid}")

    groups = {}
    for pid, eids in sorted(raw_groups.items()):
        groups[phys_names.get(pid, f"group_{pid}")] = eids
    return RawMesh(nodes=nodes, elements=elements, groups=groups)


def write_msh(mesh: RawMesh) -> str:
    """Serialize a RawMesh in canonical form (LF endings, repr floats)."""
    out = ["$MeshFormat", "2.2 0 8", "$EndMeshFormat"]
    name_to_pid = {name: i + 1 for i, name in enumerate(mesh.groups)}
    if name_to_pid:
        out.append("$PhysicalNames")
        out.append(str(len(name_to_pid)))
        for name, pid in name_to_pid.items():
            out.append(f'2 {pid} "{name}"')
        out.append("$EndPhysicalNames")
    out.append("$Nodes")
    out.append(str(len(mesh.nodes)))
    for nid in sorted(mesh.nodes):
        x, y, z = (float(v) for v in mesh.nodes[nid])
        out.append(f"{nid} {x!r} {y!r} {z!r}")
    out.append("$EndNodes")
    eid_group = {}
    for name, eids in mesh.groups.items():
        for eid in eids:
            eid_group[eid] = name_to_pid[name]
    out.append("$Elements")
    out.append(str(len(mesh.elements)))
    for el in sorted(mesh.elements, key=lambda e: e.eid):
        etype = 2 if el.etype == "tri" else 3
        pid = eid_group.get(el.eid, 0)
        nodes = " ".join(str(n) for n in el.nodes)
        out.append(f"{el.eid} {etype} 2 {pid} {pid} {nodes}")
    out.append("$EndElements")
    return "\n".join(out) + "\n"


def order_section_points(points: np.ndarray, axis: str) -> np.ndarray:
    """Angular in-plane ordering of section points about their centroid.

    Starts at the topmost point (max v) and proceeds clockwise when viewed
    looking down the +axis; collinear ties broken by radius ascending.
    """
    iu, iv = _PLANE_AXES[axis]
    u = points[:, iu] - points[:, iu].mean()
    v = points[:, iv] - points[:, iv].mean()
    theta = np.mod(np.arctan2(u, v), 2.0 * np.pi)
    r = np.hypot(u, v)
    order = np.lexsort((r, theta))
    # Rotate the cycle to start exactly at the topmost point; centroid noise
    # can push that point's angle to either side of the 0/2pi wrap.
    top = int(np.lexsort((r, np.abs(u), -v))[0])
    k = int(np.nonzero(order == top)[0][0])
    return points[np.roll(order, -k)]


def extract_sections(
    mesh: RawMesh, component: str, axis: str = "x", station_tol: float = 1e-6
) -> list[CrossSection]:
    """Group a component's nodes into per-station cross-sections.

    Stations are found by a 1-D agglomerative merge along the section axis
    with the given tolerance; each section's points are angularly ordered.
    """
    if axis not in AXIS_INDEX:
        raise ValueError(f"axis must be one of x/y/z, got {axis!r}")
    node_ids = mesh.component_node_ids(component)
    pts = np.array([mesh.nodes[nid] for nid in node_ids], dtype=float)
    ax = AXIS_INDEX[axis]
    coords = pts[:, ax]

    order = np.argsort(coords, kind="stable")
    clusters: list[list[int]] = [[order[0]]]
    for idx in order[1:]:
        if coords[idx] - coords[clusters[-1][-1]] <= station_tol:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])

    centers = [float(np.mean(coords[c])) for c in clusters]
    if len(centers) < 2:
        raise AmbiguousStations(
            f"component {component!r}: found {len(centers)} station(s); "
            "station_tol is too large or the component is flat"
        )
    for a, b in zip(centers, centers[1:]):
        if b - a < 2.0 * station_tol:
            raise AmbiguousStations(
                f"stations at {a:g} and {b:g} are closer than 2x station_tol ({station_tol:g})"
            )

    sections = []
    for center, cluster in zip(centers, clusters):
        if len(cluster) < 3:
            raise AmbiguousStations(
                f"station at {center:g} has only {len(cluster)} point(s); "
                "check station_tol and the component grouping"
            )
        sec_pts = order_section_points(pts[cluster], axis)
        sections.append(CrossSection(station=center, points=sec_pts))
    return sections


def _int(s: str, lineno: int, what: str) -> int:
    try:
        return int(s.split()[0])
    except (ValueError, IndexError):
        raise MalformedMesh(f"expected integer {what}, got {s!r}", line=lineno) from None


def _expect_end(rd: _Lines, name: str):
    line = rd.next()
    if line != f"$End{name}":
        raise MalformedMesh(f"expected $End{name}, got {line!r}", line=rd.lineno)
