"""Generated reference geometries: test bodies, wings, and a small aircraft.

Everything here is analytic and deterministic, so tests can freeze
expected values against it. ``python -m panelpipe.samples OUTDIR`` writes
the demo aircraft mesh plus a matching pipeline config.
"""

from __future__ import annotations

import numpy as np

from .geometry import ComponentKind, StructuredNetwork
from .meshfile import CrossSection, Element, RawMesh, write_msh
from .networks import attach_wake, build_fuselage, build_lifting_surface

# Thickness ratio used to pinch wing tips nearly closed; small enough that
# the upper/lower tip rows stay within welding range of the abutment
# tolerance, large enough that the tip section still orders cleanly by
# angle. Tip sections also drop their camber: a near-flat sliver is only
# star-shaped about its centroid when the camber is small next to the
# thickness.
TIP_THICKNESS = 4e-3


def cosine_spacing(n: int) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, n)))


def airfoil_loop(
    chord: float,
    n_chord: int,
    thickness: float = 0.12,
    camber: float = 0.0,
    le=(0.0, 0.0, 0.0),
    span_coord: float = 0.0,
) -> np.ndarray:
    """Closed sharp-edged airfoil loop (2*n_chord - 2 points) at one station.

    Parabolic-arc thickness with parabolic camber; the loop runs TE -> upper
    -> LE -> lower -> back toward TE without repeating the TE point.
    """
    s = cosine_spacing(n_chord)  # 0 at LE, 1 at TE
    zc = 4.0 * camber * s * (1.0 - s)
    zt = 0.5 * thickness * 4.0 * s * (1.0 - s)
    x0, y0, z0 = le
    x = x0 + chord * s
    up = np.column_stack([x, np.full(n_chord, y0 + span_coord), z0 + chord * (zc + zt)])
    lo = np.column_stack([x, np.full(n_chord, y0 + span_coord), z0 + chord * (zc - zt)])
    # TE..LE along the upper surface, then LE+1..TE-1 along the lower
    return np.vstack([up[::-1], lo[1:-1]])


def wing_sections(
    half_span: float,
    root_chord: float,
    taper: float = 1.0,
    n_sections: int = 17,
    n_chord: int = 21,
    thickness: float = 0.12,
    camber: float = 0.0,
    sweep: float = 0.0,
    le_root=(0.0, 0.0, 0.0),
    elliptic: bool = False,
    close_tip: bool = True,
    half: bool = False,
    span_spacing: str = "uniform",
) -> list[CrossSection]:
    """Spanwise stations of a straight-tapered (or elliptic) wing.

    Full-span by default (sections mirrored through y = 0); ``half`` keeps
    only y >= 0. ``sweep`` is the leading-edge slope dx/dy.
    """
    if span_spacing == "cosine":
        eta = np.sin(0.5 * np.pi * np.linspace(0.0, 1.0, n_sections))
        eta[-1] = 1.0
    else:
        eta = np.linspace(0.0, 1.0, n_sections)
    ys = eta * half_span
    if not half:
        ys = np.concatenate([-ys[:0:-1], ys])
    secs = []
    for y in ys:
        e = abs(y) / half_span
        if elliptic:
            chord = root_chord * np.sqrt(max(1.0 - e * e, 0.0))
            chord = max(chord, 0.04 * root_chord)
        else:
            chord = root_chord * (1.0 + (taper - 1.0) * e)
        t, m = thickness, camber
        if close_tip and abs(e - 1.0) < 1e-12:
            t, m = TIP_THICKNESS, 0.0
        loop = airfoil_loop(
            chord,
            n_chord,
            thickness=t,
            camber=m,
            le=(le_root[0] + sweep * abs(y), le_root[1], le_root[2]),
            span_coord=y,
        )
        secs.append(CrossSection(station=float(y), points=loop))
    return secs


def body_of_revolution(
    stations: np.ndarray,
    radii: np.ndarray,
    n_ring: int = 16,
    center=(0.0, 0.0, 0.0),
    name: str = "body",
) -> StructuredNetwork:
    """Network for a body of revolution about the x axis through ``center``."""
    secs = revolution_sections(stations, radii, n_ring, center)
    return build_fuselage(secs, name=name)


def revolution_sections(stations, radii, n_ring=16, center=(0.0, 0.0, 0.0)):
    cx, cy, cz = center
    psi = 2.0 * np.pi * np.arange(n_ring) / n_ring
    secs = []
    for x, r in zip(stations, radii):
        y = cy + r * np.sin(psi)
        z = cz + r * np.cos(psi)
        pts = np.column_stack([np.full(n_ring, cx + x), y, z])
        secs.append(CrossSection(station=float(cx + x), points=pts))
    return secs


def sphere_network(n_axial: int = 40, n_ring: int = 50, radius: float = 1.0, center=(0.0, 0.0, 0.0)):
    """Lat-long sphere with collapsed poles and a duplicated seam column."""
    theta = np.linspace(0.0, np.pi, n_axial)
    stations = -radius * np.cos(theta)
    radii = radius * np.sin(theta)
    radii[0] = radii[-1] = 0.0
    return body_of_revolution(stations, radii, n_ring=n_ring, center=center, name="sphere")


def spheroid_network(
    n_axial: int = 24,
    n_ring: int = 24,
    a: float = 2.0,
    b: float = 0.7,
    nose_power: float = 1.0,
    tail_power: float = 1.0,
):
    """Closed fore/aft-asymmetric spheroid-like body (for refinement trends)."""
    theta = np.linspace(0.0, np.pi, n_axial)
    stations = -a * np.cos(theta)
    shape = np.sin(theta) ** np.where(theta < np.pi / 2, nose_power, tail_power)
    radii = b * shape
    radii[0] = radii[-1] = 0.0
    return body_of_revolution(stations, radii, n_ring=n_ring, name="spheroid")


def wing_model(
    half_span: float = 4.0,
    root_chord: float = 1.0,
    taper: float = 1.0,
    n_sections: int = 17,
    n_chord: int = 23,
    thickness: float = 0.06,
    camber: float = 0.0,
    sweep: float = 0.0,
    elliptic: bool = False,
    wake_length_chords: float = 20.0,
    name: str = "wing",
    half: bool = False,
    span_spacing: str = "uniform",
):
    """Full wing + wake triple (upper, lower, wake) built through the sorters."""
    secs = wing_sections(
        half_span,
        root_chord,
        taper=taper,
        n_sections=n_sections,
        n_chord=n_chord,
        thickness=thickness,
        camber=camber,
        sweep=sweep,
        elliptic=elliptic,
        half=half,
        span_spacing=span_spacing,
    )
    upper, lower = build_lifting_surface(secs, component="wing", name=name)
    wake = attach_wake(upper, lower, wake_length_chords=wake_length_chords)
    return upper, lower, wake


# --- demo aircraft -----------------------------------------------------------
#
# Desk-scale single-engine layout: body of revolution, high-set tapered wing,
# horizontal tail. Half-model network sizes were chosen so the processed
# model lands at 9 networks / 1938 grid points, in the class of the
# validation aircraft this toolchain was exercised against.

AIRCRAFT = {
    "fuselage_length": 8.0,
    "fuselage_radius": 0.5,
    "nose_end": 2.0,
    "cyl_end": 5.5,
    "n_ring": 32,
    "stations": (10, 12, 12),  # per fuselage segment, shared rings included
    "wing": {
        "half_span": 4.0,
        "root_chord": 1.1,
        "taper": 0.6,
        "n_sections_half": 13,
        "n_chord": 34,
        "thickness": 0.12,
        "camber": 0.02,
        "sweep": 0.04,
        "le_x": 3.0,
        "z": 0.9,
    },
    "htail": {
        "half_span": 1.3,
        "root_chord": 0.55,
        "taper": 0.7,
        "n_sections_half": 9,
        "n_chord": 24,
        "thickness": 0.09,
        "camber": 0.0,
        "sweep": 0.08,
        "le_x": 7.1,
        "z": 1.0,
    },
}


def _fuselage_radius(x: float) -> float:
    L = AIRCRAFT["fuselage_length"]
    R = AIRCRAFT["fuselage_radius"]
    x1 = AIRCRAFT["nose_end"]
    x2 = AIRCRAFT["cyl_end"]
    if x <= 0.0 or x >= L:
        return 0.0
    if x < x1:
        return R * np.sin(0.5 * np.pi * x / x1) ** 0.75
    if x <= x2:
        return R
    return R * np.sin(0.5 * np.pi * (L - x) / (L - x2)) ** 0.9


def _fuselage_stations():
    n_nose, n_mid, n_tail = AIRCRAFT["stations"]
    x1 = AIRCRAFT["nose_end"]
    x2 = AIRCRAFT["cyl_end"]
    L = AIRCRAFT["fuselage_length"]
    nose = x1 * (1.0 - np.cos(0.5 * np.pi * np.linspace(0.0, 1.0, n_nose)))
    nose[0], nose[-1] = 0.0, x1  # segment boundaries bitwise shared
    mid = np.linspace(x1, x2, n_mid)
    tail = x2 + (L - x2) * np.sin(0.5 * np.pi * np.linspace(0.0, 1.0, n_tail))
    tail[0], tail[-1] = x2, L
    return nose, mid, tail


def aircraft_mesh() -> RawMesh:
    """Full-span demo aircraft as a RawMesh with five component groups."""
    nodes: dict[int, np.ndarray] = {}
    elements: list[Element] = []
    groups: dict[str, list[int]] = {}
    next_node = [1]
    next_el = [1]

    def add_ring_component(name, stations):
        ring = AIRCRAFT["n_ring"]
        psi = 2.0 * np.pi * np.arange(ring) / ring
        ids = []
        for x in stations:
            r = _fuselage_radius(float(x))
            row = []
            for p in psi:
                nid = next_node[0]
                next_node[0] += 1
                nodes[nid] = np.array([x, r * np.sin(p), r * np.cos(p)])
                row.append(nid)
            ids.append(row)
        eids = []
        for i in range(len(ids) - 1):
            for j in range(ring):
                j2 = (j + 1) % ring
                eid = next_el[0]
                next_el[0] += 1
                elements.append(
                    Element(eid, "quad", (ids[i][j], ids[i][j2], ids[i + 1][j2], ids[i + 1][j]))
                )
                eids.append(eid)
        groups[name] = eids

    nose, mid, tail = _fuselage_stations()
    add_ring_component("fuselage_nose", nose)
    add_ring_component("fuselage_mid", mid)
    add_ring_component("fuselage_tail", tail)

    def add_lifting_component(name, cfg):
        secs = wing_sections(
            cfg["half_span"],
            cfg["root_chord"],
            taper=cfg["taper"],
            n_sections=cfg["n_sections_half"],
            n_chord=cfg["n_chord"],
            thickness=cfg["thickness"],
            camber=cfg["camber"],
            sweep=cfg["sweep"],
            le_root=(cfg["le_x"], 0.0, cfg["z"]),
            half=False,
        )
        ids = []
        for sec in secs:
            row = []
            for p in sec.points:
                nid = next_node[0]
                next_node[0] += 1
                nodes[nid] = np.array(p)
                row.append(nid)
            ids.append(row)
        loop = len(ids[0])
        eids = []
        for i in range(len(ids) - 1):
            for j in range(loop):
                j2 = (j + 1) % loop
                eid = next_el[0]
                next_el[0] += 1
                elements.append(
                    Element(eid, "quad", (ids[i][j], ids[i][j2], ids[i + 1][j2], ids[i + 1][j]))
                )
                eids.append(eid)
        groups[name] = eids

    add_lifting_component("wing", AIRCRAFT["wing"])
    add_lifting_component("htail", AIRCRAFT["htail"])
    return RawMesh(nodes=nodes, elements=elements, groups=groups)


def coarse_wing_mesh() -> RawMesh:
    """Standalone full-span wing mesh with exactly 1938 nodes (19 x 102)."""
    secs = wing_sections(
        half_span=4.0,
        root_chord=1.0,
        taper=0.6,
        n_sections=10,  # mirrored -> 19 stations
        n_chord=52,  # loop of 102 points
        thickness=0.12,
        camber=0.02,
        half=False,
    )
    nodes = {}
    elements = []
    ids = []
    nid = 1
    eid = 1
    for sec in secs:
        row = []
        for p in sec.points:
            nodes[nid] = np.array(p)
            row.append(nid)
            nid += 1
        ids.append(row)
    loop = len(ids[0])
    eids = []
    for i in range(len(ids) - 1):
        for j in range(loop):
            j2 = (j + 1) % loop
            elements.append(
                Element(eid, "quad", (ids[i][j], ids[i][j2], ids[i + 1][j2], ids[i + 1][j]))
            )
            eids.append(eid)
            eid += 1
    return RawMesh(nodes=nodes, elements=elements, groups={"wing": eids})


def reference_flow() -> dict:
    """Flow conditions for the demo aircraft (low-speed, 11-alpha sweep)."""
    w = AIRCRAFT["wing"]
    cbar = 0.5 * w["root_chord"] * (1.0 + w["taper"])
    span = 2.0 * w["half_span"]
    return {
        "mach": 0.07,
        "alphas": [float(a) for a in range(0, 21, 2)],
        "beta": 0.0,
        "sref": span * cbar,
        "span": span,
        "cbar": cbar,
        "xref": w["le_x"] + 0.25 * cbar,
        "yref": 0.0,
        "zref": w["z"],
        "symmetry": "xz-plane",
    }


def demo_config(mesh_path: str, output_dir: str) -> dict:
    flow = reference_flow()
    return {
        "mesh": mesh_path,
        "output_dir": output_dir,
        "components": [
            {"name": "fuselage_nose", "kind": "fuselage", "axis": "x"},
            {"name": "fuselage_mid", "kind": "fuselage", "axis": "x"},
            {"name": "fuselage_tail", "kind": "fuselage", "axis": "x"},
            {"name": "wing", "kind": "wing", "axis": "y"},
            {"name": "htail", "kind": "htail", "axis": "y"},
        ],
        "flow": flow,
        "wake": {"length_chords": 20.0},
        "abutment": {"weld": True},
        "solver": {"backend": "embedded", "compressibility": "prandtl-glauert"},
        "viscous": {
            "enabled": True,
            "reference": {"re": 2.0e6, "length": flow["cbar"]},
            "components": [
                {"name": "wing", "wetted_area": 2.05 * flow["sref"], "length": flow["cbar"], "form_factor": 1.3},
                {"name": "fuselage", "wetted_area": 11.5, "length": 8.0, "form_factor": 1.2},
                {"name": "htail", "wetted_area": 2.5, "length": 0.5, "form_factor": 1.3},
            ],
        },
    }


def write_demo(outdir):
    """Write the demo aircraft mesh + config into a directory."""
    import pathlib

    import yaml

    out = pathlib.Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    mesh_path = out / "aircraft.msh"
    mesh_path.write_text(write_msh(aircraft_mesh()))
    # paths inside the config are relative to the config file itself
    cfg = demo_config("aircraft.msh", "run")
    cfg_path = out / "aircraft.yaml"
    with open(cfg_path, "w") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=False)
    return mesh_path, cfg_path


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else "demo"
    mesh_path, cfg_path = write_demo(target)
    print(f"wrote {mesh_path}")
    print(f"wrote {cfg_path}")
