"""Solver output formats and visualization exports.

Pinned agps grammar (the embedded solver emits the same grammar, so the
pipeline is format-uniform across backends):

    AGPS <n_networks> <n_cases> <alpha...>
    NETWORK <name> <n_rows> <n_cols>
    <x> <y> <z> <cp_case1> ... <cp_caseN>     one record per node, row-major

ffm/ffmf force summaries:

    FFMF <n_rows>            (FFM for the half-geometry table)
    ALPHA CL CDI CM
    <alpha> <cl> <cdi> <cm>

Exports: Tecplot ASCII POINT-ordered structured zones, a view/contours
macro, and the drag-polar CSV with the parasite increment folded in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedAgps, MalformedFfmf, UnknownCase

_NUM = "{:.6E}"


def _f(x: float) -> str:
    return _NUM.format(float(x))


# --- agps ------------------------------------------------------------------------


@dataclass(frozen=True)
class AgpsNetwork:
    name: str
    n_rows: int
    n_cols: int
    data: np.ndarray  # (n_rows * n_cols, 3 + n_cases): x y z cp...

    def node_count(self) -> int:
        return self.n_rows * self.n_cols


@dataclass(frozen=True)
class AgpsDocument:
    cases: tuple[float, ...]  # alpha labels
    networks: tuple[AgpsNetwork, ...]

    def total_nodes(self) -> int:
        return sum(n.node_count() for n in self.networks)

    def case_index(self, alpha: float) -> int:
        for i, a in enumerate(self.cases):
            if abs(a - alpha) <= 1e-9:
                return i
        raise UnknownCase(f"alpha {alpha} not among solved cases {list(self.cases)}")


def write_agps(doc: AgpsDocument) -> str:
    lines = [
        "AGPS "
        + str(len(doc.networks))
        + " "
        + str(len(doc.cases))
        + "".join(" " + _f(a) for a in doc.cases)
    ]
    for net in doc.networks:
        lines.append(f"NETWORK {net.name} {net.n_rows} {net.n_cols}")
        for row in net.data:
            lines.append(" ".join(_f(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_agps(text: str, tolerant: bool = False) -> AgpsDocument:
    lines = [ln for ln in text.splitlines() if ln.strip() or not tolerant]
    if not lines:
        raise MalformedAgps("empty agps document")
    head = lines[0].split()
    key = head[0].upper() if tolerant else head[0]
    if key != "AGPS" or len(head) < 3:
        raise MalformedAgps("expected header 'AGPS <networks> <cases> <alphas...>'", line=1)
    try:
        n_nets = int(head[1])
        n_cases = int(head[2])
        cases = tuple(float(v) for v in head[3 : 3 + n_cases])
    except ValueError:
        raise MalformedAgps("bad AGPS header numerics", line=1) from None
    if len(cases) != n_cases:
        raise MalformedAgps(f"expected {n_cases} case labels, found {len(cases)}", line=1)
    i = 1
    networks = []
    for _ in range(n_nets):
        if i >= len(lines):
            raise MalformedAgps("missing NETWORK block", line=i + 1)
        hdr = lines[i].split()
        hkey = hdr[0].upper() if tolerant else hdr[0]
        if hkey != "NETWORK" or len(hdr) != 4:
            raise MalformedAgps("expected 'NETWORK <name> <rows> <cols>'", line=i + 1)
        name = hdr[1]
        try:
            nr, nc = int(hdr[2]), int(hdr[3])
        except ValueError:
            raise MalformedAgps("bad network dimensions", network=name, line=i + 1) from None
        i += 1
        count = nr * nc
        rows = []
        for k in range(count):
            if i >= len(lines) or lines[i].split()[:1] == ["NETWORK"]:
                raise MalformedAgps(
                    f"expected {count} records, found {k}", network=name, line=i + 1
                )
            vals = lines[i].split()
            if len(vals) != 3 + n_cases:
                raise MalformedAgps(
                    f"record has {len(vals)} fields, expected {3 + n_cases}",
                    network=name,
                    line=i + 1,
                )
            try:
                rows.append([float(v) for v in vals])
            except ValueError:
                raise MalformedAgps("non-numeric record", network=name, line=i + 1) from None
            i += 1
        networks.append(AgpsNetwork(name=name, n_rows=nr, n_cols=nc, data=np.array(rows)))
    return AgpsDocument(cases=cases, networks=tuple(networks))


def agps_from_solution(networks, solution) -> AgpsDocument:
    """Build the agps document for a solved sweep (wake nodes carry Cp 0)."""
    out = []
    for net in networks:
        nr, nc = net.n_rows, net.n_cols
        xyz = net.points.reshape(-1, 3)
        cols = [xyz]
        for k in range(len(solution.alphas)):
            grid = solution.node_cp[k].get(net.name)
            if grid is None:
                cols.append(np.zeros((nr * nc, 1)))
            else:
                cols.append(grid.reshape(-1, 1))
        out.append(AgpsNetwork(name=net.name, n_rows=nr, n_cols=nc, data=np.hstack(cols)))
    return AgpsDocument(cases=tuple(solution.alphas), networks=tuple(out))


# --- ffm / ffmf ------------------------------------------------------------------


@dataclass(frozen=True)
class FfmfSummary:
    scope: str  # "full" | "half"
    rows: np.ndarray  # (n, 4): alpha, CL, CDi, Cm

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if rows.shape[1] != 4:
            raise MalformedFfmf("force summary rows must be (alpha, CL, CDi, Cm)")
        if len(rows) == 0:
            raise MalformedFfmf("empty force summary")
        if not np.all(np.isfinite(rows)):
            raise MalformedFfmf("non-finite force summary entry")
        if np.any(np.diff(rows[:, 0]) <= 0.0):
            raise MalformedFfmf("alphas must be strictly increasing")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def alphas(self) -> np.ndarray:
        return self.rows[:, 0]


def write_ffmf(summary: FfmfSummary) -> str:
    tag = "FFMF" if summary.scope == "full" else "FFM"
    lines = [f"{tag} {len(summary.rows)}", "ALPHA CL CDI CM"]
    for a, cl, cdi, cm in summary.rows:
        lines.append(f"{_f(a)} {_f(cl)} {_f(cdi)} {_f(cm)}")
    return "\n".join(lines) + "\n"


def parse_ffmf(text: str) -> FfmfSummary:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MalformedFfmf("empty force summary file")
    head = lines[0].split()
    if head[0] not in ("FFMF", "FFM") or len(head) != 2:
        raise MalformedFfmf("expected header 'FFMF <rows>' or 'FFM <rows>'")
    try:
        count = int(head[1])
    except ValueError:
        raise MalformedFfmf("bad row count in header") from None
    if count <= 0:
        raise MalformedFfmf("empty force table")
    body = lines[1:]
    if body and body[0].upper().startswith("ALPHA"):
        body = body[1:]
    if len(body) != count:
        raise MalformedFfmf(f"expected {count} rows, found {len(body)}")
    try:
        rows = np.array([[float(v) for v in ln.split()] for ln in body])
    except ValueError:
        raise MalformedFfmf("non-numeric force table row") from None
    return FfmfSummary(scope="full" if head[0] == "FFMF" else "half", rows=rows)


def halve_summary(full: FfmfSummary) -> FfmfSummary:
    """Half-geometry table under the symmetry doubling rule."""
    rows = full.rows.copy()
    rows[:, 1:] *= 0.5
    return FfmfSummary(scope="half", rows=rows)


def check_symmetry_doubling(half: FfmfSummary, full: FfmfSummary, rtol: float = 1e-9) -> bool:
    """Full-geometry coefficients must be exactly double the half-geometry ones."""
    if half.rows.shape != full.rows.shape:
        return False
    if not np.allclose(half.alphas, full.alphas, rtol=0.0, atol=1e-12):
        return False
    return bool(
        np.allclose(2.0 * half.rows[:, 1:], full.rows[:, 1:], rtol=rtol, atol=1e-300)
    )


# --- tecplot export ----------------------------------------------------------------


def write_tecplot_dat(doc: AgpsDocument, cases=None) -> str:
    """ASCII POINT-ordered structured zones, one per network per case."""
    if cases is None:
        case_idx = list(range(len(doc.cases)))
    else:
        case_idx = [doc.case_index(a) for a in cases]
    lines = [
        'TITLE = "panel surface solution"',
        'VARIABLES = "x" "y" "z" "cp"',
    ]
    for k in case_idx:
        alpha = doc.cases[k]
        for net in doc.networks:
            lines.append(
                f'ZONE T="{net.name} alpha={alpha:g}", I={net.n_cols}, J={net.n_rows}, F=POINT'
            )
            data = net.data
            for row in data:
                lines.append(f"{_f(row[0])} {_f(row[1])} {_f(row[2])} {_f(row[3 + k])}")
    return "\n".join(lines) + "\n"


# --- macro and polar ----------------------------------------------------------------


def write_macro(alphas, n_networks: int, views=("isometric", "planform")) -> str:
    """Viewer command macro: one contour group per case plus view presets."""
    lines = ["#!MC 1410"]
    presets = {
        "isometric": "$!THREEDVIEW PSIANGLE = 60 THETAANGLEDEG = -135",
        "planform": "$!THREEDVIEW PSIANGLE = 0 THETAANGLEDEG = -90",
    }
    for v in views:
        lines.append(f"# view preset: {v}")
        lines.append(presets.get(v, f"$!VIEW PRESET = {v.upper()}"))
    for k, alpha in enumerate(alphas):
        first = k * n_networks + 1
        last = (k + 1) * n_networks
        lines.append(f"# contour group alpha={alpha:g}")
        lines.append(f"$!ACTIVEFIELDMAPS = [{first}-{last}]")
        lines.append("$!GLOBALCONTOUR 1 VAR = 4")
        lines.append("$!REDRAWALL")
    return "\n".join(lines) + "\n"


def write_polar_csv(summary: FfmfSummary, cd0: float) -> str:
    """Drag polar with the constant parasite increment added to every row."""
    lines = ["alpha,CL,CDi,CD0,CD_total"]
    for a, cl, cdi, _cm in summary.rows:
        lines.append(f"{a:g},{_f(cl)},{_f(cdi)},{_f(cd0)},{_f(cdi + cd0)}")
    return "\n".join(lines) + "\n"
