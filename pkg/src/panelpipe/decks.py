"""Legacy deck codecs: 10-character fixed fields, LaWGS, auxiliary, a502.

All writers are pure functions emitting LF-terminated ASCII; numeric
records carry at most six fields of exactly ten characters, so every deck
line stays within 80 columns. Writing, parsing, and re-writing any of the
three formats is byte-identical (values are quantized to the field
rendering on the first write).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FieldOverflow,
    FieldParseError,
    GridSizeMismatch,
    MalformedAux,
    MalformedDeck,
    MalformedLawgs,
    MissingBoundaryCondition,
    UnresolvedAbutment,
)

FIELD_WIDTH = 10
FIELDS_PER_LINE = 6

# Boundary-condition class codes carried in aux/a502 records. Codes 2-4
# are reserved (inlets, fan faces, super-inclined surfaces) and accepted
# by the parsers but never emitted by the pipeline.
BC_CLASS_CODES = {"surface": 1, "wake": 5}
BC_CLASS_NAMES = {v: k for k, v in BC_CLASS_CODES.items()}


# --- 10-character numeric fields ----------------------------------------------


def format_field10(x: float) -> str:
    """Render a scalar as exactly ten characters, Fortran E-field readable.

    The value is rounded to five significant digits. When the fifth digit
    is zero the classic " d.dddE+ee" rendering is used; otherwise the
    exponent letter is dropped to fit the extra digit (" d.dddd+ee"),
    which Fortran E10.0 reads identically. Round-trip error is at most
    5e-5 * max(1, |x|).
    """
    x = float(x)
    if x != x or x in (float("inf"), float("-inf")):
        raise FieldOverflow(f"cannot render non-finite value {x!r}")
    if abs(x) >= 1e100:
        raise FieldOverflow(f"magnitude {x!r} does not fit a 10-character field")
    if abs(x) < 1e-99:  # includes exact zero; below any representable exponent
        x = 0.0
    s5 = f"{x:.4E}"  # sign-less rounding to 5 significant digits
    mantissa, exponent = s5.split("E")
    neg = mantissa.startswith("-")
    mantissa = mantissa.lstrip("-")
    sign = "-" if neg else " "
    if mantissa[-1] == "0":
        out = f"{sign}{mantissa[:-1]}E{exponent}"
    else:
        out = f"{sign}{mantissa}{exponent}"
    if len(out) != FIELD_WIDTH:  # pragma: no cover - guarded by the overflow checks
        raise FieldOverflow(f"internal rendering error for {x!r}: {out!r}")
    return out


_EXP_NO_E = re.compile(r"(?<=[0-9.])([+-])(?=[0-9])")


def parse_field10(s: str) -> float:
    """Parse one fixed field, accepting E-less Fortran exponent forms."""
    t = s.strip().replace("D", "E").replace("d", "e")
    if not t:
        raise FieldParseError("blank numeric field")
    if "E" not in t.upper():
        t = _EXP_NO_E.sub(r"E\1", t, count=1)
    try:
        return float(t)
    except ValueError:
        raise FieldParseError(f"not a numeric field: {s!r}") from None


def format_record(values) -> list[str]:
    """Fixed-format records (max six 10-char fields per line)."""
    fields = [format_field10(v) for v in values]
    return [
        "".join(fields[i : i + FIELDS_PER_LINE]) for i in range(0, len(fields), FIELDS_PER_LINE)
    ]


# --- flow conditions ------------------------------------------------------------


@dataclass(frozen=True)
class FlowConditions:
    """Contents of the auxiliary flow deck."""

    mach: float
    alphas: tuple[float, ...]
    beta: float = 0.0
    sref: float = 1.0
    span: float = 1.0
    cbar: float = 1.0
    xref: float = 0.0
    yref: float = 0.0
    zref: float = 0.0
    symmetry: str = "none"  # "none" | "xz-plane"

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if not (0.0 <= self.mach < 0.8 or self.mach > 1.2):
            raise ValueError(
                f"mach {self.mach} is transonic; the solver accepts 0 <= M < 0.8 or M > 1.2"
            )
        if not self.alphas:
            raise ValueError("at least one angle of attack is required")
        for a in self.alphas:
            if abs(a) > 20.0:
                raise ValueError(f"alpha {a} exceeds the 20-degree validity limit")
        for nm in ("sref", "span", "cbar"):
            if getattr(self, nm) <= 0.0:
                raise ValueError(f"{nm} must be positive")
        if self.symmetry not in ("none", "xz-plane"):
            raise ValueError(f"symmetry must be 'none' or 'xz-plane', got {self.symmetry!r}")


# --- LaWGS ----------------------------------------------------------------------


@dataclass(frozen=True)
class LawgsNetwork:
    name: str
    symmetry: int
    points: np.ndarray  # (n_rows, n_cols, 3)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 3 or pts.shape[2] != 3:
            raise GridSizeMismatch(f"network {self.name!r}: points must be (rows, cols, 3)")
        if not self.name or len(self.name) > 20:
            raise ValueError(f"network name must be 1..20 characters, got {self.name!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_rows(self) -> int:
        return self.points.shape[0]

    @property
    def n_cols(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class LawgsObject:
    title: str
    networks: tuple[LawgsNetwork, ...]


def write_lawgs(obj: LawgsObject) -> str:
    lines = [obj.title]
    for net in obj.networks:
        lines.append(net.name)
        lines.append(f"{net.n_rows} {net.n_cols} {net.symmetry}")
        flat = net.points.reshape(-1)
        lines.extend(format_record(flat))
    return "\n".join(lines) + "\n"


def _line_values(line: str) -> list[float]:
    """Numbers from one record line: fixed 10-char columns, else free format."""
    body = line.rstrip("\n")
    if body and len(body) % FIELD_WIDTH == 0:
        try:
            return [
                parse_field10(body[k : k + FIELD_WIDTH])
                for k in range(0, len(body), FIELD_WIDTH)
            ]
        except FieldParseError:
            pass
    return [parse_field10(tok) for tok in body.split()]


def parse_lawgs(text: str) -> LawgsObject:
    lines = text.splitlines()
    if not lines:
        raise MalformedLawgs("empty LaWGS file")
    title = lines[0].rstrip()
    i = 1
    networks = []
    n_lines = len(lines)
    while i < n_lines:
        if not lines[i].strip():
            i += 1
            continue
        name = lines[i].strip()
        i += 1
        if i >= n_lines:
            raise MalformedLawgs(f"network {name!r}: missing grid header", line=i + 1)
        hdr = lines[i].split()
        i += 1
        if len(hdr) < 3:
            raise MalformedLawgs(f"network {name!r}: grid header needs rows cols symmetry", line=i)
        try:
            nr, nc, sym = int(float(hdr[0])), int(float(hdr[1])), int(float(hdr[2]))
        except ValueError:
            raise MalformedLawgs(f"network {name!r}: non-numeric grid header", line=i) from None
        need = nr * nc * 3
        values: list[float] = []
        while len(values) < need and i < n_lines:
            if not lines[i].strip():
                i += 1
                continue
            try:
                values.extend(_line_values(lines[i]))
            except FieldParseError:
                raise MalformedLawgs(f"network {name!r}: bad numeric record", line=i + 1) from None
            i += 1
        if len(values) < need:
            raise MalformedLawgs(
                f"network {name!r}: expected {need} coordinates, found {len(values)}"
            )
        if len(values) > need:
            raise MalformedLawgs(f"network {name!r}: trailing values on the final record")
        pts = np.array(values).reshape(nr, nc, 3)
        networks.append(LawgsNetwork(name=name, symmetry=sym, points=pts))
    return LawgsObject(title=title, networks=tuple(networks))


# --- auxiliary file --------------------------------------------------------------


@dataclass(frozen=True)
class WakeRecord:
    name: str
    upper: str
    lower: str
    length_chords: float
    direction: tuple[float, float, float] = (1.0, 0.0, 0.0)


@dataclass(frozen=True)
class AuxData:
    flow: FlowConditions
    boundary: dict[str, int] = field(default_factory=dict)  # network name -> class code
    wakes: tuple[WakeRecord, ...] = ()
    wgs_ref: str = "model.wgs"
    extras: tuple[str, ...] = ()  # unknown keyword lines, preserved verbatim


def _fmt(x: float) -> str:
    return format_field10(x).strip()


def write_aux(aux: AuxData) -> str:
    """Keyword file with one keyword per line in a fixed order."""
    f = aux.flow
    lines = [
        f"MACH = {_fmt(f.mach)}",
        "ALPHA = " + " ".join(_fmt(a) for a in f.alphas),
        f"BETA = {_fmt(f.beta)}",
        f"SREF = {_fmt(f.sref)}",
        f"SPAN = {_fmt(f.span)}",
        f"CBAR = {_fmt(f.cbar)}",
        f"XREF = {_fmt(f.xref)}",
        f"YREF = {_fmt(f.yref)}",
        f"ZREF = {_fmt(f.zref)}",
    ]
    if f.symmetry == "xz-plane":
        lines.append("SYMM = XZ")
    else:
        lines.append("SYMM = NONE")
    lines.append(f"WGS = {aux.wgs_ref}")
    for name, code in aux.boundary.items():
        lines.append(f"BOUN = {name} {code}")
    for w in aux.wakes:
        d = " ".join(_fmt(c) for c in w.direction)
        lines.append(f"WAKE = {w.name} {w.upper} {w.lower} {_fmt(w.length_chords)} {d}")
    lines.extend(aux.extras)
    return "\n".join(lines) + "\n"


_KNOWN_AUX = {
    "MACH",
    "ALPHA",
    "BETA",
    "SREF",
    "SPAN",
    "CBAR",
    "XREF",
    "YREF",
    "ZREF",
    "SYMM",
    "WGS",
    "BOUN",
    "WAKE",
}


def parse_aux(text: str) -> AuxData:
    values: dict[str, list[str]] = {}
    boundary: dict[str, int] = {}
    wakes: list[WakeRecord] = []
    extras: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            extras.append(raw)
            continue
        key, _, rest = line.partition("=")
        key = key.strip().upper()
        toks = rest.split()
        if key not in _KNOWN_AUX:
            extras.append(raw)
            continue
        try:
            if key == "BOUN":
                boundary[toks[0]] = int(float(toks[1]))
            elif key == "WAKE":
                wakes.append(
                    WakeRecord(
                        name=toks[0],
                        upper=toks[1],
                        lower=toks[2],
                        length_chords=parse_field10(toks[3]),
                        direction=tuple(parse_field10(t) for t in toks[4:7]),
                    )
                )
            else:
                values[key] = toks
        except (IndexError, FieldParseError, ValueError) as exc:
            raise MalformedAux(f"line {lineno}: bad {key} record: {raw!r}") from exc

    try:
        flow = FlowConditions(
            mach=parse_field10(values["MACH"][0]),
            alphas=tuple(parse_field10(a) for a in values["ALPHA"]),
            beta=parse_field10(values.get("BETA", ["0"])[0]),
            sref=parse_field10(values.get("SREF", ["1"])[0]),
            span=parse_field10(values.get("SPAN", ["1"])[0]),
            cbar=parse_field10(values.get("CBAR", ["1"])[0]),
            xref=parse_field10(values.get("XREF", ["0"])[0]),
            yref=parse_field10(values.get("YREF", ["0"])[0]),
            zref=parse_field10(values.get("ZREF", ["0"])[0]),
            symmetry="xz-plane" if values.get("SYMM", ["NONE"])[0].upper() == "XZ" else "none",
        )
    except KeyError as exc:
        raise MalformedAux(f"missing required keyword {exc.args[0]}") from None
    wgs = values.get("WGS", ["model.wgs"])[0]
    return AuxData(
        flow=flow, boundary=boundary, wakes=tuple(wakes), wgs_ref=wgs, extras=tuple(extras)
    )


# --- a502 deck -------------------------------------------------------------------


@dataclass(frozen=True)
class DeckNetwork:
    name: str
    bc_class: int
    points: np.ndarray  # (n_rows, n_cols, 3)


@dataclass(frozen=True)
class A502Deck:
    """Single combined solver input: title, flow, network and wake blocks."""

    title: str
    flow: FlowConditions
    networks: tuple[DeckNetwork, ...]  # impermeable surfaces
    wakes: tuple[DeckNetwork, ...]
    forced: bool = False

    def panel_count(self) -> int:
        return int(
            sum(
                (n.points.shape[0] - 1) * (n.points.shape[1] - 1)
                for n in self.networks + self.wakes
            )
        )


def assemble_a502(
    lawgs: LawgsObject,
    aux: AuxData,
    abutment,
    force: bool = False,
    title: str | None = None,
) -> A502Deck:
    """Combine geometry and flow data into the solver deck.

    Refuses to emit a deck whose abutment report still lists mismatched
    edges unless ``force`` is set, in which case the deck title is
    watermarked.
    """
    mismatched = [p for p in abutment.pairs if not p.matched] if abutment is not None else []
    if mismatched and not force:
        listing = "; ".join(
            f"{p.network_a}.{p.edge_a} vs {p.network_b}.{p.edge_b} gap {p.max_gap:g}"
            for p in mismatched
        )
        raise UnresolvedAbutment(f"deck refused, mismatched edges remain: {listing}", mismatched)

    wake_names = {w.name for w in aux.wakes}
    networks = []
    wakes = []
    for net in lawgs.networks:
        if net.name in wake_names:
            wakes.append(DeckNetwork(net.name, BC_CLASS_CODES["wake"], net.points))
            continue
        if net.name not in aux.boundary:
            raise MissingBoundaryCondition(f"no BOUN record for network {net.name!r}")
        networks.append(DeckNetwork(net.name, aux.boundary[net.name], net.points))
    title = title if title is not None else lawgs.title
    forced = bool(mismatched) and force
    return A502Deck(
        title=title, flow=aux.flow, networks=tuple(networks), wakes=tuple(wakes), forced=forced
    )


def write_a502(deck: A502Deck) -> str:
    f = deck.flow
    lines = ["$TITLE"]
    title = deck.title
    if deck.forced:
        title += " *FORCED*"
    lines.append(title[:80])
    lines.append("$FLOW")
    lines.extend(format_record([f.mach, f.beta, float(len(f.alphas))]))
    lines.extend(format_record(f.alphas))
    lines.extend(format_record([f.sref, f.span, f.cbar]))
    lines.extend(format_record([f.xref, f.yref, f.zref]))
    lines.extend(format_record([1.0 if f.symmetry == "xz-plane" else 0.0]))
    for marker, nets in (("$NETWORK", deck.networks), ("$WAKE", deck.wakes)):
        for net in nets:
            lines.append(f"{marker} {net.name}")
            nr, nc, _ = net.points.shape
            lines.extend(format_record([float(net.bc_class), float(nr), float(nc)]))
            lines.extend(format_record(net.points.reshape(-1)))
    lines.append("$END")
    return "\n".join(lines) + "\n"


def _read_record_values(lines, i, count):
    values = []
    while len(values) < count:
        if i >= len(lines) or lines[i].startswith("$"):
            raise MalformedDeck(f"record ended early at line {i + 1}: expected {count} fields")
        row = lines[i]
        for k in range(0, len(row), FIELD_WIDTH):
            fld = row[k : k + FIELD_WIDTH]
            if fld.strip():
                values.append(parse_field10(fld))
        i += 1
    if len(values) != count:
        raise MalformedDeck(f"record at line {i} has {len(values)} fields, expected {count}")
    return values, i


def parse_a502(text: str) -> A502Deck:
    lines = text.splitlines()
    i = 0

    def expect(marker):
        nonlocal i
        if i >= len(lines) or not lines[i].startswith(marker):
            raise MalformedDeck(f"expected {marker} at line {i + 1}")
        i += 1

    expect("$TITLE")
    title = lines[i]
    i += 1
    forced = title.endswith(" *FORCED*")
    if forced:
        title = title[: -len(" *FORCED*")]
    expect("$FLOW")
    (mach, beta, nalpha), i = _read_record_values(lines, i, 3)
    alphas, i = _read_record_values(lines, i, int(nalpha))
    (sref, span, cbar), i = _read_record_values(lines, i, 3)
    (xref, yref, zref), i = _read_record_values(lines, i, 3)
    (symflag,), i = _read_record_values(lines, i, 1)
    flow = FlowConditions(
        mach=mach,
        alphas=tuple(alphas),
        beta=beta,
        sref=sref,
        span=span,
        cbar=cbar,
        xref=xref,
        yref=yref,
        zref=zref,
        symmetry="xz-plane" if symflag > 0.5 else "none",
    )
    networks = []
    wakes = []
    while i < len(lines):
        line = lines[i]
        if line.startswith("$END"):
            break
        if line.startswith("$NETWORK") or line.startswith("$WAKE"):
            marker, _, name = line.partition(" ")
            name = name.strip()
            i += 1
            (bc, nr, nc), i = _read_record_values(lines, i, 3)
            coords, i = _read_record_values(lines, i, int(nr) * int(nc) * 3)
            pts = np.array(coords).reshape(int(nr), int(nc), 3)
            dn = DeckNetwork(name=name, bc_class=int(bc), points=pts)
            (wakes if marker == "$WAKE" else networks).append(dn)
        else:
            raise MalformedDeck(f"unexpected content at line {i + 1}: {line!r}")
    else:
        raise MalformedDeck("missing $END marker")
    return A502Deck(
        title=title, flow=flow, networks=tuple(networks), wakes=tuple(wakes), forced=forced
    )
