"""Pipeline stages: mesh -> networks -> decks -> solve -> post-processing.

Stage artifacts land under ``<outdir>/{01_mesh,02_networks,03_decks,
04_raw,05_post}`` with a manifest of content hashes at the root. Every
stage is a pure function of the previous stage's on-disk artifacts, so any
stage can be re-run standalone and reruns are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import subprocess
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import abutment as ab
from .config import PipelineConfig
from .decks import (
    AuxData,
    LawgsNetwork,
    LawgsObject,
    WakeRecord,
    assemble_a502,
    parse_a502,
    parse_aux,
    parse_lawgs,
    write_a502,
    write_aux,
    write_lawgs,
)
from .errors import ConfigError, ExternalSolverFailure, ToolchainError, UnresolvedAbutment
from .geometry import (
    ComponentKind,
    StructuredNetwork,
    check_orientation,
    constant_direction,
    detect_collapsed_edges,
    radial_outward,
)
from .meshfile import extract_sections, parse_msh, write_msh
from .networks import apply_symmetry, attach_wake, build_fuselage, build_lifting_surface
from .results import (
    FfmfSummary,
    agps_from_solution,
    halve_summary,
    parse_agps,
    parse_ffmf,
    write_agps,
    write_ffmf,
    write_macro,
    write_polar_csv,
    write_tecplot_dat,
)
from .solver import SolverModel, WakeAttachment, sweep
from .viscous import ComponentWettedItem, parasite_drag

STAGE_DIRS = ("01_mesh", "02_networks", "03_decks", "04_raw", "05_post")

_OUTWARD_REF = {
    ComponentKind.WING_UPPER: constant_direction([0.0, 0.0, 1.0]),
    ComponentKind.HTAIL_UPPER: constant_direction([0.0, 0.0, 1.0]),
    ComponentKind.WING_LOWER: constant_direction([0.0, 0.0, -1.0]),
    ComponentKind.HTAIL_LOWER: constant_direction([0.0, 0.0, -1.0]),
}


class PipelineLock:
    """One pipeline instance per output directory."""

    def __init__(self, outdir: Path):
        self.path = Path(outdir) / ".lock"

    def __enter__(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ToolchainError(
                f"output directory is locked by another run: {self.path}"
            ) from None
        os.close(fd)
        return self

    def __exit__(self, *exc):
        try:
            self.path.unlink()
        except FileNotFoundError:
            pass
        return False


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, newline="\n")


def update_manifest(outdir: Path):
    """Record sha256 of every artifact under the stage directories."""
    outdir = Path(outdir)
    entries = {}
    for stage in STAGE_DIRS:
        base = outdir / stage
        if not base.is_dir():
            continue
        for p in sorted(base.rglob("*")):
            if p.is_file():
                digest = hashlib.sha256(p.read_bytes()).hexdigest()
                entries[str(p.relative_to(outdir))] = digest
    _write(outdir / "manifest.json", json.dumps({"files": entries}, indent=2, sort_keys=True) + "\n")


# --- network construction ---------------------------------------------------------


@dataclass
class BuiltModel:
    networks: list[StructuredNetwork]  # bodies then wakes, deck order
    wake_records: list[WakeRecord]
    report: ab.AbutmentReport
    orientation: dict[str, float]  # network name -> fraction outward


def build_networks(cfg: PipelineConfig) -> BuiltModel:
    """Mesh ingestion through welded, orientation-checked networks."""
    mesh = parse_msh(Path(cfg.mesh).read_text())
    all_pts = np.array([p for p in mesh.nodes.values()])
    diag = float(np.linalg.norm(all_pts.max(axis=0) - all_pts.min(axis=0)))
    station_tol = cfg.station_tol if cfg.station_tol is not None else 1e-6 * diag

    bodies: list[StructuredNetwork] = []
    lifting: list[tuple[str, StructuredNetwork, StructuredNetwork]] = []
    for comp in cfg.components:
        secs = extract_sections(mesh, comp.name, axis=comp.axis, station_tol=station_tol)
        if comp.kind == "fuselage":
            bodies.append(build_fuselage(secs, name=comp.name, axis=comp.axis))
        else:
            up, lo = build_lifting_surface(secs, component=comp.kind, name=comp.name)
            bodies.extend([up, lo])
            lifting.append((comp.name, up, lo))

    if cfg.flow.symmetry == "xz-plane":
        bodies, _ = apply_symmetry(bodies)
        by_name = {n.name: n for n in bodies}
        lifting = [(nm, by_name[u.name], by_name[lo.name]) for nm, u, lo in lifting]

    wakes = []
    wake_records = []
    for nm, up, lo in lifting:
        wake = attach_wake(
            up,
            lo,
            wake_length_chords=cfg.wake_length_chords,
            direction=cfg.wake_direction,
            name=f"{nm}_wake",
        )
        wakes.append(wake)
        wake_records.append(
            WakeRecord(
                name=wake.name,
                upper=up.name,
                lower=lo.name,
                length_chords=cfg.wake_length_chords,
                direction=cfg.wake_direction,
            )
        )

    networks = bodies + wakes
    symmetric = cfg.flow.symmetry == "xz-plane"
    tol = cfg.abutment_tol
    report = ab.abutment_report(networks, tol=tol, symmetric=symmetric)
    if cfg.weld and report.mismatched:
        weldable = [p for p in report.mismatched if p.max_gap <= ab.WELD_FACTOR * report.tol]
        if weldable:
            networks = ab.weld_networks(networks, weldable, report.tol)
            report = ab.abutment_report(networks, tol=tol, symmetric=symmetric)

    orientation = {}
    for net in networks:
        if net.bc_class == "wake":
            continue
        if net.kind == ComponentKind.FUSELAGE:
            center = net.points.reshape(-1, 3).mean(axis=0)
            if symmetric:
                center[1] = 0.0  # half shells have their mean off the body axis
            comp = next(c for c in cfg.components if c.name == net.name)
            axis_dir = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}[comp.axis]
            ref = radial_outward(center, axis_dir)
        else:
            ref = _OUTWARD_REF[net.kind]
        orientation[net.name] = check_orientation(net, ref).fraction_outward
    return BuiltModel(
        networks=networks, wake_records=wake_records, report=report, orientation=orientation
    )


# --- stages -----------------------------------------------------------------------


def stage_mesh(cfg: PipelineConfig) -> Path:
    out = Path(cfg.output_dir) / "01_mesh"
    mesh = parse_msh(Path(cfg.mesh).read_text())
    _write(out / "mesh.msh", write_msh(mesh))
    update_manifest(cfg.output_dir)
    return out


def stage_networks(cfg: PipelineConfig) -> BuiltModel:
    built = build_networks(cfg)
    out = Path(cfg.output_dir) / "02_networks"
    lawgs = LawgsObject(
        title="panelpipe model",
        networks=tuple(
            LawgsNetwork(
                name=n.name,
                symmetry=1 if cfg.flow.symmetry == "xz-plane" else 0,
                points=n.points,
            )
            for n in built.networks
        ),
    )
    _write(out / "networks.lawgs", write_lawgs(lawgs))
    meta = {
        "networks": [
            {
                "name": n.name,
                "kind": n.kind.value,
                "bc_class": n.bc_class,
                "collapsed_edges": list(n.collapsed_edges),
            }
            for n in built.networks
        ],
        "wakes": [
            {
                "name": w.name,
                "upper": w.upper,
                "lower": w.lower,
                "length_chords": w.length_chords,
                "direction": list(w.direction),
            }
            for w in built.wake_records
        ],
        "orientation": built.orientation,
    }
    _write(out / "networks_meta.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")
    _write(out / "abutment_report.txt", built.report.to_text())
    _write(out / "abutment_report.records", built.report.to_records())
    update_manifest(cfg.output_dir)
    return built


def _load_stage2(cfg: PipelineConfig):
    out = Path(cfg.output_dir) / "02_networks"
    lawgs = parse_lawgs((out / "networks.lawgs").read_text())
    meta = json.loads((out / "networks_meta.json").read_text())
    return lawgs, meta


def stage_decks(cfg: PipelineConfig, force: bool = False) -> Path:
    lawgs, meta = _load_stage2(cfg)
    out = Path(cfg.output_dir) / "03_decks"
    wake_names = {w["name"] for w in meta["wakes"]}
    boundary = {
        n["name"]: 1 for n in meta["networks"] if n["name"] not in wake_names
    }
    aux = AuxData(
        flow=cfg.flow,
        boundary=boundary,
        wakes=tuple(
            WakeRecord(
                name=w["name"],
                upper=w["upper"],
                lower=w["lower"],
                length_chords=w["length_chords"],
                direction=tuple(w["direction"]),
            )
            for w in meta["wakes"]
        ),
        wgs_ref="model.wgs",
    )
    nets = [
        StructuredNetwork(
            name=n.name,
            kind=ComponentKind(_meta_kind(meta, n.name)),
            points=n.points,
            bc_class="wake" if n.name in wake_names else "surface",
            collapsed_edges=tuple(_meta_collapsed(meta, n.name)),
        )
        for n in lawgs.networks
    ]
    report = ab.abutment_report(
        nets, tol=cfg.abutment_tol, symmetric=cfg.flow.symmetry == "xz-plane"
    )
    deck = assemble_a502(lawgs, aux, report, force=force)
    _write(out / "model.wgs", write_lawgs(lawgs))
    _write(out / "model.aux", write_aux(aux))
    _write(out / "a502.in", write_a502(deck))
    update_manifest(cfg.output_dir)
    return out


def _meta_kind(meta, name):
    for n in meta["networks"]:
        if n["name"] == name:
            return n["kind"]
    raise ConfigError(f"network {name!r} missing from stage metadata")


def _meta_collapsed(meta, name):
    for n in meta["networks"]:
        if n["name"] == name:
            return n["collapsed_edges"]
    return []


def solver_model_from_deck(deck, aux) -> SolverModel:
    bodies = tuple(
        StructuredNetwork(
            name=n.name,
            kind=ComponentKind.FUSELAGE,  # kind is irrelevant to the solver
            points=n.points,
            bc_class="surface",
            collapsed_edges=detect_collapsed_edges(n.points),
        )
        for n in deck.networks
    )
    wakes = []
    wake_nets = {n.name: n for n in deck.wakes}
    for rec in aux.wakes:
        net = wake_nets.get(rec.name)
        if net is None:
            continue
        wakes.append(
            WakeAttachment(
                wake=StructuredNetwork(
                    name=net.name,
                    kind=ComponentKind.WAKE,
                    points=net.points,
                    bc_class="wake",
                ),
                upper=rec.upper,
                lower=rec.lower,
            )
        )
    return SolverModel(bodies=bodies, wakes=tuple(wakes), flow=deck.flow)


def stage_run(cfg: PipelineConfig) -> Path:
    decks = Path(cfg.output_dir) / "03_decks"
    out = Path(cfg.output_dir) / "04_raw"
    if cfg.backend == "external":
        _run_external(cfg, decks, out)
    else:
        _run_embedded(cfg, decks, out)
    update_manifest(cfg.output_dir)
    return out


def _run_embedded(cfg: PipelineConfig, decks: Path, out: Path):
    deck = parse_a502((decks / "a502.in").read_text())
    aux = parse_aux((decks / "model.aux").read_text())
    base = solver_model_from_deck(deck, aux)
    model = SolverModel(
        bodies=base.bodies,
        wakes=base.wakes,
        flow=deck.flow,
        compressibility=cfg.compressibility,
    )
    solution = sweep(model, deck.flow.alphas)
    all_nets = list(model.bodies) + [w.wake for w in model.wakes]
    agps = agps_from_solution(all_nets, solution)
    _write(out / "out.agps", write_agps(agps))
    rows = np.column_stack([solution.alphas, solution.cl, solution.cdi_trefftz, solution.cm])
    full = FfmfSummary(scope="full", rows=rows)
    _write(out / "out.ffmf", write_ffmf(full))
    if model.symmetric:
        _write(out / "out.ffm", write_ffmf(halve_summary(full)))


def _run_external(cfg: PipelineConfig, decks: Path, out: Path):
    """File-and-exit-code process adapter for the legacy toolchain.

    The translator (when configured) regenerates the a502 deck from the
    LaWGS/aux pair; the solver consumes the deck and must leave agps and
    ffmf files in its working directory. Nonzero exits or timeouts
    quarantine whatever partial output exists.
    """
    workdir = out / "external_work"
    if workdir.exists():
        shutil.rmtree(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    for name in ("model.wgs", "model.aux", "a502.in"):
        shutil.copy2(decks / name, workdir / name)

    env = dict(os.environ)
    env.setdefault("OMP_NUM_THREADS", str(cfg.jobs))

    def run(exe, args):
        try:
            return subprocess.run(
                [str(exe), *args],
                cwd=workdir,
                env=env,
                capture_output=True,
                text=True,
                timeout=cfg.timeout_s,
            )
        except subprocess.TimeoutExpired as exc:
            _quarantine(workdir, out)
            raise ExternalSolverFailure(
                f"{exe} timed out after {cfg.timeout_s:g} s", returncode=None
            ) from exc

    if cfg.panin is not None:
        proc = run(cfg.panin, ["model.aux"])
        if proc.returncode != 0:
            _quarantine(workdir, out)
            raise ExternalSolverFailure(
                f"translator exited {proc.returncode}",
                returncode=proc.returncode,
                stdout=proc.stdout,
                stderr=proc.stderr,
            )
    proc = run(cfg.panair, ["a502.in"])
    if proc.returncode != 0:
        _quarantine(workdir, out)
        raise ExternalSolverFailure(
            f"solver exited {proc.returncode}",
            returncode=proc.returncode,
            stdout=proc.stdout,
            stderr=proc.stderr,
        )
    agps_path = workdir / "out.agps"
    ffmf_path = workdir / "out.ffmf"
    if not agps_path.is_file() or not ffmf_path.is_file():
        _quarantine(workdir, out)
        raise ExternalSolverFailure("solver produced no agps/ffmf output", returncode=0)
    # normalize: tolerant parse, canonical rewrite
    agps = parse_agps(agps_path.read_text(), tolerant=True)
    _write(out / "out.agps", write_agps(agps))
    ffmf = parse_ffmf(ffmf_path.read_text())
    _write(out / "out.ffmf", write_ffmf(ffmf))
    ffm_path = workdir / "out.ffm"
    if ffm_path.is_file():
        _write(out / "out.ffm", write_ffmf(parse_ffmf(ffm_path.read_text())))
    shutil.rmtree(workdir)


def _quarantine(workdir: Path, out: Path):
    dest = out / "quarantine"
    if dest.exists():
        shutil.rmtree(dest)
    dest.mkdir(parents=True, exist_ok=True)
    for p in sorted(workdir.iterdir()):
        shutil.move(str(p), dest / p.name)
    shutil.rmtree(workdir, ignore_errors=True)


def stage_post(cfg: PipelineConfig) -> Path:
    raw = Path(cfg.output_dir) / "04_raw"
    out = Path(cfg.output_dir) / "05_post"
    agps = parse_agps((raw / "out.agps").read_text())
    ffmf = parse_ffmf((raw / "out.ffmf").read_text())
    _write(out / "surface.dat", write_tecplot_dat(agps))
    _write(out / "views.mcr", write_macro(agps.cases, len(agps.networks)))
    cd0 = 0.0
    if cfg.viscous_enabled and cfg.viscous_components:
        items = [
            ComponentWettedItem(
                name=c.name,
                wetted_area=c.wetted_area,
                characteristic_length=c.length,
                form_factor=c.form_factor,
            )
            for c in cfg.viscous_components
        ]
        drag = parasite_drag(
            items,
            mach=cfg.flow.mach,
            re_ref=cfg.viscous_re,
            ref_length=cfg.viscous_ref_length,
            sref=cfg.flow.sref,
        )
        cd0 = drag.cd0
        _write(out / "parasite.txt", drag.to_text())
    _write(out / "polar.csv", write_polar_csv(ffmf, cd0))
    update_manifest(cfg.output_dir)
    if cfg.viewer_command:
        subprocess.Popen([cfg.viewer_command, str(out / "views.mcr")])
    return out


def run_all(cfg: PipelineConfig, force: bool = False):
    with PipelineLock(cfg.output_dir):
        stage_mesh(cfg)
        built = stage_networks(cfg)
        _gate(built)
        stage_decks(cfg, force=force)
        stage_run(cfg)
        stage_post(cfg)
        return built


def _gate(built: BuiltModel):
    bad = built.report.mismatched
    if bad:
        raise UnresolvedAbutment(
            f"{len(bad)} mismatched edge pair(s) remain", bad
        )
    off = {n: f for n, f in built.orientation.items() if f < 1.0}
    if off:
        raise ToolchainError(f"orientation check failed for: {sorted(off)}")
