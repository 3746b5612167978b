"""Pipeline configuration: one YAML file, flags override file values."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .decks import FlowConditions
from .errors import ConfigError

COMPONENT_KINDS = ("wing", "htail", "fuselage")


@dataclass(frozen=True)
class ComponentDef:
    name: str
    kind: str  # wing | htail | fuselage
    axis: str = "x"


@dataclass(frozen=True)
class ViscousComponent:
    name: str
    wetted_area: float
    length: float
    form_factor: float = 1.0


@dataclass(frozen=True)
class PipelineConfig:
    mesh: Path
    output_dir: Path
    components: tuple[ComponentDef, ...]
    flow: FlowConditions
    station_tol: float | None = None  # None: 1e-6 * bbox diagonal
    abutment_tol: float | None = None  # None: 1e-4 * bbox diagonal
    weld: bool = True
    wake_length_chords: float = 20.0
    wake_direction: tuple[float, float, float] = (1.0, 0.0, 0.0)
    backend: str = "embedded"  # embedded | external
    compressibility: str = "prandtl-glauert"
    panin: Path | None = None
    panair: Path | None = None
    timeout_s: float = 3600.0
    viscous_enabled: bool = False
    viscous_re: float = 2.0e6
    viscous_ref_length: float = 1.0
    viscous_components: tuple[ViscousComponent, ...] = ()
    viewer_command: str | None = None
    jobs: int = 1


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def load_config(path, overrides: dict | None = None) -> PipelineConfig:
    """Load and validate the pipeline config; overrides win over the file."""
    path = Path(path)
    _require(path.is_file(), f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    _require(isinstance(raw, dict), "config root must be a mapping")
    overrides = overrides or {}

    base = path.parent

    def as_path(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    _require("mesh" in raw, "config needs a 'mesh' path")
    _require("output_dir" in raw, "config needs an 'output_dir'")
    mesh = as_path(raw["mesh"])
    _require(mesh.is_file(), f"mesh file not found: {mesh}")

    comps = []
    for c in raw.get("components", []):
        _require(
            isinstance(c, dict) and "name" in c and "kind" in c,
            "each component needs 'name' and 'kind'",
        )
        _require(
            c["kind"] in COMPONENT_KINDS,
            f"component {c['name']!r}: kind must be one of {COMPONENT_KINDS}",
        )
        comps.append(ComponentDef(name=c["name"], kind=c["kind"], axis=c.get("axis", "x")))
    _require(comps, "config needs at least one component")

    fl = dict(raw.get("flow", {}))
    if "alphas" in overrides:
        fl["alphas"] = overrides["alphas"]
    try:
        flow = FlowConditions(
            mach=float(fl.get("mach", 0.0)),
            alphas=tuple(float(a) for a in fl.get("alphas", (0.0,))),
            beta=float(fl.get("beta", 0.0)),
            sref=float(fl.get("sref", 1.0)),
            span=float(fl.get("span", 1.0)),
            cbar=float(fl.get("cbar", 1.0)),
            xref=float(fl.get("xref", 0.0)),
            yref=float(fl.get("yref", 0.0)),
            zref=float(fl.get("zref", 0.0)),
            symmetry=str(fl.get("symmetry", "none")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad flow conditions: {exc}") from exc

    ab = raw.get("abutment", {}) or {}
    wk = raw.get("wake", {}) or {}
    so = raw.get("solver", {}) or {}
    ex = raw.get("external", {}) or {}
    vi = raw.get("viscous", {}) or {}
    vw = raw.get("viewer", {}) or {}

    backend = overrides.get("backend", so.get("backend", "embedded"))
    _require(backend in ("embedded", "external"), f"unknown backend {backend!r}")
    panin = as_path(ex["panin"]) if ex.get("panin") else None
    panair = as_path(ex["panair"]) if ex.get("panair") else None
    if backend == "external":
        _require(panair is not None, "external backend needs external.panair")
        _require(
            panair.is_file() and os.access(panair, os.X_OK),
            f"external solver not runnable: {panair}",
        )
        if panin is not None:
            _require(
                panin.is_file() and os.access(panin, os.X_OK),
                f"external translator not runnable: {panin}",
            )

    vcomps = []
    for c in vi.get("components", []) or []:
        try:
            vcomps.append(
                ViscousComponent(
                    name=c["name"],
                    wetted_area=float(c["wetted_area"]),
                    length=float(c["length"]),
                    form_factor=float(c.get("form_factor", 1.0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad viscous component entry {c!r}: {exc}") from exc

    jobs = int(overrides.get("jobs", raw.get("jobs", 1)))
    _require(jobs >= 1, "jobs must be >= 1")

    ref = vi.get("reference", {}) or {}
    return PipelineConfig(
        mesh=mesh,
        output_dir=as_path(raw["output_dir"]),
        components=tuple(comps),
        flow=flow,
        station_tol=float(raw["station_tol"]) if raw.get("station_tol") is not None else None,
        abutment_tol=float(ab["tolerance"]) if ab.get("tolerance") is not None else None,
        weld=bool(ab.get("weld", True)),
        wake_length_chords=float(wk.get("length_chords", 20.0)),
        wake_direction=tuple(float(v) for v in wk.get("direction", (1.0, 0.0, 0.0))),
        backend=backend,
        compressibility=str(so.get("compressibility", "prandtl-glauert")),
        panin=panin,
        panair=panair,
        timeout_s=float(ex.get("timeout_s", 3600.0)),
        viscous_enabled=bool(vi.get("enabled", False)),
        viscous_re=float(ref.get("re", 2.0e6)),
        viscous_ref_length=float(ref.get("length", 1.0)),
        viscous_components=tuple(vcomps),
        viewer_command=vw.get("command"),
        jobs=jobs,
    )
