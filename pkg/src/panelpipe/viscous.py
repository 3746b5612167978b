"""Parasite drag from a reference-temperature flat-plate buildup.

Skin friction uses the Sommer-Short reference temperature

    T'/T = 1 + 0.035 M^2 + 0.45 (Tw/T - 1)

with the Prandtl-Schlichting incompressible turbulent correlation
Cf = 0.455 / log10(Re)^2.58 evaluated at the reference-condition Reynolds
number (power-law viscosity, w = 0.76). At M = 0 and Tw = T the result is
exactly the incompressible correlation. The buildup CD0 is a constant,
alpha-independent shift of the drag polar:

    CD0 = sum_i Cf_i * FF_i * Swet_i / sref
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfValidityRange

VISCOSITY_EXPONENT = 0.76


@dataclass(frozen=True)
class ComponentWettedItem:
    name: str
    wetted_area: float
    characteristic_length: float
    form_factor: float = 1.0
    tw_over_t: float = 1.0  # adiabatic-cool approximation

    def __post_init__(self):
        if self.wetted_area <= 0.0:
            raise ValueError(f"{self.name}: wetted_area must be positive")
        if self.characteristic_length <= 0.0:
            raise ValueError(f"{self.name}: characteristic_length must be positive")
        if self.form_factor < 1.0:
            raise ValueError(f"{self.name}: form_factor must be >= 1")


def incompressible_cf(re: float) -> float:
    """Prandtl-Schlichting turbulent flat-plate friction coefficient."""
    return 0.455 / np.log10(re) ** 2.58


def sommer_short_cf(re: float, mach: float, tw_over_t: float = 1.0) -> float:
    """Compressibility-corrected turbulent flat-plate Cf."""
    if re <= 1e5:
        raise OutOfValidityRange(f"Re {re:g} below the turbulent branch (need Re > 1e5)")
    if mach >= 0.8:
        raise OutOfValidityRange(f"M {mach:g} outside the subsonic validity range")
    t_ratio = 1.0 + 0.035 * mach**2 + 0.45 * (tw_over_t - 1.0)
    re_ref = re / t_ratio ** (1.0 + VISCOSITY_EXPONENT)
    return incompressible_cf(re_ref) / t_ratio


@dataclass(frozen=True)
class DragBreakdownRow:
    name: str
    reynolds: float
    cf: float
    form_factor: float
    wetted_area: float
    cd0: float


@dataclass(frozen=True)
class ParasiteDrag:
    cd0: float
    rows: tuple[DragBreakdownRow, ...]
    sref: float
    mach: float

    def to_text(self) -> str:
        lines = [
            f"parasite drag buildup (sref {self.sref:g}, M {self.mach:g})",
            f"{'component':16s} {'Re':>10s} {'Cf':>9s} {'FF':>5s} {'Swet':>9s} {'dCD0':>9s}",
        ]
        for r in self.rows:
            lines.append(
                f"{r.name:16s} {r.reynolds:10.3e} {r.cf:9.5f} {r.form_factor:5.2f} "
                f"{r.wetted_area:9.3f} {r.cd0:9.5f}"
            )
        lines.append(f"{'total CD0':16s} {'':10s} {'':9s} {'':5s} {'':9s} {self.cd0:9.5f}")
        lines.append(
            "assumptions: fully turbulent flat-plate friction at each component's "
            "Reynolds number; form factors as configured; CD0 referenced to sref "
            "and added unchanged to every polar point"
        )
        return "\n".join(lines) + "\n"


def parasite_drag(
    items,
    mach: float,
    re_ref: float,
    ref_length: float,
    sref: float,
) -> ParasiteDrag:
    """Component skin-friction buildup at a reference Reynolds number.

    ``re_ref`` is the Reynolds number at ``ref_length``; each component is
    evaluated at Re scaled by its own characteristic length.
    """
    if sref <= 0.0:
        raise ValueError("sref must be positive")
    items = list(items)
    if not items:
        raise ValueError("component list is empty")
    rows = []
    total = 0.0
    for it in items:
        re = re_ref * it.characteristic_length / ref_length
        cf = sommer_short_cf(re, mach, it.tw_over_t)
        dcd = cf * it.form_factor * it.wetted_area / sref
        rows.append(
            DragBreakdownRow(
                name=it.name,
                reynolds=re,
                cf=float(cf),
                form_factor=it.form_factor,
                wetted_area=it.wetted_area,
                cd0=float(dcd),
            )
        )
        total += dcd
    return ParasiteDrag(cd0=float(total), rows=tuple(rows), sref=sref, mach=mach)
