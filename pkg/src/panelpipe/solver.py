"""Reference potential-flow solver: constant-strength source/doublet panels.

Internal-Dirichlet formulation. Source strengths are prescribed from the
freestream (sigma = -n . V), doublet strengths solved so the perturbation
potential vanishes just inside every body panel; wake doublet columns are
folded onto their shedding trailing-edge panels through the Kutta
condition. Surface speed is freestream-tangential plus the surface
gradient of the doublet sheet, Cp = 1 - |V|^2 (freestream speed 1).

Doublet strength here equals the outside-minus-inside jump of the
perturbation potential, so the panel self-influence at the inset interior
collocation point is -1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import SingularMatrix
from .geometry import StructuredNetwork, panel_corner_grids
from .decks import FlowConditions

# Collocation points sit this fraction of the local panel scale inside the
# surface, off the doublet sheet's singular plane.
COLLOCATION_INSET = 1e-6

_MIRROR = np.array([1.0, -1.0, 1.0])


@dataclass(frozen=True)
class WakeAttachment:
    """A wake network tied to the upper/lower networks shedding it."""

    wake: StructuredNetwork
    upper: str  # name of the upper-surface network (columns TE -> LE)
    lower: str  # name of the lower-surface network (columns LE -> TE)


@dataclass(frozen=True)
class SolverModel:
    bodies: tuple[StructuredNetwork, ...]
    wakes: tuple[WakeAttachment, ...]
    flow: FlowConditions
    compressibility: str = "prandtl-glauert"  # or "none"

    def __post_init__(self):
        names = {b.name for b in self.bodies}
        for w in self.wakes:
            if w.upper not in names or w.lower not in names:
                raise ValueError(f"wake {w.wake.name!r} references unknown body networks")
        if self.compressibility not in ("none", "prandtl-glauert"):
            raise ValueError(f"unknown compressibility mode {self.compressibility!r}")
        if self.compressibility == "prandtl-glauert" and self.flow.mach >= 0.8:
            raise ValueError("prandtl-glauert correction requires mach < 0.8")

    @property
    def symmetric(self) -> bool:
        return self.flow.symmetry == "xz-plane"


@dataclass
class SolutionSet:
    """Per-alpha surface pressures and integrated coefficients."""

    alphas: list[float]
    node_cp: list[dict[str, np.ndarray]]  # per alpha: network name -> node grid
    panel_cp: list[dict[str, np.ndarray]]
    cl: list[float]
    cdi_nearfield: list[float]
    cdi_trefftz: list[float]
    cm: list[float]
    sigma: list[np.ndarray] = field(default_factory=list)
    mu: list[np.ndarray] = field(default_factory=list)


# --- panel influence ---------------------------------------------------------


def _panel_basis(corners: np.ndarray):
    """Local orthonormal frame and plane-projected corner coordinates."""
    g = corners.mean(axis=0)
    n = np.cross(corners[2] - corners[0], corners[3] - corners[1])
    nn = np.linalg.norm(n)
    if nn == 0.0:
        raise SingularMatrix("fully degenerate panel in influence assembly")
    n = n / nn
    t = corners[1] - corners[0]
    t = t - (t @ n) * n
    tn = np.linalg.norm(t)
    if tn == 0.0:
        t = corners[2] - corners[0]
        t = t - (t @ n) * n
        tn = np.linalg.norm(t)
    e1 = t / tn
    e2 = np.cross(n, e1)
    rel = corners - g
    return g, e1, e2, n, rel @ e1, rel @ e2


def panel_potentials(corners: np.ndarray, points: np.ndarray):
    """Source and doublet potentials of one quad panel at many points.

    Returns (phi_src, phi_dbl) per unit strength. Corners are taken in
    grid traversal order; repeated corners (collapsed edges) are fine.
    """
    g, e1, e2, n, xi, eta = _panel_basis(np.asarray(corners, dtype=float))
    d = np.atleast_2d(points) - g
    x = d @ e1
    y = d @ e2
    z = d @ n

    verts = np.column_stack([xi, eta, np.zeros(4)])
    pl = np.column_stack([x, y, z])
    omega = np.zeros(len(x))
    for a, b, c in ((0, 1, 2), (0, 2, 3)):
        r1v = verts[a] - pl
        r2v = verts[b] - pl
        r3v = verts[c] - pl
        r1 = np.sqrt(np.einsum("ij,ij->i", r1v, r1v))
        r2 = np.sqrt(np.einsum("ij,ij->i", r2v, r2v))
        r3 = np.sqrt(np.einsum("ij,ij->i", r3v, r3v))
        det = np.einsum("ij,ij->i", r1v, np.cross(r2v, r3v))
        den = (
            r1 * r2 * r3
            + np.einsum("ij,ij->i", r1v, r2v) * r3
            + np.einsum("ij,ij->i", r2v, r3v) * r1
            + np.einsum("ij,ij->i", r3v, r1v) * r2
        )
        omega += 2.0 * np.arctan2(det, den)

    edge_sum = np.zeros(len(x))
    for k in range(4):
        k2 = (k + 1) % 4
        dxk = xi[k2] - xi[k]
        dyk = eta[k2] - eta[k]
        dk = np.hypot(dxk, dyk)
        if dk < 1e-14:
            continue
        rk = np.sqrt((x - xi[k]) ** 2 + (y - eta[k]) ** 2 + z * z)
        rk2 = np.sqrt((x - xi[k2]) ** 2 + (y - eta[k2]) ** 2 + z * z)
        a = ((x - xi[k]) * dyk - (y - eta[k]) * dxk) / dk
        num = rk + rk2 + dk
        den2 = np.maximum(rk + rk2 - dk, 1e-300)
        edge_sum += a * np.log(num / den2)

    phi_dbl = -omega / (4.0 * np.pi)
    phi_src = (edge_sum - z * omega) / (4.0 * np.pi)
    return phi_src, phi_dbl


def _mirror_corners(corners: np.ndarray) -> np.ndarray:
    """Reflect a panel through y=0 keeping a consistent traversal sense."""
    return (corners * _MIRROR)[::-1]


# --- model panel bookkeeping --------------------------------------------------


@dataclass
class _Panels:
    """Flattened body panels with per-network index ranges."""

    corners: np.ndarray  # (N, 4, 3)
    centroid: np.ndarray  # (N, 3)
    normal: np.ndarray  # (N, 3)
    area: np.ndarray  # (N,)
    colloc: np.ndarray  # (N, 3)
    slices: dict[str, tuple[int, tuple[int, int]]]  # name -> (offset, (nr-1, nc-1))

    @property
    def count(self) -> int:
        return len(self.area)

    def index(self, name: str, i: int, j: int) -> int:
        off, (nr, nc) = self.slices[name]
        return off + i * nc + j


def _collect_panels(model: SolverModel) -> _Panels:
    corners = []
    slices = {}
    offset = 0
    for net in model.bodies:
        c1, c2, c3, c4 = panel_corner_grids(net.points)
        quad = np.stack([c1, c2, c3, c4], axis=2).reshape(-1, 4, 3)
        shape = (net.n_rows - 1, net.n_cols - 1)
        slices[net.name] = (offset, shape)
        offset += quad.shape[0]
        corners.append(quad)
    corners = np.concatenate(corners)
    centroid = corners.mean(axis=1)
    n = np.cross(corners[:, 2] - corners[:, 0], corners[:, 3] - corners[:, 1])
    mag = np.linalg.norm(n, axis=1)
    area = 0.5 * mag
    dead = mag < 1e-300
    safe = np.where(dead, 1.0, mag)
    normal = n / safe[:, None]
    # local panel scale: mean diagonal length
    scale = 0.5 * (
        np.linalg.norm(corners[:, 2] - corners[:, 0], axis=1)
        + np.linalg.norm(corners[:, 3] - corners[:, 1], axis=1)
    )
    colloc = centroid - COLLOCATION_INSET * scale[:, None] * normal
    return _Panels(
        corners=corners, centroid=centroid, normal=normal, area=area, colloc=colloc, slices=slices
    )


def _wake_strip_panels(att: WakeAttachment):
    """Corner sets of each spanwise wake strip panel."""
    pts = att.wake.points  # (2, n_cols, 3): rows TE, downstream
    c1, c2, c3, c4 = panel_corner_grids(pts)
    return np.stack([c1, c2, c3, c4], axis=2).reshape(-1, 4, 3)


@dataclass
class InfluenceSystem:
    panels: _Panels
    doublet: np.ndarray  # A, wake columns folded in
    source: np.ndarray  # B
    lu: tuple
    wake_sign: dict[str, np.ndarray]

    @property
    def size(self) -> int:
        return self.panels.count


def assemble_influence(model: SolverModel) -> InfluenceSystem:
    """Dense doublet matrix (wake folded via the Kutta condition) and source matrix."""
    panels = _collect_panels(model)
    n = panels.count
    A = np.empty((n, n))
    B = np.empty((n, n))
    pts = panels.colloc
    mirror = model.symmetric
    dead = panels.area <= 0.0

    for j in range(n):
        if dead[j]:
            # fully collapsed panel: no influence, identity row keeps A regular
            A[:, j] = 0.0
            B[:, j] = 0.0
            continue
        src, dbl = panel_potentials(panels.corners[j], pts)
        if mirror:
            src_m, dbl_m = panel_potentials(_mirror_corners(panels.corners[j]), pts)
            src = src + src_m
            dbl = dbl + dbl_m
        A[:, j] = dbl
        B[:, j] = src
    if dead.any():
        for j in np.nonzero(dead)[0]:
            A[j, j] = 1.0

    wake_sign = {}
    for att in model.wakes:
        strips = _wake_strip_panels(att)
        n_strips = len(strips)
        _, (nr_u, nc_u) = panels.slices[att.upper]
        _, (nr_l, nc_l) = panels.slices[att.lower]
        if n_strips != nr_u or n_strips != nr_l:
            raise ValueError(
                f"wake {att.wake.name!r}: {n_strips} strips vs {nr_u}/{nr_l} TE panel rows"
            )
        signs = np.empty(n_strips)
        for s in range(n_strips):
            iu = panels.index(att.upper, s, 0)
            il = panels.index(att.lower, s, nc_l - 1)
            wn = np.cross(strips[s, 2] - strips[s, 0], strips[s, 3] - strips[s, 1])
            sign = 1.0 if wn @ panels.normal[iu] >= 0.0 else -1.0
            signs[s] = sign
            _, dbl = panel_potentials(strips[s], pts)
            if mirror:
                _, dbl_m = panel_potentials(_mirror_corners(strips[s]), pts)
                dbl = dbl + dbl_m
            A[:, iu] += sign * dbl
            A[:, il] -= sign * dbl
        wake_sign[att.wake.name] = signs

    try:
        lu = scipy.linalg.lu_factor(A)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - scipy raises rarely here
        raise SingularMatrix(str(exc)) from exc
    return InfluenceSystem(panels=panels, doublet=A, source=B, lu=lu, wake_sign=wake_sign)


# --- solving ------------------------------------------------------------------


def freestream_direction(alpha_deg: float, beta_deg: float = 0.0) -> np.ndarray:
    a = np.radians(alpha_deg)
    b = np.radians(beta_deg)
    return np.array([np.cos(a) * np.cos(b), -np.sin(b), np.sin(a) * np.cos(b)])


@dataclass
class Strengths:
    alpha: float
    sigma: np.ndarray
    mu: np.ndarray


def solve(model: SolverModel, alpha: float, system: InfluenceSystem | None = None) -> Strengths:
    """Solve for panel strengths at one angle of attack (degrees)."""
    if system is None:
        system = assemble_influence(model)
    if model.symmetric and abs(model.flow.beta) > 0.0:
        raise ValueError("symmetric half-models require zero sideslip")
    vinf = freestream_direction(alpha, model.flow.beta)
    sigma = -(system.panels.normal @ vinf)
    sigma[system.panels.area <= 0.0] = 0.0
    b = -(system.source @ sigma)
    mu = scipy.linalg.lu_solve(system.lu, b)
    resid = np.abs(system.doublet @ mu - b).max()
    bound = 1e-10 * max(np.abs(b).max(), 1e-30)
    if not np.isfinite(resid) or resid > bound:
        worst = int(np.argmax(np.abs(system.doublet @ mu - b)))
        raise SingularMatrix(
            f"linear solve residual {resid:g} exceeds bound {bound:g}; "
            f"worst-conditioned row is panel {worst} "
            f"(centroid {system.panels.centroid[worst]})"
        )
    return Strengths(alpha=float(alpha), sigma=sigma, mu=mu)


# --- surface velocity and pressure --------------------------------------------


def _d_ds_weights(a: float, b: float):
    """Nonuniform 3-point first-derivative weights at the left point of (0, a, a+b)."""
    c = a + b
    return (-(a + c) / (a * c), c / (a * b), -a / (b * c))


def _grid_derivative(values: np.ndarray, centers: np.ndarray, axis: int, wrap: bool):
    """d(values)/ds and dP/ds along one grid direction of a panel grid.

    Arc length measured through panel centers; second-order central
    differences inside, second-order one-sided at edges, cyclic when the
    grid wraps in that direction.
    """
    v = np.moveaxis(values, axis, 0)
    p = np.moveaxis(centers, axis, 0)
    n = v.shape[0]
    dv = np.zeros_like(v)
    dp = np.zeros_like(p)
    if n == 1:
        return np.moveaxis(dv, 0, axis), np.moveaxis(dp, 0, axis)

    if wrap and n > 2:
        vp = np.concatenate([v[-1:], v, v[:1]], axis=0)
        pp = np.concatenate([p[-1:], p, p[:1]], axis=0)
        for i in range(n):
            a = np.linalg.norm(pp[i + 1] - pp[i], axis=-1)
            b = np.linalg.norm(pp[i + 2] - pp[i + 1], axis=-1)
            wm = -b / (a * (a + b))
            w0 = (b - a) / (a * b)
            wp = a / (b * (a + b))
            dv[i] = wm * vp[i] + w0 * vp[i + 1] + wp * vp[i + 2]
            dp[i] = wm[..., None] * pp[i] + w0[..., None] * pp[i + 1] + wp[..., None] * pp[i + 2]
        return np.moveaxis(dv, 0, axis), np.moveaxis(dp, 0, axis)

    for i in range(n):
        if 0 < i < n - 1:
            a = np.linalg.norm(p[i] - p[i - 1], axis=-1)
            b = np.linalg.norm(p[i + 1] - p[i], axis=-1)
            wm = -b / (a * (a + b))
            w0 = (b - a) / (a * b)
            wp = a / (b * (a + b))
            dv[i] = wm * v[i - 1] + w0 * v[i] + wp * v[i + 1]
            dp[i] = wm[..., None] * p[i - 1] + w0[..., None] * p[i] + wp[..., None] * p[i + 1]
        elif i == 0:
            if n == 2:
                a = np.linalg.norm(p[1] - p[0], axis=-1)
                dv[i] = (v[1] - v[0]) / a
                dp[i] = (p[1] - p[0]) / a[..., None]
            else:
                a = np.linalg.norm(p[1] - p[0], axis=-1)
                b = np.linalg.norm(p[2] - p[1], axis=-1)
                w0, w1, w2 = _d_ds_weights(a, b)
                dv[i] = w0 * v[0] + w1 * v[1] + w2 * v[2]
                dp[i] = w0[..., None] * p[0] + w1[..., None] * p[1] + w2[..., None] * p[2]
        else:
            if n == 2:
                a = np.linalg.norm(p[1] - p[0], axis=-1)
                dv[i] = (v[1] - v[0]) / a
                dp[i] = (p[1] - p[0]) / a[..., None]
            else:
                a = np.linalg.norm(p[-2] - p[-1], axis=-1)
                b = np.linalg.norm(p[-3] - p[-2], axis=-1)
                w0, w1, w2 = _d_ds_weights(a, b)
                dv[i] = -(w0 * v[-1] + w1 * v[-2] + w2 * v[-3])
                dp[i] = -(w0[..., None] * p[-1] + w1[..., None] * p[-2] + w2[..., None] * p[-3])
    return np.moveaxis(dv, 0, axis), np.moveaxis(dp, 0, axis)


def prandtl_glauert_factor(model: SolverModel) -> float:
    if model.compressibility == "prandtl-glauert" and model.flow.mach > 0.0:
        return 1.0 / np.sqrt(1.0 - model.flow.mach**2)
    return 1.0


def surface_cp(model: SolverModel, system: InfluenceSystem, strengths: Strengths):
    """Panel-grid and node-grid Cp per body network.

    Surface velocity = tangential freestream + surface gradient of the
    doublet sheet; the gradient uses grid-line finite differences (cyclic
    across duplicated seam columns). Returns (panel_cp, node_cp) dicts.
    """
    vinf = freestream_direction(strengths.alpha, model.flow.beta)
    pg = prandtl_glauert_factor(model)
    panel_cp = {}
    node_cp = {}
    for net in model.bodies:
        off, (nr, nc) = system.panels.slices[net.name]
        count = nr * nc
        mu = strengths.mu[off : off + count].reshape(nr, nc)
        centers = system.panels.centroid[off : off + count].reshape(nr, nc, 3)
        normals = system.panels.normal[off : off + count].reshape(nr, nc, 3)

        wrap_cols = bool(
            np.allclose(net.points[:, 0], net.points[:, -1], atol=0.0, rtol=0.0)
        ) and nc > 2
        # Symmetric half-models: extend on-plane edges with mirror-image ghost
        # rows/columns so stencils match the explicit full-span model.
        r0 = r1 = c0 = c1 = 0
        if model.symmetric:
            scale = max(np.abs(net.points).max(), 1.0)
            atol = 1e-9 * scale
            if np.all(np.abs(net.points[0, :, 1]) <= atol):
                mu = np.vstack([mu[:1], mu])
                centers = np.concatenate([centers[:1] * _MIRROR, centers], axis=0)
                r0 = 1
            if np.all(np.abs(net.points[-1, :, 1]) <= atol):
                mu = np.vstack([mu, mu[-1:]])
                centers = np.concatenate([centers, centers[-1:] * _MIRROR], axis=0)
                r1 = 1
            if not wrap_cols and np.all(np.abs(net.points[:, 0, 1]) <= atol):
                mu = np.hstack([mu[:, :1], mu])
                centers = np.concatenate([centers[:, :1] * _MIRROR, centers], axis=1)
                c0 = 1
            if not wrap_cols and np.all(np.abs(net.points[:, -1, 1]) <= atol):
                mu = np.hstack([mu, mu[:, -1:]])
                centers = np.concatenate([centers, centers[:, -1:] * _MIRROR], axis=1)
                c1 = 1

        dmu1, dp1 = _grid_derivative(mu, centers, axis=1, wrap=wrap_cols)  # chordwise
        dmu2, dp2 = _grid_derivative(mu, centers, axis=0, wrap=False)  # spanwise
        if r0 or r1 or c0 or c1:
            sl = (slice(r0, mu.shape[0] - r1), slice(c0, mu.shape[1] - c1))
            dmu1, dp1 = dmu1[sl], dp1[sl]
            dmu2, dp2 = dmu2[sl], dp2[sl]

        t1 = dp1
        t2 = dp2
        n1 = np.linalg.norm(t1, axis=2)
        n2 = np.linalg.norm(t2, axis=2)
        ok1 = n1 > 0
        ok2 = n2 > 0
        t1 = np.where(ok1[..., None], t1 / np.where(ok1, n1, 1.0)[..., None], 0.0)
        t2 = np.where(ok2[..., None], t2 / np.where(ok2, n2, 1.0)[..., None], 0.0)

        g11 = np.einsum("ijk,ijk->ij", t1, t1)
        g12 = np.einsum("ijk,ijk->ij", t1, t2)
        g22 = np.einsum("ijk,ijk->ij", t2, t2)
        det = g11 * g22 - g12 * g12
        det = np.where(np.abs(det) > 1e-12, det, 1.0)
        a = (g22 * dmu1 - g12 * dmu2) / det
        b = (g11 * dmu2 - g12 * dmu1) / det
        v_pert = a[..., None] * t1 + b[..., None] * t2

        v_tan_inf = vinf - np.einsum("ijk,k->ij", normals, vinf)[..., None] * normals
        v = v_tan_inf + v_pert
        cp = (1.0 - np.einsum("ijk,ijk->ij", v, v)) * pg
        panel_cp[net.name] = cp
        node_cp[net.name] = _panels_to_nodes(cp)
    return panel_cp, node_cp


def _panels_to_nodes(cp: np.ndarray) -> np.ndarray:
    """Average panel values onto the surrounding node grid."""
    nr, nc = cp.shape
    acc = np.zeros((nr + 1, nc + 1))
    cnt = np.zeros((nr + 1, nc + 1))
    for di in (0, 1):
        for dj in (0, 1):
            acc[di : nr + di, dj : nc + dj] += cp
            cnt[di : nr + di, dj : nc + dj] += 1.0
    return acc / cnt


# --- force integration ---------------------------------------------------------


def force_coefficients(model: SolverModel, system: InfluenceSystem, panel_cp: dict):
    """Force and pitching-moment coefficients from pressure integration.

    Returns (CF vector, Cm) referenced to sref/cbar about the moment
    reference point; symmetric models double the modeled half (side force
    discarded).
    """
    flow = model.flow
    f = np.zeros(3)
    m_y = 0.0
    ref = np.array([flow.xref, flow.yref, flow.zref])
    for net in model.bodies:
        off, (nr, nc) = system.panels.slices[net.name]
        count = nr * nc
        cp = panel_cp[net.name].reshape(-1)
        normals = system.panels.normal[off : off + count]
        areas = system.panels.area[off : off + count]
        centers = system.panels.centroid[off : off + count]
        df = (-cp * areas)[:, None] * normals
        f += df.sum(axis=0)
        arm = centers - ref
        m_y += (arm[:, 2] * df[:, 0] - arm[:, 0] * df[:, 2]).sum()
    if model.symmetric:
        f = 2.0 * f * np.array([1.0, 0.0, 1.0])
        m_y *= 2.0
    return f / flow.sref, m_y / (flow.sref * flow.cbar)


def integrate_forces(model: SolverModel, system: InfluenceSystem, panel_cp: dict, alpha: float):
    """(CL, CDi_nearfield, Cm) in wind axes at the given alpha."""
    cf, cm = force_coefficients(model, system, panel_cp)
    a = np.radians(alpha)
    lift_dir = np.array([-np.sin(a), 0.0, np.cos(a)])
    drag_dir = freestream_direction(alpha, model.flow.beta)
    return float(cf @ lift_dir), float(cf @ drag_dir), float(cm)


def trefftz_cdi(model: SolverModel, system: InfluenceSystem, strengths: Strengths) -> float:
    """Induced drag from the Trefftz-plane integral of the wake circulation.

    Each spanwise wake strip carries the trailing-edge doublet jump as its
    circulation; trailing vortices pierce the far-downstream plane at the
    strip edges and the drag integral is evaluated at strip midpoints.
    """
    vinf = freestream_direction(strengths.alpha, model.flow.beta)
    eta_hat = np.array([0.0, 1.0, 0.0])
    eta_hat = eta_hat - (eta_hat @ vinf) * vinf
    eta_hat /= np.linalg.norm(eta_hat)
    zeta_hat = np.cross(vinf, eta_hat)

    strips = []  # (eta_left, eta_right, zeta_left, zeta_right, gamma)
    for att in model.wakes:
        te = att.wake.points[0]  # (n_cols, 3)
        eta = te @ eta_hat
        zeta = te @ zeta_hat
        _, (nr_u, nc_u) = system.panels.slices[att.upper]
        _, (nr_l, nc_l) = system.panels.slices[att.lower]
        for s in range(att.wake.n_cols - 1):
            iu = system.panels.index(att.upper, s, 0)
            il = system.panels.index(att.lower, s, nc_l - 1)
            gamma = strengths.mu[iu] - strengths.mu[il]
            strips.append((eta[s], eta[s + 1], zeta[s], zeta[s + 1], gamma))
    if not strips:
        return 0.0
    if model.symmetric:
        mirrored = [(-er, -el, zr, zl, g) for (el, er, zl, zr, g) in strips]
        strips = strips + mirrored

    arr = np.array(strips)
    el, er, zl, zr, gam = arr.T
    # trailing vortex pierce points: -gamma at the left edge, +gamma at the right
    vx = np.concatenate([el, er])
    vz = np.concatenate([zl, zr])
    vg = np.concatenate([-gam, gam])
    mid_eta = 0.5 * (el + er)
    mid_zeta = 0.5 * (zl + zr)

    deta = mid_eta[:, None] - vx[None, :]
    dzeta = mid_zeta[:, None] - vz[None, :]
    r2 = deta**2 + dzeta**2
    r2 = np.where(r2 > 0.0, r2, np.inf)
    # in-plane velocity of a vortex along +V: v_zeta = gamma * d_eta / (2 pi r^2)
    v_zeta = (vg[None, :] * deta / (2.0 * np.pi * r2)).sum(axis=1)
    downwash = -v_zeta
    width = er - el
    cdi = float((gam * downwash * width).sum() / model.flow.sref)
    return cdi * prandtl_glauert_factor(model) ** 2


# --- sweep ---------------------------------------------------------------------


def sweep(model: SolverModel, alphas, system: InfluenceSystem | None = None) -> SolutionSet:
    """Solve all angles of attack reusing one factorization."""
    if system is None:
        system = assemble_influence(model)
    out = SolutionSet(
        alphas=[float(a) for a in alphas],
        node_cp=[],
        panel_cp=[],
        cl=[],
        cdi_nearfield=[],
        cdi_trefftz=[],
        cm=[],
    )
    for alpha in out.alphas:
        s = solve(model, alpha, system)
        pcp, ncp = surface_cp(model, system, s)
        cl, cdn, cm = integrate_forces(model, system, pcp, alpha)
        out.panel_cp.append(pcp)
        out.node_cp.append(ncp)
        out.cl.append(cl)
        out.cdi_nearfield.append(cdn)
        out.cdi_trefftz.append(trefftz_cdi(model, system, s))
        out.cm.append(cm)
        out.sigma.append(s.sigma)
        out.mu.append(s.mu)
    return out
