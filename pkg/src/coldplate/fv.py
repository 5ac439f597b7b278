"""Steady 3D finite-volume conduction in the plate, coupled to a 1D
coolant energy march.

Uniform Cartesian cells; channels are rasterized as void cells (stair-step)
and every solid face adjacent to a void cell gets a Robin condition against
the local coolant bulk temperature. The film coefficient is rescaled per
channel so that h * (voxelized wetted area) equals h * (analytic wetted
area), which keeps the total convective conductance independent of the
rasterization. Exterior faces are adiabatic except where die footprints
impose heat flux (and an optional exterior convective face used by the
slab verification cases).

The linear system is symmetric positive definite and is solved by
preconditioned conjugate gradients; the contract is the residual
tolerance, not the method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix, diags
from scipy.sparse.linalg import cg

from . import hydraulics, thermal
from .geometry import (Assembly, ChannelShape, Rectangular, Semicircular,
                       channel_depth, cross_section_area, validate,
                       wetted_perimeter)
from .hydraulics import FlowCondition
from .properties import CoolantProps, SolidMaterial

_SUBSAMPLE = 4  # per-axis samples for rasterization; even count keeps
                # samples off the cell midlines


class GridResolutionError(ValueError):
    """Resolution cannot resolve the cover between channels and surface."""


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual_history: list[float]):
        super().__init__(message)
        self.residual_history = residual_history


@dataclass(frozen=True)
class ChannelInfo:
    index: int
    y_center: float  # m
    row: str         # "top" | "bottom"
    area: float      # analytic flow area, m^2
    perimeter: float  # analytic wetted perimeter, m


@dataclass
class Grid:
    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float
    void: np.ndarray         # bool (nx, ny, nz)
    channel_id: np.ndarray   # int (nx, ny, nz), -1 for solid
    channels: tuple[ChannelInfo, ...]
    flux_top: np.ndarray     # (nx, ny) W/m^2 on the exterior top face
    flux_bottom: np.ndarray  # (nx, ny) W/m^2 on the exterior bottom face
    shape: ChannelShape | None = None
    # (face, h, fixed fluid temperature offset flag) for slab-style cases:
    # the fluid is held at the flow inlet temperature
    exterior_convection: tuple[str, float] | None = None

    @property
    def cell_count(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def total_power(self) -> float:
        area = self.dx * self.dy
        return float((self.flux_top.sum() + self.flux_bottom.sum()) * area)


@dataclass
class FvSolution:
    temperature: np.ndarray       # (nx, ny, nz) deg C; coolant temp in voids
    t_max: float                  # deg C, surface-corrected
    coolant_profile: np.ndarray   # (n_channels, nx + 1) deg C
    residual: float               # final relative linear residual
    iterations: int               # outer fluid-coupling iterations
    energy_imbalance: float       # W, imposed minus removed

    def to_json(self) -> dict:
        return {
            "t_max_C": self.t_max,
            "residual": self.residual,
            "iterations": self.iterations,
            "energy_imbalance_W": self.energy_imbalance,
            "coolant_outlet_C": [float(p[-1]) for p in self.coolant_profile],
        }


# --------------------------------------------------------------------------
# grid construction

def _channel_cross_section(shape: ChannelShape, row: str, y_center: float,
                           cover: float, thickness: float):
    """Return an inside(y, z) predicate for one channel's cross-section."""
    depth = channel_depth(shape)
    if row == "top":
        z_flat = thickness - cover      # flat side toward the top face
    else:
        z_flat = cover
    if isinstance(shape, Semicircular):
        r2 = shape.radius**2

        def inside(y, z):
            dzs = z_flat - z if row == "top" else z - z_flat
            return (dzs >= 0.0) & ((y - y_center)**2 + dzs**2 <= r2)
    else:
        half_w = shape.width / 2.0

        def inside(y, z):
            if row == "top":
                in_z = (z <= z_flat) & (z >= z_flat - depth)
            else:
                in_z = (z >= z_flat) & (z <= z_flat + depth)
            return in_z & (np.abs(y - y_center) <= half_w)
    return inside


def build_grid(assembly: Assembly, resolution: float) -> Grid:
    """Voxelize the assembly at a target cell size.

    A cell becomes channel void when at least half of a 5x5 sample of its
    cross-section lies inside the channel. Die powers are renormalized over
    the exterior faces they cover so the imposed power is conserved exactly.
    """
    if resolution <= 0:
        raise ValueError("resolution must be > 0")
    violations = validate(assembly)
    if violations:
        raise ValueError("invalid assembly: " + "; ".join(violations))

    plate, layout = assembly.plate, assembly.layout
    nx = max(2, round(plate.length / resolution))
    ny = max(2, round(plate.width / resolution))
    nz = max(2, round(plate.thickness / resolution))
    dx, dy, dz = plate.length / nx, plate.width / ny, plate.thickness / nz

    void = np.zeros((nx, ny, nz), dtype=bool)
    channel_id = np.full((nx, ny, nz), -1, dtype=np.int32)

    shape = layout.shape
    rows = ["top"] if layout.rows == 1 else ["bottom", "top"]
    y_centers = assembly.channel_y_centers()
    channels = []

    # symmetric sample offsets within a cell
    offs = (np.arange(_SUBSAMPLE) + 0.5) / _SUBSAMPLE - 0.5
    yc_cell = (np.arange(ny) + 0.5) * dy
    zc_cell = (np.arange(nz) + 0.5) * dz
    ys = (yc_cell[:, None, None, None] + offs[None, None, :, None] * dy)
    zs = (zc_cell[None, :, None, None] + offs[None, None, None, :] * dz)

    index = 0
    for row in rows:
        for y_center in y_centers:
            inside = _channel_cross_section(shape, row, y_center,
                                            layout.cover_thickness,
                                            plate.thickness)
            frac = inside(ys, zs).mean(axis=(2, 3))  # (ny, nz)
            # strictly more than half inside: half-covered cells stay solid,
            # which keeps a fully-covered cover layer solid
            mask = frac > 0.5
            if not mask.any():
                raise GridResolutionError(
                    f"resolution {resolution} m cannot resolve channel at "
                    f"y = {y_center * 1e3:.2f} mm")
            void[:, mask] = True
            channel_id[:, mask] = index
            channels.append(ChannelInfo(
                index=index, y_center=y_center, row=row,
                area=cross_section_area(shape),
                perimeter=wetted_perimeter(shape)))
            index += 1

    if void[:, :, 0].any() or void[:, :, -1].any():
        raise GridResolutionError(
            "resolution too coarse to resolve cover_thickness: channel void "
            "reaches an exterior cell layer")

    flux_top = np.zeros((nx, ny))
    flux_bottom = np.zeros((nx, ny))
    xc = (np.arange(nx) + 0.5) * dx
    yc = (np.arange(ny) + 0.5) * dy
    face_area = dx * dy
    for mod in assembly.modules:
        target = flux_top if mod.face == "top" else flux_bottom
        for die in mod.dies:
            if die.power == 0:
                continue
            cx, cy = die.center
            fx, fy = die.footprint
            in_x = np.abs(xc - cx) <= fx / 2.0 + 1e-12
            in_y = np.abs(yc - cy) <= fy / 2.0 + 1e-12
            cells = np.outer(in_x, in_y)
            n = int(cells.sum())
            if n == 0:
                # die smaller than a cell: deposit on the nearest face
                i = int(np.argmin(np.abs(xc - cx)))
                j = int(np.argmin(np.abs(yc - cy)))
                cells = np.zeros((nx, ny), dtype=bool)
                cells[i, j] = True
                n = 1
            target[cells] += die.power / (n * face_area)

    return Grid(nx=nx, ny=ny, nz=nz, dx=dx, dy=dy, dz=dz, void=void,
                channel_id=channel_id, channels=tuple(channels),
                flux_top=flux_top, flux_bottom=flux_bottom, shape=shape)


def make_slab_grid(length: float, width: float, thickness: float,
                   resolution: float, flux_top: float, h_bottom: float,
                   patch: tuple[float, float, float, float] | None = None,
                   ) -> Grid:
    """All-solid slab with top heat flux and a convective bottom face at
    the flow inlet temperature; verification oracle geometry.

    With patch=(cx, cy, dx, dy) the flux is confined to that footprint
    (flux_top then being the total power over the patch area), which
    introduces real spreading and therefore real discretization error.
    """
    nx = max(2, round(length / resolution))
    ny = max(2, round(width / resolution))
    nz = max(2, round(thickness / resolution))
    dx, dy = length / nx, width / ny
    if patch is None:
        top = np.full((nx, ny), flux_top)
    else:
        cx, cy, pdx, pdy = patch
        xc = (np.arange(nx) + 0.5) * dx
        yc = (np.arange(ny) + 0.5) * dy
        cells = np.outer(np.abs(xc - cx) <= pdx / 2.0 + 1e-12,
                         np.abs(yc - cy) <= pdy / 2.0 + 1e-12)
        top = np.zeros((nx, ny))
        # renormalize so the imposed power is resolution-independent
        power = flux_top * pdx * pdy
        top[cells] = power / (cells.sum() * dx * dy)
    return Grid(
        nx=nx, ny=ny, nz=nz,
        dx=dx, dy=dy, dz=thickness / nz,
        void=np.zeros((nx, ny, nz), dtype=bool),
        channel_id=np.full((nx, ny, nz), -1, dtype=np.int32),
        channels=(),
        flux_top=top,
        flux_bottom=np.zeros((nx, ny)),
        shape=None,
        exterior_convection=("bottom", h_bottom))


# --------------------------------------------------------------------------
# solver

@dataclass
class _System:
    matrix: object            # csr
    diag: np.ndarray
    rhs_fixed: np.ndarray     # flux + exterior-convection contributions
    conv_cell: np.ndarray     # solid unknown index per channel face
    conv_ua: np.ndarray       # U*A per channel face, W/K
    conv_channel: np.ndarray  # channel index per face
    conv_station: np.ndarray  # x index per face
    n_unknowns: int
    index: np.ndarray         # (nx, ny, nz) -> unknown index or -1


def _assemble(grid: Grid, material: SolidMaterial, h_by_channel: np.ndarray,
              inlet: float) -> _System:
    k = material.thermal_conductivity
    solid = ~grid.void
    n = int(solid.sum())
    index = np.full(grid.void.shape, -1, dtype=np.int64)
    index[solid] = np.arange(n)

    rows_l, cols_l, data_l = [], [], []
    diag = np.zeros(n)
    rhs_fixed = np.zeros(n)
    conv_cell, conv_ua, conv_channel, conv_station = [], [], [], []

    face_area = {
        0: grid.dy * grid.dz,
        1: grid.dx * grid.dz,
        2: grid.dx * grid.dy,
    }
    spacing = {0: grid.dx, 1: grid.dy, 2: grid.dz}

    # per-channel voxel wetted area for the h correction
    voxel_area = np.zeros(max(len(grid.channels), 1))
    for axis in range(3):
        sl_a = [slice(None)] * 3
        sl_b = [slice(None)] * 3
        sl_a[axis] = slice(None, -1)
        sl_b[axis] = slice(1, None)
        area = face_area[axis]
        for solid_sl, void_sl in ((sl_a, sl_b), (sl_b, sl_a)):
            m = ~grid.void[tuple(solid_sl)] & grid.void[tuple(void_sl)]
            ids = grid.channel_id[tuple(void_sl)][m]
            np.add.at(voxel_area, ids, area)

    h_corr = np.zeros(max(len(grid.channels), 1))
    for ch in grid.channels:
        analytic = ch.perimeter * grid.nx * grid.dx
        h_corr[ch.index] = h_by_channel[ch.index] * analytic / voxel_area[ch.index]

    for axis in range(3):
        sl_a = [slice(None)] * 3
        sl_b = [slice(None)] * 3
        sl_a[axis] = slice(None, -1)
        sl_b[axis] = slice(1, None)
        area = face_area[axis]
        d = spacing[axis]
        g = k * area / d

        a_solid = solid[tuple(sl_a)]
        b_solid = solid[tuple(sl_b)]

        # solid-solid conduction
        both = a_solid & b_solid
        ia = index[tuple(sl_a)][both]
        ib = index[tuple(sl_b)][both]
        rows_l.extend((ia, ib))
        cols_l.extend((ib, ia))
        data_l.extend((np.full(ia.size, -g), np.full(ia.size, -g)))
        np.add.at(diag, ia, g)
        np.add.at(diag, ib, g)

        # solid face against a channel void: Robin coupling
        for solid_sl, void_sl in ((sl_a, sl_b), (sl_b, sl_a)):
            m = solid[tuple(solid_sl)] & grid.void[tuple(void_sl)]
            if not m.any():
                continue
            cells = index[tuple(solid_sl)][m]
            ids = grid.channel_id[tuple(void_sl)][m]
            # station = global x index of the solid cell owning the face
            xidx = np.broadcast_to(
                np.arange(grid.void.shape[0])[:, None, None],
                grid.void.shape)
            xs = xidx[tuple(solid_sl)][m]
            u = 1.0 / (d / (2.0 * k) + 1.0 / h_corr[ids])
            ua = u * area
            np.add.at(diag, cells, ua)
            conv_cell.append(cells)
            conv_ua.append(ua)
            conv_channel.append(ids)
            conv_station.append(xs)

    # exterior top/bottom heat flux
    area_z = face_area[2]
    for layer, flux in ((grid.nz - 1, grid.flux_top), (0, grid.flux_bottom)):
        m = solid[:, :, layer] & (flux != 0.0)
        cells = index[:, :, layer][m]
        rhs_fixed[cells] += flux[m] * area_z

    # optional exterior convective face (slab cases)
    if grid.exterior_convection is not None:
        face, h_ext = grid.exterior_convection
        layer = 0 if face == "bottom" else grid.nz - 1
        u = 1.0 / (grid.dz / (2.0 * k) + 1.0 / h_ext)
        m = solid[:, :, layer]
        cells = index[:, :, layer][m]
        np.add.at(diag, cells, u * area_z)
        rhs_fixed[cells] += u * area_z * inlet

    if diag.size and not (len(conv_cell) or grid.exterior_convection):
        raise ValueError("grid has no convective faces; the steady problem "
                         "is singular")

    rows = np.concatenate(rows_l) if rows_l else np.array([], dtype=np.int64)
    cols = np.concatenate(cols_l) if cols_l else np.array([], dtype=np.int64)
    data = np.concatenate(data_l) if data_l else np.array([])
    rows = np.concatenate([rows, np.arange(n)])
    cols = np.concatenate([cols, np.arange(n)])
    data = np.concatenate([data, diag])
    matrix = coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()

    cat = (lambda parts, dtype=None: np.concatenate(parts)
           if parts else np.array([], dtype=dtype or float))
    return _System(
        matrix=matrix, diag=diag, rhs_fixed=rhs_fixed,
        conv_cell=cat(conv_cell, np.int64),
        conv_ua=cat(conv_ua),
        conv_channel=cat(conv_channel, np.int64),
        conv_station=cat(conv_station, np.int64),
        n_unknowns=n, index=index)


def solve(grid: Grid, coolant: CoolantProps, flow: FlowCondition,
          material: SolidMaterial, tol: float = 1e-8,
          max_iters: int = 20000, fluid_tol: float = 1e-3,
          max_outer: int = 100) -> FvSolution:
    """Solve the coupled solid-conduction / coolant-march problem."""
    n_ch = len(grid.channels)
    if n_ch and flow.inlet_velocity <= 0:
        raise ValueError("inlet velocity must be > 0 with channels present")

    h_by_channel = np.zeros(max(n_ch, 1))
    m_dot_ch = np.zeros(max(n_ch, 1))
    if n_ch:
        h = thermal.heat_transfer_coefficient(coolant, grid.shape,
                                              flow.inlet_velocity)
        for ch in grid.channels:
            h_by_channel[ch.index] = h
            m_dot_ch[ch.index] = (coolant.density * flow.inlet_velocity
                                  * ch.area)

    system = _assemble(grid, material, h_by_channel, flow.inlet_temperature)

    t_fluid = np.full((max(n_ch, 1), grid.nx + 1), flow.inlet_temperature)
    temp = np.full(system.n_unknowns, flow.inlet_temperature)
    precond = diags(1.0 / system.diag)

    residuals: list[float] = []
    outer = 0
    while True:
        outer += 1
        rhs = system.rhs_fixed.copy()
        if system.conv_cell.size:
            np.add.at(rhs, system.conv_cell,
                      system.conv_ua
                      * t_fluid[system.conv_channel, system.conv_station])
        temp, info = cg(system.matrix, rhs, x0=temp, rtol=tol, atol=0.0,
                        M=precond, maxiter=max_iters)
        rnorm = float(np.linalg.norm(system.matrix @ temp - rhs))
        bnorm = float(np.linalg.norm(rhs))
        rel = rnorm / bnorm if bnorm > 0 else 0.0
        residuals.append(rel)
        if info != 0:
            raise ConvergenceError(
                f"linear solve did not reach tol {tol} in {max_iters} "
                f"iterations (residual {rel:.3e})", residuals)

        if not n_ch:
            break
        # wall heat per channel and station, then re-march the coolant
        q = system.conv_ua * (temp[system.conv_cell]
                              - t_fluid[system.conv_channel,
                                        system.conv_station])
        q_station = np.zeros((n_ch, grid.nx))
        np.add.at(q_station, (system.conv_channel, system.conv_station), q)
        t_new = np.empty_like(t_fluid)
        t_new[:, 0] = flow.inlet_temperature
        rise = q_station / (m_dot_ch[:, None] * coolant.specific_heat)
        t_new[:, 1:] = flow.inlet_temperature + np.cumsum(rise, axis=1)
        change = float(np.max(np.abs(t_new - t_fluid)))
        t_fluid = t_new
        if change < fluid_tol:
            break
        if outer >= max_outer:
            raise ConvergenceError(
                f"coolant march did not converge in {max_outer} outer "
                f"iterations (last change {change:.3e} K)", residuals)

    # heat removed through Robin faces (channels and exterior convection)
    q_conv = 0.0
    if system.conv_cell.size:
        q_conv += float(np.sum(
            system.conv_ua * (temp[system.conv_cell]
                              - t_fluid[system.conv_channel,
                                        system.conv_station])))
    if grid.exterior_convection is not None:
        face, h_ext = grid.exterior_convection
        layer = 0 if face == "bottom" else grid.nz - 1
        k = material.thermal_conductivity
        u = 1.0 / (grid.dz / (2.0 * k) + 1.0 / h_ext)
        solid = ~grid.void
        m = solid[:, :, layer]
        cells = system.index[:, :, layer][m]
        q_conv += float(np.sum(u * grid.dx * grid.dy
                               * (temp[cells] - flow.inlet_temperature)))
    imbalance = grid.total_power - q_conv

    # field with coolant temperatures in void cells
    field3d = np.full(grid.void.shape, flow.inlet_temperature)
    field3d[~grid.void] = temp
    if n_ch:
        vx = np.broadcast_to(
            np.arange(grid.nx)[:, None, None], grid.void.shape)[grid.void]
        vid = grid.channel_id[grid.void]
        field3d[grid.void] = t_fluid[vid, vx]

    # surface extrapolation under imposed flux
    k = material.thermal_conductivity
    t_max = float(np.max(temp))
    for layer, flux in ((grid.nz - 1, grid.flux_top), (0, grid.flux_bottom)):
        m = (~grid.void[:, :, layer]) & (flux > 0.0)
        if m.any():
            cells = system.index[:, :, layer][m]
            surf = temp[cells] + flux[m] * grid.dz / (2.0 * k)
            t_max = max(t_max, float(surf.max()))

    return FvSolution(
        temperature=field3d,
        t_max=t_max,
        coolant_profile=t_fluid[:n_ch] if n_ch else np.empty((0, grid.nx + 1)),
        residual=residuals[-1],
        iterations=outer,
        energy_imbalance=imbalance)


# --------------------------------------------------------------------------
# mesh-independence harness

@dataclass(frozen=True)
class MeshStudyRow:
    cells: int
    t_max: float       # deg C
    delta: float | None  # K, |change| vs previous row


@dataclass(frozen=True)
class MeshStudyResult:
    rows: tuple[MeshStudyRow, ...]
    converged: bool  # final successive delta < 0.5 K

    def to_json(self) -> dict:
        return {
            "rows": [{"cells": r.cells, "t_max_C": r.t_max,
                      "delta_K": r.delta} for r in self.rows],
            "converged": self.converged,
        }


MESH_CONVERGENCE_DELTA_K = 0.5


def mesh_study(assembly: Assembly | None, coolant: CoolantProps,
               flow: FlowCondition, resolutions: list[float],
               material: SolidMaterial | None = None, tol: float = 1e-8,
               grid_builder=None) -> MeshStudyResult:
    """Solve at a descending list of cell sizes and tabulate t_max deltas.

    grid_builder(resolution) -> Grid overrides the default assembly
    voxelization (used by the slab verification cases).
    """
    if len(resolutions) < 3:
        raise ValueError("mesh study needs at least 3 resolutions")
    if any(b >= a for a, b in zip(resolutions, resolutions[1:])):
        raise ValueError("resolutions must be strictly descending")
    if grid_builder is None:
        if assembly is None:
            raise ValueError("mesh study needs an assembly or a grid_builder")
        grid_builder = lambda res: build_grid(assembly, res)
    if material is None:
        if assembly is None:
            raise ValueError("mesh study needs a material")
        material = assembly.plate.material

    rows = []
    previous = None
    for res in resolutions:
        grid = grid_builder(res)
        solution = solve(grid, coolant, flow, material, tol=tol)
        delta = None if previous is None else abs(solution.t_max - previous)
        rows.append(MeshStudyRow(cells=grid.cell_count,
                                 t_max=solution.t_max, delta=delta))
        previous = solution.t_max
    converged = rows[-1].delta is not None and rows[-1].delta < MESH_CONVERGENCE_DELTA_K
    return MeshStudyResult(rows=tuple(rows), converged=converged)


# --------------------------------------------------------------------------
# field output

def write_structured_points(solution: FvSolution, grid: Grid, path) -> None:
    """Dump the cell-centered temperature field in legacy structured-points
    text format (one scalar, no timestamps; byte-stable for a given run)."""
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("cold plate temperature field\n")
        fh.write("ASCII\n")
        fh.write("DATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {grid.nx + 1} {grid.ny + 1} {grid.nz + 1}\n")
        fh.write("ORIGIN 0 0 0\n")
        fh.write(f"SPACING {grid.dx!r} {grid.dy!r} {grid.dz!r}\n")
        fh.write(f"CELL_DATA {grid.cell_count}\n")
        fh.write("SCALARS temperature_C double\n")
        fh.write("LOOKUP_TABLE default\n")
        # VTK cell order: x fastest, then y, then z
        values = np.transpose(solution.temperature, (2, 1, 0)).ravel()
        for v in values:
            fh.write(f"{float(v)!r}\n")
