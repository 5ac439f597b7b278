"""Command-line surface: `coldplate <action> --config <file> [--out DIR]`.

Actions: report | sweep | optimize | solve-fv | mesh-study. The config is
a strict JSON document (unknown keys are errors); all lengths carry an
explicit _m / _mm-free SI suffix in key names. Every action writes
result.json and result.csv into the output directory; solve-fv
additionally writes field.txt. Outputs are byte-stable for a given config.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import fv, hydraulics, studies, thermal
from .geometry import (Assembly, PRESETS, assembly_from_json,
                       assembly_to_json)
from .hydraulics import DEFAULT_MINOR_LOSS_K, FlowCondition
from .properties import (CoolantProps, MaterialLibrary, water_at_reference)

ACTIONS = ("report", "sweep", "optimize", "solve-fv", "mesh-study")

_DEFAULTS = {
    "inlet_C": thermal.DEFAULT_INLET_C,
    "minor_loss_K": DEFAULT_MINOR_LOSS_K,
    "tol": 1e-8,
    "max_iters": 20000,
    "resolution_m": 2e-3,
    "v_mps": 1.1,
}

_SCHEMA = {
    "action": None,
    "preset": None,
    "assembly": None,
    "materials_file": None,
    "coolant": {"name", "density", "dynamic_viscosity", "specific_heat",
                "thermal_conductivity", "reference_temperature_C"},
    "flow": {"v_mps", "inlet_C"},
    "stack": {"layers"},
    "solver": {"tol", "max_iters", "resolution_m"},
    "hydraulics": {"minor_loss_K"},
    "sweep": {"axis", "values", "evaluator"},
    "optimize": {"materials", "channel_counts", "cover_thicknesses_m",
                 "v_min", "v_max", "v_step", "t_max_limit_C",
                 "pressure_budget_Pa", "evaluator"},
    "mesh_study": {"resolutions_m"},
}


class ConfigError(ValueError):
    """Invalid configuration; message lists every violation found."""


@dataclass
class RunConfig:
    action: str
    assembly: Assembly
    coolant: CoolantProps
    flow: FlowCondition
    stack: thermal.DieStack | None
    minor_loss_K: float
    tol: float
    max_iters: int
    resolution: float
    sweep: dict | None
    optimize: dict | None
    mesh_resolutions: list[float] | None
    resolved: dict  # fully-resolved document for --echo-config


def _check_keys(doc: dict, errors: list[str]) -> None:
    for key, value in doc.items():
        if key not in _SCHEMA:
            errors.append(f"unknown key {key!r}")
            continue
        allowed = _SCHEMA[key]
        if allowed is not None and isinstance(value, dict):
            for sub in value:
                if sub not in allowed:
                    errors.append(f"unknown key {key!r}.{sub!r}")


def parse_config(text: str, action: str | None = None) -> RunConfig:
    """Parse and validate a JSON config, filling documented defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error: {exc.msg} at line "
                          f"{exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")

    errors: list[str] = []
    _check_keys(doc, errors)

    cfg_action = doc.get("action", action)
    if cfg_action is None:
        errors.append("no action given (config key 'action' or CLI argument)")
    elif cfg_action not in ACTIONS:
        errors.append(f"unknown action {cfg_action!r}; one of {ACTIONS}")
    if action is not None and doc.get("action") not in (None, action):
        errors.append(f"config action {doc['action']!r} conflicts with "
                      f"command-line action {action!r}")

    library = MaterialLibrary()
    if "materials_file" in doc:
        try:
            library.load_overrides(doc["materials_file"])
        except (OSError, ValueError) as exc:
            errors.append(f"materials_file: {exc}")

    assembly = None
    if ("preset" in doc) == ("assembly" in doc):
        errors.append("exactly one of 'preset' or 'assembly' is required")
    elif "preset" in doc:
        if doc["preset"] in PRESETS:
            assembly = PRESETS[doc["preset"]]()
            if "materials_file" in doc:
                assembly = replace(
                    assembly,
                    plate=replace(assembly.plate, material=library.get_material(
                        assembly.plate.material.name)))
        else:
            errors.append(f"unknown preset {doc['preset']!r}; "
                          f"one of {sorted(PRESETS)}")
    else:
        try:
            assembly = assembly_from_json(doc["assembly"],
                                          library.get_material)
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"assembly: {exc}")

    water = water_at_reference()
    cool = doc.get("coolant", {})
    coolant = CoolantProps(
        name=cool.get("name", water.name),
        density=cool.get("density", water.density),
        dynamic_viscosity=cool.get("dynamic_viscosity",
                                   water.dynamic_viscosity),
        specific_heat=cool.get("specific_heat", water.specific_heat),
        thermal_conductivity=cool.get("thermal_conductivity",
                                      water.thermal_conductivity),
        reference_temperature=cool.get("reference_temperature_C",
                                       water.reference_temperature))

    flow_doc = doc.get("flow", {})
    flow = FlowCondition(
        inlet_velocity=float(flow_doc.get("v_mps", _DEFAULTS["v_mps"])),
        inlet_temperature=float(flow_doc.get("inlet_C",
                                             _DEFAULTS["inlet_C"])))

    stack = None
    if "stack" in doc:
        try:
            stack = thermal.DieStack(layers=tuple(
                thermal.StackLayer(
                    name=l["name"], thickness=l["thickness_m"],
                    conductivity=l["conductivity"],
                    area_factor=l.get("area_factor", 1.0))
                for l in doc["stack"]["layers"]))
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"stack: {exc}")

    solver = doc.get("solver", {})
    hydr = doc.get("hydraulics", {})

    sweep = doc.get("sweep")
    if cfg_action == "sweep" and sweep is None:
        errors.append("action 'sweep' needs a 'sweep' section")
    opt = doc.get("optimize")
    if cfg_action == "optimize" and opt is None:
        errors.append("action 'optimize' needs an 'optimize' section")
    mesh = doc.get("mesh_study")
    if cfg_action == "mesh-study":
        if mesh is None or "resolutions_m" not in mesh:
            errors.append("action 'mesh-study' needs "
                          "'mesh_study.resolutions_m'")

    if errors:
        raise ConfigError("invalid config: " + "; ".join(errors))

    resolved = {
        "action": cfg_action,
        "assembly": assembly_to_json(assembly),
        "coolant": {
            "name": coolant.name,
            "density": coolant.density,
            "dynamic_viscosity": coolant.dynamic_viscosity,
            "specific_heat": coolant.specific_heat,
            "thermal_conductivity": coolant.thermal_conductivity,
            "reference_temperature_C": coolant.reference_temperature,
        },
        "flow": {"v_mps": flow.inlet_velocity,
                 "inlet_C": flow.inlet_temperature},
        "solver": {"tol": solver.get("tol", _DEFAULTS["tol"]),
                   "max_iters": solver.get("max_iters",
                                           _DEFAULTS["max_iters"]),
                   "resolution_m": solver.get("resolution_m",
                                              _DEFAULTS["resolution_m"])},
        "hydraulics": {"minor_loss_K": hydr.get("minor_loss_K",
                                                _DEFAULTS["minor_loss_K"])},
    }
    if stack is not None:
        resolved["stack"] = doc["stack"]
    if sweep is not None:
        resolved["sweep"] = sweep
    if opt is not None:
        resolved["optimize"] = opt
    if mesh is not None:
        resolved["mesh_study"] = mesh

    return RunConfig(
        action=cfg_action,
        assembly=assembly,
        coolant=coolant,
        flow=flow,
        stack=stack,
        minor_loss_K=float(resolved["hydraulics"]["minor_loss_K"]),
        tol=float(resolved["solver"]["tol"]),
        max_iters=int(resolved["solver"]["max_iters"]),
        resolution=float(resolved["solver"]["resolution_m"]),
        sweep=sweep,
        optimize=opt,
        mesh_resolutions=(list(map(float, mesh["resolutions_m"]))
                          if mesh else None),
        resolved=resolved)


# --------------------------------------------------------------------------
# actions

def _single_row_csv(fields: dict) -> str:
    header = ",".join(fields)
    values = ",".join(repr(v) if isinstance(v, float) else str(v)
                      for v in fields.values())
    return header + "\n" + values + "\n"


def _run_report(config: RunConfig):
    hyd = hydraulics.report(config.coolant, config.assembly.layout,
                            config.flow.inlet_velocity, config.minor_loss_K)
    th = thermal.solve_network(config.assembly, config.coolant, config.flow,
                               config.stack)
    from .geometry import plate_mass
    mass = plate_mass(config.assembly)
    result = {"hydraulics": hyd.to_json(), "thermal": th.to_json(),
              "mass_kg": mass}
    csv = _single_row_csv({
        "t_max_C": th.t_max, "dp_Pa": hyd.pressure_drop, "mass_kg": mass,
        "reynolds": hyd.reynolds, "regime": hyd.regime,
        "coolant_outlet_C": th.coolant_outlet})
    summary = (f"t_max = {th.t_max:.2f} C | dP = {hyd.pressure_drop:.1f} Pa "
               f"| mass = {mass:.3f} kg | Re = {hyd.reynolds:.0f} "
               f"({hyd.regime})")
    return result, csv, None, summary


def _run_sweep(config: RunConfig):
    spec = studies.SweepSpec(
        base=config.assembly,
        axis=config.sweep["axis"],
        values=tuple(config.sweep["values"]),
        coolant=config.coolant,
        flow=config.flow,
        stack=config.stack,
        evaluator=config.sweep.get("evaluator", "network"),
        minor_loss_K=config.minor_loss_K,
        fv_resolution=config.resolution)
    result = studies.run_sweep(spec)
    summary = (f"sweep over {spec.axis}: {len(result.rows)} points, "
               f"t_max {min(r.t_max_C for r in result.rows):.2f}.."
               f"{max(r.t_max_C for r in result.rows):.2f} C")
    return result.to_json(), result.to_csv(), None, summary


def _run_optimize(config: RunConfig):
    opt = config.optimize
    problem = studies.DesignProblem(
        base=config.assembly,
        materials=tuple(opt.get("materials",
                                ("copper", "aluminum", "stainless-steel"))),
        channel_counts=tuple(opt.get("channel_counts", (3, 6))),
        cover_thicknesses=tuple(opt.get("cover_thicknesses_m",
                                        (1e-3, 0.5e-3))),
        v_min=float(opt.get("v_min", 0.5)),
        v_max=float(opt.get("v_max", 2.9)),
        v_step=float(opt.get("v_step", studies.DEFAULT_V_STEP)),
        t_max_limit=float(opt.get("t_max_limit_C",
                                  studies.DEFAULT_T_MAX_LIMIT_C)),
        pressure_budget=float(opt.get("pressure_budget_Pa",
                                      studies.DEFAULT_PRESSURE_BUDGET_PA)),
        coolant=config.coolant,
        inlet_temperature=config.flow.inlet_temperature,
        stack=config.stack,
        minor_loss_K=config.minor_loss_K,
        fv_resolution=config.resolution)
    result = studies.optimize(problem, opt.get("evaluator", "network"))
    if result.best:
        summary = (f"best: {result.best.descriptor} | mass = "
                   f"{result.best.mass_kg:.3f} kg | t_max = "
                   f"{result.best.t_max_C:.2f} C")
    else:
        summary = "no feasible design"
    return result.to_json(), result.to_csv(), None, summary


def _run_solve_fv(config: RunConfig):
    grid = fv.build_grid(config.assembly, config.resolution)
    solution = fv.solve(grid, config.coolant, config.flow,
                        config.assembly.plate.material, tol=config.tol,
                        max_iters=config.max_iters)
    result = solution.to_json()
    csv = _single_row_csv({
        "t_max_C": solution.t_max, "residual": solution.residual,
        "iterations": solution.iterations,
        "energy_imbalance_W": solution.energy_imbalance,
        "cells": grid.cell_count})
    summary = (f"FV t_max = {solution.t_max:.2f} C on {grid.cell_count} "
               f"cells | energy imbalance = "
               f"{solution.energy_imbalance:.3e} W")
    return result, csv, (solution, grid), summary


def _run_mesh_study(config: RunConfig):
    result = fv.mesh_study(config.assembly, config.coolant, config.flow,
                           config.mesh_resolutions, tol=config.tol)
    lines = ["cells,t_max_C,delta_K"]
    for row in result.rows:
        delta = "" if row.delta is None else repr(row.delta)
        lines.append(f"{row.cells},{row.t_max!r},{delta}")
    csv = "\n".join(lines) + "\n"
    summary = (f"mesh study: {len(result.rows)} levels, converged = "
               f"{result.converged}")
    return result.to_json(), csv, None, summary


_RUNNERS = {
    "report": _run_report,
    "sweep": _run_sweep,
    "optimize": _run_optimize,
    "solve-fv": _run_solve_fv,
    "mesh-study": _run_mesh_study,
}


def run(config: RunConfig, out_dir: Path, echo_config: bool = False) -> int:
    """Execute the configured action and write result artifacts."""
    if echo_config:
        print(json.dumps(config.resolved, indent=2, sort_keys=True))
    result, csv, field_data, summary = _RUNNERS[config.action](config)

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "result.json").write_text(
        json.dumps(result, indent=2, sort_keys=True) + "\n")
    (out_dir / "result.csv").write_text(csv)
    if field_data is not None:
        solution, grid = field_data
        fv.write_structured_points(solution, grid, out_dir / "field.txt")
    print(summary)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="coldplate",
        description="Cold-plate design and analysis toolkit")
    parser.add_argument("action", choices=ACTIONS)
    parser.add_argument("--config", required=True,
                        help="JSON configuration file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--echo-config", action="store_true",
                        help="print the fully resolved configuration")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text, action=args.action)
        return run(config, Path(args.out), echo_config=args.echo_config)
    except (ConfigError, ValueError, fv.ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
