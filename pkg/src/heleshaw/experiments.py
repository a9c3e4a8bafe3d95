"""Scenario runners, configuration files and result artifacts.

Configs are flat key-value text with dotted sections; CLI --set
overrides file keys. Every run writes a CSV with the fixed schema below
plus a JSON sidecar with the fully resolved configuration; outputs are
byte-identical for identical configs except for the wall-time column.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, analytic, evolution, freeboundary, obstacle
from ._kernels import backend_name
from ._pool import pool_map, thread_count
from .errors import ConfigError, InvariantViolation
from .grid import Grid, build_grid, ball_mask
from .media import (
    MediaSpec,
    exact_mean_reciprocal,
    homogenized_constant,
    sample_media,
    sample_media_scaled,
)

logger = logging.getLogger(__name__)

SCENARIOS = ("radial-validate", "limit-problem", "near-field", "growth-exponent", "homogenize")

CSV_HEADER = "scenario,t,lambda,r_min,r_max,defect,hausdorff,rho_target,alpha_fit,pde_res,comp_res,iters,wall_ms"

_DEFAULTS = {
    "scenario": "radial-validate",
    "dimension": "3",
    "seed": "0",
    "grid.extent": "9.0",
    "grid.nodes": "65",
    "core.radius": "1.0",
    "init.radius": "1.5",
    "media.kind": "constant",
    "media.m": "1.0",
    "media.M": "1.0",
    "media.cell": "1.0",
    "media.seed": "",
    "profile.A": "",
    "profile.L": "",
    "time.ladder": "1, 2, 5",
    "lambda.ladder": "",
    "lambda.t": "1.0",
    "solver.omega": "1.8",
    "solver.tol": "",
    "solver.max_iter": "100000",
    "solver.warm_start": "true",
    "output.dir": "",
}


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    dimension: int
    seed: int
    extent: float
    nodes: int
    core_radius: float
    init_radius: float
    media: MediaSpec
    profile_A: float | None
    profile_L: float | None
    t_ladder: tuple[float, ...]
    lambda_ladder: tuple[float, ...]
    lambda_t: float
    omega: float
    tol: float | None
    max_iter: int
    warm_start: bool
    output_dir: str | None

    def solver_params(self) -> evolution.SolverParams:
        return evolution.SolverParams(
            omega=self.omega, tol=self.tol, max_iter=self.max_iter, warm_start=self.warm_start
        )


@dataclass
class ResultRow:
    scenario: str
    t: float
    lam: float
    r_min: float
    r_max: float
    defect: float
    hausdorff: float
    rho_target: float
    alpha_fit: float
    pde_res: float
    comp_res: float
    iters: int
    wall_ms: float

    def format(self) -> str:
        cols = [self.scenario]
        for v in (self.t, self.lam, self.r_min, self.r_max, self.defect,
                  self.hausdorff, self.rho_target, self.alpha_fit,
                  self.pde_res, self.comp_res):
            cols.append("%.9g" % v)
        cols.append(str(self.iters))
        cols.append("%.3f" % self.wall_ms)
        return ",".join(cols)


@dataclass
class ScenarioResult:
    config: ExperimentConfig
    rows: list[ResultRow]
    extras: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)

    def to_csv(self, include_wall: bool = True) -> str:
        lines = [CSV_HEADER]
        lines += [r.format() for r in self.rows]
        return "\n".join(lines) + "\n"


def parse_config_text(text: str, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Parse the flat dotted-key format; unknown keys are rejected."""
    values = dict(_DEFAULTS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = val
    for key, val in (overrides or {}).items():
        if key not in _DEFAULTS:
            raise ConfigError(f"override: unknown key {key!r}")
        values[key] = val
    return _build_config(values)


def load_config(path: str, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, overrides)


def _parse_ladder(s: str) -> tuple[float, ...]:
    items = [p.strip() for p in s.replace(";", ",").split(",") if p.strip()]
    return tuple(float(p) for p in items)


def _build_config(v: dict[str, str]) -> ExperimentConfig:
    try:
        scenario = v["scenario"]
        if scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
        dimension = int(v["dimension"])
        seed = int(v["seed"])
        extent = float(v["grid.extent"])
        nodes = int(v["grid.nodes"])
        a = float(v["core.radius"])
        b = float(v["init.radius"])
        media_seed = int(v["media.seed"]) if v["media.seed"] else seed
        media = MediaSpec(
            kind=v["media.kind"], m=float(v["media.m"]), M=float(v["media.M"]),
            cell=float(v["media.cell"]), seed=media_seed,
        )
        profile_A = float(v["profile.A"]) if v["profile.A"] else None
        profile_L = float(v["profile.L"]) if v["profile.L"] else None
        t_ladder = _parse_ladder(v["time.ladder"])
        lambda_ladder = _parse_ladder(v["lambda.ladder"])
        lambda_t = float(v["lambda.t"])
        omega = float(v["solver.omega"])
        tol = float(v["solver.tol"]) if v["solver.tol"] else None
        max_iter = int(v["solver.max_iter"])
        warm = v["solver.warm_start"].lower() in ("1", "true", "yes")
        outdir = v["output.dir"] or None
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc

    if not (0 < a < b < extent):
        raise ConfigError(f"need 0 < core.radius < init.radius < grid.extent, got {a}, {b}, {extent}")
    if not t_ladder:
        raise ConfigError("time.ladder must be nonempty")
    if any(x2 <= x1 for x1, x2 in zip(t_ladder, t_ladder[1:])):
        raise ConfigError("time.ladder must be strictly increasing")
    if any(x2 <= x1 for x1, x2 in zip(lambda_ladder, lambda_ladder[1:])):
        raise ConfigError("lambda.ladder must be strictly increasing")
    if scenario in ("radial-validate", "near-field") and media.kind != "constant":
        raise ConfigError(f"{scenario} requires constant media")
    return ExperimentConfig(
        scenario=scenario, dimension=dimension, seed=seed, extent=extent, nodes=nodes,
        core_radius=a, init_radius=b, media=media, profile_A=profile_A,
        profile_L=profile_L, t_ladder=t_ladder, lambda_ladder=lambda_ladder,
        lambda_t=lambda_t, omega=omega, tol=tol, max_iter=max_iter,
        warm_start=warm, output_dir=outdir,
    )


def _effective_A(cfg: ExperimentConfig) -> float:
    """Singularity strength: the capacity coefficient of the ball core
    (datum 1), unless overridden by profile.A."""
    if cfg.profile_A is not None:
        return cfg.profile_A
    return analytic.capacity_constant_ball(cfg.core_radius, cfg.dimension)


def _effective_L(cfg: ExperimentConfig, grid: Grid, med) -> float:
    """Homogenized latent heat: exact expectation when the generator has
    one, else the spatial mean over the box."""
    if cfg.profile_L is not None:
        return cfg.profile_L
    exact = exact_mean_reciprocal(cfg.media)
    if exact is not None:
        return exact
    return homogenized_constant(med, np.ones(grid.shape, dtype=bool))


def suggested_extent(cfg: ExperimentConfig) -> float:
    """Box half-width guideline: 1.5x the supersolution front radius at
    the final ladder time (latent heat 1/M, the fastest admissible
    front). Runs with smaller boxes are legal; the support guard rejects
    them only if the front actually reaches the collar."""
    A = _effective_A(cfg)
    params = analytic.RadialParams(
        A=A, a=cfg.core_radius, b=cfg.init_radius, L=1.0 / cfg.media.M, n=cfg.dimension
    )
    (r_sup,) = analytic.radius_evolution(params, [max(cfg.t_ladder)])
    return 1.5 * float(r_sup)


def _trajectory(cfg: ExperimentConfig):
    grid = build_grid(cfg.dimension, cfg.extent, cfg.nodes)
    rec = suggested_extent(cfg)
    if cfg.extent < rec:
        logger.warning(
            "grid.extent=%.3g is below the guideline %.3g (1.5x supersolution "
            "front at t=%g); the run aborts if the support reaches the box",
            cfg.extent, rec, max(cfg.t_ladder),
        )
    core = ball_mask(grid, np.zeros(cfg.dimension), cfg.core_radius)
    init = ball_mask(grid, np.zeros(cfg.dimension), cfg.init_radius)
    med = sample_media(cfg.media, grid)
    traj = evolution.run_trajectory(grid, core, init, med, cfg.t_ladder, cfg.solver_params())
    return grid, core, med, traj


def _boundary_rows(cfg, grid, traj, rho_of_t, alpha_from_fit=True) -> tuple[list[ResultRow], list[float]]:
    rows, rmeans = [], []
    for snap in traj.snapshots:
        t0 = time.perf_counter()
        sample = freeboundary.extract_boundary(snap, grid)
        rho_t = rho_of_t(snap.t)
        rep = freeboundary.sphericity(sample, rho_t)
        rmeans.append(rep.r_mean)
        rows.append(ResultRow(
            scenario=cfg.scenario, t=snap.t, lam=float("nan"),
            r_min=rep.r_min, r_max=rep.r_max, defect=rep.defect,
            hausdorff=rep.hausdorff, rho_target=rho_t, alpha_fit=float("nan"),
            pde_res=snap.diagnostics["pde_residual"],
            comp_res=snap.diagnostics["complementarity_residual"],
            iters=snap.diagnostics["iterations"],
            wall_ms=(time.perf_counter() - t0) * 1e3 + snap.diagnostics.get("wall_ms", 0.0),
        ))
    alpha = float("nan")
    if alpha_from_fit and len(traj.snapshots) >= 4:
        alpha, _ = freeboundary.fit_growth_exponent(traj.times, rmeans)
        rows[-1].alpha_fit = alpha
    return rows, rmeans


def run_scenario(cfg: ExperimentConfig) -> ScenarioResult:
    logger.info("scenario %s (n=%d, N=%d, backend=%s)", cfg.scenario, cfg.dimension, cfg.nodes, backend_name())
    runner = {
        "radial-validate": _run_radial_validate,
        "limit-problem": _run_limit_problem,
        "near-field": _run_near_field,
        "growth-exponent": _run_growth_exponent,
        "homogenize": _run_homogenize,
    }[cfg.scenario]
    result = runner(cfg)
    if cfg.output_dir:
        _write_artifacts(result)
    return result


def _run_radial_validate(cfg: ExperimentConfig) -> ScenarioResult:
    grid, core, med, traj = _trajectory(cfg)
    L = 1.0 / cfg.media.m
    A = _effective_A(cfg)
    params = analytic.RadialParams(A=A, a=cfg.core_radius, b=cfg.init_radius, L=L, n=cfg.dimension)
    R_ref = analytic.radius_evolution(params, np.asarray(cfg.t_ladder))
    ref = dict(zip(cfg.t_ladder, R_ref))
    rows, rmeans = _boundary_rows(cfg, grid, traj, lambda t: ref[t])
    gaps = [abs(rm - ref[t]) for rm, t in zip(rmeans, cfg.t_ladder)]
    return ScenarioResult(cfg, rows, extras={
        "radius_gaps": gaps, "max_radius_gap": max(gaps), "h": grid.h, "R_ref": list(R_ref),
    })


def _run_limit_problem(cfg: ExperimentConfig) -> ScenarioResult:
    grid = build_grid(cfg.dimension, cfg.extent, cfg.nodes)
    A = cfg.profile_A if cfg.profile_A is not None else 1.0
    L = cfg.profile_L if cfg.profile_L is not None else 1.0
    params = analytic.PointSourceParams(A=A, L=L, n=cfg.dimension)
    a = cfg.core_radius
    r = grid.radii()

    def solve_one(t: float):
        t0 = time.perf_counter()
        sol = obstacle.solve_point_source_problem(
            params, t, a, grid, omega=cfg.omega, tol=cfg.tol, max_iter=cfg.max_iter
        )
        wall = (time.perf_counter() - t0) * 1e3
        snap = evolution.snapshot_from_solution(grid, t, sol, params.L)
        sample = freeboundary.extract_boundary(snap, grid)
        rho_t = analytic.front_radius(params, t)
        rep = freeboundary.sphericity(sample, rho_t)
        exact = np.zeros(grid.shape)
        mask = r > 0
        exact[mask] = analytic.point_source_baiocchi(params, t, r[mask])
        sel = (r >= a + 2 * grid.h) & (np.abs(r - rho_t) > 2 * grid.h)
        sup_err = float(np.abs(sol.w - exact)[sel].max())
        u_max = float(exact[r >= a].max())
        row = ResultRow(
            scenario=cfg.scenario, t=t, lam=float("nan"), r_min=rep.r_min,
            r_max=rep.r_max, defect=rep.defect, hausdorff=rep.hausdorff,
            rho_target=rho_t, alpha_fit=float("nan"), pde_res=sol.pde_residual,
            comp_res=sol.complementarity_residual, iters=sol.iterations, wall_ms=wall,
        )
        return row, {"t": t, "sup_err": sup_err, "rel_err": sup_err / u_max,
                     "front_gap": abs(rep.r_max - rho_t)}
    results = pool_map(solve_one, list(cfg.t_ladder))
    rows = [r for r, _ in results]
    return ScenarioResult(cfg, rows, extras={"errors": [e for _, e in results], "h": grid.h})


def near_field_check(grid: Grid, core, traj: evolution.Trajectory, a: float, omega: float) -> list[dict]:
    """Sup over the annulus {a <= |x| <= 2a} of |v - P| per ladder time,
    v recovered as the harmonic pressure. The sequence must not increase
    over the trailing half of the ladder (10% slack)."""
    r = grid.radii()
    ann = (r >= a) & (r <= 2 * a)
    if not ann.any():
        raise ConfigError("annulus contains no grid nodes")
    P = np.zeros(grid.shape)
    P[r >= a] = analytic.near_field_profile_ball(a, grid.n, r[r >= a])
    table = []
    for snap in traj.snapshots:
        v = evolution.harmonic_pressure(snap, grid, core, omega=omega)
        table.append({"t": snap.t, "sup_err": float(np.abs(v - P)[ann].max())})
    tail = table[len(table) // 2:]
    for e1, e2 in zip(tail, tail[1:]):
        if e2["sup_err"] > 1.1 * e1["sup_err"]:
            raise InvariantViolation(
                f"near-field error increased from {e1['sup_err']:.4g} (t={e1['t']}) "
                f"to {e2['sup_err']:.4g} (t={e2['t']})"
            )
    return table


def _run_near_field(cfg: ExperimentConfig) -> ScenarioResult:
    grid, core, med, traj = _trajectory(cfg)
    L = 1.0 / cfg.media.m
    A = _effective_A(cfg)
    params = analytic.RadialParams(A=A, a=cfg.core_radius, b=cfg.init_radius, L=L, n=cfg.dimension)
    R_ref = analytic.radius_evolution(params, np.asarray(cfg.t_ladder))
    ref = dict(zip(cfg.t_ladder, R_ref))
    rows, _ = _boundary_rows(cfg, grid, traj, lambda t: ref[t])
    table = near_field_check(grid, core, traj, cfg.core_radius, cfg.omega)
    return ScenarioResult(cfg, rows, extras={"nearfield": table, "h": grid.h})


def _run_growth_exponent(cfg: ExperimentConfig) -> ScenarioResult:
    grid, core, med, traj = _trajectory(cfg)
    A = _effective_A(cfg)
    L = _effective_L(cfg, grid, med)
    params = analytic.PointSourceParams(A=A, L=L, n=cfg.dimension)
    rows, rmeans = _boundary_rows(cfg, grid, traj, lambda t: analytic.asymptotic_front_radius(params, t))
    alpha, c = freeboundary.fit_growth_exponent(traj.times, rmeans)
    return ScenarioResult(cfg, rows, extras={"alpha": alpha, "c": c, "h": grid.h, "L": L})


def _run_homogenize(cfg: ExperimentConfig) -> ScenarioResult:
    grid, core, med, traj = _trajectory(cfg)
    A = _effective_A(cfg)
    L = _effective_L(cfg, grid, med)
    params = analytic.PointSourceParams(A=A, L=L, n=cfg.dimension)
    rows, rmeans = _boundary_rows(cfg, grid, traj, lambda t: analytic.asymptotic_front_radius(params, t))
    defects = [row.defect for row in rows]
    ratios = [rm / row.rho_target for rm, row in zip(rmeans, rows)]
    extras = {"defects": defects, "ratios": ratios, "L": L, "A": A, "h": grid.h,
              "hausdorff_rel": [row.hausdorff / row.rho_target for row in rows]}
    rows += _rescaled_rows(cfg, grid, params)
    return ScenarioResult(cfg, rows, extras=extras)


def _rescaled_rows(cfg: ExperimentConfig, grid: Grid, params) -> list[ResultRow]:
    """Direct rescaled solves for moderate lambda: shrunken core, scaled
    Dirichlet datum, dilated media; front compared to front_radius(t)."""
    rows = []
    t = cfg.lambda_t
    for lam in cfg.lambda_ladder:
        if cfg.dimension == 2:
            space = analytic.rescale_radius_2d(lam) if lam > 1 else 1.0
            datum = float(np.log(space)) * t if lam > 1 else t
        else:
            space = lam ** (1.0 / cfg.dimension)
            datum = lam ** ((cfg.dimension - 2.0) / cfg.dimension) * t
        a_l = cfg.core_radius / space
        b_l = cfg.init_radius / space
        if a_l < 3 * grid.h:
            raise ConfigError(
                f"lambda={lam}: rescaled core radius {a_l:.4g} below 3h; "
                f"use the fixed-grid long-time mode instead"
            )
        t0 = time.perf_counter()
        core = ball_mask(grid, np.zeros(cfg.dimension), a_l)
        init = ball_mask(grid, np.zeros(cfg.dimension), b_l)
        med_l = sample_media_scaled(cfg.media, grid, space)
        prob = obstacle.assemble(grid, core, init, med_l, t, dirichlet_value=datum)
        sol = obstacle.psor_solve(prob, omega=cfg.omega, tol=cfg.tol,
                                  max_iter=cfg.max_iter, ell_max=med_l.ell_max)
        wall = (time.perf_counter() - t0) * 1e3
        snap = evolution.snapshot_from_solution(grid, t, sol, med_l.ell_max)
        sample = freeboundary.extract_boundary(snap, grid)
        rho_t = analytic.front_radius(params, t)
        rep = freeboundary.sphericity(sample, rho_t)
        rows.append(ResultRow(
            scenario=cfg.scenario, t=t, lam=lam, r_min=rep.r_min, r_max=rep.r_max,
            defect=rep.defect, hausdorff=rep.hausdorff, rho_target=rho_t,
            alpha_fit=float("nan"), pde_res=sol.pde_residual,
            comp_res=sol.complementarity_residual, iters=sol.iterations, wall_ms=wall,
        ))
    return rows


def _write_artifacts(result: ScenarioResult) -> None:
    cfg = result.config
    os.makedirs(cfg.output_dir, exist_ok=True)
    csv_path = os.path.join(cfg.output_dir, "results.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(result.to_csv())
    meta = {
        "config": _config_dict(cfg),
        "version": f"heleshaw-{__version__}",
        "backend": backend_name(),
        "seed": cfg.seed,
    }
    json_path = os.path.join(cfg.output_dir, "run.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    result.paths = {"csv": csv_path, "json": json_path}
    if "nearfield" in result.extras:
        nf_path = os.path.join(cfg.output_dir, "nearfield.csv")
        with open(nf_path, "w", encoding="utf-8") as fh:
            fh.write("t,sup_error\n")
            for row in result.extras["nearfield"]:
                fh.write("%.9g,%.9g\n" % (row["t"], row["sup_err"]))
        result.paths["nearfield"] = nf_path


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["media"] = asdict(cfg.media)
    return d
