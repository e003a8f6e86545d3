"""Experiment orchestration: kernel -> atlas -> measures -> lambda sweep.

Writes profiles.csv, convergence.csv, and report.txt into the output
directory.  CSV numbers use 17 significant digits so repeated runs are
byte-identical; the report echoes every resolved default.
"""

from __future__ import annotations

import os

import numpy as np

from . import atlas as atlas_mod
from . import measures as measures_mod
from .config import ConfigError, resolve_a
from .discount import SolverError, calibrated_orbit, lambda_sweep, DiscountProblem
from .grid import ConfigurationError, HamiltonianSpec, PeriodicGrid, build_action_kernel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONDITION_A = 3
EXIT_NO_CONVERGENCE = 4


def _fmt(v):
    return format(float(v) + 0.0, ".17g")


def _write_csv(path, header, columns):
    rows = len(columns[0])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def _build_model(cfg):
    grid = PeriodicGrid(n=cfg.get_int("grid.n"),
                        circumference=cfg.get_float("grid.circumference"))
    kind = cfg["preset"]
    v_max = None if cfg.is_auto("hamiltonian.v_max") else cfg.get_float("hamiltonian.v_max")
    p_max = None if cfg.is_auto("hamiltonian.p_max") else cfg.get_float("hamiltonian.p_max")
    if kind == "custom":
        samples = np.loadtxt(cfg["potential.file"], dtype=float).reshape(-1)
        if samples.shape[0] != grid.n:
            raise ConfigError(
                f"potential file has {samples.shape[0]} entries, grid has {grid.n}"
            )
        # custom runs model the separable form L = v^2/4 + U from samples
        spec = HamiltonianSpec(kind="example2", grid=grid, potential=samples,
                               v_max=v_max, p_max=p_max)
    else:
        spec = HamiltonianSpec(kind=kind, grid=grid, v_max=v_max, p_max=p_max)
    dt = grid.dx if cfg.is_auto("grid.dt") else cfg.get_float("grid.dt")
    return grid, spec, dt


def _resolve_tolerances(cfg, grid, dt):
    base = atlas_mod.Tolerances.for_grid(grid, dt)
    return atlas_mod.Tolerances(
        aubry=cfg.get_float_or_auto("tolerances.tol_aubry", base.aubry),
        cls=cfg.get_float_or_auto("tolerances.tol_class", base.cls),
        fixed=cfg.get_float_or_auto("tolerances.tol_fixed", base.fixed),
    )


def run_experiment(cfg, out_dir=None):
    """Run the full pipeline; returns a process exit code.

    0 on success, 2 for configuration problems, 3 when the sign condition on
    a fails (the report names the offending nodes), 4 when the discounted
    solver does not converge.
    """
    out = out_dir if out_dir is not None else cfg["output.dir"]
    os.makedirs(out, exist_ok=True)
    lines = []

    def emit(text=""):
        lines.append(text)

    def flush_report():
        with open(os.path.join(out, "report.txt"), "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    try:
        grid, spec, dt = _build_model(cfg)
        tol = _resolve_tolerances(cfg, grid, dt)
    except (ConfigError, ConfigurationError) as exc:
        emit("weakkam experiment report")
        emit("status = CONFIG ERROR")
        emit(f"error = {exc}")
        flush_report()
        print(f"configuration error: {exc}")
        return EXIT_CONFIG

    emit("weakkam experiment report")
    emit("")
    emit("[resolved configuration]")
    emit(f"preset = {cfg['preset']}")
    emit(f"seed = {cfg.get_int('seed')}")
    emit(f"grid.n = {grid.n}")
    emit(f"grid.circumference = {_fmt(grid.circumference)}")
    emit(f"grid.dt = {_fmt(dt)}")
    emit(f"hamiltonian.v_max = {_fmt(spec.v_max)}")
    emit(f"hamiltonian.p_max = {_fmt(spec.p_max)}")
    emit(f"tolerances.tol_aubry = {_fmt(tol.aubry)}")
    emit(f"tolerances.tol_class = {_fmt(tol.cls)}")
    emit(f"tolerances.tol_fixed = {_fmt(tol.fixed)}")
    emit(f"discount.a = {cfg['discount.a']}")
    emit(f"discount.class_index = {cfg.get_int('discount.class_index')}")
    emit(f"discount.lambda_schedule = {cfg['discount.lambda_schedule']}")
    emit(f"discount.tol_fix = {_fmt(cfg.get_float('discount.tol_fix'))}")
    emit(f"discount.max_iters = {cfg.get_int('discount.max_iters')}")
    emit(f"output.dir = {out}")

    try:
        kernel = build_action_kernel(grid, spec, dt)
        atlas = atlas_mod.build_atlas(grid, spec, dt=dt, tol=tol, kernel=kernel)
    except (ConfigurationError, atlas_mod.AtlasError) as exc:
        emit("")
        emit(f"status = CONFIG ERROR: {exc}")
        flush_report()
        print(f"configuration error: {exc}")
        return EXIT_CONFIG

    emit("")
    emit("[structure]")
    emit(f"c0 = {_fmt(atlas.c0)}")
    emit(f"aubry node count = {len(atlas.aubry)}")
    emit(f"static class count = {len(atlas.classes)}")
    for i, (cl, bp) in enumerate(zip(atlas.classes, atlas.basepoints)):
        emit(f"class {i}: basepoint node {bp} (x = {_fmt(grid.position(bp))}), "
             f"size {len(cl)}")
    emit(f"barrier lipschitz kappa = {_fmt(atlas.lipschitz_kappa)}")

    i0 = cfg.get_int("discount.class_index")
    if i0 >= len(atlas.classes):
        emit("")
        emit(f"status = CONFIG ERROR: class_index {i0} out of range "
             f"(found {len(atlas.classes)} classes)")
        flush_report()
        print(f"configuration error: class_index {i0} out of range")
        return EXIT_CONFIG

    a = resolve_a(cfg, grid)
    report = measures_mod.verify_condition_a(a, atlas.classes, i0)
    emit("")
    emit("[sign condition on a]")
    emit(f"epsilon = {_fmt(report.epsilon)}")
    if not report.passed:
        if len(atlas.classes) < 2:
            emit("status = CONDITION (a) FAILED: fewer than two static classes")
        else:
            emit("status = CONDITION (a) FAILED")
        for node, val in report.offending:
            emit(f"offending node {node} (x = {_fmt(grid.position(node))}): "
                 f"a = {_fmt(val)}")
        flush_report()
        print("sign condition on a failed; see report.txt")
        return EXIT_CONDITION_A
    emit("status = PASS")

    x0 = atlas.basepoints[i0]
    v0_raw = atlas.elementary_solution(i0)
    # centering halves the sup norm, loosening the required margin on A
    v0 = v0_raw - 0.5 * (v0_raw.max() + v0_raw.min())
    A = cfg.get_float_or_auto(
        "discount.A", measures_mod.default_margin_constant(a, v0))

    try:
        tight = measures_mod.tight_subgraph(atlas)
        cyc_measures = measures_mod.enumerate_cycle_measures(atlas, tight, i0)
        C = measures_mod.selection_constant(cyc_measures, a, A, atlas.barrier, x0)
    except measures_mod.MeasureError as exc:
        emit("")
        emit(f"status = CONDITION (a) FAILED ON SUPPORT: {exc}")
        flush_report()
        print(f"measure error: {exc}")
        return EXIT_CONDITION_A

    target = atlas.barrier[x0] + C
    emit("")
    emit("[selection]")
    emit(f"discount.A = {_fmt(A)}")
    emit(f"selected class i0 = {i0} (basepoint node {x0})")
    emit(f"enumerated cycle measures in class = {len(cyc_measures)}")
    emit(f"selection constant C = {_fmt(C)}")

    schedule = cfg.lambda_schedule
    workers = max(1, int(os.environ.get("WEAKKAM_THREADS", "1")))
    try:
        rows = lambda_sweep(atlas.reduced, dt, grid, a, A, schedule, v0, target,
                            tol_fix=cfg.get_float("discount.tol_fix"),
                            max_iters=cfg.get_int("discount.max_iters"),
                            workers=workers)
    except SolverError as exc:
        emit("")
        emit(f"status = SOLVER NON-CONVERGENCE: {exc}")
        flush_report()
        print(f"solver error: {exc}")
        return EXIT_NO_CONVERGENCE

    emit("")
    emit("[lambda sweep]")
    for row in rows:
        emit(f"lambda = {_fmt(row['lambda'])}: sup_error = {_fmt(row['sup_error'])}, "
             f"residual = {_fmt(row['residual'])}, iterations = {row['iterations']}")

    final = rows[-1]
    sol = final["solution"]

    # orbit diagnostics at the smallest lambda, launched from the node
    # farthest from the selected basepoint
    steps = grid.n * 4 if cfg.is_auto("orbit.steps") else int(cfg.get_float("orbit.steps"))
    z = (x0 + grid.n // 2) % grid.n
    P_last = DiscountProblem(lam=final["lambda"], a=a, A=A,
                             reduced=atlas.reduced, dt=dt, grid=grid)
    occ = calibrated_orbit(sol, P_last, z, steps)
    window_a = float(occ.window_measure @ a)
    all_measures = []
    for cl_id in range(len(atlas.classes)):
        all_measures.extend(measures_mod.enumerate_cycle_measures(atlas, tight, cl_id))
    leqa_vals = [float(m.weights @ (a * sol.u)) for m in all_measures]
    leqa_max = max(leqa_vals) if leqa_vals else float("-inf")

    emit("")
    emit("[diagnostics]")
    emit(f"orbit start node = {z}, steps = {steps}")
    emit(f"window measure a-mass = {_fmt(window_a)} "
         f"({'PASS' if window_a >= -0.05 else 'FAIL'}: expected >= -0.05)")
    emit(f"max over measures of sum mu*a*u = {_fmt(leqa_max)} "
         f"({'PASS' if leqa_max <= A + 0.05 else 'FAIL'}: expected <= A + 0.05)")
    emit(f"final sup_error = {_fmt(final['sup_error'])} "
         f"({'PASS' if final['sup_error'] <= 0.1 else 'FAIL'}: expected <= 0.1 on presets)")
    flush_report()

    xs = grid.positions
    _write_csv(os.path.join(out, "profiles.csv"),
               ["x", "U", "a", "v0", "h_inf_target", "u_lambda_min_lambda"],
               [xs, spec.potential, a, v0, target, sol.u])
    _write_csv(os.path.join(out, "convergence.csv"),
               ["lambda", "sup_error", "residual", "iterations"],
               [[r["lambda"] for r in rows],
                [r["sup_error"] for r in rows],
                [r["residual"] for r in rows],
                [r["iterations"] for r in rows]])
    return EXIT_OK
