"""Command-line entry point: one task per invocation, files as the interface.

``mfelens <task> --config <path> --out <dir> [--threads N]``.  Heavy imports
happen after --threads pins the BLAS pool size, which only works because the
package __init__ is lazy.  All floats in CSV output carry 17 significant
digits so reruns diff byte for byte; the summary JSON isolates timing in the
single key ``wall_time_s``.
"""

import argparse
import json
import math
import os
import sys
import time

from .config import TASKS, load_config
from .errors import ConfigError, SimulationError

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def _fmt(x) -> str:
    return "%.17g" % x


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _time_grid(t_max, sample_every):
    import numpy as np

    n = int(math.floor(t_max / sample_every + 1e-9)) + 1
    return np.arange(n) * sample_every


def _build_system(config):
    """Geometry, cutoff and mode basis shared by most tasks."""
    from .coupling import CutoffSpec, basis_for
    from .geometry import LensGeometry
    from .units import LAMBDA_A

    geom = LensGeometry(radius=config.lens.r_over_lambda_a * LAMBDA_A, n0=config.lens.n0)
    cutoff = CutoffSpec(
        config.coupling.omega_c,
        config.coupling.drop_sqrt_omega,
        config.coupling.truncation_sigmas,
    )
    return geom, cutoff, basis_for(geom, cutoff)


def _basis_counts(basis):
    import numpy as np

    return len(basis), int(np.unique(basis.l).size)


def _write_frames(result, basis, frames_cfg, out_dir):
    from .render import render_frame, write_frame

    written = []
    for i, psi in enumerate(result.snapshots):
        frame = render_frame(psi, basis, frames_cfg.grid_n, frames_cfg.clip)
        name = f"frame_{i:03d}.mfef"
        write_frame(frame, os.path.join(out_dir, name))
        written.append({"time": psi.time, "file": name})
    return written


def _task_simulate(config, out_dir):
    import numpy as np

    from .coupling import EmitterSet, build_coupling_matrix
    from .dynamics import WaveFunction, assemble_hamiltonian, propagate, transfer_record
    from .ensemble import (
        EnsembleSpec,
        collective_populations,
        dicke_initial_state,
        sample_ensembles,
    )
    from .geometry import arrival_time

    geom, cutoff, basis = _build_system(config)
    em = config.emitters
    r_a = em.r_a_over_r * geom.radius

    collective = None
    if em.mode == "two_atoms":
        emitters = EmitterSet(
            r=np.full(2, r_a), phi=np.asarray(em.phi), g=config.coupling.g
        )
        psi0 = WaveFunction.single_excitation(2, len(basis))
    else:
        spec = EnsembleSpec(
            n_per_ensemble=em.ensemble.n,
            centers=((r_a, em.phi[0]), (r_a, em.phi[1])),
            sigma=em.ensemble.sigma_over_r,
            seed=em.ensemble.seed,
            g_individual=em.ensemble.g_individual,
        )
        emitters = sample_ensembles(spec, geom)
        psi0 = dicke_initial_state(2 * em.ensemble.n, range(em.ensemble.n), len(basis))
        rows = (
            [_fmt(i), "left", _fmt(emitters.r[i]), _fmt(emitters.phi[i])]
            for i in range(em.ensemble.n)
        )
        rows = list(rows) + [
            [_fmt(i), "right", _fmt(emitters.r[i]), _fmt(emitters.phi[i])]
            for i in range(em.ensemble.n, 2 * em.ensemble.n)
        ]
        _write_csv(
            os.path.join(out_dir, "positions.csv"), ("index", "ensemble", "r", "phi"), rows
        )

    ham = assemble_hamiltonian(emitters, build_coupling_matrix(emitters, cutoff, basis))
    t_grid = _time_grid(config.integration.t_max, config.integration.sample_every)
    result = propagate(
        ham,
        psi0,
        t_grid,
        method=config.integration.propagator,
        dt=config.integration.dt,
        snapshot_times=config.outputs.frames.times,
    )

    n_atoms = len(emitters)
    header = ["t"] + [f"pop_atom_{k}" for k in range(n_atoms)] + ["photon_norm"]
    columns = [result.times] + list(result.atom_populations) + [result.photon_norm]
    if em.mode == "ensembles":
        n = em.ensemble.n
        collective = collective_populations(result, range(n), range(n, 2 * n))
        header += ["c_left_sq", "c_right_sq"]
        columns += [collective.c_left_sq, collective.c_right_sq]
    _write_csv(
        os.path.join(out_dir, config.outputs.populations_csv),
        header,
        ([_fmt(col[i]) for col in columns] for i in range(t_grid.size)),
    )

    frames = _write_frames(result, basis, config.outputs.frames, out_dir)

    period = arrival_time(geom)
    window = (0.5 * period, min(1.5 * period, float(t_grid[-1])))
    if em.mode == "ensembles":
        # transfer_record reads atom_populations; view the collective pair as one
        import dataclasses

        probe = dataclasses.replace(
            result,
            atom_populations=np.vstack([collective.c_left_sq, collective.c_right_sq]),
        )
        record = transfer_record(probe, 1, window)
    else:
        record = transfer_record(result, 1, window)

    mode_count, group_count = _basis_counts(basis)
    return {
        "mode_count": mode_count,
        "group_count": group_count,
        "norm_drift": result.norm_drift,
        "results": {
            "t_peak": record.t_peak,
            "p_peak": record.p_peak,
            "infidelity": record.infidelity,
            "energy_drift": result.energy_drift,
            "arrival_time": period,
            "frames": frames,
        },
    }


def _task_modes(config, out_dir):
    geom, cutoff, basis = _build_system(config)
    _write_csv(
        os.path.join(out_dir, "spectrum.csv"),
        ("l", "m", "omega"),
        (
            [str(int(l)), str(int(m)), _fmt(w)]
            for l, m, w in zip(basis.l, basis.m, basis.omega)
        ),
    )
    mode_count, group_count = _basis_counts(basis)
    return {
        "mode_count": mode_count,
        "group_count": group_count,
        "norm_drift": None,
        "results": {
            "omega_min": float(basis.omega.min()),
            "omega_max": float(basis.omega.max()),
        },
    }


def _task_optimize(config, out_dir):
    from .optimize import OptimizationProblem, minimize

    opt = config.optimize
    problem = OptimizationProblem(
        free_parameters=opt.free_parameters,
        bounds={name: (lo, hi) for name, lo, hi in opt.bounds},
        defaults={
            "g": config.coupling.g,
            "omega_c": config.coupling.omega_c,
            "R": config.lens.r_over_lambda_a,
            "r_a_over_R": config.emitters.r_a_over_r,
        },
        n0=config.lens.n0,
        drop_sqrt_omega=opt.drop_sqrt_omega,
        truncation_sigmas=config.coupling.truncation_sigmas,
        objective_window=tuple(opt.objective_window),
        retruncate=opt.retruncate,
        sample_every=config.integration.sample_every,
    )
    guess = {name: problem.defaults[name] for name in opt.free_parameters}
    report = minimize(problem, guess, opt.budget)

    with open(os.path.join(out_dir, "optimization.json"), "w", encoding="utf-8") as fh:
        json.dump(
            {
                "best_parameters": report.best_parameters,
                "best_infidelity": report.best_infidelity,
                "evaluation_count": report.evaluation_count,
                "budget_exhausted": report.budget_exhausted,
                "trace": [{"parameters": p, "infidelity": f} for p, f in report.trace],
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    _write_csv(
        os.path.join(out_dir, "trace.csv"),
        ("eval",) + tuple(opt.free_parameters) + ("infidelity",),
        (
            [str(i)] + [_fmt(p[name]) for name in opt.free_parameters] + [_fmt(f)]
            for i, (p, f) in enumerate(report.trace)
        ),
    )

    geom, cutoff, basis = _build_system(config)
    mode_count, group_count = _basis_counts(basis)
    return {
        "mode_count": mode_count,
        "group_count": group_count,
        "norm_drift": None,
        "results": {
            "best_parameters": report.best_parameters,
            "best_infidelity": report.best_infidelity,
            "evaluation_count": report.evaluation_count,
            "budget_exhausted": report.budget_exhausted,
        },
    }


def _task_rwa_check(config, out_dir):
    import numpy as np

    from .coupling import EmitterSet, build_coupling_matrix
    from .dynamics import WaveFunction
    from .rwa import (
        build_full_hamiltonian,
        enumerate_truncated_basis,
        propagate_full,
        restrict_coupling,
    )

    if config.emitters.mode != "two_atoms":
        raise ConfigError(
            "rwa_check supports only emitters.mode = two_atoms", key="emitters.mode"
        )
    geom, cutoff, basis = _build_system(config)
    r_a = config.emitters.r_a_over_r * geom.radius
    emitters = EmitterSet(
        r=np.full(2, r_a), phi=np.asarray(config.emitters.phi), g=config.coupling.g
    )
    coupling = build_coupling_matrix(emitters, cutoff, basis)
    reduced = restrict_coupling(coupling, config.rwa.max_modes)
    fock = enumerate_truncated_basis(2, len(reduced.basis))
    ham = build_full_hamiltonian(fock, reduced, lambda_cr=config.rwa.lambda_cr)

    t_grid = _time_grid(config.integration.t_max, config.integration.sample_every)
    result = propagate_full(
        ham,
        WaveFunction.single_excitation(2, len(reduced.basis)),
        t_grid,
        dt=config.integration.dt,
    )
    norms = np.sqrt(result.norm_squared)
    _write_csv(
        os.path.join(out_dir, "rwa.csv"),
        ("t", "P3", "pop_atom_0", "pop_atom_1", "norm"),
        (
            [
                _fmt(result.times[i]),
                _fmt(result.p3[i]),
                _fmt(result.atom_populations[0, i]),
                _fmt(result.atom_populations[1, i]),
                _fmt(norms[i]),
            ]
            for i in range(t_grid.size)
        ),
    )
    mode_count, group_count = _basis_counts(reduced.basis)
    return {
        "mode_count": mode_count,
        "group_count": group_count,
        "norm_drift": result.norm_drift,
        "results": {
            "p3_max": float(result.p3.max()),
            "lambda_cr": config.rwa.lambda_cr,
            "state_count": len(fock),
        },
    }


def _task_raypath(config, out_dir):
    from .geometry import arrival_time, optical_path_diametral

    geom, cutoff, basis = _build_system(config)
    mode_count, group_count = _basis_counts(basis)
    return {
        "mode_count": mode_count,
        "group_count": group_count,
        "norm_drift": None,
        "results": {
            "optical_path_length": optical_path_diametral(geom),
            "arrival_time": arrival_time(geom),
        },
    }


_TASKS = {
    "simulate": _task_simulate,
    "modes": _task_modes,
    "optimize": _task_optimize,
    "rwa_check": _task_rwa_check,
    "raypath": _task_raypath,
}


def _parse_args(argv):
    parser = argparse.ArgumentParser(
        prog="mfelens",
        description="Excitation exchange in a Maxwell fish-eye lens cavity.",
    )
    parser.add_argument("task", choices=TASKS, help="what to run on the config")
    parser.add_argument("--config", required=True, help="path to an INI config file")
    parser.add_argument("--out", required=True, help="output directory (created if absent)")
    parser.add_argument(
        "--threads", type=int, default=None, help="cap BLAS/OpenMP worker threads"
    )
    return parser.parse_args(argv)


def _emit_error(out_dir, exc) -> None:
    payload = {"error": getattr(exc, "code", "io"), "message": str(exc)}
    key = getattr(exc, "key", None)
    if key is not None:
        payload["key"] = key
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    sys.stderr.write(text)
    try:
        with open(os.path.join(out_dir, "error.json"), "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError:
        pass


def main(argv=None) -> int:
    args = _parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            sys.stderr.write("--threads must be a positive integer\n")
            return 2
        for var in _THREAD_VARS:
            os.environ[var] = str(args.threads)

    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as exc:
        _emit_error(".", exc)
        return 1

    started = time.perf_counter()
    try:
        config = load_config(args.config)
        summary = _TASKS[args.task](config, args.out)
    except (SimulationError, OSError) as exc:
        _emit_error(args.out, exc)
        return 1

    summary = {
        "task": args.task,
        "wall_time_s": time.perf_counter() - started,
        **summary,
    }
    with open(
        os.path.join(args.out, config.outputs.summary_json), "w", encoding="utf-8"
    ) as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
