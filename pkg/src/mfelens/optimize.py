"""Minimizes the first-transfer infidelity over system parameters.

The objective rebuilds the mode basis, couplings and Hamiltonian for each
candidate, propagates the left-atom excitation and scores
1 - max(right-atom population) inside a window centered on the arrival
time T(R).  A candidate change of omega_c (or R) would discretely change
the truncated mode set; by default the frequency window is frozen at
problem setup so the objective stays continuous, with ``retruncate`` to
re-derive the window per candidate instead.

The search is a hand-rolled Nelder-Mead simplex: the objective is cheap,
at most four-dimensional and piecewise-smooth, and keeping the loop local
gives deterministic traces and reflection-into-box bound handling, which
off-the-shelf simplex implementations replace with clipping (collapsing
the simplex onto the box face).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .coupling import CutoffSpec, EmitterSet, build_coupling_matrix
from .dynamics import WaveFunction, assemble_hamiltonian, propagate, transfer_record
from .errors import DomainError, SimulationError
from .geometry import LensGeometry, arrival_time
from .modes import enumerate_modes
from .units import LAMBDA_A

PARAMETER_NAMES = ("g", "omega_c", "R", "r_a_over_R")

_REFLECT, _EXPAND, _CONTRACT, _SHRINK = 1.0, 2.0, 0.5, 0.5


@dataclass(frozen=True)
class OptimizationProblem:
    """Free parameters, bounds and the fixed surrounding configuration.

    ``defaults`` carries the full parameter point (R in units of the
    transition wavelength); free parameters vary around it, the rest stay
    fixed.  ``objective_window`` is in units of T(R) = pi n0 R / c.
    """

    free_parameters: tuple
    bounds: dict
    defaults: dict
    n0: float = 1.0
    drop_sqrt_omega: bool = False
    truncation_sigmas: float = 4.0
    objective_window: tuple = (0.5, 1.5)
    retruncate: bool = False
    sample_every: float = 0.05
    frozen_window: tuple = field(init=False)

    def __post_init__(self):
        for name in self.free_parameters:
            if name not in PARAMETER_NAMES:
                raise DomainError(f"unknown parameter {name!r}")
            if name not in self.bounds:
                raise DomainError(f"missing bounds for {name!r}")
            lo, hi = self.bounds[name]
            if not (0 < lo < hi and math.isfinite(hi)):
                raise DomainError(f"bounds for {name!r} must be finite and positive")
            if not lo <= self.defaults[name] <= hi:
                raise DomainError(f"default for {name!r} lies outside its bounds")
        for name in PARAMETER_NAMES:
            if name not in self.defaults:
                raise DomainError(f"missing default for {name!r}")
        window = CutoffSpec(
            self.defaults["omega_c"], self.drop_sqrt_omega, self.truncation_sigmas
        ).window()
        object.__setattr__(self, "frozen_window", window)

    def point(self, params) -> dict:
        """Full parameter dict from a free-parameter vector."""
        params = np.asarray(params, dtype=float)
        if params.shape != (len(self.free_parameters),):
            raise DomainError(
                f"expected {len(self.free_parameters)} parameters, got {params.shape}"
            )
        out = dict(self.defaults)
        out.update(zip(self.free_parameters, params))
        return out


@dataclass
class OptimizationReport:
    best_parameters: dict
    best_infidelity: float
    evaluation_count: int
    trace: list
    budget_exhausted: bool


def transfer_infidelity(
    g: float,
    omega_c: float,
    R: float,
    r_a_over_R: float,
    n0: float = 1.0,
    drop_sqrt_omega: bool = False,
    truncation_sigmas: float = 4.0,
    objective_window=(0.5, 1.5),
    window=None,
    sample_every: float = 0.05,
) -> float:
    """Infidelity of the left-to-right transfer for one parameter point."""
    geom = LensGeometry(radius=R * LAMBDA_A, n0=n0)
    spec = CutoffSpec(omega_c, drop_sqrt_omega, truncation_sigmas)
    if window is None:
        window = spec.window()
    basis = enumerate_modes(geom, *window)
    emitters = EmitterSet(
        r=np.full(2, r_a_over_R * geom.radius), phi=np.array([0.0, np.pi]), g=g
    )
    coupling = build_coupling_matrix(emitters, spec, basis, window=window)
    ham = assemble_hamiltonian(emitters, coupling)
    period = arrival_time(geom)
    t_hi = objective_window[1] * period
    n_t = int(math.floor(t_hi / sample_every + 1e-9)) + 1
    t_grid = np.arange(n_t) * sample_every
    result = propagate(
        ham, WaveFunction.single_excitation(2, len(basis)), t_grid, method="dense"
    )
    record = transfer_record(
        result, 1, (objective_window[0] * period, objective_window[1] * period)
    )
    return record.infidelity


def objective(problem: OptimizationProblem, params) -> float:
    """Problem-bound infidelity; rejects out-of-bounds candidates."""
    point = problem.point(params)
    for name in problem.free_parameters:
        lo, hi = problem.bounds[name]
        if not lo <= point[name] <= hi:
            raise DomainError(f"{name}={point[name]!r} outside bounds [{lo}, {hi}]")
    return transfer_infidelity(
        point["g"],
        point["omega_c"],
        point["R"],
        point["r_a_over_R"],
        n0=problem.n0,
        drop_sqrt_omega=problem.drop_sqrt_omega,
        truncation_sigmas=problem.truncation_sigmas,
        objective_window=problem.objective_window,
        window=None if problem.retruncate else problem.frozen_window,
        sample_every=problem.sample_every,
    )


def _fold_into_box(x, lo, hi):
    """Reflect a coordinate into [lo, hi] (triangle-wave fold)."""
    period = 2.0 * (hi - lo)
    y = (x - lo) % period
    return lo + min(y, period - y)


def minimize(
    problem: OptimizationProblem,
    initial_guess,
    budget: int,
    objective_fn=None,
    xatol: float = 1e-8,
    fatol: float = 1e-10,
) -> OptimizationReport:
    """Nelder-Mead descent with standard coefficients and bound folding.

    Candidates outside the box are reflected back inside before
    evaluation.  Failing simulations score +inf.  Stops on simplex
    collapse or budget exhaustion, whichever comes first; the best point
    seen is returned either way.
    """
    dim = len(problem.free_parameters)
    if budget < 10 * (dim + 1):
        raise DomainError(f"budget must be at least {10 * (dim + 1)} for {dim} parameters")
    if objective_fn is None:
        objective_fn = lambda params: objective(problem, params)

    lows = np.array([problem.bounds[n][0] for n in problem.free_parameters])
    highs = np.array([problem.bounds[n][1] for n in problem.free_parameters])
    x0 = np.asarray(
        [initial_guess[n] for n in problem.free_parameters]
        if isinstance(initial_guess, dict)
        else initial_guess,
        dtype=float,
    )
    if np.any(x0 < lows) or np.any(x0 > highs):
        raise DomainError("initial guess lies outside the bounds")

    trace = []
    state = {"count": 0}

    def bounded_eval(x):
        if state["count"] >= budget:
            return None
        x = np.array([_fold_into_box(v, lo, hi) for v, lo, hi in zip(x, lows, highs)])
        try:
            value = float(objective_fn(x))
        except SimulationError:
            value = math.inf
        state["count"] += 1
        trace.append((dict(zip(problem.free_parameters, x)), value))
        return x, value

    simplex = [bounded_eval(x0)]
    for i in range(dim):
        vertex = x0.copy()
        vertex[i] = vertex[i] * 1.05 if vertex[i] != 0 else 0.00025
        evaluated = bounded_eval(vertex)
        if evaluated is None:
            break
        simplex.append(evaluated)

    exhausted = False
    while len(simplex) == dim + 1:
        simplex.sort(key=lambda pair: pair[1])
        values = np.array([pair[1] for pair in simplex])
        points = np.array([pair[0] for pair in simplex])
        if (
            np.max(np.abs(points[1:] - points[0])) <= xatol
            and np.max(np.abs(values[1:] - values[0])) <= fatol
        ):
            break
        if state["count"] >= budget:
            exhausted = True
            break
        centroid = points[:-1].mean(axis=0)
        worst = points[-1]

        reflected = bounded_eval(centroid + _REFLECT * (centroid - worst))
        if reflected is None:
            exhausted = True
            break
        if reflected[1] < values[0]:
            expanded = bounded_eval(centroid + _EXPAND * (centroid - worst))
            if expanded is None:
                simplex[-1] = reflected
                exhausted = True
                break
            simplex[-1] = expanded if expanded[1] < reflected[1] else reflected
            continue
        if reflected[1] < values[-2]:
            simplex[-1] = reflected
            continue
        contracted = bounded_eval(centroid + _CONTRACT * (worst - centroid))
        if contracted is None:
            simplex[-1] = min(simplex[-1], reflected, key=lambda pair: pair[1])
            exhausted = True
            break
        if contracted[1] < values[-1]:
            simplex[-1] = contracted
            continue
        best = points[0]
        shrunk = [simplex[0]]
        for point, _ in simplex[1:]:
            evaluated = bounded_eval(best + _SHRINK * (point - best))
            if evaluated is None:
                exhausted = True
                break
            shrunk.append(evaluated)
        if len(shrunk) < dim + 1:
            simplex = shrunk + simplex[len(shrunk) :]
            break
        simplex = shrunk

    best_params, best_value = min(trace, key=lambda pair: pair[1])
    return OptimizationReport(
        best_parameters=best_params,
        best_infidelity=best_value,
        evaluation_count=state["count"],
        trace=trace,
        budget_exhausted=exhausted or state["count"] >= budget,
    )
