"""Cavity QED of atoms coupled to the modes of a Maxwell fish-eye lens.

Submodules are imported lazily so that the command-line entry point can pin
BLAS thread counts through environment variables before numpy ever loads.
"""

import importlib

__version__ = "0.1.0"

# public name -> submodule that defines it
_EXPORTS = {
    "BACKEND": "kernels",
    "HAVE_EXTENSION": "kernels",
    "LensGeometry": "geometry",
    "arrival_time": "geometry",
    "optical_path_diametral": "geometry",
    "refractive_index": "geometry",
    "ModeBasis": "modes",
    "ModeIndex": "modes",
    "eigenfrequency": "modes",
    "enumerate_modes": "modes",
    "mode_gram": "modes",
    "CouplingMatrix": "coupling",
    "CutoffSpec": "coupling",
    "EmitterSet": "coupling",
    "basis_for": "coupling",
    "build_coupling_matrix": "coupling",
    "EffectiveHamiltonian": "dynamics",
    "SimulationResult": "dynamics",
    "TransferRecord": "dynamics",
    "WaveFunction": "dynamics",
    "assemble_hamiltonian": "dynamics",
    "propagate": "dynamics",
    "transfer_record": "dynamics",
    "IntensityFrame": "render",
    "intensity_at": "render",
    "photon_energy": "render",
    "read_frame": "render",
    "render_frame": "render",
    "write_frame": "render",
    "CollectiveRecord": "ensemble",
    "EnsembleSpec": "ensemble",
    "collective_populations": "ensemble",
    "dicke_initial_state": "ensemble",
    "sample_ensembles": "ensemble",
    "FullCouplingHamiltonian": "rwa",
    "RwaResult": "rwa",
    "TruncatedFockBasis": "rwa",
    "build_full_hamiltonian": "rwa",
    "enumerate_truncated_basis": "rwa",
    "propagate_full": "rwa",
    "restrict_coupling": "rwa",
    "OptimizationProblem": "optimize",
    "OptimizationReport": "optimize",
    "minimize": "optimize",
    "transfer_infidelity": "optimize",
    "RunConfig": "config",
    "load_config": "config",
    "parse_config": "config",
    "serialize_config": "config",
}

__all__ = sorted(_EXPORTS) + ["__version__"]


def __getattr__(name):
    try:
        module = _EXPORTS[name]
    except KeyError:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}") from None
    value = getattr(importlib.import_module(f".{module}", __name__), name)
    globals()[name] = value
    return value


def __dir__():
    return __all__
