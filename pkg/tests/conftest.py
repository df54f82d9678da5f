"""Session fixtures: each preset CLI run happens once and is shared."""

from pathlib import Path

import numpy as np
import pytest

import mfelens
from mfelens import WaveFunction, propagate
from mfelens.cli import main as cli_main

from helpers import T_TRANSFER, fig3_system

PRESET_DIR = Path(mfelens.__file__).parent / "presets"


def run_preset(task, name, out_dir):
    """Run one CLI task on a packaged preset and return the output directory."""
    rc = cli_main([task, "--config", str(PRESET_DIR / name), "--out", str(out_dir)])
    assert rc == 0
    return out_dir


@pytest.fixture(scope="session")
def fig3_run(tmp_path_factory):
    """Narrowband two-atom exchange run (populations, frames, summary)."""
    return run_preset("simulate", "fig3.cfg", tmp_path_factory.mktemp("fig3"))


@pytest.fixture(scope="session")
def fig2_run(tmp_path_factory):
    """Broadband run with a wide cutoff and thousands of modes."""
    return run_preset("simulate", "fig2.cfg", tmp_path_factory.mktemp("fig2"))


@pytest.fixture(scope="session")
def fig4_run(tmp_path_factory):
    """Collective exchange between two sampled hundred-atom ensembles."""
    return run_preset("simulate", "fig4.cfg", tmp_path_factory.mktemp("fig4"))


@pytest.fixture(scope="session")
def s2a_run(tmp_path_factory):
    """Two-parameter infidelity optimization run."""
    return run_preset("optimize", "figS2a.cfg", tmp_path_factory.mktemp("s2a"))


@pytest.fixture(scope="session")
def s2b_run(tmp_path_factory):
    """Four-parameter optimization run with the flat field prefactor."""
    return run_preset("optimize", "figS2b.cfg", tmp_path_factory.mktemp("s2b"))


@pytest.fixture(scope="session")
def rwa_run(tmp_path_factory):
    """Full-dipole check on the reduced near-resonant mode set."""
    return run_preset("rwa_check", "fig5_reduced.cfg", tmp_path_factory.mktemp("rwa"))


@pytest.fixture(scope="session")
def raypath_run(tmp_path_factory):
    """Closed-form optical path task (also exercises the task override)."""
    return run_preset("raypath", "fig3.cfg", tmp_path_factory.mktemp("raypath"))


@pytest.fixture(scope="session")
def fig3_state():
    """In-process long narrowband run with snapshots at T/2 and 0.98T."""
    geom, basis, coupling, ham = fig3_system()
    t_grid = np.arange(3601) * 0.05
    result = propagate(
        ham,
        WaveFunction.single_excitation(2, len(basis)),
        t_grid,
        method="dense",
        snapshot_times=(T_TRANSFER / 2, 0.98 * T_TRANSFER),
    )
    return geom, basis, ham, result
