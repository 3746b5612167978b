import numpy as np
import pytest

from panelpipe.config import load_config
from panelpipe.samples import aircraft_mesh, write_demo


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory):
    """Demo aircraft mesh + config, written once per session."""
    out = tmp_path_factory.mktemp("demo")
    write_demo(out)
    return out


@pytest.fixture(scope="session")
def demo_cfg(demo_dir):
    return load_config(demo_dir / "aircraft.yaml")


@pytest.fixture(scope="session")
def demo_mesh():
    return aircraft_mesh()


@pytest.fixture(scope="session")
def pipeline_run(demo_dir, demo_cfg):
    """One full pipeline run shared by the tests that only read artifacts."""
    from panelpipe.pipeline import run_all

    run_all(demo_cfg)
    return demo_cfg.output_dir


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
