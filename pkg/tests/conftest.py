from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

import adtstab as st

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def ref():
    """Bundled 2-species reaction-diffusion benchmark instance."""
    return SimpleNamespace(
        A=np.array([[1.2, 0.1], [0.1, -3.0]]),
        B=np.array([[0.2, 0.1], [-0.1, 1.5]]),
        theta=1.0,
        chi_max=0.1,
        mu=1.0,
        ell=float(np.pi),
    )


@pytest.fixture
def ref_system(ref):
    return st.ImpulsiveSystem(A=ref.A, B=ref.B)


@pytest.fixture
def ref_model(ref):
    return st.ParabolicModel(A=ref.A, B=ref.B, mu=ref.mu, ell=ref.ell, n_modes=32)


@pytest.fixture
def ref_config_path():
    return REPO_ROOT / "configs" / "reaction_diffusion.json"
