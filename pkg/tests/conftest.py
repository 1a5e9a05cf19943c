import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from utils.config import Config, Variables  # noqa: E402
from utils.kernels import SpectralSegment  # noqa: E402


def random_hermitian(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """Random Hermitian matrix with spectral radius ``radius``."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = 0.5 * (a + a.conj().T)
    return h * (radius / np.max(np.abs(np.linalg.eigvalsh(h))))


def enclosing_segment(h: np.ndarray, margin: float = 0.05) -> SpectralSegment:
    """Segment of ``G = -iH`` from the exact eigenvalues of ``H``."""
    energies = np.linalg.eigvalsh(h)
    return SpectralSegment(-energies[-1], -energies[0]).widened(margin)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / 'config.yml'
    with open(os.path.join(ROOT, 'config.yml'), encoding='utf8') as source:
        text = source.read()
    path.write_text(text.replace('.reference_cache', str(tmp_path / 'cache')), encoding='utf8')
    return str(path)


@pytest.fixture
def variables_path():
    return os.path.join(ROOT, 'variables.yml')


@pytest.fixture
def config(config_path):
    return Config(config_path)


@pytest.fixture
def variables(variables_path):
    return Variables(variables_path)
