import numpy as np
import pytest

from pwvdpitch import _kernels

BACKENDS = [pytest.param(_kernels.python_backend, id="python")]
if _kernels.compiled_backend is not None:
    BACKENDS.append(pytest.param(_kernels.compiled_backend, id="cython"))


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def dft_matrix(n: int) -> np.ndarray:
    """Explicit DFT matrix, used as an FFT-free oracle."""
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n)


def rms(x) -> float:
    return float(np.sqrt(np.mean(np.square(x))))
