import numpy as np
import pytest

from mmbspline import _backend

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def _available_kernels():
    out = [pytest.param(_backend.python_kernels, id="python")]
    if _backend.compiled_kernels is not None:
        out.append(pytest.param(_backend.compiled_kernels, id="compiled"))
    return out


@pytest.fixture(params=_available_kernels())
def kernel_module(request):
    return request.param


def random_spd_bordered(rng, dim, width, p):
    """Random SPD matrix with band `width` in the leading block and a dense border."""
    a = np.zeros((dim, dim))
    for k in range(min(width, dim - 1) + 1):
        vals = rng.uniform(-1, 1, dim - k) if k else np.zeros(dim)
        a += np.diag(vals, -k) + (np.diag(vals, k) if k else 0)
    e = rng.uniform(-1, 1, (dim, p))
    f = rng.uniform(-1, 1, (p, p))
    f = f @ f.T
    full = np.block([[a, e], [e.T, f]])
    # diagonal dominance keeps it SPD without touching the sparsity pattern
    shift = np.abs(full).sum(axis=1) + 1.0
    full[np.diag_indices_from(full)] = shift
    return full


def dense_to_band(a, width):
    dim = a.shape[0]
    ab = np.zeros((width + 1, dim))
    for k in range(min(width, dim - 1) + 1):
        ab[k, : dim - k] = np.diag(a, -k)
    return ab
