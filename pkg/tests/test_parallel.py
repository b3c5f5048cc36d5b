import numpy as np
import pytest

from symrad._parallel import map_chunks, thread_count
from symrad.metaplectic import metaplectic_apply
from symrad.radon import inverse_radon, sinogram
from symrad.states import Axis, GaussianState, sample_gaussian
from symrad.symplectic import make_frame
from symrad.wigner import wigner

AX = Axis(-8.0, 8.0, 256)


def _outputs():
    psi = sample_gaussian(GaussianState([[1.2]], [[0.4]]), (AX,))
    s = sinogram(psi, 64)
    grid = Axis(-5.0, 5.0, 64)
    ax2 = Axis(-6.0, 6.0, 48)
    psi2 = sample_gaussian(GaussianState(np.eye(2), np.zeros((2, 2))), (ax2, ax2))
    dense = metaplectic_apply(make_frame([[0.6, 0.2], [0.2, 0.6]], [[0.9, -0.3], [-0.3, 0.9]]), psi2)
    return [wigner(psi).values, s.values, inverse_radon(s, grid, grid).values, dense.values]


@pytest.mark.filterwarnings("ignore::symrad.errors.BadCoverage")
def test_results_independent_of_thread_count(monkeypatch):
    monkeypatch.setenv("SYMRAD_THREADS", "1")
    one = _outputs()
    monkeypatch.setenv("SYMRAD_THREADS", "4")
    four = _outputs()
    for a, b in zip(one, four):
        assert a.tobytes() == b.tobytes()


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("SYMRAD_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("SYMRAD_THREADS", "0")
    assert thread_count() == 1


def test_map_chunks_order(monkeypatch):
    monkeypatch.setenv("SYMRAD_THREADS", "4")
    parts = map_chunks(lambda lo, hi: list(range(lo, hi)), 23, 5)
    assert [x for p in parts for x in p] == list(range(23))
