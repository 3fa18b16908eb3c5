import importlib

import numpy as np
import pytest

from conftest import random_connected

from ldsim.energy import edge_weights_array, rx_cost, RadioParams
import ldsim._kernels_py as kpy

compiled = pytest.importorskip("ldsim._kernels")


def kernel_inputs(n, r_max, seed, radio):
    _, g = random_connected(n, r_max, seed=seed)
    rng = np.random.default_rng(seed)
    residual = rng.uniform(0.01, 0.25, n)
    weights = edge_weights_array(radio, g.dist)
    return g, residual, weights


def test_backend_labels():
    assert compiled.BACKEND == "cython"
    assert kpy.BACKEND == "python"


def test_selected_backend_is_one_of_the_two():
    from ldsim import _backend

    assert _backend.BACKEND in ("cython", "python")


def test_greedy_parents_bit_identical(paper_radio):
    for seed in range(20):
        n = 5 + 5 * (seed % 6)
        g, residual, weights = kernel_inputs(n, 70.0, seed, paper_radio)
        rx = rx_cost(paper_radio)
        got_c = compiled.greedy_parents(
            g.indptr, g.indices, weights, residual, rx, g.bs
        )
        got_py = kpy.greedy_parents(
            g.indptr, g.indices, weights, residual, rx, g.bs
        )
        assert np.array_equal(got_c, got_py)


def test_greedy_parents_disconnected_both_none(unit_radio):
    from conftest import abstract_graph

    g = abstract_graph({(0, 2): 1.0}, n=2)
    rx = rx_cost(unit_radio)
    residual = np.full(2, 1000.0)
    weights = edge_weights_array(unit_radio, g.dist)
    assert compiled.greedy_parents(
        g.indptr, g.indices, weights, residual, rx, g.bs
    ) is None
    assert kpy.greedy_parents(
        g.indptr, g.indices, weights, residual, rx, g.bs
    ) is None


def test_drain_rounds_bit_identical():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(2, 30))
        residual = rng.uniform(0.1, 0.25, n)
        cost = rng.uniform(1e-4, 5e-4, n)
        max_rounds = int(rng.integers(-1, 500))
        res_c, dr_c = residual.copy(), np.zeros(n)
        res_p, dr_p = residual.copy(), np.zeros(n)
        out_c = compiled.drain_rounds(res_c, dr_c, cost, max_rounds)
        out_p = kpy.drain_rounds(res_p, dr_p, cost, max_rounds)
        assert out_c == out_p
        assert np.array_equal(res_c, res_p)
        assert np.array_equal(dr_c, dr_p)


def test_drain_rounds_zero_cost_guard():
    residual = np.ones(3)
    cost = np.zeros(3)
    for mod in (compiled, kpy):
        with pytest.raises(ValueError):
            mod.drain_rounds(residual.copy(), np.zeros(3), cost, -1)


def test_pure_python_env_override(monkeypatch):
    monkeypatch.setenv("LDSIM_PURE_PYTHON", "1")
    import ldsim._backend as backend

    reloaded = importlib.reload(backend)
    try:
        assert reloaded.BACKEND == "python"
    finally:
        monkeypatch.delenv("LDSIM_PURE_PYTHON")
        importlib.reload(backend)
