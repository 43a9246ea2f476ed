"""The compiled and pure-Python kernels must be observationally identical."""

import random

import numpy as np
import pytest

from ftakit.bdd import HAVE_COMPILED_KERNEL, BddManager
from ftakit.analysis import minimal_cut_sets, unreliability_curve
from ftakit.ordering import dfs_order
from ftakit.translate import translate

from oracles import random_sft

pytestmark = pytest.mark.skipif(
    not HAVE_COMPILED_KERNEL, reason="compiled kernel not built")


@pytest.mark.parametrize("seed", range(10))
def test_same_node_numbering_and_counts(seed):
    rng = random.Random(3000 + seed)
    ft = random_sft(rng, rng.randint(3, 12))
    order = dfs_order(ft)
    py = translate(ft, order=order, kernel="python")
    cy = translate(ft, order=order, kernel="compiled")
    assert py.root.index == cy.root.index
    assert py.manager.internal_node_count(py.root) == \
        cy.manager.internal_node_count(cy.root)
    assert py.manager._kernel.size() == cy.manager._kernel.size()


@pytest.mark.parametrize("seed", range(5))
def test_same_cut_sets(seed):
    rng = random.Random(3100 + seed)
    ft = random_sft(rng, rng.randint(3, 10))
    assert minimal_cut_sets(ft, kernel="python") == \
        minimal_cut_sets(ft, kernel="compiled")


@pytest.mark.parametrize("seed", range(5))
def test_bitwise_equal_curves(seed):
    rng = random.Random(3200 + seed)
    ft = random_sft(rng, rng.randint(3, 10))
    times = np.linspace(0.1, 5.0, 203)
    values = []
    for kernel in ("python", "compiled"):
        result = translate(ft, kernel=kernel)
        curve = unreliability_curve(result.root, ft.distributions, times,
                                    chunk_size=64)
        values.append(curve.values)
    assert np.array_equal(values[0], values[1])


def test_minsol_and_without_parity():
    rng = random.Random(3300)
    for _ in range(10):
        ft = random_sft(rng, rng.randint(3, 9))
        order = dfs_order(ft)
        refs = {}
        for kernel in ("python", "compiled"):
            m = BddManager(order, kernel=kernel)
            result = translate(ft, order=order, manager=m)
            minimal = m.minsol(result.root)
            refs[kernel] = (minimal.index, set(m.enumerate_solutions(minimal)))
        assert refs["python"] == refs["compiled"]
