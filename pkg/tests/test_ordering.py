import random

import pytest

from ftakit.errors import InputError
from ftakit.model import AND, OR, Exponential, make_fault_tree
from ftakit.ordering import dfs_order, order_from_list, read_order_file, tdlr_order

from oracles import random_sft


def test_dfs_order_on_worked_example(fig2_sft):
    assert dfs_order(fig2_sft).names == ("A", "B", "C", "D", "E")


def test_tdlr_order_on_worked_example(fig2_sft):
    assert tdlr_order(fig2_sft).names == ("C", "D", "E", "A", "B")


def test_single_be():
    ft = make_fault_tree("b", {}, {"b": Exponential(1.0)})
    assert dfs_order(ft).names == ("b",)
    assert tdlr_order(ft).names == ("b",)


def test_chain_of_gates():
    ft = make_fault_tree(
        "T", {"T": (AND, ["U"]), "U": (AND, ["a"])}, {"a": Exponential(1.0)}
    )
    assert dfs_order(ft).names == ("a",)
    assert tdlr_order(ft).names == ("a",)


def test_shared_be_appears_once():
    gates = {"T": (AND, ["G", "H"]), "G": (OR, ["a", "b"]), "H": (OR, ["b", "c"])}
    ft = make_fault_tree("T", gates, {n: Exponential(1.0) for n in "abc"})
    assert dfs_order(ft).names == ("a", "b", "c")


def test_tdlr_shared_be_ranked_at_min_depth():
    # d reachable at depth 1 under T and at depth 2 under G: depth 1 wins
    gates = {
        "T": (AND, ["G", "d"]),
        "G": (OR, ["a", "H"]),
        "H": (OR, ["d", "b"]),
    }
    ft = make_fault_tree("T", gates, {n: Exponential(1.0) for n in "abd"})
    assert tdlr_order(ft).names == ("d", "a", "b")


@pytest.mark.parametrize("seed", range(10))
def test_heuristics_return_permutations(seed):
    rng = random.Random(seed)
    ft = random_sft(rng, rng.randint(2, 10))
    for order in (dfs_order(ft), tdlr_order(ft)):
        assert sorted(order.names) == sorted(ft.basic_events)


def test_heuristics_deterministic(fig2_sft):
    assert dfs_order(fig2_sft).names == dfs_order(fig2_sft).names
    assert tdlr_order(fig2_sft).names == tdlr_order(fig2_sft).names


def test_dependents_only_under_floating_dependency_still_ordered():
    """BEs unreachable from the top through child edges are appended in
    declaration order, keeping the permutation total."""
    from ftakit.model import pdep

    gates = {"T": (AND, ["a", "b"]), "d": (pdep(1.0), ["a", "x"])}
    bes = {n: Exponential(1.0) for n in ("a", "b", "x")}
    ft = make_fault_tree("T", gates, bes)
    assert dfs_order(ft).names == ("a", "b", "x")
    assert tdlr_order(ft).names == ("a", "b", "x")


def test_order_from_list_roundtrip(fig2_sft):
    names = ["E", "D", "C", "B", "A"]
    assert order_from_list(fig2_sft, names).names == tuple(names)


def test_order_from_list_missing_name(fig2_sft):
    with pytest.raises(InputError, match="missing.*E"):
        order_from_list(fig2_sft, ["A", "B", "C", "D"])


def test_order_from_list_foreign_name(fig2_sft):
    with pytest.raises(InputError, match="not a basic event.*Z"):
        order_from_list(fig2_sft, ["A", "B", "C", "D", "E", "Z"])


def test_read_order_file(fig2_sft, tmp_path):
    path = tmp_path / "order.txt"
    path.write_text("E\nD\nC\n\nB\nA\n")
    with open(path) as handle:
        order = read_order_file(fig2_sft, handle)
    assert order.names == ("E", "D", "C", "B", "A")
