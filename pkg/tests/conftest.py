import pytest

from ftakit.bdd import HAVE_COMPILED_KERNEL
from ftakit.model import AND, OR, PAND, Exponential, make_fault_tree, spare, vot

KERNELS = ["python"] + (["compiled"] if HAVE_COMPILED_KERNEL else [])


@pytest.fixture(params=KERNELS)
def kernel(request):
    return request.param


@pytest.fixture
def fig2_sft():
    """The worked two-ordering example tree: AND over a 2-of-3 and an OR."""
    gates = {
        "T": (AND, ["G", "H"]),
        "G": (vot(2), ["F", "C", "D"]),
        "H": (OR, ["D", "E"]),
        "F": (OR, ["A", "B"]),
    }
    bes = {n: Exponential(1.0) for n in "ABCDE"}
    return make_fault_tree("T", gates, bes)


@pytest.fixture
def fig1_dft():
    """The modularisation example: two dynamic modules under a static top."""
    gates = {
        "T": (OR, ["G", "K", "S"]),
        "G": (AND, ["A", "B"]),
        "K": (AND, ["B", "H"]),
        "H": (PAND, ["C", "D"]),
        "S": (spare("wsp"), ["E", "F"]),
    }
    bes = {
        "A": Exponential(0.7),
        "B": Exponential(0.8),
        "C": Exponential(1.1),
        "D": Exponential(0.9),
        "E": Exponential(1.3),
        "F": Exponential(0.6, dormancy=0.3),
    }
    return make_fault_tree("T", gates, bes)
