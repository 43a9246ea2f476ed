"""Reduced ordered BDD engine.

The heavy lifting happens in a kernel: the compiled extension
(``ftakit.bdd._core``) when it was built, otherwise the pure-Python
mirror (``ftakit.bdd._pykernel``).  Selection happens at import; the
``FTAKIT_KERNEL`` environment variable (``compiled`` or ``python``) or
the ``kernel=`` argument of :class:`BddManager` override it per run.

A manager owns one global variable order and guarantees canonicity:
structurally equal functions are represented by the very same node, so
equality of :class:`BddRef` handles is semantic equality.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from ..errors import InputError, SolutionCapExceeded
from ..ordering import VariableOrder
from ._pykernel import PyKernel

try:
    from ._core import Kernel as CompiledKernel
except ImportError:
    CompiledKernel = None

HAVE_COMPILED_KERNEL = CompiledKernel is not None

DEFAULT_SOLUTION_CAP = 1_000_000


def _select_kernel_class(kernel: str | None):
    choice = kernel or os.environ.get("FTAKIT_KERNEL") or "auto"
    if choice == "python":
        return PyKernel
    if choice == "compiled":
        if CompiledKernel is None:
            raise InputError("compiled BDD kernel requested but not built")
        return CompiledKernel
    if choice == "auto":
        return CompiledKernel if CompiledKernel is not None else PyKernel
    raise InputError(f"unknown kernel choice {choice!r}")


@dataclass(frozen=True)
class BddRef:
    """Handle to one BDD node; only valid within its owning manager."""

    manager: "BddManager"
    index: int

    def __bool__(self):
        raise TypeError("a BddRef is not a truth value; compare against "
                        "manager.true/manager.false")


class BddManager:
    """Canonical ROBDD node store under a fixed variable order.

    Construction operations (var/apply/ite/restrict/without/minsol) need
    exclusive access to the manager; the read-only operations (evaluation,
    counting, enumeration, probability) are safe to run concurrently on a
    frozen manager.
    """

    def __init__(self, order: VariableOrder | Sequence[str], kernel: str | None = None):
        if not isinstance(order, VariableOrder):
            order = VariableOrder(tuple(order))
        self.order = order
        self._kernel = _select_kernel_class(kernel)(len(order))
        self._false = BddRef(self, 0)
        self._true = BddRef(self, 1)
        room = 6 * len(order) + 2000
        if sys.getrecursionlimit() < room:
            sys.setrecursionlimit(room)

    @property
    def kernel_name(self) -> str:
        return "compiled" if self._kernel.compiled else "python"

    @property
    def false(self) -> BddRef:
        return self._false

    @property
    def true(self) -> BddRef:
        return self._true

    def _wrap(self, index: int) -> BddRef:
        if index == 0:
            return self._false
        if index == 1:
            return self._true
        return BddRef(self, index)

    def _unwrap(self, ref: BddRef) -> int:
        if not isinstance(ref, BddRef) or ref.manager is not self:
            raise InputError("BDD handle does not belong to this manager")
        return ref.index

    def _level(self, name_or_index: int | str) -> int:
        if isinstance(name_or_index, str):
            return self.order.index(name_or_index)
        if not 0 <= name_or_index < len(self.order):
            raise InputError(f"variable index {name_or_index} out of range")
        return name_or_index

    # -- construction ----------------------------------------------------

    def var(self, variable: int | str) -> BddRef:
        return self._wrap(self._kernel.var_node(self._level(variable)))

    def apply_and(self, f: BddRef, g: BddRef) -> BddRef:
        return self._wrap(self._kernel.apply_and(self._unwrap(f), self._unwrap(g)))

    def apply_or(self, f: BddRef, g: BddRef) -> BddRef:
        return self._wrap(self._kernel.apply_or(self._unwrap(f), self._unwrap(g)))

    def ite(self, f: BddRef, g: BddRef, h: BddRef) -> BddRef:
        return self._wrap(self._kernel.ite(
            self._unwrap(f), self._unwrap(g), self._unwrap(h)))

    def restrict(self, f: BddRef, variable: int | str, value: int) -> BddRef:
        return self._wrap(self._kernel.restrict(
            self._unwrap(f), self._level(variable), 1 if value else 0))

    def without(self, f: BddRef, g: BddRef) -> BddRef:
        return self._wrap(self._kernel.without(self._unwrap(f), self._unwrap(g)))

    def minsol(self, f: BddRef) -> BddRef:
        return self._wrap(self._kernel.minsol(self._unwrap(f)))

    # -- inspection --------------------------------------------------------

    def internal_node_count(self, f: BddRef) -> int:
        return self._kernel.internal_node_count(self._unwrap(f))

    def evaluate(self, f: BddRef, assignment: Mapping[str, bool]) -> bool:
        """Evaluate under a full assignment keyed by variable name."""
        bits = [bool(assignment[name]) for name in self.order]
        return self._kernel.evaluate(self._unwrap(f), bits)

    def evaluate_bits(self, f: BddRef, bits: Sequence[bool]) -> bool:
        return self._kernel.evaluate(self._unwrap(f), bits)

    def enumerate_solutions(
        self, f: BddRef, cap: int = DEFAULT_SOLUTION_CAP
    ) -> list[frozenset[str]]:
        """One variable set per 1-path, in 1-edge-first depth-first order.

        Variables reached over 0-edges or skipped by the path are not part
        of the set.  Exceeding ``cap`` raises, it never truncates.
        """
        kernel = self._kernel
        root = self._unwrap(f)
        names = self.order.names
        out: list[frozenset[str]] = []
        path: list[str] = []

        def walk(node: int) -> None:
            if node == 0:
                return
            if node == 1:
                if len(out) >= cap:
                    raise SolutionCapExceeded(
                        f"more than {cap} solutions; raise the cap to enumerate")
                out.append(frozenset(path))
                return
            path.append(names[kernel.level_of(node)])
            walk(kernel.high_of(node))
            path.pop()
            walk(kernel.low_of(node))

        walk(root)
        return out

    # -- probability evaluation --------------------------------------------

    def probability(self, f: BddRef, probs: Mapping[str, float]) -> float:
        """Failure probability under independent per-variable probabilities."""
        return float(self._kernel.probability(
            self._unwrap(f), self._prob_vector(probs)))

    # memory guard for the vectorised pass: one value row is kept per
    # reachable node, so wide chunks are split when the BDD is large
    _CHUNK_VALUE_BUDGET = 1 << 25

    def probability_chunk(self, f: BddRef, probs_matrix: np.ndarray) -> np.ndarray:
        """Row ``i`` of ``probs_matrix`` holds variable ``i``'s probabilities."""
        matrix = np.ascontiguousarray(probs_matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(self.order):
            raise InputError("probability matrix must have one row per variable")
        index = self._unwrap(f)
        n_points = matrix.shape[1]
        nodes = self._kernel.internal_node_count(index)
        width = max(1, self._CHUNK_VALUE_BUDGET // max(nodes, 1))
        if n_points <= width:
            return self._kernel.probability_chunk(index, matrix)
        out = np.empty(n_points)
        for start in range(0, n_points, width):
            stop = min(start + width, n_points)
            out[start:stop] = self._kernel.probability_chunk(
                index, matrix[:, start:stop])
        return out

    def _prob_vector(self, probs: Mapping[str, float]) -> np.ndarray:
        vec = np.empty(len(self.order), dtype=np.float64)
        for i, name in enumerate(self.order):
            try:
                p = probs[name]
            except KeyError:
                raise InputError(f"no probability given for variable {name!r}") from None
            if not 0.0 <= p <= 1.0:
                raise InputError(f"probability for {name!r} outside [0, 1]: {p}")
            vec[i] = p
        return vec

    # -- export -------------------------------------------------------------

    def to_dot(self, f: BddRef, out: IO[str], name: str = "bdd") -> None:
        """DOT rendering: solid 1-edges, dashed 0-edges, boxed terminals."""
        kernel = self._kernel
        root = self._unwrap(f)
        out.write(f"digraph {name} {{\n")
        out.write('  n0 [shape=box, label="0"];\n')
        out.write('  n1 [shape=box, label="1"];\n')
        for node in sorted(kernel.reachable(root)):
            label = self.order.names[kernel.level_of(node)]
            out.write(f'  n{node} [shape=circle, label="{label}"];\n')
            out.write(f"  n{node} -> n{kernel.high_of(node)} [style=solid];\n")
            out.write(f"  n{node} -> n{kernel.low_of(node)} [style=dashed];\n")
        out.write("}\n")
