"""Variable orderings for the BDD translation.

The order of the BE variables governs the shape and size of the BDD.  Two
heuristics are provided, depth-first search (DFS) and top-down left-right
(TDLR), plus explicit orders supplied as a name list or an order file.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import InputError
from .model import FaultTree


@dataclass(frozen=True)
class VariableOrder:
    """A total order on the BE variables of one fault tree."""

    names: tuple[str, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise InputError("variable order contains duplicates")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InputError(f"unknown variable {name!r}") from None


def dfs_order(ft: FaultTree) -> VariableOrder:
    """BEs in first-visit order of a depth-first traversal from the top.

    Children are explored in declared order; revisits of shared nodes are
    skipped, so every BE appears exactly once, at its first encounter.
    """
    seen: set[str] = set()
    order: list[str] = []
    stack = [ft.top]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if ft.types[node].kind == "be":
            order.append(node)
        else:
            stack.extend(reversed(ft.children_of(node)))
    order.extend(b for b in ft.basic_events if b not in seen)
    return VariableOrder(tuple(order))


def tdlr_order(ft: FaultTree) -> VariableOrder:
    """BEs in breadth-first level order, left to right within a level.

    A node's level is its shortest distance from the top, so a shared BE is
    ranked at its shallowest occurrence.
    """
    seen = {ft.top}
    order: list[str] = []
    queue: deque[str] = deque([ft.top])
    while queue:
        node = queue.popleft()
        if ft.types[node].kind == "be":
            order.append(node)
        for child in ft.children_of(node):
            if child not in seen:
                seen.add(child)
                queue.append(child)
    order.extend(b for b in ft.basic_events if b not in seen)
    return VariableOrder(tuple(order))


def order_from_list(ft: FaultTree, names: Sequence[str]) -> VariableOrder:
    """Adopt an explicitly given order; it must be a permutation of the BEs."""
    given = list(names)
    bes = set(ft.basic_events)
    missing = [b for b in ft.basic_events if b not in set(given)]
    foreign = [n for n in given if n not in bes]
    duplicate = sorted({n for n in given if given.count(n) > 1})
    problems = []
    if missing:
        problems.append("missing: " + ", ".join(missing))
    if foreign:
        problems.append("not a basic event: " + ", ".join(foreign))
    if duplicate:
        problems.append("duplicated: " + ", ".join(duplicate))
    if problems:
        raise InputError("bad variable order (" + "; ".join(problems) + ")")
    return VariableOrder(tuple(given))


def read_order_file(ft: FaultTree, lines: Iterable[str]) -> VariableOrder:
    """Order file format: one BE name per line, blank lines ignored."""
    names = [line.strip() for line in lines if line.strip()]
    return order_from_list(ft, names)
