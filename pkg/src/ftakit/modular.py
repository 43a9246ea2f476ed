"""Dynamic fault tree analysis by modularisation.

Independent sub-trees (modules) are found with the visit-timestamp
criterion: a node roots a module iff every node reachable from it is
visited only between the node's first and last visit of one depth-first
left-most traversal.  Dependency and sequence couplings are added as
traversal edges first, so coupled nodes never straddle a module boundary.

Dynamic modules are solved as Markov chains, replaced by basic events
tabulated at the query times, and the remaining static tree is evaluated
through its BDD.  Chains are cached per module so repeated queries reuse
them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import ctmc as ctmc_mod
from .analysis import DEFAULT_CHUNK_SIZE, unreliability_curve
from .curves import TimeCurve
from .errors import InputError
from .model import FaultTree, Tabulated, is_static, validate
from .ordering import VariableOrder, dfs_order
from .translate import translate

TabulatedBE = Tabulated


@dataclass(frozen=True)
class Module:
    """An independent sub-tree: its root plus every member node."""

    root: str
    members: frozenset[str]

    def __len__(self) -> int:
        return len(self.members)


def _traversal_edges(ft: FaultTree) -> dict[str, tuple[str, ...]]:
    """Child edges plus undirected couplings.

    Couplings: a dependency couples its trigger with each dependent (and
    itself with its children so a substitution carries it along); a
    sequence enforcer chains its children.  Nodes still unreachable from
    the top afterwards are attached below it.
    """
    extra: dict[str, list[str]] = {n: [] for n in ft.nodes}

    def couple(a: str, b: str) -> None:
        extra[a].append(b)
        extra[b].append(a)

    for name in ft.nodes:
        ntype = ft.types[name]
        kids = ft.children_of(name)
        if ntype.kind == "pdep":
            trigger, deps = kids[0], kids[1:]
            for dep in deps:
                couple(trigger, dep)
            couple(name, trigger)
        elif ntype.kind == "seq":
            for left, right in zip(kids, kids[1:]):
                couple(left, right)
            couple(name, kids[0])

    edges = {
        n: tuple(ft.children_of(n))
        + tuple(sorted(set(extra[n]), key=ft.index_of))
        for n in ft.nodes
    }

    reachable = {ft.top}
    stack = [ft.top]
    while stack:
        for nxt in edges[stack.pop()]:
            if nxt not in reachable:
                reachable.add(nxt)
                stack.append(nxt)
    stray = [n for n in ft.nodes if n not in reachable]
    if stray:
        attached = []
        for name in stray:
            if name in reachable:
                continue
            attached.append(name)
            reachable.add(name)
            stack = [name]
            while stack:
                for nxt in edges[stack.pop()]:
                    if nxt not in reachable:
                        reachable.add(nxt)
                        stack.append(nxt)
        edges[ft.top] = edges[ft.top] + tuple(attached)
    return edges


def _reach_sets(ft: FaultTree, edges: Mapping[str, tuple[str, ...]]) -> dict[str, set[str]]:
    out: dict[str, set[str]] = {}
    for name in ft.nodes:
        seen = {name}
        stack = [name]
        while stack:
            for nxt in edges[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        out[name] = seen
    return out


def detect_modules(ft: FaultTree) -> tuple[Module, ...]:
    """Unique module list from one depth-first left-most traversal."""
    validate(ft).raise_if_failed()
    edges = _traversal_edges(ft)

    first: dict[str, int] = {}
    last: dict[str, int] = {}
    clock = 0

    def tick(node: str) -> None:
        nonlocal clock
        clock += 1
        first.setdefault(node, clock)
        last[node] = clock

    # depth-first left-most; re-encounters tick the node but do not descend
    expanded: set[str] = set()
    tick(ft.top)
    expanded.add(ft.top)
    stack: list[tuple[str, int]] = [(ft.top, 0)]
    while stack:
        node, i = stack.pop()
        kids = edges[node]
        if i < len(kids):
            stack.append((node, i + 1))
            nxt = kids[i]
            tick(nxt)
            if nxt not in expanded:
                expanded.add(nxt)
                stack.append((nxt, 0))
        else:
            tick(node)

    reach = _reach_sets(ft, edges)
    modules = []
    for name in ft.nodes:
        descendants = reach[name] - {name}
        if all(first[name] < first[d] and last[d] < last[name]
               for d in descendants):
            modules.append(Module(root=name, members=frozenset(reach[name])))
    return tuple(modules)


def select_dynamic_modules(ft: FaultTree, modules: Sequence[Module]) -> tuple[Module, ...]:
    """Keep the modules worth a Markov solve.

    Scanning by decreasing size, a module is dropped when its members not
    contained in any other remaining module hold no dynamic node; this
    removes all-static modules and dynamic modules nested inside a
    surviving one, leaving a unique, pairwise disjoint set.
    """
    dynamic = {n for n in ft.nodes if ft.types[n].is_dynamic}
    ordered = sorted(modules, key=lambda m: (-len(m.members), ft.index_of(m.root)))
    kept = list(ordered)
    for mod in ordered:
        others: set[str] = set()
        for other in kept:
            if other is not mod:
                others.update(other.members)
        own = mod.members - others
        if not (own & dynamic):
            kept.remove(mod)
    return tuple(m for m in kept)


def module_tree(ft: FaultTree, module: Module) -> FaultTree:
    """The fault tree induced by a module, rooted at the module root."""
    nodes = tuple(n for n in ft.nodes if n in module.members)
    return FaultTree(
        nodes=nodes,
        types={n: ft.types[n] for n in nodes},
        children={n: ft.children_of(n) for n in nodes},
        top=module.root,
        distributions={n: d for n, d in ft.distributions.items()
                       if n in module.members},
    )


def replace_module(ft: FaultTree, module: Module, tabulated: Tabulated) -> FaultTree:
    """Substitute a module by one BE (same name as the root) carrying the table."""
    interior = module.members - {module.root}
    for name in interior:
        for parent in ft.parents_of(name):
            if parent not in module.members:
                raise AssertionError(
                    f"node {name!r} inside module {module.root!r} has an "
                    f"outside parent {parent!r}; not a true module")
    nodes = tuple(n for n in ft.nodes if n not in interior)
    types = {n: ft.types[n] for n in nodes}
    children = {n: ft.children_of(n) for n in nodes}
    distributions = {n: d for n, d in ft.distributions.items() if n in nodes}
    from .model import BE
    types[module.root] = BE
    children[module.root] = ()
    distributions[module.root] = tabulated
    replaced = FaultTree(
        nodes=nodes,
        types=types,
        children=children,
        top=ft.top,
        distributions=distributions,
    )
    validate(replaced).raise_if_failed()
    return replaced


@dataclass
class ModularStats:
    """Bookkeeping for one analysis run (used by tests and the CLI)."""

    dynamic_module_roots: tuple[str, ...] = ()
    states_per_module: dict[str, int] = field(default_factory=dict)

    @property
    def total_states(self) -> int:
        return sum(self.states_per_module.values())


class DftAnalyzer:
    """Modularisation pipeline with a per-module Markov model cache."""

    def __init__(
        self,
        ft: FaultTree,
        ordering: str | VariableOrder = "dfs",
        chunk_size: int = DEFAULT_CHUNK_SIZE,
        state_cap: int = ctmc_mod.DEFAULT_STATE_CAP,
        kernel: str | None = None,
    ):
        validate(ft).raise_if_failed()
        self.ft = ft
        self.ordering = ordering
        self.chunk_size = chunk_size
        self.state_cap = state_cap
        self.kernel = kernel
        self._chain_cache: dict[tuple[str, frozenset[str]], ctmc_mod.Ctmc] = {}
        self.stats = ModularStats()

    def _chain_for(self, module: Module) -> ctmc_mod.Ctmc:
        key = (module.root, module.members)
        chain = self._chain_cache.get(key)
        if chain is None:
            chain = ctmc_mod.build_ctmc(module_tree(self.ft, module),
                                        state_cap=self.state_cap)
            self._chain_cache[key] = chain
        return chain

    def _order_for(self, tree: FaultTree) -> VariableOrder:
        if isinstance(self.ordering, VariableOrder):
            return self.ordering
        if self.ordering == "dfs":
            return dfs_order(tree)
        if self.ordering == "tdlr":
            from .ordering import tdlr_order
            return tdlr_order(tree)
        raise InputError(f"unknown ordering {self.ordering!r}")

    def curve(self, times: Sequence[float] | np.ndarray) -> TimeCurve:
        """Unreliability at every time bound, via modularisation."""
        times = np.asarray(times, dtype=np.float64)
        if times.size == 0:
            raise InputError("at least one time point is required")

        residual = self.ft
        if not is_static(residual):
            modules = detect_modules(residual)
            selected = select_dynamic_modules(residual, modules)
            self.stats.dynamic_module_roots = tuple(m.root for m in selected)
            for module in selected:
                chain = self._chain_for(module)
                self.stats.states_per_module[module.root] = chain.num_states
                module_curve = ctmc_mod.transient_failure_prob(chain, times)
                table = Tabulated(times=tuple(float(t) for t in times),
                                  probs=tuple(float(p) for p in module_curve.values))
                residual = replace_module(residual, module, table)
            if not is_static(residual):
                raise AssertionError("residual tree still dynamic after substitution")

        order = self._order_for(residual)
        result = translate(residual, order=order, kernel=self.kernel)
        return unreliability_curve(result.root, residual.distributions, times,
                                   chunk_size=self.chunk_size)

    def monolithic_curve(self, times: Sequence[float] | np.ndarray) -> TimeCurve:
        """Whole-tree Markov solution, for cross-validation."""
        chain = self._whole_chain()
        return ctmc_mod.transient_failure_prob(chain, np.asarray(times, dtype=np.float64))

    def _whole_chain(self) -> ctmc_mod.Ctmc:
        key = (self.ft.top, frozenset(self.ft.nodes))
        chain = self._chain_cache.get(key)
        if chain is None:
            chain = ctmc_mod.build_ctmc(self.ft, state_cap=self.state_cap)
            self._chain_cache[key] = chain
        return chain


def analyze_dft(
    ft: FaultTree,
    times: Sequence[float] | np.ndarray,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    ordering: str | VariableOrder = "dfs",
    use_modularisation: bool = True,
    state_cap: int = ctmc_mod.DEFAULT_STATE_CAP,
    kernel: str | None = None,
) -> TimeCurve:
    """One-shot unreliability curve for a (possibly dynamic) fault tree."""
    analyzer = DftAnalyzer(ft, ordering=ordering, chunk_size=chunk_size,
                           state_cap=state_cap, kernel=kernel)
    if use_modularisation:
        return analyzer.curve(times)
    return analyzer.monolithic_curve(times)
