"""In-memory representation and validation of static and dynamic fault trees.

A fault tree is a rooted DAG.  Leaves are basic events (BEs) carrying a
failure distribution; internal nodes are gates.  Static gates (AND, OR,
VOT) are plain Boolean combinators.  Dynamic nodes (PAND, POR, PDEP, SEQ,
SPARE) depend on the order of failures and require state-based analysis.

Trees are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError

STATIC_KINDS = frozenset({"be", "and", "or", "vot"})
DYNAMIC_KINDS = frozenset({"pand", "por", "pdep", "seq", "spare"})
GATE_KINDS = frozenset({"and", "or", "vot", "pand", "por", "pdep", "seq", "spare"})
SPARE_VARIANTS = ("wsp", "csp", "hsp")


@dataclass(frozen=True)
class NodeType:
    """Type tag of a fault tree node.

    ``k`` is the VOT threshold, ``p`` the dependency firing probability
    (1.0 models an unconditional functional dependency), ``variant`` the
    spare flavour keyword kept only for faithful serialization.
    """

    kind: str
    k: int | None = None
    p: float | None = None
    variant: str | None = None

    @property
    def is_gate(self) -> bool:
        return self.kind in GATE_KINDS

    @property
    def is_dynamic(self) -> bool:
        return self.kind in DYNAMIC_KINDS


BE = NodeType("be")
AND = NodeType("and")
OR = NodeType("or")
PAND = NodeType("pand")
POR = NodeType("por")
SEQ = NodeType("seq")


def vot(k: int) -> NodeType:
    return NodeType("vot", k=int(k))


def pdep(p: float = 1.0) -> NodeType:
    return NodeType("pdep", p=float(p))


def spare(variant: str = "wsp") -> NodeType:
    return NodeType("spare", variant=variant)


@dataclass(frozen=True)
class Exponential:
    """Exponential lifetime with rate ``rate``.

    ``dormancy`` scales the rate while the component is not activated
    (1.0: activation irrelevant, 0.0: cold spare that cannot fail dormant).
    """

    rate: float
    dormancy: float = 1.0

    def cdf(self, times: np.ndarray) -> np.ndarray:
        return -np.expm1(-self.rate * np.asarray(times, dtype=np.float64))


@dataclass(frozen=True)
class FixedProbability:
    """Time-independent failure probability (no associated lifetime)."""

    prob: float

    def cdf(self, times: np.ndarray) -> np.ndarray:
        return np.full(np.asarray(times).shape, self.prob, dtype=np.float64)


@dataclass(frozen=True)
class Tabulated:
    """Failure probabilities known only at fixed support times.

    Used for basic events that stand in for a solved dynamic module; the
    support must cover every queried time exactly.
    """

    times: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.probs):
            raise InputError("tabulated times and probabilities differ in length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise InputError("tabulated support times must be strictly increasing")
        if any(not 0.0 <= p <= 1.0 for p in self.probs):
            raise InputError("tabulated probabilities must lie in [0, 1]")
        if any(b < a - 1e-12 for a, b in zip(self.probs, self.probs[1:])):
            raise InputError("tabulated probabilities must be nondecreasing")

    def cdf(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=np.float64)
        support = np.asarray(self.times)
        idx = np.searchsorted(support, times)
        ok = (idx < len(support)) & np.isclose(
            support[np.minimum(idx, len(support) - 1)], times, rtol=0.0, atol=1e-12
        )
        if not np.all(ok):
            missing = times[~ok][0]
            raise InputError(f"time {missing!r} is outside the tabulated support")
        return np.asarray(self.probs)[idx]


Distribution = Exponential | FixedProbability | Tabulated


@dataclass(frozen=True)
class Violation:
    """One broken validation rule, attributed to a node."""

    node: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.node}: {self.message} [{self.rule}]"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_failed(self) -> None:
        if self.violations:
            detail = "; ".join(str(v) for v in self.violations)
            raise InputError(f"invalid fault tree: {detail}")


@dataclass(frozen=True, eq=True)
class FaultTree:
    """A fault tree over named nodes.

    ``nodes`` fixes the declaration order, which also defines the internal
    index of each node (claim resolution and tie-breaking depend on it).
    ``children`` maps every node to its ordered child sequence (empty for
    BEs), ``types`` to its :class:`NodeType`, and ``distributions`` every
    BE to its failure distribution.
    """

    nodes: tuple[str, ...]
    types: Mapping[str, NodeType]
    children: Mapping[str, tuple[str, ...]]
    top: str
    distributions: Mapping[str, Distribution]
    _parents: Mapping[str, tuple[str, ...]] = field(
        init=False, repr=False, compare=False, default=None
    )
    _index: Mapping[str, int] = field(
        init=False, repr=False, compare=False, default=None
    )

    def __post_init__(self):
        parents: dict[str, list[str]] = {name: [] for name in self.nodes}
        for name in self.nodes:
            for child in self.children.get(name, ()):
                if child in parents:
                    parents[child].append(name)
        object.__setattr__(
            self, "_parents", {n: tuple(ps) for n, ps in parents.items()}
        )
        object.__setattr__(
            self, "_index", {n: i for i, n in enumerate(self.nodes)}
        )

    def index_of(self, name: str) -> int:
        return self._index[name]

    def type_of(self, name: str) -> NodeType:
        return self.types[name]

    def children_of(self, name: str) -> tuple[str, ...]:
        return self.children.get(name, ())

    def parents_of(self, name: str) -> tuple[str, ...]:
        return self._parents[name]

    @property
    def basic_events(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if self.types[n].kind == "be")

    @property
    def gates(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if self.types[n].kind != "be")

    def descendants(self, root: str) -> set[str]:
        """All nodes reachable from ``root`` through child edges, inclusive."""
        seen = {root}
        stack = [root]
        while stack:
            for child in self.children.get(stack.pop(), ()):
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return seen


def make_fault_tree(
    top: str,
    gates: Mapping[str, tuple[NodeType, Sequence[str]]],
    basic_events: Mapping[str, Distribution],
    node_order: Iterable[str] | None = None,
) -> FaultTree:
    """Assemble a tree from gate and BE mappings (insertion order = index order)."""
    types: dict[str, NodeType] = {}
    children: dict[str, tuple[str, ...]] = {}
    for name, (ntype, kids) in gates.items():
        types[name] = ntype
        children[name] = tuple(kids)
    for name in basic_events:
        types[name] = BE
        children[name] = ()
    nodes = tuple(node_order) if node_order is not None else tuple(types)
    return FaultTree(
        nodes=nodes,
        types=types,
        children=children,
        top=top,
        distributions=dict(basic_events),
    )


def _cycle_tainted_nodes(ft: FaultTree) -> set[str]:
    """Nodes from which a child-relation cycle is reachable.

    Leaf peeling: repeatedly discharge nodes whose children are all
    discharged; whatever remains depends on a cycle (and contains every
    node that lies on one).
    """
    node_set = set(ft.nodes)
    remaining_kids = {
        n: sum(1 for c in ft.children.get(n, ()) if c in node_set) for n in ft.nodes
    }
    ready = [n for n, k in remaining_kids.items() if k == 0]
    discharged: set[str] = set()
    while ready:
        node = ready.pop()
        discharged.add(node)
        for parent in ft.parents_of(node):
            remaining_kids[parent] -= 1
            if remaining_kids[parent] == 0:
                ready.append(parent)
    return node_set - discharged


def validate(ft: FaultTree) -> ValidationReport:
    """Check every structural invariant; violations are data, not exceptions."""
    v: list[Violation] = []
    node_set = set(ft.nodes)

    if len(node_set) != len(ft.nodes):
        dupes = sorted({n for n in ft.nodes if ft.nodes.count(n) > 1})
        for name in dupes:
            v.append(Violation(name, "unique-names", "node listed more than once"))

    if ft.top not in node_set:
        v.append(Violation(ft.top, "top-exists", "top event is not a declared node"))

    for name in ft.nodes:
        if '"' in name or "\n" in name or not name:
            v.append(Violation(name, "valid-name", "name empty or contains a quote/newline"))
        ntype = ft.types.get(name)
        if ntype is None:
            v.append(Violation(name, "typed", "node has no type"))
            continue
        kids = ft.children.get(name, ())
        for child in kids:
            if child not in node_set:
                v.append(Violation(name, "declared-children",
                                   f"child {child!r} is not a declared node"))
        if len(set(kids)) != len(kids):
            v.append(Violation(name, "duplicate-child",
                               "the same node appears twice among the children"))

        if ntype.kind == "be":
            if kids:
                v.append(Violation(name, "be-childless", "basic event has children"))
            dist = ft.distributions.get(name)
            if dist is None:
                v.append(Violation(name, "be-distribution", "basic event has no distribution"))
            elif isinstance(dist, Exponential):
                if not (dist.rate > 0 and math.isfinite(dist.rate)):
                    v.append(Violation(name, "positive-rate",
                                       f"failure rate must be positive, got {dist.rate}"))
                if not 0.0 <= dist.dormancy <= 1.0:
                    v.append(Violation(name, "dormancy-range",
                                       f"dormancy must lie in [0, 1], got {dist.dormancy}"))
            elif isinstance(dist, FixedProbability):
                if not 0.0 <= dist.prob <= 1.0:
                    v.append(Violation(name, "probability-range",
                                       f"probability must lie in [0, 1], got {dist.prob}"))
        else:
            if name in ft.distributions:
                v.append(Violation(name, "gate-without-distribution",
                                   "only basic events carry a distribution"))
            minimum = 2 if ntype.kind in ("pdep", "seq", "spare") else 1
            if len(kids) < minimum:
                what = "gate without children" if not kids else \
                    f"{ntype.kind} needs at least {minimum} children"
                v.append(Violation(name, "min-children", what))
            if ntype.kind == "vot":
                if ntype.k is None or not 1 <= ntype.k <= len(kids):
                    v.append(Violation(name, "vot-threshold",
                                       f"k exceeds child count (k={ntype.k}, n={len(kids)})"))
            if ntype.kind == "pdep":
                if ntype.p is None or not 0.0 < ntype.p <= 1.0:
                    v.append(Violation(name, "pdep-probability",
                                       f"dependency probability must lie in (0, 1], got {ntype.p}"))
                for dep in kids[1:]:
                    if dep in node_set and ft.types[dep].kind != "be":
                        v.append(Violation(name, "pdep-dependents",
                                           f"dependent event {dep!r} must be a basic event"))

    for name in sorted(_cycle_tainted_nodes(ft)):
        v.append(Violation(name, "acyclic", "children relation reaches a cycle"))

    return ValidationReport(tuple(v))


def is_static(ft: FaultTree) -> bool:
    """True iff the tree uses only BE/AND/OR/VOT nodes."""
    return all(ft.types[n].kind in STATIC_KINDS for n in ft.nodes)


def dynamic_nodes(ft: FaultTree) -> tuple[str, ...]:
    return tuple(n for n in ft.nodes if ft.types[n].is_dynamic)


def sub_tree(ft: FaultTree, root: str) -> FaultTree:
    """The fault tree induced by ``root`` and all of its descendants."""
    if root not in set(ft.nodes):
        raise InputError(f"unknown node {root!r}")
    members = ft.descendants(root)
    nodes = tuple(n for n in ft.nodes if n in members)
    return FaultTree(
        nodes=nodes,
        types={n: ft.types[n] for n in nodes},
        children={n: ft.children.get(n, ()) for n in nodes},
        top=root,
        distributions={n: d for n, d in ft.distributions.items() if n in members},
    )
