"""Translation of a static fault tree into a BDD.

Recursive bottom-up over the DAG: each distinct gate is translated once
(memoised by node name) and child results are combined left to right.
The voting gate uses the Shannon recursion
``VOT(k, c1..cn) = ite(c1, VOT(k-1, c2..cn), VOT(k, c2..cn))``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bdd import BddManager, BddRef
from .errors import InputError
from .model import FaultTree, is_static
from .ordering import VariableOrder


@dataclass(frozen=True)
class TranslationResult:
    root: BddRef
    manager: BddManager
    gate_refs: dict[str, BddRef] | None


def translate_vot(manager: BddManager, k: int, children: list[BddRef]) -> BddRef:
    """At-least-k-of-n over already translated children."""
    if not 0 <= k <= len(children):
        raise InputError(f"voting threshold {k} out of range for {len(children)} children")
    return _vot(manager, k, children, 0)


def _vot(manager: BddManager, k: int, children: list[BddRef], start: int) -> BddRef:
    if k == 0:
        return manager.true
    if k > len(children) - start:
        return manager.false
    head = children[start]
    return manager.ite(head,
                       _vot(manager, k - 1, children, start + 1),
                       _vot(manager, k, children, start + 1))


def translate(
    sft: FaultTree,
    order: VariableOrder | None = None,
    manager: BddManager | None = None,
    cache_gates: bool = False,
    kernel: str | None = None,
) -> TranslationResult:
    """Build the BDD of the failure function of a static fault tree.

    ``cache_gates`` keeps every gate's BDD reference in the result;
    otherwise a gate's memo entry is released once its last parent has
    consumed it and only the root survives.
    """
    if not is_static(sft):
        raise InputError("only static fault trees translate to a BDD; "
                         "modularise dynamic trees first")
    if order is None:
        from .ordering import dfs_order
        order = dfs_order(sft)
    if manager is None:
        manager = BddManager(order, kernel=kernel)

    memo: dict[str, BddRef] = {}
    kept: dict[str, BddRef] = {} if cache_gates else None
    remaining_uses = {
        name: max(1, len(sft.parents_of(name))) for name in sft.nodes
    }

    def result_for(name: str) -> BddRef:
        found = memo.get(name)
        if found is not None:
            remaining_uses[name] -= 1
            if remaining_uses[name] <= 0 and not cache_gates:
                del memo[name]
            return found
        ntype = sft.types[name]
        if ntype.kind == "be":
            ref = manager.var(name)
        else:
            kids = [result_for(c) for c in sft.children_of(name)]
            if ntype.kind == "and":
                ref = kids[0]
                for child in kids[1:]:
                    ref = manager.apply_and(ref, child)
            elif ntype.kind == "or":
                ref = kids[0]
                for child in kids[1:]:
                    ref = manager.apply_or(ref, child)
            elif ntype.kind == "vot":
                ref = translate_vot(manager, ntype.k, kids)
            else:  # pragma: no cover - guarded by is_static above
                raise InputError(f"gate kind {ntype.kind!r} is not static")
        if cache_gates and ntype.kind != "be":
            kept[name] = ref
        remaining_uses[name] -= 1
        if remaining_uses[name] > 0 or cache_gates:
            memo[name] = ref
        return ref

    root = result_for(sft.top)
    return TranslationResult(root=root, manager=manager, gate_refs=kept)
