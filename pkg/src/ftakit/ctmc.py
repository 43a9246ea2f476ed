"""Markov chain generation and transient analysis for dynamic fault trees.

The chain is built by exhaustively exploring BE failures from the
all-operational state.  A state records which BEs have failed, the sticky
status of every priority gate, the child currently used by every spare,
and which nodes are activated.  States whose root has failed are
absorbing.

Failure of one BE is an atomic step.  Within the step, functional
dependencies fire (branching over outcome combinations for p < 1),
spares claim replacements in increasing node-index order, activation
propagates into newly claimed subtrees, and gates re-evaluate bottom-up;
the loop runs to a fixpoint so cascades triggered by gate failures are
resolved inside the same step.  Every BE failure collected during one
step counts as simultaneous for the priority gates' order check.
Successor states violating a sequence enforcer are not generated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np
import scipy.sparse as sp

from .curves import TimeCurve
from .errors import AnalysisError, InputError, StateCapExceeded
from .model import Exponential, FaultTree, validate

PENDING = 0
FAILED = 1
FAILSAFE = 2

SPARE_DEAD = -1

DEFAULT_STATE_CAP = 10**6
DEFAULT_POISSON_TAIL = 1e-10


@dataclass(frozen=True)
class DftState:
    """One exploration state (read back from :class:`Ctmc` for debugging)."""

    failed: frozenset[str]
    gate_status: tuple[tuple[str, int], ...]
    spare_using: tuple[tuple[str, str | None], ...]
    active: frozenset[str]


@dataclass(frozen=True, eq=False)
class Ctmc:
    """Absorbing continuous-time Markov chain with sparse rates."""

    num_states: int
    initial: int
    failed: np.ndarray          # bool per state
    src: np.ndarray
    tgt: np.ndarray
    rate: np.ndarray
    states: tuple              # raw state tuples, for dumps and tests
    tree: FaultTree

    def exit_rates(self) -> np.ndarray:
        out = np.zeros(self.num_states)
        np.add.at(out, self.src, self.rate)
        return out


class _Semantics:
    """Per-tree structure tables shared by every state update."""

    def __init__(self, ft: FaultTree):
        self.ft = ft
        self.nodes = ft.nodes
        self.n = len(ft.nodes)
        self.kind = [ft.types[n].kind for n in ft.nodes]
        self.children_idx = [
            tuple(ft.index_of(c) for c in ft.children_of(n)) for n in ft.nodes
        ]
        self.top = ft.index_of(ft.top)
        self.be_indices = [i for i, k in enumerate(self.kind) if k == "be"]
        self.rates = {}
        self.dormancies = {}
        for i in self.be_indices:
            dist = ft.distributions[self.nodes[i]]
            if not isinstance(dist, Exponential):
                raise InputError(
                    f"Markov analysis needs exponential basic events; "
                    f"{self.nodes[i]!r} is not")
            self.rates[i] = dist.rate
            self.dormancies[i] = dist.dormancy
        self.priority = [i for i, k in enumerate(self.kind) if k in ("pand", "por")]
        self.priority_slot = {g: s for s, g in enumerate(self.priority)}
        self.spares = [i for i, k in enumerate(self.kind) if k == "spare"]
        self.spare_slot = {g: s for s, g in enumerate(self.spares)}
        self.pdeps = [
            (i, self.children_idx[i][0], self.children_idx[i][1:], ft.types[self.nodes[i]].p)
            for i, k in enumerate(self.kind) if k == "pdep"
        ]
        self.seqs = [self.children_idx[i] for i, k in enumerate(self.kind) if k == "seq"]
        self.topo = self._topo_order()

    def _topo_order(self) -> list[int]:
        """All nodes, children strictly before parents."""
        remaining = [len(self.children_idx[i]) for i in range(self.n)]
        parents: list[list[int]] = [[] for _ in range(self.n)]
        for i in range(self.n):
            for c in self.children_idx[i]:
                parents[c].append(i)
        ready = sorted(i for i in range(self.n) if remaining[i] == 0)
        order: list[int] = []
        queue = list(ready)
        while queue:
            node = queue.pop(0)
            order.append(node)
            for p in parents[node]:
                remaining[p] -= 1
                if remaining[p] == 0:
                    queue.append(p)
        if len(order) != self.n:
            raise InputError("fault tree contains a cycle")
        return order

    # -- state helpers ---------------------------------------------------

    def initial_state(self) -> tuple:
        failed = 0
        flags = tuple(PENDING for _ in self.priority)
        using = tuple(0 for _ in self.spares)
        active = self._activate(0, self.top, using)
        return (failed, flags, using, active)

    def _activate(self, active: int, start: int, using: Sequence[int]) -> int:
        """Propagate activation from ``start``; spares activate only their
        used child, constraint nodes (pdep/seq) do not propagate."""
        stack = [start]
        while stack:
            node = stack.pop()
            bit = 1 << node
            if active & bit:
                continue
            active |= bit
            kind = self.kind[node]
            if kind == "spare":
                slot = self.spare_slot[node]
                use = using[slot]
                if use >= 0:
                    stack.append(self.children_idx[node][use])
            elif kind in ("pdep", "seq"):
                continue
            else:
                stack.extend(self.children_idx[node])
        return active

    def evaluate(self, failed: int, pre_flags: tuple, using: tuple):
        """Bottom-up node statuses plus the post-step priority flags.

        ``pre_flags`` are the sticky statuses from the previous complete
        state, so every BE failure of the current atomic step counts as
        simultaneous for the order checks.
        """
        status = [False] * self.n
        new_flags = list(pre_flags)
        for node in self.topo:
            kind = self.kind[node]
            if kind == "be":
                status[node] = bool(failed & (1 << node))
            elif kind == "and":
                status[node] = all(status[c] for c in self.children_idx[node])
            elif kind == "or":
                status[node] = any(status[c] for c in self.children_idx[node])
            elif kind == "vot":
                k = self.ft.types[self.nodes[node]].k
                status[node] = sum(status[c] for c in self.children_idx[node]) >= k
            elif kind == "pand":
                slot = self.priority_slot[node]
                flag = pre_flags[slot]
                if flag == PENDING:
                    kids = self.children_idx[node]
                    stats = [status[c] for c in kids]
                    prefix = 0
                    while prefix < len(stats) and stats[prefix]:
                        prefix += 1
                    if any(stats[prefix:]):
                        flag = FAILSAFE
                    elif prefix == len(stats):
                        flag = FAILED
                new_flags[slot] = flag
                status[node] = flag == FAILED
            elif kind == "por":
                slot = self.priority_slot[node]
                flag = pre_flags[slot]
                if flag == PENDING:
                    kids = self.children_idx[node]
                    if status[kids[0]]:
                        flag = FAILED
                    elif any(status[c] for c in kids[1:]):
                        flag = FAILSAFE
                new_flags[slot] = flag
                status[node] = flag == FAILED
            elif kind == "spare":
                status[node] = using[self.spare_slot[node]] == SPARE_DEAD
            else:  # pdep, seq: constraint nodes never fail themselves
                status[node] = False
        return status, tuple(new_flags)

    def seq_respected(self, status: list[bool]) -> bool:
        """Failed children of every SEQ must form a left prefix."""
        for kids in self.seqs:
            seen_operational = False
            for c in kids:
                if status[c]:
                    if seen_operational:
                        return False
                else:
                    seen_operational = True
        return True

    # -- atomic transition -----------------------------------------------

    def successors(self, state: tuple, be: int) -> list[tuple[tuple, float]]:
        """All weighted successor states for the failure of ``be``.

        Weights sum to at most 1; probabilistic dependencies split the
        transition, sequence violations drop branches.
        """
        failed0, flags0, using0, active0 = state
        pre_status, _ = self.evaluate(failed0, flags0, using0)
        fired0 = frozenset(
            idx for idx, (_, trig, _, _) in enumerate(self.pdeps)
            if pre_status[trig]
        )
        work = [(failed0 | (1 << be), using0, active0, fired0, 1.0)]
        done: dict[tuple, float] = {}

        while work:
            failed, using, active, fired, weight = work.pop()
            changed = True
            branched = False
            while changed and not branched:
                changed = False
                status, flags = self.evaluate(failed, flags0, using)

                # fire functional dependencies whose trigger now holds
                for idx, (_, trig, deps, p) in enumerate(self.pdeps):
                    if idx in fired or not status[trig]:
                        continue
                    fired = fired | {idx}
                    pending = [d for d in deps if not failed & (1 << d)]
                    if not pending:
                        changed = True
                        continue
                    if p >= 1.0:
                        for d in pending:
                            failed |= 1 << d
                        changed = True
                        continue
                    # split into one branch per outcome combination
                    for combo in range(1 << len(pending)):
                        extra = 0
                        prob = 1.0
                        for j, d in enumerate(pending):
                            if combo & (1 << j):
                                extra |= 1 << d
                                prob *= p
                            else:
                                prob *= 1.0 - p
                        work.append((failed | extra, using, active, fired,
                                     weight * prob))
                    branched = True
                    break
                if branched:
                    break

                # spare claiming, in increasing node index across spares
                claimed = {
                    self.children_idx[g][using[self.spare_slot[g]]]
                    for g in self.spares
                    if using[self.spare_slot[g]] >= 0
                }
                using_list = list(using)
                for g in self.spares:
                    slot = self.spare_slot[g]
                    use = using_list[slot]
                    if use == SPARE_DEAD or not status[self.children_idx[g][use]]:
                        continue
                    candidate = SPARE_DEAD
                    for pos, child in enumerate(self.children_idx[g]):
                        if child in claimed or status[child]:
                            continue
                        candidate = pos
                        break
                    claimed.discard(self.children_idx[g][use])
                    using_list[slot] = candidate
                    changed = True
                    if candidate != SPARE_DEAD:
                        child = self.children_idx[g][candidate]
                        claimed.add(child)
                        if active & (1 << g):
                            active = self._activate(active, child, using_list)
                using = tuple(using_list)

            if branched:
                continue
            status, flags = self.evaluate(failed, flags0, using)
            if not self.seq_respected(status):
                continue
            key = (failed, flags, using, active)
            done[key] = done.get(key, 0.0) + weight
        return list(done.items())

    def rate_of(self, state: tuple, be: int) -> float:
        _, _, _, active = state
        lam = self.rates[be]
        if active & (1 << be):
            return lam
        return lam * self.dormancies[be]

    def describe(self, state: tuple) -> DftState:
        failed, flags, using, active = state
        return DftState(
            failed=frozenset(self.nodes[i] for i in self.be_indices
                             if failed & (1 << i)),
            gate_status=tuple((self.nodes[g], flags[s])
                              for s, g in enumerate(self.priority)),
            spare_using=tuple(
                (self.nodes[g],
                 None if using[s] == SPARE_DEAD
                 else self.nodes[self.children_idx[g][using[s]]])
                for s, g in enumerate(self.spares)),
            active=frozenset(self.nodes[i] for i in self.be_indices
                             if active & (1 << i)),
        )


def build_ctmc(module: FaultTree, state_cap: int = DEFAULT_STATE_CAP) -> Ctmc:
    """Exhaustive breadth-first exploration of all BE failure sequences."""
    report = validate(module)
    report.raise_if_failed()
    sem = _Semantics(module)

    init = sem.initial_state()
    index: dict[tuple, int] = {init: 0}
    states: list[tuple] = [init]
    failed_flags: list[bool] = []
    status, _ = sem.evaluate(init[0], init[1], init[2])
    failed_flags.append(status[sem.top])

    src: list[int] = []
    tgt: list[int] = []
    rate: list[float] = []
    frontier = [0]
    while frontier:
        next_frontier: list[int] = []
        for si in frontier:
            if failed_flags[si]:
                continue  # absorbing
            state = states[si]
            failed_mask = state[0]
            for be in sem.be_indices:
                if failed_mask & (1 << be):
                    continue
                r = sem.rate_of(state, be)
                if r <= 0.0:
                    continue
                for succ, weight in sem.successors(state, be):
                    tj = index.get(succ)
                    if tj is None:
                        if len(states) >= state_cap:
                            raise StateCapExceeded(
                                f"state space exceeds the cap of {state_cap}")
                        tj = len(states)
                        index[succ] = tj
                        states.append(succ)
                        st, _ = sem.evaluate(succ[0], succ[1], succ[2])
                        failed_flags.append(st[sem.top])
                        next_frontier.append(tj)
                    src.append(si)
                    tgt.append(tj)
                    rate.append(r * weight)
        frontier = next_frontier

    return Ctmc(
        num_states=len(states),
        initial=0,
        failed=np.asarray(failed_flags, dtype=bool),
        src=np.asarray(src, dtype=np.int64),
        tgt=np.asarray(tgt, dtype=np.int64),
        rate=np.asarray(rate, dtype=np.float64),
        states=tuple(states),
        tree=module,
    )


def _poisson_weights(m: float, k_max: int) -> np.ndarray:
    """Poisson(m) pmf for k = 0..k_max via the stable mode-anchored recursion."""
    w = np.zeros(k_max + 1)
    if m <= 0.0:
        w[0] = 1.0
        return w
    mode = min(int(m), k_max)
    w[mode] = math.exp(-m + mode * math.log(m) - math.lgamma(mode + 1))
    for k in range(mode + 1, k_max + 1):
        w[k] = w[k - 1] * m / k
    for k in range(mode - 1, -1, -1):
        w[k] = w[k + 1] * (k + 1) / m
    return w


def _truncation_window(w: np.ndarray, tail: float) -> tuple[int, int]:
    """Left/right indices keeping all but ``tail`` of the mass."""
    cum = np.cumsum(w)
    lo = int(np.searchsorted(cum, tail / 2.0))
    remaining = cum[-1] - cum
    hi = len(w) - 1
    while hi > 0 and remaining[hi - 1] <= tail / 2.0:
        hi -= 1
    return lo, hi


def transient_failure_prob(
    ctmc: Ctmc,
    times: Sequence[float] | np.ndarray,
    tail: float = DEFAULT_POISSON_TAIL,
) -> TimeCurve:
    """Failure probability at each time bound, via uniformization.

    The uniformization rate is the exact maximum exit rate; Poisson
    weights are truncated so the neglected mass stays below ``tail``.
    """
    times = np.asarray(times, dtype=np.float64)
    if times.size == 0:
        raise InputError("at least one time point is required")
    if np.any(times < 0) or np.any(np.diff(times) <= 0):
        raise InputError("times must be nonnegative and strictly increasing")
    if ctmc.num_states == 0:
        raise AnalysisError("empty Markov chain")

    exit_rates = ctmc.exit_rates()
    lam = float(exit_rates.max()) if len(exit_rates) else 0.0
    if lam <= 0.0:
        value = 1.0 if ctmc.failed[ctmc.initial] else 0.0
        return TimeCurve(times=times, values=np.full(len(times), value))

    n = ctmc.num_states
    # uniformized one-step matrix, transposed for row-vector iteration
    prob = ctmc.rate / lam
    stay = 1.0 - exit_rates / lam
    p_t = sp.coo_matrix(
        (np.concatenate([prob, stay]),
         (np.concatenate([ctmc.tgt, np.arange(n)]),
          np.concatenate([ctmc.src, np.arange(n)]))),
        shape=(n, n),
    ).tocsr()

    m_max = lam * float(times[-1])
    k_max = int(math.ceil(m_max + 12.0 * math.sqrt(m_max + 1.0) + 20.0))

    pi = np.zeros(n)
    pi[ctmc.initial] = 1.0
    failed_mass = np.empty(k_max + 1)
    failed_mass[0] = pi[ctmc.failed].sum()
    for k in range(1, k_max + 1):
        pi = p_t @ pi
        failed_mass[k] = pi[ctmc.failed].sum()

    values = np.empty(len(times))
    for i, t in enumerate(times):
        w = _poisson_weights(lam * t, k_max)
        lo, hi = _truncation_window(w, tail)
        values[i] = float(np.dot(w[lo:hi + 1], failed_mass[lo:hi + 1]))
    values = np.maximum.accumulate(np.clip(values, 0.0, 1.0))
    return TimeCurve(times=times, values=values)


def write_ctmc(ctmc: Ctmc, out: IO[str]) -> None:
    """Dump format: '# state' annotation lines, then 'src tgt rate' lines."""
    sem = _Semantics(ctmc.tree)
    for i, state in enumerate(ctmc.states):
        desc = sem.describe(state)
        mark = " FAILED" if ctmc.failed[i] else ""
        failed = ",".join(sorted(desc.failed)) or "-"
        out.write(f"# state {i}{mark} failed_bes={failed}\n")
    for s, t, r in zip(ctmc.src, ctmc.tgt, ctmc.rate):
        out.write(f"{s} {t} {r!r}\n")
