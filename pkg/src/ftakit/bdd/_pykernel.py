"""Pure-Python BDD kernel.

Reduced ordered BDD node store over integer handles.  Handle 0 is the
0-terminal, handle 1 the 1-terminal; internal nodes get increasing
indices.  The unique table guarantees one node per (level, low, high)
triple, which makes structural equality an integer comparison.

This module mirrors the compiled kernel in ``_core.pyx``; both implement
identical recursions so they allocate identical handles for identical
call sequences.  Keep them in sync.
"""

from __future__ import annotations

import sys

import numpy as np

FALSE = 0
TRUE = 1

_OP_AND = 1
_OP_OR = 2
_OP_WITHOUT = 3
_OP_NOT = 4
_OP_MINSOL = 5
_OP_RESTRICT0 = 6
_OP_RESTRICT1 = 7


class PyKernel:
    """Node store plus the recursive operators (see module docstring)."""

    compiled = False

    def __init__(self, num_vars: int):
        if num_vars < 0:
            raise ValueError("number of variables must be nonnegative")
        self.num_vars = num_vars
        # terminals carry the out-of-range level num_vars so that every
        # internal level compares strictly smaller
        self._level = [num_vars, num_vars]
        self._low = [-1, -1]
        self._high = [-1, -1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._cache: dict[tuple[int, int, int], int] = {}
        # recursion depth scales with the variable count, not the node count
        room = 6 * num_vars + 2000
        if sys.getrecursionlimit() < room:
            sys.setrecursionlimit(room)

    # -- node store ---------------------------------------------------

    def size(self) -> int:
        """Total allocated nodes, terminals included."""
        return len(self._level)

    def level_of(self, f: int) -> int:
        return self._level[f]

    def low_of(self, f: int) -> int:
        return self._low[f]

    def high_of(self, f: int) -> int:
        return self._high[f]

    def is_terminal(self, f: int) -> bool:
        return f < 2

    def mk(self, level: int, low: int, high: int) -> int:
        if high == low:
            return low
        key = (level, low, high)
        found = self._unique.get(key)
        if found is not None:
            return found
        idx = len(self._level)
        self._level.append(level)
        self._low.append(low)
        self._high.append(high)
        self._unique[key] = idx
        return idx

    def var_node(self, level: int) -> int:
        if not 0 <= level < self.num_vars:
            raise ValueError(f"variable level {level} out of range")
        return self.mk(level, FALSE, TRUE)

    # -- Boolean combinators -------------------------------------------

    def apply_and(self, f: int, g: int) -> int:
        if f == g:
            return f
        if f == FALSE or g == FALSE:
            return FALSE
        if f == TRUE:
            return g
        if g == TRUE:
            return f
        if f > g:
            f, g = g, f
        key = (_OP_AND, f, g)
        found = self._cache.get(key)
        if found is not None:
            return found
        lf, lg = self._level[f], self._level[g]
        top = lf if lf < lg else lg
        f0, f1 = (self._low[f], self._high[f]) if lf == top else (f, f)
        g0, g1 = (self._low[g], self._high[g]) if lg == top else (g, g)
        out = self.mk(top, self.apply_and(f0, g0), self.apply_and(f1, g1))
        self._cache[key] = out
        return out

    def apply_or(self, f: int, g: int) -> int:
        if f == g:
            return f
        if f == TRUE or g == TRUE:
            return TRUE
        if f == FALSE:
            return g
        if g == FALSE:
            return f
        if f > g:
            f, g = g, f
        key = (_OP_OR, f, g)
        found = self._cache.get(key)
        if found is not None:
            return found
        lf, lg = self._level[f], self._level[g]
        top = lf if lf < lg else lg
        f0, f1 = (self._low[f], self._high[f]) if lf == top else (f, f)
        g0, g1 = (self._low[g], self._high[g]) if lg == top else (g, g)
        out = self.mk(top, self.apply_or(f0, g0), self.apply_or(f1, g1))
        self._cache[key] = out
        return out

    def apply_not(self, f: int) -> int:
        if f == FALSE:
            return TRUE
        if f == TRUE:
            return FALSE
        key = (_OP_NOT, f, 0)
        found = self._cache.get(key)
        if found is not None:
            return found
        out = self.mk(self._level[f],
                      self.apply_not(self._low[f]),
                      self.apply_not(self._high[f]))
        self._cache[key] = out
        return out

    def ite(self, f: int, g: int, h: int) -> int:
        # composite form keeps every cache two-operand
        return self.apply_or(self.apply_and(f, g),
                             self.apply_and(self.apply_not(f), h))

    def restrict(self, f: int, level: int, value: int) -> int:
        if not 0 <= level < self.num_vars:
            raise ValueError(f"variable level {level} out of range")
        if value not in (0, 1):
            raise ValueError("restriction value must be 0 or 1")
        return self._restrict(f, level, value)

    def _restrict(self, f: int, level: int, value: int) -> int:
        if f < 2:
            return f
        lf = self._level[f]
        if lf > level:
            return f
        if lf == level:
            return self._high[f] if value else self._low[f]
        key = (_OP_RESTRICT1 if value else _OP_RESTRICT0, f, level)
        found = self._cache.get(key)
        if found is not None:
            return found
        out = self.mk(lf,
                      self._restrict(self._low[f], level, value),
                      self._restrict(self._high[f], level, value))
        self._cache[key] = out
        return out

    # -- minimal-solution operators -------------------------------------

    def _has_empty_solution(self, g: int) -> bool:
        # the all-low path reaches the 1-terminal iff {} is a solution
        while g >= 2:
            g = self._low[g]
        return g == TRUE

    def without(self, f: int, g: int) -> int:
        """Drop the solutions of ``f`` subsumed by some solution of ``g``.

        A path-solution sigma of ``f`` survives iff no path-solution tau of
        ``g`` satisfies tau <= sigma (variables reached over 1-edges).
        """
        if g == FALSE:
            return f
        if g == TRUE:
            return FALSE
        if f == FALSE:
            return FALSE
        if f == g:
            return FALSE
        if f == TRUE:
            return FALSE if self._has_empty_solution(g) else TRUE
        key = (_OP_WITHOUT, f, g)
        found = self._cache.get(key)
        if found is not None:
            return found
        lf, lg = self._level[f], self._level[g]
        if lf == lg:
            low = self.without(self._low[f], self._low[g])
            high = self.without(self.without(self._high[f], self._high[g]),
                                self._low[g])
            out = self.mk(lf, low, high)
        elif lf < lg:
            out = self.mk(lf,
                          self.without(self._low[f], g),
                          self.without(self._high[f], g))
        else:
            # g's top variable cannot occur in f's solutions here, so only
            # g-solutions avoiding it can subsume anything
            out = self.without(f, self._low[g])
        self._cache[key] = out
        return out

    def minsol(self, f: int) -> int:
        """BDD whose path-solutions are exactly the minimal solutions of ``f``."""
        if f < 2:
            return f
        key = (_OP_MINSOL, f, 0)
        found = self._cache.get(key)
        if found is not None:
            return found
        low = self.minsol(self._low[f])
        high = self.without(self.minsol(self._high[f]), low)
        out = self.mk(self._level[f], low, high)
        self._cache[key] = out
        return out

    # -- traversal helpers ----------------------------------------------

    def reachable(self, f: int) -> list[int]:
        """Reachable nodes in children-first order, terminals excluded."""
        if f < 2:
            return []
        seen = {FALSE, TRUE}
        order: list[int] = []
        stack: list[tuple[int, bool]] = [(f, False)]
        while stack:
            node, expanded = stack.pop()
            if node in seen:
                continue
            if expanded:
                seen.add(node)
                order.append(node)
            else:
                stack.append((node, True))
                stack.append((self._high[node], False))
                stack.append((self._low[node], False))
        return order

    def internal_node_count(self, f: int) -> int:
        return len(self.reachable(f))

    def evaluate(self, f: int, assignment) -> bool:
        """Evaluate at a full assignment (indexable by level, truthy = 1)."""
        while f >= 2:
            f = self._high[f] if assignment[self._level[f]] else self._low[f]
        return f == TRUE

    # -- probability evaluation ------------------------------------------

    def probability(self, f: int, probs) -> float:
        """Bottom-up Shannon evaluation; ``probs[level]`` is P[var fails]."""
        if f == FALSE:
            return 0.0
        if f == TRUE:
            return 1.0
        value = {FALSE: 0.0, TRUE: 1.0}
        for node in self.reachable(f):
            p = probs[self._level[node]]
            value[node] = p * value[self._high[node]] + (1.0 - p) * value[self._low[node]]
        return value[f]

    def probability_chunk(self, f: int, probs: np.ndarray) -> np.ndarray:
        """Vectorised evaluation; ``probs`` has shape (num_vars, n_times)."""
        n = probs.shape[1]
        if f == FALSE:
            return np.zeros(n)
        if f == TRUE:
            return np.ones(n)
        value: dict[int, np.ndarray] = {
            FALSE: np.zeros(n),
            TRUE: np.ones(n),
        }
        for node in self.reachable(f):
            p = probs[self._level[node]]
            value[node] = p * value[self._high[node]] + (1.0 - p) * value[self._low[node]]
        return value[f]
