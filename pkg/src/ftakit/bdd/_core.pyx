# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled BDD kernel.

Mirror of ``_pykernel.PyKernel`` with C-level recursion and hash tables.
Node handles, recursion structure and allocation order are identical to
the pure-Python kernel; keep both in sync.

Capacity: at most 2**26 nodes and 2**12 variables (table keys are packed
into 64-bit integers).
"""

from cython.operator cimport dereference
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map

import numpy as np

ctypedef unsigned long long u64
ctypedef long long i64

cdef enum:
    FALSE = 0
    TRUE = 1

cdef enum:
    OP_AND = 1
    OP_OR = 2
    OP_WITHOUT = 3
    OP_NOT = 4
    OP_MINSOL = 5
    OP_RESTRICT0 = 6
    OP_RESTRICT1 = 7

cdef enum:
    MAX_NODES = 67108864        # 2**26
    MAX_VARS = 4096             # 2**12


cdef inline u64 _node_key(u64 level, u64 low, u64 high) noexcept:
    return (level << 52) | (low << 26) | high


cdef inline u64 _op_key(u64 op, u64 a, u64 b) noexcept:
    return (op << 58) | (a << 29) | b


cdef class Kernel:
    """Node store plus the recursive operators (see _pykernel)."""

    cdef vector[int] level_
    cdef vector[int] low_
    cdef vector[int] high_
    cdef unordered_map[u64, int] unique_
    cdef unordered_map[u64, int] cache_
    cdef readonly int num_vars

    @property
    def compiled(self):
        return True

    def __cinit__(self, int num_vars):
        if num_vars < 0:
            raise ValueError("number of variables must be nonnegative")
        if num_vars >= MAX_VARS:
            raise ValueError(f"compiled kernel supports at most {MAX_VARS - 1} variables")
        self.num_vars = num_vars
        self.level_.push_back(num_vars)
        self.level_.push_back(num_vars)
        self.low_.push_back(-1)
        self.low_.push_back(-1)
        self.high_.push_back(-1)
        self.high_.push_back(-1)

    # -- node store ---------------------------------------------------

    def size(self):
        return <i64>self.level_.size()

    def level_of(self, int f):
        return self.level_[f]

    def low_of(self, int f):
        return self.low_[f]

    def high_of(self, int f):
        return self.high_[f]

    def is_terminal(self, int f):
        return f < 2

    cdef int _mk(self, int level, int low, int high) except -1:
        if high == low:
            return low
        cdef u64 key = _node_key(<u64>level, <u64>low, <u64>high)
        it = self.unique_.find(key)
        if it != self.unique_.end():
            return dereference(it).second
        cdef int idx = <int>self.level_.size()
        if idx >= MAX_NODES:
            raise MemoryError(f"BDD exceeds the kernel capacity of {MAX_NODES} nodes")
        self.level_.push_back(level)
        self.low_.push_back(low)
        self.high_.push_back(high)
        self.unique_[key] = idx
        return idx

    def mk(self, int level, int low, int high):
        return self._mk(level, low, high)

    def var_node(self, int level):
        if not 0 <= level < self.num_vars:
            raise ValueError(f"variable level {level} out of range")
        return self._mk(level, FALSE, TRUE)

    # -- Boolean combinators -------------------------------------------

    cdef int _and(self, int f, int g) except -1:
        if f == g:
            return f
        if f == FALSE or g == FALSE:
            return FALSE
        if f == TRUE:
            return g
        if g == TRUE:
            return f
        cdef int t
        if f > g:
            t = f; f = g; g = t
        cdef u64 key = _op_key(OP_AND, <u64>f, <u64>g)
        it = self.cache_.find(key)
        if it != self.cache_.end():
            return dereference(it).second
        cdef int lf = self.level_[f]
        cdef int lg = self.level_[g]
        cdef int top = lf if lf < lg else lg
        cdef int f0, f1, g0, g1
        if lf == top:
            f0 = self.low_[f]; f1 = self.high_[f]
        else:
            f0 = f; f1 = f
        if lg == top:
            g0 = self.low_[g]; g1 = self.high_[g]
        else:
            g0 = g; g1 = g
        cdef int out = self._mk(top, self._and(f0, g0), self._and(f1, g1))
        self.cache_[key] = out
        return out

    cdef int _or(self, int f, int g) except -1:
        if f == g:
            return f
        if f == TRUE or g == TRUE:
            return TRUE
        if f == FALSE:
            return g
        if g == FALSE:
            return f
        cdef int t
        if f > g:
            t = f; f = g; g = t
        cdef u64 key = _op_key(OP_OR, <u64>f, <u64>g)
        it = self.cache_.find(key)
        if it != self.cache_.end():
            return dereference(it).second
        cdef int lf = self.level_[f]
        cdef int lg = self.level_[g]
        cdef int top = lf if lf < lg else lg
        cdef int f0, f1, g0, g1
        if lf == top:
            f0 = self.low_[f]; f1 = self.high_[f]
        else:
            f0 = f; f1 = f
        if lg == top:
            g0 = self.low_[g]; g1 = self.high_[g]
        else:
            g0 = g; g1 = g
        cdef int out = self._mk(top, self._or(f0, g0), self._or(f1, g1))
        self.cache_[key] = out
        return out

    cdef int _not(self, int f) except -1:
        if f == FALSE:
            return TRUE
        if f == TRUE:
            return FALSE
        cdef u64 key = _op_key(OP_NOT, <u64>f, 0)
        it = self.cache_.find(key)
        if it != self.cache_.end():
            return dereference(it).second
        cdef int out = self._mk(self.level_[f], self._not(self.low_[f]),
                                self._not(self.high_[f]))
        self.cache_[key] = out
        return out

    def apply_and(self, int f, int g):
        return self._and(f, g)

    def apply_or(self, int f, int g):
        return self._or(f, g)

    def apply_not(self, int f):
        return self._not(f)

    def ite(self, int f, int g, int h):
        return self._or(self._and(f, g), self._and(self._not(f), h))

    cdef int _restrict(self, int f, int level, int value) except -1:
        if f < 2:
            return f
        cdef int lf = self.level_[f]
        if lf > level:
            return f
        if lf == level:
            return self.high_[f] if value else self.low_[f]
        cdef u64 key = _op_key(OP_RESTRICT1 if value else OP_RESTRICT0,
                               <u64>f, <u64>level)
        it = self.cache_.find(key)
        if it != self.cache_.end():
            return dereference(it).second
        cdef int out = self._mk(lf, self._restrict(self.low_[f], level, value),
                                self._restrict(self.high_[f], level, value))
        self.cache_[key] = out
        return out

    def restrict(self, int f, int level, int value):
        if not 0 <= level < self.num_vars:
            raise ValueError(f"variable level {level} out of range")
        if value not in (0, 1):
            raise ValueError("restriction value must be 0 or 1")
        return self._restrict(f, level, value)

    # -- minimal-solution operators -------------------------------------

    cdef bint _has_empty_solution(self, int g) noexcept:
        while g >= 2:
            g = self.low_[g]
        return g == TRUE

    cdef int _without(self, int f, int g) except -1:
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
        cdef u64 key = _op_key(OP_WITHOUT, <u64>f, <u64>g)
        it = self.cache_.find(key)
        if it != self.cache_.end():
            return dereference(it).second
        cdef int lf = self.level_[f]
        cdef int lg = self.level_[g]
        cdef int out, low, high
        if lf == lg:
            low = self._without(self.low_[f], self.low_[g])
            high = self._without(self._without(self.high_[f], self.high_[g]),
                                 self.low_[g])
            out = self._mk(lf, low, high)
        elif lf < lg:
            out = self._mk(lf, self._without(self.low_[f], g),
                           self._without(self.high_[f], g))
        else:
            out = self._without(f, self.low_[g])
        self.cache_[key] = out
        return out

    def without(self, int f, int g):
        return self._without(f, g)

    cdef int _minsol(self, int f) except -1:
        if f < 2:
            return f
        cdef u64 key = _op_key(OP_MINSOL, <u64>f, 0)
        it = self.cache_.find(key)
        if it != self.cache_.end():
            return dereference(it).second
        cdef int low = self._minsol(self.low_[f])
        cdef int high = self._without(self._minsol(self.high_[f]), low)
        cdef int out = self._mk(self.level_[f], low, high)
        self.cache_[key] = out
        return out

    def minsol(self, int f):
        return self._minsol(f)

    # -- traversal helpers ----------------------------------------------

    cdef vector[int] _topo(self, int f):
        """Reachable internal nodes, children before parents."""
        cdef vector[int] order
        cdef vector[int] stack
        cdef vector[char] state  # 0 unvisited, 1 expanded, 2 done
        if f < 2:
            return order
        state.resize(self.level_.size(), 0)
        state[FALSE] = 2
        state[TRUE] = 2
        stack.push_back(f)
        cdef int node
        while stack.size() > 0:
            node = stack.back()
            if state[node] == 2:
                stack.pop_back()
            elif state[node] == 1:
                state[node] = 2
                order.push_back(node)
                stack.pop_back()
            else:
                state[node] = 1
                if state[self.high_[node]] == 0:
                    stack.push_back(self.high_[node])
                if state[self.low_[node]] == 0:
                    stack.push_back(self.low_[node])
        return order

    def reachable(self, int f):
        cdef vector[int] order = self._topo(f)
        return [order[i] for i in range(<i64>order.size())]

    def internal_node_count(self, int f):
        cdef vector[int] order = self._topo(f)
        return <i64>order.size()

    def evaluate(self, int f, assignment):
        while f >= 2:
            f = self.high_[f] if assignment[self.level_[f]] else self.low_[f]
        return f == TRUE

    # -- probability evaluation ------------------------------------------

    def probability(self, int f, probs):
        if f == FALSE:
            return 0.0
        if f == TRUE:
            return 1.0
        cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
        cdef vector[int] order = self._topo(f)
        cdef vector[int] slot
        slot.resize(self.level_.size(), -1)
        slot[FALSE] = 0
        slot[TRUE] = 1
        cdef vector[double] val
        val.resize(order.size() + 2)
        val[0] = 0.0
        val[1] = 1.0
        cdef size_t k
        cdef int node, s
        cdef double pv
        for k in range(order.size()):
            node = order[k]
            s = <int>k + 2
            slot[node] = s
            pv = p[self.level_[node]]
            val[s] = pv * val[slot[self.high_[node]]] + (1.0 - pv) * val[slot[self.low_[node]]]
        return val[slot[f]]

    def probability_chunk(self, int f, probs):
        arr = np.ascontiguousarray(probs, dtype=np.float64)
        cdef Py_ssize_t n = arr.shape[1]
        if f == FALSE:
            return np.zeros(n)
        if f == TRUE:
            return np.ones(n)
        cdef double[:, ::1] p = arr
        cdef vector[int] order = self._topo(f)
        out = np.empty((order.size() + 2, n), dtype=np.float64)
        cdef double[:, ::1] val = out
        cdef vector[int] slot
        slot.resize(self.level_.size(), -1)
        slot[FALSE] = 0
        slot[TRUE] = 1
        cdef Py_ssize_t i
        for i in range(n):
            val[0, i] = 0.0
            val[1, i] = 1.0
        cdef size_t k
        cdef int node, s, lo, hi, lv
        cdef double pv
        for k in range(order.size()):
            node = order[k]
            s = <int>k + 2
            slot[node] = s
            lo = slot[self.low_[node]]
            hi = slot[self.high_[node]]
            lv = self.level_[node]
            for i in range(n):
                pv = p[lv, i]
                val[s, i] = pv * val[hi, i] + (1.0 - pv) * val[lo, i]
        return np.asarray(out[slot[f]]).copy()
