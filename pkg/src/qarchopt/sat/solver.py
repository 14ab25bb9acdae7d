"""Array-based CDCL SAT solver with assumption-style incremental solving.

The solver keeps its entire state (clause arena, watch chains, trail,
activity heap) in flat numpy arrays so the search kernel can be JIT-compiled
with numba.  Learned clauses persist across `solve()` calls, which gives
MiniSat-style incremental solving: retractable bounds are passed as
assumption literals instead of being asserted permanently.

Literal convention: variable v >= 0, positive literal 2*v, negative 2*v+1.
"""

from __future__ import annotations

import time

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


class SolverTimeout(Exception):
    """Raised when a solve call exceeds its wall-clock budget."""

    def __init__(self, elapsed_s: float):
        super().__init__(f"solver call exceeded budget after {elapsed_s:.1f}s")
        self.elapsed_s = elapsed_s


def pos(v: int) -> int:
    return 2 * v


def neg(v: int) -> int:
    return 2 * v + 1


def lit_var(lit: int) -> int:
    return lit >> 1


def lit_neg(lit: int) -> int:
    return lit ^ 1


# status codes returned by the search kernel
_SAT = 1
_UNSAT = 0          # conflict at decision level 0: formula unsatisfiable
_UNSAT_ASSUMPS = 2  # an assumption literal is falsified
_BUDGET = -1        # conflict budget exhausted, search state preserved
_GROW = -2          # clause arena is full, caller must grow it

# state[] slot indices
_ARENA_TOP = 0
_TRAIL_SIZE = 1
_QHEAD = 2
_DLEVEL = 3
_HEAP_SIZE = 4
_N_CONFLICTS = 5
_N_PROPS = 6
_N_DECISIONS = 7
_N_RESTARTS = 8
_N_LEARNED = 9
_REDUCE_LIMIT = 10
_N_REDUCTIONS = 11
_STATE_LEN = 12

_VAL_UNDEF = -1

# per-clause arena layout: [size, flags, next_watch0, next_watch1, lits...]
_HDR = 4


@njit(cache=True)
def _lit_value(lit, assigns):
    a = assigns[lit >> 1]
    if a < 0:
        return np.int8(-1)
    return np.int8(a ^ (lit & 1))


@njit(cache=True)
def _heap_swap(heap, heap_pos, i, j):
    vi = heap[i]
    vj = heap[j]
    heap[i] = vj
    heap[j] = vi
    heap_pos[vi] = j
    heap_pos[vj] = i


@njit(cache=True)
def _heap_sift_up(heap, heap_pos, activity, i):
    while i > 0:
        p = (i - 1) >> 1
        if activity[heap[i]] > activity[heap[p]]:
            _heap_swap(heap, heap_pos, i, p)
            i = p
        else:
            break


@njit(cache=True)
def _heap_sift_down(heap, heap_pos, activity, i, size):
    while True:
        l = 2 * i + 1
        if l >= size:
            break
        r = l + 1
        c = l
        if r < size and activity[heap[r]] > activity[heap[l]]:
            c = r
        if activity[heap[c]] > activity[heap[i]]:
            _heap_swap(heap, heap_pos, i, c)
            i = c
        else:
            break


@njit(cache=True)
def _heap_insert(heap, heap_pos, activity, state, v):
    if heap_pos[v] >= 0:
        return
    i = state[_HEAP_SIZE]
    heap[i] = v
    heap_pos[v] = i
    state[_HEAP_SIZE] = i + 1
    _heap_sift_up(heap, heap_pos, activity, i)


@njit(cache=True)
def _heap_pop_max(heap, heap_pos, activity, state):
    v = heap[0]
    size = state[_HEAP_SIZE] - 1
    state[_HEAP_SIZE] = size
    heap_pos[v] = -1
    if size > 0:
        last = heap[size]
        heap[0] = last
        heap_pos[last] = 0
        _heap_sift_down(heap, heap_pos, activity, 0, size)
    return v


@njit(cache=True)
def _rebuild_watches(ca, state, watch):
    watch[:] = -1
    ref = 0
    top = state[_ARENA_TOP]
    while ref < top:
        size = ca[ref]
        l0 = ca[ref + _HDR]
        l1 = ca[ref + _HDR + 1]
        ca[ref + 2] = watch[l0]
        watch[l0] = ref
        ca[ref + 3] = watch[l1]
        watch[l1] = ref
        ref += _HDR + size
    state[_QHEAD] = 0


@njit(cache=True)
def _enqueue(lit, reason_ref, state, assigns, level, reason, trail):
    v = lit >> 1
    assigns[v] = np.int8((lit & 1) ^ 1)
    level[v] = state[_DLEVEL]
    reason[v] = reason_ref
    trail[state[_TRAIL_SIZE]] = lit
    state[_TRAIL_SIZE] += 1


@njit(cache=True)
def _backtrack(target, state, assigns, level, reason, trail, trail_lim,
               polarity, heap, heap_pos, activity):
    if state[_DLEVEL] <= target:
        return
    bound = trail_lim[target]
    i = state[_TRAIL_SIZE] - 1
    while i >= bound:
        lit = trail[i]
        v = lit >> 1
        polarity[v] = assigns[v]
        assigns[v] = _VAL_UNDEF
        reason[v] = -1
        _heap_insert(heap, heap_pos, activity, state, v)
        i -= 1
    state[_TRAIL_SIZE] = bound
    state[_QHEAD] = bound
    state[_DLEVEL] = target


@njit(cache=True)
def _propagate(ca, state, watch, assigns, level, reason, trail):
    while state[_QHEAD] < state[_TRAIL_SIZE]:
        p = trail[state[_QHEAD]]
        state[_QHEAD] += 1
        state[_N_PROPS] += 1
        false_lit = p ^ 1
        ref = watch[false_lit]
        prev = -1
        prev_slot = 0
        while ref >= 0:
            slot = 0 if ca[ref + _HDR] == false_lit else 1
            next_ref = ca[ref + 2 + slot]
            other = ca[ref + _HDR + (1 - slot)]
            if _lit_value(other, assigns) == 1:
                prev = ref
                prev_slot = slot
                ref = next_ref
                continue
            size = ca[ref]
            found = -1
            for i in range(2, size):
                li = ca[ref + _HDR + i]
                if _lit_value(li, assigns) != 0:
                    found = i
                    break
            if found >= 0:
                # move replacement literal into the falsified watch slot
                newlit = ca[ref + _HDR + found]
                ca[ref + _HDR + found] = false_lit
                ca[ref + _HDR + slot] = newlit
                if prev < 0:
                    watch[false_lit] = next_ref
                else:
                    ca[prev + 2 + prev_slot] = next_ref
                ca[ref + 2 + slot] = watch[newlit]
                watch[newlit] = ref
                ref = next_ref
                continue
            if _lit_value(other, assigns) == 0:
                # conflict
                state[_QHEAD] = state[_TRAIL_SIZE]
                return ref
            _enqueue(other, ref, state, assigns, level, reason, trail)
            prev = ref
            prev_slot = slot
            ref = next_ref
    return -1


@njit(cache=True)
def _bump(v, activity, var_inc, heap, heap_pos):
    activity[v] += var_inc[0]
    if activity[v] > 1e100:
        for i in range(activity.size):
            activity[i] *= 1e-100
        var_inc[0] *= 1e-100
    if heap_pos[v] >= 0:
        _heap_sift_up(heap, heap_pos, activity, heap_pos[v])


@njit(cache=True)
def _analyze(confl, ca, state, assigns, level, reason, trail,
             seen, learnt, lbd_stamp, activity, var_inc, heap, heap_pos):
    """1UIP conflict analysis.  Returns (learnt_size, backtrack_level, lbd)."""
    path_c = 0
    p = -1
    n_learnt = 1  # slot 0 is reserved for the asserting literal
    idx = state[_TRAIL_SIZE] - 1
    dlevel = state[_DLEVEL]
    c = confl
    while True:
        size = ca[c]
        for i in range(size):
            q = ca[c + _HDR + i]
            if q == p:
                continue
            v = q >> 1
            if seen[v] == 0 and level[v] > 0:
                seen[v] = 1
                _bump(v, activity, var_inc, heap, heap_pos)
                if level[v] >= dlevel:
                    path_c += 1
                else:
                    learnt[n_learnt] = q
                    n_learnt += 1
        while seen[trail[idx] >> 1] == 0:
            idx -= 1
        p = trail[idx]
        idx -= 1
        v = p >> 1
        seen[v] = 0
        path_c -= 1
        if path_c == 0:
            break
        c = reason[v]
    learnt[0] = p ^ 1

    # conservative self-subsumption minimization: a non-asserting literal is
    # redundant when its reason consists only of seen or level-0 literals
    out = 1
    for i in range(1, n_learnt):
        q = learnt[i]
        v = q >> 1
        r = reason[v]
        keep = True
        if r >= 0:
            keep = False
            rsize = ca[r]
            for j in range(rsize):
                w = ca[r + _HDR + j] >> 1
                if w != v and seen[w] == 0 and level[w] > 0:
                    keep = True
                    break
        if keep:
            learnt[out] = q
            out = out + 1
        else:
            seen[v] = 0
    # clear remaining seen flags
    for i in range(out):
        seen[learnt[i] >> 1] = 0
    n_learnt = out

    # compute backtrack level; highest-level literal moves to slot 1
    bt = 0
    if n_learnt > 1:
        max_i = 1
        for i in range(2, n_learnt):
            if level[learnt[i] >> 1] > level[learnt[max_i] >> 1]:
                max_i = i
        tmp = learnt[1]
        learnt[1] = learnt[max_i]
        learnt[max_i] = tmp
        bt = level[learnt[1] >> 1]

    # literal block distance = number of distinct decision levels involved
    stamp = state[_N_CONFLICTS] + 1
    lbd = 0
    for i in range(n_learnt):
        lv = level[learnt[i] >> 1]
        if lbd_stamp[lv] != stamp:
            lbd_stamp[lv] = stamp
            lbd += 1
    return n_learnt, bt, lbd


@njit(cache=True)
def _attach_clause(ca, state, watch, lits, n, learned, lbd):
    ref = state[_ARENA_TOP]
    ca[ref] = n
    flags = lbd * 2 + (1 if learned else 0)
    ca[ref + 1] = flags
    for i in range(n):
        ca[ref + _HDR + i] = lits[i]
    l0 = ca[ref + _HDR]
    l1 = ca[ref + _HDR + 1]
    ca[ref + 2] = watch[l0]
    watch[l0] = ref
    ca[ref + 3] = watch[l1]
    watch[l1] = ref
    state[_ARENA_TOP] = ref + _HDR + n
    return ref


@njit(cache=True)
def _reduce_db(ca, state, watch, reason, trail):
    """Drop roughly half the learned clauses by LBD.  Must run at level 0."""
    # level-0 assignments never get resolved on, so their reasons can go
    for i in range(state[_TRAIL_SIZE]):
        reason[trail[i] >> 1] = -1

    # histogram of learned-clause LBDs to pick a keep threshold
    hist = np.zeros(64, dtype=np.int64)
    ref = 0
    top = state[_ARENA_TOP]
    n_learned = 0
    while ref < top:
        size = ca[ref]
        flags = ca[ref + 1]
        if flags & 1:
            lbd = flags >> 1
            if lbd > 63:
                lbd = 63
            hist[lbd] += 1
            n_learned += 1
        ref += _HDR + size
    half = n_learned // 2
    acc = 0
    thresh = 63
    for l in range(64):
        acc += hist[l]
        if acc >= half:
            thresh = l
            break
    if thresh < 3:
        thresh = 3

    # compact the arena, keeping problem clauses and good learned clauses
    src = 0
    dst = 0
    kept_learned = 0
    while src < top:
        size = ca[src]
        flags = ca[src + 1]
        keep = True
        if flags & 1:
            lbd = flags >> 1
            if lbd > thresh:
                keep = False
            else:
                kept_learned += 1
        if keep:
            if dst != src:
                for i in range(_HDR + size):
                    ca[dst + i] = ca[src + i]
            dst += _HDR + size
        src += _HDR + size
    state[_ARENA_TOP] = dst
    state[_N_LEARNED] = kept_learned
    state[_N_REDUCTIONS] += 1
    _rebuild_watches(ca, state, watch)


@njit(cache=True)
def _luby(x):
    """Luby restart sequence: 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ..."""
    size = 1
    seq = 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return 1 << seq


@njit(cache=True)
def _search(ca, state, watch, assigns, level, reason, trail, trail_lim,
            polarity, heap, heap_pos, activity, var_inc, seen, learnt_buf,
            lbd_stamp, assumps, max_conflicts, arena_cap):
    """Run CDCL until a verdict, the conflict budget, or an arena overflow.

    The search is resumable: every piece of state lives in the arrays, so a
    _BUDGET return can be continued by calling again with the same state.
    """
    n_vars = assigns.size
    conflicts_here = 0
    restart_base = 100
    next_restart = state[_N_CONFLICTS] + restart_base * _luby(state[_N_RESTARTS])
    while True:
        # make sure a worst-case learned clause always fits
        if state[_ARENA_TOP] + n_vars + _HDR >= arena_cap:
            return _GROW
        confl = _propagate(ca, state, watch, assigns, level, reason, trail)
        if confl >= 0:
            state[_N_CONFLICTS] += 1
            conflicts_here += 1
            if state[_DLEVEL] == 0:
                return _UNSAT
            n_learnt, bt, lbd = _analyze(
                confl, ca, state, assigns, level, reason, trail,
                seen, learnt_buf, lbd_stamp, activity, var_inc, heap, heap_pos)
            _backtrack(bt, state, assigns, level, reason, trail, trail_lim,
                       polarity, heap, heap_pos, activity)
            if n_learnt == 1:
                _enqueue(learnt_buf[0], -1, state, assigns, level, reason, trail)
            else:
                ref = _attach_clause(ca, state, watch, learnt_buf, n_learnt,
                                     True, lbd)
                state[_N_LEARNED] += 1
                _enqueue(learnt_buf[0], ref, state, assigns, level, reason, trail)
            var_inc[0] *= 1.0 / 0.95
            if conflicts_here >= max_conflicts:
                return _BUDGET
        else:
            if state[_N_CONFLICTS] >= next_restart and state[_DLEVEL] > 0:
                state[_N_RESTARTS] += 1
                _backtrack(0, state, assigns, level, reason, trail, trail_lim,
                           polarity, heap, heap_pos, activity)
                next_restart = (state[_N_CONFLICTS]
                                + restart_base * _luby(state[_N_RESTARTS]))
                continue
            if state[_DLEVEL] == 0 and state[_N_LEARNED] > state[_REDUCE_LIMIT]:
                _reduce_db(ca, state, watch, reason, trail)
                state[_REDUCE_LIMIT] = state[_REDUCE_LIMIT] * 12 // 10
                continue
            # next decision: pending assumptions first, then VSIDS
            dl = state[_DLEVEL]
            if dl < assumps.size:
                p = assumps[dl]
                val = _lit_value(p, assigns)
                if val == 0:
                    return _UNSAT_ASSUMPS
                trail_lim[dl] = state[_TRAIL_SIZE]
                state[_DLEVEL] = dl + 1
                if val == -1:
                    state[_N_DECISIONS] += 1
                    _enqueue(p, -1, state, assigns, level, reason, trail)
                continue
            v = -1
            while state[_HEAP_SIZE] > 0:
                cand = _heap_pop_max(heap, heap_pos, activity, state)
                if assigns[cand] == _VAL_UNDEF:
                    v = cand
                    break
            if v < 0:
                return _SAT
            trail_lim[state[_DLEVEL]] = state[_TRAIL_SIZE]
            state[_DLEVEL] += 1
            state[_N_DECISIONS] += 1
            lit = 2 * v + (1 if polarity[v] == 0 else 0)
            _enqueue(lit, -1, state, assigns, level, reason, trail)


class Solver:
    """Incremental CDCL solver over propositional clauses.

    Variables are created with :meth:`new_var`; clauses are lists of literals
    (``pos(v)`` / ``neg(v)``).  :meth:`solve` accepts assumption literals that
    hold for that call only, which is how retractable depth/count bounds are
    expressed by the encoding layer.
    """

    def __init__(self):
        self._n_vars = 0
        self._pending: list[list[int]] = []
        self._pending_units: list[int] = []
        self._n_clauses = 0
        self._unsat = False
        self._arena_cap = 1 << 16
        self._ca = np.zeros(self._arena_cap, dtype=np.int32)
        self._state = np.zeros(_STATE_LEN, dtype=np.int64)
        self._state[_REDUCE_LIMIT] = 20000
        self._var_inc = np.array([1.0])
        self._model: np.ndarray | None = None
        self._alloc_vars(16)

    def _alloc_vars(self, cap):
        self._var_cap = cap
        self._watch = np.full(2 * cap, -1, dtype=np.int32)
        self._assigns = np.full(cap, _VAL_UNDEF, dtype=np.int8)
        self._level = np.zeros(cap, dtype=np.int32)
        self._reason = np.full(cap, -1, dtype=np.int32)
        self._trail = np.zeros(cap, dtype=np.int32)
        self._trail_lim = np.zeros(cap + 1, dtype=np.int32)
        self._polarity = np.zeros(cap, dtype=np.int8)
        self._heap = np.zeros(cap, dtype=np.int32)
        self._heap_pos = np.full(cap, -1, dtype=np.int32)
        self._activity = np.zeros(cap)
        self._seen = np.zeros(cap, dtype=np.uint8)
        self._learnt_buf = np.zeros(cap + 1, dtype=np.int32)
        self._lbd_stamp = np.zeros(cap + 2, dtype=np.int64)

    def _grow_vars(self):
        old = (self._watch, self._assigns, self._level, self._reason,
               self._trail, self._trail_lim, self._polarity, self._heap,
               self._heap_pos, self._activity, self._seen)
        old_cap = self._var_cap
        self._alloc_vars(old_cap * 2)
        self._watch[:2 * old_cap] = old[0]
        self._assigns[:old_cap] = old[1]
        self._level[:old_cap] = old[2]
        self._reason[:old_cap] = old[3]
        self._trail[:old_cap] = old[4]
        self._trail_lim[:old_cap + 1] = old[5]
        self._polarity[:old_cap] = old[6]
        self._heap[:old_cap] = old[7]
        self._heap_pos[:old_cap] = old[8]
        self._activity[:old_cap] = old[9]
        self._seen[:old_cap] = old[10]

    def _grow_arena(self, need=0):
        while self._arena_cap < max(need, self._state[_ARENA_TOP] * 2,
                                    self._state[_ARENA_TOP] + 1024):
            self._arena_cap *= 2
        ca = np.zeros(self._arena_cap, dtype=np.int32)
        ca[:self._state[_ARENA_TOP]] = self._ca[:self._state[_ARENA_TOP]]
        self._ca = ca

    @property
    def num_vars(self) -> int:
        return self._n_vars

    @property
    def num_clauses(self) -> int:
        return self._n_clauses

    @property
    def stats(self) -> dict:
        return {
            "conflicts": int(self._state[_N_CONFLICTS]),
            "decisions": int(self._state[_N_DECISIONS]),
            "propagations": int(self._state[_N_PROPS]),
            "restarts": int(self._state[_N_RESTARTS]),
            "learned": int(self._state[_N_LEARNED]),
            "reductions": int(self._state[_N_REDUCTIONS]),
        }

    def new_var(self) -> int:
        v = self._n_vars
        self._n_vars += 1
        if v >= self._var_cap:
            self._grow_vars()
        return v

    def add_clause(self, lits) -> bool:
        """Add a clause; returns False once the formula is trivially UNSAT."""
        if self._unsat:
            return False
        out = sorted(set(int(l) for l in lits))
        for l in out:
            if l ^ 1 in out:
                return True  # tautology
            if not 0 <= lit_var(l) < self._n_vars:
                raise ValueError(f"literal {l} references an unknown variable")
        if not out:
            self._unsat = True
            return False
        if len(out) == 1:
            self._pending_units.append(out[0])
        else:
            self._pending.append(out)
        self._n_clauses += 1
        return True

    def _flush_pending(self):
        st = self._state
        # new clauses invalidate saturation of the previous propagation
        _backtrack(0, st, self._assigns, self._level, self._reason,
                   self._trail, self._trail_lim, self._polarity, self._heap,
                   self._heap_pos, self._activity)
        need = st[_ARENA_TOP] + sum(_HDR + len(c) for c in self._pending) + 64
        if need >= self._arena_cap:
            self._grow_arena(int(need) * 2)
        for c in self._pending:
            arr = np.array(c, dtype=np.int32)
            _attach_clause(self._ca, st, self._watch, arr, len(arr), False, 0)
        self._pending.clear()
        for u in self._pending_units:
            val = _lit_value(u, self._assigns)
            if val == 0:
                self._unsat = True
                return
            if val == -1:
                _enqueue(u, -1, st, self._assigns, self._level, self._reason,
                         self._trail)
        self._pending_units.clear()
        st[_QHEAD] = 0

    def solve(self, assumptions=(), budget_s: float | None = None) -> bool:
        """Decide satisfiability under the given assumption literals.

        Raises SolverTimeout when budget_s elapses before a verdict.
        """
        self._model = None
        if self._unsat:
            return False
        st = self._state
        _backtrack(0, st, self._assigns, self._level, self._reason,
                   self._trail, self._trail_lim, self._polarity, self._heap,
                   self._heap_pos, self._activity)
        self._flush_pending()
        if self._unsat:
            return False
        # fresh watch chains + full root re-propagation keeps things simple
        _rebuild_watches(self._ca, st, self._watch)
        for v in range(self._n_vars):
            if self._assigns[v] == _VAL_UNDEF:
                _heap_insert(self._heap, self._heap_pos, self._activity, st, v)
        assumps = np.array(list(assumptions), dtype=np.int32)
        start = time.monotonic()
        chunk = 20000
        while True:
            status = _search(
                self._ca, st, self._watch, self._assigns, self._level,
                self._reason, self._trail, self._trail_lim, self._polarity,
                self._heap, self._heap_pos, self._activity, self._var_inc,
                self._seen, self._learnt_buf, self._lbd_stamp, assumps,
                chunk, self._arena_cap)
            if status == _SAT:
                self._model = self._assigns[:self._n_vars].copy()
                _backtrack(0, st, self._assigns, self._level, self._reason,
                           self._trail, self._trail_lim, self._polarity,
                           self._heap, self._heap_pos, self._activity)
                return True
            if status == _UNSAT:
                self._unsat = True
                return False
            if status == _UNSAT_ASSUMPS:
                _backtrack(0, st, self._assigns, self._level, self._reason,
                           self._trail, self._trail_lim, self._polarity,
                           self._heap, self._heap_pos, self._activity)
                return False
            if status == _GROW:
                self._grow_arena()
                continue
            # budget chunk exhausted
            if budget_s is not None:
                elapsed = time.monotonic() - start
                if elapsed > budget_s:
                    _backtrack(0, st, self._assigns, self._level, self._reason,
                               self._trail, self._trail_lim, self._polarity,
                               self._heap, self._heap_pos, self._activity)
                    raise SolverTimeout(elapsed)

    def model_value(self, var: int) -> bool:
        if self._model is None:
            raise RuntimeError("no model available (last solve was not SAT)")
        return bool(self._model[var] == 1)
