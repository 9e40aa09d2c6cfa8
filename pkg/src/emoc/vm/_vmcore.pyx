# cython: language_level=3
"""Compiled VM backend.

Semantics mirror emoc.vm._pyvm exactly (same traps, budgets, step counts,
cell accounting, and refcount protocol); only the machine representation
differs: flattened int64 code arrays, a tagged value stack, and a list
arena with explicit refcounts.
"""

from libc.stdlib cimport calloc, free, malloc, realloc
from libc.stdint cimport int64_t, uint8_t

from ..bytecode import OPCODE_NAMES
from ..errors import EvaluationError
from .report import Budgets, BudgetExhausted, EvalReport, Trap

cdef extern from *:
    """
    #include <stdint.h>
    static inline int emoc_add_ovf(int64_t a, int64_t b, int64_t *r)
        { return __builtin_add_overflow(a, b, r); }
    static inline int emoc_sub_ovf(int64_t a, int64_t b, int64_t *r)
        { return __builtin_sub_overflow(a, b, r); }
    static inline int emoc_mul_ovf(int64_t a, int64_t b, int64_t *r)
        { return __builtin_mul_overflow(a, b, r); }
    """
    int emoc_add_ovf(int64_t a, int64_t b, int64_t *r) nogil
    int emoc_sub_ovf(int64_t a, int64_t b, int64_t *r) nogil
    int emoc_mul_ovf(int64_t a, int64_t b, int64_t *r) nogil

DEF OP_CONST = 0
DEF OP_LOAD = 1
DEF OP_STORE = 2
DEF OP_ADD = 3
DEF OP_SUB = 4
DEF OP_MUL = 5
DEF OP_DIV = 6
DEF OP_MOD = 7
DEF OP_NEG = 8
DEF OP_EQ = 9
DEF OP_NE = 10
DEF OP_LT = 11
DEF OP_LE = 12
DEF OP_GT = 13
DEF OP_GE = 14
DEF OP_NOT = 15
DEF OP_AND = 16
DEF OP_OR = 17
DEF OP_INDEX_LOAD = 18
DEF OP_INDEX_STORE = 19
DEF OP_LIST_NEW = 20
DEF OP_LIST_PUSH = 21
DEF OP_LIST_POP = 22
DEF OP_LIST_LEN = 23
DEF OP_JUMP = 24
DEF OP_BRANCH = 25
DEF OP_CALL = 26
DEF OP_RET = 27
DEF OP_POP_TOP = 28
DEF N_OPS = 29

DEF TAG_INT = 0
DEF TAG_BOOL = 1
DEF TAG_LIST = 2
DEF TAG_UNSET = 255

DEF TRAP_NONE = -1
DEF TRAP_DIV0 = 0
DEF TRAP_MOD0 = 1
DEF TRAP_OOB = 2
DEF TRAP_OVERFLOW = 3
DEF TRAP_ASSERT = 4
DEF TRAP_POP_EMPTY = 5
DEF TRAP_TYPE = 6
DEF HALT_STEPS = 10
DEF HALT_CELLS = 11
DEF HALT_DEPTH = 12
DEF HALT_RETURN = 13

_TRAP_NAMES = (
    "division-by-zero",
    "modulo-by-zero",
    "index-out-of-bounds",
    "integer-overflow",
    "assertion-failure",
    "pop-from-empty",
    "type-error",
)

cdef struct MList:
    int64_t *vals
    uint8_t elemtag
    int64_t length
    int64_t cap
    int64_t rc


cdef struct Machine:
    # code, flattened across functions
    uint8_t *op
    int64_t *arg
    uint8_t *aux
    int64_t *f_off
    int64_t *f_len
    int64_t *f_arity
    int64_t *f_nslots
    int64_t n_funcs

    # value stack
    int64_t *sval
    uint8_t *stag
    int64_t sp
    int64_t scap

    # locals
    int64_t *lval
    uint8_t *ltag
    int64_t ltop
    int64_t lcap

    # frames
    int64_t *fr_func
    int64_t *fr_retpc
    int64_t *fr_base
    int64_t depth
    int64_t fcap

    # list arena
    MList *lists
    int64_t n_lists
    int64_t lists_cap
    int64_t *free_handles
    int64_t n_free

    # accounting
    int64_t live
    int64_t peak
    int64_t steps
    int64_t counts[N_OPS]
    int64_t max_steps
    int64_t max_cells
    int64_t max_depth


cdef int m_init(Machine *m) except -1:
    cdef int i
    m.scap = 1024
    m.sval = <int64_t *> malloc(m.scap * sizeof(int64_t))
    m.stag = <uint8_t *> malloc(m.scap)
    m.lcap = 1024
    m.lval = <int64_t *> malloc(m.lcap * sizeof(int64_t))
    m.ltag = <uint8_t *> malloc(m.lcap)
    m.fcap = 1024
    m.fr_func = <int64_t *> malloc(m.fcap * sizeof(int64_t))
    m.fr_retpc = <int64_t *> malloc(m.fcap * sizeof(int64_t))
    m.fr_base = <int64_t *> malloc(m.fcap * sizeof(int64_t))
    m.lists_cap = 256
    m.lists = <MList *> malloc(m.lists_cap * sizeof(MList))
    m.free_handles = <int64_t *> malloc(m.lists_cap * sizeof(int64_t))
    m.n_lists = 0
    m.n_free = 0
    m.sp = 0
    m.ltop = 0
    m.depth = 0
    m.live = 0
    m.peak = 0
    m.steps = 0
    for i in range(N_OPS):
        m.counts[i] = 0
    if (m.sval == NULL or m.stag == NULL or m.lval == NULL or m.ltag == NULL
            or m.fr_func == NULL or m.fr_retpc == NULL or m.fr_base == NULL
            or m.lists == NULL or m.free_handles == NULL):
        raise MemoryError()
    return 0


cdef void m_free(Machine *m):
    cdef int64_t h
    for h in range(m.n_lists):
        if m.lists[h].vals != NULL:
            free(m.lists[h].vals)
    free(m.lists)
    free(m.free_handles)
    free(m.sval)
    free(m.stag)
    free(m.lval)
    free(m.ltag)
    free(m.fr_func)
    free(m.fr_retpc)
    free(m.fr_base)
    free(m.op)
    free(m.arg)
    free(m.aux)
    free(m.f_off)
    free(m.f_len)
    free(m.f_arity)
    free(m.f_nslots)


cdef inline int64_t new_handle(Machine *m) nogil:
    cdef int64_t h
    cdef int64_t newcap
    if m.n_free > 0:
        m.n_free -= 1
        return m.free_handles[m.n_free]
    if m.n_lists == m.lists_cap:
        newcap = m.lists_cap * 2
        m.lists = <MList *> realloc(m.lists, newcap * sizeof(MList))
        m.free_handles = <int64_t *> realloc(m.free_handles, newcap * sizeof(int64_t))
        m.lists_cap = newcap
    h = m.n_lists
    m.n_lists += 1
    return h


cdef inline int alloc_cells(Machine *m, int64_t n) nogil:
    m.live += n
    if m.live > m.max_cells:
        return 0
    if m.live > m.peak:
        m.peak = m.live
    return 1


cdef int64_t alloc_list(Machine *m, int64_t length, uint8_t elemtag) nogil:
    # returns handle, or -1 on cell-budget exhaustion (checked before malloc
    # so absurd lengths cannot force a host allocation)
    cdef int64_t h
    cdef MList *lst
    if m.live + 1 + length > m.max_cells:
        m.live += 1 + length
        return -1
    h = new_handle(m)
    lst = &m.lists[h]
    lst.length = length
    lst.cap = length if length > 4 else 4
    lst.vals = <int64_t *> malloc(lst.cap * sizeof(int64_t))
    lst.elemtag = elemtag
    lst.rc = 1
    alloc_cells(m, 1 + length)
    return h


cdef void decref_list(Machine *m, int64_t h) nogil:
    cdef MList *lst = &m.lists[h]
    cdef int64_t i
    lst.rc -= 1
    if lst.rc == 0:
        m.live -= 1 + lst.length
        if lst.elemtag == TAG_LIST:
            for i in range(lst.length):
                decref_list(m, lst.vals[i])
        free(lst.vals)
        lst.vals = NULL
        m.free_handles[m.n_free] = h
        m.n_free += 1


cdef inline void decref_val(Machine *m, int64_t v, uint8_t tag) nogil:
    if tag == TAG_LIST:
        decref_list(m, v)


cdef int run(Machine *m, int64_t entry_idx) nogil:
    """Interpreter loop; returns a TRAP_*/HALT_* code."""
    cdef:
        int64_t pc, code_base, code_end, sp, fi
        uint8_t *op = m.op
        int64_t *arg = m.arg
        uint8_t *auxs = m.aux
        int64_t *sval = m.sval
        uint8_t *stag = m.stag
        int64_t steps = 0
        int64_t max_steps = m.max_steps
        int o
        int64_t a, b, r, i, h, n, target, callee, base
        uint8_t ta, tb
        MList *lst

    fi = entry_idx
    code_base = m.f_off[fi]
    code_end = code_base + m.f_len[fi]
    pc = code_base
    sp = m.sp

    while True:
        if steps >= max_steps:
            m.steps = steps
            m.sp = sp
            return HALT_STEPS
        o = op[pc]
        steps += 1
        m.counts[o] += 1
        pc += 1

        # grow the value stack when headroom gets low
        if sp + 2 > m.scap:
            m.scap *= 2
            m.sval = <int64_t *> realloc(m.sval, m.scap * sizeof(int64_t))
            m.stag = <uint8_t *> realloc(m.stag, m.scap)
            sval = m.sval
            stag = m.stag

        if o == OP_LOAD:
            base = m.fr_base[m.depth - 1]
            a = m.lval[base + arg[pc - 1]]
            ta = m.ltag[base + arg[pc - 1]]
            if ta == TAG_LIST:
                m.lists[a].rc += 1
            sval[sp] = a
            stag[sp] = ta
            sp += 1
        elif o == OP_CONST:
            sval[sp] = arg[pc - 1]
            stag[sp] = TAG_BOOL if auxs[pc - 1] else TAG_INT
            sp += 1
        elif o == OP_BRANCH:
            sp -= 1
            if stag[sp] != TAG_BOOL:
                decref_val(m, sval[sp], stag[sp])
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            if sval[sp] == 0:
                target = arg[pc - 1]
                if target < 0:
                    m.steps = steps; m.sp = sp
                    return TRAP_ASSERT
                pc = code_base + target
        elif o == OP_JUMP:
            pc = code_base + arg[pc - 1]
        elif o == OP_STORE:
            sp -= 1
            base = m.fr_base[m.depth - 1] + arg[pc - 1]
            if m.ltag[base] == TAG_LIST:
                decref_list(m, m.lval[base])
            m.lval[base] = sval[sp]
            m.ltag[base] = stag[sp]
        elif OP_ADD <= o <= OP_MOD:
            sp -= 2
            if stag[sp] != TAG_INT or stag[sp + 1] != TAG_INT:
                decref_val(m, sval[sp], stag[sp])
                decref_val(m, sval[sp + 1], stag[sp + 1])
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            a = sval[sp]
            b = sval[sp + 1]
            if o == OP_ADD:
                if emoc_add_ovf(a, b, &r):
                    m.steps = steps; m.sp = sp
                    return TRAP_OVERFLOW
            elif o == OP_SUB:
                if emoc_sub_ovf(a, b, &r):
                    m.steps = steps; m.sp = sp
                    return TRAP_OVERFLOW
            elif o == OP_MUL:
                if emoc_mul_ovf(a, b, &r):
                    m.steps = steps; m.sp = sp
                    return TRAP_OVERFLOW
            elif o == OP_DIV:
                if b == 0:
                    m.steps = steps; m.sp = sp
                    return TRAP_DIV0
                if a == (<int64_t> -9223372036854775807 - 1) and b == -1:
                    m.steps = steps; m.sp = sp
                    return TRAP_OVERFLOW
                r = a / b
                if (a % b != 0) and ((a < 0) != (b < 0)):
                    r -= 1  # floor division
            else:
                if b == 0:
                    m.steps = steps; m.sp = sp
                    return TRAP_MOD0
                if a == (<int64_t> -9223372036854775807 - 1) and b == -1:
                    r = 0
                else:
                    r = a % b
                    if r != 0 and ((r < 0) != (b < 0)):
                        r += b  # floor modulo
            sval[sp] = r
            stag[sp] = TAG_INT
            sp += 1
        elif OP_EQ <= o <= OP_GE:
            sp -= 2
            ta = stag[sp]
            tb = stag[sp + 1]
            a = sval[sp]
            b = sval[sp + 1]
            if o <= OP_NE:
                if ta != tb or ta == TAG_LIST:
                    decref_val(m, a, ta)
                    decref_val(m, b, tb)
                    m.steps = steps; m.sp = sp
                    return TRAP_TYPE
                r = (a == b) if o == OP_EQ else (a != b)
            else:
                if ta != TAG_INT or tb != TAG_INT:
                    decref_val(m, a, ta)
                    decref_val(m, b, tb)
                    m.steps = steps; m.sp = sp
                    return TRAP_TYPE
                if o == OP_LT:
                    r = a < b
                elif o == OP_LE:
                    r = a <= b
                elif o == OP_GT:
                    r = a > b
                else:
                    r = a >= b
            sval[sp] = r
            stag[sp] = TAG_BOOL
            sp += 1
        elif o == OP_INDEX_LOAD:
            sp -= 2
            if stag[sp] != TAG_LIST or stag[sp + 1] != TAG_INT:
                decref_val(m, sval[sp], stag[sp])
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            h = sval[sp]
            i = sval[sp + 1]
            lst = &m.lists[h]
            if i < 0 or i >= lst.length:
                decref_list(m, h)
                m.steps = steps; m.sp = sp
                return TRAP_OOB
            a = lst.vals[i]
            ta = lst.elemtag
            if ta == TAG_LIST:
                m.lists[a].rc += 1
            decref_list(m, h)
            sval[sp] = a
            stag[sp] = ta
            sp += 1
        elif o == OP_INDEX_STORE:
            sp -= 3
            if stag[sp] != TAG_LIST or stag[sp + 1] != TAG_INT:
                decref_val(m, sval[sp + 2], stag[sp + 2])
                decref_val(m, sval[sp], stag[sp])
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            h = sval[sp]
            i = sval[sp + 1]
            lst = &m.lists[h]
            if i < 0 or i >= lst.length:
                decref_val(m, sval[sp + 2], stag[sp + 2])
                decref_list(m, h)
                m.steps = steps; m.sp = sp
                return TRAP_OOB
            tb = stag[sp + 2]
            if lst.elemtag == TAG_UNSET:
                lst.elemtag = tb
            elif lst.elemtag != tb:
                decref_val(m, sval[sp + 2], tb)
                decref_list(m, h)
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            if lst.elemtag == TAG_LIST:
                decref_list(m, lst.vals[i])
            lst.vals[i] = sval[sp + 2]
            decref_list(m, h)
        elif o == OP_NEG:
            if stag[sp - 1] != TAG_INT:
                sp -= 1
                decref_val(m, sval[sp], stag[sp])
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            if emoc_sub_ovf(0, sval[sp - 1], &r):
                sp -= 1
                m.steps = steps; m.sp = sp
                return TRAP_OVERFLOW
            sval[sp - 1] = r
        elif o == OP_NOT:
            if stag[sp - 1] != TAG_BOOL:
                sp -= 1
                decref_val(m, sval[sp], stag[sp])
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            sval[sp - 1] = 1 - sval[sp - 1]
        elif o == OP_AND or o == OP_OR:
            if stag[sp - 1] != TAG_BOOL:
                sp -= 1
                decref_val(m, sval[sp], stag[sp])
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            if (sval[sp - 1] == 0) == (o == OP_AND):
                pc = code_base + arg[pc - 1]  # short-circuit, value stays
            else:
                sp -= 1
        elif o == OP_LIST_NEW:
            n = arg[pc - 1]
            if n >= 0:
                # literal list of n elements from the stack
                ta = TAG_UNSET
                if n > 0:
                    ta = stag[sp - n]
                    for i in range(1, n):
                        if stag[sp - n + i] != ta:
                            for i in range(n):
                                decref_val(m, sval[sp - n + i], stag[sp - n + i])
                            sp -= n
                            m.steps = steps; m.sp = sp
                            return TRAP_TYPE
                h = alloc_list(m, n, ta)
                if h < 0:
                    sp -= n
                    m.steps = steps; m.sp = sp
                    return HALT_CELLS
                for i in range(n):
                    m.lists[h].vals[i] = sval[sp - n + i]
                sp -= n
            else:
                # make_list(n, fill)
                sp -= 2
                if stag[sp] != TAG_INT or sval[sp] < 0:
                    decref_val(m, sval[sp + 1], stag[sp + 1])
                    m.steps = steps; m.sp = sp
                    return TRAP_TYPE
                n = sval[sp]
                a = sval[sp + 1]
                ta = stag[sp + 1]
                h = alloc_list(m, n, ta)
                if h < 0:
                    m.steps = steps; m.sp = sp
                    return HALT_CELLS
                for i in range(n):
                    m.lists[h].vals[i] = a
                if ta == TAG_LIST:
                    m.lists[a].rc += n
                    decref_list(m, a)
            sval[sp] = h
            stag[sp] = TAG_LIST
            sp += 1
        elif o == OP_LIST_PUSH:
            sp -= 1
            if stag[sp - 1] != TAG_LIST:
                decref_val(m, sval[sp], stag[sp])
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            lst = &m.lists[sval[sp - 1]]
            ta = stag[sp]
            if lst.elemtag == TAG_UNSET:
                lst.elemtag = ta
            elif lst.elemtag != ta:
                decref_val(m, sval[sp], ta)
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            if lst.length == lst.cap:
                lst.cap *= 2
                lst.vals = <int64_t *> realloc(lst.vals, lst.cap * sizeof(int64_t))
            lst.vals[lst.length] = sval[sp]
            lst.length += 1
            if not alloc_cells(m, 1):
                m.steps = steps; m.sp = sp
                return HALT_CELLS
        elif o == OP_LIST_POP:
            sp -= 1
            if stag[sp] != TAG_LIST:
                decref_val(m, sval[sp], stag[sp])
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            h = sval[sp]
            lst = &m.lists[h]
            if lst.length == 0:
                decref_list(m, h)
                m.steps = steps; m.sp = sp
                return TRAP_POP_EMPTY
            lst.length -= 1
            m.live -= 1
            sval[sp] = lst.vals[lst.length]
            stag[sp] = lst.elemtag
            sp += 1
            decref_list(m, h)
        elif o == OP_LIST_LEN:
            sp -= 1
            if stag[sp] != TAG_LIST:
                decref_val(m, sval[sp], stag[sp])
                m.steps = steps; m.sp = sp
                return TRAP_TYPE
            h = sval[sp]
            n = m.lists[h].length
            decref_list(m, h)
            sval[sp] = n
            stag[sp] = TAG_INT
            sp += 1
        elif o == OP_CALL:
            callee = arg[pc - 1]
            if m.depth >= m.max_depth:
                m.steps = steps; m.sp = sp
                return HALT_DEPTH
            if not alloc_cells(m, 2 + m.f_nslots[callee]):
                m.steps = steps; m.sp = sp
                return HALT_CELLS
            if m.depth == m.fcap:
                m.fcap *= 2
                m.fr_func = <int64_t *> realloc(m.fr_func, m.fcap * sizeof(int64_t))
                m.fr_retpc = <int64_t *> realloc(m.fr_retpc, m.fcap * sizeof(int64_t))
                m.fr_base = <int64_t *> realloc(m.fr_base, m.fcap * sizeof(int64_t))
            if m.ltop + m.f_nslots[callee] > m.lcap:
                while m.ltop + m.f_nslots[callee] > m.lcap:
                    m.lcap *= 2
                m.lval = <int64_t *> realloc(m.lval, m.lcap * sizeof(int64_t))
                m.ltag = <uint8_t *> realloc(m.ltag, m.lcap)
            m.fr_retpc[m.depth - 1] = pc
            m.fr_func[m.depth] = callee
            m.fr_base[m.depth] = m.ltop
            base = m.ltop
            m.ltop += m.f_nslots[callee]
            n = m.f_arity[callee]
            sp -= n
            for i in range(n):
                m.lval[base + i] = sval[sp + i]
                m.ltag[base + i] = stag[sp + i]
            for i in range(n, m.f_nslots[callee]):
                m.lval[base + i] = 0
                m.ltag[base + i] = TAG_INT
            m.depth += 1
            fi = callee
            code_base = m.f_off[fi]
            code_end = code_base + m.f_len[fi]
            pc = code_base
        elif o == OP_RET:
            m.depth -= 1
            base = m.fr_base[m.depth]
            fi = m.fr_func[m.depth]
            for i in range(m.f_nslots[fi]):
                if m.ltag[base + i] == TAG_LIST:
                    decref_list(m, m.lval[base + i])
            m.live -= 2 + m.f_nslots[fi]
            m.ltop = base
            if m.depth == 0:
                m.steps = steps
                m.sp = sp
                return HALT_RETURN
            fi = m.fr_func[m.depth - 1]
            code_base = m.f_off[fi]
            code_end = code_base + m.f_len[fi]
            pc = m.fr_retpc[m.depth - 1]
        elif o == OP_POP_TOP:
            sp -= 1
            decref_val(m, sval[sp], stag[sp])
        else:
            m.steps = steps
            m.sp = sp
            return TRAP_TYPE


cdef _load_code(Machine *m, stream):
    cdef int64_t total = 0
    funcs = stream.functions
    cdef int64_t nf = len(funcs)
    m.n_funcs = nf
    for fn in funcs:
        total += len(fn.instrs)
    m.op = <uint8_t *> malloc(total if total else 1)
    m.arg = <int64_t *> malloc((total if total else 1) * sizeof(int64_t))
    m.aux = <uint8_t *> malloc(total if total else 1)
    m.f_off = <int64_t *> malloc(nf * sizeof(int64_t))
    m.f_len = <int64_t *> malloc(nf * sizeof(int64_t))
    m.f_arity = <int64_t *> malloc(nf * sizeof(int64_t))
    m.f_nslots = <int64_t *> malloc(nf * sizeof(int64_t))
    cdef int64_t off = 0
    cdef int64_t fi = 0
    for fn in funcs:
        m.f_off[fi] = off
        m.f_len[fi] = len(fn.instrs)
        m.f_arity[fi] = fn.arity
        m.f_nslots[fi] = fn.n_slots
        for ins in fn.instrs:
            m.op[off] = ins.op
            m.arg[off] = ins.operand
            m.aux[off] = ins.aux
            off += 1
        fi += 1


cdef _arg_to_runtime(Machine *m, obj, int64_t *val_out, uint8_t *tag_out):
    cdef int64_t h, i, v
    cdef uint8_t t, et
    cdef int64_t iv
    if isinstance(obj, bool):
        val_out[0] = 1 if obj else 0
        tag_out[0] = TAG_BOOL
        return
    if isinstance(obj, int):
        iv = obj  # raises OverflowError past 64 bits
        val_out[0] = iv
        tag_out[0] = TAG_INT
        return
    if isinstance(obj, list):
        h = alloc_list(m, len(obj), TAG_UNSET)
        if h < 0:
            raise EvaluationError("arguments exceed the cell budget")
        et = TAG_UNSET
        for i in range(len(obj)):
            _arg_to_runtime(m, obj[i], &v, &t)
            if et == TAG_UNSET:
                et = t
            elif t != et:
                raise EvaluationError("argument lists must be homogeneous")
            m.lists[h].vals[i] = v
        m.lists[h].elemtag = et
        val_out[0] = h
        tag_out[0] = TAG_LIST
        return
    raise EvaluationError(f"unsupported argument {obj!r}")


cdef _runtime_to_host(Machine *m, int64_t val, uint8_t tag):
    cdef MList *lst
    cdef int64_t i
    if tag == TAG_BOOL:
        return bool(val)
    if tag == TAG_INT:
        return val
    lst = &m.lists[val]
    return [
        _runtime_to_host(m, lst.vals[i], lst.elemtag) for i in range(lst.length)
    ]


def evaluate(stream, entry, args, budgets=None):
    """Compiled twin of emoc.vm._pyvm.evaluate."""
    if budgets is None:
        budgets = Budgets()
    if not stream.has_function(entry):
        raise EvaluationError(f"no function named {entry!r}")
    entry_fn = stream.function(entry)
    if entry_fn.arity != len(args):
        raise EvaluationError(
            f"{entry!r} expects {entry_fn.arity} argument(s), got {len(args)}"
        )
    cdef int64_t entry_idx = -1
    for idx, fn in enumerate(stream.functions):
        if fn.name == entry:
            entry_idx = idx
            break

    cdef Machine m
    m.op = NULL; m.arg = NULL; m.aux = NULL
    m.f_off = NULL; m.f_len = NULL; m.f_arity = NULL; m.f_nslots = NULL
    m_init(&m)
    m.max_steps = budgets.max_steps
    m.max_cells = budgets.max_cells
    m.max_depth = budgets.max_call_depth

    cdef int64_t v
    cdef uint8_t t
    cdef int64_t i
    cdef int status
    cdef int64_t input_cells
    try:
        _load_code(&m, stream)

        # entry frame
        m.fr_func[0] = entry_idx
        m.fr_base[0] = 0
        m.depth = 1
        for i in range(len(args)):
            try:
                _arg_to_runtime(&m, args[i], &v, &t)
            except OverflowError:
                raise EvaluationError("argument out of 64-bit range")
            m.lval[i] = v
            m.ltag[i] = t
        input_cells = m.live
        for i in range(len(args), m.f_nslots[entry_idx]):
            m.lval[i] = 0
            m.ltag[i] = TAG_INT
        m.ltop = m.f_nslots[entry_idx]
        if m.ltop > m.lcap:  # pragma: no cover - huge arity
            raise EvaluationError("too many slots")
        if not alloc_cells(&m, 2 + m.f_nslots[entry_idx]):
            status = HALT_CELLS
        else:
            with nogil:
                status = run(&m, entry_idx)

        if status == HALT_RETURN:
            outcome = _runtime_to_host(&m, m.sval[m.sp - 1], m.stag[m.sp - 1])
        elif status == HALT_STEPS:
            outcome = BudgetExhausted("steps")
        elif status == HALT_CELLS:
            outcome = BudgetExhausted("cells")
        elif status == HALT_DEPTH:
            outcome = BudgetExhausted("depth")
        else:
            outcome = Trap(_TRAP_NAMES[status])

        op_counts = {
            name: m.counts[idx] for idx, name in enumerate(OPCODE_NAMES)
        }
        steps = m.steps
        aux_peak = m.peak - input_cells
        return EvalReport(
            outcome=outcome,
            steps=steps,
            op_counts=op_counts,
            aux_peak_cells=aux_peak,
        )
    finally:
        m_free(&m)
