"""Pure-Python VM backend.

This is the reference semantics for the compiled core in ``_vmcore.pyx``;
both must produce byte-identical reports.  Memory protocol:

* scalar binding = 1 cell (accounted as part of its frame's slots)
* list = 1 + length cells, allocated on creation, freed when the last
  reference drops; push/pop adjust by one cell
* call frame = 2 cells + 1 per local slot
* ``aux_peak_cells`` = peak live cells minus the heap cells of the input
  arguments (the entry frame itself always counts, so it is >= 1)
"""

from __future__ import annotations

from ..bytecode import INT64_MAX, INT64_MIN, OP, OPCODE_NAMES, InstructionStream
from ..errors import EvaluationError
from .report import Budgets, BudgetExhausted, EvalReport, Trap

_CONST = OP["CONST"]
_LOAD = OP["LOAD"]
_STORE = OP["STORE"]
_ADD = OP["ADD"]
_SUB = OP["SUB"]
_MUL = OP["MUL"]
_DIV = OP["DIV"]
_MOD = OP["MOD"]
_NEG = OP["NEG"]
_EQ = OP["EQ"]
_NE = OP["NE"]
_LT = OP["LT"]
_LE = OP["LE"]
_GT = OP["GT"]
_GE = OP["GE"]
_NOT = OP["NOT"]
_AND = OP["AND"]
_OR = OP["OR"]
_INDEX_LOAD = OP["INDEX_LOAD"]
_INDEX_STORE = OP["INDEX_STORE"]
_LIST_NEW = OP["LIST_NEW"]
_LIST_PUSH = OP["LIST_PUSH"]
_LIST_POP = OP["LIST_POP"]
_LIST_LEN = OP["LIST_LEN"]
_JUMP = OP["JUMP"]
_BRANCH = OP["BRANCH"]
_CALL = OP["CALL"]
_RET = OP["RET"]
_POP_TOP = OP["POP_TOP"]


class MList:
    __slots__ = ("items", "elemtag", "rc")

    def __init__(self, items, elemtag, rc=1):
        self.items = items
        self.elemtag = elemtag  # "int" | "bool" | "list" | None (empty, unset)
        self.rc = rc


def _tag_of(value):
    if isinstance(value, MList):
        return "list"
    if isinstance(value, bool):
        return "bool"
    return "int"


class _Machine:
    def __init__(self, stream: InstructionStream, budgets: Budgets):
        self.stream = stream
        self.budgets = budgets
        self.live = 0
        self.peak = 0
        self.counts = [0] * len(OPCODE_NAMES)

    def alloc_cells(self, n) -> bool:
        self.live += n
        if self.live > self.budgets.max_cells:
            return False
        if self.live > self.peak:
            self.peak = self.live
        return True

    def free_cells(self, n) -> None:
        self.live -= n

    def new_list(self, items, elemtag):
        lst = MList(items, elemtag)
        ok = self.alloc_cells(1 + len(items))
        return lst, ok

    def room_for(self, n) -> bool:
        return self.live + n <= self.budgets.max_cells

    def decref(self, value) -> None:
        if isinstance(value, MList):
            value.rc -= 1
            if value.rc == 0:
                self.free_cells(1 + len(value.items))
                for item in value.items:
                    self.decref(item)

    def incref(self, value) -> None:
        if isinstance(value, MList):
            value.rc += 1


def _convert_in(machine, value):
    """Build a runtime value (with cells accounted) from a host value."""
    if isinstance(value, list):
        items = [_convert_in(machine, v) for v in value]
        elemtag = _tag_of(items[0]) if items else None
        for item in items:
            if _tag_of(item) != elemtag:
                raise EvaluationError("argument lists must be homogeneous")
        lst, ok = machine.new_list(items, elemtag)
        if not ok:
            raise EvaluationError("arguments exceed the cell budget")
        return lst
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        if not INT64_MIN <= value <= INT64_MAX:
            raise EvaluationError("argument out of 64-bit range")
        return value
    raise EvaluationError(f"unsupported argument {value!r}")


def _convert_out(value):
    if isinstance(value, MList):
        return [_convert_out(v) for v in value.items]
    return value


def _heap_cells(value) -> int:
    if isinstance(value, MList):
        return 1 + len(value.items) + sum(_heap_cells(v) for v in value.items)
    return 0


def evaluate(stream: InstructionStream, entry: str, args, budgets: Budgets = None) -> EvalReport:
    """Run ``entry`` on ``args``; deterministic, stops at first trap/budget event."""
    if budgets is None:
        budgets = Budgets()
    if not stream.has_function(entry):
        raise EvaluationError(f"no function named {entry!r}")
    fn = stream.function(entry)
    if fn.arity != len(args):
        raise EvaluationError(
            f"{entry!r} expects {fn.arity} argument(s), got {len(args)}"
        )

    m = _Machine(stream, budgets)
    rt_args = [_convert_in(m, a) for a in args]
    input_cells = m.live

    outcome = _run(m, fn, rt_args)
    steps = sum(m.counts)
    op_counts = {name: m.counts[i] for i, name in enumerate(OPCODE_NAMES)}
    aux = m.peak - input_cells
    return EvalReport(outcome=outcome, steps=steps, op_counts=op_counts, aux_peak_cells=aux)


def _run(m: _Machine, entry_fn, rt_args):
    functions = m.stream.functions
    max_steps = m.budgets.max_steps
    max_depth = m.budgets.max_call_depth

    # frame: [function, pc, slots, stack_base]
    slots = rt_args + [0] * (entry_fn.n_slots - entry_fn.arity)
    if not m.alloc_cells(2 + entry_fn.n_slots):
        return BudgetExhausted("cells")
    frames = [[entry_fn, 0, slots]]
    stacks = [[]]
    steps = 0
    counts = m.counts

    def type_error():
        return Trap("type-error")

    while True:
        fn, pc, slots = frames[-1]
        stack = stacks[-1]
        code = fn.instrs
        if pc >= len(code):  # pragma: no cover - lowering guarantees RET
            return Trap("type-error")
        ins = code[pc]
        if steps >= max_steps:
            return BudgetExhausted("steps")
        op = ins.op
        steps += 1
        counts[op] += 1
        pc += 1
        frames[-1][1] = pc

        if op == _CONST:
            stack.append(bool(ins.operand) if ins.aux else ins.operand)
        elif op == _LOAD:
            v = slots[ins.operand]
            m.incref(v)
            stack.append(v)
        elif op == _STORE:
            v = stack.pop()
            m.decref(slots[ins.operand])
            slots[ins.operand] = v
        elif op in (_ADD, _SUB, _MUL, _DIV, _MOD):
            b = stack.pop()
            a = stack.pop()
            if not (type(a) is int and type(b) is int):
                m.decref(a)
                m.decref(b)
                return type_error()
            if op == _ADD:
                r = a + b
            elif op == _SUB:
                r = a - b
            elif op == _MUL:
                r = a * b
            elif op == _DIV:
                if b == 0:
                    return Trap("division-by-zero")
                r = a // b
            else:
                if b == 0:
                    return Trap("modulo-by-zero")
                r = a % b
            if not INT64_MIN <= r <= INT64_MAX:
                return Trap("integer-overflow")
            stack.append(r)
        elif op == _NEG:
            a = stack.pop()
            if type(a) is not int:
                m.decref(a)
                return type_error()
            r = -a
            if r > INT64_MAX:
                return Trap("integer-overflow")
            stack.append(r)
        elif op in (_EQ, _NE):
            b = stack.pop()
            a = stack.pop()
            ta, tb = type(a), type(b)
            if ta is not tb or ta not in (int, bool):
                m.decref(a)
                m.decref(b)
                return type_error()
            stack.append((a == b) if op == _EQ else (a != b))
        elif op in (_LT, _LE, _GT, _GE):
            b = stack.pop()
            a = stack.pop()
            if not (type(a) is int and type(b) is int):
                m.decref(a)
                m.decref(b)
                return type_error()
            if op == _LT:
                stack.append(a < b)
            elif op == _LE:
                stack.append(a <= b)
            elif op == _GT:
                stack.append(a > b)
            else:
                stack.append(a >= b)
        elif op == _NOT:
            a = stack.pop()
            if type(a) is not bool:
                m.decref(a)
                return type_error()
            stack.append(not a)
        elif op in (_AND, _OR):
            a = stack[-1]
            if type(a) is not bool:
                return type_error()
            if (op == _AND) != a:  # AND jumps on false, OR jumps on true
                frames[-1][1] = ins.operand
            else:
                stack.pop()
        elif op == _INDEX_LOAD:
            i = stack.pop()
            lst = stack.pop()
            if not (isinstance(lst, MList) and type(i) is int):
                m.decref(lst)
                return type_error()
            if i < 0 or i >= len(lst.items):
                m.decref(lst)
                return Trap("index-out-of-bounds")
            v = lst.items[i]
            m.incref(v)
            m.decref(lst)
            stack.append(v)
        elif op == _INDEX_STORE:
            v = stack.pop()
            i = stack.pop()
            lst = stack.pop()
            if not (isinstance(lst, MList) and type(i) is int):
                m.decref(v)
                m.decref(lst)
                return type_error()
            if i < 0 or i >= len(lst.items):
                m.decref(v)
                m.decref(lst)
                return Trap("index-out-of-bounds")
            vt = _tag_of(v)
            if lst.elemtag is None:
                lst.elemtag = vt
            elif lst.elemtag != vt:
                m.decref(v)
                m.decref(lst)
                return type_error()
            m.decref(lst.items[i])
            lst.items[i] = v
            m.decref(lst)
        elif op == _LIST_NEW:
            if ins.operand >= 0:
                k = ins.operand
                items = stack[len(stack) - k :] if k else []
                del stack[len(stack) - k :]
                elemtag = _tag_of(items[0]) if items else None
                for item in items:
                    if _tag_of(item) != elemtag:
                        for it in items:
                            m.decref(it)
                        return type_error()
                lst, ok = m.new_list(items, elemtag)
            else:
                fill = stack.pop()
                n = stack.pop()
                if type(n) is not int or n < 0:
                    m.decref(fill)
                    return type_error()
                if not m.room_for(1 + n):
                    m.live += 1 + n  # mirrors the compiled core's accounting
                    return BudgetExhausted("cells")
                elemtag = _tag_of(fill)
                items = [fill] * n
                if elemtag == "list":
                    # the n copies hold n refs; the stack ref is given up
                    fill.rc += n
                    m.decref(fill)
                lst, ok = m.new_list(items, elemtag)
            if not ok:
                return BudgetExhausted("cells")
            stack.append(lst)
        elif op == _LIST_PUSH:
            v = stack.pop()
            lst = stack[-1]
            if not isinstance(lst, MList):
                m.decref(v)
                return type_error()
            vt = _tag_of(v)
            if lst.elemtag is None:
                lst.elemtag = vt
            elif lst.elemtag != vt:
                m.decref(v)
                return type_error()
            lst.items.append(v)
            if not m.alloc_cells(1):
                return BudgetExhausted("cells")
        elif op == _LIST_POP:
            lst = stack.pop()
            if not isinstance(lst, MList):
                m.decref(lst)
                return type_error()
            if not lst.items:
                m.decref(lst)
                return Trap("pop-from-empty")
            v = lst.items.pop()
            m.free_cells(1)
            stack.append(v)
            m.decref(lst)
        elif op == _LIST_LEN:
            lst = stack.pop()
            if not isinstance(lst, MList):
                m.decref(lst)
                return type_error()
            n = len(lst.items)
            m.decref(lst)
            stack.append(n)
        elif op == _JUMP:
            frames[-1][1] = ins.operand
        elif op == _BRANCH:
            c = stack.pop()
            if type(c) is not bool:
                m.decref(c)
                return type_error()
            if not c:
                if ins.operand < 0:
                    return Trap("assertion-failure")
                frames[-1][1] = ins.operand
        elif op == _CALL:
            callee = functions[ins.operand]
            if len(frames) >= max_depth:
                return BudgetExhausted("depth")
            if not m.alloc_cells(2 + callee.n_slots):
                return BudgetExhausted("cells")
            new_slots = stack[len(stack) - callee.arity :] + [0] * (
                callee.n_slots - callee.arity
            )
            del stack[len(stack) - callee.arity :]
            frames.append([callee, 0, new_slots])
            stacks.append([])
        elif op == _RET:
            v = stack.pop()
            fr = frames.pop()
            stacks.pop()
            for s in fr[2]:
                m.decref(s)
            m.free_cells(2 + fr[0].n_slots)
            if not frames:
                out = _convert_out(v)
                m.decref(v)
                return out
            stacks[-1].append(v)
        elif op == _POP_TOP:
            m.decref(stack.pop())
        else:  # pragma: no cover
            raise AssertionError(f"bad opcode {op}")
