"""Lowering from Ast to the slot-resolved instruction stream.

Names are resolved to dense slot indices (parameters first, then locals in
first-binding order, then hidden loop temporaries), so consistent renaming
cannot change the stream.  Expressions whose operands are all constants are
folded, except where folding would hide a runtime trap.  An ``assert`` whose
condition folds to ``true`` emits nothing.
"""

from __future__ import annotations

from ..bytecode import (
    INT64_MAX,
    INT64_MIN,
    OP,
    FunctionCode,
    Instr,
    InstructionStream,
)
from . import ast as A


def lower(tree: A.Ast) -> InstructionStream:
    fn_index = {fn.name: i for i, fn in enumerate(tree.functions)}
    out = []
    for fn in tree.functions:
        out.append(_FunctionLowerer(fn, fn_index).run())
    return InstructionStream(functions=tuple(out))


def fold_expr(expr):
    """Constant-fold an expression; returns an equivalent (maybe smaller) tree."""
    if isinstance(expr, A.Unary):
        operand = fold_expr(expr.operand)
        if expr.op == "-" and isinstance(operand, A.IntLit):
            v = -operand.value
            if INT64_MIN <= v <= INT64_MAX:
                return A.IntLit(v)
        if expr.op == "!" and isinstance(operand, A.BoolLit):
            return A.BoolLit(not operand.value)
        return A.Unary(op=expr.op, operand=operand)
    if isinstance(expr, A.Binary):
        left = fold_expr(expr.left)
        right = fold_expr(expr.right)
        op = expr.op
        if op in ("&&", "||") and isinstance(left, A.BoolLit):
            if op == "&&":
                return right if left.value else A.BoolLit(False)
            return A.BoolLit(True) if left.value else right
        if isinstance(left, A.IntLit) and isinstance(right, A.IntLit):
            folded = _fold_int_op(op, left.value, right.value)
            if folded is not None:
                return folded
        if isinstance(left, A.BoolLit) and isinstance(right, A.BoolLit):
            if op == "==":
                return A.BoolLit(left.value == right.value)
            if op == "!=":
                return A.BoolLit(left.value != right.value)
        return A.Binary(op=op, left=left, right=right)
    if isinstance(expr, A.Index):
        return A.Index(base=fold_expr(expr.base), index=fold_expr(expr.index))
    if isinstance(expr, A.Call):
        return A.Call(name=expr.name, args=tuple(fold_expr(a) for a in expr.args))
    if isinstance(expr, A.ListLit):
        return A.ListLit(items=tuple(fold_expr(e) for e in expr.items))
    return expr


def _fold_int_op(op, a, b):
    if op == "+":
        v = a + b
    elif op == "-":
        v = a - b
    elif op == "*":
        v = a * b
    elif op == "/":
        if b == 0:
            return None  # keep the runtime trap
        v = a // b
    elif op == "%":
        if b == 0:
            return None
        v = a % b
    elif op in ("==", "!=", "<", "<=", ">", ">="):
        return A.BoolLit(
            {"==": a == b, "!=": a != b, "<": a < b,
             "<=": a <= b, ">": a > b, ">=": a >= b}[op]
        )
    else:
        return None
    if INT64_MIN <= v <= INT64_MAX:
        return A.IntLit(v)
    return None  # would overflow at runtime; keep the trap


_BINOP_CODE = {
    "+": "ADD", "-": "SUB", "*": "MUL", "/": "DIV", "%": "MOD",
    "==": "EQ", "!=": "NE", "<": "LT", "<=": "LE", ">": "GT", ">=": "GE",
}


class _FunctionLowerer:
    def __init__(self, fn: A.Function, fn_index: dict):
        self.fn = fn
        self.fn_index = fn_index
        self.slots = {name: i for i, name in enumerate(fn.params)}
        self.n_slots = len(fn.params)
        self.code: list[Instr] = []

    def run(self) -> FunctionCode:
        self.block(self.fn.body)
        if not self.code or self.code[-1].op != OP["RET"]:
            self.emit("CONST", 0)
            self.emit("RET")
        return FunctionCode(
            name=self.fn.name,
            arity=len(self.fn.params),
            n_slots=self.n_slots,
            instrs=tuple(self.code),
        )

    def emit(self, name, operand=0, aux=0) -> int:
        self.code.append(Instr(op=OP[name], operand=operand, aux=aux))
        return len(self.code) - 1

    def patch(self, at: int, target: int) -> None:
        ins = self.code[at]
        self.code[at] = Instr(op=ins.op, operand=target, aux=ins.aux)

    def here(self) -> int:
        return len(self.code)

    def slot(self, name: str) -> int:
        if name not in self.slots:
            self.slots[name] = self.n_slots
            self.n_slots += 1
        return self.slots[name]

    def hidden_slot(self) -> int:
        s = self.n_slots
        self.n_slots += 1
        return s

    # --- statements ---

    def block(self, stmts) -> None:
        for stmt in stmts:
            self.stmt(stmt)

    def stmt(self, stmt) -> None:
        if isinstance(stmt, (A.Let, A.Assign)):
            self.expr(fold_expr(stmt.value))
            self.emit("STORE", self.slot(stmt.name))
        elif isinstance(stmt, A.IndexAssign):
            self.emit("LOAD", self.slot(stmt.name))
            self.expr(fold_expr(stmt.index))
            self.expr(fold_expr(stmt.value))
            self.emit("INDEX_STORE")
        elif isinstance(stmt, A.If):
            cond = fold_expr(stmt.cond)
            self.expr(cond)
            br = self.emit("BRANCH")
            self.block(stmt.then)
            if stmt.orelse:
                jmp = self.emit("JUMP")
                self.patch(br, self.here())
                self.block(stmt.orelse)
                self.patch(jmp, self.here())
            else:
                self.patch(br, self.here())
        elif isinstance(stmt, A.While):
            head = self.here()
            self.expr(fold_expr(stmt.cond))
            br = self.emit("BRANCH")
            self.block(stmt.body)
            self.emit("JUMP", head)
            self.patch(br, self.here())
        elif isinstance(stmt, A.ForRange):
            self.for_range(stmt)
        elif isinstance(stmt, A.Return):
            self.expr(fold_expr(stmt.value))
            self.emit("RET")
        elif isinstance(stmt, A.Assert):
            cond = fold_expr(stmt.cond)
            if isinstance(cond, A.BoolLit) and cond.value:
                return  # statically true: no instructions
            self.expr(cond)
            self.emit("BRANCH", -1)
        elif isinstance(stmt, A.ExprStmt):
            self.expr(fold_expr(stmt.value))
            self.emit("POP_TOP")
        else:  # pragma: no cover
            raise TypeError(f"unknown statement {stmt!r}")

    def for_range(self, stmt: A.ForRange) -> None:
        var = self.slot(stmt.var)
        self.expr(fold_expr(stmt.start))
        self.emit("STORE", var)
        limit = self.hidden_slot()
        self.expr(fold_expr(stmt.stop))
        self.emit("STORE", limit)
        step = fold_expr(stmt.step)
        if isinstance(step, A.IntLit):
            if step.value == 0:
                self.emit("CONST", 0, aux=1)
                self.emit("BRANCH", -1)  # zero step traps as assertion failure
                return
            head = self.here()
            self.emit("LOAD", var)
            self.emit("LOAD", limit)
            self.emit("LT" if step.value > 0 else "GT")
            br = self.emit("BRANCH")
            self.block(stmt.body)
            self.emit("LOAD", var)
            self.emit("CONST", step.value)
            self.emit("ADD")
            self.emit("STORE", var)
            self.emit("JUMP", head)
            self.patch(br, self.here())
        else:
            step_slot = self.hidden_slot()
            self.expr(step)
            self.emit("STORE", step_slot)
            self.emit("LOAD", step_slot)
            self.emit("CONST", 0)
            self.emit("NE")
            self.emit("BRANCH", -1)  # zero step traps
            head = self.here()
            self.emit("LOAD", step_slot)
            self.emit("CONST", 0)
            self.emit("GT")
            br_neg = self.emit("BRANCH")
            self.emit("LOAD", var)
            self.emit("LOAD", limit)
            self.emit("LT")
            br_end1 = self.emit("BRANCH")
            jmp_body = self.emit("JUMP")
            self.patch(br_neg, self.here())
            self.emit("LOAD", var)
            self.emit("LOAD", limit)
            self.emit("GT")
            br_end2 = self.emit("BRANCH")
            self.patch(jmp_body, self.here())
            self.block(stmt.body)
            self.emit("LOAD", var)
            self.emit("LOAD", step_slot)
            self.emit("ADD")
            self.emit("STORE", var)
            self.emit("JUMP", head)
            end = self.here()
            self.patch(br_end1, end)
            self.patch(br_end2, end)

    # --- expressions (already folded by callers at statement level) ---

    def expr(self, expr) -> None:
        if isinstance(expr, A.IntLit):
            self.emit("CONST", expr.value)
        elif isinstance(expr, A.BoolLit):
            self.emit("CONST", 1 if expr.value else 0, aux=1)
        elif isinstance(expr, A.Var):
            self.emit("LOAD", self.slot(expr.name))
        elif isinstance(expr, A.Unary):
            self.expr(expr.operand)
            self.emit("NEG" if expr.op == "-" else "NOT")
        elif isinstance(expr, A.Binary):
            if expr.op in ("&&", "||"):
                self.expr(expr.left)
                jump = self.emit("AND" if expr.op == "&&" else "OR")
                self.expr(expr.right)
                self.patch(jump, self.here())
            else:
                self.expr(expr.left)
                self.expr(expr.right)
                self.emit(_BINOP_CODE[expr.op])
        elif isinstance(expr, A.Index):
            self.expr(expr.base)
            self.expr(expr.index)
            self.emit("INDEX_LOAD")
        elif isinstance(expr, A.ListLit):
            for item in expr.items:
                self.expr(item)
            self.emit("LIST_NEW", len(expr.items))
        elif isinstance(expr, A.Call):
            if expr.name == "len":
                self.expr(expr.args[0])
                self.emit("LIST_LEN")
            elif expr.name == "push":
                self.expr(expr.args[0])
                self.expr(expr.args[1])
                self.emit("LIST_PUSH")
            elif expr.name == "pop":
                self.expr(expr.args[0])
                self.emit("LIST_POP")
            elif expr.name == "make_list":
                self.expr(expr.args[0])
                self.expr(expr.args[1])
                self.emit("LIST_NEW", -1)
            else:
                for a in expr.args:
                    self.expr(a)
                self.emit("CALL", self.fn_index[expr.name])
        else:  # pragma: no cover
            raise TypeError(f"unknown expression {expr!r}")
