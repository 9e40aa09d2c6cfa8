"""Canonical source renderer.

Formatting is fixed: two-space indentation, one statement per line,
three-argument ``range``.  ``parse(render(t))`` reproduces ``t`` for every
tree the parser (and the normalizer passes) can produce.
"""

from __future__ import annotations

from . import ast as A
from .source import SourceUnit

_PREC = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_UNARY_PREC = 7
_ATOM_PREC = 9


def render(tree: A.Ast) -> SourceUnit:
    lines = []
    for i, fn in enumerate(tree.functions):
        if i:
            lines.append("")
        params = ", ".join(fn.params)
        lines.append(f"fn {fn.name}({params}) {{")
        _render_block(lines, fn.body, 1)
        lines.append("}")
    return SourceUnit(text="\n".join(lines) + "\n", origin="<render>")


def render_expr(expr) -> str:
    return _expr(expr, 0)


def _render_block(lines, stmts, depth):
    pad = "  " * depth
    for stmt in stmts:
        if isinstance(stmt, A.Let):
            lines.append(f"{pad}let {stmt.name} = {_expr(stmt.value, 0)};")
        elif isinstance(stmt, A.Assign):
            lines.append(f"{pad}{stmt.name} = {_expr(stmt.value, 0)};")
        elif isinstance(stmt, A.IndexAssign):
            lines.append(
                f"{pad}{stmt.name}[{_expr(stmt.index, 0)}] = {_expr(stmt.value, 0)};"
            )
        elif isinstance(stmt, A.If):
            lines.append(f"{pad}if {_expr(stmt.cond, 0)} {{")
            _render_block(lines, stmt.then, depth + 1)
            if stmt.orelse:
                lines.append(f"{pad}}} else {{")
                _render_block(lines, stmt.orelse, depth + 1)
            lines.append(f"{pad}}}")
        elif isinstance(stmt, A.While):
            lines.append(f"{pad}while {_expr(stmt.cond, 0)} {{")
            _render_block(lines, stmt.body, depth + 1)
            lines.append(f"{pad}}}")
        elif isinstance(stmt, A.ForRange):
            head = (
                f"{pad}for {stmt.var} in range({_expr(stmt.start, 0)}, "
                f"{_expr(stmt.stop, 0)}, {_expr(stmt.step, 0)}) {{"
            )
            lines.append(head)
            _render_block(lines, stmt.body, depth + 1)
            lines.append(f"{pad}}}")
        elif isinstance(stmt, A.Return):
            lines.append(f"{pad}return {_expr(stmt.value, 0)};")
        elif isinstance(stmt, A.Assert):
            lines.append(f"{pad}assert {_expr(stmt.cond, 0)};")
        elif isinstance(stmt, A.ExprStmt):
            lines.append(f"{pad}{_expr(stmt.value, 0)};")
        else:  # pragma: no cover
            raise TypeError(f"unknown statement {stmt!r}")


def _expr(expr, parent_prec) -> str:
    if isinstance(expr, A.IntLit):
        return str(expr.value)
    if isinstance(expr, A.BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, A.Var):
        return expr.name
    if isinstance(expr, A.ListLit):
        return "[" + ", ".join(_expr(e, 0) for e in expr.items) + "]"
    if isinstance(expr, A.Call):
        return expr.name + "(" + ", ".join(_expr(a, 0) for a in expr.args) + ")"
    if isinstance(expr, A.Index):
        return _expr(expr.base, _ATOM_PREC) + "[" + _expr(expr.index, 0) + "]"
    if isinstance(expr, A.Unary):
        text = expr.op + _expr(expr.operand, _UNARY_PREC)
        return f"({text})" if parent_prec > _UNARY_PREC else text
    if isinstance(expr, A.Binary):
        prec = _PREC[expr.op]
        left = _expr(expr.left, prec)
        right = _expr(expr.right, prec + 1)  # left-associative
        text = f"{left} {expr.op} {right}"
        return f"({text})" if parent_prec > prec else text
    raise TypeError(f"unknown expression {expr!r}")  # pragma: no cover
