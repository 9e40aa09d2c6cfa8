"""Abstract syntax for MiniAlg.

Nodes are immutable and position-free, so structural equality is plain
dataclass equality.  Source positions live only in the parser's token
stream; by the time an :class:`Ast` exists they have been dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

BUILTINS = {"len": 1, "push": 2, "pop": 1, "make_list": 2}

BINARY_OPS = (
    "+", "-", "*", "/", "%",
    "==", "!=", "<", "<=", ">", ">=",
    "&&", "||",
)
COMMUTATIVE_OPS = ("+", "*", "==", "!=", "&&", "||")
UNARY_OPS = ("-", "!")


class Node:
    __slots__ = ()


# --- expressions ---

@dataclass(frozen=True)
class IntLit(Node):
    value: int


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool


@dataclass(frozen=True)
class ListLit(Node):
    items: tuple


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Unary(Node):
    op: str
    operand: Node


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Index(Node):
    base: Node
    index: Node


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple


# --- statements ---

@dataclass(frozen=True)
class Let(Node):
    name: str
    value: Node


@dataclass(frozen=True)
class Assign(Node):
    name: str
    value: Node


@dataclass(frozen=True)
class IndexAssign(Node):
    name: str
    index: Node
    value: Node


@dataclass(frozen=True)
class If(Node):
    cond: Node
    then: tuple
    orelse: tuple


@dataclass(frozen=True)
class While(Node):
    cond: Node
    body: tuple


@dataclass(frozen=True)
class ForRange(Node):
    var: str
    start: Node
    stop: Node
    step: Node
    body: tuple


@dataclass(frozen=True)
class Return(Node):
    value: Node


@dataclass(frozen=True)
class Assert(Node):
    cond: Node


@dataclass(frozen=True)
class ExprStmt(Node):
    value: Node


@dataclass(frozen=True)
class Function(Node):
    name: str
    params: tuple
    body: tuple


@dataclass(frozen=True)
class Ast(Node):
    functions: tuple

    def function(self, name: str) -> Function:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    def has_function(self, name: str) -> bool:
        return any(f.name == name for f in self.functions)


def walk(node):
    """Yield node and every descendant in pre-order."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, Ast):
            stack.extend(reversed(n.functions))
        elif isinstance(n, Function):
            stack.extend(reversed(n.body))
        elif isinstance(n, (If,)):
            stack.append(n.cond)
            stack.extend(reversed(n.then))
            stack.extend(reversed(n.orelse))
        elif isinstance(n, While):
            stack.append(n.cond)
            stack.extend(reversed(n.body))
        elif isinstance(n, ForRange):
            stack.extend([n.start, n.stop, n.step])
            stack.extend(reversed(n.body))
        elif isinstance(n, (Let, Assign, Return, Assert, ExprStmt)):
            stack.append(n.value if not isinstance(n, Assert) else n.cond)
        elif isinstance(n, IndexAssign):
            stack.extend([n.index, n.value])
        elif isinstance(n, Unary):
            stack.append(n.operand)
        elif isinstance(n, Binary):
            stack.extend([n.left, n.right])
        elif isinstance(n, Index):
            stack.extend([n.base, n.index])
        elif isinstance(n, Call):
            stack.extend(reversed(n.args))
        elif isinstance(n, ListLit):
            stack.extend(reversed(n.items))
