"""Recursive-descent parser for MiniAlg.

Grammar (EBNF):

    program := fndef+
    fndef   := "fn" IDENT "(" [IDENT {"," IDENT}] ")" block
    block   := "{" {stmt} "}"
    stmt    := "let" IDENT "=" expr ";"
             | IDENT "=" expr ";"
             | IDENT "[" expr "]" "=" expr ";"
             | "if" expr block ["else" block]
             | "while" expr block
             | "for" IDENT "in" "range" "(" expr ["," expr ["," expr]] ")" block
             | "return" expr ";"
             | "assert" expr ";"
             | expr ";"

``range`` is normalized at parse time to the three-argument form, so the
render/parse round trip is stable.  ``#`` starts a line comment.
"""

from __future__ import annotations

import re

from ..errors import MiniAlgNameError, MiniAlgSyntaxError
from . import ast as A
from .source import SourceUnit

KEYWORDS = {
    "fn", "let", "if", "else", "while", "for", "in", "range",
    "return", "assert", "true", "false",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>&&|\|\||==|!=|<=|>=|[-+*/%!<>=(){}\[\],;])
    """,
    re.VERBOSE,
)

INT64_MAX = 2**63 - 1


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind!r}, {self.text!r}, {self.line}:{self.col})"


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise MiniAlgSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok_text = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            nl = tok_text.count("\n")
            if nl:
                line += nl
                line_start = pos + tok_text.rindex("\n") + 1
        elif kind == "comment":
            pass
        elif kind == "ident" and tok_text in KEYWORDS:
            tokens.append(Token(tok_text, tok_text, line, col))
        else:
            tokens.append(Token(kind, tok_text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, n - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str):
        tok = self.cur
        raise MiniAlgSyntaxError(message, tok.line, tok.col)

    def accept(self, kind):
        if self.cur.kind == kind:
            tok = self.cur
            self.i += 1
            return tok
        return None

    def accept_op(self, text):
        if self.cur.kind == "op" and self.cur.text == text:
            tok = self.cur
            self.i += 1
            return tok
        return None

    def expect(self, kind):
        tok = self.accept(kind)
        if tok is None:
            self.error(f"expected {kind}, found {self.cur.text or 'end of input'!r}")
        return tok

    def expect_op(self, text):
        tok = self.accept_op(text)
        if tok is None:
            self.error(f"expected {text!r}, found {self.cur.text or 'end of input'!r}")
        return tok

    def parse_program(self) -> A.Ast:
        functions = []
        while self.cur.kind != "eof":
            functions.append(self.parse_fndef())
        if not functions:
            self.error("expected at least one function definition")
        return A.Ast(functions=tuple(functions))

    def parse_fndef(self) -> A.Function:
        self.expect("fn")
        name = self.expect("ident").text
        self.expect_op("(")
        params = []
        if not self.accept_op(")"):
            params.append(self.expect("ident").text)
            while self.accept_op(","):
                params.append(self.expect("ident").text)
            self.expect_op(")")
        body = self.parse_block()
        return A.Function(name=name, params=tuple(params), body=body)

    def parse_block(self) -> tuple:
        self.expect_op("{")
        stmts = []
        while not self.accept_op("}"):
            if self.cur.kind == "eof":
                self.error("unterminated block")
            stmts.append(self.parse_stmt())
        return tuple(stmts)

    def parse_stmt(self):
        if self.accept("let"):
            name = self.expect("ident").text
            self.expect_op("=")
            value = self.parse_expr()
            self.expect_op(";")
            return A.Let(name=name, value=value)
        if self.accept("if"):
            cond = self.parse_expr()
            then = self.parse_block()
            orelse = self.parse_block() if self.accept("else") else ()
            return A.If(cond=cond, then=then, orelse=orelse)
        if self.accept("while"):
            cond = self.parse_expr()
            body = self.parse_block()
            return A.While(cond=cond, body=body)
        if self.accept("for"):
            var = self.expect("ident").text
            self.expect("in")
            self.expect("range")
            self.expect_op("(")
            first = self.parse_expr()
            second = third = None
            if self.accept_op(","):
                second = self.parse_expr()
                if self.accept_op(","):
                    third = self.parse_expr()
            self.expect_op(")")
            body = self.parse_block()
            if second is None:
                start, stop, step = A.IntLit(0), first, A.IntLit(1)
            elif third is None:
                start, stop, step = first, second, A.IntLit(1)
            else:
                start, stop, step = first, second, third
            return A.ForRange(var=var, start=start, stop=stop, step=step, body=body)
        if self.accept("return"):
            value = self.parse_expr()
            self.expect_op(";")
            return A.Return(value=value)
        if self.accept("assert"):
            cond = self.parse_expr()
            self.expect_op(";")
            return A.Assert(cond=cond)
        # assignment forms need lookahead past the identifier
        if self.cur.kind == "ident":
            nxt = self.tokens[self.i + 1]
            if nxt.kind == "op" and nxt.text == "=":
                name = self.expect("ident").text
                self.expect_op("=")
                value = self.parse_expr()
                self.expect_op(";")
                return A.Assign(name=name, value=value)
            if nxt.kind == "op" and nxt.text == "[":
                # could be an index assignment or an index expression statement
                save = self.i
                name = self.expect("ident").text
                self.expect_op("[")
                index = self.parse_expr()
                self.expect_op("]")
                if self.accept_op("="):
                    value = self.parse_expr()
                    self.expect_op(";")
                    return A.IndexAssign(name=name, index=index, value=value)
                self.i = save
        value = self.parse_expr()
        self.expect_op(";")
        return A.ExprStmt(value=value)

    # expression precedence, loosest first
    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        left = self.parse_and()
        while self.accept_op("||"):
            left = A.Binary(op="||", left=left, right=self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_equality()
        while self.accept_op("&&"):
            left = A.Binary(op="&&", left=left, right=self.parse_equality())
        return left

    def parse_equality(self):
        left = self.parse_comparison()
        while True:
            for op in ("==", "!="):
                if self.accept_op(op):
                    left = A.Binary(op=op, left=left, right=self.parse_comparison())
                    break
            else:
                return left

    def parse_comparison(self):
        left = self.parse_additive()
        while True:
            for op in ("<=", ">=", "<", ">"):
                if self.accept_op(op):
                    left = A.Binary(op=op, left=left, right=self.parse_additive())
                    break
            else:
                return left

    def parse_additive(self):
        left = self.parse_multiplicative()
        while True:
            if self.accept_op("+"):
                left = A.Binary(op="+", left=left, right=self.parse_multiplicative())
            elif self.accept_op("-"):
                left = A.Binary(op="-", left=left, right=self.parse_multiplicative())
            else:
                return left

    def parse_multiplicative(self):
        left = self.parse_unary()
        while True:
            matched = False
            for op in ("*", "/", "%"):
                if self.accept_op(op):
                    left = A.Binary(op=op, left=left, right=self.parse_unary())
                    matched = True
                    break
            if not matched:
                return left

    def parse_unary(self):
        if self.accept_op("-"):
            return A.Unary(op="-", operand=self.parse_unary())
        if self.accept_op("!"):
            return A.Unary(op="!", operand=self.parse_unary())
        return self.parse_postfix()

    def parse_postfix(self):
        expr = self.parse_primary()
        while True:
            if self.accept_op("["):
                index = self.parse_expr()
                self.expect_op("]")
                expr = A.Index(base=expr, index=index)
            else:
                return expr

    def parse_primary(self):
        tok = self.accept("int")
        if tok is not None:
            value = int(tok.text)
            if value > INT64_MAX:
                raise MiniAlgSyntaxError(
                    "integer literal out of 64-bit range", tok.line, tok.col
                )
            return A.IntLit(value)
        if self.accept("true"):
            return A.BoolLit(True)
        if self.accept("false"):
            return A.BoolLit(False)
        if self.accept_op("("):
            expr = self.parse_expr()
            self.expect_op(")")
            return expr
        if self.accept_op("["):
            items = []
            if not self.accept_op("]"):
                items.append(self.parse_expr())
                while self.accept_op(","):
                    items.append(self.parse_expr())
                self.expect_op("]")
            return A.ListLit(items=tuple(items))
        tok = self.accept("ident")
        if tok is not None:
            if self.accept_op("("):
                args = []
                if not self.accept_op(")"):
                    args.append(self.parse_expr())
                    while self.accept_op(","):
                        args.append(self.parse_expr())
                    self.expect_op(")")
                return A.Call(name=tok.text, args=tuple(args))
            return A.Var(name=tok.text)
        self.error(f"expected expression, found {self.cur.text or 'end of input'!r}")


def parse(source) -> A.Ast:
    """Parse a :class:`SourceUnit` (or raw text) into a validated Ast."""
    if not isinstance(source, SourceUnit):
        source = SourceUnit.from_text(source)
    tokens = tokenize(source.text)
    tree = _Parser(tokens).parse_program()
    validate(tree)
    return tree


def validate(tree: A.Ast) -> None:
    """Check name binding and call arity; raises MiniAlgNameError."""
    arities = {}
    for fn in tree.functions:
        if fn.name in arities:
            raise MiniAlgNameError(f"duplicate function {fn.name!r}")
        if fn.name in A.BUILTINS:
            raise MiniAlgNameError(f"function {fn.name!r} shadows a builtin")
        arities[fn.name] = len(fn.params)

    for fn in tree.functions:
        bound = set(fn.params)
        if len(bound) != len(fn.params):
            raise MiniAlgNameError(f"duplicate parameter in {fn.name!r}")
        _validate_block(fn, fn.body, bound, arities)


def _validate_block(fn, stmts, bound, arities):
    for stmt in stmts:
        if isinstance(stmt, A.Let):
            _validate_expr(fn, stmt.value, bound, arities)
            bound.add(stmt.name)
        elif isinstance(stmt, A.Assign):
            if stmt.name not in bound:
                raise MiniAlgNameError(
                    f"assignment to undeclared {stmt.name!r} in {fn.name!r}"
                )
            _validate_expr(fn, stmt.value, bound, arities)
        elif isinstance(stmt, A.IndexAssign):
            if stmt.name not in bound:
                raise MiniAlgNameError(
                    f"assignment to undeclared {stmt.name!r} in {fn.name!r}"
                )
            _validate_expr(fn, stmt.index, bound, arities)
            _validate_expr(fn, stmt.value, bound, arities)
        elif isinstance(stmt, A.If):
            _validate_expr(fn, stmt.cond, bound, arities)
            _validate_block(fn, stmt.then, bound, arities)
            _validate_block(fn, stmt.orelse, bound, arities)
        elif isinstance(stmt, A.While):
            _validate_expr(fn, stmt.cond, bound, arities)
            _validate_block(fn, stmt.body, bound, arities)
        elif isinstance(stmt, A.ForRange):
            for e in (stmt.start, stmt.stop, stmt.step):
                _validate_expr(fn, e, bound, arities)
            bound.add(stmt.var)
            _validate_block(fn, stmt.body, bound, arities)
        elif isinstance(stmt, A.Return):
            _validate_expr(fn, stmt.value, bound, arities)
        elif isinstance(stmt, A.Assert):
            _validate_expr(fn, stmt.cond, bound, arities)
        elif isinstance(stmt, A.ExprStmt):
            _validate_expr(fn, stmt.value, bound, arities)
        else:  # pragma: no cover
            raise TypeError(f"unknown statement {stmt!r}")


def _validate_expr(fn, expr, bound, arities):
    if isinstance(expr, A.Var):
        if expr.name not in bound:
            raise MiniAlgNameError(f"unknown identifier {expr.name!r} in {fn.name!r}")
    elif isinstance(expr, A.Call):
        if expr.name in A.BUILTINS:
            want = A.BUILTINS[expr.name]
        elif expr.name in arities:
            want = arities[expr.name]
        else:
            raise MiniAlgNameError(f"call to unknown function {expr.name!r} in {fn.name!r}")
        if len(expr.args) != want:
            raise MiniAlgNameError(
                f"{expr.name!r} expects {want} argument(s), got {len(expr.args)}"
            )
        for a in expr.args:
            _validate_expr(fn, a, bound, arities)
    elif isinstance(expr, A.Unary):
        _validate_expr(fn, expr.operand, bound, arities)
    elif isinstance(expr, A.Binary):
        _validate_expr(fn, expr.left, bound, arities)
        _validate_expr(fn, expr.right, bound, arities)
    elif isinstance(expr, A.Index):
        _validate_expr(fn, expr.base, bound, arities)
        _validate_expr(fn, expr.index, bound, arities)
    elif isinstance(expr, A.ListLit):
        for item in expr.items:
            _validate_expr(fn, item, bound, arities)
    elif isinstance(expr, (A.IntLit, A.BoolLit)):
        pass
    else:  # pragma: no cover
        raise TypeError(f"unknown expression {expr!r}")
