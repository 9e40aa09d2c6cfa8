"""Normalization passes over MiniAlg trees.

Four passes approximate a canonical "minimal" form of a program: alpha
renaming, dead-code elimination, single-use intermediate inlining, and
(opt-in) commutative operand ordering.  All passes are conservative; they
only rewrite where a syntactic purity check guarantees the rewrite cannot
change any observable outcome, trap, or budget event ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .lang import ast as A
from .lang.render import render_expr

__all__ = [
    "PassConfig",
    "alpha_canonicalize",
    "eliminate_dead_code",
    "inline_intermediates",
    "canonicalize_commutative",
    "normalize",
]


@dataclass(frozen=True)
class PassConfig:
    """Which passes run, and the fixed-point iteration bound.

    The commute pass is off by default so that operand-order differences
    remain visible to the stricter equivalence relations.
    """

    alpha: bool = True
    dce: bool = True
    inline: bool = True
    commute: bool = False
    max_iterations: int = 5

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


def is_pure(expr) -> bool:
    """Syntactic purity: no allocation, no mutation, no user calls.

    Pure expressions may still trap (division, indexing), so purity alone
    licenses deletion and single-evaluation moves, not reordering past
    other possibly-trapping work.
    """
    if isinstance(expr, (A.IntLit, A.BoolLit, A.Var)):
        return True
    if isinstance(expr, A.Unary):
        return is_pure(expr.operand)
    if isinstance(expr, A.Binary):
        return is_pure(expr.left) and is_pure(expr.right)
    if isinstance(expr, A.Index):
        return is_pure(expr.base) and is_pure(expr.index)
    if isinstance(expr, A.Call):
        return expr.name == "len" and all(is_pure(a) for a in expr.args)
    return False  # ListLit allocates; other calls mutate or recurse


def is_trap_free(expr) -> bool:
    """No division, modulo, indexing, or calls anywhere in the subtree."""
    for node in A.walk(expr):
        if isinstance(node, A.Binary) and node.op in ("/", "%"):
            return False
        if isinstance(node, (A.Index, A.Call)):
            return False
    return True


def _expr_vars(expr) -> set:
    return {n.name for n in A.walk(expr) if isinstance(n, A.Var)}


# --- alpha renaming ---

def alpha_canonicalize(tree: A.Ast) -> A.Ast:
    """Rename every parameter and local to v0, v1, ... per function.

    Numbering follows first occurrence in textual order (parameters
    first); function names are left alone so calls still resolve.
    """
    return A.Ast(tuple(_alpha_fn(fn) for fn in tree.functions))


def _alpha_fn(fn: A.Function) -> A.Function:
    mapping: dict = {}

    def name_of(old: str) -> str:
        if old not in mapping:
            mapping[old] = f"v{len(mapping)}"
        return mapping[old]

    for p in fn.params:
        name_of(p)
    params = tuple(mapping[p] for p in fn.params)
    body = _map_block(fn.body, lambda e: _alpha_expr(e, name_of),
                      rename=name_of)
    return A.Function(fn.name, params, body)


def _alpha_expr(expr, name_of):
    if isinstance(expr, A.Var):
        return A.Var(name_of(expr.name))
    return _map_expr_children(expr, lambda e: _alpha_expr(e, name_of))


def _map_expr_children(expr, f):
    if isinstance(expr, A.Unary):
        return A.Unary(expr.op, f(expr.operand))
    if isinstance(expr, A.Binary):
        return A.Binary(expr.op, f(expr.left), f(expr.right))
    if isinstance(expr, A.Index):
        return A.Index(f(expr.base), f(expr.index))
    if isinstance(expr, A.Call):
        return A.Call(expr.name, tuple(f(a) for a in expr.args))
    if isinstance(expr, A.ListLit):
        return A.ListLit(tuple(f(e) for e in expr.items))
    return expr


def _map_block(stmts, f, rename=None):
    """Rebuild a statement tuple applying ``f`` to every expression.

    ``rename`` (optional) maps binding and target names.
    """
    rn = rename or (lambda s: s)
    out = []
    for st in stmts:
        if isinstance(st, A.Let):
            out.append(A.Let(rn(st.name), f(st.value)))
        elif isinstance(st, A.Assign):
            out.append(A.Assign(rn(st.name), f(st.value)))
        elif isinstance(st, A.IndexAssign):
            out.append(A.IndexAssign(rn(st.name), f(st.index), f(st.value)))
        elif isinstance(st, A.If):
            out.append(A.If(f(st.cond),
                            _map_block(st.then, f, rename),
                            _map_block(st.orelse, f, rename)))
        elif isinstance(st, A.While):
            out.append(A.While(f(st.cond), _map_block(st.body, f, rename)))
        elif isinstance(st, A.ForRange):
            out.append(A.ForRange(rn(st.var), f(st.start), f(st.stop),
                                  f(st.step), _map_block(st.body, f, rename)))
        elif isinstance(st, A.Return):
            out.append(A.Return(f(st.value)))
        elif isinstance(st, A.Assert):
            out.append(A.Assert(f(st.cond)))
        elif isinstance(st, A.ExprStmt):
            out.append(A.ExprStmt(f(st.value)))
        else:  # pragma: no cover
            raise TypeError(f"unknown statement {st!r}")
    return tuple(out)


# --- dead-code elimination ---

def eliminate_dead_code(tree: A.Ast) -> A.Ast:
    return A.Ast(tuple(_dce_fn(fn) for fn in tree.functions))


def _dce_fn(fn: A.Function) -> A.Function:
    read = _read_vars(fn.body)
    # A let can only go if every later write to the name goes with it,
    # otherwise the surviving assignment would target an undeclared name.
    read = read | _impurely_written(fn.body)
    body = _dce_block(fn.body, read)
    return A.Function(fn.name, fn.params, body)


def _impurely_written(stmts) -> set:
    names: set = set()

    def block(body):
        for st in body:
            if isinstance(st, (A.Let, A.Assign)) and not is_pure(st.value):
                names.add(st.name)
            elif isinstance(st, A.If):
                block(st.then)
                block(st.orelse)
            elif isinstance(st, A.While):
                block(st.body)
            elif isinstance(st, A.ForRange):
                block(st.body)

    block(stmts)
    return names


def _read_vars(stmts) -> set:
    """Every variable read anywhere in the statements.

    Assignment targets do not count as reads, but an indexed store reads
    the list binding, and a for-range reads its bound expressions.
    """
    read: set = set()

    def expr(e):
        read.update(_expr_vars(e))

    def block(body):
        for st in body:
            if isinstance(st, (A.Let, A.Assign, A.Return, A.ExprStmt)):
                expr(st.value)
            elif isinstance(st, A.Assert):
                expr(st.cond)
            elif isinstance(st, A.IndexAssign):
                read.add(st.name)
                expr(st.index)
                expr(st.value)
            elif isinstance(st, A.If):
                expr(st.cond)
                block(st.then)
                block(st.orelse)
            elif isinstance(st, A.While):
                expr(st.cond)
                block(st.body)
            elif isinstance(st, A.ForRange):
                expr(st.start)
                expr(st.stop)
                expr(st.step)
                block(st.body)

    block(stmts)
    return read


def _dce_block(stmts, read):
    out = []
    for st in stmts:
        if isinstance(st, (A.Let, A.Assign)) and st.name not in read \
                and is_pure(st.value):
            continue  # write-only binding of a pure value
        if isinstance(st, A.If) and isinstance(st.cond, A.BoolLit):
            taken = st.then if st.cond.value else st.orelse
            for t in _dce_block(taken, read):
                out.append(t)
                if isinstance(t, A.Return):
                    return tuple(out)
            continue
        if isinstance(st, A.If):
            st = A.If(st.cond, _dce_block(st.then, read),
                      _dce_block(st.orelse, read))
        elif isinstance(st, A.While):
            if isinstance(st.cond, A.BoolLit) and not st.cond.value:
                continue
            st = A.While(st.cond, _dce_block(st.body, read))
        elif isinstance(st, A.ForRange):
            st = replace(st, body=_dce_block(st.body, read))
        out.append(st)
        if isinstance(st, A.Return):
            break  # later statements in this block are unreachable
    return tuple(out)


# --- single-use intermediate inlining ---

def inline_intermediates(tree: A.Ast) -> A.Ast:
    return A.Ast(tuple(_inline_fn(fn) for fn in tree.functions))


def _inline_fn(fn: A.Function) -> A.Function:
    reads = _read_counts(fn.body)
    writes = _write_counts(fn.body)
    body = _inline_block(fn.body, reads, writes)
    return A.Function(fn.name, fn.params, body)


def _read_counts(stmts) -> dict:
    counts: dict = {}
    for name in _iter_reads(stmts):
        counts[name] = counts.get(name, 0) + 1
    return counts


def _iter_reads(stmts):
    for st in stmts:
        if isinstance(st, (A.Let, A.Assign, A.Return, A.ExprStmt)):
            yield from _iter_expr_reads(st.value)
        elif isinstance(st, A.Assert):
            yield from _iter_expr_reads(st.cond)
        elif isinstance(st, A.IndexAssign):
            yield st.name
            yield from _iter_expr_reads(st.index)
            yield from _iter_expr_reads(st.value)
        elif isinstance(st, A.If):
            yield from _iter_expr_reads(st.cond)
            yield from _iter_reads(st.then)
            yield from _iter_reads(st.orelse)
        elif isinstance(st, A.While):
            yield from _iter_expr_reads(st.cond)
            yield from _iter_reads(st.body)
        elif isinstance(st, A.ForRange):
            yield from _iter_expr_reads(st.start)
            yield from _iter_expr_reads(st.stop)
            yield from _iter_expr_reads(st.step)
            yield from _iter_reads(st.body)


def _iter_expr_reads(expr):
    for n in A.walk(expr):
        if isinstance(n, A.Var):
            yield n.name


def _write_counts(stmts) -> dict:
    counts: dict = {}

    def bump(name):
        counts[name] = counts.get(name, 0) + 1

    def block(body):
        for st in body:
            if isinstance(st, (A.Let, A.Assign)):
                bump(st.name)
            elif isinstance(st, A.IndexAssign):
                bump(st.name)  # element store mutates the binding's list
            elif isinstance(st, A.If):
                block(st.then)
                block(st.orelse)
            elif isinstance(st, A.While):
                block(st.body)
            elif isinstance(st, A.ForRange):
                bump(st.var)
                block(st.body)

    block(stmts)
    return counts


def _stmt_writes(st) -> set:
    """Names (possibly) written anywhere inside one statement."""
    sub = _write_counts((st,))
    return set(sub)


def _inline_block(stmts, reads, writes):
    out = []
    i = 0
    stmts = list(stmts)
    while i < len(stmts):
        st = stmts[i]
        if isinstance(st, A.If):
            st = A.If(st.cond, _inline_block(st.then, reads, writes),
                      _inline_block(st.orelse, reads, writes))
        elif isinstance(st, A.While):
            st = A.While(st.cond, _inline_block(st.body, reads, writes))
        elif isinstance(st, A.ForRange):
            st = replace(st, body=_inline_block(st.body, reads, writes))
        if isinstance(st, A.Let) and is_pure(st.value) \
                and reads.get(st.name, 0) == 1 \
                and writes.get(st.name, 0) == 1:
            deps = _expr_vars(st.value) | {st.name}
            j = _find_safe_use(stmts, i + 1, st.name, deps)
            if j is not None and (j == i + 1 or is_trap_free(st.value)):
                # moving a possibly-trapping read past other statements
                # could reorder which trap fires first
                stmts[j] = _subst_stmt(stmts[j], st.name, st.value)
                i += 1
                continue
        out.append(st)
        i += 1
    return tuple(out)


def _find_safe_use(stmts, start, name, deps):
    """Index of the sibling statement holding the unique read of ``name``,
    or None if an intervening write (or a write inside the user itself)
    makes substitution unsafe."""
    for j in range(start, len(stmts)):
        st = stmts[j]
        w = _stmt_writes(st)
        uses = name in dict.fromkeys(_iter_reads((st,)))
        if uses:
            return None if w & deps else j
        if w & deps:
            return None
    return None


def _subst_stmt(st, name, value):
    def f(e):
        return _subst_expr(e, name, value)

    return _map_block((st,), f)[0]


def _subst_expr(expr, name, value):
    if isinstance(expr, A.Var) and expr.name == name:
        return value
    return _map_expr_children(expr, lambda e: _subst_expr(e, name, value))


# --- commutative operand ordering ---

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _fnv1a64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def _order_key(expr):
    text = render_expr(expr)
    return (_fnv1a64(text), text)


def canonicalize_commutative(tree: A.Ast) -> A.Ast:
    """Sort the operands of commutative operators into a canonical order.

    Arithmetic and (in)equality operands must both be pure; the logical
    operators additionally require both sides to be trap-free so the lost
    short-circuit cannot hide a trap.
    """
    def fix(expr):
        expr = _map_expr_children(expr, fix)
        if isinstance(expr, A.Binary) and expr.op in A.COMMUTATIVE_OPS:
            ok = is_pure(expr.left) and is_pure(expr.right)
            if expr.op in ("&&", "||"):
                ok = ok and is_trap_free(expr.left) and is_trap_free(expr.right)
            if ok and _order_key(expr.left) > _order_key(expr.right):
                expr = A.Binary(expr.op, expr.right, expr.left)
        return expr

    return A.Ast(tuple(
        A.Function(fn.name, fn.params, _map_block(fn.body, fix))
        for fn in tree.functions
    ))


# --- driver ---

def normalize(tree: A.Ast, cfg: PassConfig = None) -> A.Ast:
    """Run the enabled passes to a fixed point (bounded iterations)."""
    if cfg is None:
        cfg = PassConfig()
    for _ in range(cfg.max_iterations):
        before = tree
        if cfg.alpha:
            tree = alpha_canonicalize(tree)
        if cfg.dce:
            tree = eliminate_dead_code(tree)
        if cfg.inline:
            tree = inline_intermediates(tree)
        if cfg.commute:
            tree = canonicalize_commutative(tree)
        if cfg.alpha:
            tree = alpha_canonicalize(tree)
        if tree == before:
            break
    return tree
