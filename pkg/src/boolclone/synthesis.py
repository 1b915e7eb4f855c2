"""Brute-force closure oracle, witness-term synthesis, basis conversion, and
constant elimination.

The closure oracle enumerates the n-ary part of the clone generated by a
gate set: seed with the n projections and repeatedly apply every gate to
tuples of already-derived tables until fixpoint.  Discovery order is fully
deterministic (rounds, then gates in basis order, then argument tuples in
lexicographic order of discovery indices), so synthesized witness terms are
reproducible and minimal in layer depth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .errors import CapacityError, ConversionRefused, InputError, InternalError, LogicError
from .funcore import (
    AND,
    OR,
    ZERO,
    ONE,
    Basis,
    BoolFun,
    CircuitBuilder,
    CircuitDAG,
    Node,
    TApp,
    TVar,
    Term,
    basis_from_functions,
    table_mask,
    truth_table,
    var_mask,
)
from . import lattice

CLOSURE_ARITY_CAP = 4
_DEFAULT_TUPLE_BUDGET = 50_000_000
_NUMPY_MIN_KNOWN = 64
_CHUNK = 1 << 21


@dataclass(frozen=True)
class ClosureEntry:
    table: int
    layer: int
    gate: Optional[int]  # index into the gate list; None for projections
    args: tuple  # argument table values
    proj: Optional[int]  # variable index for projections


@dataclass
class ClosureResult:
    arity: int
    gates: list
    entries: dict  # table -> ClosureEntry
    order: list  # tables in discovery order

    def __contains__(self, f: Union[BoolFun, int]) -> bool:
        t = f.table if isinstance(f, BoolFun) else f
        return t in self.entries

    def functions(self) -> list[BoolFun]:
        return [BoolFun(self.arity, t) for t in self.order]

    def term_for(self, table: int, basis: Basis) -> Term:
        """Materialize the recorded minimal-layer witness as a Term."""
        if table not in self.entries:
            raise LogicError("table was not derived by this closure")
        if len(basis.gates) != len(self.gates):
            raise InputError("basis does not match the closure's gate list")
        memo: dict[int, Node] = {}

        def build(t: int) -> Node:
            if t in memo:
                return memo[t]
            e = self.entries[t]
            if e.proj is not None:
                node: Node = TVar(e.proj)
            else:
                gname = basis.gates[e.gate][0]
                node = TApp(gname, tuple(build(a) for a in e.args))
            memo[t] = node
            return node

        return Term(basis, self.arity, build(table))


def _as_gate_list(funs) -> tuple[list[str], list[BoolFun]]:
    if isinstance(funs, Basis):
        return [g for g, _ in funs.gates], [f for _, f in funs.gates]
    fs = list(funs)
    return [f"g{i}" for i in range(len(fs))], fs


def _apply_rows(gate: BoolFun, arg_cols: list[np.ndarray], full: int) -> np.ndarray:
    out = np.zeros(len(arg_cols[0]), dtype=np.int64)
    for row in range(1 << gate.arity):
        if not gate(row):
            continue
        acc = np.full(len(arg_cols[0]), full, dtype=np.int64)
        for pos in range(gate.arity):
            col = arg_cols[pos]
            if (row >> pos) & 1:
                acc &= col
            else:
                acc &= ~col & full
        out |= acc
    return out


def closure(
    funs,
    n: int,
    budget: int = _DEFAULT_TUPLE_BUDGET,
) -> ClosureResult:
    """The n-ary part of the clone generated by ``funs`` (a Basis or a list
    of BoolFun), with a minimal-layer witness per derived table."""
    if n < 1 or n > CLOSURE_ARITY_CAP:
        raise CapacityError(
            f"closure oracle supports arity 1..{CLOSURE_ARITY_CAP}, got {n}"
        )
    _, gates = _as_gate_list(funs)
    full = table_mask(n)
    total_tables = 1 << (1 << n)

    entries: dict[int, ClosureEntry] = {}
    order: list[int] = []
    seen = np.zeros(total_tables, dtype=bool)

    def add(table: int, layer: int, gate_i: Optional[int], args: tuple,
            proj: Optional[int]) -> None:
        if table not in entries:
            entries[table] = ClosureEntry(table, layer, gate_i, args, proj)
            order.append(table)
            seen[table] = True

    for i in range(n):
        add(var_mask(n, i), 0, None, (), i)

    spent = 0
    prev_size = 0
    layer = 0
    while True:
        size = len(order)
        if size == prev_size or len(entries) == total_tables:
            break
        layer += 1
        known = list(order)
        karr = np.array(known, dtype=np.int64)
        new_tuples_round = sum(
            size ** g.arity - prev_size ** g.arity for g in gates
        )
        spent += new_tuples_round
        if spent > budget:
            raise CapacityError(
                f"closure tuple budget exceeded ({spent} > {budget})"
            )
        for gi, g in enumerate(gates):
            k = g.arity
            if k <= 2 and size >= _NUMPY_MIN_KNOWN:
                _round_numpy(g, gi, karr, known, prev_size, size, layer,
                             add, seen, full)
            else:
                for tup in itertools.product(range(size), repeat=k):
                    if max(tup) < prev_size:
                        continue
                    cols = [known[t] for t in tup]
                    table = _apply_ints(g, cols, full)
                    add(table, layer, gi, tuple(cols), None)
        prev_size = size

    return ClosureResult(n, gates, entries, order)


def _apply_ints(gate: BoolFun, cols: list[int], full: int) -> int:
    out = 0
    for row in range(1 << gate.arity):
        if not gate(row):
            continue
        acc = full
        for pos in range(gate.arity):
            acc &= cols[pos] if (row >> pos) & 1 else ~cols[pos] & full
            if not acc:
                break
        out |= acc
    return out


def _round_numpy(g, gi, karr, known, prev_size, size, layer, add, seen, full):
    k = g.arity
    segments: list[tuple[np.ndarray, ...]] = []
    if k == 1:
        idx = np.arange(prev_size, size, dtype=np.int64)
        segments.append((idx,))
    else:
        old = np.arange(prev_size, dtype=np.int64)
        new = np.arange(prev_size, size, dtype=np.int64)
        allv = np.arange(size, dtype=np.int64)
        if prev_size:
            segments.append((
                np.repeat(old, size - prev_size),
                np.tile(new, prev_size),
            ))
        segments.append((
            np.repeat(new, size),
            np.tile(allv, size - prev_size),
        ))
    for seg in segments:
        count = len(seg[0])
        for off in range(0, count, _CHUNK):
            parts = [s[off:off + _CHUNK] for s in seg]
            cols = [karr[p] for p in parts]
            out = _apply_rows(g, cols, full)
            fresh = np.nonzero(~seen[out])[0]
            for pos in fresh.tolist():
                add(
                    int(out[pos]),
                    layer,
                    gi,
                    tuple(known[int(p[pos])] for p in parts),
                    None,
                )


def closure_member(f: BoolFun, funs) -> bool:
    """Oracle membership: f in [F] iff its table shows up in the closure."""
    return f.table in closure(funs, f.arity).entries


def synthesize(f: BoolFun, funs) -> Term:
    """A term over the given basis computing f, minimal in the closure's
    layer order with deterministic tie-breaking."""
    names, gates = _as_gate_list(funs)
    basis = funs if isinstance(funs, Basis) else basis_from_functions(
        "synth", list(zip(names, gates))
    )
    if f.arity > CLOSURE_ARITY_CAP:
        raise CapacityError(
            f"synthesis is capped at arity {CLOSURE_ARITY_CAP}"
        )
    result = closure(basis, f.arity)
    if f.table not in result.entries:
        raise LogicError("target function is not a member of the clone")
    term = result.term_for(f.table, basis)
    if truth_table(term) != f:
        raise InternalError("synthesized term does not evaluate to the target")
    return term


# ---------------------------------------------------------------------------
# Basis conversion (gate-by-gate substitution)


def _gate_definition(gate_name: str, fun: BoolFun, source: Basis,
                     target: Basis) -> Term:
    t = source.definitions.get(gate_name)
    if t is not None and t.basis == target:
        return t
    res = lattice.member(fun, target.functions())
    if not res:
        raise ConversionRefused(gate_name, res.separator_name())
    return synthesize(fun, target)


def _instantiate(builder: CircuitBuilder, node: Node, args: list[int],
                 memo: dict) -> int:
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, TVar):
        r = args[node.index]
    else:
        r = builder.gate(
            node.gate, [_instantiate(builder, c, args, memo) for c in node.children]
        )
    memo[key] = r
    return r


def convert_basis(c: CircuitDAG, target: Basis, verify: bool = True) -> CircuitDAG:
    """Rewrite a circuit over a new basis by substituting a fixed expression
    for every gate; refuses (naming the gate and a separating relation) when
    some gate function is not in the target clone."""
    defs: dict[str, Term] = {}
    for gname in sorted(c.gate_names()):
        defs[gname] = _gate_definition(gname, c.basis.fun(gname), c.basis, target)
    builder = CircuitBuilder(target, c.arity)
    node_map: list[int] = []
    for kind, payload in c.nodes:
        if kind == "var":
            node_map.append(builder.var(payload))
        else:
            args = [node_map[j] for j in payload]
            node_map.append(
                _instantiate(builder, defs[kind].root, args, {})
            )
    out = builder.finish(node_map[c.output])
    if verify and c.arity <= 20:
        if truth_table(c) != truth_table(out):
            raise InternalError("basis conversion changed the function")
    return out


# ---------------------------------------------------------------------------
# Constant elimination


def and_all_term(basis: Basis, n: int, and2: Term) -> Term:
    """Balanced conjunction of x_0..x_{n-1} built from a binary-AND term."""
    return _fold_balanced(basis, n, and2)


def or_all_term(basis: Basis, n: int, or2: Term) -> Term:
    return _fold_balanced(basis, n, or2)


def _subst_binary(op: Term, left: Node, right: Node) -> Node:
    def go(node: Node, memo: dict) -> Node:
        if id(node) in memo:
            return memo[id(node)]
        if isinstance(node, TVar):
            out = left if node.index == 0 else right
        else:
            out = TApp(node.gate, tuple(go(ch, memo) for ch in node.children))
        memo[id(node)] = out
        return out

    return go(op.root, {})


def _fold_balanced(basis: Basis, n: int, op2: Term) -> Term:
    nodes: list[Node] = [TVar(i) for i in range(n)]
    while len(nodes) > 1:
        nxt: list[Node] = []
        for i in range(0, len(nodes) - 1, 2):
            nxt.append(_subst_binary(op2, nodes[i], nodes[i + 1]))
        if len(nodes) % 2:
            nxt.append(nodes[-1])
        nodes = nxt
    return Term(basis, n, nodes[0])


_ZERO_GATE = "__ZERO__"
_ONE_GATE = "__ONE__"


def eliminate_constants(c: CircuitDAG, target: Basis,
                        verify: bool = True) -> CircuitDAG:
    """Rewrite a circuit whose gates may need constants into a constant-free
    circuit over ``target``, replacing 0 by the conjunction of all inputs
    and 1 by their disjunction.

    Preconditions checked here: the computed function must itself lie in the
    target clone, and each constant actually needed requires the matching
    side condition (conjunction in the clone for 0, disjunction for 1).
    """
    f = truth_table(c)
    res = lattice.member(f, target.functions())
    if not res:
        raise LogicError(
            "computed function is not expressible in the target basis "
            f"(separated by {res.separator_name()})"
        )
    aug = basis_from_functions(
        f"{target.name}+consts",
        list(target.gates) + [(_ZERO_GATE, ZERO), (_ONE_GATE, ONE)],
    )
    converted = convert_basis(c, aug, verify=verify)
    uses0 = any(kind == _ZERO_GATE for kind, _ in converted.nodes)
    uses1 = any(kind == _ONE_GATE for kind, _ in converted.nodes)
    if uses0 and not lattice.member(AND, target.functions()):
        raise LogicError(
            "0-elimination needs conjunction in the target clone"
        )
    if uses1 and not lattice.member(OR, target.functions()):
        raise LogicError(
            "1-elimination needs disjunction in the target clone"
        )
    n = c.arity
    builder = CircuitBuilder(target, n)
    zero_id = one_id = None
    if uses0:
        and_term = and_all_term(target, n, synthesize(AND, target))
        zero_id = _instantiate(
            builder, and_term.root, [builder.var(i) for i in range(n)], {}
        )
    if uses1:
        or_term = or_all_term(target, n, synthesize(OR, target))
        one_id = _instantiate(
            builder, or_term.root, [builder.var(i) for i in range(n)], {}
        )
    node_map: list[int] = []
    for kind, payload in converted.nodes:
        if kind == "var":
            node_map.append(builder.var(payload))
        elif kind == _ZERO_GATE:
            node_map.append(zero_id)
        elif kind == _ONE_GATE:
            node_map.append(one_id)
        else:
            node_map.append(
                builder.gate(kind, [node_map[j] for j in payload])
            )
    out = builder.finish(node_map[converted.output])
    if verify:
        if truth_table(out) != f:
            raise InternalError("constant elimination changed the function")
    return out
