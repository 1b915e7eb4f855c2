"""Reduction gadgets: satisfiability-to-clone constructions, the promise
composer, constant-free variants, and the equivalence-based dichotomy
gadgets.

All builders are pure and deterministic.  Variable layout inside composed
gadgets is always: the gadget's own block first (x, y, z, ...), then the
variable blocks of the argument formulas in order.  Satisfiability testing
is a brute-force internal utility capped at 20 variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import CapacityError, InputError, LogicError, ParseError
from .funcore import (
    AND,
    DE_MORGAN,
    NOTIMPLIES,
    Basis,
    BoolFun,
    CircuitBuilder,
    CircuitDAG,
    Node,
    TApp,
    TVar,
    Term,
    basis_from_functions,
    substitute,
    theta_fun,
    truth_table,
)
from .lattice import CloneDesc, MemberResult, clone_of, leq, member, named_desc
from .thresholds import (
    RandomStream,
    formula_shape,
    random_threshold_formula,
    theta_term,
)

_SAT_CAP = 20


# ---------------------------------------------------------------------------
# CNF utilities


def cnf_term(num_vars: int, clauses: Sequence[Sequence[int]],
             basis: Basis = DE_MORGAN) -> Term:
    """CNF as a formula tree; literals are 1-based DIMACS style, negative
    for negated."""
    if num_vars < 1:
        raise InputError("CNF needs at least one variable")

    def lit(l: int) -> Node:
        v = abs(l) - 1
        if not 0 <= v < num_vars:
            raise InputError(f"literal {l} out of range")
        return TVar(v) if l > 0 else TApp("NOT", (TVar(v),))

    def or_tree(nodes: list[Node]) -> Node:
        while len(nodes) > 1:
            nxt = [
                TApp("OR", (nodes[i], nodes[i + 1]))
                for i in range(0, len(nodes) - 1, 2)
            ]
            if len(nodes) % 2:
                nxt.append(nodes[-1])
            nodes = nxt
        return nodes[0]

    def and_tree(nodes: list[Node]) -> Node:
        while len(nodes) > 1:
            nxt = [
                TApp("AND", (nodes[i], nodes[i + 1]))
                for i in range(0, len(nodes) - 1, 2)
            ]
            if len(nodes) % 2:
                nxt.append(nodes[-1])
            nodes = nxt
        return nodes[0]

    false_node = TApp("AND", (TVar(0), TApp("NOT", (TVar(0),))))
    true_node = TApp("OR", (TVar(0), TApp("NOT", (TVar(0),))))
    clause_nodes = []
    for cl in clauses:
        if not cl:
            clause_nodes.append(false_node)
        else:
            clause_nodes.append(or_tree([lit(l) for l in cl]))
    root = true_node if not clause_nodes else and_tree(clause_nodes)
    return Term(basis, num_vars, root)


def parse_dimacs(text: str, basis: Basis = DE_MORGAN) -> Term:
    """DIMACS-like CNF: optional ``p cnf <vars> <clauses>`` header, ``c``
    comments, clauses as 0-terminated integer lists."""
    num_vars: Optional[int] = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad DIMACS header {line!r}", lineno)
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            try:
                l = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno)
            if l == 0:
                clauses.append(current)
                current = []
            else:
                current.append(l)
    if current:
        clauses.append(current)
    if num_vars is None:
        num_vars = max(
            (abs(l) for cl in clauses for l in cl), default=1
        )
    return cnf_term(num_vars, clauses, basis)


def is_satisfiable(t: Term) -> bool:
    if t.arity > _SAT_CAP:
        raise CapacityError(f"brute-force SAT capped at {_SAT_CAP} variables")
    return truth_table(t).table != 0


def model_count(t: Term) -> int:
    if t.arity > _SAT_CAP:
        raise CapacityError(f"brute-force SAT capped at {_SAT_CAP} variables")
    return bin(truth_table(t).table).count("1")


def _shift_vars(t: Term, offset: int, new_arity: int) -> Node:
    """Root of ``t`` with every variable index shifted by ``offset``."""
    memo: dict[int, Node] = {}

    def go(node: Node) -> Node:
        if id(node) in memo:
            return memo[id(node)]
        if isinstance(node, TVar):
            out: Node = TVar(node.index + offset)
        else:
            out = TApp(node.gate, tuple(go(c) for c in node.children))
        memo[id(node)] = out
        return out

    if offset + t.arity > new_arity:
        raise InputError("shift exceeds the declared arity")
    return go(t.root)


# ---------------------------------------------------------------------------
# Formula equivalence


def equivalent(t1: Term, t2: Term) -> bool:
    """Exhaustive truth-table equality of two formulas of common arity."""
    if t1.arity != t2.arity:
        raise InputError("equivalence needs a common arity")
    return truth_table(t1) == truth_table(t2)


# ---------------------------------------------------------------------------
# The satisfiability gadget and the circuit-value gadget


def gadget_f_phi(phi: Term) -> Term:
    """((x and phi) and y) or (not (x and phi) and z), with x, y, z fresh in
    front of phi's variables.

    Unsatisfiable phi collapses the gadget to the projection z;
    satisfiable phi makes it generate exactly the 0- and 1-preserving
    clone.
    """
    arity = 3 + phi.arity
    phi_node = _shift_vars(phi, 3, arity)
    a = TApp("AND", (TVar(0), phi_node))
    pos = TApp("AND", (a, TVar(1)))
    neg = TApp("AND", (TApp("NOT", (a,)), TVar(2)))
    return Term(phi.basis, arity, TApp("OR", (pos, neg)))


def gadget_C_a(c: CircuitDAG, a) -> CircuitDAG:
    """Unary circuit x and C(x^{a_0}, ..., x^{a_{n-1}}); computes a function
    in P_1 iff C(a) = 1."""
    bits = a.bits if hasattr(a, "bits") else int(a)
    if hasattr(a, "arity") and a.arity != c.arity:
        raise InputError("assignment arity does not match the circuit")
    basis = c.basis
    for g in ("AND", "NOT"):
        if not basis.has_gate(g):
            raise InputError("gadget needs AND and NOT gates in the basis")
    b = CircuitBuilder(basis, 1)
    x = b.var(0)
    nx = b.gate("NOT", [x])
    lits = [x if (bits >> i) & 1 else nx for i in range(c.arity)]
    node_map: list[int] = []
    for kind, payload in c.nodes:
        if kind == "var":
            node_map.append(lits[payload])
        else:
            node_map.append(b.gate(kind, [node_map[j] for j in payload]))
    return b.finish(b.gate("AND", [x, node_map[c.output]]))


# ---------------------------------------------------------------------------
# The threshold composer gadgets


def fvec_params(n: int) -> tuple[int, int]:
    """(m, t) for an n-formula block: m = max((n+1)^2, 6), t = m - n - 1."""
    if n < 1:
        raise InputError("need at least one formula")
    m = max((n + 1) ** 2, 6)
    return m, m - n - 1


def k_level(n: int, s: int) -> int:
    """Arm level produced by an n-block with s satisfiable formulas:
    ceil(t / (s+1))."""
    m, t = fvec_params(n)
    return -(-t // (s + 1))


@dataclass(frozen=True)
class FVecGadget:
    term: Term
    n: int
    m: int
    t: int
    arity: int
    phi_offsets: tuple


def _build_fvec(phis: Sequence[Term], threshold: Term, m: int,
                t: int) -> FVecGadget:
    n = len(phis)
    offsets = []
    arity = m
    for phi in phis:
        offsets.append(arity)
        arity += phi.arity
    args: list[Term] = []
    basis = threshold.basis
    for i, phi in enumerate(phis):
        phi_node = _shift_vars(phi, offsets[i], arity)
        args.append(Term(basis, arity, TApp("AND", (TVar(i), phi_node))))
    for j in range(n, m):
        args.append(Term(basis, arity, TVar(j)))
    term = substitute(threshold, args, arity=arity)
    return FVecGadget(term, n, m, t, arity, tuple(offsets))


def gadget_f_vec(phis: Sequence[Term]) -> FVecGadget:
    """theta^m_t(x_0 and phi_0, ..., x_{n-1} and phi_{n-1}, x_n, ..., x_{m-1})
    with disjoint variable blocks: gadget x-block first, then each phi's
    block in order."""
    n = len(phis)
    m, t = fvec_params(n)
    for phi in phis:
        if not (phi.basis.has_gate("AND") and phi.basis.has_gate("NOT")
                and phi.basis.has_gate("OR")):
            raise InputError("formula basis must contain AND, OR, NOT")
    thr = theta_term(m, t, phis[0].basis if phis else DE_MORGAN)
    return _build_fvec(phis, thr, m, t)


# ---------------------------------------------------------------------------
# Promise instances and the composer


@dataclass(frozen=True)
class PromiseInstance:
    """Ordered CNF list whose satisfiable members form a nonempty prefix;
    the prefix length's parity is the encoded answer."""

    cnfs: tuple
    claimed_j: Optional[int] = None

    def __len__(self) -> int:
        return len(self.cnfs)

    def compute_j(self) -> int:
        """Validate the promise by brute-force SAT and return j."""
        flags = [is_satisfiable(phi) for phi in self.cnfs]
        j = 0
        for fl in flags:
            if fl:
                j += 1
            else:
                break
        if any(flags[j:]):
            raise InputError(
                "promise violated: satisfiable formulas are not a prefix"
            )
        if j == 0:
            raise InputError("promise violated: j must be positive")
        if self.claimed_j is not None and self.claimed_j != j:
            raise InputError(
                f"claimed j={self.claimed_j} but computed j={j}"
            )
        return j


@dataclass(frozen=True)
class ComposedInstance:
    """(F, f) = ({notimplies, f_odd}, f_even) for a promise instance; f_even
    is a member of the generated clone iff j is even."""

    f_even: Term
    f_odd: Term
    j: int
    block_size: int

    def base_functions(self) -> list[BoolFun]:
        return [NOTIMPLIES, truth_table(self.f_odd)]

    def membership(self) -> MemberResult:
        return member(truth_table(self.f_even), self.base_functions())


def compose_cmp_instance(p: PromiseInstance) -> ComposedInstance:
    if len(p.cnfs) == 0 or len(p.cnfs) % 2:
        raise InputError("promise instance needs a positive even length")
    j = p.compute_j()
    evens = list(p.cnfs[0::2])
    odds = list(p.cnfs[1::2])
    g_even = gadget_f_vec(evens)
    g_odd = gadget_f_vec(odds)
    return ComposedInstance(g_even.term, g_odd.term, j, len(evens))


def compose_cmp_instance_randomized(
    p: PromiseInstance, e: int, stream: RandomStream, k: int = 3,
    depth_override: Optional[int] = None,
) -> ComposedInstance:
    """The composer with the randomized threshold formula substituted for
    the exact threshold; the same sampled formula is used on both sides.

    Instances large enough to satisfy the sigma precondition need certified
    tree depths whose terms exceed any desk-scale representation, so this
    path serves measurement: ``depth_override`` truncates the tree (voiding
    the error bound), and the exact composer remains the decision path.
    """
    if len(p.cnfs) == 0 or len(p.cnfs) % 2:
        raise InputError("promise instance needs a positive even length")
    j = p.compute_j()
    evens = list(p.cnfs[0::2])
    odds = list(p.cnfs[1::2])
    n = len(evens)
    m, t = fvec_params(n)
    # Valid only once t exceeds sigma_k * m; the exact-threshold composer
    # covers the small instances.
    formula_shape(m, t, e, k)  # raises InputError when out of range
    t_formula = random_threshold_formula(m, t, e, stream, k, depth_override)
    mixed = basis_from_functions(
        f"DeMorgan+THETA({k})",
        list(DE_MORGAN.gates) + [(f"THETA_{k + 1}_{k}", theta_fun(k + 1, k))],
    )
    t_mixed = Term(mixed, m, t_formula.root)
    ge = _build_fvec([Term(mixed, c.arity, c.root) for c in evens], t_mixed,
                     m, t)
    go = _build_fvec([Term(mixed, c.arity, c.root) for c in odds], t_mixed,
                     m, t)
    return ComposedInstance(ge.term, go.term, j, n)


def make_promise_instance(length: int, j: int, variant: int = 0) -> PromiseInstance:
    """Synthetic promise instance with the given prefix length: trivially
    satisfiable CNFs before position j, trivially unsatisfiable after."""
    if not 0 < j <= length:
        raise InputError("need 0 < j <= length")
    sat_shapes = [
        (1, [[1]]),
        (2, [[1], [2]]),
        (2, [[1, -2]]),
        (2, [[1, 2], [1, -2]]),
    ]
    unsat_shapes = [
        (1, [[1], [-1]]),
        (2, [[1, 2], [1, -2], [-1, 2], [-1, -2]]),
        (2, [[1], [-1], [2]]),
    ]
    cnfs = []
    for i in range(length):
        if i < j:
            nv, cls = sat_shapes[(variant + i) % len(sat_shapes)]
        else:
            nv, cls = unsat_shapes[(variant + i) % len(unsat_shapes)]
        cnfs.append(cnf_term(nv, cls))
    return PromiseInstance(tuple(cnfs), j)


# ---------------------------------------------------------------------------
# Constant-free variants


def gadget_pt_generator(basis: Basis = DE_MORGAN) -> Term:
    """x and (y -> z), the canonical generator of the constant-free
    0-preserving arm intersection."""
    imp = TApp("OR", (TApp("NOT", (TVar(1),)), TVar(2)))
    return Term(basis, 3, TApp("AND", (TVar(0), imp)))


def gadget_g_vec(phis: Sequence[Term]) -> FVecGadget:
    """Constant-free variant: f_vec(x) or (y and AND of all arguments),
    with y appended as the last variable."""
    base = gadget_f_vec(phis)
    arity = base.arity + 1
    y = TVar(arity - 1)
    nodes: list[Node] = [TVar(i) for i in range(base.arity)]
    while len(nodes) > 1:
        nxt = [
            TApp("AND", (nodes[i], nodes[i + 1]))
            for i in range(0, len(nodes) - 1, 2)
        ]
        if len(nodes) % 2:
            nxt.append(nodes[-1])
        nodes = nxt
    guard = TApp("AND", (y, nodes[0]))
    root = TApp("OR", (base.term.root, guard))
    term = Term(base.term.basis, arity, root)
    return FVecGadget(term, base.n, base.m, base.t, arity, base.phi_offsets)


# ---------------------------------------------------------------------------
# Equivalence dichotomy gadgets


def _require_clone(t: Term, clone_name: str) -> BoolFun:
    f = truth_table(t)
    if not leq(clone_of([f]), named_desc(clone_name)):
        raise InputError(
            f"input formula is not in the source clone {clone_name}"
        )
    return f


def _xor_node(a: Node, b: Node) -> Node:
    return TApp(
        "OR",
        (
            TApp("AND", (a, TApp("NOT", (b,)))),
            TApp("AND", (TApp("NOT", (a,)), b)),
        ),
    )


def _maj_node(a: Node, b: Node, c: Node) -> Node:
    return TApp(
        "OR",
        (
            TApp("AND", (a, b)),
            TApp("OR", (TApp("AND", (a, c)), TApp("AND", (b, c)))),
        ),
    )


def _common_arity(f: Term, g: Term) -> int:
    if f.arity != g.arity:
        raise InputError("the two formulas must share an arity")
    return f.arity


def gadget_h_DP(f: Term, g: Term) -> Term:
    """f(x) + g(x) + maj(y0, y1, y2) for monotone self-dual f, g: generates
    the self-dual monotone clone iff f and g are equivalent, else the
    self-dual 0/1-preserving clone."""
    _require_clone(f, "DM")
    _require_clone(g, "DM")
    nx = _common_arity(f, g)
    arity = nx + 3
    fr = _shift_vars(f, 0, arity)
    gr = _shift_vars(g, 0, arity)
    maj = _maj_node(TVar(nx), TVar(nx + 1), TVar(nx + 2))
    return Term(f.basis, arity, _xor_node(_xor_node(fr, gr), maj))


def gadget_h_MPT21(f: Term, g: Term) -> Term:
    """maj(f(x) or g(x), y, z) for monotone self-dual f, g: self-dual (and
    equal to the DM gadget clone) iff f equals g."""
    _require_clone(f, "DM")
    _require_clone(g, "DM")
    nx = _common_arity(f, g)
    arity = nx + 2
    fr = _shift_vars(f, 0, arity)
    gr = _shift_vars(g, 0, arity)
    return Term(
        f.basis, arity,
        _maj_node(TApp("OR", (fr, gr)), TVar(nx), TVar(nx + 1)),
    )


def gadget_h_PT1(f: Term, g: Term) -> Term:
    """y or (f(x) + g(x)) for f, g in the monotone 1-arm intersection:
    collapses to the projection y iff f equals g."""
    _require_clone(f, "MPT^∞_1")
    _require_clone(g, "MPT^∞_1")
    nx = _common_arity(f, g)
    arity = nx + 1
    fr = _shift_vars(f, 0, arity)
    gr = _shift_vars(g, 0, arity)
    return Term(f.basis, arity, TApp("OR", (TVar(nx), _xor_node(fr, gr))))
