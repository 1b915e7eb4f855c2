"""Boolean functions as truth tables, plus terms and circuits over named bases.

Conventions used everywhere in this package:

* An assignment to ``x_0 .. x_{n-1}`` is an integer ``a`` with the value of
  ``x_i`` at bit ``i`` (so ``a = 5`` over arity 3 means ``x0=1, x1=0, x2=1``).
* A truth table is an integer bit-vector of length ``2**arity``; bit ``a``
  holds ``f(a)``.
* Tables are materialized only for arity <= TABLE_CAP (exhaustive cap);
  operations that need exhaustive semantics above the cap raise
  :class:`CapacityError`.
* Nullary functions are excluded: arity >= 1 always.  Constants enter bases
  as arity-1 constant functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Union

from .errors import CapacityError, InputError, ParseError

TABLE_CAP = 24


def _check_arity(arity: int) -> None:
    if arity < 1:
        raise InputError(f"arity must be >= 1, got {arity}")


def table_mask(arity: int) -> int:
    """All-ones table of the given arity."""
    return (1 << (1 << arity)) - 1


@lru_cache(maxsize=4096)
def var_mask(arity: int, i: int) -> int:
    """Table of the projection x_i, as an integer bit-vector."""
    _check_arity(arity)
    if not 0 <= i < arity:
        raise InputError(f"variable index {i} out of range for arity {arity}")
    # Bit a is set iff bit i of a: blocks of 2^i ones every 2^(i+1),
    # replicated by doubling.
    out = ((1 << (1 << i)) - 1) << (1 << i)
    width = 1 << (i + 1)
    total = 1 << arity
    while width < total:
        out |= out << width
        width <<= 1
    return out


@dataclass(frozen=True)
class BoolFun:
    """An n-ary Boolean function stored as arity plus a 2^n-bit table."""

    arity: int
    table: int

    def __post_init__(self):
        _check_arity(self.arity)
        if self.arity > TABLE_CAP:
            raise CapacityError(
                f"arity {self.arity} exceeds the exhaustive cap {TABLE_CAP}"
            )
        if not 0 <= self.table <= table_mask(self.arity):
            raise InputError("table does not fit in 2^arity bits")

    def __call__(self, a: int) -> int:
        if not 0 <= a < (1 << self.arity):
            raise InputError(f"assignment {a} out of range for arity {self.arity}")
        return (self.table >> a) & 1

    def ones(self) -> list[int]:
        """Assignments mapped to 1, in increasing order."""
        return [a for a in range(1 << self.arity) if (self.table >> a) & 1]

    def is_constant(self) -> bool:
        return self.table == 0 or self.table == table_mask(self.arity)

    def support(self) -> list[int]:
        """Indices of variables the function genuinely depends on."""
        out = []
        for i in range(self.arity):
            v = var_mask(self.arity, i)
            lo = self.table & ~v
            hi = self.table & v
            # Compare the x_i=0 half against the x_i=1 half, aligned.
            if lo != (hi >> (1 << i)) & ~v & table_mask(self.arity):
                out.append(i)
        return out

    def serialize(self) -> str:
        """``arity:hex`` with little-endian nibbles of the table."""
        nbits = 1 << self.arity
        ndigits = max(1, (nbits + 3) // 4)
        digits = []
        t = self.table
        for _ in range(ndigits):
            digits.append(format(t & 0xF, "x"))
            t >>= 4
        return f"{self.arity}:{''.join(digits)}"

    @staticmethod
    def deserialize(text: str) -> "BoolFun":
        try:
            arity_s, hex_s = text.strip().split(":")
            arity = int(arity_s)
        except ValueError:
            raise ParseError(f"bad truth table literal {text!r}")
        table = 0
        for pos, ch in enumerate(hex_s):
            try:
                table |= int(ch, 16) << (4 * pos)
            except ValueError:
                raise ParseError(f"bad hex digit {ch!r} in table literal", pos)
        return BoolFun(arity, table)

    @staticmethod
    def from_callable(arity: int, fn) -> "BoolFun":
        _check_arity(arity)
        if arity > TABLE_CAP:
            raise CapacityError(f"arity {arity} exceeds cap {TABLE_CAP}")
        table = 0
        for a in range(1 << arity):
            bits = tuple((a >> i) & 1 for i in range(arity))
            if fn(*bits):
                table |= 1 << a
        return BoolFun(arity, table)


@dataclass(frozen=True)
class Assignment:
    """Input vector for an arity-n function, packed as an integer."""

    arity: int
    bits: int

    def __post_init__(self):
        _check_arity(self.arity)
        if not 0 <= self.bits < (1 << self.arity):
            raise InputError("assignment bits out of range")

    @staticmethod
    def from_bitstring(text: str) -> "Assignment":
        """Parse ``"101"`` with x0 leftmost."""
        if not text or any(c not in "01" for c in text):
            raise ParseError(f"bad assignment literal {text!r}")
        bits = 0
        for i, c in enumerate(text):
            if c == "1":
                bits |= 1 << i
        return Assignment(len(text), bits)

    def __getitem__(self, i: int) -> int:
        return (self.bits >> i) & 1


def dual(f: BoolFun) -> BoolFun:
    """The dual function f^d(x) = NOT f(NOT x).  An involution."""
    n = f.arity
    # Reverse the bit order of the table (entry a moves to ~a), then invert.
    t = f.table
    for i in range(n):
        w = 1 << i
        m = _alternating_mask(n, i)
        t = ((t & m) << w) | ((t >> w) & m)
    return BoolFun(n, ~t & table_mask(n))


def _alternating_mask(arity: int, i: int) -> int:
    """Mask selecting the low half of each 2^(i+1)-wide block of the table."""
    return ~var_mask(arity, i) & table_mask(arity)


# ---------------------------------------------------------------------------
# Named function catalog


def _theta_table(n: int, t: int) -> int:
    table = 0
    for a in range(1 << n):
        if bin(a).count("1") >= t:
            table |= 1 << a
    return table


def theta_fun(n: int, t: int) -> BoolFun:
    """Threshold function: 1 iff at least t of the n inputs are 1."""
    _check_arity(n)
    if n > TABLE_CAP:
        raise CapacityError(f"arity {n} exceeds cap {TABLE_CAP}")
    if not 0 <= t <= n + 1:
        raise InputError(f"threshold {t} out of range for arity {n}")
    return BoolFun(n, _theta_table(n, t))


AND = BoolFun(2, 0b1000)
OR = BoolFun(2, 0b1110)
NOT = BoolFun(1, 0b01)
NAND = BoolFun(2, 0b0111)
NOR = BoolFun(2, 0b0001)
XOR = BoolFun(2, 0b0110)
IMP = BoolFun(2, 0b1101)  # x0 -> x1: false only at x0=1, x1=0
NOTIMPLIES = BoolFun(2, 0b0010)  # x0 and not x1: true only at x0=1, x1=0
ZERO = BoolFun(1, 0b00)
ONE = BoolFun(1, 0b11)
ID = BoolFun(1, 0b10)
MAJ = theta_fun(3, 2)


def named_function(name: str) -> BoolFun:
    """Resolve a catalog name (``AND``, ``THETA_5_3``, ...) or an
    ``arity:hex`` literal to a function."""
    simple = {
        "AND": AND, "OR": OR, "NOT": NOT, "NAND": NAND, "NOR": NOR,
        "XOR": XOR, "IMP": IMP, "NOTIMPLIES": NOTIMPLIES,
        "ZERO": ZERO, "ONE": ONE, "ID": ID, "MAJ": MAJ,
    }
    key = name.strip()
    if key.upper() in simple:
        return simple[key.upper()]
    if key.upper().startswith("THETA_"):
        parts = key.split("_")
        if len(parts) == 3:
            try:
                return theta_fun(int(parts[1]), int(parts[2]))
            except ValueError:
                pass
        raise ParseError(f"bad threshold gate name {name!r}")
    if ":" in key:
        return BoolFun.deserialize(key)
    raise ParseError(f"unknown function name {name!r}")


# ---------------------------------------------------------------------------
# Bases


@dataclass(frozen=True)
class Basis:
    """A named finite set of gate functions, with optional defining terms
    over another basis (used by circuit conversion)."""

    name: str
    gates: tuple  # tuple of (gate name, BoolFun)
    definitions: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        names = [g for g, _ in self.gates]
        if len(set(names)) != len(names):
            raise InputError(f"duplicate gate names in basis {self.name!r}")
        for gname, term in self.definitions.items():
            fun = self.fun(gname)
            if truth_table(term) != fun:
                raise InputError(
                    f"definition of gate {gname!r} does not match its table"
                )

    def fun(self, gate: str) -> BoolFun:
        for g, f in self.gates:
            if g == gate:
                return f
        raise InputError(f"unknown gate {gate!r} in basis {self.name!r}")

    def has_gate(self, gate: str) -> bool:
        return any(g == gate for g, _ in self.gates)

    def functions(self) -> list[BoolFun]:
        return [f for _, f in self.gates]


def basis_from_functions(name: str, funs: Iterable[tuple[str, BoolFun]]) -> Basis:
    return Basis(name, tuple(funs))


DE_MORGAN = basis_from_functions(
    "DeMorgan", [("AND", AND), ("OR", OR), ("NOT", NOT)]
)
DE_MORGAN_01 = basis_from_functions(
    "DeMorgan01",
    [("AND", AND), ("OR", OR), ("NOT", NOT), ("ZERO", ZERO), ("ONE", ONE)],
)
NAND_BASIS = basis_from_functions("NAND", [("NAND", NAND)])
IMP_BASIS = basis_from_functions("IMP", [("IMP", IMP)])
NOTIMPLIES_BASIS = basis_from_functions("NOTIMPLIES", [("NOTIMPLIES", NOTIMPLIES)])


def theta_basis(k: int) -> Basis:
    """The single-gate basis {theta^{k+1}_k} driving the randomized
    threshold construction."""
    if k < 1:
        raise InputError("k must be >= 1")
    gate = f"THETA_{k + 1}_{k}"
    return basis_from_functions(f"THETA({k})", [(gate, theta_fun(k + 1, k))])


def named_basis(spec: str) -> Basis:
    """Resolve a basis spec: a built-in name, ``THETA(k)``, or a
    comma-separated catalog list like ``AND,NOT``."""
    key = spec.strip()
    builtins = {
        "DEMORGAN": DE_MORGAN,
        "DEMORGAN01": DE_MORGAN_01,
        "NAND": NAND_BASIS,
        "IMP": IMP_BASIS,
        "NOTIMPLIES": NOTIMPLIES_BASIS,
    }
    if key.upper() in builtins:
        return builtins[key.upper()]
    if key.upper().startswith("THETA(") and key.endswith(")"):
        return theta_basis(int(key[6:-1]))
    if "," in key or key:
        gates = []
        for part in key.split(","):
            part = part.strip()
            if not part:
                continue
            gates.append((part.upper(), named_function(part)))
        if gates:
            return basis_from_functions(key, gates)
    raise ParseError(f"unknown basis {spec!r}")


# ---------------------------------------------------------------------------
# Terms (formula trees)


@dataclass(frozen=True)
class TVar:
    index: int


@dataclass(frozen=True)
class TApp:
    gate: str
    children: tuple

    def __post_init__(self):
        # no structural checks here; Term validates against its basis
        pass


Node = Union[TVar, TApp]


@dataclass(frozen=True)
class Term:
    """A formula tree over a basis, with a declared arity."""

    basis: Basis
    arity: int
    root: Node

    def __post_init__(self):
        _check_arity(self.arity)
        _validate_node(self.root, self.basis, self.arity)

    def size(self) -> int:
        """Tree size (shared subterms counted once per occurrence)."""
        memo: dict[int, int] = {}

        def go(node: Node) -> int:
            if id(node) in memo:
                return memo[id(node)]
            if isinstance(node, TVar):
                s = 1
            else:
                s = 1 + sum(go(c) for c in node.children)
            memo[id(node)] = s
            return s

        return go(self.root)

    def depth(self) -> int:
        memo: dict[int, int] = {}

        def go(node: Node) -> int:
            if id(node) in memo:
                return memo[id(node)]
            if isinstance(node, TVar):
                d = 0
            else:
                d = 1 + max(go(c) for c in node.children)
            memo[id(node)] = d
            return d

        return go(self.root)


def _validate_node(node: Node, basis: Basis, arity: int) -> None:
    seen: set[int] = set()
    stack: list[Node] = [node]
    while stack:
        cur = stack.pop()
        if id(cur) in seen:
            continue
        seen.add(id(cur))
        if isinstance(cur, TVar):
            if not 0 <= cur.index < arity:
                raise InputError(
                    f"variable x{cur.index} out of range for declared arity "
                    f"{arity}"
                )
            continue
        gate_fun = basis.fun(cur.gate)
        if len(cur.children) != gate_fun.arity:
            raise InputError(
                f"gate {cur.gate!r} expects {gate_fun.arity} children, "
                f"got {len(cur.children)}"
            )
        stack.extend(cur.children)


def term_var(basis: Basis, arity: int, i: int) -> Term:
    return Term(basis, arity, TVar(i))


def term_apply(gate: str, children: list[Term]) -> Term:
    """Combine subterms sharing a basis; arity is the max of the children's."""
    if not children:
        raise InputError("gate application needs children")
    basis = children[0].basis
    arity = max(c.arity for c in children)
    for c in children:
        if c.basis is not basis and c.basis != basis:
            raise InputError("children built over different bases")
    return Term(basis, arity, TApp(gate, tuple(c.root for c in children)))


def substitute(t: Term, args: list[Term], arity: Optional[int] = None) -> Term:
    """Replace variable x_i throughout ``t`` by ``args[i]``.

    All argument terms must share a basis with ``t``; shared subterms are
    rewritten once.
    """
    if len(args) < t.arity:
        raise InputError(
            f"substitution needs {t.arity} arguments, got {len(args)}"
        )
    for a in args:
        if a.basis != t.basis:
            raise InputError("substitution across different bases")
    memo: dict[int, Node] = {}

    def go(node: Node) -> Node:
        if id(node) in memo:
            return memo[id(node)]
        if isinstance(node, TVar):
            out: Node = args[node.index].root
        else:
            out = TApp(node.gate, tuple(go(ch) for ch in node.children))
        memo[id(node)] = out
        return out

    if arity is None:
        arity = max(a.arity for a in args)
    return Term(t.basis, arity, go(t.root))


# ---------------------------------------------------------------------------
# Circuits (gate DAGs)


@dataclass(frozen=True)
class CircuitDAG:
    """A circuit as a topologically ordered node list.

    ``nodes[i]`` is either ``("var", index)`` or ``(gate_name, (input ids...))``
    with every input id < i.  ``output`` is the id of the output node.
    """

    basis: Basis
    arity: int
    nodes: tuple
    output: int

    def __post_init__(self):
        _check_arity(self.arity)
        if not 0 <= self.output < len(self.nodes):
            raise InputError("output id out of range")
        for i, node in enumerate(self.nodes):
            kind, payload = node
            if kind == "var":
                if not 0 <= payload < self.arity:
                    raise InputError(f"variable x{payload} out of range")
            else:
                fun = self.basis.fun(kind)
                if len(payload) != fun.arity:
                    raise InputError(
                        f"gate {kind!r} at node {i} has wrong in-degree"
                    )
                for j in payload:
                    if not 0 <= j < i:
                        raise InputError(
                            f"node {i} references node {j}; ids must be "
                            "topologically ordered"
                        )

    def gate_names(self) -> set[str]:
        return {kind for kind, _ in self.nodes if kind != "var"}

    def depth(self) -> int:
        d = [0] * len(self.nodes)
        for i, (kind, payload) in enumerate(self.nodes):
            if kind != "var":
                d[i] = 1 + max((d[j] for j in payload), default=0)
        return d[self.output]


class CircuitBuilder:
    """Incremental CircuitDAG construction with node deduplication."""

    def __init__(self, basis: Basis, arity: int):
        self.basis = basis
        self.arity = arity
        self.nodes: list = []
        self._memo: dict = {}

    def var(self, i: int) -> int:
        return self._add(("var", i))

    def gate(self, name: str, inputs: list[int]) -> int:
        return self._add((name, tuple(inputs)))

    def _add(self, node) -> int:
        if node in self._memo:
            return self._memo[node]
        self.nodes.append(node)
        idx = len(self.nodes) - 1
        self._memo[node] = idx
        return idx

    def finish(self, output: int) -> CircuitDAG:
        return CircuitDAG(self.basis, self.arity, tuple(self.nodes), output)


# ---------------------------------------------------------------------------
# Evaluation


def eval_on(c: Union[Term, CircuitDAG], a: Assignment) -> int:
    """Evaluate a term or circuit on one assignment (single topological pass)."""
    if a.arity != c.arity:
        raise InputError(
            f"assignment arity {a.arity} does not match declared arity {c.arity}"
        )
    if isinstance(c, CircuitDAG):
        vals = []
        for kind, payload in c.nodes:
            if kind == "var":
                vals.append((a.bits >> payload) & 1)
            else:
                fun = c.basis.fun(kind)
                idx = 0
                for pos, j in enumerate(payload):
                    idx |= vals[j] << pos
                vals.append(fun(idx))
        return vals[c.output]
    # Term: iterative post-order to dodge recursion limits on deep trees.
    basis = c.basis
    out: dict[int, int] = {}
    stack: list[tuple[Node, bool]] = [(c.root, False)]
    while stack:
        node, ready = stack.pop()
        if isinstance(node, TVar):
            out[id(node)] = (a.bits >> node.index) & 1
            continue
        if not ready:
            stack.append((node, True))
            for ch in node.children:
                if id(ch) not in out:
                    stack.append((ch, False))
        else:
            fun = basis.fun(node.gate)
            idx = 0
            for pos, ch in enumerate(node.children):
                idx |= out[id(ch)] << pos
            out[id(node)] = fun(idx)
    return out[id(c.root)]


def _apply_gate_tables(fun: BoolFun, child_tables: list[int], arity: int) -> int:
    """Combine child truth tables through a gate, bit-parallel.

    Evaluates the gate's DNF over the children: OR over the gate's one-rows
    of the AND of child tables (complemented where the row has a zero).
    """
    full = table_mask(arity)
    out = 0
    for row in range(1 << fun.arity):
        if not fun(row):
            continue
        acc = full
        for pos in range(fun.arity):
            t = child_tables[pos]
            acc &= t if (row >> pos) & 1 else ~t & full
            if not acc:
                break
        out |= acc
    return out


def truth_table(c: Union[Term, CircuitDAG], max_arity: int = TABLE_CAP) -> BoolFun:
    """Exhaustively evaluate a term or circuit into a BoolFun."""
    if c.arity > max_arity or c.arity > TABLE_CAP:
        raise CapacityError(
            f"arity {c.arity} exceeds the exhaustive cap "
            f"{min(max_arity, TABLE_CAP)}"
        )
    n = c.arity
    vmasks = [var_mask(n, i) for i in range(n)]
    if isinstance(c, CircuitDAG):
        tabs: list[int] = []
        for kind, payload in c.nodes:
            if kind == "var":
                tabs.append(vmasks[payload])
            else:
                tabs.append(
                    _apply_gate_tables(
                        c.basis.fun(kind), [tabs[j] for j in payload], n
                    )
                )
        return BoolFun(n, tabs[c.output])
    basis = c.basis
    memo: dict[int, int] = {}
    stack: list[tuple[Node, bool]] = [(c.root, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in memo:
            continue
        if isinstance(node, TVar):
            memo[id(node)] = vmasks[node.index]
            continue
        if not ready:
            stack.append((node, True))
            for ch in node.children:
                stack.append((ch, False))
        else:
            tables = [memo[id(ch)] for ch in node.children]
            memo[id(node)] = _apply_gate_tables(basis.fun(node.gate), tables, n)
    return BoolFun(n, memo[id(c.root)])


def term_to_circuit(t: Term) -> CircuitDAG:
    """Embed a term into a DAG (shared identical subterms collapse)."""
    b = CircuitBuilder(t.basis, t.arity)

    memo: dict[int, int] = {}

    def go(node: Node) -> int:
        if id(node) in memo:
            return memo[id(node)]
        if isinstance(node, TVar):
            r = b.var(node.index)
        else:
            r = b.gate(node.gate, [go(ch) for ch in node.children])
        memo[id(node)] = r
        return r

    return b.finish(go(t.root))


def unravel(c: CircuitDAG) -> Term:
    """Unravel a circuit into a tree by duplicating shared nodes.

    Size can blow up exponentially in the depth; callers keep inputs small.
    """
    memo: dict[int, Node] = {}

    def go(i: int) -> Node:
        if i in memo:
            return memo[i]
        kind, payload = c.nodes[i]
        if kind == "var":
            node: Node = TVar(payload)
        else:
            node = TApp(kind, tuple(go(j) for j in payload))
        memo[i] = node
        return node

    return Term(c.basis, c.arity, go(c.output))


# ---------------------------------------------------------------------------
# Prefix-notation formulas


def _tokenize(text: str) -> list[str]:
    return text.split()


def parse_formula(text: str, basis: Basis, arity: Optional[int] = None) -> Term:
    """Parse whitespace-separated prefix notation: ``gate arg...`` or ``x<i>``."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty formula")
    pos = 0
    max_var = -1

    def parse_one() -> Node:
        nonlocal pos, max_var
        if pos >= len(tokens):
            raise ParseError("unexpected end of formula", pos)
        tok = tokens[pos]
        pos += 1
        if tok.startswith("x") and tok[1:].isdigit():
            idx = int(tok[1:])
            max_var = max(max_var, idx)
            return TVar(idx)
        if not basis.has_gate(tok):
            raise ParseError(f"unknown gate {tok!r}", pos - 1)
        k = basis.fun(tok).arity
        children = tuple(parse_one() for _ in range(k))
        return TApp(tok, children)

    root = parse_one()
    if pos != len(tokens):
        raise ParseError(f"trailing tokens starting with {tokens[pos]!r}", pos)
    inferred = max_var + 1 if max_var >= 0 else 1
    if arity is None:
        arity = max(inferred, 1)
    elif arity < inferred:
        raise InputError(f"declared arity {arity} smaller than used variables")
    return Term(basis, arity, root)


def print_formula(t: Term) -> str:
    parts: list[str] = []
    stack: list[Node] = [t.root]
    while stack:
        node = stack.pop()
        if isinstance(node, TVar):
            parts.append(f"x{node.index}")
        else:
            parts.append(node.gate)
            stack.extend(reversed(node.children))
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Netlists


def parse_netlist(text: str, basis: Basis, arity: Optional[int] = None) -> CircuitDAG:
    """Parse the line format ``n<k> = <gate> <arg>...`` / ``out <id>``.

    Args are previously defined ``n<j>`` ids or variables ``x<i>``; forward
    references (which would allow cycles) are rejected.
    """
    ids: dict[str, int] = {}
    nodes: list = []
    output: Optional[int] = None
    max_var = -1

    def var_node(i: int) -> int:
        nonlocal max_var
        max_var = max(max_var, i)
        key = f"x{i}"
        if key not in ids:
            nodes.append(("var", i))
            ids[key] = len(nodes) - 1
        return ids[key]

    lines = [ln.strip() for ln in text.splitlines()]
    for lineno, line in enumerate(lines, start=1):
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "out":
            if output is not None:
                raise ParseError("multiple out lines", lineno)
            if len(parts) != 2:
                raise ParseError("out line takes exactly one id", lineno)
            ref = parts[1]
            if ref.startswith("x") and ref[1:].isdigit():
                output = var_node(int(ref[1:]))
            elif ref in ids:
                output = ids[ref]
            else:
                raise ParseError(f"out references unknown id {ref!r}", lineno)
            continue
        if len(parts) < 3 or parts[1] != "=":
            raise ParseError(f"bad netlist line {line!r}", lineno)
        name = parts[0]
        if not (name.startswith("n") and name[1:].isdigit()):
            raise ParseError(f"bad node id {name!r}", lineno)
        if name in ids:
            raise ParseError(f"duplicate definition of {name!r}", lineno)
        gate = parts[2]
        if not basis.has_gate(gate):
            raise ParseError(f"unknown gate {gate!r}", lineno)
        want = basis.fun(gate).arity
        args = parts[3:]
        if len(args) != want:
            raise ParseError(
                f"gate {gate!r} expects {want} args, got {len(args)}", lineno
            )
        arg_ids = []
        for ref in args:
            if ref.startswith("x") and ref[1:].isdigit():
                arg_ids.append(var_node(int(ref[1:])))
            elif ref in ids:
                arg_ids.append(ids[ref])
            else:
                raise ParseError(
                    f"reference to undefined id {ref!r} (cycle or forward "
                    "reference)",
                    lineno,
                )
        nodes.append((gate, tuple(arg_ids)))
        ids[name] = len(nodes) - 1
    if output is None:
        raise ParseError("missing out line")
    inferred = max_var + 1 if max_var >= 0 else 1
    if arity is None:
        arity = max(inferred, 1)
    elif arity < inferred:
        raise InputError(f"declared arity {arity} smaller than used variables")
    return CircuitDAG(basis, arity, tuple(nodes), output)


def print_netlist(c: CircuitDAG) -> str:
    names: dict[int, str] = {}
    lines: list[str] = []
    counter = 1
    for i, (kind, payload) in enumerate(c.nodes):
        if kind == "var":
            names[i] = f"x{payload}"
        else:
            names[i] = f"n{counter}"
            counter += 1
            args = " ".join(names[j] for j in payload)
            lines.append(f"{names[i]} = {kind} {args}")
    lines.append(f"out {names[c.output]}")
    return "\n".join(lines)
