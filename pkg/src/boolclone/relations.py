"""Boolean relations, the preservation predicate, and the invariant family R_n.

A k-ary relation is a subset of {0,1}^k.  A member column (a^0,...,a^{k-1})
is encoded as an integer with row j at bit j; the relation itself is a
bit-vector over 2^k with bit c set iff column c belongs.

``f preserves r`` iff for every k x n matrix whose n columns all lie in r,
applying f to the k rows yields a column in r.  Refutations are always
returned as explicit witness matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import inf
from typing import Optional, Union

import numpy as np

from .errors import CapacityError, InputError, InternalError, ParseError
from .funcore import BoolFun, dual, table_mask, var_mask

Level = Union[int, float]  # int or math.inf

FLAG_TAGS = ("LE", "AFF", "GR_NEG", "GR_AND", "GR_OR", "UNARY3")


@dataclass(frozen=True)
class Relation:
    arity: int
    members: int  # bit-vector over 2^arity

    def __post_init__(self):
        if self.arity < 1:
            raise InputError("relation arity must be >= 1")
        if not 0 <= self.members <= table_mask(self.arity):
            raise InputError("relation members out of range")

    def __contains__(self, column: int) -> bool:
        return bool((self.members >> column) & 1)

    def columns(self) -> list[int]:
        return [c for c in range(1 << self.arity) if c in self]

    def serialize(self) -> str:
        nbits = 1 << self.arity
        ndigits = max(1, (nbits + 3) // 4)
        digits = []
        t = self.members
        for _ in range(ndigits):
            digits.append(format(t & 0xF, "x"))
            t >>= 4
        return f"{self.arity}:{''.join(digits)}"

    @staticmethod
    def deserialize(text: str) -> "Relation":
        try:
            k_s, hex_s = text.strip().split(":")
            k = int(k_s)
        except ValueError:
            raise ParseError(f"bad relation literal {text!r}")
        members = 0
        for pos, ch in enumerate(hex_s):
            members |= int(ch, 16) << (4 * pos)
        return Relation(k, members)


def relation_dual(r: Relation) -> Relation:
    """Coordinatewise complement of every member column."""
    full = (1 << r.arity) - 1
    members = 0
    for c in r.columns():
        members |= 1 << (c ^ full)
    return Relation(r.arity, members)


# ---------------------------------------------------------------------------
# The invariant family of meet-irreducible clones


def _relation_from_columns(k: int, cols) -> Relation:
    members = 0
    for c in cols:
        members |= 1 << c
    return Relation(k, members)


def standard_relation(tag: str, m: Optional[int] = None) -> Relation:
    """The defining invariant of a meet-irreducible clone.

    Tags: LE, AFF, GR_NEG, GR_AND, GR_OR, UNARY3, R0 (with level m),
    R1 (with level m).
    """
    if tag == "LE":
        return _relation_from_columns(2, [0b00, 0b10, 0b11])
    if tag == "AFF":
        cols = [c for c in range(16) if bin(c).count("1") % 2 == 0]
        return _relation_from_columns(4, cols)
    if tag == "GR_NEG":
        return _relation_from_columns(2, [0b10, 0b01])
    if tag == "GR_AND":
        cols = [x | (y << 1) | ((x & y) << 2) for x in (0, 1) for y in (0, 1)]
        return _relation_from_columns(3, cols)
    if tag == "GR_OR":
        cols = [x | (y << 1) | ((x | y) << 2) for x in (0, 1) for y in (0, 1)]
        return _relation_from_columns(3, cols)
    if tag == "UNARY3":
        cols = [
            x | (y << 1) | (z << 2)
            for x in (0, 1) for y in (0, 1) for z in (0, 1)
            if z in (x, y)
        ]
        return _relation_from_columns(3, cols)
    if tag in ("R0", "R1"):
        if m is None or m < 1:
            raise InputError("arm relations need a level m >= 1")
        full = (1 << m) - 1
        if tag == "R1":
            return Relation(m, (table_mask(m) & ~1))  # all columns except 0
        return Relation(m, table_mask(m) & ~(1 << full))  # all except 1...1
    raise InputError(f"unknown relation tag {tag!r}")


def relation_name(tag: str, m: Optional[int] = None) -> str:
    if tag in ("R0", "R1"):
        return f"{tag}({m})"
    return tag


def family_Rn(n: int) -> list[tuple[str, Optional[int], Relation]]:
    """The 6 + 2n invariants R_n, in a fixed order: the six flag relations,
    then (R0(m), R1(m)) for m = 1..n."""
    if n < 0:
        raise InputError("n must be >= 0")
    out = [(tag, None, standard_relation(tag)) for tag in FLAG_TAGS]
    for m in range(1, n + 1):
        out.append(("R0", m, standard_relation("R0", m)))
        out.append(("R1", m, standard_relation("R1", m)))
    return out


# ---------------------------------------------------------------------------
# Witness matrices


@dataclass(frozen=True)
class WitnessMatrix:
    """k x n matrix refuting preservation: every column is in the relation,
    the row-wise image under f is not."""

    rows: int
    cols: int
    columns: tuple  # n column encodings, row j at bit j

    def row(self, j: int) -> int:
        """Row j as an assignment integer (x_i at bit i)."""
        bits = 0
        for i, c in enumerate(self.columns):
            bits |= ((c >> j) & 1) << i
        return bits

    def __str__(self) -> str:
        lines = []
        for j in range(self.rows):
            lines.append("".join(str((c >> j) & 1) for c in self.columns))
        return "\n".join(lines)

    def verify(self, f: BoolFun, r: Relation) -> bool:
        if self.cols != f.arity or self.rows != r.arity:
            return False
        if any(c not in r for c in self.columns):
            return False
        out = 0
        for j in range(self.rows):
            out |= f(self.row(j)) << j
        return out not in r


@dataclass(frozen=True)
class PreservesResult:
    holds: bool
    witness: Optional[WitnessMatrix] = None

    def __bool__(self) -> bool:
        return self.holds


# ---------------------------------------------------------------------------
# Generic preservation test (reference oracle)

_NUMPY_THRESHOLD = 4096


def preserves(f: BoolFun, r: Relation, budget: int = 10_000_000) -> PreservesResult:
    """Exhaustive matrix enumeration, in lexicographic order of the sorted
    member columns (so returned witnesses are canonical)."""
    members = r.columns()
    n = f.arity
    count = len(members) ** n if members else 0
    if count > budget:
        raise CapacityError(
            f"preservation check needs {count} matrices, budget is {budget}"
        )
    if count == 0:
        return PreservesResult(True)
    if count >= _NUMPY_THRESHOLD:
        return _preserves_numpy(f, r, members)
    k = r.arity
    for combo in itertools.product(members, repeat=n):
        out = 0
        for j in range(k):
            idx = 0
            for i, col in enumerate(combo):
                idx |= ((col >> j) & 1) << i
            out |= f(idx) << j
        if out not in r:
            return PreservesResult(False, WitnessMatrix(k, n, tuple(combo)))
    return PreservesResult(True)


def _preserves_numpy(f: BoolFun, r: Relation, members: list[int]) -> PreservesResult:
    n, k = f.arity, r.arity
    mem = np.array(members, dtype=np.int64)
    m = len(members)
    total = m ** n
    # Column choice for argument i of the flattened matrix index, matching
    # itertools.product order (last argument varies fastest).
    flat = np.arange(total, dtype=np.int64)
    table = np.zeros(1 << n, dtype=np.int64)
    for a in f.ones():
        table[a] = 1
    colsel = []
    for i in range(n):
        div = m ** (n - 1 - i)
        colsel.append(mem[(flat // div) % m])
    out = np.zeros(total, dtype=np.int64)
    for j in range(k):
        idx = np.zeros(total, dtype=np.int64)
        for i in range(n):
            idx |= ((colsel[i] >> j) & 1) << i
        out |= table[idx] << j
    member_map = np.zeros(1 << k, dtype=bool)
    for c in members:
        member_map[c] = True
    bad = ~member_map[out]
    if not bad.any():
        return PreservesResult(True)
    first = int(np.argmax(bad))
    combo = []
    for i in range(n):
        div = m ** (n - 1 - i)
        combo.append(members[(first // div) % m])
    return PreservesResult(False, WitnessMatrix(k, n, tuple(combo)))


# ---------------------------------------------------------------------------
# Arm levels (the two infinite descending chains)


def _neighbor_minimal_ones(f: BoolFun) -> list[int]:
    """Elements of f^{-1}(1) with no 1-neighbour below; a superset of the
    bitwise-minimal elements, which is all the cover search needs."""
    n = f.arity
    t = f.table
    keep = t
    for i in range(n):
        w = 1 << i
        lo = _low_half_mask(n, i)
        kill = (t & lo) << w  # x_i=1 entries whose x_i=0 partner is 1
        keep &= ~kill
    out = []
    while keep:
        low = keep & -keep
        out.append(low.bit_length() - 1)
        keep ^= low
    return out


@lru_cache(maxsize=None)
def _low_half_mask(arity: int, i: int) -> int:
    return ~var_mask(arity, i) & table_mask(arity)


_COVER_ELEMENT_CAP = 200_000
_COVER_NODE_BUDGET = 2_000_000


def _min_zero_cover(n: int, elements: list[int]) -> Optional[list[int]]:
    """Smallest subset of ``elements`` whose coordinatewise AND is 0, i.e.
    whose zero-sets cover all n coordinates.  None if impossible."""
    full = (1 << n) - 1
    zerosets = {}
    for a in elements:
        z = ~a & full
        if z and (z not in zerosets):
            zerosets[z] = a
    # Drop dominated zero-sets (subset of another) to shrink the search.
    zs = sorted(zerosets, key=lambda z: -bin(z).count("1"))
    kept: list[int] = []
    for z in zs:
        if not any(z & k == z for k in kept):
            kept.append(z)
    union = 0
    for z in kept:
        union |= z
    if union != full:
        return None

    # Greedy upper bound.
    def greedy() -> list[int]:
        rem, chosen = full, []
        while rem:
            best = max(kept, key=lambda z: bin(z & rem).count("1"))
            chosen.append(best)
            rem &= ~best
        return chosen

    best_sol = greedy()
    best = len(best_sol)
    budget = [_COVER_NODE_BUDGET]

    def dfs(rem: int, chosen: list[int]):
        nonlocal best, best_sol
        if budget[0] <= 0:
            raise CapacityError("set-cover search budget exhausted")
        budget[0] -= 1
        if not rem:
            if len(chosen) < best:
                best = len(chosen)
                best_sol = list(chosen)
            return
        # Remaining-aware bound: no set can cover more of rem than the
        # current best intersection.
        max_hit = max(bin(z & rem).count("1") for z in kept)
        if max_hit == 0:
            return
        need = (bin(rem).count("1") + max_hit - 1) // max_hit
        if len(chosen) + need >= best:
            return
        # Branch on the least-covered remaining coordinate.
        coord = None
        cover_count = len(kept) + 1
        rr = rem
        while rr:
            low = rr & -rr
            cnt = sum(1 for z in kept if z & low)
            if cnt < cover_count:
                cover_count = cnt
                coord = low
            rr ^= low
        cands = sorted(
            (z for z in kept if z & coord),
            key=lambda z: -bin(z & rem).count("1"),
        )
        for z in cands:
            chosen.append(z)
            dfs(rem & ~z, chosen)
            chosen.pop()

    dfs(full, [])
    return [zerosets[z] for z in best_sol]


def arm_refutation(f: BoolFun, alpha: int) -> Optional[list[int]]:
    """A minimum subset of f^{-1}(1) with coordinatewise AND 0 (alpha=0), or
    of f^{-1}(0) with coordinatewise OR all-ones (alpha=1).  None if the arm
    level is infinite."""
    if alpha == 1:
        sub = arm_refutation(dual(f), 0)
        if sub is None:
            return None
        full = (1 << f.arity) - 1
        return [a ^ full for a in sub]
    n = f.arity
    if f.table == 0:
        return None
    # Coordinate i is 1 across all one-entries iff the x_i=0 table half is
    # empty; any such coordinate bounds f from above, making the level
    # infinite.
    acc = 0
    for i in range(n):
        if f.table & _low_half_mask(n, i) == 0:
            acc |= 1 << i
    if acc != 0:
        return None
    elements = _neighbor_minimal_ones(f)
    if len(elements) > _COVER_ELEMENT_CAP:
        raise CapacityError("too many minimal one-elements for the arm search")
    sub = _min_zero_cover(n, elements)
    if sub is None:
        raise InternalError("cover search disagreed with the total-AND test")
    return sub


def arm_level(f: BoolFun, alpha: int) -> Level:
    """sup{m >= 1 : f preserves r^m_alpha}; 0 if not even r^1_alpha holds,
    math.inf iff some variable bounds f in the appropriate direction."""
    if alpha not in (0, 1):
        raise InputError("alpha must be 0 or 1")
    sub = arm_refutation(f, alpha)
    if sub is None:
        return inf
    return len(sub) - 1


def bounding_variable(f: BoolFun, alpha: int) -> Optional[int]:
    """Index i with f <= x_i (alpha=0) or x_i <= f (alpha=1), if any."""
    n = f.arity
    if alpha == 0:
        for i in range(n):
            if f.table & _low_half_mask(n, i) == 0:
                return i
        return None
    return bounding_variable(dual(f), 0)


# ---------------------------------------------------------------------------
# Specialized (exact, non-enumerative) checkers for the standard relations


def is_monotone(f: BoolFun) -> bool:
    n, t = f.arity, f.table
    for i in range(n):
        w = 1 << i
        lo = _low_half_mask(n, i)
        if (t & lo) & ~(t >> w):
            return False
    return True


def affine_fit(f: BoolFun) -> tuple[int, int]:
    """(alpha bitmask, beta) of the affine function agreeing with f at 0 and
    the unit vectors."""
    beta = f(0)
    alpha = 0
    for i in range(f.arity):
        if f(1 << i) ^ beta:
            alpha |= 1 << i
    return alpha, beta


def affine_table(arity: int, alpha: int, beta: int) -> int:
    acc = table_mask(arity) if beta else 0
    for i in range(arity):
        if (alpha >> i) & 1:
            acc ^= var_mask(arity, i)
    return acc


def is_affine(f: BoolFun) -> bool:
    alpha, beta = affine_fit(f)
    return f.table == affine_table(f.arity, alpha, beta)


def is_self_dual(f: BoolFun) -> bool:
    return f == dual(f)


def and_set_fit(f: BoolFun) -> Optional[tuple[str, int]]:
    """Identify f within the conjunctive inventory {0, 1, AND over I}.

    Returns ("const", 0/1) or ("and", I bitmask), or None when f is outside.
    Identification uses only the evaluations the inventory determines:
    f(1...1) and f at complements of unit vectors, then one table compare.
    """
    n = f.arity
    full_a = (1 << n) - 1
    if f(full_a) == 0:
        return ("const", 0) if f.table == 0 else None
    i_set = 0
    for i in range(n):
        if f(full_a ^ (1 << i)) == 0:
            i_set |= 1 << i
    if i_set == 0:
        return ("const", 1) if f.table == table_mask(n) else None
    acc = table_mask(n)
    for i in range(n):
        if (i_set >> i) & 1:
            acc &= var_mask(n, i)
    return ("and", i_set) if f.table == acc else None


def or_set_fit(f: BoolFun) -> Optional[tuple[str, int]]:
    """Disjunctive-inventory identification, mirror of :func:`and_set_fit`."""
    n = f.arity
    if f(0) == 1:
        return ("const", 1) if f.table == table_mask(n) else None
    i_set = 0
    for i in range(n):
        if f(1 << i) == 1:
            i_set |= 1 << i
    if i_set == 0:
        return ("const", 0) if f.table == 0 else None
    acc = 0
    for i in range(n):
        if (i_set >> i) & 1:
            acc |= var_mask(n, i)
    return ("or", i_set) if f.table == acc else None


def is_conjunctive(f: BoolFun) -> bool:
    return and_set_fit(f) is not None


def is_disjunctive(f: BoolFun) -> bool:
    return or_set_fit(f) is not None


def is_essentially_unary(f: BoolFun) -> bool:
    return len(f.support()) <= 1


def preserves_specialized(f: BoolFun, tag: str, m: Optional[int] = None) -> bool:
    """Exact, direct characterization of preservation for the standard
    relations; semantically equal to ``preserves(f, standard_relation(tag))``."""
    if tag == "LE":
        return is_monotone(f)
    if tag == "AFF":
        return is_affine(f)
    if tag == "GR_NEG":
        return is_self_dual(f)
    if tag == "GR_AND":
        return is_conjunctive(f)
    if tag == "GR_OR":
        return is_disjunctive(f)
    if tag == "UNARY3":
        return is_essentially_unary(f)
    if tag == "R0":
        return arm_level(f, 0) >= m
    if tag == "R1":
        return arm_level(f, 1) >= m
    raise InputError(f"unknown relation tag {tag!r}")


# ---------------------------------------------------------------------------
# Constructive witnesses for the standard relations


def _first_one(mask: int) -> int:
    if mask == 0:
        raise InternalError("expected a nonzero mask")
    return (mask & -mask).bit_length() - 1


def witness_against(f: BoolFun, tag: str, m: Optional[int] = None) -> WitnessMatrix:
    """A witness matrix refuting f |> standard_relation(tag); the caller must
    already know preservation fails."""
    n = f.arity
    t = f.table
    full_t = table_mask(n)
    full_a = (1 << n) - 1

    def cols_from_rows(rows: list[int]) -> WitnessMatrix:
        columns = []
        for i in range(n):
            c = 0
            for j, row in enumerate(rows):
                c |= ((row >> i) & 1) << j
            columns.append(c)
        w = WitnessMatrix(len(rows), n, tuple(columns))
        if not w.verify(f, standard_relation(tag, m)):
            raise InternalError(f"constructed witness for {tag} failed to verify")
        return w

    if tag == "LE":
        for i in range(n):
            w = 1 << i
            viol = (t & _low_half_mask(n, i)) & ~(t >> w)
            if viol:
                a = _first_one(viol)
                return cols_from_rows([a, a | w])
        raise InternalError("no monotonicity violation found")

    if tag == "AFF":
        alpha, beta = affine_fit(f)
        diff = t ^ affine_table(n, alpha, beta)
        a = min((x for x in range(1 << n) if (diff >> x) & 1),
                key=lambda x: (bin(x).count("1"), x))
        b = a & -a
        c = a ^ b
        return cols_from_rows([b, c, 0, a])

    if tag == "GR_NEG":
        diff = t ^ dual(f).table
        a = _first_one(diff)
        return cols_from_rows([a, a ^ full_a])

    if tag == "GR_AND":
        if f(full_a) == 0:
            a = _first_one(t)
            return cols_from_rows([a, full_a, a])
        i_set = 0
        for i in range(n):
            if f(full_a ^ (1 << i)) == 0:
                i_set |= 1 << i
        cand = table_mask(n)
        for i in range(n):
            if (i_set >> i) & 1:
                cand &= var_mask(n, i)
        diff = t ^ cand
        a = _first_one(diff)
        if f(a) == 1:  # AND_I(a) = 0: some i in I is off in a
            i = _first_one(i_set & ~a)
            return cols_from_rows([a, full_a ^ (1 << i), a])
        # f(a) = 0 but I subset of a: walk the AND-cascade of complements.
        u = None
        for i in range(n):
            if (a >> i) & 1:
                continue
            e_bar = full_a ^ (1 << i)
            nxt = e_bar if u is None else (u & e_bar)
            if u is not None and f(nxt) == 0:
                return cols_from_rows([u, e_bar, nxt])
            u = nxt
        raise InternalError("conjunctive cascade found no violation")

    if tag == "GR_OR":
        wd = witness_against(dual(f), "GR_AND")
        cols = tuple(c ^ ((1 << wd.rows) - 1) for c in wd.columns)
        w = WitnessMatrix(wd.rows, n, cols)
        if not w.verify(f, standard_relation("GR_OR")):
            raise InternalError("dualized disjunctive witness failed")
        return w

    if tag == "UNARY3":
        sup = f.support()
        i = sup[0]
        w = 1 << i
        viol = (t & _low_half_mask(n, i)) & ~(t >> w)
        if viol:
            p = _first_one(viol) | w
        else:
            viol = (~t & _low_half_mask(n, i)) & (t >> w)
            p = _first_one(viol)
        # Now f(p) = 0 and f(p ^ w) = 1.
        half_same = _half_space_mask(n, i, (p >> i) & 1)
        ones_same = t & half_same
        if ones_same:
            b = _first_one(ones_same)
            return cols_from_rows([p ^ w, b, p])
        zeros_other = ~t & full_t & _half_space_mask(n, i, 1 - ((p >> i) & 1))
        if zeros_other:
            b = _first_one(zeros_other)
            return cols_from_rows([p, b, p ^ w])
        raise InternalError("function is a literal; it preserves r_U")

    if tag in ("R0", "R1"):
        if m is None:
            raise InputError("arm witness needs the level m")
        sub = arm_refutation(f, 0 if tag == "R0" else 1)
        if sub is None or len(sub) > m:
            raise InternalError(f"no {tag}({m}) refutation exists")
        rows = sub + [sub[-1]] * (m - len(sub))
        return cols_from_rows(rows)

    raise InputError(f"unknown relation tag {tag!r}")


@lru_cache(maxsize=None)
def _half_space_mask(arity: int, i: int, value: int) -> int:
    v = var_mask(arity, i)
    return v if value else (~v & table_mask(arity))
