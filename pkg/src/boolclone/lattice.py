"""Symbolic Post's lattice.

A clone is represented canonically by the full set of its invariants among
the meet-irreducible ones: six flag relations plus the levels of the two
infinite arms (``sup { m : clone preserves r^m_alpha }``, with ``math.inf``
for the arms' intersections).  Canonical descriptors make all lattice
queries structural.

Canonicalization computes, for a raw invariant set S, the invariants of the
polymorphism clone Pol(S).  Flags and finite arm levels are read off the
pool of arity-<=4 polymorphisms of S; arm levels that exceed every pool
witness are infinite unless the raw set itself pins a finite level on a
plain monotone/top arm family (the only clones whose arity-<=4 part cannot
expose the level).  The test suite validates this exhaustively against the
closure oracle and the named-clone table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import inf, isinf
from typing import Iterable, Optional, Union

import numpy as np

from .errors import InputError, InternalError
from .funcore import BoolFun, table_mask, var_mask
from .relations import (
    FLAG_TAGS,
    Relation,
    WitnessMatrix,
    arm_level,
    family_Rn,
    preserves_specialized,
    relation_name,
    standard_relation,
    witness_against,
)

Level = Union[int, float]

_POOL_MAX_ARITY = 4


@dataclass(frozen=True)
class CloneDesc:
    """Canonical point of Post's lattice: preserved flags plus arm levels."""

    flags: frozenset
    arm0: Level
    arm1: Level

    def serialize(self) -> str:
        flag_part = ",".join(t for t in FLAG_TAGS if t in self.flags)
        a0 = "inf" if isinf(self.arm0) else str(self.arm0)
        a1 = "inf" if isinf(self.arm1) else str(self.arm1)
        return f"{flag_part}:{a0}:{a1}"

    @staticmethod
    def deserialize(text: str) -> "CloneDesc":
        try:
            flag_part, a0, a1 = text.split(":")
        except ValueError:
            raise InputError(f"bad descriptor literal {text!r}")
        flags = frozenset(t for t in flag_part.split(",") if t)
        for t in flags:
            if t not in FLAG_TAGS:
                raise InputError(f"unknown flag {t!r}")

        def level(s: str) -> Level:
            return inf if s in ("inf", "∞") else int(s)

        return CloneDesc(flags, level(a0), level(a1))


# ---------------------------------------------------------------------------
# Pools of small polymorphisms, vectorized per arity


@lru_cache(maxsize=None)
def _pool(n: int) -> dict:
    size = 1 << n
    count = 1 << size
    tables = np.arange(count, dtype=np.int64)
    assigns = np.arange(size, dtype=np.int64)
    entries = ((tables[:, None] >> assigns[None, :]) & 1).astype(bool)
    full_assn = size - 1

    out: dict = {"tables": tables, "E": entries}

    # Monotone: no x_i=0 entry 1 with its x_i=1 partner 0.
    mono = np.ones(count, dtype=bool)
    for i in range(n):
        lo = [a for a in range(size) if not (a >> i) & 1]
        hi = [a | (1 << i) for a in lo]
        mono &= ~(entries[:, lo] & ~entries[:, hi]).any(axis=1)
    out["LE"] = mono

    # Affine: table equals its affine fit through 0 and the unit vectors.
    beta = entries[:, 0].astype(np.int64)
    fit = np.broadcast_to(beta[:, None], (count, size)).copy()
    for i in range(n):
        alpha_i = (entries[:, 1 << i].astype(np.int64) ^ beta)
        abit = ((assigns >> i) & 1).astype(np.int64)
        fit ^= alpha_i[:, None] * abit[None, :]
    out["AFF"] = (fit.astype(bool) == entries).all(axis=1)

    # Self-dual: entry a equals the negation of entry ~a.
    comp = [full_assn ^ a for a in range(size)]
    dual_entries = ~entries[:, comp]
    out["GR_NEG"] = (entries == dual_entries).all(axis=1)

    # Conjunctive / disjunctive / essentially-unary inventories.
    def inv_lookup(inventory: set) -> np.ndarray:
        arr = np.zeros(count, dtype=bool)
        for t in inventory:
            arr[t] = True
        return arr

    mask = table_mask(n)
    and_inv = {0, mask}
    or_inv = {0, mask}
    for i_bits in range(1, size):
        acc_and, acc_or = mask, 0
        for i in range(n):
            if (i_bits >> i) & 1:
                acc_and &= var_mask(n, i)
                acc_or |= var_mask(n, i)
        and_inv.add(acc_and)
        or_inv.add(acc_or)
    unary_inv = {0, mask}
    for i in range(n):
        v = var_mask(n, i)
        unary_inv.add(v)
        unary_inv.add(~v & mask)
    out["GR_AND"] = inv_lookup(and_inv)
    out["GR_OR"] = inv_lookup(or_inv)
    out["UNARY3"] = inv_lookup(unary_inv)

    # Arm levels; 255 encodes infinity.
    out["ARM0"] = _arm0_levels(n, entries)
    dual_idx = np.zeros(count, dtype=np.int64)
    for a in range(size):
        dual_idx |= dual_entries[:, a].astype(np.int64) << a
    out["ARM1"] = out["ARM0"][dual_idx]
    return out


def _arm0_levels(n: int, entries: np.ndarray) -> np.ndarray:
    count, size = entries.shape
    full_assn = size - 1

    is_inf = entries.sum(axis=1) == 0
    for i in range(n):
        lo = [a for a in range(size) if not (a >> i) & 1]
        is_inf |= ~entries[:, lo].any(axis=1)

    # D[t, m]: some one-entry of t is a bitwise subset of m.
    D = entries.copy()
    for b in range(n):
        hi = [m for m in range(size) if (m >> b) & 1]
        lo = [m ^ (1 << b) for m in hi]
        D[:, hi] |= D[:, lo]

    comp = [full_assn ^ a for a in range(size)]
    exists = [np.zeros(count, dtype=bool) for _ in range(n + 1)]
    # exists[s]: some <= (s+1)-subset of ones has AND 0.
    exists[0] = entries[:, 0]
    if n >= 1:
        exists[1] = (entries & D[:, comp]).any(axis=1)
    if n >= 2:
        acc = np.zeros(count, dtype=bool)
        for a, b in itertools.combinations_with_replacement(range(size), 2):
            acc |= entries[:, a] & entries[:, b] & D[:, full_assn ^ (a & b)]
        exists[2] = acc
    if n >= 3:
        acc = np.zeros(count, dtype=bool)
        for a, b, c in itertools.combinations_with_replacement(range(size), 3):
            acc |= (
                entries[:, a]
                & entries[:, b]
                & entries[:, c]
                & D[:, full_assn ^ (a & b & c)]
            )
        exists[3] = acc

    levels = np.full(count, 255, dtype=np.uint8)
    for s in range(min(n - 1, 3), -1, -1):
        levels[exists[s]] = s
    levels[is_inf] = 255
    # Lemma-2 cutoff: every non-infinite arity-n function refutes r^n_0,
    # so each one received a finite level above.
    if (levels[~is_inf] == 255).any():
        raise InternalError("arm level computation incomplete")
    return levels


# ---------------------------------------------------------------------------
# Canonicalization


def _as_uint_level(x: Level) -> int:
    return 255 if isinf(x) else int(x)


def canonicalize(flags: Iterable[str], arm0: Level, arm1: Level) -> CloneDesc:
    """Full invariant set of Pol(raw invariant set); idempotent."""
    raw_flags = frozenset(flags)
    for t in raw_flags:
        if t not in FLAG_TAGS:
            raise InputError(f"unknown flag {t!r}")
    r0, r1 = _as_uint_level(arm0), _as_uint_level(arm1)

    out_flags = set(FLAG_TAGS)
    min0, min1 = 255, 255
    for n in range(1, _POOL_MAX_ARITY + 1):
        pool = _pool(n)
        mask = np.ones(len(pool["tables"]), dtype=bool)
        for t in raw_flags:
            mask &= pool[t]
        a0, a1 = pool["ARM0"], pool["ARM1"]
        mask &= (a0 == 255) | (a0 >= r0)
        mask &= (a1 == 255) | (a1 >= r1)
        for t in list(out_flags):
            if not pool[t][mask].all():
                out_flags.discard(t)
        lv0 = a0[mask]
        lv1 = a1[mask]
        if lv0.size:
            min0 = min(min0, int(lv0.min()))
            min1 = min(min1, int(lv1.min()))

    def finish(pool_min: int, raw: Level) -> Level:
        if pool_min != 255:
            return pool_min
        # Every small polymorphism sits on the infinite arm.  The level is
        # genuinely infinite unless the clone is a plain (monotone) arm
        # family, where the raw level is the answer.
        if out_flags <= {"LE"}:
            return raw
        return inf

    c0 = finish(min0, arm0)
    c1 = finish(min1, arm1)
    return CloneDesc(frozenset(out_flags), c0, c1)


# ---------------------------------------------------------------------------
# Clone of a function set; cached per-function invariants


@lru_cache(maxsize=1 << 16)
def _fun_flags(f: BoolFun) -> frozenset:
    return frozenset(t for t in FLAG_TAGS if preserves_specialized(f, t))


@lru_cache(maxsize=1 << 16)
def _fun_arm(f: BoolFun, alpha: int) -> Level:
    return arm_level(f, alpha)


def clone_of(funs: Iterable[BoolFun]) -> CloneDesc:
    """Canonical descriptor of the clone generated by the given functions.

    By the polymorphism Galois connection this is exactly the set of
    R-invariants the functions jointly preserve.
    """
    fs = list(funs)
    flags = set(FLAG_TAGS)
    a0: Level = inf
    a1: Level = inf
    for f in fs:
        flags &= _fun_flags(f)
        a0 = min(a0, _fun_arm(f, 0))
        a1 = min(a1, _fun_arm(f, 1))
    return CloneDesc(frozenset(flags), a0, a1)


# ---------------------------------------------------------------------------
# Order, meet, join


def leq(c1: CloneDesc, c2: CloneDesc) -> bool:
    """Clone inclusion via reverse inclusion of invariant sets."""
    return (
        c2.flags <= c1.flags and c2.arm0 <= c1.arm0 and c2.arm1 <= c1.arm1
    )


def meet(c1: CloneDesc, c2: CloneDesc) -> CloneDesc:
    return canonicalize(
        c1.flags | c2.flags, max(c1.arm0, c2.arm0), max(c1.arm1, c2.arm1)
    )


def join(c1: CloneDesc, c2: CloneDesc) -> CloneDesc:
    return canonicalize(
        c1.flags & c2.flags, min(c1.arm0, c2.arm0), min(c1.arm1, c2.arm1)
    )


# ---------------------------------------------------------------------------
# Naming

_ALL6 = frozenset(FLAG_TAGS)
_FIVE = _ALL6 - {"GR_NEG"}


def _arm_part(a0: Level, a1: Level) -> Optional[str]:
    def lvl(x: Level) -> str:
        return "∞" if isinf(x) else str(x)

    if (a0, a1) == (0, 0):
        return ""
    if (a0, a1) == (1, 0):
        return "P0"
    if (a0, a1) == (0, 1):
        return "P1"
    if (a0, a1) == (1, 1):
        return "P"
    if a0 >= 2 and a1 == 0:
        return f"T^{lvl(a0)}_0"
    if a0 >= 2 and a1 == 1:
        return f"PT^{lvl(a0)}_0"
    if a1 >= 2 and a0 == 0:
        return f"T^{lvl(a1)}_1"
    if a1 >= 2 and a0 == 1:
        return f"PT^{lvl(a1)}_1"
    return None


def name(c: CloneDesc) -> str:
    """Conventional name of a canonical descriptor; non-matching descriptors
    fall back to their invariant signature."""
    key = c.flags
    arms = (c.arm0, c.arm1)
    if key == _ALL6:
        if arms == (inf, inf):
            return "⊥"
    elif key == _FIVE:
        if arms == (0, 0):
            return "MU"
        if arms == (inf, 0):
            return "UP0"
        if arms == (0, inf):
            return "UP1"
    elif key == frozenset({"AFF", "GR_NEG", "UNARY3"}):
        if arms == (0, 0):
            return "UD"
    elif key == frozenset({"AFF", "UNARY3"}):
        if arms == (0, 0):
            return "U"
    elif key == frozenset({"AFF", "GR_NEG"}):
        if arms == (0, 0):
            return "AD"
        if arms == (1, 1):
            return "AP"
    elif key == frozenset({"AFF"}):
        if arms == (0, 0):
            return "A"
        if arms == (1, 0):
            return "AP0"
        if arms == (0, 1):
            return "AP1"
    elif key == frozenset({"GR_NEG"}):
        if arms == (0, 0):
            return "D"
        if arms == (1, 1):
            return "DP"
    elif key == frozenset({"LE", "GR_NEG"}):
        if arms == (2, 2):
            return "DM"
    elif key == frozenset({"LE", "GR_AND"}):
        if arms == (0, 0):
            return "E"
        if arms == (inf, 0):
            return "EP0"
        if arms == (0, 1):
            return "EP1"
        if arms == (inf, 1):
            return "EP"
    elif key == frozenset({"LE", "GR_OR"}):
        if arms == (0, 0):
            return "V"
        if arms == (1, 0):
            return "VP0"
        if arms == (0, inf):
            return "VP1"
        if arms == (1, inf):
            return "VP"
    elif key == frozenset({"LE"}):
        part = _arm_part(*arms)
        if part is not None:
            return "M" + part
    elif key == frozenset():
        if arms == (0, 0):
            return "⊤"
        part = _arm_part(*arms)
        if part:
            return part
    return c.serialize()


def named(s: str) -> CloneDesc:
    """Parse a clone name from the juxtaposition grammar and canonicalize."""
    text = s.strip()
    if text in ("⊤", "TOP"):
        return canonicalize(frozenset(), 0, 0)
    if text in ("⊥", "BOT"):
        return canonicalize(_ALL6, inf, inf)
    letter_flags = {
        "M": "LE", "A": "AFF", "D": "GR_NEG",
        "E": "GR_AND", "V": "GR_OR", "U": "UNARY3",
    }
    flags: set[str] = set()
    arm0: Level = 0
    arm1: Level = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in letter_flags:
            flags.add(letter_flags[ch])
            i += 1
            continue
        if ch == "P":
            nxt = text[i + 1] if i + 1 < len(text) else ""
            if nxt in ("0", "₀"):
                arm0 = max(arm0, 1)
                i += 2
            elif nxt in ("1", "₁"):
                arm1 = max(arm1, 1)
                i += 2
            elif nxt == "T":
                # "PT^m_a" contributes P on both sides plus the arm.
                arm0 = max(arm0, 1)
                arm1 = max(arm1, 1)
                i += 1
            else:
                arm0 = max(arm0, 1)
                arm1 = max(arm1, 1)
                i += 1
            continue
        if ch == "T":
            if i + 1 >= len(text) or text[i + 1] != "^":
                raise InputError(f"bad arm syntax in clone name {s!r}")
            j = i + 2
            k = j
            while k < len(text) and text[k] != "_":
                k += 1
            if k >= len(text) or k + 1 >= len(text):
                raise InputError(f"bad arm syntax in clone name {s!r}")
            m_text = text[j:k]
            if m_text in ("∞", "inf", "oo"):
                m: Level = inf
            else:
                try:
                    m = int(m_text)
                except ValueError:
                    raise InputError(f"bad arm level {m_text!r} in {s!r}")
                if m < 1:
                    raise InputError(f"arm level must be >= 1 in {s!r}")
            side = text[k + 1]
            if side in ("0", "₀"):
                arm0 = max(arm0, m)
            elif side in ("1", "₁"):
                arm1 = max(arm1, m)
            else:
                raise InputError(f"bad arm side {side!r} in {s!r}")
            i = k + 2
            continue
        raise InputError(f"unknown clone name {s!r} (at {ch!r})")
    return canonicalize(frozenset(flags), arm0, arm1)


TOP = CloneDesc(frozenset(), 0, 0)
BOT = CloneDesc(_ALL6, inf, inf)


@lru_cache(maxsize=None)
def named_desc(s: str) -> CloneDesc:
    return named(s)


#: Canonical names of the finitely many clones off the parametric arm
#: families, used by tests and the basis classifier.
CORE_CLONE_NAMES = (
    "⊤", "P0", "P1", "P",
    "M", "MP0", "MP1", "MP",
    "D", "DP", "DM",
    "A", "AP0", "AP1", "AP", "AD",
    "U", "UD", "MU",
    "E", "EP0", "EP1", "EP",
    "V", "VP0", "VP1", "VP",
    "UP0", "UP1", "⊥",
)


# ---------------------------------------------------------------------------
# Membership (the invariant-comparison criterion over R_n)


@dataclass(frozen=True)
class MemberResult:
    holds: bool
    separating_tag: Optional[str] = None
    separating_m: Optional[int] = None
    separating_relation: Optional[Relation] = None
    witness: Optional[WitnessMatrix] = None

    def __bool__(self) -> bool:
        return self.holds

    def separator_name(self) -> Optional[str]:
        if self.separating_tag is None:
            return None
        return relation_name(self.separating_tag, self.separating_m)


def _pres(f: BoolFun, tag: str, m: Optional[int]) -> bool:
    if tag in ("R0", "R1"):
        return _fun_arm(f, 0 if tag == "R0" else 1) >= m
    return tag in _fun_flags(f)


def member(f: BoolFun, funs: Iterable[BoolFun]) -> MemberResult:
    """Decide f in [F] by comparing preserved invariants over R_{arity(f)}.

    On failure returns the first separating relation in family order plus a
    witness matrix refuting f against it.
    """
    fs = list(funs)
    n = f.arity
    for tag, m, rel in family_Rn(n):
        if all(_pres(g, tag, m) for g in fs) and not _pres(f, tag, m):
            return MemberResult(False, tag, m, rel, witness_against(f, tag, m))
    return MemberResult(True)
