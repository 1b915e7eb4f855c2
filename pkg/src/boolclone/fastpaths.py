"""Evaluation-only clone identification for restricted bases, the
speculative two-candidate membership scheme, and the basis complexity
classifier.

The fast paths never materialize a circuit's full truth table: they
evaluate it on the handful of designated assignments (the all-zero vector,
unit vectors, a complement vector, the all-one vector) that pin the
function down inside the restricted ambient clone.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf, isinf
from typing import Iterable, Optional, Sequence

from .errors import CapacityError, InputError, InternalError, LogicError
from .funcore import TABLE_CAP, Assignment, Basis, BoolFun, CircuitDAG, eval_on, truth_table
from .lattice import BOT, CloneDesc, clone_of, join, leq, named_desc
from .relations import is_affine, is_monotone


def _gate_check(c: CircuitDAG, ambient: CloneDesc, ambient_name: str) -> None:
    for gname in sorted(c.gate_names()):
        fun = c.basis.fun(gname)
        if not leq(clone_of([fun]), ambient):
            raise LogicError(
                f"gate {gname!r} lies outside the ambient clone {ambient_name}"
            )


def _ev(c: CircuitDAG, bits: int) -> int:
    return eval_on(c, Assignment(c.arity, bits))


@dataclass(frozen=True)
class RestrictedIdentification:
    """Outcome of the evaluation-only identification."""

    ambient: str
    kind: str  # const | or_set | and_set | affine | projection | beyond
    detail: tuple
    clone: CloneDesc


_AMBIENTS = ("V", "E", "A", "DM", "MT^∞_1", "MT^∞_0")
_AMBIENT_ALIASES = {
    "V": "V", "OR": "V", "E": "E", "AND": "E", "A": "A", "DM": "DM",
    "MT^∞_1": "MT^∞_1", "MT1": "MT^∞_1", "MT^INF_1": "MT^∞_1",
    "MT^∞_0": "MT^∞_0", "MT0": "MT^∞_0", "MT^INF_0": "MT^∞_0",
}


def _or_set_clone(i_set: int) -> tuple[str, tuple, CloneDesc]:
    k = bin(i_set).count("1")
    if k == 0:
        return "const", (0,), named_desc("UP0")
    if k == 1:
        return "projection", (i_set.bit_length() - 1,), BOT
    return "or_set", (i_set,), named_desc("VP")


def _and_set_clone(i_set: int) -> tuple[str, tuple, CloneDesc]:
    k = bin(i_set).count("1")
    if k == 0:
        return "const", (1,), named_desc("UP1")
    if k == 1:
        return "projection", (i_set.bit_length() - 1,), BOT
    return "and_set", (i_set,), named_desc("EP")


def identify_restricted(c: CircuitDAG, ambient: str) -> RestrictedIdentification:
    """Identify the function computed by a circuit whose gates lie in one of
    the evaluation-friendly ambient clones, and return its generated clone,
    using only the designated evaluation points."""
    amb = _AMBIENT_ALIASES.get(ambient.upper().replace("INF", "∞"), None)
    if amb is None:
        raise InputError(f"unknown ambient clone {ambient!r}")
    n = c.arity
    full = (1 << n) - 1
    amb_desc = named_desc(amb if amb not in ("MT^∞_1", "MT^∞_0") else
                          ("MT^∞_1" if amb == "MT^∞_1" else "MT^∞_0"))
    _gate_check(c, amb_desc, amb)

    if amb == "V":
        if _ev(c, 0) == 1:
            return RestrictedIdentification(amb, "const", (1,), named_desc("UP1"))
        i_set = 0
        for i in range(n):
            if _ev(c, 1 << i):
                i_set |= 1 << i
        kind, detail, clone = _or_set_clone(i_set)
        return RestrictedIdentification(amb, kind, detail, clone)

    if amb == "E":
        if _ev(c, full) == 0:
            return RestrictedIdentification(amb, "const", (0,), named_desc("UP0"))
        i_set = 0
        for i in range(n):
            if _ev(c, full ^ (1 << i)) == 0:
                i_set |= 1 << i
        kind, detail, clone = _and_set_clone(i_set)
        return RestrictedIdentification(amb, kind, detail, clone)

    if amb == "A":
        beta = _ev(c, 0)
        alpha = 0
        for i in range(n):
            if _ev(c, 1 << i) ^ beta:
                alpha |= 1 << i
        k = bin(alpha).count("1")
        if k == 0:
            clone = named_desc("UP1" if beta else "UP0")
            return RestrictedIdentification(amb, "const", (beta,), clone)
        if k == 1:
            if beta:
                return RestrictedIdentification(
                    amb, "affine", (alpha, beta), named_desc("UD")
                )
            return RestrictedIdentification(
                amb, "projection", (alpha.bit_length() - 1,), BOT
            )
        if k % 2 == 0:
            clone = named_desc("AP1" if beta else "AP0")
        else:
            clone = named_desc("AD" if beta else "AP")
        return RestrictedIdentification(amb, "affine", (alpha, beta), clone)

    if amb == "DM":
        for i in range(n):
            if _ev(c, 1 << i) == 1:
                return RestrictedIdentification(amb, "projection", (i,), BOT)
        return RestrictedIdentification(amb, "beyond", (), named_desc("DM"))

    if amb == "MT^∞_1":
        if _ev(c, 0) == 1:
            return RestrictedIdentification(amb, "const", (1,), named_desc("UP1"))
        i_set = 0
        for i in range(n):
            if _ev(c, 1 << i):
                i_set |= 1 << i
        probe = full ^ i_set
        if _ev(c, probe) == 0:
            kind, detail, clone = _or_set_clone(i_set)
            return RestrictedIdentification(amb, kind, detail, clone)
        return RestrictedIdentification(
            amb, "beyond", (), named_desc("MPT^∞_1")
        )

    # MT^∞_0
    if _ev(c, full) == 0:
        return RestrictedIdentification(amb, "const", (0,), named_desc("UP0"))
    i_set = 0
    for i in range(n):
        if _ev(c, full ^ (1 << i)) == 0:
            i_set |= 1 << i
    if _ev(c, i_set) == 1:
        kind, detail, clone = _and_set_clone(i_set)
        return RestrictedIdentification(amb, kind, detail, clone)
    return RestrictedIdentification(amb, "beyond", (), named_desc("MPT^∞_0"))


# ---------------------------------------------------------------------------
# Speculative candidate clones (two-query membership scheme)


@dataclass(frozen=True)
class CandidateClones:
    c0: CloneDesc
    c1: CloneDesc
    inconsistent: bool


def _speculate_T1(c: CircuitDAG) -> tuple[Optional[CloneDesc], bool, bool]:
    """(clone under the monotonicity assumption or None, inconsistency flag,
    preserves-0 evidence)."""
    n = c.arity
    full = (1 << n) - 1
    z = _ev(c, 0)
    us = [_ev(c, 1 << i) for i in range(n)]
    i_set = sum(1 << i for i, u in enumerate(us) if u)
    v = _ev(c, full ^ i_set)
    if z == 1:
        if all(us) and v == 1:
            return named_desc("UP1"), False, False
        return None, True, False
    if v == 0:
        if i_set == 0:
            return None, True, True
        _, _, clone = _or_set_clone(i_set)
        return clone, False, True
    return named_desc("MPT^∞_1"), False, True


def _speculate_T0(c: CircuitDAG) -> tuple[Optional[CloneDesc], bool, bool]:
    n = c.arity
    full = (1 << n) - 1
    w = _ev(c, full)
    us = [_ev(c, full ^ (1 << i)) for i in range(n)]
    i_set = sum(1 << i for i, u in enumerate(us) if u == 0)
    v = _ev(c, i_set)
    if w == 0:
        if all(u == 0 for u in us) and v == 0:
            return named_desc("UP0"), False, False
        return None, True, False
    if v == 1:
        if i_set == 0:
            return None, True, True
        _, _, clone = _and_set_clone(i_set)
        return clone, False, True
    return named_desc("MPT^∞_0"), False, True


def candidate_clones(circuits: Sequence[CircuitDAG],
                     side: str = "T1") -> CandidateClones:
    """The two candidate clones (C0 under the speculative 'all monotone'
    assumption, C1 = C0 joined with the constant-free arm) for circuits over
    a basis inside the corresponding infinite arm.

    On inconsistency the fallback keeps C0 inside the monotone part and the
    join identity intact: bottom when the evaluations witness constant
    preservation, the lone-constant clone otherwise.
    """
    side = side.upper()
    if side in ("T1", "T^∞_1"):
        ambient, spec, arm, fb = "T^∞_1", _speculate_T1, "PT^∞_1", "UP1"
    elif side in ("T0", "T^∞_0"):
        ambient, spec, arm, fb = "T^∞_0", _speculate_T0, "PT^∞_0", "UP0"
    elif side in ("D",):
        return _candidate_clones_D(circuits)
    else:
        raise InputError(f"unknown side {side!r}")
    amb_desc = named_desc(ambient)
    for c in circuits:
        _gate_check(c, amb_desc, ambient)
    cands: list[CloneDesc] = []
    inconsistent = False
    const_ok = True
    for c in circuits:
        clone, bad, pres = spec(c)
        inconsistent |= bad
        const_ok &= pres
        if clone is not None:
            cands.append(clone)
    if inconsistent:
        c0 = BOT if const_ok else named_desc(fb)
    else:
        c0 = BOT
        for cl in cands:
            c0 = join(c0, cl)
    c1 = join(c0, named_desc(arm))
    return CandidateClones(c0, c1, inconsistent)


def _candidate_clones_D(circuits: Sequence[CircuitDAG]) -> CandidateClones:
    amb_desc = named_desc("D")
    for c in circuits:
        _gate_check(c, amb_desc, "D")
    zs = []
    spread = False
    ms = []
    for c in circuits:
        n = c.arity
        z = _ev(c, 0)
        es = [_ev(c, 1 << i) for i in range(n)]
        zs.append(z)
        if sum(1 for u in es if u != z) > 1:
            spread = True
        ms.append(sum(es))
    if any(zs):
        c0 = named_desc("AD") if spread else named_desc("UD")
    elif any(m == 0 for m in ms):
        c0 = named_desc("DM")
    elif any(m > 1 for m in ms):
        c0 = named_desc("AP")
    else:
        c0 = BOT
    c1 = join(c0, named_desc("DP"))
    return CandidateClones(c0, c1, False)


def _oracle_all_monotone(circuits: Sequence[CircuitDAG]) -> bool:
    for c in circuits:
        if c.arity > TABLE_CAP:
            raise CapacityError(
                "monotonicity oracle is exhaustive-only; arity over cap"
            )
        if not is_monotone(truth_table(c)):
            return False
    return True


def _oracle_all_affine(circuits: Sequence[CircuitDAG]) -> bool:
    for c in circuits:
        if c.arity > TABLE_CAP:
            raise CapacityError(
                "affineness oracle is exhaustive-only; arity over cap"
            )
        if not is_affine(truth_table(c)):
            return False
    return True


@dataclass(frozen=True)
class TwoQueryResult:
    holds: bool
    branch: int  # 1: C0' <= C0, 2: C1' <= C1 only, 3: C1' not <= C1


def member_two_query(circuits: Sequence[CircuitDAG], f: CircuitDAG,
                     side: str = "T1") -> TwoQueryResult:
    """Membership via the candidate-clone case analysis, with the
    monotonicity (and, on the self-dual side, affineness) tests played by
    exhaustive checks within the cap."""
    side_u = side.upper()
    cf = candidate_clones(circuits, side)
    cg = candidate_clones([f], side)
    if side_u == "D":
        in_l0 = (
            leq(cg.c1, cf.c1)
            and not _oracle_all_monotone(circuits)
            and not _oracle_all_affine(circuits)
        )
        in_l1 = leq(cg.c0, cf.c0) and (
            _oracle_all_monotone([f]) or _oracle_all_affine([f])
        )
        if leq(cg.c0, cf.c0):
            branch = 1
        elif leq(cg.c1, cf.c1):
            branch = 2
        else:
            branch = 3
        return TwoQueryResult(in_l0 or in_l1, branch)
    if leq(cg.c0, cf.c0):
        branch = 1
        ans = (not _oracle_all_monotone(circuits)) or _oracle_all_monotone([f])
    elif leq(cg.c1, cf.c1):
        branch = 2
        ans = not _oracle_all_monotone(circuits)
    else:
        branch = 3
        ans = False
    return TwoQueryResult(ans, branch)


# ---------------------------------------------------------------------------
# Basis complexity classifier

LABEL_P = "P"
LABEL_CODP = "coDP-complete"
LABEL_T2_RAND = "Θᵖ₂-complete(randomized)"
LABEL_T2 = "Θᵖ₂-complete"
LABEL_OPEN_BH = "BH-hard-in-Θᵖ₂"
LABEL_OPEN_CODP = "coDP-hard-in-Θᵖ₂"

_PTIME_AMBIENTS = ("MT^∞_0", "MT^∞_1", "E", "V", "A", "DM")
_CODP_CLONES = ("T^∞_0", "PT^∞_0", "T^∞_1", "PT^∞_1", "D", "DP")


def classify_clone(c: CloneDesc) -> str:
    """Complexity label of the membership problem restricted to circuits
    over any basis generating this clone."""
    for amb in _PTIME_AMBIENTS:
        if leq(c, named_desc(amb)):
            return LABEL_P
    for cl in _CODP_CLONES:
        if c == named_desc(cl):
            return LABEL_CODP
    if leq(named_desc("P"), c):
        return LABEL_T2
    if not c.flags:
        if (not isinf(c.arm0) and c.arm1 <= 1) or (
            not isinf(c.arm1) and c.arm0 <= 1
        ):
            return LABEL_T2_RAND
    if c.flags == frozenset({"LE"}):
        if (not isinf(c.arm0) and c.arm1 <= 1) or (
            not isinf(c.arm1) and c.arm0 <= 1
        ):
            if leq(named_desc("MPT^2_0"), c) or leq(named_desc("MPT^2_1"), c):
                return LABEL_OPEN_CODP
            return LABEL_OPEN_BH
    raise InternalError(f"classifier fell through on {c.serialize()}")


def classify_basis(basis_or_functions) -> str:
    if isinstance(basis_or_functions, Basis):
        funs = basis_or_functions.functions()
    else:
        funs = list(basis_or_functions)
    return classify_clone(clone_of(funs))
