import itertools
import random
from math import inf

import pytest

from boolclone.errors import InputError
from boolclone.funcore import (
    AND,
    IMP,
    MAJ,
    NOT,
    NOTIMPLIES,
    ONE,
    OR,
    XOR,
    ZERO,
    BoolFun,
    dual,
    theta_fun,
)
from boolclone.lattice import (
    BOT,
    TOP,
    CloneDesc,
    canonicalize,
    clone_of,
    join,
    leq,
    meet,
    member,
    name,
    named,
)
from boolclone.relations import preserves_specialized
from conftest import rand_fun

XYZ_PARITY = BoolFun.from_callable(3, lambda x, y, z: (x + y + z) % 2 == 1)
XYZ_PARITY_1 = BoolFun.from_callable(3, lambda x, y, z: (x + y + z) % 2 == 0)
XNOR = BoolFun.from_callable(2, lambda x, y: x == y)
MAJ_XY_NOTZ = BoolFun.from_callable(3, lambda x, y, z: (x + y + (1 - z)) >= 2)
AND_OR = BoolFun.from_callable(3, lambda x, y, z: x and (y or z))
OR_AND = BoolFun.from_callable(3, lambda x, y, z: x or (y and z))
PT0_GEN = BoolFun.from_callable(3, lambda x, y, z: x and ((not y) or z))
PT1_GEN = dual(PT0_GEN)

# Canonical name -> a generating set, assembled from the meet-irreducible
# generator inventory.  clone_of on each set must reproduce the named
# descriptor exactly; this is the executable named-clone table.
GENERATORS = {
    "⊤": [AND, NOT],
    "P0": [OR, NOTIMPLIES],
    "P1": [AND, IMP],
    "P": [OR, XYZ_PARITY],
    "M": [AND, OR, ZERO, ONE],
    "MP0": [AND, OR, ZERO],
    "MP1": [AND, OR, ONE],
    "MP": [AND, OR],
    "D": [MAJ, NOT],
    "DP": [MAJ_XY_NOTZ],
    "DM": [MAJ],
    "A": [XOR, ONE],
    "AP0": [XOR],
    "AP1": [XNOR],
    "AP": [XYZ_PARITY],
    "AD": [XYZ_PARITY_1],
    "U": [NOT, ZERO],
    "UD": [NOT],
    "MU": [ZERO, ONE],
    "E": [AND, ZERO, ONE],
    "EP0": [AND, ZERO],
    "EP1": [AND, ONE],
    "EP": [AND],
    "V": [OR, ZERO, ONE],
    "VP0": [OR, ZERO],
    "VP1": [OR, ONE],
    "VP": [OR],
    "UP0": [ZERO],
    "UP1": [ONE],
    "⊥": [],
    "T^∞_0": [NOTIMPLIES],
    "T^∞_1": [IMP],
    "PT^∞_0": [PT0_GEN],
    "PT^∞_1": [PT1_GEN],
    "MT^∞_0": [AND_OR, ZERO],
    "MT^∞_1": [OR_AND, ONE],
    "MPT^∞_0": [AND_OR],
    "MPT^∞_1": [OR_AND],
    "T^2_0": [theta_fun(3, 2), NOTIMPLIES],
    "T^5_0": [theta_fun(6, 5), NOTIMPLIES],
    "T^2_1": [theta_fun(3, 2), IMP],
    "T^4_1": [theta_fun(5, 2), IMP],
    "PT^3_0": [PT0_GEN, theta_fun(4, 3)],
    "PT^3_1": [PT1_GEN, theta_fun(4, 2)],
    "MT^3_0": [theta_fun(4, 3), ZERO],
    "MT^3_1": [theta_fun(4, 2), ONE],
    "MPT^3_0": [theta_fun(4, 3)],
    "MPT^3_1": [theta_fun(4, 2)],
    "MPT^2_0": [theta_fun(9, 6)],
    "MPT^2_1": [theta_fun(9, 4)],
}


def test_clone_of_examples():
    assert name(clone_of([AND, OR, ZERO, ONE])) == "M"
    assert name(clone_of([MAJ, NOT])) == "D"
    f = BoolFun.from_callable(2, lambda x, y: x and not y)
    assert name(clone_of([f])) == "T^∞_0"
    assert clone_of([]) == BOT


def test_named_clone_table():
    for nm, gens in GENERATORS.items():
        d = clone_of(gens)
        assert d == named(nm), f"{nm}: clone_of gives {d.serialize()}"
        assert name(d) == nm


def test_name_round_trip_generated():
    names = list(GENERATORS) + [
        f"{p}T^{m}_{a}"
        for p in ("", "P", "M", "MP")
        for m in (2, 3, 4, 6, 8, "∞")
        for a in (0, 1)
    ]
    for s in names:
        d = named(s)
        assert named(name(d)) == d
        assert name(named(name(d))) == name(d)


def test_named_aliases():
    assert named("TOP") == TOP
    assert named("BOT") == BOT
    assert named("T^inf_1") == named("T^∞_1")
    assert named("P₀") == named("P0")
    with pytest.raises(InputError):
        named("Q")


def test_name_examples_from_grammar():
    d = CloneDesc(frozenset({"LE"}), 1, 1)
    assert name(d) == "MP"
    assert named("T^3_0").arm0 == 3
    assert named("T^3_0").arm1 == 0


def test_canonicalize_dm():
    d = canonicalize({"GR_NEG", "LE"}, 0, 0)
    assert d == CloneDesc(frozenset({"LE", "GR_NEG"}), 2, 2)
    assert name(d) == "DM"
    # DM sits below P (both arm levels reach 1)
    assert leq(d, named("P"))


def test_canonicalize_trivial_ends():
    assert canonicalize(frozenset(), 0, 0) == TOP
    from boolclone.relations import FLAG_TAGS

    assert canonicalize(frozenset(FLAG_TAGS), inf, inf) == BOT


def test_canonicalize_idempotent():
    for nm in GENERATORS:
        d = named(nm)
        assert canonicalize(d.flags, d.arm0, d.arm1) == d


def test_canonicalize_arm_rules():
    # A plain arm family keeps its raw finite level even though no small
    # function witnesses it.
    assert canonicalize(frozenset(), 9, 0) == CloneDesc(frozenset(), 9, 0)
    assert canonicalize(frozenset({"LE"}), 7, 1).arm0 == 7
    # A conjunctive clone pushed into the 0-arm becomes infinitely deep.
    d = canonicalize({"GR_AND", "LE"}, 1, 0)
    assert d == named("EP0")
    assert d.arm0 == inf
    # Both arms at level >= 2 collapse onto the self-dual monotone clone.
    assert name(canonicalize(frozenset(), 2, 2)) == "DM"
    # An infinite 0-arm with a 1-arm of depth 2 leaves only projections.
    assert canonicalize(frozenset(), inf, 2) == BOT


def test_member_examples():
    assert member(OR, [AND, NOT]).holds
    res = member(NOT, [AND, OR])
    assert not res.holds
    assert res.separator_name() == "LE"
    assert res.witness.verify(NOT, res.separating_relation)
    # projections are members of anything
    proj = BoolFun.from_callable(2, lambda x, y: x)
    assert member(proj, []).holds


def test_member_monotone_in_F(rng):
    for _ in range(200):
        arity = rng.choice((1, 2, 3))
        f = rand_fun(rng, arity)
        F = [rand_fun(rng, rng.choice((1, 2, 3))) for _ in range(2)]
        extra = rand_fun(rng, 2)
        if member(f, F).holds:
            assert member(f, F + [extra]).holds


def test_clone_of_stable_under_members(rng):
    for _ in range(150):
        F = [rand_fun(rng, rng.choice((1, 2, 3))) for _ in range(2)]
        f = rand_fun(rng, rng.choice((1, 2, 3)))
        if member(f, F).holds:
            assert clone_of(F + [f]) == clone_of(F)


def test_leq_bottom_top():
    for nm in GENERATORS:
        d = named(nm)
        assert leq(BOT, d)
        assert leq(d, TOP)


def test_meet_join_examples():
    assert meet(named("M"), named("D")) == named("DM")
    assert join(named("MPT^∞_1"), named("PT^∞_1")) == named("PT^∞_1")
    assert join(named("MT^∞_1"), named("PT^∞_1")) == named("T^∞_1")
    assert join(named("UP1"), named("PT^∞_1")) == named("T^∞_1")
    assert join(named("AD"), named("DP")) == named("D")
    assert join(named("DM"), named("DP")) == named("DP")


def test_lattice_axioms():
    names = ["⊤", "M", "D", "A", "P", "EP", "VP", "DM", "T^3_0", "MPT^2_1",
             "U", "⊥", "PT^∞_0", "MP0"]
    descs = [named(s) for s in names]
    for a, b in itertools.product(descs, repeat=2):
        assert meet(a, b) == meet(b, a)
        assert join(a, b) == join(b, a)
        assert meet(a, a) == a and join(a, a) == a
        assert join(a, meet(a, b)) == a
        assert meet(a, join(a, b)) == a
        # order compatibility
        assert leq(meet(a, b), a) and leq(a, join(a, b))
    for a, b, c in itertools.combinations(descs, 3):
        assert meet(a, meet(b, c)) == meet(meet(a, b), c)
        assert join(a, join(b, c)) == join(join(a, b), c)


def desc_dual(c: CloneDesc) -> CloneDesc:
    swap = {"GR_AND": "GR_OR", "GR_OR": "GR_AND"}
    return CloneDesc(frozenset(swap.get(t, t) for t in c.flags),
                     c.arm1, c.arm0)


DUAL_NAMES = {
    "⊤": "⊤", "⊥": "⊥", "M": "M", "A": "A", "D": "D", "U": "U",
    "MU": "MU", "UD": "UD", "DM": "DM", "DP": "DP", "AD": "AD", "AP": "AP",
    "P": "P", "MP": "MP",
    "P0": "P1", "P1": "P0", "MP0": "MP1", "MP1": "MP0",
    "AP0": "AP1", "AP1": "AP0", "UP0": "UP1", "UP1": "UP0",
    "E": "V", "V": "E", "EP": "VP", "VP": "EP",
    "EP0": "VP1", "VP1": "EP0", "EP1": "VP0", "VP0": "EP1",
    "T^∞_0": "T^∞_1", "T^∞_1": "T^∞_0",
    "T^2_0": "T^2_1", "T^2_1": "T^2_0",
    "MPT^3_0": "MPT^3_1", "MPT^3_1": "MPT^3_0",
}


def test_duality_automorphism_names():
    for nm, want in DUAL_NAMES.items():
        assert name(desc_dual(named(nm))) == want


def test_duality_automorphism_clone_of(rng):
    for _ in range(100):
        F = [rand_fun(rng, rng.choice((1, 2, 3))) for _ in range(2)]
        assert clone_of([dual(f) for f in F]) == desc_dual(clone_of(F))


def test_descriptor_serialization():
    d = named("MPT^3_1")
    assert CloneDesc.deserialize(d.serialize()) == d
    assert named("DM").serialize() == "LE,GR_NEG:2:2"


def test_member_separator_is_sound(rng):
    # whenever member says no, F really preserves the separating relation
    for _ in range(300):
        f = rand_fun(rng, rng.choice((1, 2, 3)))
        F = [rand_fun(rng, rng.choice((1, 2, 3)))
             for _ in range(rng.choice((0, 1, 2)))]
        res = member(f, F)
        if not res.holds:
            tag, m = res.separating_tag, res.separating_m
            assert all(preserves_specialized(g, tag, m) for g in F)
            assert not preserves_specialized(f, tag, m)
            assert res.witness.verify(f, res.separating_relation)
