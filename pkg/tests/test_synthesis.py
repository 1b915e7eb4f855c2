import random

import pytest

from boolclone.errors import CapacityError, ConversionRefused, LogicError
from boolclone.funcore import (
    AND,
    DE_MORGAN,
    DE_MORGAN_01,
    MAJ,
    NAND_BASIS,
    NOT,
    NOTIMPLIES,
    ONE,
    OR,
    XOR,
    ZERO,
    Basis,
    BoolFun,
    CircuitBuilder,
    basis_from_functions,
    named_basis,
    parse_formula,
    print_formula,
    table_mask,
    truth_table,
    var_mask,
)
from boolclone.lattice import clone_of, member, name
from boolclone.synthesis import (
    closure,
    closure_member,
    convert_basis,
    eliminate_constants,
    synthesize,
)
from conftest import rand_fun


def test_closure_demorgan_binary_complete():
    r = closure([AND, NOT], 2)
    assert len(r.order) == 16


def test_closure_selfdual_binary_inventory():
    # binary members of the self-dual clone: the projections and their
    # negations, cross-checked against the self-duality test
    r = closure([MAJ, NOT], 2)
    got = sorted(r.order)
    want = sorted(
        t for t in range(16)
        if clone_of([BoolFun(2, t)]).flags >= frozenset({"GR_NEG"})
    )
    from boolclone.relations import is_self_dual

    want2 = sorted(t for t in range(16) if is_self_dual(BoolFun(2, t)))
    assert got == want2 == want


def test_closure_disjunctive_inventory():
    r = closure([OR, ZERO, ONE], 2)
    assert sorted(r.order) == sorted(
        [0, table_mask(2), var_mask(2, 0), var_mask(2, 1), OR.table]
    )


def test_closure_layer_witnesses_minimal_and_deterministic():
    r1 = closure(DE_MORGAN, 2)
    r2 = closure(DE_MORGAN, 2)
    assert r1.order == r2.order
    for t, e in r1.entries.items():
        assert r1.entries[t].layer == r2.entries[t].layer
        # every recorded argument was discovered strictly earlier in layers
        if e.gate is not None:
            assert all(r1.entries[a].layer < e.layer for a in e.args)


def test_synthesize_or_over_demorgan():
    t = synthesize(OR, DE_MORGAN)
    assert truth_table(t) == OR
    # deterministic golden witness
    assert print_formula(t) == print_formula(synthesize(OR, DE_MORGAN))


def test_synthesize_maj_monotone():
    t = synthesize(MAJ, named_basis("AND,OR"))
    assert truth_table(t) == MAJ
    assert all(tok not in print_formula(t) for tok in ("NOT",))


def test_synthesize_nonmember_logic_error():
    with pytest.raises(LogicError):
        synthesize(XOR, named_basis("AND,OR"))


def test_synthesize_arity_cap():
    with pytest.raises(CapacityError):
        synthesize(BoolFun(5, 0), DE_MORGAN)


def test_closure_member_matches_member_small(rng):
    for _ in range(200):
        F = [rand_fun(rng, rng.choice((1, 2))) for _ in range(2)]
        f = rand_fun(rng, 2)
        assert closure_member(f, F) == member(f, F).holds


def _random_circuit(rng, basis, arity, n_gates):
    b = CircuitBuilder(basis, arity)
    nodes = [b.var(i) for i in range(arity)]
    for _ in range(n_gates):
        gname, gfun = rng.choice(basis.gates)
        args = [rng.choice(nodes) for _ in range(gfun.arity)]
        nodes.append(b.gate(gname, args))
    return b.finish(nodes[-1])


def test_convert_demorgan_to_nand(rng):
    for _ in range(40):
        c = _random_circuit(rng, DE_MORGAN, rng.randrange(2, 11), 12)
        out = convert_basis(c, NAND_BASIS)
        assert truth_table(out) == truth_table(c)
        assert out.gate_names() <= {"NAND"}


def test_convert_gate_count_bound(rng):
    max_def = max(
        synthesize(f, NAND_BASIS).size() for f in DE_MORGAN.functions()
    )
    for _ in range(20):
        c = _random_circuit(rng, DE_MORGAN, 4, 10)
        out = convert_basis(c, NAND_BASIS)
        n_gates_in = sum(1 for k, _ in c.nodes if k != "var")
        n_gates_out = sum(1 for k, _ in out.nodes if k != "var")
        assert n_gates_out <= n_gates_in * max_def


def test_convert_maj_circuit_identity_like():
    maj_basis = named_basis("MAJ")
    b = CircuitBuilder(maj_basis, 3)
    dag = b.finish(b.gate("MAJ", [b.var(0), b.var(1), b.var(2)]))
    out = convert_basis(dag, maj_basis)
    assert truth_table(out) == MAJ
    assert out.gate_names() == {"MAJ"}


def test_convert_theta_circuit_to_nand():
    from boolclone.thresholds import theta_circuit

    c = theta_circuit(3, 2)
    out = convert_basis(c, NAND_BASIS)
    assert truth_table(out) == MAJ
    assert out.gate_names() <= {"NAND"}


def test_convert_demorgan_to_maj_refused_gatewise():
    # gate-by-gate substitution needs every source gate in the target
    # clone; AND is not self-dual, so the De Morgan majority circuit is
    # refused even though the computed function lies in the target clone.
    from boolclone.thresholds import theta_circuit

    with pytest.raises(ConversionRefused) as ei:
        convert_basis(theta_circuit(3, 2), named_basis("MAJ"))
    assert ei.value.gate in ("AND", "OR")


def test_convert_refusal_names_gate_and_relation():
    c = _random_circuit(random.Random(5), DE_MORGAN, 3, 6)
    # ensure a NOT gate feeds the output path
    b = CircuitBuilder(DE_MORGAN, 3)
    x = b.var(0)
    n = b.gate("NOT", [x])
    out = b.gate("AND", [n, b.var(1)])
    c = b.finish(out)
    with pytest.raises(ConversionRefused) as ei:
        convert_basis(c, named_basis("AND,OR"))
    assert ei.value.gate == "NOT"
    assert ei.value.relation_name == "LE"


def test_convert_accepts_redundant_not():
    # NOT present in the source basis but absent from the circuit
    c = CircuitBuilder(DE_MORGAN, 2)
    out = c.gate("AND", [c.var(0), c.var(1)])
    dag = c.finish(out)
    res = convert_basis(dag, named_basis("AND,OR"))
    assert truth_table(res) == AND


def test_convert_uses_basis_definitions():
    target = named_basis("NAND")
    or_def = parse_formula("NAND NAND x0 x0 NAND x1 x1", target)
    src = Basis("orbasis", (("OR", OR),), {"OR": or_def})
    b = CircuitBuilder(src, 2)
    dag = b.finish(b.gate("OR", [b.var(0), b.var(1)]))
    out = convert_basis(dag, target)
    assert truth_table(out) == OR


def _mp_circuit(rng, with_one=False):
    gates = [("AND", AND), ("OR", OR), ("ZERO", ZERO)]
    if with_one:
        gates.append(("ONE", ONE))
    basis = basis_from_functions("monsrc", gates)
    while True:
        c = _random_circuit(rng, basis, rng.randrange(2, 7), 10)
        f = truth_table(c)
        if member(f, [AND, OR]).holds:
            return c, f


def test_eliminate_constants_zero_case(rng):
    target = named_basis("AND,OR")
    for _ in range(25):
        c, f = _mp_circuit(rng)
        out = eliminate_constants(c, target)
        assert truth_table(out) == f
        assert out.gate_names() <= {"AND", "OR"}
        # agreement at the all-ones point is forced by 1-preservation
        assert f((1 << c.arity) - 1) == 1


def test_eliminate_constants_both_case(rng):
    target = named_basis("AND,OR")
    for _ in range(25):
        c, f = _mp_circuit(rng, with_one=True)
        out = eliminate_constants(c, target)
        assert truth_table(out) == f
        assert out.gate_names() <= {"AND", "OR"}


def test_eliminate_constants_refusal_not_p1():
    basis = basis_from_functions(
        "z", [("AND", AND), ("OR", OR), ("ZERO", ZERO)]
    )
    b = CircuitBuilder(basis, 2)
    dag = b.finish(b.gate("ZERO", [b.var(0)]))
    with pytest.raises(LogicError) as ei:
        eliminate_constants(dag, named_basis("AND,OR"))
    assert "R1(1)" in str(ei.value)


def test_eliminate_constants_side_condition():
    basis = basis_from_functions("oz", [("OR", OR), ("ZERO", ZERO)])
    b = CircuitBuilder(basis, 2)
    z = b.gate("ZERO", [b.var(0)])
    dag = b.finish(b.gate("OR", [b.gate("OR", [b.var(0), b.var(1)]), z]))
    with pytest.raises(LogicError) as ei:
        eliminate_constants(dag, named_basis("OR"))
    assert "conjunction" in str(ei.value)


def test_eliminate_constants_pure_conversion_when_consts_in_target():
    # when the target already generates the constants, nothing to eliminate
    basis = basis_from_functions("src", [("AND", AND), ("ZERO", ZERO)])
    b = CircuitBuilder(basis, 2)
    dag = b.finish(b.gate("AND", [b.var(0), b.gate("ZERO", [b.var(1)])]))
    out = eliminate_constants(dag, DE_MORGAN_01)
    assert truth_table(out).table == 0
