import random

import pytest

from boolclone.errors import CapacityError, InputError, ParseError
from boolclone.funcore import (
    AND,
    DE_MORGAN,
    DE_MORGAN_01,
    IMP,
    MAJ,
    NAND_BASIS,
    NOT,
    NOTIMPLIES,
    ONE,
    OR,
    XOR,
    ZERO,
    Assignment,
    BoolFun,
    Term,
    TVar,
    dual,
    eval_on,
    named_basis,
    named_function,
    parse_formula,
    parse_netlist,
    print_formula,
    print_netlist,
    table_mask,
    term_to_circuit,
    theta_fun,
    truth_table,
    unravel,
    var_mask,
)
from conftest import rand_fun


def test_catalog_tables():
    assert AND(0b11) == 1 and AND(0b01) == 0
    assert OR(0b00) == 0 and OR(0b10) == 1
    assert NOT(0) == 1 and NOT(1) == 0
    # x0 -> x1 is false exactly at x0=1, x1=0 (assignment bits: x0 at bit 0)
    assert IMP(0b01) == 0
    assert all(IMP(a) == 1 for a in (0b00, 0b10, 0b11))
    # x0 and not x1 is true exactly at x0=1, x1=0
    assert NOTIMPLIES(0b01) == 1
    assert all(NOTIMPLIES(a) == 0 for a in (0b00, 0b10, 0b11))
    assert named_function("THETA_5_3") == theta_fun(5, 3)
    assert named_function("2:8") == AND


def test_eval_and_gate():
    t = parse_formula("AND x0 x1", DE_MORGAN)
    assert eval_on(t, Assignment(2, 0b11)) == 1
    assert eval_on(t, Assignment(2, 0b01)) == 0


def test_eval_worked_example():
    # x0 and (x1 or x2) on the assignment (1, 0, 0) gives 0
    t = parse_formula("AND x0 OR x1 x2", DE_MORGAN)
    assert eval_on(t, Assignment(3, 0b001)) == 0
    assert eval_on(t, Assignment(3, 0b011)) == 1


def test_eval_deterministic(rng):
    t = parse_formula("OR AND x0 NOT x1 AND NOT x0 x2", DE_MORGAN)
    for _ in range(20):
        a = Assignment(3, rng.randrange(8))
        assert eval_on(t, a) == eval_on(t, a)


def test_eval_arity_mismatch():
    t = parse_formula("AND x0 x1", DE_MORGAN)
    with pytest.raises(InputError):
        eval_on(t, Assignment(3, 0))


def test_truth_table_and():
    t = parse_formula("AND x0 x1", DE_MORGAN)
    assert truth_table(t, 24) == BoolFun(2, 0b1000)


def test_truth_table_theta32_circuit():
    from boolclone.thresholds import theta_circuit

    c = theta_circuit(3, 2)
    f = truth_table(c)
    for a in range(8):
        assert f(a) == (1 if bin(a).count("1") >= 2 else 0)


def test_truth_table_dag_vs_unravelled():
    text = "n1 = AND x0 x1\nn2 = OR n1 x2\nn3 = AND n1 n2\nout n3"
    c = parse_netlist(text, DE_MORGAN)
    assert truth_table(c) == truth_table(unravel(c))


def test_truth_table_cap():
    t = Term(DE_MORGAN, 25, TVar(24))
    with pytest.raises(CapacityError):
        truth_table(t)
    t4 = parse_formula("AND x0 x1", DE_MORGAN)
    with pytest.raises(CapacityError):
        truth_table(t4, max_arity=1)


def test_dual_demorgan():
    assert dual(AND) == OR
    assert dual(OR) == AND
    assert dual(NOT) == NOT


def test_dual_theta53_selfdual():
    assert dual(theta_fun(5, 3)) == theta_fun(5, 3)
    # the general rule: dual of theta(n, t) is theta(n, n+1-t)
    for n in range(1, 7):
        for t in range(0, n + 2):
            assert dual(theta_fun(n, t)) == theta_fun(n, n + 1 - t)


def test_dual_involution(rng):
    for arity in (1, 2, 3, 4):
        for _ in range(30):
            f = rand_fun(rng, arity)
            assert dual(dual(f)) == f


def test_dual_reverses_pointwise_order(rng):
    def below(f, g):
        return f.table & ~g.table == 0

    for _ in range(200):
        arity = rng.choice((1, 2, 3, 4))
        f, g = rand_fun(rng, arity), rand_fun(rng, arity)
        assert below(f, g) == below(dual(g), dual(f))


def test_theta_special_cases():
    assert theta_fun(2, 1) == OR
    assert theta_fun(2, 2) == AND
    assert theta_fun(1, 1) == BoolFun(1, 0b10)  # identity
    for n in (1, 2, 3, 5):
        assert theta_fun(n, 0).table == table_mask(n)
        assert theta_fun(n, n + 1).table == 0


def test_parse_formula_structure():
    t = parse_formula("AND x0 OR x1 x2", DE_MORGAN)
    assert truth_table(t) == BoolFun.from_callable(
        3, lambda x, y, z: x and (y or z)
    )


def test_parse_missing_child():
    with pytest.raises(ParseError):
        parse_formula("NOT", DE_MORGAN)


def test_parse_trailing_tokens():
    with pytest.raises(ParseError):
        parse_formula("AND x0 x1 x2", DE_MORGAN)


def test_parse_unknown_gate():
    with pytest.raises(ParseError):
        parse_formula("XNOR x0 x1", DE_MORGAN)


def _random_term(rng, basis, arity, depth):
    if depth == 0 or rng.random() < 0.3:
        return Term(basis, arity, TVar(rng.randrange(arity)))
    gname, gfun = rng.choice(basis.gates)
    children = [_random_term(rng, basis, arity, depth - 1) for _ in range(gfun.arity)]
    from boolclone.funcore import TApp

    return Term(basis, arity, TApp(gname, tuple(c.root for c in children)))


def test_formula_roundtrip_random(rng):
    for _ in range(100):
        t = _random_term(rng, DE_MORGAN, 4, 4)
        s = print_formula(t)
        back = parse_formula(s, DE_MORGAN, arity=t.arity)
        assert back == t
        assert print_formula(back) == s


def test_netlist_two_lines():
    c = parse_netlist("n1 = AND x0 x1\nout n1", DE_MORGAN)
    assert len(c.nodes) == 3  # two vars plus the gate
    assert truth_table(c) == AND


def test_netlist_forward_reference():
    with pytest.raises(ParseError):
        parse_netlist("n1 = AND x0 n2\nn2 = NOT x0\nout n1", DE_MORGAN)


def test_netlist_multiple_out():
    with pytest.raises(ParseError):
        parse_netlist("n1 = NOT x0\nout n1\nout n1", DE_MORGAN)


def test_netlist_roundtrip(rng):
    for _ in range(50):
        t = _random_term(rng, DE_MORGAN, 3, 4)
        c = term_to_circuit(t)
        text = print_netlist(c)
        back = parse_netlist(text, DE_MORGAN, arity=c.arity)
        assert print_netlist(back) == text
        assert truth_table(back) == truth_table(c)


def test_inline_semicolon_netlists_match_files():
    text = "n1 = NAND x0 x1\nn2 = NAND n1 n1\nout n2"
    c = parse_netlist(text, NAND_BASIS)
    assert truth_table(c) == AND


def test_serialize_roundtrip(rng):
    for arity in (1, 2, 3, 4, 5):
        for _ in range(20):
            f = rand_fun(rng, arity)
            assert BoolFun.deserialize(f.serialize()) == f
    assert AND.serialize() == "2:8"
    assert OR.serialize() == "2:e"


def test_var_mask_agrees_with_definition():
    for arity in (1, 2, 3, 6):
        for i in range(arity):
            m = var_mask(arity, i)
            for a in range(1 << arity):
                assert ((m >> a) & 1) == ((a >> i) & 1)


def test_support():
    f = BoolFun.from_callable(3, lambda x, y, z: x and z)
    assert f.support() == [0, 2]
    assert ONE.support() == []


def test_basis_definitions_checked():
    from boolclone.funcore import Basis

    good = parse_formula("NOT AND NOT x0 NOT x1", DE_MORGAN)
    Basis("B", (("OR2", OR),), {"OR2": good})
    with pytest.raises(InputError):
        Basis("B", (("OR2", AND),), {"OR2": good})


def test_named_basis_variants():
    assert named_basis("DeMorgan") == DE_MORGAN
    assert named_basis("demorgan01") == DE_MORGAN_01
    b = named_basis("THETA(3)")
    assert b.functions() == [theta_fun(4, 3)]
    b2 = named_basis("AND,NOT")
    assert b2.functions() == [AND, NOT]
