"""Executable Boolean clone theory: membership, Post's lattice, threshold
clones, randomized threshold formulas, and reduction gadgets."""

from .errors import (
    BoolCloneError,
    CapacityError,
    ConversionRefused,
    InputError,
    InternalError,
    LogicError,
    ParseError,
    StreamExhausted,
)
from .funcore import (
    AND,
    DE_MORGAN,
    DE_MORGAN_01,
    ID,
    IMP,
    IMP_BASIS,
    MAJ,
    NAND,
    NAND_BASIS,
    NOR,
    NOT,
    NOTIMPLIES,
    NOTIMPLIES_BASIS,
    ONE,
    OR,
    TABLE_CAP,
    XOR,
    ZERO,
    Assignment,
    Basis,
    BoolFun,
    CircuitBuilder,
    CircuitDAG,
    Term,
    basis_from_functions,
    dual,
    eval_on,
    named_basis,
    named_function,
    parse_formula,
    parse_netlist,
    print_formula,
    print_netlist,
    substitute,
    term_to_circuit,
    theta_basis,
    theta_fun,
    truth_table,
    unravel,
)
from .relations import (
    Relation,
    WitnessMatrix,
    arm_level,
    family_Rn,
    preserves,
    preserves_specialized,
    relation_dual,
    standard_relation,
)
from .lattice import (
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
from .synthesis import (
    closure,
    closure_member,
    convert_basis,
    eliminate_constants,
    synthesize,
)
from .thresholds import (
    RandomStream,
    choose_depth,
    pick_N,
    random_threshold_formula,
    recurrence,
    sigma,
    theta,
    theta_circuit,
    theta_term,
    threshold_clone,
)
from .gadgets import (
    PromiseInstance,
    cnf_term,
    compose_cmp_instance,
    compose_cmp_instance_randomized,
    equivalent,
    gadget_C_a,
    gadget_f_phi,
    gadget_f_vec,
    gadget_g_vec,
    gadget_h_DP,
    gadget_h_MPT21,
    gadget_h_PT1,
    gadget_pt_generator,
    parse_dimacs,
)
from .fastpaths import (
    candidate_clones,
    classify_basis,
    identify_restricted,
    member_two_query,
)

__all__ = [n for n in dir() if not n.startswith("_")]
