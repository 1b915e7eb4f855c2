"""Command-line surface.

Every command has a ``--json`` mirror emitting the same payload as a single
JSON object.  Boolean queries (member, equivalent, lattice leq) encode
their answer in the exit code: 0 yes, 1 no.  Errors exit with 2 (bad
input), 3 (capacity), 4 (logic precondition), or 5 (internal).

Input conventions: assignments are bit strings with x0 leftmost; circuits
are netlists (inline with ``;`` separating lines, ``@path`` to read a
file, or ``-`` for stdin); CNFs are DIMACS-like clause lists.
"""

from __future__ import annotations

import argparse
import json
import sys
from math import isinf

from .errors import (
    BoolCloneError,
    CapacityError,
    InputError,
    InternalError,
    LogicError,
    ParseError,
)
from . import funcore, gadgets, lattice, synthesis, thresholds, fastpaths
from .funcore import (
    Assignment,
    BoolFun,
    Term,
    named_basis,
    named_function,
    parse_formula,
    parse_netlist,
    print_formula,
    print_netlist,
    term_to_circuit,
    truth_table,
)


def _read_text_arg(s: str) -> str:
    if s == "-":
        return sys.stdin.read()
    if s.startswith("@"):
        with open(s[1:], "r", encoding="utf-8") as fh:
            return fh.read()
    return s.replace(";", "\n")


def _parse_functions(spec: str) -> list[BoolFun]:
    return [named_function(tok) for tok in spec.split(",") if tok.strip()]


def _parse_target_fun(args) -> BoolFun:
    if args.formula is not None:
        basis = named_basis(args.basis)
        return truth_table(parse_formula(args.formula, basis))
    if args.table is not None:
        return BoolFun.deserialize(args.table)
    raise InputError("give a target via -f/--formula or -t/--table")


def _load_circuit(args) -> funcore.CircuitDAG:
    basis = named_basis(args.basis)
    return parse_netlist(_read_text_arg(args.circuit), basis)


def _parse_cnf(text: str) -> Term:
    return gadgets.parse_dimacs(_read_text_arg(text))


def _stream_from_args(args) -> thresholds.RandomStream:
    if args.random_bits is not None:
        return thresholds.RandomStream.from_hex(args.random_bits)
    if args.seed is not None:
        return thresholds.RandomStream.from_seed(args.seed, args.stream_bits)
    raise InputError("provide randomness via -r HEX or --seed N")


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _level_str(x) -> str:
    return "inf" if isinf(x) else str(x)


def _desc_payload(d: lattice.CloneDesc) -> dict:
    return {
        "name": lattice.name(d),
        "descriptor": d.serialize(),
    }


# ---------------------------------------------------------------------------
# Command handlers (each returns an exit code)


def cmd_eval(args) -> int:
    if args.formula is not None:
        obj = parse_formula(args.formula, named_basis(args.basis))
    else:
        obj = _load_circuit(args)
    a = Assignment.from_bitstring(args.assignment)
    if a.arity < obj.arity:
        raise InputError(
            f"assignment has {a.arity} bits, circuit needs {obj.arity}"
        )
    a = Assignment(obj.arity, a.bits & ((1 << obj.arity) - 1))
    bit = funcore.eval_on(obj, a)
    _emit(args, {"value": bit}, [str(bit)])
    return 0


def cmd_table(args) -> int:
    if args.formula is not None:
        obj = parse_formula(args.formula, named_basis(args.basis))
    else:
        obj = _load_circuit(args)
    f = truth_table(obj)
    _emit(args, {"table": f.serialize()}, [f.serialize()])
    return 0


def cmd_id(args) -> int:
    funs = _parse_functions(args.functions)
    d = lattice.clone_of(funs)
    payload = _desc_payload(d)
    _emit(args, payload, [payload["name"]])
    return 0


def cmd_member(args) -> int:
    f = _parse_target_fun(args)
    funs = _parse_functions(args.functions)
    res = lattice.member(f, funs)
    payload: dict = {"member": res.holds}
    lines = ["member" if res.holds else "non-member"]
    if res.holds and args.witness:
        if f.arity <= synthesis.CLOSURE_ARITY_CAP:
            basis = funcore.basis_from_functions(
                "F", [(tok.strip().upper(), named_function(tok))
                      for tok in args.functions.split(",") if tok.strip()]
            )
            term = synthesis.synthesize(f, basis)
            payload["witness_term"] = print_formula(term)
            lines.append(f"witness: {print_formula(term)}")
        else:
            lines.append("witness: (arity above synthesis cap)")
    if not res.holds and args.explain:
        payload["separating_relation"] = res.separator_name()
        payload["separating_members"] = res.separating_relation.serialize()
        payload["witness_matrix"] = str(res.witness).split("\n")
        lines.append(f"separated by {res.separator_name()}")
        lines.append("witness matrix:")
        lines.extend(str(res.witness).split("\n"))
    _emit(args, payload, lines)
    return 0 if res.holds else 1


def cmd_convert(args) -> int:
    c = _load_circuit(args)
    target = named_basis(args.to)
    out = synthesis.convert_basis(c, target)
    _emit(args, {"netlist": print_netlist(out).split("\n")},
          [print_netlist(out)])
    return 0


def cmd_thr(args) -> int:
    n, t = args.n, args.t
    payload: dict = {"n": n, "t": t}
    lines = []
    d = thresholds.threshold_clone(n, t)
    payload["clone"] = lattice.name(d)
    payload["descriptor"] = d.serialize()
    if args.table or not args.netlist:
        f = thresholds.theta(n, t)
        payload["table"] = f.serialize()
        lines.append(f.serialize())
    if args.netlist:
        c = thresholds.theta_circuit(n, t)
        payload["netlist"] = print_netlist(c).split("\n")
        lines.append(print_netlist(c))
    lines.append(f"clone: {payload['clone']}")
    _emit(args, payload, lines)
    return 0


def cmd_randthr(args) -> int:
    shape = thresholds.formula_shape(args.n, args.t, args.e, args.k)
    stream = _stream_from_args(args)
    payload: dict = {
        "n": shape.n, "t": shape.t, "e": shape.e, "k": shape.k,
        "N": shape.N, "depth": shape.depth, "leaves": shape.leaf_count,
    }
    lines = [
        f"N={shape.N} depth={shape.depth} leaves={shape.leaf_count}"
    ]
    if args.verify:
        want = thresholds.theta(shape.n, shape.t)
        hits = 0
        for _ in range(args.verify):
            leaves = thresholds.sample_leaves(shape, stream)
            hits += thresholds.sampled_formula_table(shape, leaves) == want
        payload["verify"] = {"samples": args.verify, "exact": hits}
        lines.append(
            f"exact matches: {hits}/{args.verify} "
            f"({hits / args.verify:.4f})"
        )
    else:
        term = thresholds.random_threshold_formula(
            args.n, args.t, args.e, stream, args.k
        )
        payload["formula"] = print_formula(term)
        lines = [payload["formula"]]
    _emit(args, payload, lines)
    return 0


def _gadget_term_payload(args, term: Term, extra: dict) -> int:
    payload = {"formula": print_formula(term), "arity": term.arity}
    payload.update(extra)
    lines = [payload["formula"]]
    for k, v in extra.items():
        lines.append(f"{k}: {v}")
    _emit(args, payload, lines)
    return 0


def cmd_reduce(args) -> int:
    kind = args.gadget
    if kind == "f-phi":
        phi = _parse_cnf(args.cnf[0])
        return _gadget_term_payload(args, gadgets.gadget_f_phi(phi), {})
    if kind in ("f-vec", "g-vec"):
        phis = [_parse_cnf(c) for c in args.cnf]
        g = (gadgets.gadget_f_vec if kind == "f-vec" else gadgets.gadget_g_vec)(
            phis
        )
        return _gadget_term_payload(
            args, g.term, {"m": g.m, "t": g.t}
        )
    if kind in ("h-dp", "h-mpt21", "h-pt1"):
        basis = named_basis(args.basis)
        f = parse_formula(args.f, basis)
        g = parse_formula(args.g, basis)
        builder = {
            "h-dp": gadgets.gadget_h_DP,
            "h-mpt21": gadgets.gadget_h_MPT21,
            "h-pt1": gadgets.gadget_h_PT1,
        }[kind]
        return _gadget_term_payload(args, builder(f, g), {})
    if kind in ("compose", "compose-rand"):
        phis = [_parse_cnf(c) for c in args.cnf]
        inst = gadgets.PromiseInstance(tuple(phis))
        if kind == "compose":
            comp = gadgets.compose_cmp_instance(inst)
        else:
            stream = _stream_from_args(args)
            comp = gadgets.compose_cmp_instance_randomized(
                inst, args.e, stream, args.k, args.depth_override
            )
        even_net = print_netlist(term_to_circuit(comp.f_even))
        odd_net = print_netlist(term_to_circuit(comp.f_odd))
        payload: dict = {
            "j": comp.j,
            "base": "NOTIMPLIES",
            "f_even_netlist": even_net.split("\n"),
            "f_odd_netlist": odd_net.split("\n"),
        }
        lines = [
            f"j = {comp.j}",
            "F = {NOTIMPLIES, f_odd}",
            "f_odd:", odd_net,
            "f_even:", even_net,
        ]
        if args.decide:
            res = comp.membership()
            payload["member"] = res.holds
            lines.append(f"f_even in [F]: {res.holds}")
            _emit(args, payload, lines)
            return 0 if res.holds else 1
        _emit(args, payload, lines)
        return 0
    raise InputError(f"unknown gadget {kind!r}")


def cmd_lattice(args) -> int:
    op = args.op

    def load(s: str) -> lattice.CloneDesc:
        if ":" in s:
            return lattice.canonicalize(
                *_split_desc(s)
            )
        return lattice.named(s)

    if op == "name":
        d = load(args.a)
        payload = _desc_payload(d)
        _emit(args, payload, [payload["name"]])
        return 0
    if args.b is None:
        raise InputError(f"lattice {op} needs two clone arguments")
    a, b = load(args.a), load(args.b)
    if op == "leq":
        ans = lattice.leq(a, b)
        _emit(args, {"leq": ans}, [str(ans).lower()])
        return 0 if ans else 1
    d = lattice.meet(a, b) if op == "meet" else lattice.join(a, b)
    payload = _desc_payload(d)
    _emit(args, payload, [payload["name"]])
    return 0


def _split_desc(s: str):
    d = lattice.CloneDesc.deserialize(s)
    return d.flags, d.arm0, d.arm1


def cmd_classify(args) -> int:
    try:
        basis = named_basis(args.basis_spec)
        funs = basis.functions()
    except ParseError:
        funs = _parse_functions(args.basis_spec)
    d = lattice.clone_of(funs)
    label = fastpaths.classify_clone(d)
    payload = {"clone": lattice.name(d), "label": label}
    _emit(args, payload, [label])
    return 0


def cmd_sigma(args) -> int:
    s = thresholds.sigma(args.k)
    _emit(args, {"k": args.k, "sigma": s}, [f"{s:.15f}"])
    return 0


def cmd_equivalent(args) -> int:
    basis = named_basis(args.basis)
    t1 = parse_formula(args.f, basis)
    t2 = parse_formula(args.g, basis)
    arity = max(t1.arity, t2.arity)
    t1 = Term(basis, arity, t1.root)
    t2 = Term(basis, arity, t2.root)
    ans = gadgets.equivalent(t1, t2)
    _emit(args, {"equivalent": ans}, [str(ans).lower()])
    return 0 if ans else 1


# ---------------------------------------------------------------------------
# Parser assembly


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="boolclone",
        description="Boolean clone membership, Post's lattice, thresholds, "
        "and reduction gadgets",
    )
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    def add_basis(sp):
        sp.add_argument("--basis", default="DeMorgan",
                        help="basis name or comma list of gate functions")

    sp = sub.add_parser("eval", help="evaluate a formula or netlist")
    add_basis(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("-f", "--formula")
    g.add_argument("-c", "--circuit", help="netlist (inline ;-separated, @file, or -)")
    sp.add_argument("-a", "--assignment", required=True,
                    help="bit string, x0 leftmost")
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("table", help="truth table of a formula or netlist")
    add_basis(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("-f", "--formula")
    g.add_argument("-c", "--circuit")
    sp.set_defaults(fn=cmd_table)

    sp = sub.add_parser("id", help="clone generated by a set of functions")
    sp.add_argument("-F", "--functions", required=True,
                    help="comma list: names or arity:hex tables")
    sp.set_defaults(fn=cmd_id)

    sp = sub.add_parser("member", help="decide f in [F]")
    add_basis(sp)
    sp.add_argument("-f", "--formula", help="target as a formula")
    sp.add_argument("-t", "--table", help="target as arity:hex")
    sp.add_argument("-F", "--functions", required=True)
    sp.add_argument("--witness", action="store_true",
                    help="synthesize a witness term on membership")
    sp.add_argument("--explain", action="store_true",
                    help="print the separating relation and witness matrix")
    sp.set_defaults(fn=cmd_member)

    sp = sub.add_parser("equivalent", help="exhaustive formula equivalence")
    add_basis(sp)
    sp.add_argument("-f", required=True)
    sp.add_argument("-g", required=True)
    sp.set_defaults(fn=cmd_equivalent)

    sp = sub.add_parser("convert", help="rewrite a netlist over another basis")
    add_basis(sp)
    sp.add_argument("-c", "--circuit", required=True)
    sp.add_argument("--to", required=True, help="target basis")
    sp.set_defaults(fn=cmd_convert)

    sp = sub.add_parser("thr", help="threshold function, circuit, and clone")
    sp.add_argument("n", type=int)
    sp.add_argument("t", type=int)
    sp.add_argument("--table", action="store_true")
    sp.add_argument("--netlist", action="store_true")
    sp.set_defaults(fn=cmd_thr)

    sp = sub.add_parser("randthr",
                        help="randomized threshold formula over theta gates")
    sp.add_argument("n", type=int)
    sp.add_argument("t", type=int)
    sp.add_argument("e", type=int)
    sp.add_argument("k", type=int, nargs="?", default=3)
    sp.add_argument("-r", "--random-bits", help="hex bit stream")
    sp.add_argument("--seed", type=int,
                    help="expand a seed instead (xorshift64*; convenience)")
    sp.add_argument("--stream-bits", type=int, default=1 << 22)
    sp.add_argument("--verify", type=int, metavar="N",
                    help="Monte-Carlo: N samples from the stream")
    sp.set_defaults(fn=cmd_randthr)

    sp = sub.add_parser("reduce", help="build reduction gadgets")
    sp.add_argument("gadget", choices=[
        "f-phi", "f-vec", "g-vec", "h-dp", "h-mpt21", "h-pt1",
        "compose", "compose-rand",
    ])
    add_basis(sp)
    sp.add_argument("--cnf", action="append", default=[],
                    help="DIMACS-like CNF (inline ;-separated, @file, or -)")
    sp.add_argument("-f", help="first formula (h-* gadgets)")
    sp.add_argument("-g", help="second formula (h-* gadgets)")
    sp.add_argument("--decide", action="store_true",
                    help="compose: also decide membership (exit 0/1)")
    sp.add_argument("-e", type=int, default=1, help="compose-rand error bits")
    sp.add_argument("-k", type=int, default=3, help="compose-rand gate size")
    sp.add_argument("-r", "--random-bits")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--stream-bits", type=int, default=1 << 22)
    sp.add_argument("--depth-override", type=int,
                    help="compose-rand: truncated tree depth "
                    "(measurement only; voids the error bound)")
    sp.set_defaults(fn=cmd_reduce)

    sp = sub.add_parser("lattice", help="clone names, order, meet, join")
    sp.add_argument("op", choices=["leq", "meet", "join", "name"])
    sp.add_argument("a")
    sp.add_argument("b", nargs="?")
    sp.set_defaults(fn=cmd_lattice)

    sp = sub.add_parser("classify",
                        help="complexity label of the basis-restricted problem")
    sp.add_argument("-B", "--basis-spec", required=True)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("sigma", help="fixed point of the amplification map")
    sp.add_argument("k", type=int)
    sp.set_defaults(fn=cmd_sigma)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, InputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CapacityError as e:
        print(f"capacity error: {e}", file=sys.stderr)
        return 3
    except LogicError as e:
        print(f"logic error: {e}", file=sys.stderr)
        return 4
    except BoolCloneError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
