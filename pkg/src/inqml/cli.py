"""Command-line interface.

Exit codes: 0 on success (including negative verdicts), 1 when a derivation
is rejected or a semantic error occurs, 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bisim import stratified_bisim
from .charform import CharacteristicFormulas
from .data import data_path
from .errors import (FormulaSyntaxError, InqmlError, ModelFormatError, SizingError,
                     UnknownConditionError)
from .formula import is_declarative, modal_depth, parse, print_formula
from .inl import inl_size, parse_inl, print_inl, translate_costar, translate_star
from .model import CLOSURE_KINDS, FRAME_CONDITIONS, NeighborhoodModel, check_frame_condition, closure
from .proofsys import Derivation, check_derivation, schema_names, soundness_fuzz
from .semantics import find_countermodel, supports, true_at


class UsageError(Exception):
    pass


def _show(f):
    return print_formula(f, resugar=True)


def _formula(text):
    return parse(text)


def _load_model(path):
    p = Path(path)
    if not p.exists():
        bundled = data_path(p.name if p.suffix else p.name + ".json")
        if bundled.exists():
            p = bundled
    return NeighborhoodModel.load(p)


def _state(text):
    return [w.strip() for w in text.split(",") if w.strip()]


def _read_formulas(path):
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ModelFormatError(f"cannot read {path}: {exc}") from exc
    return [parse(line) for line in lines if line.strip() and not line.lstrip().startswith("#")]


def _emit(args, text, payload):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _verdict(v: bool) -> str:
    return "true" if v else "false"


# -- subcommands --------------------------------------------------------

def cmd_eval(args):
    m = _load_model(args.model)
    f = _formula(args.formula)
    state = _state(args.state)
    v = supports(m, state, f)
    _emit(args, _verdict(v), {"command": "eval", "state": state, "formula": _show(f),
                              "supported": v})
    return 0


def cmd_truth(args):
    m = _load_model(args.model)
    f = _formula(args.formula)
    v = true_at(m, args.world, f)
    _emit(args, _verdict(v), {"command": "truth", "world": args.world, "formula": _show(f),
                              "true": v})
    return 0


def cmd_bisim(args):
    m1, m2 = _load_model(args.model1), _load_model(args.model2)
    z = stratified_bisim(m1, m2, args.n)
    layers = [sorted(layer, key=lambda pair: (m1.index[pair[0]], m2.index[pair[1]]))
              for layer in z.layers]
    if args.n is None:
        pairs = layers[-1]
        text = "\n".join(f"{a} ~ {b}" for a, b in pairs) or "(no bisimilar pairs)"
        text += f"\nstabilized at layer {z.stabilization_index}"
    else:
        lines = []
        for k, layer in enumerate(layers):
            body = " ".join(f"({a},{b})" for a, b in layer)
            lines.append(f"Z{k}: {body}".rstrip())
        text = "\n".join(lines)
    _emit(args, text, {"command": "bisim", "stabilized": z.stabilized,
                       "stabilization_index": z.stabilization_index,
                       "layers": [[list(pair) for pair in layer] for layer in layers]})
    return 0


def cmd_charform(args):
    m = _load_model(args.model)
    pool = [m] + [_load_model(p) for p in args.pool or []]
    caps = {}
    if args.n > 2:
        caps["depth_cap"] = args.n
    cf = CharacteristicFormulas(pool, max_depth=args.n, **caps)
    if args.world is not None:
        f = cf.chi_world(m, args.world, args.n)
        point = {"world": args.world}
    else:
        state = _state(args.state)
        f = cf.pi_state(m, state, args.n) if args.pi else cf.chi_state(m, state, args.n)
        point = {"state": state}
    _emit(args, _show(f), {"command": "charform", "n": args.n, **point, "formula": _show(f),
                           "modal_depth": modal_depth(f)})
    return 0


def cmd_closure(args):
    m = _load_model(args.model)
    out = closure(m, args.kind)
    data = out.to_json()
    text = json.dumps(data, indent=2)
    if args.output:
        out.dump(args.output)
        if args.json:
            print(json.dumps({"command": "closure", "kind": args.kind,
                              "output": args.output}, sort_keys=True))
    elif args.json:
        print(json.dumps({"command": "closure", "kind": args.kind, "model": data},
                         sort_keys=True))
    else:
        print(text)
    return 0


def _witness_text(w):
    parts = []
    for key, value in w.items():
        if isinstance(value, tuple):
            value = "{" + ",".join(value) + "}"
        elif isinstance(value, list):
            value = "[" + ", ".join("{" + ",".join(s) + "}" for s in value) + "]"
        parts.append(f"{key}={value}")
    return " ".join(parts)


def cmd_frame(args):
    m = _load_model(args.model)
    holds, witness = check_frame_condition(m, args.cond, args.world)
    text = _verdict(holds)
    if witness is not None:
        text += "\nwitness: " + _witness_text(witness)
    payload_w = None if witness is None else {
        k: list(v) if isinstance(v, tuple) else
        ([list(s) for s in v] if isinstance(v, list) else v)
        for k, v in witness.items()}
    _emit(args, text, {"command": "frame", "condition": args.cond, "holds": holds,
                       "witness": payload_w})
    return 0


def cmd_check(args):
    d = Derivation.load(args.derivation)
    premises = _read_formulas(args.premises) if args.premises else []
    frame = [s for s in (args.frame_axioms or "").split(",") if s.strip()]
    try:
        schemas = schema_names(None, frame)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    report = check_derivation(d, premises, schemas)
    if report.ok:
        text = f"ok: {_show(report.end_formula)}"
    else:
        fl = report.failure
        text = f"rejected at step {fl.step} ({fl.kind}): {fl.message}"
    _emit(args, text, {"command": "check", **report.to_json()})
    return 0 if report.ok else 1


def cmd_countermodel(args):
    premises = _read_formulas(args.premises) if args.premises else []
    goal = _formula(args.goal)
    found = find_countermodel(premises, goal, args.max_worlds, args.allow_empty)
    if found is None:
        text = f"none up to {args.max_worlds} worlds"
        payload = {"command": "countermodel", "found": False}
    else:
        m, s = found
        text = json.dumps(m.to_json(), indent=2) + "\nstate: {" + ",".join(s) + "}"
        payload = {"command": "countermodel", "found": True, "model": m.to_json(),
                   "state": list(s)}
    _emit(args, text, payload)
    return 0


def cmd_inl_star(args):
    f = parse_inl(args.formula)
    out = translate_star(f)
    _emit(args, _show(out), {"command": "inl-star", "input": print_inl(f), "output": _show(out),
                             "primitive": print_formula(out)})
    return 0


def cmd_inl_costar(args):
    f = _formula(args.formula)
    if not is_declarative(f):
        raise UsageError("inl-costar needs a declarative formula")
    signature = _state(args.signature) if args.signature else None
    out = translate_costar(f, signature)
    _emit(args, print_inl(out), {"command": "inl-costar", "input": _show(f),
                                 "output": print_inl(out), "size": inl_size(out)})
    return 0


def cmd_fuzz(args):
    frame = [s for s in (args.frame_axioms or "").split(",") if s.strip()]
    try:
        schemas = schema_names(None, frame)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    report = soundness_fuzz(schemas, args.samples, args.bound, seed=args.seed,
                            condition_filter=not args.no_condition_filter)
    text = (f"{report.checked} formulas checked on {report.models} models: "
            f"{len(report.violations)} violations")
    for f, schema, m, w in report.violations[:5]:
        text += f"\n  {_show(f)} ({schema or 'derived'}) fails at {w}"
    _emit(args, text, {"command": "fuzz", **report.to_json()})
    return 0 if report.ok else 1


# -- parser -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inqml", description="Inquisitive neighborhood logic toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    p = add("eval", cmd_eval, "does a state support a formula")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("-s", "--state", required=True, help="comma-separated worlds; '' is empty")
    p.add_argument("formula")

    p = add("truth", cmd_truth, "is a formula true at a world")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("-w", "--world", required=True)
    p.add_argument("formula")

    p = add("bisim", cmd_bisim, "stratified or full bisimulation between two models")
    p.add_argument("-m1", "--model1", required=True)
    p.add_argument("-m2", "--model2", required=True)
    p.add_argument("-n", type=int, default=None, help="depth; omit to iterate to the fixpoint")

    p = add("charform", cmd_charform, "characteristic formula of a world or state")
    p.add_argument("-m", "--model", required=True)
    point = p.add_mutually_exclusive_group(required=True)
    point.add_argument("-w", "--world")
    point.add_argument("-s", "--state")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--pi", action="store_true", help="with -s, print the pi formula")
    p.add_argument("--pool", nargs="*", help="extra models for the comparison pool")

    p = add("closure", cmd_closure, "monotonic closure of a model")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("--kind", required=True, choices=CLOSURE_KINDS)
    p.add_argument("-o", "--output")

    p = add("frame", cmd_frame, "check a frame condition")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("--cond", required=True, help=", ".join(FRAME_CONDITIONS))
    p.add_argument("--world")

    p = add("check", cmd_check, "check a derivation")
    p.add_argument("-d", "--derivation", required=True)
    p.add_argument("--premises", help="file with one formula per line")
    p.add_argument("--frame-axioms", help="comma-separated, e.g. refl,nontriv")

    p = add("countermodel", cmd_countermodel, "bounded countermodel search")
    p.add_argument("--premises", help="file with one formula per line")
    p.add_argument("--goal", required=True)
    p.add_argument("--max-worlds", type=int, default=2)
    p.add_argument("--allow-empty", action="store_true")

    p = add("inl-star", cmd_inl_star, "translate INL into InqML")
    p.add_argument("formula")

    p = add("inl-costar", cmd_inl_costar, "translate a declarative into INL")
    p.add_argument("formula")
    p.add_argument("--signature", help="comma-separated atoms; the first one encodes bot")

    p = add("fuzz", cmd_fuzz, "soundness fuzzing of the proof system")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frame-axioms")
    p.add_argument("--no-condition-filter", action="store_true")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (FormulaSyntaxError, ModelFormatError, UsageError, UnknownConditionError) as exc:
        print(f"inqml {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (SizingError, InqmlError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"inqml {args.command}: error: {msg}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
