"""Hilbert-style derivation checking.

Schemas are written in the ordinary formula grammar; every atom in a
schema pattern is a metavariable.  Metavariables whose names start with
``alpha`` or ``beta`` only match declaratives.

The intuitionistic base is the usual finite basis (K, S, the conjunction
and disjunction axioms and ex falso) with the inquisitive disjunction in
the disjunction role.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ModelFormatError
from .formula import (Atom, Conj, Formula, Impl, InqDisj, Yields, big_conj, big_inqdisj,
                      is_declarative, parse, print_formula)
from .model import check_frame_condition, enumerate_models
from .semantics import Evaluator

__all__ = [
    "SCHEMAS", "INTUITIONISTIC", "INQUISITIVE", "MODAL", "BASE_SCHEMAS", "FRAME_AXIOMS",
    "FRAME_AXIOM_CONDITION", "schema_names", "match_axiom", "instantiate",
    "Step", "Derivation", "Failure", "CheckReport", "check_derivation", "check_turnstile",
    "ProofTerm", "Ax", "Prem", "Hyp", "MP", "CN", "discharge", "linearize", "imp_refl",
    "and_intro", "modal_pair", "distribution_proof", "combine_yields_derivation",
    "FuzzReport", "soundness_fuzz", "random_derivation",
]

_SCHEMA_TEXT = [
    # intuitionistic base
    ("K", "phi -> psi -> phi"),
    ("S", "(phi -> psi -> chi) -> (phi -> psi) -> phi -> chi"),
    ("AndI", "phi -> psi -> phi & psi"),
    ("AndE1", "phi & psi -> phi"),
    ("AndE2", "phi & psi -> psi"),
    ("OrI1", "phi -> phi // psi"),
    ("OrI2", "psi -> phi // psi"),
    ("OrE", "(phi -> chi) -> (psi -> chi) -> phi // psi -> chi"),
    ("ExFalso", "bot -> phi"),
    # declaratives are classical, and split
    ("DDN", "~~alpha -> alpha"),
    ("Split", "(alpha -> phi // psi) -> (alpha -> phi) // (alpha -> psi)"),
    # modal axioms
    ("Trans", "(phi => psi) & (psi => chi) -> (phi => chi)"),
    ("RConj", "(phi => psi) & (phi => chi) -> (phi => psi & chi)"),
    ("LDisj", "(phi => chi) & (psi => chi) -> (phi // psi => chi)"),
    # frame axioms
    ("DownMono", "(phi => psi) -> [+](phi -> psi)"),
    ("FinUnion", "(alpha => phi // psi) -> (alpha => phi) \\/ (alpha => psi)"),
    ("Refl", "[+]alpha -> alpha"),
    ("NonTriv", "~[+]bot"),
    ("Decr", "(phi => psi) -> [+](phi => psi)"),
    ("Incr", "~(phi => psi) -> [+]~(phi => psi)"),
]

SCHEMAS: dict[str, Formula] = {name: parse(text) for name, text in _SCHEMA_TEXT}
SCHEMA_TEXT = dict(_SCHEMA_TEXT)
INTUITIONISTIC = ("K", "S", "AndI", "AndE1", "AndE2", "OrI1", "OrI2", "OrE", "ExFalso")
INQUISITIVE = ("DDN", "Split")
MODAL = ("Trans", "RConj", "LDisj")
BASE_SCHEMAS = INTUITIONISTIC + INQUISITIVE + MODAL
FRAME_AXIOMS = ("DownMono", "FinUnion", "Refl", "NonTriv", "Decr", "Incr")
FRAME_AXIOM_CONDITION = {
    "DownMono": "downward-monotonicity",
    "FinUnion": "finite-union-closure",
    "Refl": "reflexivity",
    "NonTriv": "non-triviality",
    "Decr": "decreasingness",
    "Incr": "increasingness",
}
_FRAME_KEYS = {name.lower(): name for name in FRAME_AXIOMS}


def schema_names(schemas: Iterable[str] | None = None, frame_axioms: Iterable[str] = ()) -> tuple:
    """Resolve an enabled schema set, in fixed schema order.

    ``frame_axioms`` accepts names case-insensitively (``refl``, ``nontriv``).
    """
    chosen = set(BASE_SCHEMAS if schemas is None else schemas)
    for name in frame_axioms:
        key = name.strip().lower()
        if key not in _FRAME_KEYS:
            raise KeyError(f"unknown frame axiom {name!r}; known: {', '.join(FRAME_AXIOMS)}")
        chosen.add(_FRAME_KEYS[key])
    unknown = chosen - set(SCHEMAS)
    if unknown:
        raise KeyError(f"unknown schemas {sorted(unknown)}")
    return tuple(n for n, _ in _SCHEMA_TEXT if n in chosen)


# -- matching -----------------------------------------------------------

class _SideCondition(Exception):
    pass


def _declarative_slot(name: str) -> bool:
    return name.startswith("alpha") or name.startswith("beta")


def _unify(pattern: Formula, target: Formula, subst: dict) -> bool:
    if isinstance(pattern, Atom):
        bound = subst.get(pattern.name)
        if bound is not None:
            return bound is target
        if _declarative_slot(pattern.name) and not is_declarative(target):
            raise _SideCondition(pattern.name)
        subst[pattern.name] = target
        return True
    if type(pattern) is not type(target):
        return False
    return all(_unify(p, t, subst) for p, t in zip(pattern.children, target.children))


def _match_one(name: str, f: Formula):
    """Substitution, or None; raises _SideCondition on a declarative-slot breach."""
    subst: dict = {}
    breach = None
    try:
        ok = _unify(SCHEMAS[name], f, subst)
    except _SideCondition as exc:
        breach = exc
        ok = False
    if ok:
        return subst
    if breach is not None:
        # only a breach if the shape matches once the side condition is ignored
        loose = {}
        if _unify_loose(SCHEMAS[name], f, loose):
            raise breach
    return None


def _unify_loose(pattern, target, subst):
    if isinstance(pattern, Atom):
        bound = subst.get(pattern.name)
        if bound is not None:
            return bound is target
        subst[pattern.name] = target
        return True
    if type(pattern) is not type(target):
        return False
    return all(_unify_loose(p, t, subst) for p, t in zip(pattern.children, target.children))


def match_axiom(f: Formula, schemas: Iterable[str] | None = None):
    """First (schema name, substitution) in schema order producing ``f``, or None."""
    for name in schema_names(schemas):
        try:
            subst = _match_one(name, f)
        except _SideCondition:
            continue
        if subst is not None:
            return name, subst
    return None


def instantiate(name: str, subst: dict) -> Formula:
    """Instantiate a schema; metavariables missing from ``subst`` are an error."""
    def go(p):
        if isinstance(p, Atom):
            if p.name not in subst:
                raise KeyError(f"schema {name} needs a value for {p.name!r}")
            value = subst[p.name]
            if _declarative_slot(p.name) and not is_declarative(value):
                raise ValueError(f"schema {name}: {p.name} must be declarative")
            return value
        if not p.children:
            return p
        return type(p)(*(go(c) for c in p.children))
    return go(SCHEMAS[name])


# -- derivations --------------------------------------------------------

@dataclass(frozen=True)
class Step:
    formula: Formula | None
    kind: str                  # premise | axiom | MP | CN
    schema: str | None = None
    refs: tuple = ()

    def to_json(self) -> dict:
        out = {}
        if self.formula is not None:
            out["formula"] = print_formula(self.formula, resugar=True)
        if self.kind == "premise":
            out["by"] = "premise"
        elif self.kind == "axiom":
            out["by"] = {"axiom": self.schema}
        elif self.kind == "MP":
            out["by"] = {"rule": "MP", "of": list(self.refs)}
        else:
            out["by"] = {"rule": "CN", "of": self.refs[0]}
        return out


@dataclass
class Derivation:
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def to_json(self) -> list:
        return [s.to_json() for s in self.steps]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, data) -> "Derivation":
        if isinstance(data, (str, bytes)):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ModelFormatError(f"invalid derivation JSON: {exc}") from exc
        if not isinstance(data, list):
            raise ModelFormatError("a derivation is a JSON array of steps")
        steps = []
        for k, raw in enumerate(data, 1):
            if not isinstance(raw, dict) or "by" not in raw:
                raise ModelFormatError(f"step {k}: expected an object with a 'by' key")
            text = raw.get("formula")
            formula = parse(text) if isinstance(text, str) else None
            by = raw["by"]
            if by == "premise":
                steps.append(Step(formula, "premise"))
            elif isinstance(by, dict) and "axiom" in by:
                steps.append(Step(formula, "axiom", schema=str(by["axiom"])))
            elif isinstance(by, dict) and by.get("rule") == "MP":
                of = by.get("of")
                if not (isinstance(of, list) and len(of) == 2 and all(isinstance(i, int) for i in of)):
                    raise ModelFormatError(f"step {k}: MP needs two step indices")
                steps.append(Step(formula, "MP", refs=tuple(of)))
            elif isinstance(by, dict) and by.get("rule") == "CN":
                of = by.get("of")
                if isinstance(of, list) and len(of) == 1:
                    of = of[0]
                if not isinstance(of, int):
                    raise ModelFormatError(f"step {k}: CN needs one step index")
                steps.append(Step(formula, "CN", refs=(of,)))
            else:
                raise ModelFormatError(f"step {k}: unknown justification {by!r}")
        return cls(steps)

    @classmethod
    def load(cls, path) -> "Derivation":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_json(fh.read())
        except OSError as exc:
            raise ModelFormatError(f"cannot read {path}: {exc}") from exc


@dataclass(frozen=True)
class Failure:
    step: int
    kind: str
    message: str


@dataclass
class CheckReport:
    ok: bool
    end_formula: Formula | None = None
    failure: Failure | None = None
    formulas: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "end_formula": print_formula(self.end_formula, resugar=True)
            if self.end_formula is not None else None,
            "failure": None if self.failure is None else {
                "step": self.failure.step, "kind": self.failure.kind,
                "message": self.failure.message},
        }


def check_derivation(d: Derivation, premises: Iterable[Formula] = (),
                     schemas: Iterable[str] | None = None) -> CheckReport:
    """Verify every step; stop at the first failure.

    CN is refused on any step that depends on a premise: necessitation is
    only sound for theorems.
    """
    enabled = schema_names(schemas)
    premise_set = {parse(p) if isinstance(p, str) else p for p in premises}
    formulas: list[Formula] = []
    tainted: list[bool] = []

    def fail(k, kind, msg):
        return CheckReport(False, None, Failure(k, kind, msg), formulas)

    def ref(k, i):
        if not isinstance(i, int) or i < 1 or i >= k:
            raise IndexError(f"step {k} refers to step {i}, which is not an earlier step")
        return i - 1

    for k, step in enumerate(d.steps, 1):
        if step.kind == "premise":
            if step.formula is None:
                return fail(k, "rule-mismatch", f"step {k}: premise without a formula")
            if step.formula not in premise_set:
                return fail(k, "premise-not-in-set",
                            f"step {k}: {print_formula(step.formula, True)} is not a premise")
            formulas.append(step.formula)
            tainted.append(True)
        elif step.kind == "axiom":
            if step.formula is None:
                return fail(k, "rule-mismatch", f"step {k}: axiom without a formula")
            if step.schema not in SCHEMAS:
                return fail(k, "unmatched-axiom", f"step {k}: unknown schema {step.schema!r}")
            if step.schema not in enabled:
                return fail(k, "unmatched-axiom", f"step {k}: schema {step.schema} is not enabled")
            try:
                subst = _match_one(step.schema, step.formula)
            except _SideCondition as exc:
                return fail(k, "side-condition",
                            f"step {k}: {step.schema} needs a declarative for {exc.args[0]}")
            if subst is None:
                return fail(k, "unmatched-axiom",
                            f"step {k}: formula is not an instance of {step.schema}")
            formulas.append(step.formula)
            tainted.append(False)
        elif step.kind == "MP":
            try:
                i, j = (ref(k, x) for x in step.refs)
            except IndexError as exc:
                return fail(k, "bad-index", str(exc))
            major = formulas[j]
            if not isinstance(major, Impl) or major.left is not formulas[i]:
                return fail(k, "rule-mismatch",
                            f"step {k}: step {j + 1} is not an implication from step {i + 1}")
            result = major.right
            if step.formula is not None and step.formula is not result:
                return fail(k, "rule-mismatch",
                            f"step {k}: MP yields {print_formula(result, True)}")
            formulas.append(result)
            tainted.append(tainted[i] or tainted[j])
        elif step.kind == "CN":
            try:
                i = ref(k, step.refs[0])
            except IndexError as exc:
                return fail(k, "bad-index", str(exc))
            src = formulas[i]
            if not isinstance(src, Impl):
                return fail(k, "rule-mismatch", f"step {k}: step {i + 1} is not an implication")
            if tainted[i]:
                return fail(k, "cn-on-premise",
                            f"step {k}: CN applied to step {i + 1}, which depends on premises")
            result = Yields(src.left, src.right)
            if step.formula is not None and step.formula is not result:
                return fail(k, "rule-mismatch",
                            f"step {k}: CN yields {print_formula(result, True)}")
            formulas.append(result)
            tainted.append(False)
        else:
            return fail(k, "rule-mismatch", f"step {k}: unknown justification {step.kind!r}")
    if not formulas:
        return CheckReport(False, None, Failure(0, "rule-mismatch", "empty derivation"), formulas)
    return CheckReport(True, formulas[-1], None, formulas)


def turnstile_formula(phis: Sequence[Formula], psis: Sequence[Formula]) -> Formula:
    """(conjunction of phis) -> (inquisitive disjunction of psis); top / bot when empty."""
    return Impl(big_conj(phis), big_inqdisj(psis))


def check_turnstile(phis: Sequence[Formula], psis: Sequence[Formula], d: Derivation,
                    schemas: Iterable[str] | None = None,
                    selected_phis: Sequence[Formula] | None = None,
                    selected_psis: Sequence[Formula] | None = None) -> CheckReport:
    """Check a certificate for ``phis |- psis``.

    The certificate selects finitely many members on each side (all of them
    by default) and derives, from no premises, the implication from their
    conjunction to their inquisitive disjunction.
    """
    phis = [parse(f) if isinstance(f, str) else f for f in phis]
    psis = [parse(f) if isinstance(f, str) else f for f in psis]
    sel_phi = phis if selected_phis is None else [parse(f) if isinstance(f, str) else f
                                                  for f in selected_phis]
    sel_psi = psis if selected_psis is None else [parse(f) if isinstance(f, str) else f
                                                  for f in selected_psis]
    if not set(sel_phi) <= set(phis) or not set(sel_psi) <= set(psis):
        return CheckReport(False, None, Failure(0, "end-mismatch",
                                                "selection is not drawn from the given sets"))
    report = check_derivation(d, (), schemas)
    if not report.ok:
        return report
    goal = turnstile_formula(sel_phi, sel_psi)
    if report.end_formula is not goal:
        return CheckReport(False, report.end_formula, Failure(
            len(d.steps), "end-mismatch",
            f"derivation ends in {print_formula(report.end_formula, True)}, "
            f"expected {print_formula(goal, True)}"), report.formulas)
    return report


# -- proof terms --------------------------------------------------------

class ProofTerm:
    formula: Formula


@dataclass(frozen=True, eq=False)
class Ax(ProofTerm):
    schema: str
    formula: Formula

    def __post_init__(self):
        try:
            subst = _match_one(self.schema, self.formula)
        except _SideCondition:
            subst = None
        if subst is None:
            raise ValueError(f"not an instance of {self.schema}: {self.formula}")


@dataclass(frozen=True, eq=False)
class Prem(ProofTerm):
    formula: Formula


@dataclass(frozen=True, eq=False)
class Hyp(ProofTerm):
    formula: Formula


@dataclass(frozen=True, eq=False)
class MP(ProofTerm):
    minor: ProofTerm
    major: ProofTerm

    @property
    def formula(self):
        major = self.major.formula
        if not isinstance(major, Impl) or major.left is not self.minor.formula:
            raise ValueError("modus ponens shape mismatch")
        return major.right


@dataclass(frozen=True, eq=False)
class CN(ProofTerm):
    sub: ProofTerm

    @property
    def formula(self):
        f = self.sub.formula
        if not isinstance(f, Impl):
            raise ValueError("CN needs an implication")
        return Yields(f.left, f.right)


def _uses(term: ProofTerm, h: Formula) -> bool:
    if isinstance(term, Hyp):
        return term.formula is h
    if isinstance(term, MP):
        return _uses(term.minor, h) or _uses(term.major, h)
    if isinstance(term, CN):
        return _uses(term.sub, h)
    return False


def imp_refl(a: Formula) -> ProofTerm:
    """A proof of a -> a from K and S."""
    aa = Impl(a, a)
    k1 = Ax("K", Impl(a, Impl(aa, a)))
    s = Ax("S", Impl(Impl(a, Impl(aa, a)), Impl(Impl(a, aa), aa)))
    k2 = Ax("K", Impl(a, aa))
    return MP(k2, MP(k1, s))


def discharge(h: Formula, term: ProofTerm) -> ProofTerm:
    """Deduction theorem: turn a proof of f under hypothesis h into one of h -> f."""
    f = term.formula
    if isinstance(term, Hyp) and term.formula is h:
        return imp_refl(h)
    if not _uses(term, h):
        return MP(term, Ax("K", Impl(f, Impl(h, f))))
    if isinstance(term, CN):
        raise ValueError("cannot discharge a hypothesis used under CN")
    a = term.minor.formula
    ha = discharge(h, term.minor)
    hab = discharge(h, term.major)
    s = Ax("S", Impl(Impl(h, Impl(a, f)), Impl(Impl(h, a), Impl(h, f))))
    return MP(ha, MP(hab, s))


def and_intro(x: ProofTerm, y: ProofTerm) -> ProofTerm:
    a, b = x.formula, y.formula
    return MP(y, MP(x, Ax("AndI", Impl(a, Impl(b, big_conj([a, b]))))))


def modal_pair(schema: str, x: ProofTerm, y: ProofTerm, conclusion: Formula) -> ProofTerm:
    """Apply one of the conjunctive modal axioms (Trans, RConj, LDisj) to two proofs."""
    both = and_intro(x, y)
    return MP(both, Ax(schema, Impl(both.formula, conclusion)))


def linearize(terms: Sequence[ProofTerm]) -> Derivation:
    """Emit proof terms in the given order, sharing already emitted steps."""
    steps: list[Step] = []
    index: dict = {}

    def emit(t: ProofTerm) -> int:
        if isinstance(t, Hyp):
            raise ValueError("undischarged hypothesis")
        if isinstance(t, Prem):
            key = ("premise", t.formula)
        elif isinstance(t, Ax):
            key = ("axiom", t.formula)
        elif isinstance(t, MP):
            key = ("MP", emit(t.minor), emit(t.major))
        else:
            key = ("CN", emit(t.sub))
        if key in index:
            return index[key]
        if key[0] == "premise":
            step = Step(t.formula, "premise")
        elif key[0] == "axiom":
            step = Step(t.formula, "axiom", schema=t.schema)
        elif key[0] == "MP":
            step = Step(t.formula, "MP", refs=(key[1], key[2]))
        else:
            step = Step(t.formula, "CN", refs=(key[1],))
        steps.append(step)
        index[key] = len(steps)
        # later identical formulas reuse the first step
        return index[key]

    for t in terms:
        emit(t)
    return Derivation(steps)


def distribution_proof(a: Formula, b: Formula, c: Formula) -> ProofTerm:
    """A proof of a & (b // c) -> b // (a & c) from the intuitionistic base."""
    h = Conj(a, InqDisj(b, c))
    goal = InqDisj(b, Conj(a, c))
    hyp = Hyp(h)
    got_a = MP(hyp, Ax("AndE1", Impl(h, a)))
    got_bc = MP(hyp, Ax("AndE2", Impl(h, InqDisj(b, c))))
    left = Ax("OrI1", Impl(b, goal))
    # under the extra hypothesis c: a & c, hence the goal
    got_ac = and_intro(got_a, Hyp(c))
    right = discharge(c, MP(got_ac, Ax("OrI2", Impl(Conj(a, c), goal))))
    ore = Ax("OrE", Impl(Impl(b, goal), Impl(Impl(c, goal), Impl(InqDisj(b, c), goal))))
    return discharge(h, MP(got_bc, MP(right, MP(left, ore))))


def combine_yields_derivation(phi1, phi2, chi, psi1, psi2) -> Derivation:
    """Derive phi1 & phi2 => psi1 // psi2 from the premises
    phi1 & chi => psi1 and phi2 => psi2 // chi.

    Each of the thirteen main lines appears in order; propositional steps
    and the conjunctions feeding the modal axioms are filled in between.
    """
    p12 = Conj(phi1, phi2)
    q12 = InqDisj(psi1, psi2)
    s1 = Prem(Yields(Conj(phi1, chi), psi1))
    s2 = Prem(Yields(phi2, InqDisj(psi2, chi)))
    s3 = CN(Ax("AndE1", Impl(p12, phi1)))
    s4 = CN(Ax("AndE2", Impl(p12, phi2)))
    s5 = modal_pair("Trans", s4, s2, Yields(p12, InqDisj(psi2, chi)))
    s6 = modal_pair("RConj", s3, s5, Yields(p12, Conj(phi1, InqDisj(psi2, chi))))
    s7 = CN(distribution_proof(phi1, psi2, chi))
    s8 = modal_pair("Trans", s6, s7, Yields(p12, InqDisj(psi2, Conj(phi1, chi))))
    s9 = CN(Ax("OrI1", Impl(psi1, q12)))
    s10 = CN(Ax("OrI2", Impl(psi2, q12)))
    s11 = modal_pair("Trans", s1, s9, Yields(Conj(phi1, chi), q12))
    s12 = modal_pair("LDisj", s10, s11, Yields(InqDisj(psi2, Conj(phi1, chi)), q12))
    s13 = modal_pair("Trans", s8, s12, Yields(p12, q12))
    return linearize([s1, s2, s3, s4, s5, s6, s7, s8, s9, s10, s11, s12, s13])


# -- soundness fuzzing --------------------------------------------------

@dataclass
class FuzzReport:
    samples: int = 0
    checked: int = 0
    models: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"samples": self.samples, "checked": self.checked, "models": self.models,
                "violations": [
                    {"formula": print_formula(f, True), "schema": s,
                     "model": m.to_json(), "world": w} for f, s, m, w in self.violations]}


def _random_leaf(rng, atoms, declarative=False):
    from .sampling import random_formula
    return random_formula(rng, atoms, depth=rng.randint(0, 2), declarative=declarative)


def random_instance(rng: random.Random, schema: str, atoms=("p", "q")) -> Formula:
    pattern = SCHEMAS[schema]
    names = sorted({a.name for a in _atoms_in(pattern)})
    subst = {n: _random_leaf(rng, atoms, _declarative_slot(n)) for n in names}
    return instantiate(schema, subst)


def _atoms_in(f):
    from .formula import subformulas
    return [g for g in subformulas(f) if isinstance(g, Atom)]


def random_derivation(rng: random.Random, length: int, schemas: Sequence[str] = BASE_SCHEMAS,
                      atoms=("p", "q"), max_size: int = 60) -> Derivation:
    """A random valid derivation from no premises.

    Moves are chosen so that rule applications always fit: fresh axiom
    instances, modus ponens where an antecedent is already derived,
    K-weakening and conjunction of derived formulas, CN on derived
    implications, and the conjunctive modal axioms on derived modal pairs.
    """
    from .formula import size as fsize
    terms: list[ProofTerm] = []
    schemas = list(schemas)
    # the modal axioms are used on conjunctions, so they need AndI
    modal = [s for s in MODAL if s in schemas] if "AndI" in schemas else []
    while len(terms) < length:
        move = rng.random()
        new = None
        derived = {t.formula: t for t in terms}
        if move < 0.35 or not terms:
            name = rng.choice(schemas)
            new = Ax(name, random_instance(rng, name, atoms))
        elif move < 0.5:
            cands = [t for t in terms if isinstance(t.formula, Impl) and t.formula.left in derived]
            if cands:
                major = rng.choice(cands)
                new = MP(derived[major.formula.left], major)
        elif move < 0.62 and "K" in schemas:
            t = rng.choice(terms)
            extra = _random_leaf(rng, atoms)
            new = MP(t, Ax("K", Impl(t.formula, Impl(extra, t.formula))))
        elif move < 0.72 and "AndI" in schemas:
            new = and_intro(rng.choice(terms), rng.choice(terms))
        elif move < 0.85:
            cands = [t for t in terms if isinstance(t.formula, Impl)]
            if cands:
                new = CN(rng.choice(cands))
        elif modal:
            ys = [t for t in terms if isinstance(t.formula, Yields)]
            if len(ys) >= 2:
                x, y = rng.choice(ys), rng.choice(ys)
                a, b = x.formula, y.formula
                name = rng.choice(modal)
                if name == "Trans" and a.right is b.left:
                    new = modal_pair("Trans", x, y, Yields(a.left, b.right))
                elif name == "RConj" and a.left is b.left:
                    new = modal_pair("RConj", x, y, Yields(a.left, big_conj([a.right, b.right])))
                elif name == "LDisj" and a.right is b.right:
                    new = modal_pair("LDisj", x, y, Yields(InqDisj(a.left, b.left), a.right))
        if new is not None and fsize(new.formula) <= max_size:
            terms.append(new)
    return linearize(terms)


def soundness_fuzz(schemas: Iterable[str] | None = None, samples: int = 200, bound: int = 2,
                   seed: int = 0, atoms=("p", "q"), condition_filter: bool = True,
                   derivation_length: int = 12) -> FuzzReport:
    """Check sampled theorems for validity on all enumerated models.

    Base-system theorems come from random derivations and must be supported
    at the full state of every model up to ``bound`` worlds.  Frame-axiom
    instances are checked on the models satisfying the axiom's condition
    (or on all models when ``condition_filter`` is off).
    """
    rng = random.Random(seed)
    enabled = schema_names(schemas)
    base = [s for s in enabled if s not in FRAME_AXIOMS]
    frame = [s for s in enabled if s in FRAME_AXIOMS]
    report = FuzzReport()
    all_models = list(enumerate_models(bound, atoms))
    report.models = len(all_models)
    evaluators = {id(m): Evaluator(m) for m in all_models}

    def check(f, schema, models):
        report.checked += 1
        for m in models:
            ev = evaluators[id(m)]
            if not ev.supports(m.full_mask, f):
                bad = next(i for i in range(m.size) if not ev.supports(1 << i, f))
                report.violations.append((f, schema, m, m.worlds[bad]))
                return

    if base and samples:
        while report.samples < samples:
            d = random_derivation(rng, derivation_length, base, atoms)
            result = check_derivation(d, (), base)
            if not result.ok:
                raise AssertionError(f"generator produced a rejected derivation: {result.failure}")
            for f in result.formulas:
                if report.samples >= samples:
                    break
                report.samples += 1
                check(f, None, all_models)
    for name in frame:
        cond = FRAME_AXIOM_CONDITION[name]
        models = [m for m in all_models if not condition_filter
                  or check_frame_condition(m, cond)[0]]
        for _ in range(max(1, samples // 10)):
            check(random_instance(rng, name, atoms), name, models)
    return report
