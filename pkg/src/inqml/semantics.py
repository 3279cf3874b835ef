"""Support semantics, truth, entailment and bounded countermodel search."""
from __future__ import annotations

from typing import Iterable, Sequence

from .errors import NonDeclarativeError, SignatureMismatchError, SizingError, UnknownAtomError
from .formula import (Atom, Bottom, Conj, Formula, Impl, InqDisj, Odot, Yields,
                      atoms_of, counterfactual, is_declarative, parse)
from .model import NeighborhoodModel, bits, enumerate_models, submasks

__all__ = [
    "Evaluator", "supports", "true_at", "truth_set", "is_truth_conditional_on",
    "entails_on_models", "find_countermodel", "counterfactual_truth",
    "lewis_clause", "IMPLICATION_STATE_CAP", "state_order",
]

IMPLICATION_STATE_CAP = 20


def _formula(f) -> Formula:
    return parse(f) if isinstance(f, str) else f


class Evaluator:
    """Memoized support checker for one model.

    States are bitmasks.  Modal formulas (``=>`` and ``(.)``) are evaluated
    once per world into a truth mask; everything else goes through the
    support clauses with a (state, formula) memo.
    """

    def __init__(self, model: NeighborhoodModel):
        self.model = model
        self.sigma = model.sigma_masks
        self.sigma_sets = model.sigma_sets
        self.atom_masks = model.atom_masks
        self._memo: dict = {}
        self._truth: dict = {}
        self._checked: set = set()

    def check_atoms(self, f: Formula) -> None:
        if f in self._checked:
            return
        for a in atoms_of(f):
            if a not in self.atom_masks:
                raise UnknownAtomError(f"atom {a!r} is not in the model's signature")
        self._checked.add(f)

    def supports(self, mask: int, f: Formula) -> bool:
        key = (mask, f)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Atom):
            try:
                out = mask & ~self.atom_masks[f.name] == 0
            except KeyError:
                raise UnknownAtomError(
                    f"atom {f.name!r} is not in the model's signature") from None
        elif isinstance(f, Bottom):
            out = mask == 0
        elif isinstance(f, Conj):
            out = self.supports(mask, f.left) and self.supports(mask, f.right)
        elif isinstance(f, InqDisj):
            out = self.supports(mask, f.left) or self.supports(mask, f.right)
        elif isinstance(f, Impl):
            if bin(mask).count("1") > IMPLICATION_STATE_CAP:
                raise SizingError(
                    f"implication support over states of more than "
                    f"{IMPLICATION_STATE_CAP} worlds is not supported")
            out = all(not self.supports(t, f.left) or self.supports(t, f.right)
                      for t in submasks(mask))
        elif isinstance(f, (Yields, Odot)):
            out = mask & ~self.truth_mask(f) == 0
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._memo[key] = out
        return out

    def _true_modal(self, i: int, f: Formula) -> bool:
        if isinstance(f, Odot):
            return 0 in self.sigma_sets[i]
        return all(not self.supports(s, f.left) or self.supports(s, f.right)
                   for s in self.sigma[i])

    def truth_mask(self, f: Formula) -> int:
        """Bitmask of the worlds where ``f`` is true."""
        out = self._truth.get(f)
        if out is None:
            if isinstance(f, (Yields, Odot)):
                out = 0
                for i in range(self.model.size):
                    if self._true_modal(i, f):
                        out |= 1 << i
            else:
                out = 0
                for i in range(self.model.size):
                    if self.supports(1 << i, f):
                        out |= 1 << i
            self._truth[f] = out
        return out

    def true_at(self, i: int, f: Formula) -> bool:
        return bool(self.truth_mask(f) >> i & 1)


def supports(m: NeighborhoodModel, s: Iterable[str], f, evaluator: Evaluator | None = None) -> bool:
    f = _formula(f)
    ev = evaluator or Evaluator(m)
    ev.check_atoms(f)
    return ev.supports(m.state_mask(s), f)


def true_at(m: NeighborhoodModel, w: str, f, evaluator: Evaluator | None = None) -> bool:
    f = _formula(f)
    ev = evaluator or Evaluator(m)
    ev.check_atoms(f)
    return ev.supports(1 << m.world_index(w), f)


def truth_set(m: NeighborhoodModel, f, evaluator: Evaluator | None = None) -> tuple[str, ...]:
    f = _formula(f)
    ev = evaluator or Evaluator(m)
    ev.check_atoms(f)
    return m.state_of(ev.truth_mask(f))


def is_truth_conditional_on(m: NeighborhoodModel, f, evaluator: Evaluator | None = None) -> bool:
    f = _formula(f)
    ev = evaluator or Evaluator(m)
    ev.check_atoms(f)
    truth = ev.truth_mask(f)
    return all(ev.supports(s, f) == (s & ~truth == 0) for s in range(m.full_mask + 1))


def state_order(m: NeighborhoodModel) -> list[int]:
    """All state masks, lexicographically ordered as tuples of world positions."""
    return sorted(range(m.full_mask + 1), key=lambda s: tuple(bits(s)))


def _shared_signature(formulas: Sequence[Formula], models: Sequence[NeighborhoodModel]):
    needed = set(atoms_of(formulas))
    sigs = {frozenset(m.atoms) for m in models}
    if len(sigs) > 1:
        raise SignatureMismatchError("models do not share one atom signature")
    for sig in sigs:
        missing = needed - sig
        if missing:
            raise SignatureMismatchError(
                f"formulas use atoms {sorted(missing)} outside the models' signature")


def _counterexample(m, premises, conclusion):
    ev = Evaluator(m)
    for s in state_order(m):
        if all(ev.supports(s, p) for p in premises) and not ev.supports(s, conclusion):
            return m.state_of(s)
    return None


def entails_on_models(premises: Iterable, conclusion, models: Iterable[NeighborhoodModel]):
    """Check premises |= conclusion on every state of the listed models.

    Returns ``(holds, counterexample)``, the counterexample being the first
    model (in list order) and its least violating state.
    """
    premises = [_formula(p) for p in premises]
    conclusion = _formula(conclusion)
    models = list(models)
    _shared_signature(premises + [conclusion], models)
    for m in models:
        s = _counterexample(m, premises, conclusion)
        if s is not None:
            return False, (m, s)
    return True, None


def find_countermodel(premises: Iterable, conclusion, max_worlds: int,
                      allow_empty: bool = False, signature: Sequence[str] | None = None):
    """First (model, state) in enumeration order refuting the entailment, or None.

    The search is a semi-check: finding nothing up to the bound proves nothing.
    """
    premises = [_formula(p) for p in premises]
    conclusion = _formula(conclusion)
    if signature is None:
        signature = atoms_of(premises + [conclusion])
    else:
        missing = set(atoms_of(premises + [conclusion])) - set(signature)
        if missing:
            raise SignatureMismatchError(f"atoms {sorted(missing)} not in the signature")
    for m in enumerate_models(max_worlds, signature, allow_empty):
        s = _counterexample(m, premises, conclusion)
        if s is not None:
            return m, s
    return None


def lewis_clause(m: NeighborhoodModel, w: str, antecedent, consequent,
                 evaluator: Evaluator | None = None) -> bool:
    """The direct neighborhood truth condition of the counterfactual."""
    a, b = _formula(antecedent), _formula(consequent)
    ev = evaluator or Evaluator(m)
    ev.check_atoms(a)
    ev.check_atoms(b)
    ta, tb = ev.truth_mask(a), ev.truth_mask(b)
    fam = m.sigma_masks[m.world_index(w)]
    if all(s & ta == 0 for s in fam):
        return True
    return any(s & ta and (s & ta) & ~tb == 0 for s in fam)


def counterfactual_truth(m: NeighborhoodModel, w: str, antecedent, consequent) -> bool:
    a, b = _formula(antecedent), _formula(consequent)
    if not (is_declarative(a) and is_declarative(b)):
        raise NonDeclarativeError("counterfactual arguments must be declaratives")
    ev = Evaluator(m)
    via_formula = true_at(m, w, counterfactual(a, b), ev)
    direct = lewis_clause(m, w, a, b, ev)
    if via_formula != direct:
        raise AssertionError(
            f"counterfactual formula and direct clause disagree at {w!r}")
    return via_formula
