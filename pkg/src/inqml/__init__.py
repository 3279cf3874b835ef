"""Inquisitive modal logic over neighborhood models.

Formulas, support semantics, bisimulation, characteristic formulas,
derivation checking and translations to and from instantial neighborhood
logic, all at finite scale.
"""
__version__ = "0.1.0"

from .errors import (FormulaSyntaxError, ForeignWorldError, InqmlError, ModelFormatError,
                     NonDeclarativeError, PointKindError, SignatureMismatchError, SizingError,
                     UnknownAtomError, UnknownConditionError)
from .formula import (Atom, Bottom, Conj, Formula, Impl, InqDisj, Odot, Yields, parse,
                      print_formula, modal_depth, is_declarative, resolutions,
                      declarative_variant, resolutions_of_set)
from .model import NeighborhoodModel, closure, check_frame_condition, enumerate_models
from .semantics import (supports, true_at, truth_set, is_truth_conditional_on,
                        entails_on_models, find_countermodel, counterfactual_truth)
from .bisim import em_lift, stratified_bisim, bisimilar, StratifiedBisim
from .charform import chi_world, pi_state, chi_state, class_formula, CharacteristicFormulas
from .proofsys import (Derivation, match_axiom, check_derivation, check_turnstile,
                       soundness_fuzz)
from .inl import (InlAtom, InlNeg, InlConj, InlBox, parse_inl, print_inl, inl_truth,
                  translate_star, translate_costar)
