import os
import random

import pytest

from inqml.errors import (ForeignWorldError, NonDeclarativeError, SignatureMismatchError,
                          SizingError, UnknownAtomError)
from inqml.formula import Yields, box
from inqml.model import NeighborhoodModel, enumerate_models
from inqml.sampling import random_formula, random_model
from inqml.semantics import (Evaluator, counterfactual_truth, entails_on_models,
                             find_countermodel, is_truth_conditional_on, lewis_clause,
                             state_order, supports, true_at, truth_set)

from oracles import PlainModel, support

SLOW = os.environ.get("INQML_SLOW") == "1"


def pvary():
    return NeighborhoodModel(["a", "b"], {"a": [], "b": []}, {"a": ["p"], "b": []}, ["p"])


def test_fig1_support_examples(fig1):
    assert supports(fig1, ["wpq", "wnpq"], "?q")
    assert supports(fig1, ["wpq", "wnpnq"], "p <-> q")
    assert not supports(fig1, ["wpq", "wpnq"], "?q")
    for f in ["p", "bot", "?p => ?q", "(.)"]:
        assert supports(fig1, [], f)


def test_fig1_truth_examples(fig1):
    assert [true_at(fig1, w, "[+]?p") for w in ("w1", "w2", "w3")] == [True, False, False]
    assert [true_at(fig1, w, "?p => ?q") for w in ("w1", "w2", "w3")] == [True, True, False]
    assert true_at(fig1, "w2", "p => ?q") and not true_at(fig1, "w3", "p => ?q")


def test_truth_sets(fig1):
    assert truth_set(fig1, "?p") == fig1.worlds
    assert truth_set(fig1, "bot") == ()
    assert truth_set(fig1, "(.)") == ()


def test_errors(fig1):
    with pytest.raises(UnknownAtomError):
        supports(fig1, ["w1"], "r")
    with pytest.raises(ForeignWorldError):
        supports(fig1, ["nowhere"], "p")
    big = NeighborhoodModel([f"x{i}" for i in range(21)], {}, {}, ["p"])
    with pytest.raises(SizingError):
        supports(big, big.worlds, "p -> p")


def test_truth_conditionality():
    rng = random.Random(3)
    for _ in range(50):
        m = random_model(rng, rng.randint(1, 4))
        assert is_truth_conditional_on(m, random_formula(rng, declarative=True))
        assert is_truth_conditional_on(m, "p \\/ ~p")
    assert not is_truth_conditional_on(pvary(), "?p")


def test_matches_oracle_on_random_models():
    rng = random.Random(11)
    for _ in range(150):
        m = random_model(rng, rng.randint(1, 4), allow_empty=rng.random() < 0.3)
        plain = PlainModel.of(m)
        ev = Evaluator(m)
        for _ in range(6):
            f = random_formula(rng, depth=3, odot=True)
            for s in range(m.full_mask + 1):
                assert ev.supports(s, f) == support(plain, m.state_of(s), f), (m.to_json(), f)


def test_box_on_declaratives_is_kripke_box():
    rng = random.Random(5)
    for _ in range(100):
        m = random_model(rng, rng.randint(1, 4))
        a = random_formula(rng, depth=2, declarative=True)
        kripke = m.underlying_kripke()
        for w in m.worlds:
            assert true_at(m, w, box(a)) == all(true_at(m, v, a) for v in kripke[w])


def test_state_order():
    m = pvary()
    assert state_order(m) == [0, 1, 3, 2]


def test_entailment():
    models = list(enumerate_models(2, ("p",)))
    assert entails_on_models(["p"], "?p", models) == (True, None)
    holds, (m, s) = entails_on_models(["?p"], "p", [pvary()])
    assert not holds and s == ("b",)
    with pytest.raises(SignatureMismatchError):
        entails_on_models(["q"], "p", models)
    rng = random.Random(2)
    two_atoms = list(enumerate_models(2, ("p", "q")))
    for _ in range(5):
        phi, psi, chi = (random_formula(rng, depth=1) for _ in range(3))
        assert entails_on_models([Yields(phi, psi), Yields(psi, chi)], Yields(phi, chi),
                                 two_atoms)[0]


def test_countermodels():
    found = find_countermodel(["?p"], "p", 2)
    assert found is not None
    m, s = found
    assert supports(m, s, "?p") and not supports(m, s, "p")
    m, s = find_countermodel([], "~[+]bot", 1)
    assert all(m.neighborhoods(w) == [] for w in s)
    assert find_countermodel([], "p => p", 2) is None
    with pytest.raises(SizingError):
        find_countermodel([], "p => p", 4)


@pytest.mark.skipif(not SLOW, reason="full 3-world sweep takes minutes; set INQML_SLOW=1")
def test_no_countermodel_at_three_worlds():
    assert find_countermodel([], "p => p", 3) is None


def test_counterfactual_examples():
    m = NeighborhoodModel(["w", "a", "b"], {"w": []}, {"a": ["p", "q"], "b": [], "w": []},
                          ["p", "q"])
    assert counterfactual_truth(m, "w", "p", "q")
    m = NeighborhoodModel(["w", "a", "b"], {"w": [["a"]]}, {"a": ["p", "q"], "b": [], "w": []},
                          ["p", "q"])
    assert counterfactual_truth(m, "w", "p", "q")
    m = NeighborhoodModel(["w", "a", "b"], {"w": [["a", "b"]]}, {"a": ["p"], "b": [], "w": []},
                          ["p", "q"])
    assert not counterfactual_truth(m, "w", "p", "q")
    assert not lewis_clause(m, "w", "p", "q")
    with pytest.raises(NonDeclarativeError):
        counterfactual_truth(m, "w", "?p", "q")
