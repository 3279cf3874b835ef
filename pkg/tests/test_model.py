import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inqml.errors import ForeignWorldError, ModelFormatError, SizingError, UnknownConditionError
from inqml.model import (CLOSURE_KINDS, FRAME_CONDITIONS, NeighborhoodModel,
                         check_frame_condition, closure, disjoint_union, enumerate_models)
from inqml.sampling import random_model

from oracles import PlainModel, close, count_models, frame_holds

ALL_FOUR = {"wpq", "wpnq", "wnpq", "wnpnq"}


def two(sigma, allow_empty=False):
    return NeighborhoodModel(["a", "b"], {"a": sigma, "b": []}, {"a": [], "b": []}, ["p"],
                             allow_empty)


def fams(m):
    return {w: {frozenset(s) for s in m.neighborhoods(w)} for w in m.worlds}


def random_models(seed, count, max_worlds=4, allow_empty=False):
    rng = random.Random(seed)
    return [random_model(rng, rng.randint(1, max_worlds), ("p", "q"), allow_empty,
                         density=rng.choice([0.1, 0.25, 0.4]))
            for _ in range(count)]


# -- validation and I/O -------------------------------------------------

def test_fig1_is_valid(fig1):
    assert fig1.validate() == []
    assert fig1.worlds[:3] == ("w1", "w2", "w3")


def test_validate_reports_problems():
    m = two([[]])
    assert any("empty neighborhood" in v for v in m.validate())
    assert two([[]], allow_empty=True).validate() == []
    m = two([["a", "zz"]])
    assert any("unknown worlds" in v for v in m.validate())
    with pytest.raises(ForeignWorldError):
        m.sigma_masks
    m = NeighborhoodModel(["a"], {"a": []}, {"a": ["r"]}, ["p"])
    assert any("unknown atom" in v for v in m.validate())


def test_json_round_trip(fig1, tmp_path):
    path = tmp_path / "m.json"
    fig1.dump(path)
    again = NeighborhoodModel.load(path)
    assert again == fig1
    assert again.to_json() == fig1.to_json()


@pytest.mark.parametrize("text", [
    "[]", "{", '{"worlds": "a"}', '{"worlds": ["a"], "extra": 1}',
    '{"worlds": ["a"], "neighborhoods": {"a": ["a"]}}',
    '{"worlds": ["a"], "allow_empty": "yes"}',
])
def test_bad_json(text):
    with pytest.raises(ModelFormatError):
        NeighborhoodModel.from_json(text)


def test_underlying_kripke(fig1):
    k = fig1.underlying_kripke()
    assert set(k["w1"]) == ALL_FOUR
    assert k["wpq"] == ()
    assert k["w2"] == k["w3"]


def test_disjoint_union_renames(fig1):
    u, renames = disjoint_union([fig1, fig1])
    assert u.size == 14
    assert renames[1]["w1"] == "1:w1"
    assert set(u.neighborhoods("1:w1")[0]) <= {f"1:{w}" for w in ALL_FOUR}


# -- closures -----------------------------------------------------------

def test_closure_examples():
    up = closure(two([["a"]]), "up")
    assert fams(up)["a"] == {frozenset("a"), frozenset("ab")}
    un = closure(two([["a"], ["b"]]), "union")
    assert fams(un)["a"] == {frozenset("a"), frozenset("b"), frozenset("ab")}


def test_closures_keep_but_never_add_empty():
    m = two([[], ["a"]], allow_empty=True)
    for kind in CLOSURE_KINDS:
        out = fams(closure(m, kind))
        assert frozenset() in out["a"]
        assert frozenset() not in out["b"]


@pytest.mark.parametrize("kind", CLOSURE_KINDS)
def test_closures_match_oracle(kind):
    for m in random_models(1, 40, allow_empty=False) + random_models(2, 20, 3, allow_empty=True):
        got = fams(closure(m, kind))
        want = {w: set(fam) for w, fam in close(PlainModel.of(m), kind).sigma.items()}
        assert got == want


@pytest.mark.parametrize("kind", CLOSURE_KINDS)
def test_closure_laws(kind):
    cond = {"up": "upward-monotonicity", "down": "downward-monotonicity",
            "convex": "convexity", "union": "full-union-closure"}[kind]
    for m in random_models(3, 40):
        c = closure(m, kind)
        assert closure(c, kind) == c
        assert all(fams(m)[w] <= fams(c)[w] for w in m.worlds)
        assert check_frame_condition(c, cond)[0]
    for m in random_models(4, 40):
        up = closure(m, "up")
        assert closure(closure(m, "convex"), "up") == up
        assert closure(closure(m, "union"), "up") == up
        assert closure(m, "union").underlying_kripke() == m.underlying_kripke()


# -- frame conditions ---------------------------------------------------

def test_fig1_frame_examples(fig1):
    assert check_frame_condition(fig1, "downward-monotonicity", "w1") == (True, None)
    holds, witness = check_frame_condition(fig1, "convexity", "w3")
    assert not holds
    s, t, s2 = (set(witness[k]) for k in ("s", "t", "s_prime"))
    assert s <= t <= s2 and s in fams(fig1)["w3"] and s2 in fams(fig1)["w3"]
    assert frozenset(t) not in fams(fig1)["w3"]
    holds, witness = check_frame_condition(fig1, "downward-monotonicity", "w3")
    assert not holds and witness["world"] == "w3"


def test_fig1_listed_convexity_triple_is_not_a_violation(fig1):
    # {wpq, wpnq} is one of the two halves pictured in the third family
    assert frozenset({"wpq", "wpnq"}) in fams(fig1)["w3"]


def test_non_triviality_on_empty_family():
    assert check_frame_condition(two([]), "non-triviality") == (False, {"world": "a"})


def test_unknown_condition(fig1):
    with pytest.raises(UnknownConditionError):
        check_frame_condition(fig1, "roundness")
    assert check_frame_condition(fig1, "refl")[0] is False


@pytest.mark.parametrize("cond", sorted(FRAME_CONDITIONS))
def test_frame_conditions_match_oracle(cond):
    models = list(enumerate_models(2, ("p",), allow_empty=True))
    models += random_models(5, 60, 3, allow_empty=True)
    for m in models:
        assert check_frame_condition(m, cond)[0] == frame_holds(PlainModel.of(m), cond)


# -- enumeration --------------------------------------------------------

def test_enumeration_counts():
    assert len(list(enumerate_models(1, ("p",)))) == 4 == count_models(1, ["p"])
    assert len(list(enumerate_models(1, ("p",), True))) == 8 == count_models(1, ["p"], True)
    assert len(list(enumerate_models(2, ("p", "q")))) == 536
    assert len(list(enumerate_models(2, ("p", "q"), True))) == 2096


def test_enumeration_is_duplicate_free():
    seen = set()
    for m in enumerate_models(2, ("p",), True):
        key = json.dumps(m.to_json(), sort_keys=True)
        assert key not in seen
        seen.add(key)
        assert m.validate() == []


def test_enumeration_cap():
    with pytest.raises(SizingError):
        next(enumerate_models(4))
    with pytest.raises(ValueError):
        next(enumerate_models(0))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9))
def test_random_models_are_valid(seed):
    m = random_model(random.Random(seed), 3, ("p", "q"))
    assert m.validate() == []
    assert NeighborhoodModel.from_json(json.dumps(m.to_json())) == m
