"""Model builders shared by several test files."""
import random

from inqml.data import load_fig1
from inqml.model import NeighborhoodModel
from inqml.sampling import random_model


def chain(length: int) -> NeighborhoodModel:
    """v0 -> v1 -> ... -> v_length, each step a singleton neighborhood; the last world is terminal."""
    worlds = [f"v{i}" for i in range(length + 1)]
    sigma = {w: [[worlds[i + 1]]] if i < length else [] for i, w in enumerate(worlds)}
    return NeighborhoodModel(worlds, sigma, {w: [] for w in worlds}, ["p"])


def random_pool(seed: int, count: int, max_worlds: int = 4, density=(0.15, 0.3)):
    rng = random.Random(seed)
    return [random_model(rng, rng.randint(1, max_worlds), ("p", "q"),
                         density=rng.uniform(*density)) for _ in range(count)]


def fig1_and_random(seed: int, count: int):
    return [load_fig1()] + random_pool(seed, count)


# -- corrupted copies of the combine-yields derivation ----------------------

def combine_yields_fixture():
    from inqml.data import data_path
    from inqml.formula import parse
    from inqml.proofsys import Derivation
    d = Derivation.load(data_path("derivations", "combine_yields.json"))
    text = data_path("derivations", "combine_yields.premises").read_text(encoding="utf-8")
    return d, [parse(line) for line in text.splitlines() if line.strip()]


def combine_yields_mutations():
    """Twenty (label, derivation) corruptions: 7 index swaps, 7 schema
    misuses and 6 declarative side-condition breaches."""
    import dataclasses

    from inqml.formula import parse
    from inqml.proofsys import Derivation, Step

    d, _ = combine_yields_fixture()
    steps = d.steps
    out = []

    def with_step(k, step):
        new = list(steps)
        new[k] = step
        return Derivation(new)

    mp = [k for k, s in enumerate(steps) if s.kind == "MP"]
    for k in mp[:: max(1, len(mp) // 7)][:7]:
        i, j = steps[k].refs
        out.append((f"swap MP indices at step {k + 1}",
                    with_step(k, dataclasses.replace(steps[k], refs=(j, i)))))

    wrong = {"K": "S", "S": "K", "AndI": "AndE1", "AndE1": "AndE2", "AndE2": "AndE1",
             "OrI1": "OrI2", "OrI2": "OrI1", "OrE": "OrI1", "Trans": "RConj",
             "RConj": "LDisj", "LDisj": "Trans"}
    axioms = [k for k, s in enumerate(steps) if s.kind == "axiom"]
    picked, seen = [], set()
    for k in axioms:  # prefer variety in the misused schema
        if steps[k].schema not in seen:
            picked.append(k)
            seen.add(steps[k].schema)
    for k in picked[:7]:
        out.append((f"claim {wrong[steps[k].schema]} for {steps[k].schema} at step {k + 1}",
                    with_step(k, dataclasses.replace(steps[k], schema=wrong[steps[k].schema]))))

    breaches = [("DDN", "~~?p1 -> ?p1"), ("DDN", "~~(q1 // q2) -> q1 // q2"),
                ("Split", "(?r -> q1 // q2) -> (?r -> q1) // (?r -> q2)"),
                ("Split", "(p1 // p2 -> q1 // r) -> (p1 // p2 -> q1) // (p1 // p2 -> r)"),
                ("DDN", "~~(p1 & ?q2) -> p1 & ?q2"),
                ("Split", "(q2 & ?p2 -> r // p1) -> (q2 & ?p2 -> r) // (q2 & ?p2 -> p1)")]
    for (schema, text), k in zip(breaches, axioms[1::3]):
        out.append((f"{schema} with a non-declarative at step {k + 1}",
                    with_step(k, Step(parse(text), "axiom", schema=schema))))
    assert len(out) == 20
    return out
