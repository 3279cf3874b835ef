"""Random formulas and models for property tests and fuzzing.

Formula generation is fragment-aware:

    full            atoms, bot, &, ->, //, =>
    box             atoms, bot, &, ->, //, [+]
    diamond         atoms, bot, &, ->, //, <+>
    boxdiamond      atoms, bot, &, ->, //, [+], <+>
    decl_consequent like full, but the right side of => is always declarative

``depth`` bounds the nesting of connectives (sugar counts as one level).
"""
from __future__ import annotations

import random
from typing import Sequence

from .formula import BOT, ODOT, Atom, Conj, Formula, Impl, InqDisj, Yields, box, diamond
from .model import NeighborhoodModel

__all__ = ["FRAGMENTS", "random_formula", "random_model", "random_state", "random_inl"]

FRAGMENTS = ("full", "box", "diamond", "boxdiamond", "decl_consequent")


def _leaf(rng, atoms, odot):
    r = rng.random()
    if odot and r < 0.1:
        return ODOT
    if r < 0.18:
        return BOT
    return Atom(rng.choice(list(atoms)))


def random_formula(rng: random.Random, atoms: Sequence[str] = ("p", "q"), depth: int = 3,
                   fragment: str = "full", declarative: bool = False,
                   odot: bool = False, leaf_bias: float = 0.25,
                   max_modal_depth: int | None = None) -> Formula:
    """A random formula of nesting depth at most ``depth`` in ``fragment``.

    With ``declarative`` the result has no inquisitive disjunction outside
    modal arguments.  ``max_modal_depth`` caps the nesting of modalities.
    """
    if fragment not in FRAGMENTS:
        raise ValueError(f"unknown fragment {fragment!r}")

    def go(d, decl, md):
        if d <= 0 or rng.random() < leaf_bias:
            return _leaf(rng, atoms, odot and md > 0)
        ops = ["and", "imp"] + (["modal", "modal"] if md > 0 else [])
        if not decl:
            ops.append("or")
        op = rng.choice(ops)
        if op == "and":
            return Conj(go(d - 1, decl, md), go(d - 1, decl, md))
        if op == "imp":
            return Impl(go(d - 1, decl, md), go(d - 1, decl, md))
        if op == "or":
            return InqDisj(go(d - 1, False, md), go(d - 1, False, md))
        # modal arguments may be questions regardless of ``decl``
        if fragment == "box":
            return box(go(d - 1, False, md - 1))
        if fragment == "diamond":
            return diamond(go(d - 1, False, md - 1))
        if fragment == "boxdiamond":
            return rng.choice((box, diamond))(go(d - 1, False, md - 1))
        if fragment == "decl_consequent":
            return Yields(go(d - 1, False, md - 1), go(d - 1, True, md - 1))
        return Yields(go(d - 1, False, md - 1), go(d - 1, False, md - 1))

    return go(depth, declarative, depth if max_modal_depth is None else max_modal_depth)


def random_model(rng: random.Random, n_worlds: int, atoms: Sequence[str] = ("p", "q"),
                 allow_empty: bool = False, density: float = 0.25,
                 max_neighborhoods: int | None = None) -> NeighborhoodModel:
    """A random model with worlds w0.. and each candidate neighborhood kept with ``density``."""
    worlds = [f"w{i}" for i in range(n_worlds)]
    lo = 0 if allow_empty else 1
    candidates = range(lo, 1 << n_worlds)
    sigma_masks = []
    for _ in worlds:
        fam = [s for s in candidates if rng.random() < density]
        if max_neighborhoods is not None and len(fam) > max_neighborhoods:
            fam = sorted(rng.sample(fam, max_neighborhoods))
        sigma_masks.append(fam)
    atom_masks = {a: rng.randrange(1 << n_worlds) for a in atoms}
    return NeighborhoodModel.from_masks(worlds, sigma_masks, atom_masks, tuple(atoms),
                                        allow_empty)


def random_state(rng: random.Random, m: NeighborhoodModel) -> tuple[str, ...]:
    return m.state_of(rng.randrange(m.full_mask + 1))


def random_inl(rng: random.Random, atoms: Sequence[str] = ("p", "q"), depth: int = 2,
               max_instances: int = 2, leaf_bias: float = 0.25):
    """A random INL formula of modal depth at most ``depth``."""
    from .inl import InlAtom, InlBox, InlConj, InlNeg

    def go(d, md):
        if d <= 0 or rng.random() < leaf_bias:
            return InlAtom(rng.choice(list(atoms)))
        r = rng.random()
        if md > 0 and r < 0.4:
            k = rng.randint(0, max_instances)
            return InlBox(tuple(go(d - 1, md - 1) for _ in range(k)), go(d - 1, md - 1))
        if r < 0.7:
            return InlNeg(go(d - 1, md))
        return InlConj(go(d - 1, md), go(d - 1, md))

    return go(depth + 1, depth)
