"""Instantial neighborhood logic and its translations to and from InqML.

INL formulas: atoms, ``!`` (negation), ``&`` and ``box(r1, ..., rn ; s)``
with n >= 0.  ``box(r1..rn; s)`` is true at w when some neighborhood of w
makes s true everywhere and each ri true somewhere.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .errors import FormulaSyntaxError, NonDeclarativeError, UnknownAtomError
from .formula import (BOT, Atom, Bottom, Conj, Formula, Impl, Odot, Yields,
                      atoms_of, big_inqdisj, diamond_odot, is_declarative, modal_depth,
                      neg, resolutions)
from .model import NeighborhoodModel

__all__ = ["InlFormula", "InlAtom", "InlNeg", "InlConj", "InlBox", "parse_inl", "print_inl",
           "inl_truth", "inl_truth_mask", "inl_size", "translate_star", "translate_costar",
           "CostarResult"]


class InlFormula:
    def __str__(self):
        return print_inl(self)


@dataclass(frozen=True)
class InlAtom(InlFormula):
    name: str


@dataclass(frozen=True)
class InlNeg(InlFormula):
    arg: InlFormula


@dataclass(frozen=True)
class InlConj(InlFormula):
    left: InlFormula
    right: InlFormula


@dataclass(frozen=True)
class InlBox(InlFormula):
    instances: tuple
    scope: InlFormula

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))


def inl_size(f: InlFormula) -> int:
    if isinstance(f, InlAtom):
        return 1
    if isinstance(f, InlNeg):
        return 1 + inl_size(f.arg)
    if isinstance(f, InlConj):
        return 1 + inl_size(f.left) + inl_size(f.right)
    return 1 + sum(inl_size(r) for r in f.instances) + inl_size(f.scope)


# -- text ---------------------------------------------------------------

_INL_TOKEN = re.compile(r"(?P<ws>\s+)|(?P<kw>box)(?![a-zA-Z0-9_])|(?P<ident>[a-z][a-zA-Z0-9_]*)"
                        r"|(?P<op>[!&(),;])")


def _inl_tokens(text):
    out, pos = [], 0
    while pos < len(text):
        m = _INL_TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unknown token {text[pos]!r}", pos, text)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse_inl(text: str) -> InlFormula:
    toks = _inl_tokens(text)
    i = 0

    def peek():
        return toks[i]

    def take(value=None):
        nonlocal i
        tok = toks[i]
        if value is not None and tok[1] != value:
            raise FormulaSyntaxError(f"expected {value!r}", tok[2], text)
        i += 1
        return tok

    def conj():
        f = unary()
        while peek()[1] == "&":
            take()
            f = InlConj(f, unary())
        return f

    def unary():
        kind, value, pos = peek()
        if value == "!":
            take()
            return InlNeg(unary())
        if kind == "ident":
            take()
            return InlAtom(value)
        if kind == "kw":
            take()
            take("(")
            instances = []
            if peek()[1] != ";":
                instances.append(conj())
                while peek()[1] == ",":
                    take()
                    instances.append(conj())
            take(";")
            scope = conj()
            take(")")
            return InlBox(tuple(instances), scope)
        if value == "(":
            take()
            f = conj()
            take(")")
            return f
        if kind == "end":
            raise FormulaSyntaxError("unexpected end of input", pos, text)
        raise FormulaSyntaxError(f"unexpected {value!r}", pos, text)

    f = conj()
    if peek()[0] != "end":
        raise FormulaSyntaxError(f"unexpected {peek()[1]!r}", peek()[2], text)
    return f


def print_inl(f: InlFormula) -> str:
    def go(g, top):
        if isinstance(g, InlAtom):
            return g.name
        if isinstance(g, InlNeg):
            return "!" + go(g.arg, False)
        if isinstance(g, InlConj):
            left = go(g.left, True)
            right = go(g.right, False)
            text = f"{left} & {right}"
            return text if top else f"({text})"
        inst = ", ".join(go(r, True) for r in g.instances)
        inner = f"{inst} ; {go(g.scope, True)}" if inst else f"; {go(g.scope, True)}"
        return f"box({inner})"
    return go(f, True)


# -- semantics ----------------------------------------------------------

def inl_truth_mask(m: NeighborhoodModel, f: InlFormula, memo: dict | None = None) -> int:
    memo = {} if memo is None else memo
    hit = memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, InlAtom):
        try:
            out = m.atom_masks[f.name]
        except KeyError:
            raise UnknownAtomError(f"atom {f.name!r} is not in the model's signature") from None
    elif isinstance(f, InlNeg):
        out = m.full_mask & ~inl_truth_mask(m, f.arg, memo)
    elif isinstance(f, InlConj):
        out = inl_truth_mask(m, f.left, memo) & inl_truth_mask(m, f.right, memo)
    else:
        scope = inl_truth_mask(m, f.scope, memo)
        inst = [inl_truth_mask(m, r, memo) for r in f.instances]
        out = 0
        for i, fam in enumerate(m.sigma_masks):
            if any(s & ~scope == 0 and all(s & r for r in inst) for s in fam):
                out |= 1 << i
    memo[f] = out
    return out


def inl_truth(m: NeighborhoodModel, w: str, f: InlFormula) -> bool:
    return bool(inl_truth_mask(m, f) >> m.world_index(w) & 1)


# -- translations -------------------------------------------------------

def translate_star(f: InlFormula) -> Formula:
    """INL to declarative InqML, preserving truth at every world."""
    if isinstance(f, InlAtom):
        return Atom(f.name)
    if isinstance(f, InlNeg):
        return neg(translate_star(f.arg))
    if isinstance(f, InlConj):
        return Conj(translate_star(f.left), translate_star(f.right))
    scope = translate_star(f.scope)
    if not f.instances:
        return diamond_odot(scope)
    return neg(Yields(scope, big_inqdisj([neg(translate_star(r)) for r in f.instances])))


def _inl_conj(items: Sequence[InlFormula]) -> InlFormula:
    out = items[0]
    for g in items[1:]:
        out = InlConj(out, g)
    return out


@dataclass
class CostarResult:
    formula: InlFormula
    size: int
    calls: list


def translate_costar(f: Formula, signature: Sequence[str] | None = None,
                     trace: list | None = None) -> InlFormula:
    """Declarative InqML to INL, preserving truth at every world.

    Bottom becomes ``p & !p`` for the first signature atom.  Implications
    into bottom translate as plain negation, which is equivalent to the
    general clause and keeps output small.  When ``trace`` is a list, each
    recursive call appends a (caller, callee) pair of InqML formulas.
    """
    if not is_declarative(f):
        raise NonDeclarativeError("costar translation needs a declarative")
    if signature:
        first = signature[0]
    else:
        names = atoms_of(f)
        first = names[0] if names else "p"
    bot_star = InlConj(InlAtom(first), InlNeg(InlAtom(first)))
    memo: dict = {}

    def call(parent, child):
        if trace is not None:
            trace.append((parent, child))
        return go(child)

    def go(g):
        hit = memo.get(g)
        if hit is not None:
            return hit
        if isinstance(g, Atom):
            out = InlAtom(g.name)
        elif isinstance(g, Bottom):
            out = bot_star
        elif isinstance(g, Conj):
            out = InlConj(call(g, g.left), call(g, g.right))
        elif isinstance(g, Impl):
            if g.right is BOT:
                out = InlNeg(call(g, g.left))
            else:
                out = InlNeg(InlConj(call(g, g.left), InlNeg(call(g, g.right))))
        elif isinstance(g, Odot):
            out = InlBox((), bot_star)
        elif isinstance(g, Yields):
            betas = [InlNeg(call(g, b)) for b in resolutions(g.right)]
            out = _inl_conj([InlNeg(InlBox(tuple(betas), call(g, a)))
                             for a in resolutions(g.left)])
        else:
            raise NonDeclarativeError(f"unexpected term {g!r}")
        memo[g] = out
        return out

    return go(f)


def costar_with_size(f: Formula, signature: Sequence[str] | None = None) -> CostarResult:
    calls: list = []
    out = translate_costar(f, signature, calls)
    return CostarResult(out, inl_size(out), calls)


def precedes(a: Formula, b: Formula) -> bool:
    """The well-founded order used by costar: lower modal depth, or same depth and proper subterm."""
    da, db = modal_depth(a), modal_depth(b)
    if da != db:
        return da < db
    from .formula import subformulas
    return a is not b and a in set(subformulas(b))
