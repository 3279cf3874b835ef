"""Formula terms of the inquisitive neighborhood language.

Terms are built from seven primitives: atoms, bottom, conjunction,
inquisitive disjunction, implication, the binary `yields` modality and the
empty-neighborhood constant.  Everything else (negation, top, declarative
disjunction, the polar question, window/kite, the counterfactual) is sugar
that is expanded on construction.

Terms are hash-consed: structurally equal terms are the same object, so
equality and hashing are identity-based and cheap.  This matters for the
evaluator, whose memo tables are keyed on (state, subformula).
"""
from __future__ import annotations

import itertools
import re
import weakref
from typing import Iterable, Iterator, Sequence

from .errors import FormulaSyntaxError, NonDeclarativeError, SizingError

__all__ = [
    "Formula", "Atom", "Bottom", "Conj", "InqDisj", "Impl", "Yields", "Odot",
    "BOT", "TOP", "ODOT", "atom", "neg", "disj", "iff", "question", "box",
    "diamond", "diamond_odot", "counterfactual", "big_conj", "big_disj",
    "big_inqdisj", "parse", "print_formula", "modal_depth", "is_declarative",
    "atoms_of", "subformulas", "size", "sort_key", "canonical_sorted",
    "resolutions", "declarative_variant", "resolutions_of_set",
    "DEFAULT_RESOLUTION_CAP",
]

_interned: "weakref.WeakValueDictionary[tuple, Formula]" = weakref.WeakValueDictionary()


class Formula:
    __slots__ = ("__weakref__", "_sortkey")
    _fields: tuple = ()
    _rank = -1

    def __new__(cls, *args):
        if len(args) != len(cls._fields):
            raise TypeError(f"{cls.__name__} takes {len(cls._fields)} arguments")
        key = (cls, *args)
        obj = _interned.get(key)
        if obj is None:
            obj = object.__new__(cls)
            for name, value in zip(cls._fields, args):
                object.__setattr__(obj, name, value)
            object.__setattr__(obj, "_sortkey", None)
            _interned[key] = obj
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("formulas are immutable")

    def __reduce__(self):
        return (type(self), tuple(getattr(self, f) for f in self._fields))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    @property
    def children(self) -> tuple:
        return tuple(getattr(self, f) for f in self._fields if f not in ("name",))

    def __repr__(self):
        args = ", ".join(repr(getattr(self, f)) for f in self._fields)
        return f"{type(self).__name__}({args})"

    def __str__(self):
        return print_formula(self, resugar=True)

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)


class Atom(Formula):
    __slots__ = ("name",)
    _fields = ("name",)
    _rank = 0

    def __new__(cls, name: str):
        if not isinstance(name, str) or not name:
            raise TypeError("atom name must be a non-empty string")
        return super().__new__(cls, name)


class Bottom(Formula):
    __slots__ = ()
    _rank = 1


class Conj(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")
    _rank = 2


class InqDisj(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")
    _rank = 3


class Impl(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")
    _rank = 4


class Yields(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")
    _rank = 5


class Odot(Formula):
    __slots__ = ()
    _rank = 6


BOT = Bottom()
ODOT = Odot()
TOP = Impl(BOT, BOT)


# -- sugar ---------------------------------------------------------------

def atom(name: str) -> Atom:
    return Atom(name)


def neg(f: Formula) -> Formula:
    return Impl(f, BOT)


def disj(a: Formula, b: Formula) -> Formula:
    """Declarative disjunction a \\/ b, i.e. ~(~a & ~b)."""
    return neg(Conj(neg(a), neg(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return Conj(Impl(a, b), Impl(b, a))


def question(f: Formula) -> Formula:
    return InqDisj(f, neg(f))


def box(f: Formula) -> Formula:
    return Yields(TOP, f)


def diamond(f: Formula) -> Formula:
    return neg(Yields(f, BOT))


def diamond_odot(f: Formula) -> Formula:
    return disj(diamond(f), ODOT)


def counterfactual(a: Formula, b: Formula) -> Formula:
    if not (is_declarative(a) and is_declarative(b)):
        raise NonDeclarativeError("counterfactual arguments must be declaratives")
    return disj(box(neg(a)), neg(Yields(Impl(a, b), neg(a))))


def _fold(op, items: Sequence[Formula], empty: Formula) -> Formula:
    items = list(items)
    if not items:
        return empty
    out = items[0]
    for f in items[1:]:
        out = op(out, f)
    return out


def big_conj(items: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; top when empty."""
    return _fold(Conj, list(items), TOP)


def big_disj(items: Iterable[Formula]) -> Formula:
    """Left-nested declarative disjunction; bot when empty."""
    return _fold(disj, list(items), BOT)


def big_inqdisj(items: Iterable[Formula]) -> Formula:
    """Left-nested inquisitive disjunction; bot when empty."""
    return _fold(InqDisj, list(items), BOT)


# -- term order ----------------------------------------------------------

def sort_key(f: Formula) -> tuple:
    key = f._sortkey
    if key is None:
        if isinstance(f, Atom):
            key = (0, f.name)
        else:
            key = (f._rank, *(sort_key(c) for c in f.children))
        object.__setattr__(f, "_sortkey", key)
    return key


def canonical_sorted(items: Iterable[Formula]) -> list[Formula]:
    """Deduplicate and order by the global term order."""
    return sorted(set(items), key=sort_key)


# -- measures ------------------------------------------------------------

def modal_depth(f: Formula) -> int:
    if isinstance(f, (Atom, Bottom)):
        return 0
    if isinstance(f, Odot):
        return 1
    if isinstance(f, Yields):
        return max(modal_depth(f.left), modal_depth(f.right)) + 1
    return max(modal_depth(f.left), modal_depth(f.right))


def is_declarative(f: Formula) -> bool:
    if isinstance(f, (Atom, Bottom, Odot, Yields)):
        return True
    if isinstance(f, InqDisj):
        return False
    return is_declarative(f.left) and is_declarative(f.right)


def subformulas(f: Formula) -> Iterator[Formula]:
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        yield g
        stack.extend(g.children)


def atoms_of(f: Formula | Iterable[Formula]) -> tuple[str, ...]:
    if isinstance(f, Formula):
        f = [f]
    names = {g.name for h in f for g in subformulas(h) if isinstance(g, Atom)}
    return tuple(sorted(names))


def size(f: Formula) -> int:
    """Number of nodes in the term tree (shared subterms counted per occurrence)."""
    if isinstance(f, (Atom, Bottom, Odot)):
        return 1
    return 1 + size(f.left) + size(f.right)


# -- parsing -------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><\+\.>|<\+>|<->|->|=>|~>|//|\\/|\[\+\]|\(\.\)|[~?&()])
  | (?P<ident>[a-z][a-zA-Z0-9_]*)
""", re.VERBOSE)

_PREFIX = {"~", "?", "[+]", "<+>", "<+.>"}
_LOW = {"->", "<->", "=>", "~>"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unknown token {text[pos]!r}", pos, text)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return FormulaSyntaxError(message, tok[2], self.text)

    def parse(self) -> Formula:
        f = self.low()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def low(self) -> Formula:
        operands = [self.inq()]
        op = None
        while self.peek()[1] in _LOW:
            tok = self.advance()
            if op is not None and tok[1] != op:
                raise self.error(f"cannot mix {op!r} and {tok[1]!r} without parentheses", tok)
            op = tok[1]
            operands.append(self.inq())
        out = operands[-1]
        for left in reversed(operands[:-1]):
            out = self._combine(op, left, out)
        return out

    def _combine(self, op, left, right):
        if op == "->":
            return Impl(left, right)
        if op == "<->":
            return iff(left, right)
        if op == "=>":
            return Yields(left, right)
        if not (is_declarative(left) and is_declarative(right)):
            raise self.error("'~>' takes declarative arguments only")
        return counterfactual(left, right)

    def _left_assoc(self, sym, sub, make):
        out = sub()
        while self.peek()[1] == sym:
            self.advance()
            out = make(out, sub())
        return out

    def inq(self):
        return self._left_assoc("//", self.decl_or, InqDisj)

    def decl_or(self):
        return self._left_assoc("\\/", self.conj, disj)

    def conj(self):
        return self._left_assoc("&", self.unary, Conj)

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if value in _PREFIX:
            self.advance()
            arg = self.unary()
            return {
                "~": neg, "?": question, "[+]": box,
                "<+>": diamond, "<+.>": diamond_odot,
            }[value](arg)
        if kind == "ident":
            self.advance()
            if value == "bot":
                return BOT
            if value == "top":
                return TOP
            return Atom(value)
        if value == "(.)":
            self.advance()
            return ODOT
        if value == "(":
            self.advance()
            f = self.low()
            if self.peek()[1] != ")":
                raise self.error("expected ')'")
            self.advance()
            return f
        if kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {value!r}")


def parse(text: str) -> Formula:
    """Parse the ASCII formula grammar into a desugared term.

    >>> parse("?p") == InqDisj(Atom("p"), Impl(Atom("p"), BOT))
    True
    """
    return _Parser(text).parse()


# -- printing ------------------------------------------------------------

_LV_LOW, _LV_INQ, _LV_OR, _LV_AND, _LV_PREFIX = range(5)


def _neg_arg(f):
    if isinstance(f, Impl) and f.right is BOT:
        return f.left
    return None


def _disj_args(f):
    inner = _neg_arg(f)
    if isinstance(inner, Conj):
        a, b = _neg_arg(inner.left), _neg_arg(inner.right)
        if a is not None and b is not None:
            return a, b
    return None


def _diamond_arg(f):
    inner = _neg_arg(f)
    if isinstance(inner, Yields) and inner.right is BOT:
        return inner.left
    return None


def _box_arg(f):
    if isinstance(f, Yields) and f.left is TOP:
        return f.right
    return None


def _counterfactual_args(f, parts):
    x, y = parts
    a = _neg_arg(_box_arg(x)) if _box_arg(x) is not None else None
    body = _neg_arg(y)
    if a is None or not isinstance(body, Yields) or not isinstance(body.left, Impl):
        return None
    if body.left.left is not a or body.right is not neg(a):
        return None
    b = body.left.right
    if is_declarative(a) and is_declarative(b):
        return a, b
    return None


def _render(f: Formula, resugar: bool) -> tuple[str, int, str | None]:
    def wrap(g, ok):
        text, level, op = _render(g, resugar)
        return text if ok(level, op) else f"({text})"

    def prefix(sym, g, space):
        arg = wrap(g, lambda lv, op: lv == _LV_PREFIX)
        return (f"{sym} {arg}" if space else f"{sym}{arg}", _LV_PREFIX, None)

    def low(sym, a, b):
        left = wrap(a, lambda lv, op: lv > _LV_LOW)
        right = wrap(b, lambda lv, op: lv > _LV_LOW or op == sym)
        return (f"{left} {sym} {right}", _LV_LOW, sym)

    def assoc(sym, level, a, b):
        left = wrap(a, lambda lv, op: lv >= level)
        right = wrap(b, lambda lv, op: lv > level)
        return (f"{left} {sym} {right}", level, None)

    if isinstance(f, Atom):
        return f.name, _LV_PREFIX, None
    if f is BOT:
        return "bot", _LV_PREFIX, None
    if f is ODOT:
        return "(.)", _LV_PREFIX, None
    if resugar:
        if f is TOP:
            return "top", _LV_PREFIX, None
        parts = _disj_args(f)
        if parts is not None:
            x, y = parts
            if y is ODOT and _diamond_arg(x) is not None:
                return prefix("<+.>", _diamond_arg(x), True)
            cf = _counterfactual_args(f, parts)
            if cf is not None:
                return low("~>", *cf)
            return assoc("\\/", _LV_OR, x, y)
        if _diamond_arg(f) is not None:
            return prefix("<+>", _diamond_arg(f), True)
        if _neg_arg(f) is not None:
            return prefix("~", _neg_arg(f), False)
        if isinstance(f, InqDisj) and f.right is neg(f.left):
            return prefix("?", f.left, False)
        if _box_arg(f) is not None:
            return prefix("[+]", _box_arg(f), True)
        if (isinstance(f, Conj) and isinstance(f.left, Impl) and isinstance(f.right, Impl)
                and f.left.left is f.right.right and f.left.right is f.right.left):
            return low("<->", f.left.left, f.left.right)
    if isinstance(f, Conj):
        return assoc("&", _LV_AND, f.left, f.right)
    if isinstance(f, InqDisj):
        return assoc("//", _LV_INQ, f.left, f.right)
    if isinstance(f, Impl):
        return low("->", f.left, f.right)
    if isinstance(f, Yields):
        return low("=>", f.left, f.right)
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula, resugar: bool = False) -> str:
    """Render a term in the ASCII grammar; ``parse`` inverts it exactly."""
    return _render(f, resugar)[0]


# -- declaratives and resolutions -------------------------------------------

DEFAULT_RESOLUTION_CAP = 4096


def _normal(f: Formula, cache: dict) -> Formula:
    # Commutative children sorted; used only as a dedup key.
    out = cache.get(f)
    if out is None:
        if isinstance(f, (Atom, Bottom, Odot)):
            out = f
        else:
            a, b = _normal(f.left, cache), _normal(f.right, cache)
            if isinstance(f, (Conj, InqDisj)) and sort_key(b) < sort_key(a):
                a, b = b, a
            out = type(f)(a, b)
        cache[f] = out
    return out


def _dedup(items: Iterable[Formula]) -> tuple[Formula, ...]:
    cache: dict = {}
    seen = set()
    out = []
    for f in items:
        key = _normal(f, cache)
        if key not in seen:
            seen.add(key)
            out.append(f)
    return tuple(out)


def resolutions(f: Formula, cap: int = DEFAULT_RESOLUTION_CAP) -> tuple[Formula, ...]:
    """The resolutions of ``f``, in canonical term order.

    The implication clause enumerates every function from the antecedent's
    resolutions to the consequent's, so the count is |R(b)| ** |R(a)|;
    SizingError is raised when that exceeds ``cap``.
    """
    return tuple(sorted(_resolutions(f, cap, {}), key=sort_key))


def _resolutions(f, cap, memo):
    if f in memo:
        return memo[f]
    if isinstance(f, (Atom, Bottom, Odot, Yields)):
        out = (f,)
    elif isinstance(f, Conj):
        out = _dedup(Conj(a, b) for a in _resolutions(f.left, cap, memo)
                     for b in _resolutions(f.right, cap, memo))
    elif isinstance(f, InqDisj):
        out = _dedup(_resolutions(f.left, cap, memo) + _resolutions(f.right, cap, memo))
    else:
        ra = _resolutions(f.left, cap, memo)
        rb = _resolutions(f.right, cap, memo)
        count = len(rb) ** len(ra)
        if count > cap:
            raise SizingError(
                f"implication has {count} resolutions (cap {cap})")
        out = _dedup(
            big_conj(Impl(a, b) for a, b in zip(ra, choice))
            for choice in itertools.product(rb, repeat=len(ra)))
    if len(out) > cap:
        raise SizingError(f"formula has {len(out)} resolutions (cap {cap})")
    memo[f] = out
    return out


def declarative_variant(f: Formula) -> Formula:
    if isinstance(f, (Atom, Bottom, Odot, Yields)):
        return f
    a, b = declarative_variant(f.left), declarative_variant(f.right)
    if isinstance(f, InqDisj):
        return disj(a, b)
    return type(f)(a, b)


def resolutions_of_set(fs: Iterable[Formula],
                       cap: int = DEFAULT_RESOLUTION_CAP) -> list[frozenset]:
    """All images of ``fs`` under a resolution function."""
    members = sorted(set(fs), key=sort_key)
    options = [resolutions(f, cap) for f in members]
    out = []
    seen = set()
    for choice in itertools.product(*options):
        image = frozenset(choice)
        if image not in seen:
            seen.add(image)
            out.append(image)
    return out
