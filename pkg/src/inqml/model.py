"""Finite neighborhood models, closures, frame conditions and enumeration.

Internally a state is an int bitmask over the model's world order (bit i is
world i).  The public API speaks world names; states come back as tuples of
names in world order, so equal states compare equal.
"""
from __future__ import annotations

import itertools
import json
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import (ForeignWorldError, ModelFormatError, SizingError,
                     UnknownConditionError)

__all__ = [
    "NeighborhoodModel", "closure", "check_frame_condition", "FRAME_CONDITIONS",
    "enumerate_models", "disjoint_union", "ENUMERATION_CAP", "CLOSURE_KINDS",
    "submasks", "bits", "popcount",
]


def bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


class NeighborhoodModel:
    """A finite neighborhood model.

    ``sigma`` maps each world to an iterable of neighborhoods (iterables of
    world names); ``valuation`` maps each world to the atoms true there.
    Construction never raises on semantic problems; call ``validate``.
    """

    def __init__(self, worlds: Iterable[str], sigma: Mapping, valuation: Mapping,
                 atoms: Iterable[str] | None = None, allow_empty: bool = False):
        self.worlds = tuple(worlds)
        self.sigma = {w: frozenset(frozenset(s) for s in fam) for w, fam in sigma.items()}
        self.valuation = {w: frozenset(v) for w, v in valuation.items()}
        if atoms is None:
            atoms = sorted({a for v in self.valuation.values() for a in v})
        self.atoms = tuple(atoms)
        self.allow_empty = bool(allow_empty)
        self.index = {w: i for i, w in enumerate(self.worlds)}

    # -- construction helpers ------------------------------------------

    @classmethod
    def from_masks(cls, worlds, sigma_masks, atom_masks, atoms, allow_empty=False):
        """Build from per-world neighborhood bitmasks and per-atom truth masks."""
        worlds = tuple(worlds)
        sigma = {w: [[worlds[i] for i in bits(s)] for s in sigma_masks[k]]
                 for k, w in enumerate(worlds)}
        valuation = {w: [a for a in atoms if atom_masks[a] >> k & 1]
                     for k, w in enumerate(worlds)}
        return cls(worlds, sigma, valuation, atoms, allow_empty)

    @classmethod
    def from_json(cls, data) -> "NeighborhoodModel":
        if isinstance(data, (str, bytes)):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ModelFormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ModelFormatError("model must be a JSON object")
        unknown = set(data) - {"atoms", "worlds", "valuation", "neighborhoods", "allow_empty"}
        if unknown:
            raise ModelFormatError(f"unknown keys: {sorted(unknown)}")
        try:
            worlds = data["worlds"]
            atoms = data.get("atoms")
            valuation = data.get("valuation", {})
            neighborhoods = data.get("neighborhoods", {})
            allow_empty = data.get("allow_empty", False)
        except KeyError as exc:
            raise ModelFormatError(f"missing key {exc}") from None
        if not isinstance(worlds, list) or not all(isinstance(w, str) for w in worlds):
            raise ModelFormatError("'worlds' must be a list of strings")
        if atoms is not None and (not isinstance(atoms, list)
                                  or not all(isinstance(a, str) for a in atoms)):
            raise ModelFormatError("'atoms' must be a list of strings")
        if not isinstance(valuation, dict) or not all(
                isinstance(v, list) and all(isinstance(a, str) for a in v)
                for v in valuation.values()):
            raise ModelFormatError("'valuation' must map worlds to lists of atoms")
        if not isinstance(neighborhoods, dict) or not all(
                isinstance(fam, list) and all(
                    isinstance(s, list) and all(isinstance(x, str) for x in s) for s in fam)
                for fam in neighborhoods.values()):
            raise ModelFormatError("'neighborhoods' must map worlds to lists of world lists")
        if not isinstance(allow_empty, bool):
            raise ModelFormatError("'allow_empty' must be a boolean")
        # worlds missing from the valuation have no true atoms
        full_valuation = {w: valuation.get(w, []) for w in worlds}
        full_valuation.update(valuation)
        return cls(worlds, neighborhoods, full_valuation, atoms, allow_empty)

    @classmethod
    def load(cls, path) -> "NeighborhoodModel":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ModelFormatError(f"cannot read {path}: {exc}") from exc
        return cls.from_json(text)

    def to_json(self) -> dict:
        def state_list(s):
            return [w for w in self.worlds if w in s] + sorted(x for x in s if x not in self.index)

        return {
            "atoms": list(self.atoms),
            "worlds": list(self.worlds),
            "valuation": {w: [a for a in self.atoms if a in self.valuation.get(w, ())]
                          for w in self.worlds},
            "neighborhoods": {
                w: sorted((state_list(s) for s in self.sigma.get(w, ())),
                          key=lambda lst: (len(lst), [self.index.get(x, -1) for x in lst]))
                for w in self.worlds},
            "allow_empty": self.allow_empty,
        }

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    # -- validation ----------------------------------------------------

    def validate(self) -> list[str]:
        """Return a list of human-readable violations (empty when valid)."""
        problems = []
        if len(set(self.worlds)) != len(self.worlds):
            problems.append("duplicate world names")
        if len(set(self.atoms)) != len(self.atoms):
            problems.append("duplicate atom names")
        known = set(self.worlds)
        for w in self.sigma:
            if w not in known:
                problems.append(f"neighborhoods given for unknown world {w!r}")
        for w in self.valuation:
            if w not in known:
                problems.append(f"valuation given for unknown world {w!r}")
        for w in self.worlds:
            if w not in self.valuation:
                problems.append(f"world {w!r} has no valuation entry")
            for a in sorted(self.valuation.get(w, ())):
                if a not in self.atoms:
                    problems.append(f"world {w!r} makes unknown atom {a!r} true")
            for s in sorted(self.sigma.get(w, ()), key=sorted):
                dangling = sorted(s - known)
                if dangling:
                    problems.append(
                        f"neighborhood of {w!r} mentions unknown worlds {dangling}")
                if not s and not self.allow_empty:
                    problems.append(f"empty neighborhood at {w!r} but allow_empty is false")
        return problems

    def _require_structure(self):
        known = set(self.worlds)
        if len(known) != len(self.worlds):
            raise ModelFormatError("duplicate world names")
        for w, fam in self.sigma.items():
            if w not in known:
                raise ForeignWorldError(f"neighborhoods given for unknown world {w!r}")
            for s in fam:
                if not s <= known:
                    raise ForeignWorldError(
                        f"neighborhood of {w!r} mentions unknown worlds {sorted(s - known)}")

    # -- bitmask views -------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.worlds)

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self.worlds)) - 1

    @cached_property
    def sigma_masks(self) -> tuple[tuple[int, ...], ...]:
        self._require_structure()
        return tuple(
            tuple(sorted(self.state_mask(s) for s in self.sigma.get(w, ())))
            for w in self.worlds)

    @cached_property
    def sigma_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(fam) for fam in self.sigma_masks)

    @cached_property
    def atom_masks(self) -> dict[str, int]:
        out = {a: 0 for a in self.atoms}
        for i, w in enumerate(self.worlds):
            for a in self.valuation.get(w, ()):
                if a in out:
                    out[a] |= 1 << i
        return out

    @cached_property
    def kripke_masks(self) -> tuple[int, ...]:
        out = []
        for fam in self.sigma_masks:
            u = 0
            for s in fam:
                u |= s
            out.append(u)
        return tuple(out)

    def state_mask(self, state: Iterable[str]) -> int:
        mask = 0
        for w in state:
            try:
                mask |= 1 << self.index[w]
            except KeyError:
                raise ForeignWorldError(f"world {w!r} is not in the model") from None
        return mask

    def world_index(self, w: str) -> int:
        try:
            return self.index[w]
        except KeyError:
            raise ForeignWorldError(f"world {w!r} is not in the model") from None

    def state_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.worlds[i] for i in bits(mask))

    def neighborhoods(self, w: str) -> list[tuple[str, ...]]:
        return [self.state_of(s) for s in self.sigma_masks[self.world_index(w)]]

    def underlying_kripke(self) -> dict[str, tuple[str, ...]]:
        """Successor map: each world to the union of its neighborhoods."""
        return {w: self.state_of(m) for w, m in zip(self.worlds, self.kripke_masks)}

    def with_sigma_masks(self, sigma_masks, allow_empty=None) -> "NeighborhoodModel":
        return NeighborhoodModel.from_masks(
            self.worlds, sigma_masks, self.atom_masks, self.atoms,
            self.allow_empty if allow_empty is None else allow_empty)

    # -- identity ------------------------------------------------------

    def _identity(self):
        return (self.worlds, self.atoms, self.allow_empty,
                tuple(self.sigma.get(w, frozenset()) for w in self.worlds),
                tuple(self.valuation.get(w, frozenset()) for w in self.worlds))

    def __eq__(self, other):
        if not isinstance(other, NeighborhoodModel):
            return NotImplemented
        return self._identity() == other._identity()

    def __hash__(self):
        return hash(self._identity())

    def __repr__(self):
        return (f"NeighborhoodModel(worlds={list(self.worlds)}, atoms={list(self.atoms)}, "
                f"allow_empty={self.allow_empty})")


def disjoint_union(models: Iterable[NeighborhoodModel]) -> tuple[NeighborhoodModel, list[dict]]:
    """Disjoint union of models over a shared signature.

    Worlds are renamed ``"<k>:<name>"``; the second result maps each input
    model's world names to their renamed copies.
    """
    models = list(models)
    atoms = models[0].atoms if models else ()
    worlds, sigma, valuation, renames = [], {}, {}, []
    for k, m in enumerate(models):
        ren = {w: f"{k}:{w}" for w in m.worlds}
        renames.append(ren)
        for w in m.worlds:
            worlds.append(ren[w])
            sigma[ren[w]] = [[ren[x] for x in m.state_of(s)] for s in m.sigma_masks[m.index[w]]]
            valuation[ren[w]] = [a for a in m.atoms if m.atom_masks[a] >> m.index[w] & 1]
    allow_empty = any(m.allow_empty for m in models)
    return NeighborhoodModel(worlds, sigma, valuation, atoms, allow_empty), renames


# -- closures -----------------------------------------------------------

CLOSURE_KINDS = ("up", "down", "convex", "union")


def _close_family(fam: tuple[int, ...], full: int, kind: str) -> list[int]:
    fam_set = set(fam)
    out = set(fam_set)
    nonempty = [t for t in range(1, full + 1)]
    if kind == "up":
        out |= {t for t in nonempty if any(s & ~t == 0 for s in fam)}
    elif kind == "down":
        out |= {t for t in nonempty if any(t & ~s == 0 for s in fam)}
    elif kind == "convex":
        out |= {t for t in nonempty
                if any(s & ~t == 0 for s in fam) and any(t & ~s == 0 for s in fam)}
    elif kind == "union":
        members = sorted(fam_set)
        unions = {0}
        for s in members:
            unions |= {u | s for u in unions}
        out |= {u for u in unions if u}
    else:
        raise ValueError(f"unknown closure kind {kind!r}; expected one of {CLOSURE_KINDS}")
    return sorted(out)


def closure(m: NeighborhoodModel, kind: str) -> NeighborhoodModel:
    """Close every neighborhood family under ``kind``.

    Added sets are always nonempty; an empty neighborhood already present
    is kept as is.
    """
    if kind not in CLOSURE_KINDS:
        raise ValueError(f"unknown closure kind {kind!r}; expected one of {CLOSURE_KINDS}")
    fams = [_close_family(fam, m.full_mask, kind) for fam in m.sigma_masks]
    return m.with_sigma_masks(fams)


# -- frame conditions ---------------------------------------------------

def _fail(m, w, **sets):
    out = {"world": w}
    for k, v in sets.items():
        out[k] = m.state_of(v) if isinstance(v, int) else v
    return out


def _down(m, i):
    fam = m.sigma_sets[i]
    for s in m.sigma_masks[i]:
        for t in submasks(s):
            if t and t not in fam:
                return {"s": s, "t": t}
    return None


def _fin_union(m, i):
    fam = m.sigma_sets[i]
    for s, t in itertools.product(m.sigma_masks[i], repeat=2):
        if s | t not in fam:
            return {"s": s, "t": t, "union": s | t}
    return None


def _fin_inter(m, i):
    fam = m.sigma_sets[i]
    for s, t in itertools.product(m.sigma_masks[i], repeat=2):
        if s & t not in fam:
            return {"s": s, "t": t, "intersection": s & t}
    return None


def _reflexive(m, i):
    return None if m.kripke_masks[i] >> i & 1 else {}


def _nontrivial(m, i):
    return None if m.sigma_masks[i] else {}


def _successors(m, i):
    return bits(m.kripke_masks[i])


def _decreasing(m, i):
    for j in _successors(m, i):
        for s in m.sigma_masks[j]:
            if s not in m.sigma_sets[i]:
                return {"successor": m.worlds[j], "s": s}
    return None


def _increasing(m, i):
    for j in _successors(m, i):
        for s in m.sigma_masks[i]:
            if s not in m.sigma_sets[j]:
                return {"successor": m.worlds[j], "s": s}
    return None


def _up(m, i):
    fam = m.sigma_sets[i]
    for s in m.sigma_masks[i]:
        for t in range(m.full_mask + 1):
            if s & ~t == 0 and t not in fam:
                return {"s": s, "t": t}
    return None


def _convex(m, i):
    fam = m.sigma_sets[i]
    for s, s2 in itertools.product(m.sigma_masks[i], repeat=2):
        if s & ~s2:
            continue
        for t in submasks(s2):
            if s & ~t == 0 and t not in fam:
                return {"s": s, "t": t, "s_prime": s2}
    return None


def _nonempty_subfamilies(fam):
    for r in range(1, len(fam) + 1):
        yield from itertools.combinations(fam, r)


def _full_union(m, i):
    fam = m.sigma_sets[i]
    for sub in _nonempty_subfamilies(m.sigma_masks[i]):
        u = 0
        for s in sub:
            u |= s
        if u not in fam:
            return {"family": [m.state_of(s) for s in sub], "union": u}
    return None


def _full_inter(m, i):
    fam = m.sigma_sets[i]
    for sub in _nonempty_subfamilies(m.sigma_masks[i]):
        x = m.full_mask
        for s in sub:
            x &= s
        if x not in fam:
            return {"family": [m.state_of(s) for s in sub], "intersection": x}
    return None


def _nested(m, i):
    for s, t in itertools.combinations(m.sigma_masks[i], 2):
        if s & ~t and t & ~s:
            return {"s": s, "t": t}
    return None


def _weak_centering(m, i):
    for s in m.sigma_masks[i]:
        if not s >> i & 1:
            return {"s": s}
    return None


FRAME_CONDITIONS = {
    "downward-monotonicity": _down,
    "finite-union-closure": _fin_union,
    "reflexivity": _reflexive,
    "non-triviality": _nontrivial,
    "decreasingness": _decreasing,
    "increasingness": _increasing,
    "upward-monotonicity": _up,
    "convexity": _convex,
    "finite-intersection-closure": _fin_inter,
    "full-union-closure": _full_union,
    "full-intersection-closure": _full_inter,
    "nestedness": _nested,
    "weak-centering": _weak_centering,
}

_ALIASES = {
    "down": "downward-monotonicity", "downmono": "downward-monotonicity",
    "finunion": "finite-union-closure", "refl": "reflexivity",
    "nontriv": "non-triviality", "decr": "decreasingness", "incr": "increasingness",
    "up": "upward-monotonicity", "convex": "convexity",
    "fininter": "finite-intersection-closure",
    "union": "full-union-closure", "intersection": "full-intersection-closure",
    "nested": "nestedness", "centering": "weak-centering",
}


def condition_name(cond: str) -> str:
    key = cond.strip().lower().replace("_", "-").replace(" ", "-")
    if key in FRAME_CONDITIONS:
        return key
    if key in _ALIASES:
        return _ALIASES[key]
    raise UnknownConditionError(
        f"unknown frame condition {cond!r}; known: {', '.join(FRAME_CONDITIONS)}")


def check_frame_condition(m: NeighborhoodModel, cond: str, world: str | None = None):
    """Check a frame condition at every world (or just ``world``).

    Returns ``(holds, witness)``; the witness is None when the condition
    holds, otherwise a dict naming the first violating world and sets.
    """
    check = FRAME_CONDITIONS[condition_name(cond)]
    indices = range(m.size) if world is None else [m.world_index(world)]
    for i in indices:
        bad = check(m, i)
        if bad is not None:
            return False, _fail(m, m.worlds[i], **bad)
    return True, None


# -- enumeration --------------------------------------------------------

ENUMERATION_CAP = 3


def _perm_tables(n: int, allow_empty: bool):
    """For each permutation of n worlds, maps on subset masks and family codes."""
    subsets = list(range(0 if allow_empty else 1, 1 << n))
    pos = {s: k for k, s in enumerate(subsets)}
    tables = []
    for perm in itertools.permutations(range(n)):
        def move(mask):
            out = 0
            for i in bits(mask):
                out |= 1 << perm[i]
            return out
        fam_map = []
        for code in range(1 << len(subsets)):
            new = 0
            for k in bits(code):
                new |= 1 << pos[move(subsets[k])]
            fam_map.append(new)
        tables.append((perm, fam_map))
    return subsets, tables


def enumerate_models(max_worlds: int, signature: Iterable[str] = ("p",),
                     allow_empty: bool = False) -> Iterator[NeighborhoodModel]:
    """Yield every model with 1..max_worlds worlds, once per isomorphism class.

    A model is coded as (family code per world, valuation per world); only
    the least code among all world renamings is yielded.  Worlds are named
    w0, w1, ...  The stream is ordered by world count, then by code.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    if max_worlds > ENUMERATION_CAP:
        raise SizingError(
            f"enumeration beyond {ENUMERATION_CAP} worlds is not supported "
            f"(neighborhood families are doubly exponential)")
    atoms = tuple(signature)
    for n in range(1, max_worlds + 1):
        yield from _enumerate_exact(n, atoms, allow_empty)


def _enumerate_exact(n, atoms, allow_empty):
    subsets, tables = _perm_tables(n, allow_empty)
    worlds = tuple(f"w{i}" for i in range(n))
    nval = 1 << len(atoms)
    others = tables[1:]
    for fams in itertools.product(range(1 << len(subsets)), repeat=n):
        # cheap pre-filter on the family part alone
        skip = False
        for perm, fam_map in others:
            moved = [0] * n
            for i in range(n):
                moved[perm[i]] = fam_map[fams[i]]
            if tuple(moved) < fams:
                skip = True
                break
        if skip:
            continue
        stabilizers = []
        for perm, fam_map in others:
            moved = [0] * n
            for i in range(n):
                moved[perm[i]] = fam_map[fams[i]]
            if tuple(moved) == fams:
                stabilizers.append(perm)
        sigma_masks = [[subsets[k] for k in bits(code)] for code in fams]
        for vals in itertools.product(range(nval), repeat=n):
            minimal = True
            for perm in stabilizers:
                moved = [0] * n
                for i in range(n):
                    moved[perm[i]] = vals[i]
                if tuple(moved) < vals:
                    minimal = False
                    break
            if not minimal:
                continue
            atom_masks = {a: sum(1 << i for i in range(n) if vals[i] >> k & 1)
                          for k, a in enumerate(atoms)}
            yield NeighborhoodModel.from_masks(worlds, sigma_masks, atom_masks, atoms,
                                               allow_empty)
