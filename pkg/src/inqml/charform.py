"""Characteristic formulas for worlds and states, and class-defining formulas.

The clause for chi^(n+1) negates pi^n for every state with no n-bisimilar
neighborhood at the world.  Over all abstract models that is an infinite
quantification; here it ranges over one representative of each n-class of
neighborhoods occurring in a declared pool of models.  For worlds and
states inside the pool this gives exactly the biconditionals
``w |= chi^n(w')  iff  w ~n w'`` and
``w |= pi^n(s')  iff  some neighborhood of w is ~n s'``.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .bisim import stratified_bisim
from .errors import SignatureMismatchError, SizingError
from .formula import (BOT, ODOT, Atom, Formula, Yields, big_conj, big_disj,
                      big_inqdisj, canonical_sorted, neg)
from .model import NeighborhoodModel, bits, disjoint_union

__all__ = ["CharacteristicFormulas", "chi_world", "pi_state", "chi_state",
           "class_formula", "ATOM_CAP", "DEPTH_CAP", "POOL_CAP"]

ATOM_CAP = 2
DEPTH_CAP = 2
POOL_CAP = 64


class CharacteristicFormulas:
    """Characteristic formulas relative to a pool of models.

    ``max_depth`` is the largest n that will be requested; the bisimulation
    layers of the pool are computed once up to it.
    """

    def __init__(self, pool: Sequence[NeighborhoodModel], signature: Sequence[str] | None = None,
                 max_depth: int = DEPTH_CAP, atom_cap: int = ATOM_CAP,
                 depth_cap: int = DEPTH_CAP, pool_cap: int = POOL_CAP):
        pool = list(pool)
        if not pool:
            raise ValueError("the model pool is empty")
        sig = tuple(signature) if signature is not None else pool[0].atoms
        for m in pool:
            if set(m.atoms) != set(sig):
                raise SignatureMismatchError(
                    f"pool model signature {list(m.atoms)} differs from {list(sig)}")
        if not sig:
            raise SignatureMismatchError("characteristic formulas need a nonempty signature")
        if len(sig) > atom_cap:
            raise SizingError(f"signature has {len(sig)} atoms (cap {atom_cap})")
        if max_depth > depth_cap:
            raise SizingError(f"depth {max_depth} exceeds the cap {depth_cap}")
        self.pool = pool
        self.signature = sig
        self.max_depth = max_depth
        self.pool_cap = pool_cap
        self.union, renames = disjoint_union(pool)
        self._offsets = {}
        offset = 0
        for m in pool:
            self._offsets.setdefault(id(m), offset)
            offset += m.size
        u = self.union
        self.empty_mode = any(m.allow_empty for m in pool) or any(
            0 in fam for fam in u.sigma_masks)
        z = stratified_bisim(u, u, max_depth)
        # class id of each world at each layer: the least related world index
        self.classes = []
        for n in range(max_depth + 1):
            rows = z.rows(n)
            self.classes.append(tuple((row & -row).bit_length() - 1 for row in rows))
        self._reps = {}
        self._chi = {}
        self._pi = {}

    # -- locating points -----------------------------------------------

    def _offset(self, m: NeighborhoodModel) -> int:
        try:
            return self._offsets[id(m)]
        except KeyError:
            raise ValueError("model is not part of the characteristic-formula pool") from None

    def world_index(self, m: NeighborhoodModel, w: str) -> int:
        return self._offset(m) + m.world_index(w)

    def state_mask(self, m: NeighborhoodModel, s: Iterable[str]) -> int:
        return m.state_mask(s) << self._offset(m)

    def _check_depth(self, n: int):
        if n < 0 or n > self.max_depth:
            raise SizingError(f"depth {n} outside 0..{self.max_depth} for this pool")

    # -- classes -------------------------------------------------------

    def state_class(self, mask: int, n: int) -> frozenset:
        cls = self.classes[n]
        return frozenset(cls[i] for i in bits(mask))

    def representatives(self, n: int) -> list[int]:
        """One pool neighborhood per n-class of nonempty pool neighborhoods."""
        reps = self._reps.get(n)
        if reps is None:
            seen = {}
            for fam in self.union.sigma_masks:
                for s in fam:
                    if s:
                        seen.setdefault(self.state_class(s, n), s)
            if len(seen) > self.pool_cap:
                raise SizingError(
                    f"pool has {len(seen)} neighborhood classes at depth {n} "
                    f"(cap {self.pool_cap}); the next formula would carry about "
                    f"{len(seen)} negated conjuncts per world")
            reps = list(seen.values())
            self._reps[n] = reps
        return reps

    # -- formulas ------------------------------------------------------

    def chi0(self, i: int) -> Formula:
        u = self.union
        lits = []
        for a in self.signature:
            lits.append(Atom(a) if u.atom_masks[a] >> i & 1 else neg(Atom(a)))
        return big_conj(lits)

    def chi(self, i: int, n: int) -> Formula:
        self._check_depth(n)
        key = (n, self.classes[n][i])
        out = self._chi.get(key)
        if out is not None:
            return out
        if n == 0:
            out = self.chi0(i)
        else:
            fam = self.union.sigma_masks[i]
            mine = {self.state_class(s, n - 1) for s in fam if s}
            pis = canonical_sorted(self.pi(s, n - 1) for s in fam if s)
            missing = canonical_sorted(
                neg(self.pi(r, n - 1)) for r in self.representatives(n - 1)
                if self.state_class(r, n - 1) not in mine)
            parts = [self.chi0(i)] + pis + missing
            if self.empty_mode:
                parts.append(ODOT if 0 in self.union.sigma_sets[i] else neg(ODOT))
            out = big_conj(parts)
        self._chi[key] = out
        return out

    def pi(self, mask: int, n: int) -> Formula:
        if mask == 0:
            raise ValueError("pi is defined for nonempty states only")
        self._check_depth(n)
        key = (n, self.state_class(mask, n))
        out = self._pi.get(key)
        if out is None:
            chis = canonical_sorted(self.chi(i, n) for i in bits(mask))
            out = neg(Yields(big_disj(chis), big_inqdisj([neg(c) for c in chis])))
            self._pi[key] = out
        return out

    def chi_of_state(self, mask: int, n: int) -> Formula:
        if mask == 0:
            return BOT
        return big_disj(canonical_sorted(self.chi(i, n) for i in bits(mask)))

    # -- name-level API ------------------------------------------------

    def chi_world(self, m, w, n):
        return self.chi(self.world_index(m, w), n)

    def pi_state(self, m, s, n):
        return self.pi(self.state_mask(m, s), n)

    def chi_state(self, m, s, n):
        return self.chi_of_state(self.state_mask(m, s), n)


def _pool_for(m, pool):
    if pool is None:
        return [m]
    pool = list(pool)
    if not any(p is m for p in pool):
        pool.append(m)
    return pool


def chi_world(m: NeighborhoodModel, w: str, n: int, signature=None, pool=None, **caps) -> Formula:
    cf = CharacteristicFormulas(_pool_for(m, pool), signature, max_depth=n, **caps)
    return cf.chi_world(m, w, n)


def pi_state(m: NeighborhoodModel, s, n: int, signature=None, pool=None, **caps) -> Formula:
    s = list(s)
    if not s:
        raise ValueError("pi is defined for nonempty states only")
    cf = CharacteristicFormulas(_pool_for(m, pool), signature, max_depth=n, **caps)
    return cf.pi_state(m, s, n)


def chi_state(m: NeighborhoodModel, s, n: int, signature=None, pool=None, **caps) -> Formula:
    cf = CharacteristicFormulas(_pool_for(m, pool), signature, max_depth=n, **caps)
    return cf.chi_state(m, s, n)


def class_formula(points, n: int, kind: str = "world", signature=None, pool=None,
                  **caps) -> Formula:
    """Defining formula for the class generated by ``points``.

    ``points`` is a list of (model, point) pairs.  For kind "world" the
    points are world names and the result is the classical disjunction of
    their characteristic formulas; for kind "state" the points are states
    and the result is the inquisitive disjunction of the state formulas.
    """
    points = list(points)
    if not points:
        raise ValueError("class_formula needs at least one point")
    if kind not in ("world", "state"):
        raise ValueError("kind must be 'world' or 'state'")
    models = []
    for m, _ in points:
        if not any(m is x for x in models):
            models.append(m)
    if pool is not None:
        for m in pool:
            if not any(m is x for x in models):
                models.append(m)
    cf = CharacteristicFormulas(models, signature, max_depth=n, **caps)
    if kind == "world":
        return big_disj(canonical_sorted(cf.chi_world(m, w, n) for m, w in points))
    return big_inqdisj(canonical_sorted(cf.chi_state(m, s, n) for m, s in points))
