"""Egli-Milner lifting and (stratified) bisimulation between two models."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import PointKindError, SignatureMismatchError
from .model import NeighborhoodModel, bits

__all__ = ["em_lift", "StratifiedBisim", "stratified_bisim", "bisimilar"]


def em_lift(rel: Iterable[tuple], a: Iterable, b: Iterable) -> bool:
    """Egli-Milner lifting of ``rel`` to the pair of states (a, b)."""
    rel = set(rel)
    a, b = set(a), set(b)
    return (all(any((x, y) in rel for y in b) for x in a)
            and all(any((x, y) in rel for x in a) for y in b))


class _Rows:
    """A world relation stored as one bitmask row per left world plus columns."""

    __slots__ = ("rows", "cols")

    def __init__(self, rows, n_right):
        self.rows = tuple(rows)
        cols = [0] * n_right
        for i, row in enumerate(self.rows):
            for j in bits(row):
                cols[j] |= 1 << i
        self.cols = tuple(cols)

    def lift(self, s: int, t: int) -> bool:
        rows, cols = self.rows, self.cols
        for i in bits(s):
            if not rows[i] & t:
                return False
        for j in bits(t):
            if not cols[j] & s:
                return False
        return True


@dataclass
class StratifiedBisim:
    left: NeighborhoodModel
    right: NeighborhoodModel
    layers: list = field(default_factory=list)
    stabilized: bool = False
    _rows: list = field(default_factory=list, repr=False)

    @property
    def stabilization_index(self) -> int | None:
        """Least k with Z_k = Z_(k+1), when known."""
        return len(self.layers) - 1 if self.stabilized else None

    def _layer_index(self, n):
        if n is None:
            if not self.stabilized:
                raise ValueError("relation was not iterated to the fixpoint")
            return len(self.layers) - 1
        if n < len(self.layers):
            return n
        if self.stabilized:
            return len(self.layers) - 1
        raise ValueError(f"layer {n} was not computed")

    def relation(self, n: int | None = None) -> frozenset:
        """Z_n as a set of (left world, right world) pairs; the fixpoint for None."""
        return self.layers[self._layer_index(n)]

    def related(self, w1: str, w2: str, n: int | None = None) -> bool:
        i, j = self.left.world_index(w1), self.right.world_index(w2)
        return bool(self._rows[self._layer_index(n)].rows[i] >> j & 1)

    def lifted(self, s1: int, s2: int, n: int | None = None) -> bool:
        return self._rows[self._layer_index(n)].lift(s1, s2)

    def rows(self, n: int | None = None) -> tuple[int, ...]:
        return self._rows[self._layer_index(n)].rows


def _check_signatures(m1, m2):
    if set(m1.atoms) != set(m2.atoms):
        raise SignatureMismatchError(
            f"models have different signatures {list(m1.atoms)} and {list(m2.atoms)}")


def _refine(m1, m2, rel: _Rows) -> _Rows:
    rows = []
    for i, row in enumerate(rel.rows):
        fam1 = m1.sigma_masks[i]
        new = 0
        for j in bits(row):
            fam2 = m2.sigma_masks[j]
            if (all(any(rel.lift(s, t) for t in fam2) for s in fam1)
                    and all(any(rel.lift(s, t) for s in fam1) for t in fam2)):
                new |= 1 << j
        rows.append(new)
    return _Rows(rows, m2.size)


def stratified_bisim(m1: NeighborhoodModel, m2: NeighborhoodModel,
                     n: int | None = None) -> StratifiedBisim:
    """Compute Z_0 ... Z_n, or iterate to the greatest bisimulation when n is None.

    Iteration stops early once a layer repeats; the result is then marked
    stabilized and later layers equal the last one.
    """
    _check_signatures(m1, m2)
    atoms = m1.atoms
    rows = []
    for i in range(m1.size):
        row = 0
        for j in range(m2.size):
            if all((m1.atom_masks[a] >> i & 1) == (m2.atom_masks[a] >> j & 1) for a in atoms):
                row |= 1 << j
        rows.append(row)
    current = _Rows(rows, m2.size)
    result = StratifiedBisim(m1, m2)
    result._rows.append(current)
    limit = m1.size * m2.size + 1
    while n is None or len(result._rows) <= n:
        nxt = _refine(m1, m2, current)
        if nxt.rows == current.rows:
            result.stabilized = True
            break
        result._rows.append(nxt)
        current = nxt
        if len(result._rows) > limit + 1:
            raise AssertionError("refinement failed to stabilize")
    if not result.stabilized and n is not None:
        # one more round tells whether the last computed layer is the fixpoint
        result.stabilized = _refine(m1, m2, current).rows == current.rows
    result.layers = [
        frozenset((m1.worlds[i], m2.worlds[j]) for i, row in enumerate(r.rows) for j in bits(row))
        for r in result._rows]
    return result


def _is_world(point) -> bool:
    return isinstance(point, str)


def bisimilar(m1: NeighborhoodModel, point1, m2: NeighborhoodModel, point2,
              n: int | None = None) -> bool:
    """World or state bisimilarity; n-bisimilarity when ``n`` is given.

    A point is a world name (str) or an iterable of world names (a state);
    both points must be of the same kind.
    """
    if _is_world(point1) != _is_world(point2):
        raise PointKindError("cannot compare a world with a state")
    z = stratified_bisim(m1, m2, n)
    if _is_world(point1):
        return z.related(point1, point2, n)
    return z.lifted(m1.state_mask(point1), m2.state_mask(point2), n)
