"""r-colored Maya diagrams: basis labels of the fermionic Fock space.

A diagram assigns to every integer level m a subset I_m of [r], full for
m << 0 and empty for m >> 0.  Only the finite nontrivial window is stored;
the canonical form strips full levels from the bottom and empty levels
from the top, so equal diagrams are equal tuples.
"""

from __future__ import annotations

from .clifford import (FULL, contract, subset_len, subset_weight, wedge)


class Maya:
    """Canonical r-Maya diagram.

    ``level(m)`` is FULL(r) for m < lo, ``levels[m - lo]`` inside the
    stored window, and 0 above it.  For the pure step diagrams (full then
    empty) ``levels`` is empty and ``lo`` is the boundary.
    """

    __slots__ = ("r", "lo", "levels", "_hash")

    def __init__(self, r, lo, levels):
        full = FULL(r)
        levels = list(levels)
        while levels and levels[0] == full:
            levels.pop(0)
            lo += 1
        while levels and levels[-1] == 0:
            levels.pop()
        self.r = r
        self.lo = lo
        self.levels = tuple(levels)
        self._hash = hash((r, lo, self.levels))

    @classmethod
    def vacuum(cls, r):
        return cls(r, 1, ())

    def level(self, m):
        if m < self.lo:
            return FULL(self.r)
        if m < self.lo + len(self.levels):
            return self.levels[m - self.lo]
        return 0

    @property
    def hi(self):
        """Smallest level from which everything above is empty."""
        return self.lo + len(self.levels)

    def __eq__(self, other):
        return isinstance(other, Maya) and \
            (self.r, self.lo, self.levels) == (other.r, other.lo, other.levels)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.lo, self.levels) < (other.lo, other.levels)

    def __repr__(self):
        return f"Maya(r={self.r}, lo={self.lo}, levels={self.levels})"

    # -- gradings ---------------------------------------------------------

    def charge(self):
        r = self.r
        c = 0
        for m in range(self.lo, self.hi):
            occ = subset_len(self.level(m))
            if m > 0:
                c += occ
            else:
                c -= r - occ
        if self.lo > 1:
            c += (self.lo - 1) * r           # implicit full levels in (0, lo)
        if self.hi <= 0:
            c -= (1 - self.hi) * r           # implicit empty levels in [hi, 0]
        return c

    def weight(self):
        r = self.r
        w = 0
        for m in range(self.lo, self.hi):
            occ = subset_len(self.level(m))
            if m > 0:
                w += m * occ
            else:
                w -= m * (r - occ)
        if self.lo > 1:
            w += r * (self.lo - 1) * self.lo // 2          # sum of 1..lo-1
        if self.hi <= 0:
            w -= r * (self.hi + 0) * (1 - self.hi) // 2    # sum of hi..0
        return w

    def coho(self):
        """Cohomological degree attached to the bigrading: the level-wise
        weight defect below zero minus the weight above, plus r times the
        diagram weight."""
        r = self.r
        c2 = r * (r - 1) // 2
        total = 0
        for m in range(self.lo, self.hi):
            wt = subset_weight(self.level(m))
            if m > 0:
                total -= wt
            else:
                total += c2 - wt
        if self.lo > 1:
            total -= c2 * (self.lo - 1)      # implicit full levels above 0
        if self.hi <= 0:
            total += c2 * (1 - self.hi)      # implicit empty levels at <= 0
        return total + r * self.weight()

    def key(self):
        return (self.charge(), self.weight())

    def max_occupied(self):
        """Largest occupied level, or None for the empty-at-every-level case
        (impossible: levels are cofinitely full below)."""
        for m in range(self.hi - 1, self.lo - 1, -1):
            if self.level(m):
                return m
        return self.lo - 1

    # -- serialization -----------------------------------------------------

    def to_json(self):
        from .clifford import subset_members
        return {"r": self.r, "m_lo": self.lo,
                "levels": [subset_members(m) for m in self.levels]}

    @classmethod
    def from_json(cls, obj):
        from .clifford import subset_from_members
        return cls(obj["r"], obj["m_lo"],
                   [subset_from_members(ms) for ms in obj["levels"]])


# -- fermion action on diagrams --------------------------------------------


def koszul_sign(d, a, inclusive=False):
    """(-1)^(sum of len(I_k) over k > a); finite since levels are empty above.

    ``inclusive=True`` switches to k >= a, the rejected reading of the
    exponent; it breaks the mixed anticommutators and exists only so tests
    can demonstrate that the strict convention is the unique working one.
    """
    start = a if inclusive else a + 1
    total = 0
    for m in range(max(start, d.lo), d.hi):
        total += subset_len(d.level(m))
    if start < d.lo:
        total += (d.lo - start) * d.r
    return -1 if total & 1 else 1


def fermion_apply(kind, a, i, d, inclusive=False):
    """P_{a,i} (kind 'P') or Q_{a,i} (kind 'Q') on one diagram.

    Returns (sign, Maya) or None.  The level-a Clifford action carries its
    own internal wedge/contraction sign; the global factor is the Koszul
    sign over the levels above a.
    """
    mask = d.level(a)
    hit = contract(i, mask) if kind == "P" else wedge(i, mask)
    if hit is None:
        return None
    s, new_mask = hit
    lo = min(d.lo, a)
    hi = max(d.hi, a + 1)
    levels = [d.level(m) for m in range(lo, hi)]
    levels[a - lo] = new_mask
    return s * koszul_sign(d, a, inclusive=inclusive), Maya(d.r, lo, levels)


def shift_apply(direction, d):
    """E (direction -1) moves every level down one slot; F (+1) moves up."""
    if direction not in (-1, +1):
        raise ValueError("direction must be -1 (E) or +1 (F)")
    return Maya(d.r, d.lo + direction, d.levels)


# -- enumeration ------------------------------------------------------------


def partitions(n, max_part=None):
    """All partitions of n with parts bounded by max_part, as tuples."""
    if max_part is None:
        max_part = n
    out = []

    def rec(remaining, bound, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for part in range(min(bound, remaining), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(n, max_part, [])
    return out


def partition_count(n):
    """p(n) by direct enumeration; tests use an independent recurrence."""
    return len(partitions(n)) if n >= 0 else 0


def _color_occupied(c, lam, floor):
    """Occupied levels > floor of the 1-color diagram (charge c, partition lam)."""
    out = []
    k = 1
    for part in lam:
        out.append(c + 1 - k + part)
        k += 1
    m = c + 1 - k
    while m > floor:
        out.append(m)
        m -= 1
    return out


def _tri(c):
    return c * (c + 1) // 2


def _tri_min(total_charge, ncolors):
    """Minimal sum of staircases over ncolors integers with the given sum."""
    if ncolors == 0:
        return 0 if total_charge == 0 else 10 ** 9
    q, rem = divmod(total_charge, ncolors)
    return rem * _tri(q + 1) + (ncolors - rem) * _tri(q)


def _charge_splits(r, total, budget):
    """All (c_0..c_{r-1}) with sum total and sum of staircases <= budget."""
    out = []
    span = int((2 * budget) ** 0.5) + 2

    def rec(i, remaining_charge, used, prefix):
        if i == r - 1:
            if used + _tri(remaining_charge) <= budget:
                out.append(tuple(prefix + [remaining_charge]))
            return
        for c in range(-span, span + 1):
            t = used + _tri(c)
            if t > budget:
                continue
            rest = remaining_charge - c
            if _tri_min(rest, r - 1 - i) + t > budget:
                continue
            prefix.append(c)
            rec(i + 1, rest, t, prefix)
            prefix.pop()

    rec(0, total, 0, [])
    return out


def _compositions(n, k):
    if k == 0:
        if n == 0:
            yield ()
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def maya_basis(r, l, n, max_level=None):
    """All canonical r-Maya diagrams with charge l and weight exactly n.

    With ``max_level=M`` only diagrams whose occupied levels stay <= M are
    produced (the level-cutoff subspaces).  Deterministic order.
    """
    if n < 0:
        return []
    out = []
    for split in _charge_splits(r, l, n):
        if max_level is not None and any(c > max_level for c in split):
            continue
        base = sum(c * (c + 1) // 2 for c in split)
        extra = n - base
        if extra < 0:
            continue
        floor = min(split) - extra - 1
        for comp in _compositions(extra, r):
            per_color = []
            for c, j in zip(split, comp):
                cap = None if max_level is None else max_level - c
                if cap is not None and cap < 0:
                    per_color = None
                    break
                per_color.append(partitions(j, max_part=cap))
            if per_color is None:
                continue
            for choice in _product(per_color):
                sets = [frozenset(_color_occupied(c, lam, floor))
                        for c, lam in zip(split, choice)]
                top = max((max(s) for s in sets if s), default=floor)
                levels = []
                for m in range(floor + 1, top + 1):
                    mask = 0
                    for i in range(r):
                        if m in sets[i]:
                            mask |= 1 << i
                    levels.append(mask)
                d = Maya(r, floor + 1, levels)
                out.append(d)
    for d in out:
        assert d.key() == (l, n), (d, d.key(), (l, n))
    out.sort()
    return out


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product(lists[1:]):
            yield (head,) + tail


def min_weight(r, l, max_level=None):
    """Measured minimal weight at charge l (None if the sector is empty)."""
    n = 0
    while n <= 4 * (abs(l) + r) ** 2 + 4:
        if maya_basis(r, l, n, max_level=max_level):
            return n
        n += 1
    return None
