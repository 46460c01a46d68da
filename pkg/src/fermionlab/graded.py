"""Graded free modules and degree-homogeneous operators between them.

Pieces are indexed by hashable keys (here: (charge, weight) pairs or short
tuples).  Bases are enumerated lazily and memoized; an operator is stored
blockwise, one integer matrix per source piece.  A module declares a
*window*: the region of keys it is willing to materialize.  When an
operator sends a basis vector to a label whose key falls outside the
window, the whole source piece is flagged as an overflow and excluded from
exact statements; inside the window everything is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intlinalg import IntMatrix


class GradedModule:
    """Free Z-module with lazily enumerated graded pieces.

    ``enumerator(key)`` must return the full ordered basis of the piece
    (exactly, with no truncation) whenever ``window(key)`` is true.
    ``key_of(label)`` recovers the grading of a basis label.
    """

    def __init__(self, enumerator, key_of, window=lambda key: True, name=""):
        self._enumerator = enumerator
        self.key_of = key_of
        self.window = window
        self.name = name
        self._bases = {}
        self._indexes = {}

    def basis(self, key):
        b = self._bases.get(key)
        if b is None:
            if not self.window(key):
                raise KeyError(f"piece {key} is outside the window of {self.name or 'module'}")
            b = tuple(self._enumerator(key))
            self._bases[key] = b
            self._indexes[key] = {lab: i for i, lab in enumerate(b)}
        return b

    def index(self, key, label):
        self.basis(key)
        return self._indexes[key][label]

    def rank(self, key):
        if not self.window(key):
            return None
        return len(self.basis(key))

    def vector(self, terms):
        """Split a {label: coeff} dict into per-key sparse coordinates."""
        out = {}
        for lab, c in terms.items():
            key = self.key_of(lab)
            out.setdefault(key, {})[self.index(key, lab)] = c
        return out


# Block states: a block is either an (tkey, IntMatrix) pair, ZERO, or OVERFLOW.
ZERO = "zero"
OVERFLOW = "overflow"


@dataclass(frozen=True)
class Block:
    tkey: tuple
    mat: IntMatrix


class GradedMap:
    """Degree-homogeneous operator with lazily computed exact blocks."""

    def __init__(self, src, dst, fn, name=""):
        self.src = src
        self.dst = dst
        self._fn = fn
        self.name = name
        self._cache = {}

    def block(self, key):
        """Block at a source key: Block, ZERO (exactly zero), or OVERFLOW."""
        b = self._cache.get(key)
        if b is None:
            b = self._fn(key)
            if isinstance(b, Block) and b.mat.is_zero():
                b = ZERO
            self._cache[key] = b
        return b

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_action(src, dst, apply_label, name=""):
        """Lift an exact pointwise action label -> [(coeff, out_label)].

        The action must be degree homogeneous.  A source piece whose images
        leave the destination window is flagged OVERFLOW.
        """
        def fn(key):
            basis = src.basis(key)
            if not basis:
                return ZERO
            tkey = None
            cols = {}
            for j, lab in enumerate(basis):
                col = {}
                for coeff, out in apply_label(lab):
                    if not coeff:
                        continue
                    okey = dst.key_of(out)
                    if not dst.window(okey):
                        return OVERFLOW
                    if tkey is None:
                        tkey = okey
                    elif okey != tkey:
                        raise ValueError(
                            f"inhomogeneous action {name!r}: {key} -> {tkey} and {okey}")
                    i = dst.index(okey, out)
                    col[i] = col.get(i, 0) + coeff
                col = {i: v for i, v in col.items() if v}
                if col:
                    cols[j] = col
            if tkey is None or not cols:
                return ZERO
            return Block(tkey, IntMatrix(len(dst.basis(tkey)), len(basis), cols))
        return GradedMap(src, dst, fn, name=name)

    @staticmethod
    def identity(module):
        def fn(key):
            n = module.rank(key)
            return Block(key, IntMatrix.identity(n)) if n else ZERO
        return GradedMap(module, module, fn, name="id")

    @staticmethod
    def zero(src, dst):
        return GradedMap(src, dst, lambda key: ZERO, name="0")

    # -- algebra -----------------------------------------------------------

    def __matmul__(self, inner):
        """Composition self ∘ inner (inner applied first)."""
        outer = self

        def fn(key):
            b = inner.block(key)
            if b is ZERO:
                return ZERO
            if b is OVERFLOW:
                return OVERFLOW
            a = outer.block(b.tkey)
            if a is ZERO:
                return ZERO
            if a is OVERFLOW:
                return OVERFLOW
            return Block(a.tkey, a.mat @ b.mat)
        return GradedMap(inner.src, outer.dst, fn, name=f"({outer.name}∘{inner.name})")

    def __add__(self, other):
        def fn(key):
            a = self.block(key)
            b = other.block(key)
            if OVERFLOW in (a, b):
                return OVERFLOW
            if a is ZERO:
                return b
            if b is ZERO:
                return a
            if a.tkey != b.tkey:
                raise ValueError(f"inhomogeneous sum at {key}: {a.tkey} vs {b.tkey}")
            return Block(a.tkey, a.mat + b.mat)
        return GradedMap(self.src, self.dst, fn, name=f"({self.name}+{other.name})")

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        def fn(key):
            if c == 0:
                return ZERO
            b = self.block(key)
            if b in (ZERO, OVERFLOW):
                return b
            return Block(b.tkey, b.mat.scale(c))
        return GradedMap(self.src, self.dst, fn, name=f"{c}*{self.name}")

    def commutator(self, other):
        return self @ other - other @ self

    def anticommutator(self, other):
        return self @ other + other @ self

    # -- measurement -------------------------------------------------------

    def shift(self, key):
        """Observed degree shift at a key, or None if the piece is zero/flagged."""
        b = self.block(key)
        if b in (ZERO, OVERFLOW):
            return None
        return tuple(t - s for t, s in zip(b.tkey, key))

    def apply_vector(self, terms):
        """Apply to an exact {label: coeff} dict (must stay inside windows)."""
        out = {}
        coords = self.src.vector(terms)
        for key, vec in coords.items():
            b = self.block(key)
            if b is OVERFLOW:
                raise OverflowError(f"piece {key} overflows the window")
            if b is ZERO:
                continue
            img = b.mat.apply(vec)
            basis = self.dst.basis(b.tkey)
            for i, v in img.items():
                lab = basis[i]
                w = out.get(lab, 0) + v
                if w:
                    out[lab] = w
                else:
                    del out[lab]
        return out


@dataclass
class CheckResult:
    """Per-piece outcome of an exact operator identity."""

    checked: list
    skipped: list
    failures: list

    @property
    def ok(self):
        return not self.failures

    def to_dict(self):
        return {
            "ok": self.ok,
            "checked": len(self.checked),
            "skipped_overflow": len(self.skipped),
            "failures": [list(map(list, f)) if isinstance(f, tuple) else f
                         for f in self.failures],
        }


def check_equals_scalar(op, keys, scalar):
    """Verify op == scalar * id on every key; overflowed pieces are skipped."""
    checked, skipped, failures = [], [], []
    for key in keys:
        n = op.src.rank(key)
        if n is None:
            skipped.append(key)
            continue
        b = op.block(key)
        if b is OVERFLOW:
            skipped.append(key)
            continue
        if n == 0:
            continue
        want_zero = scalar == 0
        if b is ZERO:
            ok = want_zero
        elif want_zero:
            ok = False
        else:
            ok = b.tkey == key and b.mat == IntMatrix.identity(n).scale(scalar)
        (checked if ok else failures).append(key)
    return CheckResult(checked, skipped, failures)


def check_zero(op, keys):
    return check_equals_scalar(op, keys, 0)


def check_equal(op1, op2, keys):
    """Verify op1 == op2 blockwise on the given keys."""
    return check_zero(op1 - op2, keys)
