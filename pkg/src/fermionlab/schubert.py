"""Partition combinatorics and exact Schubert calculus on Grassmannians.

Partitions are tuples of weakly decreasing positive ints.  Gr(n, d) is the
space of d-dimensional quotients of an n-space, so its Schubert basis is
the set of partitions inside the d x (n-d) box, the point class is the
full box, and the intersection pairing sends a class and the complement of
its partner to 1.  Products come from iterated single-row Pieri steps: a
general factor is expanded through the signed determinant identity into
products of single-row classes.
"""

from __future__ import annotations

from itertools import permutations

from .clifford import subset_from_members, subset_len, subset_members, \
    subset_weight
from .intlinalg import IntMatrix


def normalize(parts):
    parts = tuple(p for p in parts if p)
    if any(a < b for a, b in zip(parts, parts[1:])) or any(p < 0 for p in parts):
        raise ValueError(f"not a partition: {parts}")
    return parts


def size(lam):
    return sum(lam)


def in_box(lam, a, b):
    """Membership in B_{a,b}: at most a parts, each at most b."""
    return len(lam) <= a and all(p <= b for p in lam)


def box_partitions(a, b):
    """All partitions in B_{a,b}, deterministic order (by size, then parts)."""
    out = []

    def rec(prefix, rows_left, bound):
        out.append(tuple(prefix))
        if rows_left == 0:
            return
        for p in range(min(bound, b), 0, -1):
            prefix.append(p)
            rec(prefix, rows_left - 1, p)
            prefix.pop()

    rec([], a, b)
    return sorted(set(out), key=lambda lam: (size(lam), lam))


def transpose(lam):
    if not lam:
        return ()
    out = []
    for i in range(1, lam[0] + 1):
        out.append(sum(1 for p in lam if p >= i))
    return tuple(out)


def complement(lam, a, b):
    """(b - λ_a, ..., b - λ_1) inside B_{a,b}."""
    if not in_box(lam, a, b):
        raise ValueError(f"{lam} does not fit in B_{{{a},{b}}}")
    padded = list(lam) + [0] * (a - len(lam))
    return normalize(b - p for p in reversed(padded))


def iota(mask):
    """Subset (i_0 < ... < i_{d-1}) ↦ (i_{d-1} - (d-1) >= ... >= i_0)."""
    members = subset_members(mask)
    d = len(members)
    return normalize(members[d - 1 - t] - (d - 1 - t) for t in range(d))


def iota_inverse(lam, r, d=None):
    """The subset of [r] with iota image lam, in the length-d stratum.

    lam must fit in B_{d, r-d}; with d omitted the minimal stratum
    d = number of parts is used.
    """
    lam = normalize(lam)
    if d is None:
        d = len(lam)
    if not in_box(lam, d, r - d):
        raise ValueError(f"{lam} does not fit in B_{{{d},{r - d}}}")
    padded = list(lam) + [0] * (d - len(lam))
    members = [padded[d - 1 - t] + t for t in range(d)]
    return subset_from_members(members)


def weight_identity(mask, r):
    """wt(I) == size(iota(I)) + len(I)(len(I)-1)/2."""
    ln = subset_len(mask)
    return subset_weight(mask) == size(iota(mask)) + ln * (ln - 1) // 2


# -- products ------------------------------------------------------------------


def pieri_row(lam, k):
    """All horizontal-strip additions of k boxes (product with a row class)."""
    if k == 0:
        return [lam]
    lam = list(lam) + [0]
    out = []

    def rec(i, remaining, prefix):
        upper = (prefix[-1] if prefix else None)
        if i == len(lam):
            if remaining == 0:
                out.append(normalize(prefix))
            return
        low = lam[i]
        high = lam[i - 1] if i > 0 else lam[i] + remaining
        high = min(high, lam[i] + remaining)
        del upper
        for new in range(high, low - 1, -1):
            prefix.append(new)
            rec(i + 1, remaining - (new - lam[i]), prefix)
            prefix.pop()

    rec(0, k, [])
    return out


def pieri_column(lam, k):
    """All vertical-strip additions of k boxes (product with a column class)."""
    return [transpose(mu) for mu in pieri_row(transpose(lam), k)]


def lr_multiply(lam, mu):
    """Schur-basis product as {nu: multiplicity}.

    The factor mu is expanded by the signed determinant identity into
    sequences of single-row multiplications; every coefficient in the
    result is verified nonnegative.
    """
    lam, mu = normalize(lam), normalize(mu)
    if len(mu) > len(lam):
        lam, mu = mu, lam
    ell = len(mu)
    acc = {}
    for sigma in permutations(range(ell)):
        rows = [mu[i] - i + sigma[i] for i in range(ell)]
        if any(rw < 0 for rw in rows):
            continue
        sign = _perm_sign(sigma)
        partial = {lam: sign}
        for rw in rows:
            nxt = {}
            for nu, c in partial.items():
                for out in pieri_row(nu, rw):
                    nxt[out] = nxt.get(out, 0) + c
            partial = nxt
        for nu, c in partial.items():
            w = acc.get(nu, 0) + c
            if w:
                acc[nu] = w
            elif nu in acc:
                del acc[nu]
    if any(c < 0 for c in acc.values()):
        raise AssertionError("negative multiplicity in a Schur product")
    return acc


def _perm_sign(sigma):
    inv = sum(1 for i in range(len(sigma)) for j in range(i + 1, len(sigma))
              if sigma[i] > sigma[j])
    return -1 if inv & 1 else 1


def box_truncate(classes, a, b):
    return {nu: c for nu, c in classes.items() if in_box(nu, a, b)}


def multiply_in_grassmannian(n, d, lam, mu):
    """Product of two Schubert classes of Gr(n, d), truncated to the box."""
    return box_truncate(lr_multiply(lam, mu), d, n - d)


def grassmannian_integrate(n, d, classes):
    """Coefficient of the point class in a product of Schubert classes.

    ``classes`` is a list of partitions; returns 0 on degree mismatch.
    """
    a, b = d, n - d
    point = complement((), a, b)        # the full box (b^a)
    acc = {(): 1}
    for lam in classes:
        lam = normalize(lam)
        if not in_box(lam, a, b):
            return 0
        nxt = {}
        for nu, c in acc.items():
            for out, mult in lr_multiply(nu, lam).items():
                if in_box(out, a, b):
                    nxt[out] = nxt.get(out, 0) + c * mult
        acc = nxt
    return acc.get(point, 0)


def duality_pairing(n, d):
    """Matrix of ∫ Δ_λ Δ_{μ^c} over the box basis; expected the identity."""
    a, b = d, n - d
    basis = box_partitions(a, b)
    mat = IntMatrix(len(basis), len(basis))
    for jj, mu in enumerate(basis):
        muc = complement(mu, a, b)
        for ii, lam in enumerate(basis):
            val = grassmannian_integrate(n, d, [lam, muc])
            if val:
                mat._add_entry(ii, jj, val)
    return basis, mat


# -- determinant expansion in formal classes ------------------------------------


def jacobi_trudi(lam):
    """Δ_λ = det(c_{λ_i - i + j}) as a polynomial in the formal classes c_k.

    Returned as {sorted tuple of indices k >= 1: coefficient}; c_0 = 1 and
    negative indices vanish.  The determinant is expanded by dynamic
    programming over column subsets so partitions with up to 12 parts stay
    cheap (2^12 states instead of 12! permutation terms).
    """
    lam = normalize(lam)
    ell = len(lam)
    if ell > 12:
        raise ValueError("determinant size bound is 12 parts")
    if ell == 0:
        return {(): 1}
    # state: frozen set of used columns as a bitmask; value: polynomial
    states = {0: {(): 1}}
    for row in range(ell):
        nxt = {}
        for used, poly in states.items():
            for col in range(ell):
                bit = 1 << col
                if used & bit:
                    continue
                k = lam[row] - row + col
                if k < 0:
                    continue
                # sign of placing this column next: parity of used bits above col
                sgn = -1 if subset_len(used >> (col + 1)) & 1 else 1
                target = nxt.setdefault(used | bit, {})
                for mono, c in poly.items():
                    key = tuple(sorted(mono + (k,))) if k > 0 else mono
                    w = target.get(key, 0) + sgn * c
                    if w:
                        target[key] = w
                    elif key in target:
                        del target[key]
        states = {u: p for u, p in nxt.items() if p}
    return states.get((1 << ell) - 1, {})


def evaluate_formal(poly, row_class):
    """Evaluate a formal polynomial in the Schur basis.

    ``row_class(k)`` names the partition substituted for c_k (the row (k,)
    or the column (1^k)); products are expanded through lr_multiply.
    """
    acc = {}
    for monomial, coeff in poly.items():
        partial = {(): 1}
        for k in monomial:
            nxt = {}
            factor = normalize(row_class(k))
            for nu, c in partial.items():
                for out, mult in lr_multiply(nu, factor).items():
                    nxt[out] = nxt.get(out, 0) + c * mult
            partial = nxt
        for nu, c in partial.items():
            w = acc.get(nu, 0) + coeff * c
            if w:
                acc[nu] = w
            elif nu in acc:
                del acc[nu]
    return acc
