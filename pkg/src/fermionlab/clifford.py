"""Rank-r Clifford algebra acting on the exterior algebra of Z^r.

Basis vectors of the module F(r) = ⊕_d Λ^d(Z^r) are labeled by subsets of
[r] = {0, ..., r-1}, stored as bitmasks.  The generator q_i is left wedge
with v_i, p_i is left contraction; both keep the wedge factors ascending
and fold the resulting Koszul sign into the coefficient, so every vector
has a canonical sparse form {mask: int}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .intlinalg import IntMatrix, intersect_kernels

FULL = lambda r: (1 << r) - 1  # noqa: E731


def subset_len(mask):
    return mask.bit_count()


def subset_weight(mask):
    """Sum of the positions of the set bits."""
    w = 0
    i = 0
    while mask:
        if mask & 1:
            w += i
        mask >>= 1
        i += 1
    return w


def subset_members(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def subset_from_members(members):
    m = 0
    for i in members:
        m |= 1 << i
    return m


def subsets(r):
    return range(1 << r)


def reflect_subset(mask, r):
    """{r-1-i | i in I}; the partner of partition complement under iota."""
    out = 0
    for i in range(r):
        if mask >> i & 1:
            out |= 1 << (r - 1 - i)
    return out


def sign_below(mask, i):
    """(-1)^(number of set bits strictly below position i)."""
    return -1 if (mask & ((1 << i) - 1)).bit_count() & 1 else 1


def wedge(i, mask):
    """q_i on a basis mask: (sign, new_mask) or None if v_i already present."""
    bit = 1 << i
    if mask & bit:
        return None
    return sign_below(mask, i), mask | bit


def contract(i, mask):
    """p_i on a basis mask: (sign, new_mask) or None if v_i absent."""
    bit = 1 << i
    if not mask & bit:
        return None
    return sign_below(mask, i), mask & ~bit


def apply_generator(kind, i, vec, r):
    """Apply p_i (kind 'p') or q_i (kind 'q') to a sparse vector {mask: int}."""
    if not 0 <= i < r:
        raise IndexError(f"generator index {i} out of range for rank {r}")
    act = contract if kind == "p" else wedge
    out = {}
    for mask, c in vec.items():
        hit = act(i, mask)
        if hit is None:
            continue
        s, m2 = hit
        w = out.get(m2, 0) + s * c
        if w:
            out[m2] = w
        else:
            del out[m2]
    return out


def ordered_word(mask, kind):
    """Generator sequence of p_I / q_I in application order (first acts first).

    For I = (a_0 < ... < a_k):  p_I = p_{a_k} ... p_{a_0}  applies a_0 first,
    and q_I = q_{a_0} ... q_{a_k} applies a_k first; p_∅ = q_∅ = 1.
    """
    members = subset_members(mask)
    if kind == "p":
        return [("p", i) for i in members]
    if kind == "q":
        return [("q", i) for i in reversed(members)]
    raise ValueError(f"kind must be 'p' or 'q', got {kind!r}")


def apply_word(word, vec, r):
    for kind, i in word:
        vec = apply_generator(kind, i, vec, r)
    return vec


def generator_matrix(kind, i, r):
    """2^r x 2^r matrix of p_i or q_i on the mask basis of F(r)."""
    n = 1 << r
    act = contract if kind == "p" else wedge
    m = IntMatrix(n, n)
    for mask in range(n):
        hit = act(i, mask)
        if hit is not None:
            s, m2 = hit
            m.cols[mask] = {m2: s}
    return m


def word_matrix(mask, kind, r):
    out = IntMatrix.identity(1 << r)
    for k, i in ordered_word(mask, kind):
        out = generator_matrix(k, i, r) @ out
    return out


def standard_generators(r):
    """All generator matrices: (p_0..p_{r-1}, q_0..q_{r-1})."""
    ps = [generator_matrix("p", i, r) for i in range(r)]
    qs = [generator_matrix("q", i, r) for i in range(r)]
    return ps, qs


# -- relation checking ---------------------------------------------------


@dataclass
class RelationReport:
    """Outcome of checking the Clifford relations on explicit operators."""

    rank: int
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {
            "rank": self.rank,
            "ok": self.ok,
            "violations": [list(v) for v in self.violations],
        }


def check_clifford_matrices(ps, qs, dim):
    """Check the full set of Cl(r) relations for explicit operator matrices.

    Relation families reported: p_square, q_square, p_anticommute,
    q_anticommute, pq_delta.  Each violation is (family, i, j).
    """
    r = len(ps)
    ident = IntMatrix.identity(dim)
    zero = IntMatrix.zero(dim, dim)
    rep = RelationReport(rank=r)
    for i in range(r):
        if not (ps[i] @ ps[i]) == zero:
            rep.violations.append(("p_square", i, i))
        if not (qs[i] @ qs[i]) == zero:
            rep.violations.append(("q_square", i, i))
    for i in range(r):
        for j in range(i + 1, r):
            if not (ps[i] @ ps[j] + ps[j] @ ps[i]) == zero:
                rep.violations.append(("p_anticommute", i, j))
            if not (qs[i] @ qs[j] + qs[j] @ qs[i]) == zero:
                rep.violations.append(("q_anticommute", i, j))
    for i in range(r):
        for j in range(r):
            want = ident if i == j else zero
            if not (ps[i] @ qs[j] + qs[j] @ ps[i]) == want:
                rep.violations.append(("pq_delta", i, j))
    return rep


def check_relations(r):
    """Check the defining relations of the standard spin action at rank r."""
    if r < 1:
        raise ValueError("rank must be >= 1")
    ps, qs = standard_generators(r)
    return check_clifford_matrices(ps, qs, 1 << r)


def completeness_identity(r):
    """Whether sum_I q_I p_[r] q_[r] p_I acts as the identity on F(r)."""
    n = 1 << r
    full = FULL(r)
    mid = word_matrix(full, "p", r) @ word_matrix(full, "q", r)
    total = IntMatrix.zero(n, n)
    for mask in subsets(r):
        total = total + word_matrix(mask, "q", r) @ mid @ word_matrix(mask, "p", r)
    return total == IntMatrix.identity(n)


def restriction_identities(r):
    """Check that p_[r]q_[r] is the identity on ∩ker(p_i), and q_[r]p_[r]
    on ∩ker(q_i), as exact matrix statements on kernel bases."""
    ps, qs = standard_generators(r)
    full = FULL(r)
    pq = word_matrix(full, "p", r) @ word_matrix(full, "q", r)
    qp = word_matrix(full, "q", r) @ word_matrix(full, "p", r)
    kp = intersect_kernels(ps)
    kq = intersect_kernels(qs)
    return (pq @ kp == kp) and (qp @ kq == kq)


# -- induced-module recognition ------------------------------------------


@dataclass
class SpinFactorization:
    """V ≅ W ⊗ F(r) for a verified Cl(r)-action on V.

    ``w_basis`` columns span W = ∩ker(p_i) inside V; ``iso`` maps
    W ⊗ F(r) → V by w ⊗ v_I ↦ q_I w, with tensor column (I, j) at index
    I * rank(W) + j; ``inv`` is its integer inverse.
    """

    w_basis: IntMatrix
    iso: IntMatrix
    inv: IntMatrix


def tensor_index(mask, j, rank_w):
    return mask * rank_w + j


def spin_factorize(ps, qs, dim):
    """Factor a Cl(r)-module as W ⊗ F(r) per the kernel-of-contractions W.

    The operators must satisfy the Cl(r) relations on V (checked).  The
    inverse is built by peeling one generator index at a time, using the
    rank-one inverse v ↦ p v ⊗ v_{i} + p q v ⊗ v_∅ at each stage, and is
    verified to be a two-sided integer inverse of the forward map.
    """
    rep = check_clifford_matrices(ps, qs, dim)
    if not rep.ok:
        raise ValueError(f"operators do not satisfy the Clifford relations: {rep.violations}")
    r = len(ps)
    w_basis = intersect_kernels(ps) if r else IntMatrix.identity(dim)
    rank_w = w_basis.ncols

    # Forward map on the tensor basis.
    cols = []
    for mask in subsets(r):
        word = ordered_word(mask, "q")
        for j in range(rank_w):
            vec = {i: v for i, v in enumerate(w_basis.column(j)) if v}
            for kind, gi in word:
                vec = _apply_matrix_word(qs[gi], vec)
            cols.append([vec.get(i, 0) for i in range(dim)])
    iso = IntMatrix.from_columns(dim, cols)
    if iso.nrows != iso.ncols:
        raise ValueError(
            f"module rank {dim} is not 2^{r} * rank(W) = {(1 << r) * rank_w}; "
            "the action is not induced from its contraction kernel")

    inv = _peel_inverse(ps, qs, dim)
    n = iso.ncols
    if not (inv @ iso == IntMatrix.identity(n) and iso @ inv == IntMatrix.identity(n)):
        raise ValueError("factorization is not bijective over the integers")
    return SpinFactorization(w_basis=w_basis, iso=iso, inv=inv)


def _apply_matrix_word(mat, vec):
    return mat.apply(vec)


def _peel_inverse(ps, qs, dim):
    """Inverse of w ⊗ v_I ↦ q_I w by peeling the smallest generator index.

    In the ascending word q_I = q_{a_0} ... q_{a_k} the smallest index is the
    leftmost factor, i.e. the last one applied, so splitting it off first
    keeps the recursion sign-free: v ↦ p_0 q_0 v ⊗ v_∅ + p_0 v ⊗ v_{0}.
    """
    r = len(ps)
    if r == 0:
        return IntMatrix.identity(dim)
    p0, q0 = ps[0], qs[0]
    # W1 = ker(p_0) = image of the idempotent p_0 q_0; its saturated basis.
    k1 = p0.kernel()
    rank1 = k1.ncols
    lower = k1.solve(p0 @ q0)   # component on v_∅ in the index-0 factor
    upper = k1.solve(p0)        # component on v_{0}
    if lower is None or upper is None:
        raise ValueError("contraction images do not lie in the kernel lattice")
    # Operators of the remaining indices restricted to W1.
    ps1 = [k1.solve(ps[i] @ k1) for i in range(1, r)]
    qs1 = [k1.solve(qs[i] @ k1) for i in range(1, r)]
    if any(m is None for m in ps1 + qs1):
        raise ValueError("operators do not restrict to the kernel lattice")
    sub = _peel_inverse(ps1, qs1, rank1)  # W1 -> W ⊗ F(r-1) coordinates
    out = IntMatrix.zero(dim, dim)
    rank_w = rank1 >> (r - 1)
    for bit0, comp in ((0, lower), (1, upper)):
        coords = sub @ comp
        for i, j, v in coords.entries():
            mask_sub, jw = divmod(i, rank_w)
            mask = (mask_sub << 1) | bit0
            out._add_entry(tensor_index(mask, jw, rank_w), j, v)
    return out


# -- Hodge star ------------------------------------------------------------


def hodge_sign(mask, r):
    """Sign s_I fixed by v_I ∧ v_{[r]∖I} = s_I v_{[r]}.

    Equals the parity of the inversion count of the shuffle (I, [r]∖I):
    pairs (a, b) with a ∈ I, b ∉ I, a > b.
    """
    comp = FULL(r) & ~mask
    inv = 0
    for a in subset_members(mask):
        inv += subset_len(comp & ((1 << a) - 1))
    return -1 if inv & 1 else 1


def hodge_star(vec, r):
    """v_I ↦ s_I v_{[r]∖I}; an integral bijection of F(r)."""
    full = FULL(r)
    return {full & ~mask: hodge_sign(mask, r) * c for mask, c in vec.items()}


def hodge_matrix(r):
    n = 1 << r
    full = FULL(r)
    m = IntMatrix(n, n)
    for mask in range(n):
        m.cols[mask] = {full & ~mask: hodge_sign(mask, r)}
    return m
