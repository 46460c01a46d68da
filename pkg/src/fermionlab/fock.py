"""Fermionic Fock space on r-Maya diagrams and its operator calculus.

The space is graded by (charge, weight).  Operators P_{a,i}, Q_{a,i}, E, F
act exactly on single diagrams; on a windowed truncation they become
blockwise integer matrices with overflow flags where images would leave
the stored window (see graded.py).
"""

from __future__ import annotations

from .clifford import FULL, subset_len, subset_members, subset_weight
from .graded import GradedMap, GradedModule
from .intlinalg import IntMatrix, intersect_kernels
from .maya import Maya, fermion_apply, maya_basis, shift_apply


def fock_space(r, max_level=None, name=None):
    """The full Fock space (or its level-<=m subspace) with lazy exact pieces."""
    if name is None:
        name = f"F({r})" if max_level is None else f"F({r})<= {max_level}"
    return GradedModule(
        enumerator=lambda key: maya_basis(r, key[0], key[1], max_level=max_level),
        key_of=lambda d: d.key(),
        window=lambda key: True,
        name=name)


def fock_truncation(r, charge_range, weight_bound, max_level=None):
    """Windowed truncation: charges in [lo, hi], weights in [0, bound]."""
    lo, hi = charge_range

    def window(key):
        l, n = key
        return lo <= l <= hi and 0 <= n <= weight_bound

    return GradedModule(
        enumerator=lambda key: maya_basis(r, key[0], key[1], max_level=max_level),
        key_of=lambda d: d.key(),
        window=window,
        name=f"F({r})[{lo}..{hi}]w<={weight_bound}")


def apply_fermion(kind, a, i, vec, inclusive=False):
    """Exact P_{a,i} / Q_{a,i} on a {Maya: coeff} vector."""
    out = {}
    for d, c in vec.items():
        hit = fermion_apply(kind, a, i, d, inclusive=inclusive)
        if hit is None:
            continue
        s, d2 = hit
        w = out.get(d2, 0) + s * c
        if w:
            out[d2] = w
        else:
            del out[d2]
    return out


def apply_shift(direction, vec):
    """Exact E (direction 'E') / F ('F') on a {Maya: coeff} vector."""
    step = -1 if direction == "E" else +1
    return {shift_apply(step, d): c for d, c in vec.items()}


def fermion_map(module, kind, a, i, inclusive=False):
    def act(d):
        hit = fermion_apply(kind, a, i, d, inclusive=inclusive)
        return [] if hit is None else [hit]
    return GradedMap.from_action(module, module, act, name=f"{kind}_{{{a},{i}}}")


def shift_map(module, direction):
    step = -1 if direction == "E" else +1
    return GradedMap.from_action(
        module, module, lambda d: [(1, shift_apply(step, d))], name=direction)


def ordered_fermion_word(kind, a, mask):
    """P_{a,I} / Q_{a,I} as a list of (kind, a, i) in application order.

    P_{a,I} = P_{a,d_k} ... P_{a,d_0} applies the smallest color first;
    Q_{a,I} = Q_{a,d_0} ... Q_{a,d_k} applies the largest first.
    """
    members = subset_members(mask)
    if kind == "P":
        return [("P", a, i) for i in members]
    return [("Q", a, i) for i in reversed(members)]


def apply_fermion_word(word, vec):
    for kind, a, i in word:
        vec = apply_fermion(kind, a, i, vec)
    return vec


def fermion_word_map(module, kind, a, mask):
    out = GradedMap.identity(module)
    for k, aa, i in ordered_fermion_word(kind, a, mask):
        out = fermion_map(module, k, aa, i) @ out
    return out


# -- admissible subspaces ----------------------------------------------------


def effective_p_levels(basis, m):
    """Levels a > m on which some P_{a,i} can act nontrivially."""
    top = max((d.max_occupied() for d in basis), default=m)
    return range(m + 1, top + 1)


def effective_q_levels(basis, m):
    """Levels a <= m on which some Q_{a,i} can act nontrivially."""
    bottom = min((d.lo for d in basis), default=m + 1)
    return range(bottom, m + 1)


def admissible_spaces(module, m, keys):
    """Per-key saturated bases of H_m = ∩_{a>m} ker P_{a,i} and
    K_m = ∩_{a<=m} ker Q_{a,i}.

    Kernels are computed from exact applications: constraint rows are
    indexed by all output diagrams encountered, so no truncation loss.
    """
    out = {}
    for key in keys:
        basis = module.basis(key)
        if not basis:
            out[key] = (IntMatrix.zero(0, 0), IntMatrix.zero(0, 0))
            continue
        r = basis[0].r
        h_ops = [("P", a, i) for a in effective_p_levels(basis, m) for i in range(r)]
        k_ops = [("Q", a, i) for a in effective_q_levels(basis, m) for i in range(r)]
        h_m = _joint_kernel(basis, h_ops)
        k_m = _joint_kernel(basis, k_ops)
        out[key] = (h_m, k_m)
    return out


def _joint_kernel(basis, ops):
    n = len(basis)
    mats = []
    for kind, a, i in ops:
        cols = {}
        row_index = {}
        for j, d in enumerate(basis):
            hit = fermion_apply(kind, a, i, d)
            if hit is None:
                continue
            s, d2 = hit
            ri = row_index.setdefault(d2, len(row_index))
            cols.setdefault(j, {})[ri] = s
        if row_index:
            mats.append(IntMatrix(len(row_index), n, cols))
    if not mats:
        return IntMatrix.identity(n)
    return intersect_kernels(mats)


# -- reconstruction of admissible modules -------------------------------------


def reconstruction_sign(d):
    """Compensating sign of the reconstruction word for one diagram.

    Two contributions per level a <= 0 with hole set H_a = [r] ∖ I_a:
    the Koszul crossings a * r * |H_a| picked up by the contraction block
    against the still-full levels above a, and the internal contraction
    signs wt(H_a) - |H_a|(|H_a|-1)/2 of the ordered word on a full level.
    This is the unique sign making the word send the rank-one vacuum model
    identically onto the diagram basis, which forces the intertwining of
    every P, Q, E, F (asserted in tests).
    """
    full = FULL(d.r)
    total = 0
    for a in range(d.lo, 1):
        holes = full & ~d.level(a)
        h = subset_len(holes)
        total += a * d.r * h + subset_weight(holes) - h * (h - 1) // 2
    return -1 if total & 1 else 1


def reconstruct(w_vec, d):
    """The admissible-module reconstruction of w ⊗ v_d inside the ambient space.

    Applies λ_d · ... Q_{2,I_2} Q_{1,I_1} P_{0,[r]-I_0} P_{-1,[r]-I_{-1}} ... to
    the exact vector w (levels below the diagram window act as the identity).
    """
    r = d.r
    full = FULL(r)
    vec = dict(w_vec)
    for a in range(min(d.lo, 1), 1):          # P side, deepest level first
        mask = full & ~d.level(a)
        vec = apply_fermion_word(ordered_fermion_word("P", a, mask), vec)
        if not vec:
            return {}
    for a in range(1, max(d.hi, 1)):          # Q side, upward
        mask = d.level(a)
        vec = apply_fermion_word(ordered_fermion_word("Q", a, mask), vec)
        if not vec:
            return {}
    s = reconstruction_sign(d)
    return {m: s * c for m, c in vec.items()}


class AdmissibleModel:
    """W ⊆ H_0 ∩ K_0 with the invertible operator T = Q_{0,[r]} E restricted
    to W, and the induced identification of W ⊗ F(r) with the ambient space."""

    def __init__(self, r, w_vectors):
        self.r = r
        self.w_vectors = list(w_vectors)
        self._check_membership()
        self.t_matrix = self._transfer_matrix("T")
        self.t_inv_matrix = self._transfer_matrix("Tinv")
        ident = IntMatrix.identity(len(self.w_vectors))
        if self.t_matrix @ self.t_inv_matrix != ident or \
           self.t_inv_matrix @ self.t_matrix != ident:
            raise ValueError("level-shift transfer is not invertible on W")

    def _check_membership(self):
        r = self.r
        for w in self.w_vectors:
            top = max((d.max_occupied() for d in w), default=0)
            bottom = min((d.lo for d in w), default=1)
            for i in range(r):
                for a in range(1, top + 1):
                    if apply_fermion("P", a, i, w):
                        raise ValueError(
                            f"W vector not annihilated by P_{{{a},{i}}}: not in H_0")
                for a in range(bottom, 1):
                    if apply_fermion("Q", a, i, w):
                        raise ValueError(
                            f"W vector not annihilated by Q_{{{a},{i}}}: not in K_0")

    def _apply_T(self, vec, inverse=False):
        full = FULL(self.r)
        if not inverse:
            out = apply_shift("E", vec)
            return apply_fermion_word(ordered_fermion_word("Q", 0, full), out)
        out = apply_fermion_word(ordered_fermion_word("P", 1, full), apply_shift("F", vec))
        return out

    def _transfer_matrix(self, which):
        cols = []
        for w in self.w_vectors:
            img = self._apply_T(w, inverse=(which == "Tinv"))
            cols.append(self._coords(img))
        return IntMatrix.from_columns(len(self.w_vectors), cols)

    def _coords(self, vec):
        """Coordinates of a vector lying in the span of w_vectors."""
        diagrams = sorted({d for w in self.w_vectors for d in w} | set(vec))
        idx = {d: i for i, d in enumerate(diagrams)}
        span = IntMatrix.from_columns(
            len(diagrams),
            [[w.get(d, 0) for d in diagrams] for w in self.w_vectors])
        rhs = IntMatrix.from_columns(len(diagrams), [[vec.get(d, 0) for d in diagrams]])
        sol = span.solve(rhs)
        if sol is None:
            raise ValueError("vector does not lie in the integral span of W")
        del idx
        return sol.column(0)

    def reconstruct(self, j, d):
        return reconstruct(self.w_vectors[j], d)

    def piece_matrix(self, space, l, n):
        """Matrix of the reconstruction on the (l, n) piece.

        Columns run over (diagram, W-index) pairs of W ⊗ F(r) with that key,
        rows over the ambient basis of the same key.
        """
        basis = space.basis((l, n))
        cols = []
        labels = []
        rank_w = len(self.w_vectors)
        for d in maya_basis(self.r, l, n):
            for j in range(rank_w):
                img = self.reconstruct(j, d)
                col = [0] * len(basis)
                for dd, c in img.items():
                    col[space.index((l, n), dd)] = c
                cols.append(col)
                labels.append((d, j))
        return IntMatrix.from_columns(len(basis), cols), labels
