"""Semi-orthogonal families of integer maps and their orthogonalization.

A family assigns to every subset I of [r] a pair of maps e_I: W -> V and
f_I: V -> W with f_I e_J = δ_IJ whenever I comes after J in a chosen total
order.  The orthogonalization corrects the f's so that f_J e_I = δ_IJ holds
unconditionally; the defect operator Γ measures how far the corrected
family is from resolving the identity of V.

The second half of the module works with extended actions (operators
e, f, p_i, q_i on a bigraded module) and builds the inductively defined
negative-mode operators, plus the grading audit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .clifford import (FULL, ordered_word, sign_below, subset_len,
                       subset_members, subset_weight, subsets, tensor_index)
from .graded import GradedMap, check_equal, check_equals_scalar, check_zero
from .intlinalg import IntMatrix


# -- total orders on subsets -------------------------------------------------


def lex_key(mask):
    """Descending member sequence padded with -1: the subset lex order."""
    return tuple(reversed(subset_members(mask))) + (-1,) * 32


def lex_order(r):
    """All subsets of [r], smallest first in the padded-descending lex order."""
    return sorted(subsets(r), key=lex_key)


def weight_order(r):
    """A weight-compatible total order: by wt(I), ties broken by lex."""
    return sorted(subsets(r), key=lambda m: (subset_weight(m), lex_key(m)))


def is_weight_compatible(order):
    w = [subset_weight(m) for m in order]
    return all(a <= b for a, b in zip(w, w[1:]))


# -- families ----------------------------------------------------------------


class SemiOrthError(ValueError):
    def __init__(self, i_mask, j_mask):
        self.witness = (i_mask, j_mask)
        super().__init__(
            f"semi-orthogonality fails at pair (I, J) = "
            f"({subset_members(i_mask)}, {subset_members(j_mask)})")


@dataclass
class SemiOrthFamily:
    """Raw maps e[I]: W -> V, f[I]: V -> W with a total order on subsets."""

    r: int
    rank_w: int
    rank_v: int
    e: dict
    f: dict
    order: list

    def __post_init__(self):
        if sorted(self.order) != list(subsets(self.r)):
            raise ValueError("order must be a permutation of all subsets of [r]")

    def position(self, mask):
        return self.order.index(mask)

    def check_semiorthogonal(self):
        """Raise SemiOrthError with a witness pair on the first violation."""
        ident = IntMatrix.identity(self.rank_w)
        pos = {m: k for k, m in enumerate(self.order)}
        for i_mask in subsets(self.r):
            for j_mask in subsets(self.r):
                if pos[i_mask] < pos[j_mask]:
                    continue
                want = ident if i_mask == j_mask else IntMatrix.zero(self.rank_w, self.rank_w)
                if self.f[i_mask] @ self.e[j_mask] != want:
                    raise SemiOrthError(i_mask, j_mask)

    def to_json(self):
        labels = [str(i) for i in range(self.rank_w)]
        vlabels = [str(i) for i in range(self.rank_v)]
        key = lambda m: str(subset_members(m))  # noqa: E731
        return {
            "r": self.r,
            "rank_w": self.rank_w,
            "rank_v": self.rank_v,
            "order": [subset_members(m) for m in self.order],
            "e": {key(m): self.e[m].to_json(vlabels, labels) for m in subsets(self.r)},
            "f": {key(m): self.f[m].to_json(labels, vlabels) for m in subsets(self.r)},
        }

    @classmethod
    def from_json(cls, obj):
        from .clifford import subset_from_members
        r = obj["r"]
        key = lambda m: str(subset_members(m))  # noqa: E731
        e = {m: IntMatrix.from_json(obj["e"][key(m)]) for m in subsets(r)}
        f = {m: IntMatrix.from_json(obj["f"][key(m)]) for m in subsets(r)}
        order = [subset_from_members(ms) for ms in obj["order"]]
        return cls(r=r, rank_w=obj["rank_w"], rank_v=obj["rank_v"],
                   e=e, f=f, order=order)


@dataclass
class OrthFamily:
    """Fully orthogonalized family: f_J e_I = δ_IJ for all pairs."""

    r: int
    rank_w: int
    rank_v: int
    e: dict
    f: dict
    order: list


def orthogonalize(fam):
    """Correct the f's by the ordered product of (1 - e_J f_J) over J > I.

    Ordered products follow the convention that the factor with the largest
    order position is applied first (stands rightmost).
    """
    fam.check_semiorthogonal()
    n = fam.rank_v
    ident = IntMatrix.identity(n)
    new_f = {}
    # suffix[k] = product over positions k..end, ascending left-to-right
    suffix = ident
    for mask in reversed(fam.order):
        new_f[mask] = fam.f[mask] @ suffix
        suffix = (ident - fam.e[mask] @ fam.f[mask]) @ suffix
    out = OrthFamily(r=fam.r, rank_w=fam.rank_w, rank_v=fam.rank_v,
                     e=dict(fam.e), f=new_f, order=list(fam.order))
    _assert_orthogonal(out)
    return out


def _assert_orthogonal(orth):
    ident = IntMatrix.identity(orth.rank_w)
    zero = IntMatrix.zero(orth.rank_w, orth.rank_w)
    for i_mask in subsets(orth.r):
        for j_mask in subsets(orth.r):
            want = ident if i_mask == j_mask else zero
            got = orth.f[j_mask] @ orth.e[i_mask]
            if got != want:
                raise AssertionError(
                    f"orthogonalization failed at (I, J) = "
                    f"({subset_members(i_mask)}, {subset_members(j_mask)})")


def gamma_defect(fam):
    """Ordered product of (1 - e_J f_J) over all J; also asserts that it
    equals 1 - sum_I e_I f_I for the orthogonalized family."""
    n = fam.rank_v
    ident = IntMatrix.identity(n)
    gamma = ident
    for mask in reversed(fam.order):
        gamma = (ident - fam.e[mask] @ fam.f[mask]) @ gamma
    orth = orthogonalize(fam)
    total = IntMatrix.zero(n, n)
    for mask in subsets(fam.r):
        total = total + orth.e[mask] @ orth.f[mask]
    if gamma != ident - total:
        raise AssertionError("defect operator does not match 1 - sum e_I f_I")
    return gamma


def assemble_ehat(orth):
    """W ⊗ F(r) -> V, x ⊗ v_I ↦ e_I x; column (I, j) at I * rank_w + j."""
    cols = []
    for mask in subsets(orth.r):
        for j in range(orth.rank_w):
            cols.append(orth.e[mask].column(j))
    return IntMatrix.from_columns(orth.rank_v, cols)


def assemble_fhat(orth):
    """V -> W ⊗ F(r), y ↦ sum_I f_I y ⊗ v_I."""
    nrows = orth.rank_w << orth.r
    out = IntMatrix(nrows, orth.rank_v)
    for mask in subsets(orth.r):
        base = mask * orth.rank_w
        for i, j, v in orth.f[mask].entries():
            out._add_entry(base + i, j, v)
    return out


@dataclass
class EquivalenceReport:
    """The three equivalent characterizations of a resolving family."""

    bijective: bool
    defect_zero: bool
    clifford: bool
    defect_rank: int

    @property
    def agree(self):
        return self.bijective == self.defect_zero == self.clifford

    def to_dict(self):
        return {"bijective": self.bijective, "defect_zero": self.defect_zero,
                "clifford": self.clifford, "agree": self.agree,
                "defect_rank": self.defect_rank}


def equivalence_report(fam):
    """Evaluate the three conditions independently and report them.

    (1) the assembled W ⊗ F(r) -> V map is a bijection over Z;
    (2) the defect operator vanishes;
    (3) the operators recovered from the orthogonalized family satisfy the
        Clifford relations together with the unit/counit identities and
        reproduce e_I = q_I e, f_I = f p_I.
    """
    orth = orthogonalize(fam)
    ehat = assemble_ehat(orth)
    bij = ehat.nrows == ehat.ncols and ehat.is_unimodular()
    gamma = gamma_defect(fam)
    cond_clifford = _clifford_condition(orth)
    return EquivalenceReport(bijective=bij, defect_zero=gamma.is_zero(),
                             clifford=cond_clifford, defect_rank=gamma.rank())


class RecoveryError(ValueError):
    """The recovered operators are inconsistent with the input family."""


def _clifford_condition(orth):
    try:
        recover_pq(orth)
    except RecoveryError:
        return False
    return True


def recover_pq(orth):
    """Recover the generator action on V from an orthogonalized family.

    p_i = sum over I not containing i of (-1)^{len(I < i)} e_I f_{I ∪ i},
    q_i likewise with the roles of the wedge index swapped.  Verifies the
    Clifford relations, the unit/counit identities and the round trip
    e_I = q_I e, f_I = f p_I; raises RecoveryError on any failure.
    """
    r, n = orth.r, orth.rank_v
    ps, qs = [], []
    for i in range(r):
        bit = 1 << i
        p = IntMatrix.zero(n, n)
        q = IntMatrix.zero(n, n)
        for mask in subsets(r):
            if mask & bit:
                continue
            sgn = sign_below(mask, i)
            p = p + (orth.e[mask] @ orth.f[mask | bit]).scale(sgn)
            q = q + (orth.e[mask | bit] @ orth.f[mask]).scale(sgn)
        ps.append(p)
        qs.append(q)

    from .clifford import check_clifford_matrices
    rep = check_clifford_matrices(ps, qs, n)
    if not rep.ok:
        raise RecoveryError(f"recovered operators violate relations: {rep.violations}")

    e0, f0 = orth.e[0], orth.f[0]
    if f0 @ e0 != IntMatrix.identity(orth.rank_w):
        raise RecoveryError("counit fe != 1")
    full_word = _word_on_v(ps, "p", FULL(r), n) @ _word_on_v(qs, "q", FULL(r), n)
    if e0 @ f0 != full_word:
        raise RecoveryError("unit ef != p_[r] q_[r]")
    for i in range(r):
        if not (ps[i] @ e0).is_zero():
            raise RecoveryError("p_i e != 0")
        if not (f0 @ qs[i]).is_zero():
            raise RecoveryError("f q_i != 0")
    for mask in subsets(r):
        if orth.e[mask] != _word_on_v(qs, "q", mask, n) @ e0:
            raise RecoveryError("e_I != q_I e")
        if orth.f[mask] != f0 @ _word_on_v(ps, "p", mask, n):
            raise RecoveryError("f_I != f p_I")
    return ps, qs


def _word_on_v(mats, kind, mask, dim):
    out = IntMatrix.identity(dim)
    for k, i in ordered_word(mask, kind):
        out = mats[i] @ out
    return out


# -- random families for property suites --------------------------------------


def standard_family(r, rank_w):
    """The model family on V = W ⊗ F(r): e_I(w) = w ⊗ v_I, f_I its dual."""
    rank_v = rank_w << r
    e, f = {}, {}
    for mask in subsets(r):
        em = IntMatrix.zero(rank_v, rank_w)
        fm = IntMatrix.zero(rank_w, rank_v)
        for j in range(rank_w):
            em._add_entry(tensor_index(mask, j, rank_w), j, 1)
            fm._add_entry(j, tensor_index(mask, j, rank_w), 1)
        e[mask], f[mask] = em, fm
    return e, f


def random_unimodular(n, rng, steps=None):
    u = IntMatrix.identity(n)
    for _ in range(steps if steps is not None else 4 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        elem = IntMatrix.identity(n)
        elem._add_entry(i, j, rng.choice((-2, -1, 1, 2)))
        u = u @ elem
    return u


def random_family(r, rank_w, rng, defect=0, order=None):
    """Random semi-orthogonal family with known ground truth.

    Starts from the standard model, mixes strictly later raw maps into each
    f_I and earlier e_J's into each e_I (which preserves semi-orthogonality
    but destroys full orthogonality), then conjugates by random unimodular
    changes of basis on W and V.  ``defect`` extra coordinates are appended
    to V, unreachable by every e_I and killed by every f_I, so the defect
    operator has rank exactly ``defect``.
    """
    if order is None:
        order = lex_order(r)
    e, f = standard_family(r, rank_w)
    rank_v = (rank_w << r) + defect
    if defect:
        for mask in subsets(r):
            em = IntMatrix.zero(rank_v, rank_w)
            for i, j, v in e[mask].entries():
                em._add_entry(i, j, v)
            fm = IntMatrix.zero(rank_w, rank_v)
            for i, j, v in f[mask].entries():
                fm._add_entry(i, j, v)
            e[mask], f[mask] = em, fm
    pos = {m: k for k, m in enumerate(order)}
    raw_e, raw_f = dict(e), dict(f)
    for mask in subsets(r):
        for m in subsets(r):
            if pos[m] > pos[mask]:
                c = rng.randrange(-2, 3)
                if c:
                    f[mask] = f[mask] + raw_f[m].scale(c)
            elif pos[m] < pos[mask]:
                c = rng.randrange(-2, 3)
                if c:
                    e[mask] = e[mask] + raw_e[m].scale(c)
    u_v = random_unimodular(rank_v, rng)
    u_v_inv = u_v.inverse_unimodular()
    u_w = random_unimodular(rank_w, rng)
    u_w_inv = u_w.inverse_unimodular()
    e = {m: u_v @ e[m] @ u_w_inv for m in subsets(r)}
    f = {m: u_w @ f[m] @ u_v_inv for m in subsets(r)}
    return SemiOrthFamily(r=r, rank_w=rank_w, rank_v=rank_v, e=e, f=f,
                          order=list(order))


# -- extended actions and negative modes ---------------------------------------


@dataclass
class ExtendedAction:
    """Operators e, f, p_i, q_i on a bigraded module, as graded maps."""

    r: int
    module: object
    e: GradedMap
    f: GradedMap
    p: list
    q: list
    keys: list = field(default_factory=list)

    def word(self, kind, mask):
        mats = self.p if kind == "p" else self.q
        out = GradedMap.identity(self.module)
        for k, i in ordered_word(mask, kind):
            out = mats[i] @ out
        return out

    def e_I(self, mask):
        return self.word("q", mask) @ self.e

    def f_I(self, mask):
        return self.f @ self.word("p", mask)

    def check_unit_counit(self, keys):
        """The defining identities: fe = 1, ef = p_[r]q_[r], p_i e = 0, f q_i = 0."""
        full = FULL(self.r)
        results = {
            "fe=1": check_equals_scalar(self.f @ self.e, keys, 1),
            "ef=pq": check_equal(self.e @ self.f,
                                 self.word("p", full) @ self.word("q", full), keys),
        }
        for i in range(self.r):
            results[f"p{i}e=0"] = check_zero(self.p[i] @ self.e, keys)
            results[f"fq{i}=0"] = check_zero(self.f @ self.q[i], keys)
        return results


def negative_modes(action, depth, keys=None):
    """Inductively defined operators p_{a,i}, q_{a,i} for depth <= a <= 0.

    p_{a,i} = sum_I (-1)^{len I} e_I p_{a+1,i} f_I and likewise for q.
    Verifies the defining identities of the action first (on ``keys``).
    Returns dict {("p"|"q", a, i): GradedMap}.
    """
    if depth > 0:
        raise ValueError("depth must be <= 0")
    if keys is not None:
        checks = action.check_unit_counit(keys)
        bad = [name for name, res in checks.items() if not res.ok]
        if bad:
            raise ValueError(f"extended-action identities fail: {bad}")
    r = action.r
    ops = {}
    for i in range(r):
        ops[("p", 0, i)] = action.p[i]
        ops[("q", 0, i)] = action.q[i]
    e_words = {mask: action.e_I(mask) for mask in subsets(r)}
    f_words = {mask: action.f_I(mask) for mask in subsets(r)}
    for a in range(-1, depth - 1, -1):
        for i in range(r):
            for kind in ("p", "q"):
                acc = None
                for mask in subsets(r):
                    term = e_words[mask] @ ops[(kind, a + 1, i)] @ f_words[mask]
                    term = term.scale(-1 if subset_len(mask) & 1 else 1)
                    acc = term if acc is None else acc + term
                ops[(kind, a, i)] = acc
    return ops


def check_shift_intertwining(action, ops, keys):
    """e p_{a,i} = p_{a-1,i} e and f p_{a-1,i} = p_{a,i} f (and for q)."""
    failures = []
    checked = 0
    levels = sorted({a for (_, a, _) in ops})
    for kind in ("p", "q"):
        for a in levels:
            if (kind, a - 1, 0) not in ops:
                continue
            for i in range(action.r):
                res1 = check_equal(action.e @ ops[(kind, a, i)],
                                   ops[(kind, a - 1, i)] @ action.e, keys)
                res2 = check_equal(action.f @ ops[(kind, a - 1, i)],
                                   ops[(kind, a, i)] @ action.f, keys)
                checked += len(res1.checked) + len(res2.checked)
                if not res1.ok:
                    failures.append(("e-shift", kind, a, i, res1.failures))
                if not res2.ok:
                    failures.append(("f-shift", kind, a, i, res2.failures))
    return checked, failures


def check_negative_mode_relations(ops, r, keys):
    """Shifted Clifford relations between all computed modes, on safe pieces."""
    failures = []
    checked = 0
    levels = sorted({a for (_, a, _) in ops})
    for a in levels:
        for b in levels:
            for i in range(r):
                for j in range(r):
                    pa, qb = ops[("p", a, i)], ops[("q", b, j)]
                    want = 1 if (a == b and i == j) else 0
                    res = check_equals_scalar(pa.anticommutator(qb), keys, want)
                    checked += len(res.checked)
                    if not res.ok:
                        failures.append(("pq", a, i, b, j, res.failures))
                    res = check_zero(ops[("p", a, i)].anticommutator(ops[("p", b, j)]), keys)
                    checked += len(res.checked)
                    if not res.ok:
                        failures.append(("pp", a, i, b, j, res.failures))
                    res = check_zero(ops[("q", a, i)].anticommutator(ops[("q", b, j)]), keys)
                    checked += len(res.checked)
                    if not res.ok:
                        failures.append(("qq", a, i, b, j, res.failures))
    return checked, failures


# -- grading audit -------------------------------------------------------------


def expected_bigraded_shifts(r):
    """Charge/weight shifts of the named operators on the (l, n) piece."""
    return {
        "e": lambda l, n: (-r, -l),
        "f": lambda l, n: (r, l + r),
        "p": lambda l, n: (-1, 0),
        "q": lambda l, n: (1, 0),
        "e_full": lambda l, n: (0, -l),
        "f_full": lambda l, n: (0, l),
    }


def expected_coho_shifts(r, index):
    """Cohomological shifts; ``index`` is the generator color for p/q."""
    c2 = r * (r - 1) // 2
    return {
        "e": lambda l: -r * l + c2,
        "f": lambda l: r * (l + r) - c2,
        "p": lambda l: index,
        "q": lambda l: -index,
        "e_full": lambda l: -l * r,
        "f_full": lambda l: l * r,
    }


@dataclass
class AuditRow:
    operator: str
    expected: object
    mismatches: list
    measured: dict

    @property
    def ok(self):
        return not self.mismatches


def grading_audit(named_ops, keys, expected):
    """Measure degree shifts of each operator on each key and compare.

    ``named_ops``: {name: GradedMap}; ``expected``: {name: key -> shift}.
    Returns {name: AuditRow}.
    """
    out = {}
    for name, op in named_ops.items():
        want_fn = expected[name]
        mism = []
        measured = {}
        for key in keys:
            shift = op.shift(key)
            if shift is None:
                continue
            measured[key] = shift
            want = want_fn(*key)
            want = tuple(want) if isinstance(want, (tuple, list)) else (want,)
            if shift != want:
                mism.append((key, shift, want))
        out[name] = AuditRow(operator=name, expected=want_fn,
                             mismatches=mism, measured=measured)
    return out
