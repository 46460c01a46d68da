"""Bounded bigraded extended-algebra representations and their colimits.

A standard model is W ⊗ (level-<=0 Fock space): pieces indexed by (charge,
weight), materialized lazily, with e, f, p_i, q_i acting through the Fock
factor.  Iterating e walks each piece along a parabolic trajectory in the
(charge, weight) lattice; once the transition maps become integral
bijections the orbit has stabilized and the stable piece computes the
corresponding piece of W ⊗ (full Fock space).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .clifford import FULL
from .fock import apply_fermion, ordered_fermion_word
from .graded import Block, GradedMap, GradedModule, ZERO, check_equal, \
    check_equals_scalar
from .intlinalg import IntMatrix
from .maya import fermion_apply, maya_basis, shift_apply
from .ortho import ExtendedAction, negative_modes


# -- trajectories --------------------------------------------------------------


@dataclass(frozen=True)
class TrajectoryPoint:
    step: int
    charge: int
    weight: int

    def on_parabola(self, r, l, n):
        """2r(x - n) == (y + l)(y - r - l) at (x, y) = (weight, -charge)."""
        x, y = self.weight, -self.charge
        return 2 * r * (x - n) == (y + l) * (y - r - l)


def trajectory_key(r, l, n, m):
    return (l - m * r, n - m * l + m * (m - 1) * r // 2)


def trajectory(r, l, n, m_range):
    """Orbit points (l - mr, n - ml + m(m-1)r/2); the parabola identity is
    asserted at every emitted point."""
    points = []
    for m in m_range:
        lm, nm = trajectory_key(r, l, n, m)
        pt = TrajectoryPoint(step=m, charge=lm, weight=nm)
        if not pt.on_parabola(r, l, n):
            raise AssertionError(f"trajectory point {pt} off the parabola of ({l}, {n})")
        points.append(pt)
    return points


def foliation_origin(r, lp, np_):
    """The unique (l, n, m) with 1-r <= l <= 0 whose orbit passes (lp, np_)."""
    if lp > 0:
        raise ValueError("foliation covers only charges <= 0")
    candidates = []
    for l in range(1 - r, 1):
        diff = l - lp
        if diff % r:
            continue
        m = diff // r
        if m < 0:
            continue
        n = np_ + m * l - m * (m - 1) * r // 2
        candidates.append((l, n, m))
    if len(candidates) != 1:
        raise AssertionError(
            f"lattice point ({lp}, {np_}) lies on {len(candidates)} base orbits")
    return candidates[0]


def foliation_check(r, charge_range, weight_range):
    """Every lattice point with l <= 0 lies on exactly one base trajectory."""
    for lp in range(charge_range[0], min(charge_range[1], 0) + 1):
        for np_ in range(weight_range[0], weight_range[1] + 1):
            l, n, m = foliation_origin(r, lp, np_)
            if trajectory_key(r, l, n, m) != (lp, np_):
                return False
    return True


def orbits_intersect(r, o1, o2, m_max=64):
    """Whether the orbits of (l1, n1) and (l2, n2) share a lattice point."""
    pts1 = {(p.charge, p.weight) for p in trajectory(r, *o1, range(m_max))}
    pts2 = {(p.charge, p.weight) for p in trajectory(r, *o2, range(m_max))}
    return bool(pts1 & pts2)


# -- standard models -----------------------------------------------------------


@dataclass
class BoundedRep:
    """A bounded bigraded representation with its extended-algebra action."""

    r: int
    w_ranks: dict
    n0: int
    module: GradedModule
    action: ExtendedAction

    def rank(self, key):
        return self.module.rank(key)

    def fock_rank(self, l, n):
        """Rank of the (l, n) piece of W ⊗ (full Fock space)."""
        return sum(rank * len(maya_basis(self.r, l, n - k))
                   for k, rank in self.w_ranks.items())


def standard_model(r, w_ranks, scramble_rng=None):
    """W ⊗ (level-<=0 Fock space) with the level-0 extended action.

    ``w_ranks``: {weight: rank} with finitely many nonzero entries.  Labels
    are (w_weight, w_index, Maya).  With ``scramble_rng`` every piece is
    conjugated by a random unimodular change of basis, which leaves all
    ranks and relations intact but hides the product structure.
    """
    w_ranks = {k: v for k, v in w_ranks.items() if v}
    n0 = min(w_ranks, default=0)

    def enumerate_piece(key):
        l, n = key
        out = []
        for k in sorted(w_ranks):
            for d in maya_basis(r, l, n - k, max_level=0):
                for j in range(w_ranks[k]):
                    out.append((k, j, d))
        return out

    def key_of(label):
        k, _, d = label
        l, n = d.key()
        return (l, n + k)

    # No window bound: pieces with charge > 0 or weight below the floor come
    # out empty from the enumerator, which is the vanishing condition itself.
    module = GradedModule(enumerate_piece, key_of, name=f"W⊗F({r})<=0")

    def lift(fn):
        def act(label):
            k, j, d = label
            return [(c, (k, j, d2)) for c, d2 in fn(d)]
        return act

    def op_e(d):
        return [(1, shift_apply(-1, d))]

    full = FULL(r)

    def op_f(d):
        vec = {d: 1}
        for kind, a, i in ordered_fermion_word("Q", 0, full):
            vec = apply_fermion(kind, a, i, vec)
        for kind, a, i in ordered_fermion_word("P", 0, full):
            vec = apply_fermion(kind, a, i, vec)
        return [(c, shift_apply(+1, dd)) for dd, c in vec.items()]

    def op_p(i):
        def act(d):
            hit = fermion_apply("P", 0, i, d)
            return [] if hit is None else [hit]
        return act

    def op_q(i):
        def act(d):
            hit = fermion_apply("Q", 0, i, d)
            return [] if hit is None else [hit]
        return act

    e = GradedMap.from_action(module, module, lift(op_e), name="e")
    f = GradedMap.from_action(module, module, lift(op_f), name="f")
    ps = [GradedMap.from_action(module, module, lift(op_p(i)), name=f"p{i}")
          for i in range(r)]
    qs = [GradedMap.from_action(module, module, lift(op_q(i)), name=f"q{i}")
          for i in range(r)]
    if scramble_rng is not None:
        conj = _piece_conjugator(module, scramble_rng)
        e, f = conj(e), conj(f)
        ps = [conj(p) for p in ps]
        qs = [conj(q) for q in qs]
    action = ExtendedAction(r=r, module=module, e=e, f=f, p=ps, q=qs)
    return BoundedRep(r=r, w_ranks=w_ranks, n0=n0, module=module, action=action)


def _piece_conjugator(module, rng):
    from .ortho import random_unimodular
    units = {}
    seed0 = rng.randrange(1 << 30)

    def unit(key):
        u = units.get(key)
        if u is None:
            import random as _random
            local = _random.Random((seed0,) + key)
            n = module.rank(key)
            u = random_unimodular(n, local) if n else IntMatrix.identity(0)
            units[key] = (u, u.inverse_unimodular() if n else u)
        return units[key]

    def conj(op):
        def fn(key):
            b = op.block(key)
            if not isinstance(b, Block):
                return b
            u_t, _ = unit(b.tkey)
            _, u_s_inv = unit(key)
            return Block(b.tkey, u_t @ b.mat @ u_s_inv)
        return GradedMap(op.src, op.dst, fn, name=f"~{op.name}")
    return conj


# -- colimit along trajectories -------------------------------------------------


@dataclass
class ColimitResult:
    l: int
    n: int
    stab_index: int
    colimit_rank: int
    fock_rank: int
    ranks: list
    transitions_checked: int

    @property
    def matches_fock(self):
        return self.colimit_rank == self.fock_rank

    def to_dict(self):
        return {"l": self.l, "n": self.n, "stab_index": self.stab_index,
                "colimit_rank": self.colimit_rank, "fock_rank": self.fock_rank,
                "ranks": self.ranks, "matches_fock": self.matches_fock}


class StabilizationError(RuntimeError):
    pass


def h_infinity(rep, l, n, m_max):
    """Follow the orbit of (l, n) under e until the transitions stay
    integral bijections; return the stable piece data.

    Raises StabilizationError if no index <= m_max works, which signals
    that m_max is too small.
    """
    r = rep.r
    keys = [trajectory_key(r, l, n, m) for m in range(m_max + 2)]
    ranks = [rep.rank(k) for k in keys]
    bijective = []
    for m in range(m_max + 1):
        b = rep.action.e.block(keys[m])
        if b is ZERO:
            bijective.append(ranks[m] == 0 and ranks[m + 1] == 0)
            continue
        if not isinstance(b, Block):
            raise StabilizationError(f"transition at step {m} overflows the window")
        bijective.append(b.tkey == keys[m + 1] and b.mat.is_unimodular())
    stab = None
    for m in range(m_max + 1):
        if all(bijective[m:]):
            stab = m
            break
    if stab is None:
        raise StabilizationError(
            f"orbit of ({l}, {n}) does not stabilize within m_max={m_max}")
    colimit_rank = ranks[stab]
    return ColimitResult(l=l, n=n, stab_index=stab, colimit_rank=colimit_rank,
                         fock_rank=rep.fock_rank(l, n), ranks=ranks,
                         transitions_checked=m_max + 1)


def measured_stab_index(rep, l, n, m_cap=64):
    """Independent measurement: least m with the level-<=m piece already full."""
    r = rep.r
    for m in range(m_cap):
        full_now = True
        for k, rank in rep.w_ranks.items():
            if len(maya_basis(r, l, n - k, max_level=m)) != len(maya_basis(r, l, n - k)):
                full_now = False
                break
        if full_now:
            return m
    raise StabilizationError(f"no level cutoff below {m_cap} fills the ({l}, {n}) piece")


# -- the full Fock structure on the colimit -------------------------------------


@dataclass
class FockStructureReport:
    stage: int
    pieces: list            # (l, n, colimit_rank, fock_rank)
    rank_failures: list
    descent_failures: list
    relation_failures: list
    relations_checked: int

    @property
    def ok(self):
        return not (self.rank_failures or self.descent_failures
                    or self.relation_failures)

    def to_dict(self):
        return {
            "stage": self.stage,
            "ok": self.ok,
            "pieces": [list(p) for p in self.pieces],
            "rank_failures": [list(p) for p in self.rank_failures],
            "descent_failures": [list(map(str, p)) for p in self.descent_failures],
            "relation_failures": [list(map(str, p)) for p in self.relation_failures],
            "relations_checked": self.relations_checked,
        }


def fock_structure(rep, charge_range, weight_max, levels=(0, 1), m_max=16):
    """Install the level operators on the stabilized colimit of a window and
    verify the identification with W ⊗ (full Fock space).

    For each window piece the colimit is realized at one global stage M; the
    level-a operator acts as the negative mode at depth a - M, E as the
    stabilized transition and F as its inverse.  Checks: ranks match the
    Fock side on every piece, the operators descend (stage M and M + 1 give
    the same blocks through the transition), and the level anticommutators
    hold on the installed window.
    """
    r = rep.r
    window = [(l, n) for l in range(charge_range[0], charge_range[1] + 1)
              for n in range(rep.n0, weight_max + 1)]
    stabs = {}
    for (l, n) in window:
        stabs[(l, n)] = h_infinity(rep, l, n, m_max)
    stage = max([res.stab_index for res in stabs.values()] + [max(levels), 0]) + 1

    depth = min(levels) - stage - 1
    ops = negative_modes(rep.action, depth)

    pieces, rank_failures = [], []
    for (l, n) in window:
        res = stabs[(l, n)]
        pieces.append((l, n, res.colimit_rank, res.fock_rank))
        if not res.matches_fock:
            rank_failures.append((l, n, res.colimit_rank, res.fock_rank))

    descent_failures = []
    relation_failures = []
    relations_checked = 0
    stage_keys = [trajectory_key(r, l, n, stage) for (l, n) in window]
    for a in levels:
        for i in range(r):
            for kind, tag in (("p", "P"), ("q", "Q")):
                hi_op = ops[(kind, a - stage, i)]
                lo_op = ops[(kind, a - stage - 1, i)]
                res = check_equal(rep.action.e @ hi_op, lo_op @ rep.action.e,
                                  stage_keys)
                if not res.ok:
                    descent_failures.append((tag, a, i, res.failures))
    for a in levels:
        for b in levels:
            for i in range(r):
                for j in range(r):
                    pa = ops[("p", a - stage, i)]
                    qb = ops[("q", b - stage, j)]
                    want = 1 if (a == b and i == j) else 0
                    res = check_equals_scalar(pa.anticommutator(qb), stage_keys, want)
                    relations_checked += len(res.checked)
                    if not res.ok:
                        relation_failures.append(("PQ", a, i, b, j, res.failures))
    # E must be invertible on the stabilized window
    for key in stage_keys:
        b = rep.action.e.block(key)
        if isinstance(b, Block) and not b.mat.is_unimodular():
            relation_failures.append(("E-not-invertible", key))
    return FockStructureReport(stage=stage, pieces=pieces,
                               rank_failures=rank_failures,
                               descent_failures=descent_failures,
                               relation_failures=relation_failures,
                               relations_checked=relations_checked)
