"""Affine gl_r generators as normal-ordered fermion bilinears.

The mode-a generator between colors (i, j) is the sum over all levels m of
the normal-ordered product of a creation at (m, i) with an annihilation at
(m + a, j).  On any single Maya diagram only finitely many levels
contribute, because diagrams are cofinitely full below and empty above, so
every matrix entry is exact.  The commutation relations are verified as
residual operators that must vanish identically on the safe window of a
truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graded import Block, GradedMap, ZERO, check_equals_scalar, check_zero
from .intlinalg import IntMatrix
from .maya import fermion_apply


def bilinear_apply(i, j, a, d):
    """e_ij^a on one diagram: sum over m of :Q_{m,i} P_{m+a,j}:.

    Normal ordering: Q_{m,i} P_{n,j} for n > 0, and -P_{n,j} Q_{m,i} for
    n <= 0 (they differ only by the anticommutator at m = n, i = j).
    Returns a {Maya: coeff} dict.
    """
    out = {}
    # Annihilation branch (n <= 0): the creation at m dies on full levels,
    # so m >= d.lo and m <= -a.  Contraction branch (n > 0): color j must be
    # occupied at n in [1, d.hi), so m in [1 - a, d.hi - 1 - a].
    m_lo = min(d.lo, 1 - a)
    m_hi = max(-a, d.hi - 1 - a)
    for m in range(m_lo, m_hi + 1):
        n = m + a
        if n > 0:
            first = fermion_apply("P", n, j, d)
            if first is None:
                continue
            s1, d1 = first
            second = fermion_apply("Q", m, i, d1)
            if second is None:
                continue
            s2, d2 = second
            sign = s1 * s2
        else:
            first = fermion_apply("Q", m, i, d)
            if first is None:
                continue
            s1, d1 = first
            second = fermion_apply("P", n, j, d1)
            if second is None:
                continue
            s2, d2 = second
            sign = -s1 * s2
        c = out.get(d2, 0) + sign
        if c:
            out[d2] = c
        else:
            del out[d2]
    return out


def bilinear_map(module, i, j, a):
    """The generator as a graded operator on a truncation."""
    return GradedMap.from_action(
        module, module,
        lambda d: [(c, d2) for d2, c in bilinear_apply(i, j, a, d).items()],
        name=f"e[{i}{j}]^{a}")


def weight_operator(module):
    """Diagonal operator multiplying the (l, n) piece by n."""
    def fn(key):
        rank = module.rank(key)
        if not rank:
            return ZERO
        return Block(key, IntMatrix.identity(rank).scale(key[1]))
    return GradedMap(module, module, fn, name="wt")


def derivation_map(module):
    """d = -(weight operator): the unique global sign with [d, e_ij^a] = a e_ij^a."""
    return weight_operator(module).scale(-1)


def charge_scalar_map(module, factor=1):
    """Diagonal operator multiplying the (l, n) piece by factor * l."""
    def fn(key):
        rank = module.rank(key)
        if not rank:
            return ZERO
        return Block(key, IntMatrix.identity(rank).scale(factor * key[0]))
    return GradedMap(module, module, fn, name=f"{factor}*charge")


@dataclass
class ResidualReport:
    relation: tuple
    checked: int
    skipped: int
    failures: list

    @property
    def ok(self):
        return not self.failures

    def to_dict(self):
        return {"relation": list(map(str, self.relation)), "ok": self.ok,
                "checked": self.checked, "skipped": self.skipped,
                "failures": [list(map(str, f)) for f in self.failures]}


class AffineVerifier:
    """Caches generators on one truncation and evaluates relation residuals."""

    def __init__(self, module, r):
        self.module = module
        self.r = r
        self._gens = {}

    def gen(self, i, j, a):
        key = (i, j, a)
        op = self._gens.get(key)
        if op is None:
            op = bilinear_map(self.module, i, j, a)
            self._gens[key] = op
        return op

    def residual(self, i, j, k, l, a, b):
        """[e_ij^a, e_kl^b] - (δ_jk e_il^{a+b} - δ_il e_kj^{a+b})
        - a δ_il δ_jk δ_{a,-b} K, with the central element K acting as the
        identity (level one)."""
        res = self.gen(i, j, a).commutator(self.gen(k, l, b))
        if j == k:
            res = res - self.gen(i, l, a + b)
        if i == l:
            res = res + self.gen(k, j, a + b)
        if i == l and j == k and a == -b and a != 0:
            res = res + GradedMap.identity(self.module).scale(-a)
        return res

    def check_residual(self, i, j, k, l, a, b, keys):
        res = check_zero(self.residual(i, j, k, l, a, b), keys)
        return ResidualReport(relation=("affine", i, j, k, l, a, b),
                              checked=len(res.checked), skipped=len(res.skipped),
                              failures=res.failures)

    def check_derivation(self, i, j, a, keys):
        """[d, e_ij^a] = a e_ij^a with d = -(weight operator)."""
        d_op = derivation_map(self.module)
        gen = self.gen(i, j, a)
        res = check_zero(d_op.commutator(gen) - gen.scale(a), keys)
        return ResidualReport(relation=("derivation", i, j, a),
                              checked=len(res.checked), skipped=len(res.skipped),
                              failures=res.failures)

    def check_central_identity(self, keys):
        """The full central measurement: for every (i, j) and a != 0,
        [e_ij^a, e_ji^{-a}] - e_ii^0 + e_jj^0 (i != j) resp.
        [e_ii^a, e_ii^{-a}] must equal a * 1 on every piece."""
        reports = []
        for i in range(self.r):
            for j in range(self.r):
                for a in (1, 2):
                    res = self.gen(i, j, a).commutator(self.gen(j, i, -a))
                    if i != j:
                        res = res - self.gen(i, i, 0) + self.gen(j, j, 0)
                    out = check_equals_scalar(res, keys, a)
                    reports.append(ResidualReport(
                        relation=("central", i, j, a),
                        checked=len(out.checked), skipped=len(out.skipped),
                        failures=out.failures))
        return reports

    def check_charge_zero_mode(self, keys):
        """sum_i e_ii^0 acts on the charge-l sector as l times the identity."""
        total = self.gen(0, 0, 0)
        for i in range(1, self.r):
            total = total + self.gen(i, i, 0)
        res = check_zero(total - charge_scalar_map(self.module), keys)
        return ResidualReport(relation=("zero-mode-charge",),
                              checked=len(res.checked), skipped=len(res.skipped),
                              failures=res.failures)


def charge_blocks(op, keys):
    """Evaluate the operator on the given keys and split it into per-charge
    blocks; raises AssertionError on any cross-charge entry."""
    blocks = {}
    for key in keys:
        b = op.block(key)
        if not isinstance(b, Block):
            continue
        if b.tkey[0] != key[0]:
            raise AssertionError(
                f"operator {op.name} maps charge {key[0]} to {b.tkey[0]}")
        blocks.setdefault(key[0], []).append((key, b))
    return blocks
