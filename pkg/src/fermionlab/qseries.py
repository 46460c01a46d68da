"""Exact truncated q-series with Laurent-polynomial coefficients in x, y.

A series is a global prefactor q^offset (offset rational with denominator
dividing 24) times sum_{n=0..order} c_n q^n, where each c_n is a Laurent
polynomial stored as {(x_exp, y_exp): int}.  Arithmetic truncates exactly
at the smaller order and never invents unknown coefficients.
"""

from __future__ import annotations

from fractions import Fraction

from .maya import maya_basis


def _poly_add(p, q):
    out = dict(p)
    for k, v in q.items():
        w = out.get(k, 0) + v
        if w:
            out[k] = w
        else:
            del out[k]
    return out


def _poly_mul(p, q):
    out = {}
    for (a1, b1), v1 in p.items():
        for (a2, b2), v2 in q.items():
            k = (a1 + a2, b1 + b2)
            w = out.get(k, 0) + v1 * v2
            if w:
                out[k] = w
            else:
                del out[k]
    return out


def _poly_scale(p, c):
    return {k: c * v for k, v in p.items()} if c else {}


def _const(c):
    return {(0, 0): c} if c else {}


class BiSeries:
    """Truncated formal series in q with Laurent coefficients in x and y."""

    __slots__ = ("offset", "order", "coeffs")

    def __init__(self, offset, order, coeffs=None):
        offset = Fraction(offset)
        if 24 % offset.denominator:
            raise ValueError(f"offset denominator must divide 24, got {offset}")
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        self.offset = offset
        self.order = order
        self.coeffs = [dict() for _ in range(order + 1)] if coeffs is None \
            else [dict(c) for c in coeffs]
        if len(self.coeffs) != order + 1:
            raise ValueError("coefficient array does not match the order")

    @classmethod
    def constant(cls, c, order):
        s = cls(0, order)
        s.coeffs[0] = _const(c)
        return s

    @classmethod
    def monomial(cls, order, q_shift=0, x_exp=0, y_exp=0, c=1):
        """c * q^q_shift * x^x_exp * y^y_exp with a rational q_shift."""
        q_shift = Fraction(q_shift)
        n = int(q_shift) if q_shift.denominator == 1 else 0
        if q_shift.denominator == 1 and 0 <= n <= order:
            s = cls(0, order)
            s.coeffs[n] = {(x_exp, y_exp): c}
            return s
        s = cls(q_shift, order)
        s.coeffs[0] = {(x_exp, y_exp): c}
        return s

    def copy(self):
        return BiSeries(self.offset, self.order, self.coeffs)

    def is_zero(self):
        return all(not c for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return (self.offset, self.order) == (other.offset, other.order) and \
            self.coeffs == other.coeffs

    def __repr__(self):
        lead = next((i for i, c in enumerate(self.coeffs) if c), None)
        return f"BiSeries(offset={self.offset}, order={self.order}, lead_at={lead})"

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if self.is_zero():
            return other.copy()
        if other.is_zero():
            return self.copy()
        diff = other.offset - self.offset
        if diff.denominator != 1:
            raise ValueError(
                f"cannot add series with incompatible offsets {self.offset}, {other.offset}")
        shift = int(diff)
        if shift < 0:
            return other + self
        order = min(self.order, other.order + shift)
        out = BiSeries(self.offset, order)
        for n in range(order + 1):
            c = dict(self.coeffs[n]) if n <= self.order else {}
            if 0 <= n - shift <= other.order:
                c = _poly_add(c, other.coeffs[n - shift])
            out.coeffs[n] = c
        return out

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        out = BiSeries(self.offset, self.order)
        out.coeffs = [_poly_scale(p, c) for p in self.coeffs]
        return out

    def __mul__(self, other):
        order = min(self.order, other.order)
        out = BiSeries(self.offset + other.offset, order)
        for n1, c1 in enumerate(self.coeffs):
            if not c1 or n1 > order:
                continue
            for n2, c2 in enumerate(other.coeffs):
                n = n1 + n2
                if n > order or not c2:
                    continue
                out.coeffs[n] = _poly_add(out.coeffs[n], _poly_mul(c1, c2))
        return out

    def inverse(self):
        """Multiplicative inverse; the constant term must be ±1 times a monomial."""
        lead = self.coeffs[0]
        if len(lead) != 1:
            raise ValueError("leading coefficient is not a monomial")
        ((lx, ly), lc), = lead.items()
        if lc not in (1, -1):
            raise ValueError("leading coefficient is not a unit")
        inv_lead = {(-lx, -ly): lc}
        out = BiSeries(-self.offset, self.order)
        out.coeffs[0] = dict(inv_lead)
        for n in range(1, self.order + 1):
            acc = {}
            for k in range(1, n + 1):
                if self.coeffs[k]:
                    acc = _poly_add(acc, _poly_mul(self.coeffs[k], out.coeffs[n - k]))
            out.coeffs[n] = _poly_mul(inv_lead, _poly_scale(acc, -1))
        return out

    def pow(self, k):
        if k < 0:
            return self.inverse().pow(-k)
        out = BiSeries.constant(1, self.order)
        base = self.copy()
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- substitutions -------------------------------------------------------

    def substitute_y_inverse_x(self):
        """x^a y^b ↦ x^(a-b): the slice y = 1/x."""
        out = BiSeries(self.offset, self.order)
        for n, c in enumerate(self.coeffs):
            acc = {}
            for (a, b), v in c.items():
                k = (a - b, 0)
                w = acc.get(k, 0) + v
                if w:
                    acc[k] = w
                elif k in acc:
                    del acc[k]
            out.coeffs[n] = acc
        return out

    def substitute_ones(self):
        """Set x = y = 1; coefficients collapse to integers at (0, 0)."""
        out = BiSeries(self.offset, self.order)
        for n, c in enumerate(self.coeffs):
            total = sum(c.values())
            out.coeffs[n] = _const(total)
        return out

    def substitute_y_one(self):
        """Set y = 1: x^a y^b ↦ x^a."""
        out = BiSeries(self.offset, self.order)
        for n, c in enumerate(self.coeffs):
            acc = {}
            for (a, b), v in c.items():
                k = (a, 0)
                w = acc.get(k, 0) + v
                if w:
                    acc[k] = w
                elif k in acc:
                    del acc[k]
            out.coeffs[n] = acc
        return out

    def x_independent(self):
        return all(all(a == 0 and b == 0 for (a, b) in c) for c in self.coeffs)

    # -- serialization -------------------------------------------------------

    def to_json(self):
        off = self.offset * 24
        coeffs = []
        for n, c in enumerate(self.coeffs):
            if not c:
                continue
            terms = [{"x": a, "y": b, "c": str(v)}
                     for (a, b), v in sorted(c.items())]
            coeffs.append({"q": n, "terms": terms})
        return {"offset_num": int(off), "offset_den": 24,
                "order": self.order, "coeffs": coeffs}

    @classmethod
    def from_json(cls, obj):
        s = cls(Fraction(obj["offset_num"], obj["offset_den"]), obj["order"])
        for entry in obj["coeffs"]:
            s.coeffs[entry["q"]] = {(t["x"], t["y"]): int(t["c"])
                                    for t in entry["terms"]}
        return s


def compare_up_to_monomial(s1, s2):
    """The unique (dq, dx, dy) with s1 = q^dq x^dx y^dy s2, or None.

    Both series must be nonzero; the comparison runs to the common
    truncation order.
    """
    lead1 = next((n for n, c in enumerate(s1.coeffs) if c), None)
    lead2 = next((n for n, c in enumerate(s2.coeffs) if c), None)
    if lead1 is None or lead2 is None:
        raise ValueError("both series must be nonzero")
    dq = (s1.offset + lead1) - (s2.offset + lead2)
    c1, c2 = s1.coeffs[lead1], s2.coeffs[lead2]
    if len(c1) != len(c2):
        return None
    (a1, b1) = min(c1)
    (a2, b2) = min(c2)
    dx, dy = a1 - a2, b1 - b2
    order = min(s1.order - lead1, s2.order - lead2)
    for n in range(order + 1):
        p1 = s1.coeffs[lead1 + n]
        p2 = {(a + dx, b + dy): v for (a, b), v in s2.coeffs[lead2 + n].items()}
        if p1 != p2:
            return None
    return (dq, dx, dy)


# -- the named series ---------------------------------------------------------


def euler_product(order, xy_step=0):
    """prod_{n>=1} (1 - (xy)^(xy_step * n) q^n) to the given order."""
    out = BiSeries.constant(1, order)
    for n in range(1, order + 1):
        factor = BiSeries.constant(1, order)
        factor.coeffs[n] = {(xy_step * n, xy_step * n): -1}
        out = out * factor
    return out


def eta(order):
    """q^(1/24) times the Euler product."""
    out = euler_product(order)
    return BiSeries.monomial(order, q_shift=Fraction(1, 24)) * out


def theta(a, order):
    """Sum of q^(n^2) over n in Z + a/2, for a in {0, 1}."""
    if a not in (0, 1):
        raise ValueError("theta index must be 0 or 1")
    out = BiSeries(Fraction(a, 4), order)
    n = 0
    while True:
        vals = {n, -n - a}
        stop = True
        for m in vals:
            # exponent (m + a/2)^2 = m^2 + m a + a/4; integer part relative to a/4
            e = m * m + m * a
            if 0 <= e <= order:
                out.coeffs[e] = _poly_add(out.coeffs[e], _const(1))
                stop = False
        if stop and n * n > order + abs(a) + 2:
            break
        n += 1
    return out


def blowup_series(a, order):
    """The two-variable blow-up series Z_a(x, y, q).

    Numerator: sum over n of (xy)^(((2n+a)^2 - (2n+a))/2) q^((2n+a)^2 / 4);
    denominator: q^(1/12) prod_{n>=1} (1 - (xy)^(2n) q^n)^2.
    """
    if a not in (0, 1):
        raise ValueError("series index must be 0 or 1")
    num = BiSeries(Fraction(a, 4) if a else Fraction(0), order)
    n = 0
    while True:
        added = False
        for m in {n, -n - 1}:
            k = 2 * m + a
            qe = Fraction(k * k, 4) - num.offset
            if qe.denominator != 1:
                raise AssertionError("theta exponent misaligned with offset")
            qe = int(qe)
            if 0 <= qe <= order:
                xe = (k * k - k) // 2
                num.coeffs[qe] = _poly_add(num.coeffs[qe], {(xe, xe): 1})
                added = True
        if not added and n * n > order + 4:
            break
        n += 1
    den = euler_product(order, xy_step=2)
    den = BiSeries.monomial(order, q_shift=Fraction(1, 12)) * (den * den)
    return num * den.inverse()


def fock_character(r, l, order, grading="weight"):
    """Graded dimension series of the charge-l sector of the Fock space.

    ``weight``: sum over n of dim q^n.  ``weight-coho``: each basis diagram
    contributes q^weight x^coho.
    """
    if grading not in ("weight", "weight-coho"):
        raise ValueError("grading must be 'weight' or 'weight-coho'")
    out = BiSeries(0, order)
    for n in range(order + 1):
        basis = maya_basis(r, l, n)
        if not basis:
            continue
        if grading == "weight":
            out.coeffs[n] = _const(len(basis))
        else:
            acc = {}
            for d in basis:
                k = (d.coho(), 0)
                acc[k] = acc.get(k, 0) + 1
            out.coeffs[n] = acc
    return out
