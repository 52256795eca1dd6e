"""Exact arithmetic in cyclotomic fields Q(zeta_d).

Elements are polynomials in zeta_d of degree < phi(d), reduced modulo the
d-th cyclotomic polynomial.  This keeps rank decisions at roots of unity
tolerance-free: equality is equality.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath


@lru_cache(maxsize=None)
def cyclotomic_poly(d: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the d-th cyclotomic polynomial."""
    if d < 1:
        raise ValueError("order must be positive")
    # x^d - 1 divided by the product of Phi_e over proper divisors e of d.
    poly = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            phi_e = cyclotomic_poly(e)
            poly = _poly_div_exact(poly, list(phi_e))
    return tuple(poly)


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    while len(num) >= len(den) and any(num):
        while num and num[-1] == 0:
            num.pop()
        if len(num) < len(den):
            break
        c = num[-1] // den[-1]
        k = len(num) - len(den)
        out[k] = c
        for i, dc in enumerate(den):
            num[k + i] -= c * dc
    assert not any(num), "division must be exact"
    return out


@lru_cache(maxsize=None)
def _power_table(d: int) -> tuple[tuple[Fraction, ...], ...]:
    """zeta_d^j expressed in the basis 1, zeta, .., zeta^(phi-1), for j < d."""
    phi = cyclotomic_poly(d)
    deg = len(phi) - 1
    rows = []
    cur = [Fraction(0)] * deg
    if deg > 0:
        cur[0] = Fraction(1)
    for _ in range(d):
        rows.append(tuple(cur))
        # multiply by zeta and reduce by Phi_d (monic)
        nxt = [Fraction(0)] + cur[:]
        if len(nxt) > deg:
            lead = nxt.pop()
            if lead:
                for i in range(deg):
                    nxt[i] -= lead * phi[i]
        cur = nxt
    return tuple(rows)


def euler_phi(d: int) -> int:
    return len(cyclotomic_poly(d)) - 1


class Cyclo:
    """An element of Q(zeta_d), zeta_d = exp(2*pi*i/d)."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        deg = euler_phi(order)
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > deg:
            raise ValueError("coefficient vector too long")
        cs += [Fraction(0)] * (deg - len(cs))
        self.order = order
        self.coeffs = tuple(cs)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(order: int = 1) -> "Cyclo":
        return Cyclo(order, [])

    @staticmethod
    def rational(c, order: int = 1) -> "Cyclo":
        z = Cyclo(order, [])
        cs = list(z.coeffs)
        cs[0] = Fraction(c)
        return Cyclo(order, cs)

    @staticmethod
    def root_of_unity(n: int, d: int) -> "Cyclo":
        """exp(2*pi*i*n/d) as an exact element of Q(zeta_d)."""
        n %= d
        tab = _power_table(d)
        return Cyclo(d, list(tab[n]))

    # -- representation ------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def as_rational(self) -> Fraction | None:
        if all(c == 0 for c in self.coeffs[1:]):
            return self.coeffs[0]
        return None

    def promote(self, order: int) -> "Cyclo":
        """Embed into Q(zeta_order); order must be a multiple of self.order."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError("target order must be a multiple")
        step = order // self.order
        tab = _power_table(order)
        deg = euler_phi(order)
        out = [Fraction(0)] * deg
        for i, c in enumerate(self.coeffs):
            if c:
                row = tab[(i * step) % order]
                for j in range(deg):
                    out[j] += c * row[j]
        return Cyclo(order, out)

    @staticmethod
    def _common(a: "Cyclo", b: "Cyclo") -> tuple["Cyclo", "Cyclo"]:
        if a.order == b.order:
            return a, b
        m = a.order * b.order // gcd(a.order, b.order)
        return a.promote(m), b.promote(m)

    # -- arithmetic -----------------------------------------------------------

    def _wrap(self, other) -> "Cyclo":
        if isinstance(other, Cyclo):
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclo.rational(other, 1)
        raise TypeError(f"cannot mix Cyclo with {type(other).__name__}")

    def __add__(self, other):
        a, b = Cyclo._common(self, self._wrap(other))
        return Cyclo(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = Cyclo._common(self, self._wrap(other))
        deg = len(a.coeffs)
        prod = [Fraction(0)] * (2 * deg - 1 if deg else 1)
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    prod[i + j] += x * y
        phi = cyclotomic_poly(a.order)
        for k in range(len(prod) - 1, deg - 1, -1):
            c = prod[k]
            if c:
                prod[k] = Fraction(0)
                for i in range(deg):
                    prod[k - deg + i] -= c * phi[i]
        return Cyclo(a.order, prod[:deg])

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic number")
        phi = [Fraction(c) for c in cyclotomic_poly(self.order)]
        a = list(self.coeffs)
        # extended Euclid for gcd(a, phi) = 1 over Q[x]
        r0, r1 = phi, a
        s0, s1 = [Fraction(0)], [Fraction(1)]

        def trim(p):
            while p and p[-1] == 0:
                p.pop()
            return p

        r0, r1 = trim(r0), trim(r1)
        while True:
            if not r1:
                raise ArithmeticError("element not invertible (not coprime to Phi_d?)")
            if len(r1) == 1:
                inv = [c / r1[0] for c in s1]
                break
            q = [Fraction(0)] * (len(r0) - len(r1) + 1)
            rem = list(r0)
            while len(rem) >= len(r1):
                f = rem[-1] / r1[-1]
                off = len(rem) - len(r1)
                q[off] = f
                for i, c in enumerate(r1):
                    rem[off + i] -= f * c
                trim(rem)
                if not rem:
                    break
            # s_new = s0 - q*s1
            qs1 = [Fraction(0)] * (len(q) + len(s1) - 1)
            for i, qc in enumerate(q):
                if qc:
                    for j, sc in enumerate(s1):
                        qs1[i + j] += qc * sc
            s_new = [0] * max(len(s0), len(qs1))
            for i, c in enumerate(s0):
                s_new[i] += c
            for i, c in enumerate(qs1):
                s_new[i] -= c
            r0, r1 = r1, rem
            s0, s1 = s1, trim(s_new)
        deg = len(self.coeffs)
        inv += [Fraction(0)] * (deg - len(inv))
        return Cyclo(self.order, inv[:deg])

    def __truediv__(self, other):
        other = self._wrap(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._wrap(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclo.rational(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclo.rational(other, 1)
        if not isinstance(other, Cyclo):
            return NotImplemented
        a, b = Cyclo._common(self, other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        r = self.as_rational()
        if r is not None:
            return hash(r)
        return hash((self.order, self.coeffs))

    # -- Galois action and reality --------------------------------------------

    def galois(self, k: int) -> "Cyclo":
        """Apply zeta -> zeta^k; requires gcd(k, order) = 1."""
        d = self.order
        if gcd(k % d, d) != 1:
            raise ValueError("galois exponent must be coprime to the order")
        tab = _power_table(d)
        deg = len(self.coeffs)
        out = [Fraction(0)] * deg
        for i, c in enumerate(self.coeffs):
            if c:
                row = tab[(i * k) % d]
                for j in range(deg):
                    out[j] += c * row[j]
        return Cyclo(d, out)

    def conjugate(self) -> "Cyclo":
        """Complex conjugation (zeta -> zeta^-1)."""
        return self.galois(self.order - 1) if self.order > 1 else self

    def is_real(self) -> bool:
        return self == self.conjugate()

    # -- numeric views ----------------------------------------------------------

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.order)
        total = 0j
        p = 1 + 0j
        for c in self.coeffs:
            if c:
                total += float(c) * p
            p *= z
        return total

    def to_mpc(self, dps: int = 50):
        with mpmath.workdps(dps):
            z = mpmath.expjpi(mpmath.mpf(2) / self.order)
            total = mpmath.mpc(0)
            p = mpmath.mpc(1)
            for c in self.coeffs:
                if c:
                    total += mpmath.mpf(c.numerator) / c.denominator * p
                p *= z
            return total

    def __repr__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                if i == 0:
                    parts.append(str(c))
                elif i == 1:
                    parts.append(f"{c}*z")
                else:
                    parts.append(f"{c}*z^{i}")
        body = " + ".join(parts) if parts else "0"
        return f"Cyclo[{self.order}]({body})"
