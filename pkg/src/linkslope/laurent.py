"""Sparse multivariate Laurent polynomials with exact rational coefficients.

This is the coefficient ring for everything downstream: Fox derivatives,
Alexander matrices, Burau matrices and Conway potentials all live here.
Polynomials are immutable; every operation returns a fresh value.

A polynomial in ``n`` variables is a finite map from integer exponent
vectors (length ``n``, entries may be negative) to nonzero ``Fraction``
coefficients.  Variable 0 is the distinguished variable ``t`` whenever a
distinguished knot component is in play; callers choose display names.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class LaurentError(ValueError):
    """Structural misuse: mismatched variable counts, bad exponents."""


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise LaurentError(f"coefficient must be int or Fraction, got {type(c).__name__}")


class MultiLaurent:
    """A sparse Laurent polynomial over Q in a fixed number of variables."""

    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms: Mapping[tuple, object] | None = None):
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != num_vars:
                    raise LaurentError(
                        f"exponent vector {exp} has length {len(exp)}, expected {num_vars}")
                c = _coerce(c)
                if c != 0:
                    clean[exp] = clean.get(exp, Fraction(0)) + c
                    if clean[exp] == 0:
                        del clean[exp]
        self.num_vars = num_vars
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(num_vars: int) -> "MultiLaurent":
        return MultiLaurent(num_vars)

    @staticmethod
    def const(num_vars: int, c) -> "MultiLaurent":
        return MultiLaurent(num_vars, {(0,) * num_vars: _coerce(c)})

    @staticmethod
    def one(num_vars: int) -> "MultiLaurent":
        return MultiLaurent.const(num_vars, 1)

    @staticmethod
    def var(num_vars: int, index: int, power: int = 1) -> "MultiLaurent":
        if not 0 <= index < num_vars:
            raise LaurentError(f"variable index {index} out of range for {num_vars} variables")
        exp = [0] * num_vars
        exp[index] = power
        return MultiLaurent(num_vars, {tuple(exp): 1})

    @staticmethod
    def monomial(num_vars: int, exp: Sequence[int], c=1) -> "MultiLaurent":
        return MultiLaurent(num_vars, {tuple(exp): _coerce(c)})

    # -- basics ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(0,) * self.num_vars: Fraction(1)}

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exp) for exp in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise LaurentError("not a constant polynomial")
        return self.terms.get((0,) * self.num_vars, Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = MultiLaurent.const(self.num_vars, other)
        if not isinstance(other, MultiLaurent):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.num_vars, frozenset(self.terms.items())))

    def _check(self, other: "MultiLaurent"):
        if self.num_vars != other.num_vars:
            raise LaurentError(
                f"variable count mismatch: {self.num_vars} vs {other.num_vars}")

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = MultiLaurent.const(self.num_vars, other)
        self._check(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            s = terms.get(exp, Fraction(0)) + c
            if s:
                terms[exp] = s
            else:
                terms.pop(exp, None)
        out = MultiLaurent.__new__(MultiLaurent)
        out.num_vars, out.terms = self.num_vars, terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = MultiLaurent.__new__(MultiLaurent)
        out.num_vars = self.num_vars
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, int):
            other = MultiLaurent.const(self.num_vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return MultiLaurent.zero(self.num_vars)
            out = MultiLaurent.__new__(MultiLaurent)
            out.num_vars = self.num_vars
            out.terms = {e: c * other for e, c in self.terms.items()}
            return out
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    terms.pop(e, None)
        out = MultiLaurent.__new__(MultiLaurent)
        out.num_vars, out.terms = self.num_vars, terms
        return out

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise LaurentError("only monomials are invertible")
            (exp, c), = self.terms.items()
            inv = MultiLaurent.monomial(self.num_vars, [-e for e in exp], Fraction(1) / c)
            return inv ** (-k)
        result = MultiLaurent.one(self.num_vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- involution, derivative, evaluation ---------------------------------

    def involute(self) -> "MultiLaurent":
        """The bar involution: every variable is sent to its inverse."""
        out = MultiLaurent.__new__(MultiLaurent)
        out.num_vars = self.num_vars
        out.terms = {tuple(-e for e in exp): c for exp, c in self.terms.items()}
        return out

    def derivative(self, var: int) -> "MultiLaurent":
        """Formal partial derivative with respect to variable ``var``."""
        if not 0 <= var < self.num_vars:
            raise LaurentError(f"variable index {var} out of range")
        terms: dict = {}
        for exp, c in self.terms.items():
            k = exp[var]
            if k == 0:
                continue
            e = list(exp)
            e[var] = k - 1
            e = tuple(e)
            s = terms.get(e, Fraction(0)) + c * k
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        out = MultiLaurent.__new__(MultiLaurent)
        out.num_vars, out.terms = self.num_vars, terms
        return out

    def evaluate(self, point: Sequence):
        """Evaluate at a point with nonzero coordinates.

        Coordinates may be complex numbers, ``Fraction``s, or any field
        elements supporting ``**`` with negative integer exponents (the
        cyclotomic numbers of :mod:`linkslope.charspec` qualify).
        """
        if len(point) != self.num_vars:
            raise LaurentError(f"point has {len(point)} coordinates, expected {self.num_vars}")
        for x in point:
            if x == 0:
                raise LaurentError("Laurent polynomials cannot be evaluated at 0")
        total = None
        for exp, c in self.terms.items():
            term = c
            for x, k in zip(point, exp):
                if k:
                    term = term * x ** k
            total = term if total is None else total + term
        if total is None:
            return Fraction(0)
        return total

    def substitute(self, var: int, value: "MultiLaurent") -> "MultiLaurent":
        """Substitute a polynomial for one variable.

        ``value`` must be a monomial whenever ``var`` occurs with negative
        exponents.  The substituted variable keeps its slot (set to unused).
        """
        if not 0 <= var < self.num_vars:
            raise LaurentError("variable index out of range")
        self_shifted_vars = self.num_vars
        if value.num_vars != self_shifted_vars:
            raise LaurentError("substitution value must share the variable count")
        result = MultiLaurent.zero(self.num_vars)
        for exp, c in self.terms.items():
            e = list(exp)
            k = e[var]
            e[var] = 0
            term = MultiLaurent.monomial(self.num_vars, e, c)
            if k:
                term = term * value ** k
            result = result + term
        return result

    def set_vars_to_one(self, vars: Iterable[int]) -> "MultiLaurent":
        """Specialize the listed variables to 1 (their slots become unused)."""
        vs = set(vars)
        terms: dict = {}
        for exp, c in self.terms.items():
            e = tuple(0 if i in vs else k for i, k in enumerate(exp))
            s = terms.get(e, Fraction(0)) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        out = MultiLaurent.__new__(MultiLaurent)
        out.num_vars, out.terms = self.num_vars, terms
        return out

    def drop_var(self, var: int) -> "MultiLaurent":
        """Remove an unused variable slot."""
        terms = {}
        for exp, c in self.terms.items():
            if exp[var] != 0:
                raise LaurentError(f"variable {var} still occurs")
            terms[exp[:var] + exp[var + 1:]] = c
        return MultiLaurent(self.num_vars - 1, terms)

    def insert_var(self, position: int, extra: int = 1) -> "MultiLaurent":
        """Add unused variable slots at ``position``."""
        zeros = (0,) * extra
        terms = {exp[:position] + zeros + exp[position:]: c for exp, c in self.terms.items()}
        return MultiLaurent(self.num_vars + extra, terms)

    def permute_vars(self, perm: Sequence[int]) -> "MultiLaurent":
        """Relabel variables: new index i carries old index perm[i]."""
        if sorted(perm) != list(range(self.num_vars)):
            raise LaurentError("not a permutation")
        terms = {tuple(exp[perm[i]] for i in range(self.num_vars)): c
                 for exp, c in self.terms.items()}
        return MultiLaurent(self.num_vars, terms)

    def uses_var(self, var: int) -> bool:
        return any(exp[var] != 0 for exp in self.terms)

    # -- support geometry ----------------------------------------------------

    def exponent_range(self, var: int) -> tuple[int, int]:
        """(min, max) exponent of ``var`` over the support; (0, 0) if zero."""
        if not self.terms:
            return (0, 0)
        es = [exp[var] for exp in self.terms]
        return (min(es), max(es))

    def min_exponents(self) -> tuple:
        return tuple(self.exponent_range(i)[0] for i in range(self.num_vars))

    def shift(self, offsets: Sequence[int]) -> "MultiLaurent":
        """Multiply by the monomial with the given exponent vector."""
        terms = {tuple(e + o for e, o in zip(exp, offsets)): c
                 for exp, c in self.terms.items()}
        out = MultiLaurent.__new__(MultiLaurent)
        out.num_vars, out.terms = self.num_vars, terms
        return out

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(exp) for exp in self.terms)

    # -- display -------------------------------------------------------------

    def __repr__(self):
        return f"MultiLaurent({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


# ---------------------------------------------------------------------------
# text form
# ---------------------------------------------------------------------------

def default_names(num_vars: int, with_t: bool = True) -> list[str]:
    """Variable display names: ``t, t1, ..`` or ``t1, t2, ..``."""
    if with_t:
        return ["t"] + [f"t{i}" for i in range(1, num_vars)]
    return [f"t{i + 1}" for i in range(num_vars)]


def _grlex_key(exp):
    return (sum(exp), exp)


def format_poly(p: MultiLaurent, names: Sequence[str] | None = None) -> str:
    """Serialize as a sum of ``c*t0^a0*...`` terms, highest grlex term first."""
    if names is None:
        names = default_names(p.num_vars)
    if not p.terms:
        return "0"
    parts = []
    for exp in sorted(p.terms, key=_grlex_key, reverse=True):
        c = p.terms[exp]
        factors = []
        for name, k in zip(names, exp):
            if k == 1:
                factors.append(name)
            elif k != 0:
                factors.append(f"{name}^{k}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        parts.append(("- " if c < 0 else "+ ") + body)
    out = " ".join(parts)
    return out[2:] if out.startswith("+ ") else "-" + out[2:]


_TERM_RE = re.compile(r"([+-])|([0-9]+(?:/[0-9]+)?)|([A-Za-z][A-Za-z0-9]*)(?:\^(-?[0-9]+))?|(\*)")


def parse_poly(text: str, num_vars: int, names: Sequence[str] | None = None) -> MultiLaurent:
    """Parse the output of :func:`format_poly` (and looser spellings of it)."""
    if names is None:
        names = default_names(num_vars)
    index = {n: i for i, n in enumerate(names)}
    pos = 0
    text = text.strip()
    if text in ("0", ""):
        return MultiLaurent.zero(num_vars)
    terms: dict = {}
    sign = 1
    coeff = None
    exp = [0] * num_vars
    seen_factor = False

    def flush():
        nonlocal sign, coeff, exp, seen_factor
        if seen_factor:
            c = Fraction(1) if coeff is None else coeff
            e = tuple(exp)
            terms[e] = terms.get(e, Fraction(0)) + sign * c
        sign, coeff, exp, seen_factor = 1, None, [0] * num_vars, False

    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m:
            if text[pos].isspace():
                pos += 1
                continue
            raise LaurentError(f"cannot parse polynomial at ...{text[pos:pos+20]!r}")
        pos = m.end()
        s, num, name, power, star = m.groups()
        if s:
            flush()
            sign = -1 if s == "-" else 1
        elif num:
            coeff = (Fraction(1) if coeff is None else coeff) * Fraction(num)
            seen_factor = True
        elif name:
            if name not in index:
                raise LaurentError(f"unknown variable {name!r} (expected one of {list(names)})")
            exp[index[name]] += int(power) if power else 1
            seen_factor = True
    flush()
    return MultiLaurent(num_vars, terms)


# ---------------------------------------------------------------------------
# division and gcd
# ---------------------------------------------------------------------------

def exact_div(p: MultiLaurent, q: MultiLaurent) -> MultiLaurent | None:
    """Return the exact Laurent quotient ``p / q``, or None if q does not divide p."""
    p._check(q)
    if q.is_zero():
        return MultiLaurent.zero(p.num_vars) if p.is_zero() else None
    if p.is_zero():
        return MultiLaurent.zero(p.num_vars)
    sp, sq = p.min_exponents(), q.min_exponents()
    pp = p.shift([-e for e in sp])
    qq = q.shift([-e for e in sq])
    # Long division by the grlex-leading term of qq.
    lead = max(qq.terms, key=_grlex_key)
    lc = qq.terms[lead]
    rem = pp
    quot: dict = {}
    while not rem.is_zero():
        rlead = max(rem.terms, key=_grlex_key)
        e = tuple(a - b for a, b in zip(rlead, lead))
        if any(x < 0 for x in e):
            return None
        c = rem.terms[rlead] / lc
        quot[e] = c
        rem = rem - MultiLaurent.monomial(pp.num_vars, e, c) * qq
    # restore the monomial that shifting removed
    return MultiLaurent(p.num_vars, quot).shift(
        [a - b for a, b in zip(sp, sq)])


def divides(q: MultiLaurent, p: MultiLaurent) -> bool:
    """Does ``q`` divide ``p`` up to units?"""
    return exact_div(p, q) is not None


def _content_and_primitive(p: MultiLaurent, var: int):
    """Split as content(other vars) * primitive, viewing p in Q[..][x_var].

    Returns (content, primitive) where content ignores ``var``.
    """
    by_deg: dict[int, MultiLaurent] = {}
    for exp, c in p.terms.items():
        k = exp[var]
        e = list(exp)
        e[var] = 0
        co = by_deg.setdefault(k, MultiLaurent.zero(p.num_vars))
        by_deg[k] = co + MultiLaurent.monomial(p.num_vars, e, c)
    content = MultiLaurent.zero(p.num_vars)
    for coef in by_deg.values():
        content = _gcd_raw(content, coef)
        if content.is_one():
            break
    if content.is_zero():
        return content, p
    prim = exact_div(p, content)
    assert prim is not None, "content must divide"
    return content, prim


def _gcd_raw(p: MultiLaurent, q: MultiLaurent) -> MultiLaurent:
    """gcd up to units, result in primitive integer normal form."""
    if p.is_zero():
        return unit_normalize(q).core
    if q.is_zero():
        return unit_normalize(p).core
    used = [i for i in range(p.num_vars) if p.uses_var(i) or q.uses_var(i)]
    if not used:
        return MultiLaurent.one(p.num_vars)
    var = used[-1]
    if len(used) == 1:
        return _gcd_univariate(p, q, var)
    cp, pp = _content_and_primitive(p, var)
    cq, qq = _content_and_primitive(q, var)
    cont = _gcd_raw(cp, cq)
    prim = _gcd_primitive(pp, qq, var)
    return unit_normalize(cont * prim).core


def _deg(p: MultiLaurent, var: int) -> int:
    return p.exponent_range(var)[1]


def _leading_coeff(p: MultiLaurent, var: int) -> MultiLaurent:
    d = _deg(p, var)
    terms = {}
    for exp, c in p.terms.items():
        if exp[var] == d:
            e = list(exp)
            e[var] = 0
            terms[tuple(e)] = c
    return MultiLaurent(p.num_vars, terms)


def _pseudo_rem(f: MultiLaurent, g: MultiLaurent, var: int) -> MultiLaurent:
    """Pseudo-remainder of f by g in (Q[..])[x_var]; degrees in var must be >= 0."""
    dg = _deg(g, var)
    lg = _leading_coeff(g, var)
    rem = f
    while not rem.is_zero():
        d = _deg(rem, var)
        if d < dg:
            break
        lr = _leading_coeff(rem, var)
        x_shift = [0] * f.num_vars
        x_shift[var] = d - dg
        rem = rem * lg - g * lr.shift(x_shift)
    return rem


def _shift_var_to_zero(p: MultiLaurent, var: int) -> MultiLaurent:
    lo = p.exponent_range(var)[0]
    if lo == 0:
        return p
    off = [0] * p.num_vars
    off[var] = -lo
    return p.shift(off)


def _gcd_primitive(p: MultiLaurent, q: MultiLaurent, var: int) -> MultiLaurent:
    """Primitive PRS gcd of two var-primitive polynomials."""
    p = _shift_var_to_zero(p, var)
    q = _shift_var_to_zero(q, var)
    f, g = (p, q) if _deg(p, var) >= _deg(q, var) else (q, p)
    while not g.is_zero():
        r = _pseudo_rem(f, g, var)
        if r.is_zero():
            _, gp = _content_and_primitive(g, var)
            return gp
        if not r.uses_var(var):
            return MultiLaurent.one(p.num_vars)
        _, r = _content_and_primitive(r, var)
        f, g = g, r
    _, fp = _content_and_primitive(f, var)
    return fp


def _gcd_univariate(p: MultiLaurent, q: MultiLaurent, var: int) -> MultiLaurent:
    """Exact Euclid over Q in a single variable."""
    def to_list(p):
        lo, hi = p.exponent_range(var)
        coeffs = [Fraction(0)] * (hi - lo + 1)
        for exp, c in p.terms.items():
            coeffs[exp[var] - lo] = c
        return coeffs

    a, b = to_list(p), to_list(q)

    def trim(c):
        while c and c[-1] == 0:
            c.pop()
        return c

    a, b = trim(a), trim(b)
    while b:
        # a mod b
        while len(a) >= len(b):
            f = a[-1] / b[-1]
            off = len(a) - len(b)
            for i, bc in enumerate(b):
                a[off + i] -= f * bc
            trim(a)
            if not a:
                break
        a, b = b, a
    exp = [0] * p.num_vars
    terms = {}
    for k, c in enumerate(a):
        if c:
            e = list(exp)
            e[var] = k
            terms[tuple(e)] = c
    return unit_normalize(MultiLaurent(p.num_vars, terms)).core


class UnitNormalForm:
    """Canonical representative of a polynomial modulo units (+- monomials).

    ``core`` has nonnegative exponents touching zero in every used variable,
    integer coefficients with content 1, and positive grlex-leading
    coefficient.  ``sign`` and ``monomial_shift`` record the unit that was
    removed; a rational scalar may also have been cleared (the class tracks
    only its sign).  In symmetric mode, exponents are centered so that the
    bar involution fixes ``core`` up to sign when such a centering exists.
    """

    __slots__ = ("core", "sign", "monomial_shift", "symmetric")

    def __init__(self, core: MultiLaurent, sign: int, monomial_shift: tuple,
                 symmetric: bool = False):
        self.core = core
        self.sign = sign
        self.monomial_shift = monomial_shift
        self.symmetric = symmetric

    def __eq__(self, other):
        if not isinstance(other, UnitNormalForm):
            return NotImplemented
        return self.core == other.core

    def __repr__(self):
        tag = ", symmetric" if self.symmetric else ""
        return f"UnitNormalForm({format_poly(self.core)!r}, sign={self.sign}{tag})"


def unit_normalize(p: MultiLaurent, symmetric: bool = False) -> UnitNormalForm:
    """Normal form of ``p`` modulo units; see :class:`UnitNormalForm`.

    With ``symmetric=True``, exponents are centered instead of shifted to
    zero; if no integral centering exists, falls back to canonical mode with
    ``symmetric=False`` on the result.
    """
    if p.is_zero():
        return UnitNormalForm(p, 1, (0,) * p.num_vars, symmetric)
    if symmetric:
        shift = []
        ok = True
        for i in range(p.num_vars):
            lo, hi = p.exponent_range(i)
            if (lo + hi) % 2:
                ok = False
                break
            shift.append(-(lo + hi) // 2)
        if ok:
            centered = p.shift(shift)
            core, sign = _clear_content(centered)
            if core.involute() == core or core.involute() == -core:
                return UnitNormalForm(core, sign, tuple(-s for s in shift), True)
        return unit_normalize(p, symmetric=False)
    shift = [-p.exponent_range(i)[0] for i in range(p.num_vars)]
    core, sign = _clear_content(p.shift(shift))
    return UnitNormalForm(core, sign, tuple(-s for s in shift), False)


def _clear_content(p: MultiLaurent) -> tuple[MultiLaurent, int]:
    from math import gcd as igcd
    den = 1
    for c in p.terms.values():
        den = den * c.denominator // igcd(den, c.denominator)
    num = 0
    for c in p.terms.values():
        num = igcd(num, abs(c.numerator * (den // c.denominator)))
    scale = Fraction(den, num)
    q = p * scale
    lead = max(q.terms, key=_grlex_key)
    sign = 1
    if q.terms[lead] < 0:
        q = -q
        sign = -1
    return q, sign


def laurent_gcd(p: MultiLaurent, q: MultiLaurent) -> UnitNormalForm:
    """gcd up to units; ``gcd(0, 0) = 0``."""
    p._check(q)
    g = _gcd_raw(p, q)
    return unit_normalize(g)


def gcd_many(polys: Iterable[MultiLaurent], num_vars: int) -> UnitNormalForm:
    g = MultiLaurent.zero(num_vars)
    for p in polys:
        g = _gcd_raw(g, p)
        if g.is_one():
            break
    return unit_normalize(g)
