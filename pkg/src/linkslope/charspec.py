"""Characters on the link group and kernel computation at them.

Three backends compute the kernel of ``(a, b) -> a v1 + b v2`` modulo a row
span: exact cyclotomic linear algebra for root-of-unity characters, numpy
SVD with a guarded rank cutoff for numeric ones, and fraction-free
elimination over the rational function field for symbolic (lambda = 0)
computations.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import gcd as igcd
from typing import Sequence

import mpmath
import numpy as np

from .cyclotomic import Cyclo
from .laurent import (MultiLaurent, exact_div, format_poly, laurent_gcd,
                      unit_normalize)

#: largest root-of-unity order handled exactly (lcm over coordinates)
MAX_EXACT_ORDER = 120

DEFAULT_TOL = 1e-9
DEFAULT_GAP = 1e3


class CharspecError(ValueError):
    pass


class IndeterminateRankError(ArithmeticError):
    """A numeric rank decision was too close to call.

    Carries the offending singular-value ratio; callers must not guess.
    """

    def __init__(self, ratio: float, where: str = ""):
        self.ratio = ratio
        super().__init__(
            f"indeterminate numeric rank{' in ' + where if where else ''}: "
            f"singular value gap ratio {ratio:.3g} below the safety threshold")


@dataclass(frozen=True)
class ExactRoot:
    """exp(2*pi*i * n / d), stored with the fraction reduced and 0 <= n < d."""

    n: int
    d: int

    def __post_init__(self):
        if self.d <= 0:
            raise CharspecError("root order must be positive")
        g = igcd(self.n % self.d, self.d)
        object.__setattr__(self, "n", (self.n % self.d) // g if g else 0)
        object.__setattr__(self, "d", self.d // g if g else 1)

    def is_one(self) -> bool:
        return self.n == 0

    def inverse(self) -> "ExactRoot":
        return ExactRoot(-self.n, self.d)

    conjugate = inverse

    def log_fraction(self) -> Fraction:
        return Fraction(self.n, self.d)

    def to_complex(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.n / self.d)

    def to_cyclo(self, order: int | None = None) -> Cyclo:
        z = Cyclo.root_of_unity(self.n, self.d)
        return z.promote(order) if order else z

    def __str__(self):
        return f"root:{self.n}/{self.d}"


Coordinate = ExactRoot | complex


@dataclass(frozen=True)
class Character:
    """A character of the colored link group, one coordinate per color."""

    coords: tuple[Coordinate, ...]

    @staticmethod
    def of(*coords) -> "Character":
        out = []
        for c in coords:
            if isinstance(c, ExactRoot):
                out.append(c)
            elif isinstance(c, (int, float)):
                out.append(complex(c))
            elif isinstance(c, complex):
                out.append(c)
            else:
                raise CharspecError(f"bad coordinate {c!r}")
        return Character(tuple(out))

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, ExactRoot) for c in self.coords)

    @property
    def unitary(self) -> bool:
        return all(isinstance(c, ExactRoot) or abs(abs(c) - 1) < 1e-12
                   for c in self.coords)

    def lcm_order(self) -> int:
        if not self.is_exact:
            raise CharspecError("not an exact character")
        m = 1
        for c in self.coords:
            m = m * c.d // igcd(m, c.d)
        return m

    def inverse(self) -> "Character":
        return Character(tuple(
            c.inverse() if isinstance(c, ExactRoot) else 1 / c
            for c in self.coords))

    def conjugate(self) -> "Character":
        return Character(tuple(
            c.conjugate() if isinstance(c, ExactRoot) else c.conjugate()
            for c in self.coords))

    def to_complex(self) -> tuple[complex, ...]:
        return tuple(c.to_complex() if isinstance(c, ExactRoot) else c
                     for c in self.coords)

    def to_mpc(self, dps: int = 50):
        out = []
        with mpmath.workdps(dps):
            for c in self.coords:
                if isinstance(c, ExactRoot):
                    out.append(mpmath.expjpi(mpmath.mpf(2 * c.n) / c.d))
                else:
                    out.append(mpmath.mpc(c))
        return tuple(out)

    def to_cyclo(self) -> tuple[Cyclo, ...]:
        order = self.lcm_order()
        return tuple(c.to_cyclo(order) for c in self.coords)

    def drop(self, indices) -> "Character":
        drop = set(indices)
        return Character(tuple(c for i, c in enumerate(self.coords)
                               if i not in drop))

    def __str__(self):
        return ",".join(
            str(c) if isinstance(c, ExactRoot) else f"c:{c.real:g},{c.imag:g}"
            for c in self.coords)


def parse_character(text: str) -> Character:
    """Parse ``root:n/d`` / ``c:re,im`` items, comma-separated."""
    toks = [t.strip() for t in text.split(",")]
    coords: list[Coordinate] = []
    i = 0
    while i < len(toks):
        t = toks[i]
        if t.startswith("root:"):
            n, _, d = t[5:].partition("/")
            coords.append(ExactRoot(int(n), int(d or 1)))
            i += 1
        elif t.startswith("c:"):
            re_part = float(t[2:])
            im_part = float(toks[i + 1]) if i + 1 < len(toks) else 0.0
            coords.append(complex(re_part, im_part))
            i += 2
        elif t in ("1", "-1", "i", "-i"):
            coords.append({"1": ExactRoot(0, 1), "-1": ExactRoot(1, 2),
                           "i": ExactRoot(1, 4), "-i": ExactRoot(3, 4)}[t])
            i += 1
        else:
            raise CharspecError(f"cannot parse character coordinate {t!r}")
    return Character(tuple(coords))


def is_nonvanishing(omega: Character, tol: float = 1e-12) -> bool:
    """No coordinate equals 1 (exact for roots, tolerance for numerics)."""
    for c in omega.coords:
        if isinstance(c, ExactRoot):
            if c.is_one():
                return False
        elif abs(c - 1) <= tol:
            return False
    return True


def is_admissible(omega: Character, lam: Sequence[int], tol: float = 1e-9) -> bool:
    """Does omega kill the class of K, i.e. prod omega_i^lambda_i = 1?"""
    if len(omega) != len(lam):
        raise CharspecError(
            f"character has {len(omega)} coordinates, linking vector {len(lam)}")
    if omega.is_exact:
        total = Fraction(0)
        for c, k in zip(omega.coords, lam):
            total += k * Fraction(c.n, c.d)
        return total.denominator == 1
    prod = 1 + 0j
    for c, k in zip(omega.to_complex(), lam):
        prod *= c ** k
    return abs(prod - 1) <= tol


# ---------------------------------------------------------------------------
# specialization
# ---------------------------------------------------------------------------

def specialize_numeric(matrix: Sequence[Sequence[MultiLaurent]],
                       point: Sequence[complex], dps: int | None = None) -> np.ndarray:
    """Entrywise evaluation into a complex numpy matrix.

    With ``dps`` set, entries are accumulated in mpmath at that precision
    before rounding to complex128 (for characters beyond the exact range).
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    out = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(matrix):
        for j, p in enumerate(row):
            if dps is None:
                out[i, j] = complex(p.evaluate(point))
            else:
                with mpmath.workdps(dps):
                    out[i, j] = complex(p.evaluate(point))
    return out


def specialize_exact(matrix: Sequence[Sequence[MultiLaurent]],
                     point: Sequence[Cyclo]) -> list[list[Cyclo]]:
    order = 1
    for z in point:
        order = order * z.order // igcd(order, z.order)
    pt = [z.promote(order) for z in point]
    out = []
    for row in matrix:
        out.append([_eval_cyclo(p, pt, order) for p in row])
    return out


def _eval_cyclo(p: MultiLaurent, point: Sequence[Cyclo], order: int) -> Cyclo:
    total = Cyclo.zero(order)
    for exp, c in p.terms.items():
        term = Cyclo.rational(c, order)
        for z, k in zip(point, exp):
            if k:
                term = term * z ** k
        total = total + term
    return total


def specialize_point(omega: Character, with_t: bool, exact: bool):
    """The evaluation point (t = 1 prepended when ``with_t``)."""
    if exact:
        order = omega.lcm_order()
        pt = [c.to_cyclo(order) for c in omega.coords]
        one = Cyclo.rational(1, order)
        return ([one] + pt) if with_t else pt
    pt = list(omega.to_complex())
    return ([1 + 0j] + pt) if with_t else pt


# ---------------------------------------------------------------------------
# kernel of a pair modulo an image
# ---------------------------------------------------------------------------

@dataclass
class KernelResult:
    """Classification of ker[(a,b) -> a v1 + b v2 mod row span]."""

    kind: str  # "zero" | "line" | "two"
    pair: tuple | None = None  # (a, b) spanning the line

    @staticmethod
    def zero_dim():
        return KernelResult("zero")

    @staticmethod
    def two_dim():
        return KernelResult("two")

    @staticmethod
    def line(a, b):
        return KernelResult("line", (a, b))


def _guarded_rank(s: np.ndarray, tol: float, gap: float, scale: float,
                  where: str) -> int:
    cut = tol * max(scale, 1e-300)
    r = int(np.sum(s > cut))
    if r < len(s) and r > 0:
        kept, dropped = s[r - 1], s[r]
        if dropped > 0 and kept / dropped < gap:
            raise IndeterminateRankError(kept / dropped, where)
    if r < len(s):
        dropped = s[r]
        if dropped > cut / gap and dropped <= cut:
            raise IndeterminateRankError(dropped / max(cut, 1e-300), where)
    return r


def kernel_of_pair_numeric(v1: np.ndarray, v2: np.ndarray, image: np.ndarray,
                           tol: float = DEFAULT_TOL,
                           gap: float = DEFAULT_GAP) -> KernelResult:
    """SVD-based kernel classification with an explicit indeterminacy guard."""
    v1 = np.asarray(v1, dtype=complex)
    v2 = np.asarray(v2, dtype=complex)
    image = np.asarray(image, dtype=complex)
    scale = max(np.linalg.norm(v1), np.linalg.norm(v2), 1.0)
    if image.size:
        u, s, vh = np.linalg.svd(image)
        r = _guarded_rank(s, tol, gap, s[0] if len(s) else 1.0, "image")
        basis = vh[:r]
        p1 = v1 - basis.T @ (basis.conj() @ v1) if r else v1
        p2 = v2 - basis.T @ (basis.conj() @ v2) if r else v2
    else:
        p1, p2 = v1, v2
    rmat = np.vstack([p1, p2])
    u, s, vh = np.linalg.svd(rmat)
    rank = _guarded_rank(s, tol, gap, scale, "pair")
    if rank == 0:
        return KernelResult.two_dim()
    if rank == 2:
        return KernelResult.zero_dim()
    ab = u[:, 1].conj()
    k = int(np.argmax(np.abs(ab)))
    ab = ab / ab[k]
    return KernelResult.line(complex(ab[0]), complex(ab[1]))


def _echelon_cyclo(rows: list[list[Cyclo]]) -> list[list[Cyclo]]:
    """In-place reduced row echelon over a cyclotomic field; returns pivots rows."""
    if not rows:
        return []
    cols = len(rows[0])
    ech: list[list[Cyclo]] = []
    work = [list(r) for r in rows]
    pivot_cols: list[int] = []
    for col in range(cols):
        pivot = None
        for r in work:
            if not r[col].is_zero():
                pivot = r
                break
        if pivot is None:
            continue
        work.remove(pivot)
        inv = pivot[col].inverse()
        pivot = [x * inv for x in pivot]
        for r in work:
            if not r[col].is_zero():
                f = r[col]
                for j in range(col, cols):
                    r[j] = r[j] - f * pivot[j]
        for r in ech:
            if not r[col].is_zero():
                f = r[col]
                for j in range(col, cols):
                    r[j] = r[j] - f * pivot[j]
        ech.append(pivot)
        pivot_cols.append(col)
        work = [r for r in work if any(not x.is_zero() for x in r)]
    return ech


def _reduce_against(v: list[Cyclo], ech: list[list[Cyclo]]) -> list[Cyclo]:
    out = list(v)
    cols = len(out)
    for row in ech:
        lead = next(j for j in range(cols) if not row[j].is_zero())
        if not out[lead].is_zero():
            f = out[lead]
            for j in range(lead, cols):
                out[j] = out[j] - f * row[j]
    return out


def kernel_of_pair_exact(v1: Sequence[Cyclo], v2: Sequence[Cyclo],
                         image: Sequence[Sequence[Cyclo]]) -> KernelResult:
    """Tolerance-free kernel classification over a cyclotomic field."""
    ech = _echelon_cyclo([list(r) for r in image])
    r1 = _reduce_against(list(v1), ech)
    r2 = _reduce_against(list(v2), ech)
    z1 = all(x.is_zero() for x in r1)
    z2 = all(x.is_zero() for x in r2)
    if z1 and z2:
        return KernelResult.two_dim()
    if z1:
        return KernelResult.line(Cyclo.rational(1), Cyclo.zero())
    if z2:
        return KernelResult.line(Cyclo.zero(), Cyclo.rational(1))
    j = next(k for k, x in enumerate(r1) if not x.is_zero())
    if r2[j].is_zero():
        return KernelResult.zero_dim()
    c = r1[j] / r2[j]
    for x, y in zip(r1, r2):
        if not (x - c * y).is_zero():
            return KernelResult.zero_dim()
    # r1 - c r2 = 0, so a v1 + b v2 in span for (a, b) = (1, -c)
    return KernelResult.line(Cyclo.rational(1), -c)


# ---------------------------------------------------------------------------
# the symbolic field and symbolic kernels
# ---------------------------------------------------------------------------

class RatFunc:
    """An element of the rational function field Q(t_1, .., t_mu).

    Kept reduced: numerator and denominator share no factor, and the
    denominator is in unit-normal form.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiLaurent, den: MultiLaurent | None = None,
                 reduce: bool = True):
        if den is None:
            den = MultiLaurent.one(num.num_vars)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = MultiLaurent.one(num.num_vars)
        else:
            if reduce:
                g = laurent_gcd(num, den).core
                if not g.is_one():
                    num = exact_div(num, g)
                    den = exact_div(den, g)
            # put the denominator in unit-normal form, folding the unit into num
            nf = unit_normalize(den)
            new_num = exact_div(num * nf.core, den)
            if new_num is None:
                raise ArithmeticError("denominator normalization failed")
            num, den = new_num, nf.core
        self.num = num
        self.den = den

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, other):
        other = _as_rat(other, self.num.num_vars)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-_as_rat(other, self.num.num_vars))

    def __mul__(self, other):
        other = _as_rat(other, self.num.num_vars)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rat(other, self.num.num_vars)
        if other.is_zero():
            raise ZeroDivisionError
        return RatFunc(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        if isinstance(other, (int, MultiLaurent)):
            other = _as_rat(other, self.num.num_vars)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def evaluate(self, point):
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        n = self.num.evaluate(point)
        if isinstance(n, Fraction) and isinstance(d, Fraction):
            return n / d
        return n / d

    def format(self, names=None) -> str:
        if self.den.is_one():
            return format_poly(self.num, names)
        return f"({format_poly(self.num, names)}) / ({format_poly(self.den, names)})"

    def __str__(self):
        return self.format()

    __repr__ = __str__


def _as_rat(x, num_vars) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, MultiLaurent):
        return RatFunc(x)
    if isinstance(x, (int, Fraction)):
        return RatFunc(MultiLaurent.const(num_vars, x))
    raise TypeError(f"cannot coerce {type(x).__name__} to RatFunc")


def _bareiss_echelon(rows: list[list[MultiLaurent]]) -> list[tuple[int, list[MultiLaurent]]]:
    """Fraction-free row echelon; returns (pivot column, row) pairs.

    Rows are polynomial; each elimination step divides by the previous
    pivot (Bareiss), keeping entries polynomial and sizes controlled.
    """
    if not rows:
        return []
    work = [list(r) for r in rows]
    cols = len(work[0])
    ech: list[tuple[int, list[MultiLaurent]]] = []
    prev_pivot: MultiLaurent | None = None
    for col in range(cols):
        pick = None
        for i, r in enumerate(work):
            if not r[col].is_zero():
                if pick is None or len(r[col].terms) < len(work[pick][col].terms):
                    pick = i
        if pick is None:
            continue
        pivot_row = work.pop(pick)
        pivot = pivot_row[col]
        new_work = []
        for r in work:
            if r[col].is_zero():
                out = [x * pivot for x in r]
            else:
                f = r[col]
                out = [x * pivot - pivot_row[j] * f for j, x in enumerate(r)]
            if prev_pivot is not None:
                out = [_exact_div_checked(x, prev_pivot) for x in out]
            if any(not x.is_zero() for x in out):
                new_work.append(out)
        work = new_work
        ech.append((col, pivot_row))
        prev_pivot = pivot
    return ech


def _exact_div_checked(p: MultiLaurent, q: MultiLaurent) -> MultiLaurent:
    if p.is_zero():
        return p
    out = exact_div(p, q)
    if out is None:
        raise ArithmeticError("Bareiss division must be exact")
    return out


def _reduce_vec(v: list[MultiLaurent], ech) -> list[MultiLaurent]:
    out = list(v)
    for col, row in ech:
        pivot = row[col]
        f = out[col]
        out = [x * pivot - row[j] * f for j, x in enumerate(out)]
    return out


def kernel_of_pair_symbolic(v1: Sequence[MultiLaurent], v2: Sequence[MultiLaurent],
                            image: Sequence[Sequence[MultiLaurent]]) -> KernelResult:
    """Generic kernel over the rational function field.

    Returns a Line whose (a, b) are polynomials; the slope -a/b is then a
    rational function valid on a dense open subset of the torus.
    """
    ech = _bareiss_echelon([list(r) for r in image])
    r1 = _reduce_vec(list(v1), ech)
    r2 = _reduce_vec(list(v2), ech)
    z1 = all(x.is_zero() for x in r1)
    z2 = all(x.is_zero() for x in r2)
    n = v1[0].num_vars if v1 else 0
    one = MultiLaurent.one(n)
    if z1 and z2:
        return KernelResult.two_dim()
    if z1:
        return KernelResult.line(one, MultiLaurent.zero(n))
    if z2:
        return KernelResult.line(MultiLaurent.zero(n), one)
    j = next(k for k, x in enumerate(r1) if not x.is_zero())
    if r2[j].is_zero():
        return KernelResult.zero_dim()
    # proportionality over the fraction field: r1[j] r2 == r2[j] r1
    for x, y in zip(r1, r2):
        if not (x * r2[j] - y * r1[j]).is_zero():
            return KernelResult.zero_dim()
    return KernelResult.line(r2[j], -r1[j])
