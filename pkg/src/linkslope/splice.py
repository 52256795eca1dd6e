"""Correction-term calculus for splices of links along distinguished knots.

All arithmetic here is exact: extended reals live on the one-point circle
R u {infinity} (no signed infinities), the sign function sg vanishes at 0
and infinity, and the ambiguous difference infinity - infinity is
disambiguated to 0.  The two correction terms are

    delta_sigma(k', k'') = sg k' - sg(1/k' - k''),
    delta_eta(k', k'')   = [k' != inf] + [k'' != inf] + [k'' = 1/k'] - 1,

with 1/0 = infinity and 1/infinity = 0.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Sequence

from .charspec import Character, ExactRoot


class SpliceError(ValueError):
    pass


class ExtReal:
    """An element of R u {infinity} (one-point compactification)."""

    __slots__ = ("value",)
    _INF = None

    def __init__(self, value):
        if value is None:
            self.value = None
            return
        if isinstance(value, ExtReal):
            self.value = value.value
            return
        if isinstance(value, float) and value in (float("inf"), float("-inf")):
            self.value = None
            return
        self.value = Fraction(value) if not isinstance(value, float) else value

    @classmethod
    def infinity(cls) -> "ExtReal":
        if cls._INF is None:
            cls._INF = cls(None)
        return cls._INF

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def recip(self) -> "ExtReal":
        if self.is_infinite:
            return ExtReal(0)
        if self.value == 0:
            return ExtReal.infinity()
        return ExtReal(1 / self.value if isinstance(self.value, float)
                       else Fraction(1) / self.value)

    def __sub__(self, other: "ExtReal") -> "ExtReal":
        other = as_ext(other)
        if self.is_infinite and other.is_infinite:
            return ExtReal(0)  # the disambiguation convention
        if self.is_infinite or other.is_infinite:
            return ExtReal.infinity()
        return ExtReal(self.value - other.value)

    def __eq__(self, other):
        other = as_ext(other)
        if self.is_infinite or other.is_infinite:
            return self.is_infinite and other.is_infinite
        return self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return "infinity" if self.is_infinite else str(self.value)


def as_ext(x) -> ExtReal:
    if isinstance(x, ExtReal):
        return x
    if x is None:
        return ExtReal.infinity()
    return ExtReal(x)


def sg(x) -> int:
    """Sign with sg(0) = sg(infinity) = 0."""
    x = as_ext(x)
    if x.is_infinite or x.value == 0:
        return 0
    return 1 if x.value > 0 else -1


def log_frac(omega) -> Fraction | float:
    """Log: S^1 -> [0, 1), exact on exact roots of unity."""
    if isinstance(omega, ExactRoot):
        return Fraction(omega.n, omega.d)
    z = complex(omega)
    if abs(abs(z) - 1) > 1e-9:
        raise SpliceError(f"Log needs a unitary value, got |z| = {abs(z)}")
    t = cmath.phase(z) / (2 * cmath.pi)
    return t % 1.0


def ind(x) -> int:
    """The index floor(x) - floor(-x); exact on rationals."""
    if isinstance(x, Fraction):
        return (x.numerator // x.denominator) - ((-x).numerator // x.denominator)
    return floor(x) - floor(-x)


def defect(lam: Sequence[int], omega: Character) -> int:
    """ind(sum lambda_i Log w_i) - sum lambda_i ind(Log w_i)."""
    if len(lam) != len(omega):
        raise SpliceError("linking vector and character length mismatch")
    logs = [log_frac(c) for c in omega.coords]
    total = sum(l * x for l, x in zip(lam, logs))
    if not isinstance(total, Fraction):
        total = float(total)
    return ind(total) - sum(l * ind(x) for l, x in zip(lam, logs))


def upsilon(lam: Sequence[int], omega: Character):
    """omega^lambda, the value of the character on the distinguished class."""
    if len(lam) != len(omega):
        raise SpliceError("linking vector and character length mismatch")
    if omega.is_exact:
        total = Fraction(0)
        for c, k in zip(omega.coords, lam):
            total += k * Fraction(c.n, c.d)
        total %= 1
        return ExactRoot(total.numerator, total.denominator)
    out = 1 + 0j
    for c, k in zip(omega.to_complex(), lam):
        out *= c ** k
    return out


def delta_sigma(k1, k2) -> int:
    """The signature correction sg k' - sg(1/k' - k''); symmetric, in {0,+-1,+-2}."""
    k1, k2 = as_ext(k1), as_ext(k2)
    return sg(k1) - sg(k1.recip() - k2)


def delta_eta(k1, k2) -> int:
    """The nullity correction, in {-1, 0, 1, 2}."""
    k1, k2 = as_ext(k1), as_ext(k2)
    total = -1
    if not k1.is_infinite:
        total += 1
    if not k2.is_infinite:
        total += 1
    if k2 == k1.recip():
        total += 1
    return total


def sgn_triple(k0, k1, k2) -> int:
    """The Maslov-type sign of a triple of isotropic directions.

    sg[(k0-k1)(k1-k2)(k2-k0)] for finite entries; with infinity among the
    arguments, cyclic reduction to sg of the difference of the other two.
    """
    ks = [as_ext(k0), as_ext(k1), as_ext(k2)]
    inf_at = [i for i, k in enumerate(ks) if k.is_infinite]
    if len(inf_at) >= 2:
        return 0
    if len(inf_at) == 1:
        i = inf_at[0]
        # sgn(inf, a, b) = sg(b - a), cyclically
        a, b = ks[(i + 1) % 3], ks[(i + 2) % 3]
        return sg(b - a)
    s = (ks[0].value - ks[1].value) * (ks[1].value - ks[2].value) \
        * (ks[2].value - ks[0].value)
    return 0 if s == 0 else (1 if s > 0 else -1)


def pairing(a, b) -> complex:
    """The standard skew-Hermitian form with m^2 = l^2 = 0, m o l = -1."""
    return -a[0] * b[1].conjugate() + a[1] * b[0].conjugate()


def is_isotropic(a, tol: float = 1e-9) -> bool:
    return abs(pairing(a, a)) <= tol * max(1.0, abs(a[0]) ** 2 + abs(a[1]) ** 2)


def sgn_from_vectors(a0, a1, a2, tol: float = 1e-9) -> int:
    """sg of the product of pairings of three isotropic 2-vectors.

    Agrees with :func:`sgn_triple` of the three slopes -a/b; raises on
    non-isotropic input.
    """
    vecs = [tuple(map(complex, v)) for v in (a0, a1, a2)]
    for v in vecs:
        if not is_isotropic(v, tol):
            raise SpliceError(f"vector {v} is not isotropic for the standard form")
    p = pairing(vecs[0], vecs[1]) * pairing(vecs[1], vecs[2]) \
        * pairing(vecs[2], vecs[0])
    if abs(p.imag) > tol * max(1.0, abs(p)):
        raise SpliceError(f"triple product {p} is not real")
    if abs(p) <= tol:
        return 0
    return 1 if p.real > 0 else -1


def slope_of_vector(v) -> ExtReal:
    """-a/b for the direction of a*m + b*l; infinity when b = 0."""
    a, b = complex(v[0]), complex(v[1])
    if abs(b) < 1e-12 * max(1.0, abs(a)):
        return ExtReal.infinity()
    val = -a / b
    if abs(val.imag) > 1e-9 * max(1.0, abs(val)):
        raise SpliceError(f"direction slope {val} is not real")
    return ExtReal(val.real)


# ---------------------------------------------------------------------------
# splice assembly
# ---------------------------------------------------------------------------

@dataclass
class SpliceSide:
    """User-supplied data for one side of a splice."""

    sigma: int
    eta: int
    lam: tuple[int, ...]
    omega: Character
    slope: ExtReal | None = None  # required only in the exceptional branch

    @property
    def defect_value(self) -> int:
        return defect(self.lam, self.omega)

    @property
    def upsilon_value(self):
        return upsilon(self.lam, self.omega)

    def admissible(self) -> bool:
        u = self.upsilon_value
        if isinstance(u, ExactRoot):
            return u.is_one()
        return abs(u - 1) < 1e-9


@dataclass
class SpliceResult:
    sigma: int
    eta: int
    branch: str  # "generic" or "exceptional"
    delta_sigma: int = 0
    delta_eta: int = 0
    defect_product: int = 0

    def as_json(self):
        return {
            "sigma": self.sigma, "eta": self.eta, "branch": self.branch,
            "delta_sigma": self.delta_sigma, "delta_eta": self.delta_eta,
            "defect_product": self.defect_product,
        }


def splice_assemble(side1: SpliceSide, side2: SpliceSide) -> SpliceResult:
    """Combine per-side signature/nullity data into splice totals.

    In the generic branch ((upsilon', upsilon'') != (1, 1)) the inputs
    sigma* must be the signatures of K* u L* at the glued characters; the
    totals are their sum plus the defect product (nullity: plain sum).  In
    the exceptional branch (both admissible) the inputs are the signatures
    of L* alone and the slope correction terms enter.
    """
    adm1, adm2 = side1.admissible(), side2.admissible()
    d1, d2 = side1.defect_value, side2.defect_value
    if not (adm1 and adm2):
        return SpliceResult(
            sigma=side1.sigma + side2.sigma + d1 * d2,
            eta=side1.eta + side2.eta,
            branch="generic", defect_product=d1 * d2)
    if side1.slope is None or side2.slope is None:
        raise SpliceError(
            "exceptional branch (both characters admissible) needs both slopes")
    ds = delta_sigma(side1.slope, side2.slope)
    de = delta_eta(side1.slope, side2.slope)
    return SpliceResult(
        sigma=side1.sigma + side2.sigma + d1 * d2 + ds,
        eta=side1.eta + side2.eta + de,
        branch="exceptional", delta_sigma=ds, delta_eta=de,
        defect_product=d1 * d2)
