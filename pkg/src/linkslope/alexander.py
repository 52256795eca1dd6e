"""Alexander orders, Conway-style normalization, and the Torres-ratio oracle.

Orders are gcds of minors of the Fox matrix of a Wirtinger presentation.
The Conway potential is produced up to sign (sign-determined torsion is out
of scope); the Torres formula therefore carries a one-time per-link sign
calibration against the kernel-method slope, after which it serves as an
independent oracle at every other character.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import mpmath

from .charspec import Character, is_admissible
from .diagram import PDCode, PDError
from .laurent import (MultiLaurent, UnitNormalForm, exact_div, format_poly,
                      gcd_many, laurent_gcd, unit_normalize)
from .slope import SlopeValue, repack_colors


@dataclass
class OrderPolynomial:
    """The r-th order of the colored link: gcd of (p-1-r)-minors."""

    value: UnitNormalForm
    r: int
    num_vars: int

    def poly(self) -> MultiLaurent:
        return self.value.core

    def __str__(self):
        return format_poly(self.value.core)


def _bareiss_det(rows: list[list[MultiLaurent]]) -> MultiLaurent:
    n = len(rows)
    nv = rows[0][0].num_vars if n else 0
    if n == 0:
        return MultiLaurent.one(nv)
    m = [row[:] for row in rows]
    prev = MultiLaurent.one(nv)
    sign = 1
    for k in range(n - 1):
        if m[k][k].is_zero():
            piv = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if piv is None:
                return MultiLaurent.zero(nv)
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                q = exact_div(num, prev)
                if q is None:
                    raise ArithmeticError("Bareiss division failed")
                m[i][j] = q
            m[i][k] = MultiLaurent.zero(nv)
        prev = m[k][k]
    return m[n - 1][n - 1] * sign


def order_polynomial(d: PDCode, r: int = 0) -> OrderPolynomial:
    """gcd of the (p-1-r)-minors of the Fox matrix, in unit-normal form.

    The empty diagram (unknot) and out-of-range sizes return 1 by the usual
    conventions; a vanishing ideal returns 0.
    """
    d = repack_colors(d)
    pres = d.wirtinger()
    matrix = pres.alexander_matrix()
    p = pres.num_generators
    nv = pres.ab.num_vars
    size = p - 1 - r
    if size <= 0:
        return OrderPolynomial(unit_normalize(MultiLaurent.one(nv)), r, nv)
    q = len(matrix)
    if size > q:
        # too few relations: the elementary ideal is zero
        return OrderPolynomial(unit_normalize(MultiLaurent.zero(nv)), r, nv)
    minors = []
    for ridx in combinations(range(q), size):
        for cidx in combinations(range(p), size):
            sub = [[matrix[i][j] for j in cidx] for i in ridx]
            det = _bareiss_det(sub)
            if not det.is_zero():
                minors.append(det)
    g = gcd_many(minors, nv)
    return OrderPolynomial(g, r, nv)


def first_nonzero_order(d: PDCode, max_r: int = 8) -> OrderPolynomial:
    for r in range(max_r + 1):
        op = order_polynomial(d, r)
        if not op.poly().is_zero():
            return op
    raise PDError("all orders vanish up to r = %d" % max_r)


# ---------------------------------------------------------------------------
# Conway normalization
# ---------------------------------------------------------------------------

@dataclass
class ConwayLike:
    """The Conway potential up to sign.

    ``core`` is a Laurent polynomial in the square-root variables (exponent
    k stands for (sqrt t)^k); with one color the potential acquires the
    denominator t - t^-1 (``denom_power`` = 1), e.g. the unknot potential
    is 1/(t - t^-1).  ``sign_resolved`` stays False until a caller
    calibrates the global sign against an independent value.
    """

    core: MultiLaurent
    denom_power: int = 0
    num_colors: int = 1
    components: int = 1
    sign_resolved: bool = False

    def evaluate_at_sqrt(self, sqrt_point):
        """Value at sqrt(omega); the caller fixes the square roots."""
        num = self.core.evaluate(sqrt_point)
        if self.denom_power:
            t = sqrt_point[0]
            den = (t - 1 / t) ** self.denom_power
            if den == 0:
                raise ZeroDivisionError("potential has a pole at this character")
            return num / den
        return num

    def involution_sign(self) -> int:
        inv = self.core.involute()
        if inv == self.core:
            return 1 if self.denom_power % 2 == 0 else -1
        if inv == -self.core:
            return -1 if self.denom_power % 2 == 0 else 1
        raise ArithmeticError("Conway core is not symmetric")

    def __str__(self):
        names = [f"s{i}" for i in range(self.core.num_vars)]
        body = format_poly(self.core, names)
        if self.denom_power:
            return f"({body}) / (s0 - s0^-1)^{self.denom_power}"
        return body


def conway_normalize(delta: OrderPolynomial, components: int) -> ConwayLike:
    """Symmetric square-root renormalization of the 0-th order.

    Doubles all exponents (t -> t^2 in the half-variables), divides by
    (t - t^-1) when there is a single color, and centers the support so the
    bar involution fixes the result up to sign.  The sign is left
    unresolved.
    """
    p = delta.poly()
    nv = delta.num_vars
    if p.is_zero():
        return ConwayLike(p, 0, nv, components)
    doubled = MultiLaurent(nv, {tuple(2 * e for e in exp): c
                                for exp, c in p.terms.items()})
    denom_power = 0
    if nv == 1:
        denom_power = 1  # tau = Delta / (t - 1): one more (t - t^-1) downstairs
    nf = unit_normalize(doubled, symmetric=True)
    if not nf.symmetric:
        raise ArithmeticError(
            "no symmetric centering exists; input is not an honest order")
    c = ConwayLike(nf.core, denom_power, nv, components)
    _ = c.involution_sign()  # must exist
    return c


def conway_potential(d: PDCode, components: int | None = None) -> ConwayLike:
    """The Conway potential of a colored diagram, up to sign."""
    d = repack_colors(d)
    op = order_polynomial(d, 0)
    n = components if components is not None else d.num_components
    return conway_normalize(op, n)


# ---------------------------------------------------------------------------
# the Torres ratio
# ---------------------------------------------------------------------------

@dataclass
class TorresData:
    """Precomputed potentials for the Torres-ratio slope of one link."""

    nabla_full: ConwayLike  # of K u L, variables (t, t_1..t_mu)
    nabla_sub: ConwayLike   # of L, variables (t_1..t_mu)
    lam: tuple[int, ...]
    sign: int = 1
    sign_resolved: bool = False


def torres_data(d: PDCode, distinguished: int | None = None) -> TorresData:
    if distinguished is not None:
        d = d.with_distinguished(distinguished)
    d = repack_colors(d)
    colors = d.component_colors()
    if 0 not in colors:
        raise PDError("Torres data needs a distinguished component")
    k0 = colors.index(0)
    lam = d.linking_vector(k0)
    sub = repack_colors(d.delete_components([k0]))
    full_comps = d.num_components
    nab_full = conway_potential(d, full_comps)
    nab_sub = conway_potential(sub, full_comps - 1)
    return TorresData(nab_full, nab_sub, lam)


def _sqrt_coords(omega: Character, dps: int = 50):
    out = []
    with mpmath.workdps(dps):
        for c in omega.coords:
            from .charspec import ExactRoot
            if isinstance(c, ExactRoot):
                out.append(complex(mpmath.expjpi(mpmath.mpf(c.n) / c.d)))
            else:
                out.append(complex(mpmath.sqrt(mpmath.mpc(c))))
    return out


def torres_slope(data: TorresData, omega: Character,
                 sqrt_omega=None) -> SlopeValue | str:
    """-nabla'(1, sqrt omega) / (2 nabla_L(sqrt omega)), or 'inconclusive'.

    One consistent choice of square roots is used throughout; the result is
    documented to be independent of that choice.  The overall sign follows
    ``data.sign`` (calibrate with :func:`calibrate_torres_sign`).
    """
    if not is_admissible(omega, data.lam):
        raise ValueError("character is not admissible")
    sq = list(sqrt_omega) if sqrt_omega is not None else _sqrt_coords(omega)
    # nabla' differentiates the potential in its own variable t (the one
    # that is specialized to 1), not through t = s^2
    dcore = data.nabla_full.core.derivative(0)
    num = dcore.evaluate([1 + 0j] + sq)
    den_val = 2 * data.nabla_sub.evaluate_at_sqrt(sq)
    if abs(num) < 1e-12 and abs(den_val) < 1e-12:
        return "inconclusive"
    if abs(den_val) < 1e-12:
        return SlopeValue.infinity()
    return SlopeValue.finite(data.sign * (-num / den_val))


def calibrate_torres_sign(data: TorresData, omega: Character,
                          reference: SlopeValue) -> TorresData:
    """Fix the +-1 of the ratio against one kernel-method value."""
    raw = torres_slope(data, omega)
    if raw == "inconclusive" or not raw.is_finite or not reference.is_finite:
        raise ValueError("calibration character must give a finite ratio")
    if abs(raw.value - reference.value) <= 1e-6 * max(1.0, abs(raw.value)):
        data.sign = 1
    elif abs(-raw.value - reference.value) <= 1e-6 * max(1.0, abs(raw.value)):
        data.sign = -1
    else:
        raise ArithmeticError(
            f"Torres ratio {raw.value} does not match the reference "
            f"{reference.value} up to sign")
    data.sign_resolved = True
    return data
