"""Closed braids: reduced Burau matrices and inverse slopes at roots of unity.

Matrices act on row vectors by right multiplication.  The basis vectors
e_1 .. e_{n-1} of the punctured-disk module transform under the Artin
generator sigma_i as

    e_{i-1} -> e_{i-1} + t e_i,   e_i -> -t e_i,   e_{i+1} -> e_i + e_{i+1},

and the projection <alpha, beta> = (alpha.beta) alpha^{-1} obeys

    <a, b'b''> = <a, b'> b'' + <a, b''>,   <a, b^-1> = -<a, b> b^-1.

Everything at the root of unity xi_r = exp(2 pi i r/n) is computed in the
exact cyclotomic field, so the class functions beta_r are exact values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .charspec import KernelResult, kernel_of_pair_exact
from .cyclotomic import Cyclo
from .diagram import BraidWord, PDError
from .laurent import MultiLaurent
from .presentation import Word

Matrix = list[list[MultiLaurent]]


def _t(power: int = 1) -> MultiLaurent:
    return MultiLaurent.var(1, 0, power)


def _identity(n: int) -> Matrix:
    one = MultiLaurent.one(1)
    zero = MultiLaurent.zero(1)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def _generator_matrix(n: int, i: int, inverse: bool) -> Matrix:
    """Reduced Burau matrix of sigma_i^{+-1} in B_n (i is 1-based)."""
    m = _identity(n - 1)
    zero = MultiLaurent.zero(1)

    def row(j):  # basis index 1..n-1 -> list index
        return j - 1

    if not inverse:
        if i - 1 >= 1:
            m[row(i - 1)] = [zero] * (n - 1)
            m[row(i - 1)][row(i - 1)] = MultiLaurent.one(1)
            m[row(i - 1)][row(i)] = _t()
        m[row(i)] = [zero] * (n - 1)
        m[row(i)][row(i)] = -_t()
        if i + 1 <= n - 1:
            m[row(i + 1)] = [zero] * (n - 1)
            m[row(i + 1)][row(i)] = MultiLaurent.one(1)
            m[row(i + 1)][row(i + 1)] = MultiLaurent.one(1)
    else:
        if i - 1 >= 1:
            m[row(i - 1)] = [zero] * (n - 1)
            m[row(i - 1)][row(i - 1)] = MultiLaurent.one(1)
            m[row(i - 1)][row(i)] = MultiLaurent.one(1)
        m[row(i)] = [zero] * (n - 1)
        m[row(i)][row(i)] = -_t(-1)
        if i + 1 <= n - 1:
            m[row(i + 1)] = [zero] * (n - 1)
            m[row(i + 1)][row(i)] = _t(-1)
            m[row(i + 1)][row(i + 1)] = MultiLaurent.one(1)
    return m


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    cols = len(b[0])
    inner = len(b)
    zero = MultiLaurent.zero(1)
    out = [[zero for _ in range(cols)] for _ in range(n)]
    for i in range(n):
        for k in range(inner):
            x = a[i][k]
            if x.is_zero():
                continue
            for j in range(cols):
                if not b[k][j].is_zero():
                    out[i][j] = out[i][j] + x * b[k][j]
    return out


def reduced_burau(beta: BraidWord) -> Matrix:
    """Product of generator matrices over the braid word."""
    n = beta.strands
    if n < 2:
        return []
    m = _identity(n - 1)
    for x in beta.letters:
        m = _mat_mul(m, _generator_matrix(n, abs(x), x < 0))
    return m


def _vec_mat(v: list[MultiLaurent], m: Matrix) -> list[MultiLaurent]:
    cols = len(m[0]) if m else 0
    zero = MultiLaurent.zero(1)
    out = [zero] * cols
    for j, x in enumerate(v):
        if x.is_zero():
            continue
        for k in range(cols):
            if not m[j][k].is_zero():
                out[k] = out[k] + x * m[j][k]
    return out


def _letter_projection(n: int, alpha_index: int, i: int) -> list[MultiLaurent]:
    """<alpha_k, sigma_i> in the e-basis: t e_i for k = i, -e_i for k = i+1."""
    zero = MultiLaurent.zero(1)
    out = [zero] * (n - 1)
    if alpha_index == i:
        out[i - 1] = _t()
    elif alpha_index == i + 1:
        out[i - 1] = -MultiLaurent.one(1)
    return out


def projection(alpha: Word, beta: BraidWord) -> list[MultiLaurent]:
    """<alpha, beta> = (alpha.beta) alpha^{-1} in the disk module.

    ``alpha`` is a word in the free generators alpha_1..alpha_n of the
    punctured disk, letters (k, +-1) with k in 0..n-1 (0-based).
    The recursion over beta's letters uses <a, b sigma> = <a, b> sigma
    + <a, sigma>; for a product in the first slot,
    <a a', b> = <a, b> + t^deg(a) <a', b>.
    """
    n = beta.strands
    zero = MultiLaurent.zero(1)
    acc = [zero] * (n - 1)
    # expand the first slot: <prod alpha_k^e, beta>
    parts: list[tuple[int, MultiLaurent]] = []  # (alpha index 1-based, t^deg prefix)
    deg = 0
    for k, e in alpha:
        if e == 1:
            parts.append((k + 1, _t(deg)))
            deg += 1
        else:
            deg -= 1
            parts.append((k + 1, -_t(deg)))
    for idx, scale in parts:
        v = _alpha_projection(idx, beta)
        for j in range(n - 1):
            if not v[j].is_zero():
                acc[j] = acc[j] + scale * v[j]
    return acc


def _alpha_projection(alpha_index: int, beta: BraidWord) -> list[MultiLaurent]:
    n = beta.strands
    zero = MultiLaurent.zero(1)
    acc = [zero] * (n - 1)
    for x in beta.letters:
        i = abs(x)
        g = _generator_matrix(n, i, x < 0)
        acc = _vec_mat(acc, g)
        if x > 0:
            step = _letter_projection(n, alpha_index, i)
        else:
            # <a, s^-1> = -<a, s> s^-1
            step = [-p for p in _vec_mat(_letter_projection(n, alpha_index, i), g)]
        for j in range(n - 1):
            if not step[j].is_zero():
                acc[j] = acc[j] + step[j]
    return acc


# ---------------------------------------------------------------------------
# evaluation at roots of unity
# ---------------------------------------------------------------------------

def _eval_vec(v: list[MultiLaurent], z: Cyclo) -> list[Cyclo]:
    return [_eval1(p, z) for p in v]


def _eval1(p: MultiLaurent, z: Cyclo) -> Cyclo:
    total = Cyclo.zero(z.order)
    for exp, c in p.terms.items():
        total = total + Cyclo.rational(c, z.order) * z ** exp[0]
    return total


def axis_longitude(n: int, r: int) -> list[Cyclo]:
    """The axis longitude class at xi_r: sum over i<=j of omega^j e_i."""
    if r % n == 0:
        raise PDError("xi_r must differ from 1")
    z = Cyclo.root_of_unity(r, n)
    out = []
    for i in range(1, n):
        acc = Cyclo.zero(z.order)
        for j in range(i, n):
            acc = acc + z ** j
        out.append(acc)
    return out


def axis_meridian(beta: BraidWord, r: int, alpha: Word | None = None) -> list[Cyclo]:
    """The axis meridian class at xi_r: <alpha, beta>(omega) / (omega^d - 1)."""
    n = beta.strands
    if r % n == 0:
        raise PDError("xi_r must differ from 1")
    if alpha is None:
        alpha = ((0, 1),)
    d = sum(e for _, e in alpha)
    z = Cyclo.root_of_unity(r, n)
    zd = z ** d
    if zd == 1:
        raise PDError(f"omega^deg(alpha) = 1; pick another alpha (deg {d})")
    v = projection(alpha, beta)
    denom = (zd - Cyclo.rational(1, z.order)).inverse()
    return [x * denom for x in _eval_vec(v, z)]


@dataclass(frozen=True)
class BetaValue:
    """A value of the class function beta_r: real (exact), infinite, or undefined."""

    kind: str  # "finite" | "infinity" | "undefined"
    exact: Cyclo | None = None
    reason: str | None = None

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def as_fraction(self) -> Fraction | None:
        if self.exact is None:
            return None
        return self.exact.as_rational()

    def to_float(self) -> float:
        if self.kind != "finite":
            raise ValueError("not finite")
        return self.exact.to_complex().real

    def __str__(self):
        if self.kind == "infinity":
            return "infinity"
        if self.kind == "undefined":
            return f"undefined ({self.reason})"
        q = self.as_fraction()
        if q is not None:
            return str(q)
        return f"{self.to_float():.12g} (= {self.exact!r})"


def beta_r(beta: BraidWord, r: int, alpha: Word | None = None) -> BetaValue:
    """The inverse slope of the closed braid relative to its axis, at xi_r.

    Computed in the exact cyclotomic field: the unique relation
    a m + b l = 0 in the quotient by the image of (Burau - 1) yields
    -b/a.  The relation is required to exist and be 1-dimensional; its
    reality is verified, not assumed.
    """
    n = beta.strands
    if not 0 < r < n:
        raise PDError(f"need 0 < r < n, got r={r}, n={n}")
    z = Cyclo.root_of_unity(r, n)
    m = axis_meridian(beta, r, alpha)
    l = axis_longitude(n, r)
    bmat = reduced_burau(beta)
    rows = []
    for i in range(n - 1):
        row = [_eval1(bmat[i][j], z) for j in range(n - 1)]
        row[i] = row[i] - 1
        rows.append(row)
    order = z.order
    m = [x.promote(order) for x in m]
    l = [x.promote(order) for x in l]
    res: KernelResult = kernel_of_pair_exact(m, l, rows)
    if res.kind != "line":
        return BetaValue("undefined", reason=f"kernel dimension {res.kind}")
    a, b = res.pair
    if a.is_zero():
        return BetaValue("infinity")
    val = -b / a
    if not val.is_real():
        return BetaValue("undefined",
                         reason=f"relation is not real-representable: {val!r}")
    return BetaValue("finite", exact=val)


def beta_all(beta: BraidWord, alpha: Word | None = None) -> list[BetaValue]:
    return [beta_r(beta, r, alpha) for r in range(1, beta.strands)]
