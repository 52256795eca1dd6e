"""Slopes of 4-ended tangles and the generalized skein machinery.

The slope of a tangle is computed two ways:

* the Conway-ratio path: cap the tangle with the two 1-crossing caps and
  take the normalized ratio of the potentials.  The potentials are each
  defined up to sign; on diagonal characters the classical skein relation
  pins their relative sign, so the ratio is honest there.  The cap that
  lands in the numerator and the orientation of the boundary-value factor
  are frozen by the basic-tangle calibration (kappa = infinity, 0, 1 for
  minus, plus, smoothing).

* the kernel path: Fox calculus on the tangle exterior with the boundary
  cycles through the endpoint meridians.  This carries no sign ambiguity
  and also resolves the 0/0 cases of the ratio.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .alexander import ConwayLike, conway_potential
from .charspec import (Character, ExactRoot, is_nonvanishing,
                       kernel_of_pair_exact, kernel_of_pair_numeric,
                       specialize_exact, specialize_numeric)
from .cyclotomic import Cyclo
from .diagram import PDCode, PDError, TangleDiagram, tangle_close
from .laurent import MultiLaurent
from .presentation import Abelianization, GroupPresentation, word_from_syllables
from .slope import SlopeValue, repack_colors
from .splice import ExtReal, sg, sgn_triple


class TangleError(ValueError):
    pass


def _end_values(t: TangleDiagram, omega: Character):
    """(omega_minus, omega_plus) from the boundary colors.

    omega_plus sits at A1/A3, omega_minus at A2/A4; both must differ
    from 1.  Cap-pattern tangles force the diagonal.
    """
    colors = sorted(set(t.component_colors()))
    if len(omega) != len(colors):
        raise TangleError(
            f"character has {len(omega)} coordinates for colors {colors}")
    of_color = dict(zip(colors, omega.coords))
    ec = t.end_colors()
    w_plus = of_color[ec[0]]
    w_minus = of_color[ec[1]]
    if t.pattern == "cap":
        if of_color[ec[0]] != of_color[ec[1]]:
            raise TangleError(
                "smoothing-type tangles have slopes on the diagonal only")
    for w in (w_minus, w_plus):
        one = w.is_one() if isinstance(w, ExactRoot) else abs(w - 1) < 1e-12
        if one:
            raise TangleError("boundary character value 1 is not allowed")
    return w_minus, w_plus


def _as_complex(c):
    return c.to_complex() if isinstance(c, ExactRoot) else complex(c)


def _sqrt_value(c):
    if isinstance(c, ExactRoot):
        return cmath.exp(1j * cmath.pi * c.n / c.d)
    return cmath.sqrt(complex(c))


# ---------------------------------------------------------------------------
# Conway-ratio path
# ---------------------------------------------------------------------------

def _capped_potential(t: TangleDiagram, cap: str):
    link = tangle_close(t, cap)
    link = repack_colors(link)
    return link, conway_potential(link)


def _eval_capped(link: PDCode, nabla: ConwayLike, sqrt_of_color: dict):
    palette = sorted(set(link.component_colors()))
    point = [sqrt_of_color[c] for c in palette]
    return nabla.evaluate_at_sqrt(point)


def _skein_sign(np_val, nm_val, n0_val, xi) -> int | None:
    """Relative sign s of (plus, minus) potentials from the skein relation.

    Solves plus - s*minus = (xi - 1/xi) * s0 * zero for s, s0 in {+-1};
    returns s when a unique solution exists, else None.
    """
    rhs = (xi - 1 / xi) * n0_val
    sols = []
    for s in (1, -1):
        for s0 in (1, -1):
            if abs(np_val - s * nm_val - s0 * rhs) < 1e-8 * _scale(np_val, nm_val, rhs):
                sols.append(s)
    sols = sorted(set(sols))
    if len(sols) == 1:
        return sols[0]
    return None


def _scale(*vals):
    return max([abs(v) for v in vals] + [1.0])


def tangle_slope_ratio(t: TangleDiagram, omega: Character) -> SlopeValue | str:
    """kappa via the normalized ratio of capped Conway potentials.

    Returns 'inconclusive' when both potentials vanish at sqrt(omega).
    On off-diagonal characters the two-sided sign cannot be pinned by the
    skein relation; the value is then reported only when it is 0 or
    infinity (use the kernel path otherwise).
    """
    w_minus, w_plus = _end_values(t, omega)
    colors = sorted(set(t.component_colors()))
    sqrt_of_color = {c: _sqrt_value(v) for c, v in zip(colors, omega.coords)}
    link_m, nab_m = _capped_potential(t, "minus")
    link_p, nab_p = _capped_potential(t, "plus")
    num = _eval_capped(link_m, nab_m, sqrt_of_color)  # minus-cap upstairs
    den = _eval_capped(link_p, nab_p, sqrt_of_color)
    if abs(num) < 1e-12 and abs(den) < 1e-12:
        return "inconclusive"
    if abs(den) < 1e-12:
        return SlopeValue.infinity()
    if abs(num) < 1e-12:
        return SlopeValue.finite(0)
    sp = _sqrt_value(w_plus)
    sm = _sqrt_value(w_minus)
    # T ⊞ tau_0 exists on the diagonal; use it to pin the relative sign
    diagonal = w_minus == w_plus if isinstance(w_minus, ExactRoot) else \
        abs(_as_complex(w_minus) - _as_complex(w_plus)) < 1e-12
    factor = (sm - 1 / sm) / (sp - 1 / sp)  # nabla_0(sqrt w+) / nabla_0(sqrt w-)
    value = factor * num / den
    if diagonal:
        link_0, nab_0 = _capped_potential(t, "zero")
        n0 = _eval_capped(link_0, nab_0, sqrt_of_color)
        s = _skein_sign(den, num, n0, sp)
        if s is None:
            return "inconclusive"
        value = s * value
        return SlopeValue.finite(value)
    return SlopeValue.finite(value)  # sign resolved only up to +-1 off-diagonal


# ---------------------------------------------------------------------------
# kernel path
# ---------------------------------------------------------------------------

def tangle_presentation(t: TangleDiagram) -> tuple[GroupPresentation, dict]:
    """Wirtinger presentation of the tangle exterior.

    Returns the presentation and the map end -> generator index of the arc
    at that endpoint.  The abelianization sends arcs to their color slot
    (palette sorted; no distinguished variable).
    """
    counts: dict[int, list] = {}
    parent: dict[int, int] = {}
    edges = set()
    for cr in t.crossings:
        for e in cr:
            edges.add(e)
    for e in t.ends:
        edges.add(e)
    for e in edges:
        parent[e] = e

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, c, d in t.crossings:
        ra, rb = find(b), find(d)
        if ra != rb:
            parent[ra] = rb
    reps = sorted({find(e) for e in edges})
    arc_of = {e: reps.index(find(e)) for e in edges}
    colors = t.component_colors()
    palette = sorted(set(colors))
    var_of_color = {c: i for i, c in enumerate(palette)}
    edge_comp: dict[int, int] = {}
    for i, s in enumerate(t.strands):
        for e in s:
            edge_comp[e] = i
    for j, cyc in enumerate(t.closed_components):
        for e in cyc:
            edge_comp[e] = 2 + j
    images = []
    names = []
    for i, rep in enumerate(reps):
        vec = [0] * len(palette)
        vec[var_of_color[colors[edge_comp[rep]]]] = 1
        images.append(tuple(vec))
        names.append(f"x{i + 1}")
    ab = Abelianization(len(palette), tuple(images))
    decided, _, _ = t._oriented
    relators = []
    for k, (a, b, c, d) in enumerate(t.crossings):
        s = 1 if decided[k] else -1
        o = arc_of[b]
        r = word_from_syllables([(arc_of[c], -1), (o, -s), (arc_of[a], 1), (o, s)])
        relators.append(r)
    pres = GroupPresentation(tuple(names), tuple(relators), ab)
    pres.validate()
    ends = {i + 1: arc_of[t.ends[i]] for i in range(4)}
    return pres, ends


def tangle_slope_kernel(t: TangleDiagram, omega: Character,
                        tol: float = 1e-9, gap: float = 1e3) -> SlopeValue:
    """kappa via the twisted kernel of the boundary pair.

    The boundary cycles run through the endpoint meridians:
    v_minus ~ dx(A1) - dx(A3) scaled by 1/(1 - omega_minus^-1), and
    v_plus ~ dx(A2) - dx(A4) scaled by 1/(1 - omega_plus^-1); the scale
    pairing follows the symplectic-basis normalization and is validated by
    the basic-tangle values and the ratio path.
    """
    w_minus, w_plus = _end_values(t, omega)
    pres, ends = tangle_presentation(t)
    matrix = pres.alexander_matrix()
    n = pres.num_generators
    nv = pres.ab.num_vars
    colors = sorted(set(t.component_colors()))

    def unit(i):
        vec = [MultiLaurent.zero(nv) for _ in range(n)]
        vec[i] = MultiLaurent.one(nv)
        return vec

    vm_poly = [a - b for a, b in zip(unit(ends[1]), unit(ends[3]))]
    vp_poly = [a - b for a, b in zip(unit(ends[2]), unit(ends[4]))]
    exact = omega.is_exact and omega.lcm_order() <= 120
    if exact:
        point = [c.to_cyclo(omega.lcm_order()) for c in omega.coords]
        image = specialize_exact(matrix, point)
        vm = specialize_exact([vm_poly], point)[0]
        vp = specialize_exact([vp_poly], point)[0]
        order = omega.lcm_order()
        one = Cyclo.rational(1, order)
        wm = w_minus.to_cyclo(order)
        wp = w_plus.to_cyclo(order)
        cm = (one - wm ** -1).inverse()
        cp = (one - wp ** -1).inverse()
        vm = [x * cm for x in vm]
        vp = [x * cp for x in vp]
        res = kernel_of_pair_exact(vm, vp, image)
        if res.kind != "line":
            return SlopeValue.undefined(f"kernel dimension {res.kind}")
        a, b = res.pair
        if b.is_zero():
            return SlopeValue.infinity()
        # sign: the Wirtinger conventions invert the symplectic pairing of
        # (c_-, c_+), exactly as for links; pinned by kappa(tau_0) = 1
        val = a / b
        return SlopeValue.finite(val.to_complex(), val)
    point = list(omega.to_complex())
    image = specialize_numeric(matrix, point)
    vm = specialize_numeric([vm_poly], point)[0]
    vp = specialize_numeric([vp_poly], point)[0]
    vm = vm / (1 - 1 / _as_complex(w_minus))
    vp = vp / (1 - 1 / _as_complex(w_plus))
    res = kernel_of_pair_numeric(vm, vp, image, tol=tol, gap=gap)
    if res.kind != "line":
        return SlopeValue.undefined(f"kernel dimension {res.kind}")
    a, b = res.pair
    if b == 0:
        return SlopeValue.infinity()
    return SlopeValue.finite(a / b)  # sign: see the exact branch


def tangle_slope(t: TangleDiagram, omega: Character,
                 method: str = "auto") -> SlopeValue | str:
    """The slope of a 4-ended tangle at a character.

    ``method``: 'ratio', 'kernel', or 'auto' (kernel, falling back on the
    ratio only to double-check 0/infinity classifications is unnecessary;
    auto = kernel path, with the ratio consulted when the kernel errors).
    """
    if not is_nonvanishing(omega):
        raise TangleError("character must be nonvanishing on the tangle colors")
    if method == "ratio":
        return tangle_slope_ratio(t, omega)
    if method == "kernel":
        return tangle_slope_kernel(t, omega)
    try:
        return tangle_slope_kernel(t, omega)
    except Exception:
        return tangle_slope_ratio(t, omega)


# ---------------------------------------------------------------------------
# skein identities
# ---------------------------------------------------------------------------

@dataclass
class SkeinJumpReport:
    sg_kappa: int | None
    sg_ratio: int | None
    consistent: bool | None
    kappa: SlopeValue | None = None
    tau0_plus: tuple | None = None   # (sg(kappa^-1 - 1), sg(i nabla_+/nabla_0))
    tau0_minus: tuple | None = None  # (sg(kappa - 1), sg(-i nabla_-/nabla_0))

    def as_json(self):
        return {
            "sg_kappa": self.sg_kappa, "sg_ratio": self.sg_ratio,
            "consistent": self.consistent,
            "kappa": self.kappa.as_json() if self.kappa else None,
            "tau0_plus": self.tau0_plus, "tau0_minus": self.tau0_minus,
        }


def _sg_real(z: complex, tol: float = 1e-9) -> int:
    if abs(z.imag) > tol * max(1.0, abs(z)):
        raise TangleError(f"expected a real value, got {z}")
    if abs(z.real) <= tol:
        return 0
    return 1 if z.real > 0 else -1


def skein_signature_jump(link: PDCode, crossing: int, omega: Character,
                         tol: float = 1e-9) -> SkeinJumpReport:
    """Internal consistency of the skein jump at one crossing.

    Computes sg kappa of the excised tangle and sg of the Conway ratio
    nabla_{L+}/nabla_{L-} (square roots with positive imaginary part; the
    relative sign of the potentials pinned by the classical skein
    relation), and reports whether they agree.  On diagonal characters the
    smoothing variants are checked as well.
    """
    from .diagram import excise_crossing
    link = repack_colors(link)
    if not is_nonvanishing(omega):
        raise TangleError("character must be nonvanishing")
    t = excise_crossing(link, crossing)
    kappa = tangle_slope_kernel(t, omega)
    sg_kappa = None
    if kappa.is_infinite:
        sg_kappa = 0
    elif kappa.is_finite:
        sg_kappa = _sg_real(kappa.value, tol)
    # the three skein partners of the site
    plus_link = link if link.signs[crossing] > 0 else link.flip_crossing(crossing)
    minus_link = link if link.signs[crossing] < 0 else link.flip_crossing(crossing)
    zero_link = _colored_smoothing(link, crossing)
    nab_p = conway_potential(repack_colors(plus_link))
    nab_m = conway_potential(repack_colors(minus_link))
    palette = sorted(set(link.component_colors()))
    # square roots with positive imaginary part, per the corollary
    sqrt_of_color = {}
    for c, v in zip(palette, omega.coords):
        s = _sqrt_value(v)
        if s.imag < 0:
            s = -s
        sqrt_of_color[c] = s
    sp_pal = sorted(set(repack_colors(plus_link).component_colors()))
    point = [sqrt_of_color[c] for c in sp_pal]
    np_val = nab_p.evaluate_at_sqrt(point)
    nm_val = nab_m.evaluate_at_sqrt(point)
    site_color_a = link.component_colors()[
        link.component_of_edge[link.crossings[crossing][0]]]
    site_color_b = link.component_colors()[
        link.component_of_edge[link.crossings[crossing][1]]]
    diagonal = site_color_a == site_color_b or \
        omega.coords[palette.index(site_color_a)] == omega.coords[palette.index(site_color_b)]
    sg_ratio = None
    tau0_plus = tau0_minus = None
    if diagonal and zero_link is not None:
        nab_0 = conway_potential(repack_colors(zero_link))
        z_pal = sorted(set(repack_colors(zero_link).component_colors()))
        n0_val = nab_0.evaluate_at_sqrt([sqrt_of_color[c] for c in z_pal])
        xi = sqrt_of_color[site_color_a]
        s = _skein_sign(np_val, nm_val, n0_val, xi)
        if s is not None:
            nm_val = s * nm_val
            if abs(nm_val) > tol or abs(np_val) > tol:
                if abs(nm_val) <= tol:
                    sg_ratio = 0 if abs(np_val) <= tol else None
                    if sg_ratio is None:
                        sg_ratio = 0  # ratio infinite: sg(infinity) = 0
                else:
                    sg_ratio = _sg_real(np_val / nm_val, tol)
            # smoothing variants
            if abs(n0_val) > tol and kappa.is_defined:
                k_ext = ExtReal.infinity() if kappa.is_infinite else \
                    ExtReal(kappa.value.real)
                lhs_p = sg(k_ext.recip() - ExtReal(1))
                rhs_p = _sg_real(1j * np_val / n0_val, tol)
                tau0_plus = (lhs_p, rhs_p)
                lhs_m = sg(k_ext - ExtReal(1))
                rhs_m = _sg_real(-1j * nm_val / n0_val, tol)
                tau0_minus = (lhs_m, rhs_m)
    elif not diagonal:
        # off-diagonal: the ratio is available only up to sign; report |.|
        if abs(nm_val) > tol or abs(np_val) > tol:
            if abs(nm_val) <= tol:
                sg_ratio = 0
            else:
                val = np_val / nm_val
                sg_ratio = 0 if abs(val) <= tol else None
    consistent = None
    if sg_kappa is not None and sg_ratio is not None:
        consistent = sg_kappa == sg_ratio
    return SkeinJumpReport(sg_kappa, sg_ratio, consistent, kappa,
                           tau0_plus, tau0_minus)


def _colored_smoothing(link: PDCode, crossing: int) -> PDCode | None:
    """Oriented smoothing with colors transferred; None on color mismatch."""
    a, b, c, d = link.crossings[crossing]
    comp_of = link.component_of_edge
    colors = link.component_colors()
    if colors[comp_of[a]] != colors[comp_of[b]]:
        return None
    sm = link.smooth_crossing(crossing)
    edge_color = {}
    parent_color = colors[comp_of[a]]
    for comp, col in zip(link.components, colors):
        for e in comp:
            edge_color[e] = col
    out_colors = []
    for comp in sm.components:
        cols = {edge_color.get(e, parent_color) for e in comp}
        out_colors.append(cols.pop() if len(cols) == 1 else parent_color)
    out_colors += [parent_color] * sm.loops
    return sm.with_colors(out_colors)


@dataclass
class SkeinTripleReport:
    slopes: tuple
    predicted: int
    supplied_sum: int | None = None
    matches: bool | None = None

    def as_json(self):
        return {
            "slopes": [str(s) for s in self.slopes],
            "predicted_sgn": self.predicted,
            "supplied_sum": self.supplied_sum,
            "matches": self.matches,
        }


def skein_triple_check(tangles, omegas, sigma_sums=None) -> SkeinTripleReport:
    """Predict the signature sum of three pairwise tangle sums.

    All three boundary characters must agree; the prediction is the
    Maslov-type sign of the three slopes.  With user-supplied signatures
    of the pairwise sums, reports whether their sum matches.
    """
    if len(tangles) != 3 or len(omegas) != 3:
        raise TangleError("need exactly three tangles and characters")
    boundary = None
    slopes = []
    for t, om in zip(tangles, omegas):
        wm, wp = _end_values(t, om)
        key = (_as_complex(wm), _as_complex(wp))
        if boundary is None:
            boundary = key
        elif max(abs(boundary[0] - key[0]), abs(boundary[1] - key[1])) > 1e-9:
            raise TangleError("boundary characters do not match")
        slopes.append(tangle_slope_kernel(t, om))
    exts = []
    for s in slopes:
        if s.is_infinite:
            exts.append(ExtReal.infinity())
        elif s.is_finite:
            exts.append(ExtReal(s.real_value()))
        else:
            raise TangleError(f"tangle slope undefined: {s.reason}")
    predicted = sgn_triple(*exts)
    total = None
    matches = None
    if sigma_sums is not None:
        total = sum(sigma_sums)
        matches = total == predicted
    return SkeinTripleReport(tuple(slopes), predicted, total, matches)
