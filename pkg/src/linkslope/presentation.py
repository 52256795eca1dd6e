"""Free-group words, presented groups, and Fox differential calculus.

Words are tuples of ``(generator, exponent)`` letters with exponent +-1.
A presentation carries an abelianization map sending each generator to a
monomial exponent vector; Fox derivatives are taken directly in the
abelianized coefficients, which is all the twisted chain complexes need.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .laurent import LaurentError, MultiLaurent

Letter = tuple[int, int]
Word = tuple[Letter, ...]


class PresentationError(ValueError):
    pass


def word(*letters: Letter) -> Word:
    return tuple((int(g), int(e)) for g, e in letters)


def word_from_syllables(syllables: Iterable[tuple[int, int]]) -> Word:
    """Expand (generator, any integer exponent) pairs into +-1 letters."""
    out: list[Letter] = []
    for g, e in syllables:
        step = 1 if e > 0 else -1
        out.extend((g, step) for _ in range(abs(e)))
    return tuple(out)


def inverse_word(w: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(w))


def concat(*ws: Word) -> Word:
    out: list[Letter] = []
    for w in ws:
        out.extend(w)
    return tuple(out)


def conjugate(w: Word, by: Word) -> Word:
    return concat(by, w, inverse_word(by))


def commutator(u: Word, v: Word) -> Word:
    return concat(u, v, inverse_word(u), inverse_word(v))


def free_reduce(w: Word) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[Letter] = []
    for g, e in w:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


@dataclass(frozen=True)
class Abelianization:
    """Generator-wise monomial map into H = Z^num_vars."""

    num_vars: int
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for img in self.images:
            if len(img) != self.num_vars:
                raise PresentationError("abelianization image has wrong length")

    def of_word(self, w: Word) -> tuple[int, ...]:
        acc = [0] * self.num_vars
        for g, e in w:
            img = self.images[g]
            for i in range(self.num_vars):
                acc[i] += e * img[i]
        return tuple(acc)

    def monomial(self, w: Word) -> MultiLaurent:
        return MultiLaurent.monomial(self.num_vars, self.of_word(w))


def fox_derivative(w: Word, gen: int, ab: Abelianization) -> MultiLaurent:
    """Fox derivative d(w)/d(x_gen) specialized along the abelianization.

    Satisfies dx/dx = 1, dy/dx = 0, d(uv)/dx = du/dx + phi(u) dv/dx and
    d(x^-1)/dx = -phi(x)^-1, via a single left-to-right scan.
    """
    return word_differential(w, ab)[gen]


def word_differential(w: Word, ab: Abelianization) -> list[MultiLaurent]:
    """All Fox derivatives of ``w`` at once (one scan, shared prefix)."""
    n = len(ab.images)
    terms: list[dict] = [{} for _ in range(n)]
    prefix = [0] * ab.num_vars

    def add(gen, exp_vec, c):
        t = terms[gen]
        key = tuple(exp_vec)
        s = t.get(key, Fraction(0)) + c
        if s:
            t[key] = s
        else:
            t.pop(key, None)

    for g, e in w:
        img = ab.images[g]
        if e == 1:
            add(g, prefix, 1)
            for i in range(ab.num_vars):
                prefix[i] += img[i]
        elif e == -1:
            for i in range(ab.num_vars):
                prefix[i] -= img[i]
            add(g, prefix, -1)
        else:
            raise PresentationError(f"letter exponent must be +-1, got {e}")
    return [MultiLaurent(ab.num_vars, t) for t in terms]


def fundamental_identity_defect(w: Word, ab: Abelianization) -> MultiLaurent:
    """sum_i dw/dx_i (phi(x_i) - 1) - (phi(w) - 1); zero for every word."""
    diffs = word_differential(w, ab)
    total = MultiLaurent.zero(ab.num_vars)
    one = MultiLaurent.one(ab.num_vars)
    for g, d in enumerate(diffs):
        img = MultiLaurent.monomial(ab.num_vars, ab.images[g])
        total = total + d * (img - one)
    rhs = ab.monomial(w) - one
    return total - rhs


@dataclass
class GroupPresentation:
    """A finitely presented group with tagged peripheral words.

    ``tags`` holds named words: ``meridian``, ``longitude``, and
    ``meridian_of <k>`` for component meridians.
    """

    generator_names: tuple[str, ...]
    relators: tuple[Word, ...]
    ab: Abelianization
    tags: dict[str, Word] = field(default_factory=dict)

    @property
    def num_generators(self) -> int:
        return len(self.generator_names)

    def validate(self):
        if len(self.ab.images) != self.num_generators:
            raise PresentationError("abelianization size does not match generators")
        for k, r in enumerate(self.relators):
            v = self.ab.of_word(r)
            if any(v):
                raise PresentationError(
                    f"relator {k} abelianizes to {v}, expected zero")

    def alexander_matrix(self) -> list[list[MultiLaurent]]:
        """Fox matrix: one row per relator, one column per generator."""
        self.validate()
        return [word_differential(r, self.ab) for r in self.relators]


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

_WORD_LETTER = re.compile(r"([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def parse_word(text: str, names: Sequence[str]) -> Word:
    index = {n: i for i, n in enumerate(names)}
    out: list[Letter] = []
    for tok in text.split():
        m = _WORD_LETTER.match(tok)
        if not m:
            raise PresentationError(f"bad word letter {tok!r}")
        name, power = m.group(1), int(m.group(2) or 1)
        if name not in index:
            raise PresentationError(f"unknown generator {name!r}")
        step = 1 if power > 0 else -1
        out.extend((index[name], step) for _ in range(abs(power)))
    return tuple(out)


def format_word(w: Word, names: Sequence[str]) -> str:
    if not w:
        return "1"
    parts = []
    i = 0
    while i < len(w):
        g, e = w[i]
        j = i
        while j < len(w) and w[j] == (g, e):
            j += 1
        power = e * (j - i)
        parts.append(names[g] if power == 1 else f"{names[g]}^{power}")
        i = j
    return " ".join(parts)


def parse_presentation(text: str) -> GroupPresentation:
    """Parse the presentation text format.

    ::

        generators: m m1 l
        abelianization: m -> t ; m1 -> t1 ; l -> 1
        variables: t t1
        relator: m l m^-1 l^-1
        relator: l m1 m^-1 m1^-1 m m1^-1 m^-1 m1 m l^-1 ...
        meridian: m
        longitude: l
        meridian_of 0: m
    """
    names: list[str] = []
    var_names: list[str] = []
    ab_lines: list[tuple[str, str]] = []
    relator_lines: list[str] = []
    tag_lines: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "generators":
            names = rest.split()
        elif key == "variables":
            var_names = rest.split()
        elif key == "abelianization":
            for chunk in rest.split(";"):
                lhs, _, rhs = chunk.partition("->")
                ab_lines.append((lhs.strip(), rhs.strip()))
        elif key == "relator":
            relator_lines.append(rest)
        elif key in ("meridian", "longitude") or key.startswith("meridian_of"):
            tag_lines.append((key, rest))
        else:
            raise PresentationError(f"unknown section {key!r}")
    if not names:
        raise PresentationError("missing generators line")
    if not var_names:
        raise PresentationError("missing variables line")
    from .laurent import parse_poly

    images = {}
    for lhs, rhs in ab_lines:
        if lhs not in names:
            raise PresentationError(f"abelianization for unknown generator {lhs!r}")
        p = parse_poly(rhs, len(var_names), var_names)
        if not p.is_monomial():
            raise PresentationError(f"abelianization image {rhs!r} is not a monomial")
        (exp, c), = p.terms.items()
        if c != 1:
            raise PresentationError("abelianization image must have coefficient 1")
        images[lhs] = exp
    missing = [n for n in names if n not in images]
    if missing:
        raise PresentationError(f"abelianization missing for {missing}")
    ab = Abelianization(len(var_names), tuple(images[n] for n in names))
    relators = tuple(parse_word(t, names) for t in relator_lines)
    tags = {k: parse_word(v, names) for k, v in tag_lines}
    pres = GroupPresentation(tuple(names), relators, ab, tags)
    pres.validate()
    return pres
