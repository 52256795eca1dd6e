"""Combinatorial link and tangle diagrams.

PD codes follow the standard table convention: a crossing ``X[a,b,c,d]``
lists the four incident edges starting with the incoming under-strand and
proceeding counterclockwise.  Edges are the segments between consecutive
crossings of the 4-valent diagram graph; each label occurs exactly twice.
A crossing is positive exactly when its over-strand runs d -> b.

Orientations of over-strands are inferred by constraint propagation from
the under-strand data (every edge needs one head and one tail); components
that never pass under fall back to the consecutive-numbering heuristic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Sequence

from .presentation import (Abelianization, GroupPresentation, Word,
                           free_reduce, word_from_syllables)


class PDError(ValueError):
    pass


Crossing = tuple[int, int, int, int]


@dataclass(frozen=True)
class PDCode:
    """An oriented colored link diagram.

    ``loops`` counts crossing-free unknot components (appended after the
    edge-carrying components in the component order).  ``colors`` assigns a
    color to each component; color 0 is reserved for the distinguished
    component.  Components are ordered by their smallest edge label.
    """

    crossings: tuple[Crossing, ...]
    loops: int = 0
    colors: tuple[int, ...] | None = None

    # -- validation and orientation -----------------------------------------

    @cached_property
    def edges(self) -> tuple[int, ...]:
        seen: dict[int, int] = {}
        for k, cr in enumerate(self.crossings):
            if len(cr) != 4:
                raise PDError(f"crossing {k} does not have 4 edges")
            for e in cr:
                seen[e] = seen.get(e, 0) + 1
        bad = [e for e, n in seen.items() if n != 2]
        if bad:
            raise PDError(f"edges {sorted(bad)} do not appear exactly twice")
        return tuple(sorted(seen))

    @cached_property
    def over_direction(self) -> tuple[bool, ...]:
        """For each crossing: True when the over-strand runs d -> b (positive)."""
        _ = self.edges
        heads: dict[int, int] = {}
        tails: dict[int, int] = {}

        def put(table, e, k, what):
            if e in table:
                raise PDError(
                    f"orientation clash at crossing {k}: edge {e} has two {what}s")
            table[e] = k

        for k, (a, b, c, d) in enumerate(self.crossings):
            put(heads, a, k, "head")
            put(tails, c, k, "tail")
        decided: dict[int, bool] = {}
        pending = set(range(len(self.crossings)))
        progress = True
        while pending and progress:
            progress = False
            for k in list(pending):
                a, b, c, d = self.crossings[k]
                val = None
                # an edge whose head (tail) is consumed elsewhere must be a
                # tail (head) at this crossing
                if b in heads or d in tails:
                    val = True  # over runs d -> b
                if d in heads or b in tails:
                    if val is not None:
                        raise PDError(f"orientation conflict at crossing {k}")
                    val = False  # over runs b -> d
                if val is not None:
                    if val:
                        put(heads, d, k, "head")
                        put(tails, b, k, "tail")
                    else:
                        put(heads, b, k, "head")
                        put(tails, d, k, "tail")
                    decided[k] = val
                    pending.discard(k)
                    progress = True
        for k in sorted(pending):
            if k not in pending:
                continue
            # component never passes under; orient by consecutive labels
            a, b, c, d = self.crossings[k]
            if b == d + 1:
                val = True
            elif d == b + 1:
                val = False
            else:
                val = True
            put(heads, d if val else b, k, "head")
            put(tails, b if val else d, k, "tail")
            decided[k] = val
            # propagate the choice to the rest of the component
            progress = True
            while pending and progress:
                pending.discard(k)
                progress = False
                for k2 in list(pending):
                    a2, b2, c2, d2 = self.crossings[k2]
                    v2 = None
                    if b2 in heads or d2 in tails:
                        v2 = True
                    if d2 in heads or b2 in tails:
                        if v2 is not None:
                            raise PDError(f"orientation conflict at crossing {k2}")
                        v2 = False
                    if v2 is not None:
                        put(heads, d2 if v2 else b2, k2, "head")
                        put(tails, b2 if v2 else d2, k2, "tail")
                        decided[k2] = v2
                        pending.discard(k2)
                        progress = True
        for e in self.edges:
            if e not in heads or e not in tails:
                raise PDError(f"edge {e} lacks a consistent orientation")
        return tuple(decided[k] for k in range(len(self.crossings)))

    @cached_property
    def signs(self) -> tuple[int, ...]:
        return tuple(1 if d2b else -1 for d2b in self.over_direction)

    @cached_property
    def successor(self) -> dict[int, int]:
        """Next edge along the orientation."""
        nxt: dict[int, int] = {}
        for k, (a, b, c, d) in enumerate(self.crossings):
            nxt[a] = c
            if self.over_direction[k]:
                nxt[d] = b
            else:
                nxt[b] = d
        return nxt

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Oriented edge cycles, sorted by smallest edge label."""
        nxt = self.successor
        seen: set[int] = set()
        comps = []
        for e in self.edges:
            if e in seen:
                continue
            cycle = []
            x = e
            while x not in seen:
                seen.add(x)
                cycle.append(x)
                x = nxt[x]
            comps.append(tuple(cycle))
        comps.sort(key=lambda c: min(c))
        return tuple(comps)

    @property
    def num_components(self) -> int:
        return len(self.components) + self.loops

    @cached_property
    def component_of_edge(self) -> dict[int, int]:
        out = {}
        for i, comp in enumerate(self.components):
            for e in comp:
                out[e] = i
        return out

    def component_colors(self) -> tuple[int, ...]:
        if self.colors is not None:
            if len(self.colors) != self.num_components:
                raise PDError(
                    f"{len(self.colors)} colors for {self.num_components} components")
            return self.colors
        return tuple(range(1, self.num_components + 1))

    def with_colors(self, colors: Sequence[int]) -> "PDCode":
        return replace(self, colors=tuple(colors))

    def with_distinguished(self, comp: int) -> "PDCode":
        """Color component ``comp`` 0 and the rest 1..n-1 in order."""
        n = self.num_components
        if not 0 <= comp < n:
            raise PDError(f"no component {comp} (have {n})")
        colors = []
        nxt = 1
        for i in range(n):
            if i == comp:
                colors.append(0)
            else:
                colors.append(nxt)
                nxt += 1
        return self.with_colors(colors)

    # -- numeric link data ---------------------------------------------------

    @cached_property
    def linking_matrix(self) -> tuple[tuple[int, ...], ...]:
        """Off-diagonal lk(C_i, C_j); diagonal is the self-writhe."""
        n = self.num_components
        m = [[0] * n for _ in range(n)]
        comp = self.component_of_edge
        for k, (a, b, c, d) in enumerate(self.crossings):
            i = comp[a]
            j = comp[b]
            s = self.signs[k]
            if i == j:
                m[i][i] += s
            else:
                m[i][j] += s
                m[j][i] += s
        for i in range(n):
            for j in range(n):
                if i != j:
                    if m[i][j] % 2:
                        raise PDError("odd inter-component crossing sum")
                    m[i][j] //= 2
        return tuple(tuple(row) for row in m)

    def linking_vector(self, comp: int) -> tuple[int, ...]:
        """lk of ``comp`` with each color class (colors sorted, comp's own color skipped)."""
        colors = self.component_colors()
        lk = self.linking_matrix
        mine = colors[comp]
        out: dict[int, int] = {}
        for j in range(self.num_components):
            if j == comp:
                continue
            out[colors[j]] = out.get(colors[j], 0) + lk[comp][j]
        return tuple(out.get(c, 0) for c in sorted(set(colors) - {mine}))

    # -- Wirtinger machinery ---------------------------------------------------

    @cached_property
    def arcs(self) -> dict[int, int]:
        """Map edge -> arc id; arcs merge edges joined by over-passes."""
        parent = {e: e for e in self.edges}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b, c, d in self.crossings:
            ra, rb = find(b), find(d)
            if ra != rb:
                parent[ra] = rb
        reps = sorted({find(e) for e in self.edges})
        index = {r: i for i, r in enumerate(reps)}
        return {e: index[find(e)] for e in self.edges}

    @property
    def num_arcs(self) -> int:
        return (max(self.arcs.values()) + 1 if self.arcs else 0)

    def wirtinger(self) -> GroupPresentation:
        """Wirtinger presentation with tagged component meridians.

        One generator per arc plus one per crossing-free loop; one relator
        per crossing: x_out = o^-sign x_in o^sign.  The abelianization sends
        each generator to its component's color variable.
        """
        colors = self.component_colors()
        palette = sorted(set(colors))
        if 0 in palette and palette != list(range(len(palette))):
            raise PDError(f"colors must be 0..mu, got {palette}")
        var_of_color = {c: i for i, c in enumerate(palette)}
        num_vars = len(palette)
        arcs = self.arcs
        n_arc = self.num_arcs
        names = [f"x{i + 1}" for i in range(n_arc)]
        images = []
        comp_of_edge = self.component_of_edge
        arc_comp: dict[int, int] = {}
        for e, a in arcs.items():
            arc_comp[a] = comp_of_edge[e]
        for i in range(n_arc):
            vec = [0] * num_vars
            vec[var_of_color[colors[arc_comp[i]]]] = 1
            images.append(tuple(vec))
        loop_gen_of: dict[int, int] = {}
        for j in range(self.loops):
            comp_index = len(self.components) + j
            loop_gen_of[comp_index] = len(names)
            names.append(f"x{len(names) + 1}")
            vec = [0] * num_vars
            vec[var_of_color[colors[comp_index]]] = 1
            images.append(tuple(vec))
        ab = Abelianization(num_vars, tuple(images))
        relators = []
        for k, (a, b, c, d) in enumerate(self.crossings):
            s = self.signs[k]
            o = arcs[b]
            # x_out = o^-s x_in o^s for meridians linking +1, basepoint above
            r = word_from_syllables(
                [(arcs[c], -1), (o, -s), (arcs[a], 1), (o, s)])
            relators.append(free_reduce(r))
        tags: dict[str, Word] = {}
        for i, comp in enumerate(self.components):
            tags[f"meridian_of {i}"] = ((arcs[comp[0]], 1),)
        for comp_index, g in loop_gen_of.items():
            tags[f"meridian_of {comp_index}"] = ((g, 1),)
        if 0 in colors:
            k0 = colors.index(0)
            tags["meridian"] = tags[f"meridian_of {k0}"]
            if k0 < len(self.components):
                tags["longitude"] = self.longitude_word(k0)
            else:
                tags["longitude"] = ()
        pres = GroupPresentation(tuple(names), tuple(relators), ab, tags)
        pres.validate()
        return pres

    def longitude_word(self, comp: int) -> Word:
        """Seifert-framed longitude of a component, as a word in arc meridians.

        Walk the component; record the over-arc (sign = crossing sign) at
        each undercrossing; then cancel the total self-writhe with a power
        of the starting meridian, so the abelianized t-exponent is zero.
        """
        if comp >= len(self.components):
            return ()  # crossing-free loop
        arcs = self.arcs
        cycle = self.components[comp]
        under_at: dict[int, int] = {}
        for k, (a, b, c, d) in enumerate(self.crossings):
            under_at[a] = k
        comp_of = self.component_of_edge
        letters: list[tuple[int, int]] = []
        writhe = 0
        for e in cycle:
            k = under_at.get(e)
            if k is None:
                continue
            a, b, c, d = self.crossings[k]
            s = self.signs[k]
            letters.append((arcs[b], s))
            if comp_of[b] == comp:
                writhe += s
        m_arc = arcs[cycle[0]]
        letters.append((m_arc, -writhe))
        return free_reduce(word_from_syllables(letters))

    # -- diagram surgery ---------------------------------------------------------

    def delete_components(self, comps: Iterable[int]) -> "PDCode":
        """Remove whole components, merging edges under removed over-passes."""
        comps = set(comps)
        keep_colors = [c for i, c in enumerate(self.component_colors())
                       if i not in comps]
        comp_of = self.component_of_edge
        parent: dict[int, int] = {e: e for e in self.edges}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        new_crossings = []
        for k, (a, b, c, d) in enumerate(self.crossings):
            under_del = comp_of[a] in comps
            over_del = comp_of[b] in comps
            if under_del and over_del:
                continue
            if under_del:
                union(b, d)
            elif over_del:
                union(a, c)
            else:
                new_crossings.append(k)
        crossings = tuple(
            tuple(find(e) for e in self.crossings[k]) for k in new_crossings)
        # components that kept no crossings become free loops
        used = {e for cr in crossings for e in cr}
        kept = [i for i in range(self.num_components) if i not in comps]
        extra_loops = 0
        order_colors = []
        loop_colors = []
        for i in kept:
            if i >= len(self.components):
                loop_colors.append(self.component_colors()[i])
                continue
            edges = {find(e) for e in self.components[i]}
            if edges & used:
                order_colors.append((min(edges & used), self.component_colors()[i]))
            else:
                extra_loops += 1
                loop_colors.append(self.component_colors()[i])
        order_colors.sort()
        colors = tuple(c for _, c in order_colors) + tuple(loop_colors)
        return PDCode(crossings, loops=self.loops_kept(comps) + extra_loops,
                      colors=colors)

    def loops_kept(self, removed: set) -> int:
        base = len(self.components)
        return sum(1 for j in range(self.loops) if base + j not in removed)

    def flip_crossing(self, k: int) -> "PDCode":
        """Swap over/under at crossing ``k`` (skein partner)."""
        a, b, c, d = self.crossings[k]
        new = (d, a, b, c) if self.over_direction[k] else (b, c, d, a)
        crossings = self.crossings[:k] + (new,) + self.crossings[k + 1:]
        return replace(self, crossings=crossings)

    def smooth_crossing(self, k: int) -> "PDCode":
        """Oriented smoothing at crossing ``k``; coloring is recomputed by caller."""
        a, b, c, d = self.crossings[k]
        if self.over_direction[k]:
            pairs = [(a, b), (d, c)]
        else:
            pairs = [(a, d), (b, c)]
        parent: dict[int, int] = {e: e for e in self.edges}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x, y in pairs:
            parent[find(x)] = find(y)
        rest = [cr for i, cr in enumerate(self.crossings) if i != k]
        crossings = tuple(tuple(find(e) for e in cr) for cr in rest)
        loops = self.loops
        if not crossings and (a == b or a == d):
            # smoothing a kink of a 1-crossing diagram leaves a bare circle
            loops += 1
        return PDCode(crossings, loops=loops, colors=None)

    def mirror(self) -> "PDCode":
        return PDCode(tuple(
            (d, a, b, c) if d2b else (b, c, d, a)
            for (a, b, c, d), d2b in zip(self.crossings, self.over_direction)),
            loops=self.loops, colors=self.colors)

    def reverse_component(self, comp: int) -> "PDCode":
        """Reverse the orientation of one component (must pass under somewhere)."""
        if comp >= len(self.components):
            return self
        comp_edges = set(self.components[comp])
        out = []
        for k, (a, b, c, d) in enumerate(self.crossings):
            if a in comp_edges:
                out.append((c, d, a, b))
            else:
                out.append((a, b, c, d))
        return PDCode(tuple(out), loops=self.loops, colors=self.colors)

    def __str__(self):
        xs = " ".join("X[%d,%d,%d,%d]" % cr for cr in self.crossings)
        return xs + (" " + " ".join(["O"] * self.loops) if self.loops else "")


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_X_RE = re.compile(r"X\[\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\]")
_O_RE = re.compile(r"O(?:\[\s*\d*\s*\])?")


def parse_pd(text: str) -> PDCode:
    """Parse ``X[a,b,c,d]`` tokens (plus ``O`` for crossing-free unknots)."""
    crossings = []
    loops = 0
    pos = 0
    text = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    while pos < len(text):
        ch = text[pos]
        if ch.isspace() or ch == ",":
            pos += 1
            continue
        m = _X_RE.match(text, pos)
        if m:
            crossings.append(tuple(int(g) for g in m.groups()))
            pos = m.end()
            continue
        m = _O_RE.match(text, pos)
        if m:
            loops += 1
            pos = m.end()
            continue
        raise PDError(f"cannot parse PD text at ...{text[pos:pos+25]!r}")
    pd = PDCode(tuple(crossings), loops=loops)
    _ = pd.components  # force validation
    return pd


# ---------------------------------------------------------------------------
# braids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BraidWord:
    """A braid on ``strands`` strands, letters +-1..+-(strands-1)."""

    strands: int
    letters: tuple[int, ...]

    def __post_init__(self):
        for x in self.letters:
            if x == 0 or abs(x) >= self.strands:
                raise PDError(f"braid letter {x} out of range for {self.strands} strands")

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-x for x in reversed(self.letters)))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if self.strands != other.strands:
            raise PDError("strand count mismatch")
        return BraidWord(self.strands, self.letters + other.letters)

    def __pow__(self, k: int) -> "BraidWord":
        if k < 0:
            return self.inverse() ** (-k)
        return BraidWord(self.strands, self.letters * k)

    @staticmethod
    def parse(text: str, strands: int | None = None) -> "BraidWord":
        letters = tuple(int(tok) for tok in text.replace(",", " ").split())
        if strands is None:
            strands = max((abs(x) for x in letters), default=1) + 1
        return BraidWord(strands, letters)

    def permutation(self) -> tuple[int, ...]:
        perm = list(range(self.strands))
        for x in self.letters:
            i = abs(x) - 1
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        return tuple(perm)


def full_twist(n: int) -> BraidWord:
    """The center generator Delta^2 of the braid group on n strands."""
    base = BraidWord(n, tuple(range(1, n)))
    return base ** n


def braid_closure(beta: BraidWord, axes: int = 0) -> PDCode:
    """Close a braid; optionally thread ``axes`` parallel axis circles.

    The axis circles encircle all strands below the braid box; each strand
    crosses each axis twice, both crossings positive, so every axis has
    linking number +1 with every strand (+n with the closure).  With
    ``axes=1`` the axis is the distinguished-component candidate.
    """
    n = beta.strands
    fresh = iter(range(1, 10 ** 9)).__next__
    top = [fresh() for _ in range(n)]
    cur = list(top)
    crossings: list[Crossing] = []
    for x in beta.letters:
        i = abs(x) - 1
        L, R = cur[i], cur[i + 1]
        sw, se = fresh(), fresh()
        # positive letter: the left strand passes over (calibrated so that
        # the closure-with-axis slope is the reciprocal of the Burau lkg)
        if x > 0:
            crossings.append((R, L, sw, se))
        else:
            crossings.append((L, sw, se, R))
        cur[i], cur[i + 1] = sw, se
    for _ in range(axes):
        ax_start = fresh()
        ax = ax_start
        # top rim, left to right: strand passes over the axis
        for i in range(n):
            s_in = cur[i]
            s_out = fresh()
            ax_next = fresh()
            crossings.append((ax, s_out, ax_next, s_in))
            cur[i] = s_out
            ax = ax_next
        # bottom rim, right to left: axis passes over the strand
        for i in range(n - 1, -1, -1):
            s_in = cur[i]
            s_out = fresh()
            ax_next = ax_start if i == 0 else fresh()
            crossings.append((s_in, ax_next, s_out, ax))
            cur[i] = s_out
            ax = ax_next
    # close up: bottom i rejoins top i
    parent: dict[int, int] = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    loops = 0
    for i in range(n):
        if cur[i] == top[i]:
            loops += 1  # untouched strand closes into a bare circle
        else:
            parent[find(cur[i])] = find(top[i])
    crossings2 = tuple(tuple(find(e) for e in cr) for cr in crossings)
    return PDCode(crossings2, loops=loops)


def generalized_hopf(m: int, n: int) -> PDCode:
    """The link H_{m,n}: m parallel axis circles over an n-strand identity braid.

    Components 0..n-1 are the strands, components n..n+m-1 the axes (for
    n, m > 0; degenerate cases reduce to unlinks).
    """
    if m == 0 or n == 0:
        return PDCode((), loops=m + n)
    return braid_closure(BraidWord(n, ()), axes=m)


# ---------------------------------------------------------------------------
# tangles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TangleDiagram:
    """A 4-ended tangle: crossings plus the dangling edge at each endpoint.

    Endpoints A1..A4 sit on the boundary circle in cyclic order; branches
    come in at A1, A2 and leave at A3, A4.  Two connectivity patterns are
    possible: A1->A3, A2->A4 (generic) or A1->A4, A2->A3 (smoothing-like).
    ``colors`` assigns colors to the components in order: the strand at A1,
    the other strand, then closed components.
    """

    crossings: tuple[Crossing, ...]
    ends: tuple[int, int, int, int]  # edges at A1, A2, A3, A4
    colors: tuple[int, ...] | None = None

    @cached_property
    def _oriented(self):
        counts: dict[int, int] = {}
        for cr in self.crossings:
            for e in cr:
                counts[e] = counts.get(e, 0) + 1
        for i, e in enumerate(self.ends):
            counts[e] = counts.get(e, 0) + 1
        bad = [e for e, m in counts.items() if m != 2]
        if bad:
            raise PDError(f"tangle edges {sorted(bad)} do not appear exactly twice")
        heads: dict[int, str | int] = {}
        tails: dict[int, str | int] = {}
        tails[self.ends[0]] = "A1"
        tails[self.ends[1]] = "A2"
        heads[self.ends[2]] = "A3"
        heads[self.ends[3]] = "A4"

        def put(table, e, k):
            if e in table:
                raise PDError(f"tangle orientation clash on edge {e}")
            table[e] = k

        for k, (a, b, c, d) in enumerate(self.crossings):
            put(heads, a, k)
            put(tails, c, k)
        decided: dict[int, bool] = {}
        pending = set(range(len(self.crossings)))
        progress = True
        while pending and progress:
            progress = False
            for k in list(pending):
                a, b, c, d = self.crossings[k]
                val = None
                if b in heads or d in tails:
                    val = True
                if d in heads or b in tails:
                    if val is not None:
                        raise PDError(f"tangle orientation conflict at crossing {k}")
                    val = False
                if val is not None:
                    if val:
                        put(heads, d, k)
                        put(tails, b, k)
                    else:
                        put(heads, b, k)
                        put(tails, d, k)
                    decided[k] = val
                    pending.discard(k)
                    progress = True
        if pending:
            raise PDError("tangle has an unoriented closed component")
        return decided, heads, tails

    @cached_property
    def signs(self) -> tuple[int, ...]:
        decided, _, _ = self._oriented
        return tuple(1 if decided[k] else -1 for k in range(len(self.crossings)))

    @cached_property
    def successor(self) -> dict[int, int]:
        decided, _, _ = self._oriented
        nxt: dict[int, int] = {}
        for k, (a, b, c, d) in enumerate(self.crossings):
            nxt[a] = c
            if decided[k]:
                nxt[d] = b
            else:
                nxt[b] = d
        return nxt

    @cached_property
    def strands(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Edge paths of the two boundary strands, starting at A1 and A2."""
        nxt = self.successor
        out = []
        for start in (self.ends[0], self.ends[1]):
            path = [start]
            while path[-1] in nxt:
                path.append(nxt[path[-1]])
            out.append(tuple(path))
        return tuple(out)

    @cached_property
    def pattern(self) -> str:
        """'parallel' for A1->A3, A2->A4; 'cap' for A1->A4, A2->A3."""
        s1, s2 = self.strands
        if s1[-1] == self.ends[2] and s2[-1] == self.ends[3]:
            return "parallel"
        if s1[-1] == self.ends[3] and s2[-1] == self.ends[2]:
            return "cap"
        raise PDError("boundary strands do not connect the endpoints")

    @cached_property
    def closed_components(self) -> tuple[tuple[int, ...], ...]:
        nxt = self.successor
        on_strands = {e for s in self.strands for e in s}
        seen: set[int] = set()
        comps = []
        for e in sorted(nxt):
            if e in seen or e in on_strands:
                continue
            cycle = []
            x = e
            while x not in seen:
                seen.add(x)
                cycle.append(x)
                x = nxt[x]
            comps.append(tuple(cycle))
        return tuple(comps)

    @property
    def num_components(self) -> int:
        return 2 + len(self.closed_components)

    def component_colors(self) -> tuple[int, ...]:
        if self.colors is not None:
            return self.colors
        return tuple(range(1, self.num_components + 1))

    def end_colors(self) -> tuple[int, int, int, int]:
        """Color at each endpoint A1..A4."""
        colors = self.component_colors()
        s1, s2 = self.strands
        if self.pattern == "parallel":
            return (colors[0], colors[1], colors[0], colors[1])
        return (colors[0], colors[1], colors[1], colors[0])


def basic_tangle(kind: str) -> TangleDiagram:
    """The basic tangles: 'plus' and 'minus' single crossings, 'zero' smoothing.

    In the plus tangle the A2->A4 branch passes over (restoring a positive
    crossing when used as the excised site); minus is its mirror; zero is
    the oriented smoothing, connecting A1->A4 and A2->A3.
    """
    e1, e2, e3, e4 = 1, 2, 3, 4
    if kind == "plus":
        return TangleDiagram(((e1, e4, e3, e2),), (e1, e2, e3, e4))
    if kind == "minus":
        return TangleDiagram(((e2, e1, e4, e3),), (e1, e2, e3, e4))
    if kind == "zero":
        return TangleDiagram((), (e1, e2, e2, e1))
    raise PDError(f"unknown basic tangle {kind!r}")


def excise_crossing(link: PDCode, k: int) -> TangleDiagram:
    """Remove crossing ``k``; the complementary tangle keeps its coloring.

    Capping the result with ``tangle_close(.., 'plus' or 'minus')`` restores
    a positive/negative crossing at the site; 'zero' gives the smoothing.
    """
    a, b, c, d = link.crossings[k]
    rest = link.crossings[:k] + link.crossings[k + 1:]
    if link.over_direction[k]:
        ends = (b, c, d, a)
    else:
        ends = (c, d, a, b)
    comp_of = link.component_of_edge
    colors = link.component_colors()
    s1_comp = comp_of[ends[0]]
    s2_comp = comp_of[ends[1]]
    tangle = TangleDiagram(rest, ends)
    col = [colors[s1_comp], colors[s2_comp]]
    strand_edges = {e for s in tangle.strands for e in s}
    for cyc in tangle.closed_components:
        col.append(colors[comp_of[cyc[0]]])
    if link.loops:
        raise PDError("cannot excise from a diagram with bare loops")
    _ = strand_edges
    return replace(tangle, colors=tuple(col))


def tangle_close(t: TangleDiagram, cap: str) -> PDCode:
    """Cap a tangle with a basic tangle (orientation-reversed gluing).

    cap 'plus' inserts a positive crossing at the site, 'minus' a negative
    one, 'zero' the oriented smoothing.  Colors transfer to the closed link;
    the boundary colors must be compatible with the cap.
    """
    e1, e2, e3, e4 = t.ends
    ec = t.end_colors()
    if t.pattern == "parallel":
        same_needed = cap == "zero"
    else:
        same_needed = cap in ("plus", "minus")
    if same_needed and ec[0] != ec[1]:
        raise PDError("cap gluing does not respect the boundary colors")
    if cap == "plus":
        crossings = t.crossings + ((e4, e1, e2, e3),)
        merge: list[tuple[int, int]] = []
    elif cap == "minus":
        crossings = t.crossings + ((e3, e4, e1, e2),)
        merge = []
    elif cap == "zero":
        crossings = t.crossings
        merge = [(e1, e4), (e2, e3)]
    else:
        raise PDError(f"unknown cap {cap!r}")
    parent: dict[int, int] = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    loops = 0
    for x, y in merge:
        if find(x) == find(y):
            loops += 1
        else:
            parent[find(x)] = find(y)
    crossings = tuple(tuple(find(e) for e in cr) for cr in crossings)
    if not crossings and not loops:
        loops = t.num_components  # capping a crossingless tangle
    link = PDCode(crossings, loops=loops)
    # transfer colors by matching edges
    tcolors = t.component_colors()
    edge_color: dict[int, int] = {}
    for i, s in enumerate(t.strands):
        for e in s:
            edge_color[find(e)] = tcolors[i]
    for j, cyc in enumerate(t.closed_components):
        for e in cyc:
            edge_color[find(e)] = tcolors[2 + j]
    out_colors = []
    for comp in link.components:
        cols = {edge_color.get(e) for e in comp} - {None}
        if len(cols) > 1:
            raise PDError(f"cap merged strands of different colors {sorted(cols)}")
        out_colors.append(cols.pop() if cols else tcolors[0])
    for _ in range(link.loops):
        out_colors.append(tcolors[0])
    return link.with_colors(out_colors)


def parse_tangle(text: str) -> TangleDiagram:
    """PD text plus an ends block: ``ends: A1=5 A2=1 A3=4 A4=2``."""
    ends: dict[str, int] = {}
    pd_lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("ends:"):
            for tok in line[5:].split():
                name, _, val = tok.partition("=")
                ends[name.strip()] = int(val)
        else:
            pd_lines.append(line)
    if sorted(ends) != ["A1", "A2", "A3", "A4"]:
        raise PDError("tangle needs ends: A1=.. A2=.. A3=.. A4=..")
    crossings = []
    body = " ".join(pd_lines)
    pos = 0
    while pos < len(body):
        if body[pos].isspace() or body[pos] == ",":
            pos += 1
            continue
        m = _X_RE.match(body, pos)
        if not m:
            raise PDError(f"cannot parse tangle PD at ...{body[pos:pos+25]!r}")
        crossings.append(tuple(int(g) for g in m.groups()))
        pos = m.end()
    t = TangleDiagram(tuple(crossings),
                      (ends["A1"], ends["A2"], ends["A3"], ends["A4"]))
    _ = t.pattern  # force validation
    return t
