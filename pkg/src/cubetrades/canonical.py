"""Canonical forms, equivalence, and automorphism groups of trades.

Two trades are equivalent when some ambient-graph automorphism maps one onto
the other, allowing the two parts to swap.  The ambient group depends on the
kind: coordinate permutations with arbitrary translations for 1-perfect
trades in H(n), even-weight translations for extended trades in the halved
n-cube, and no translations for Steiner trades in J(n, k) except 1^n when
n = 2k.

The canonical form minimizes, over an equivariant family of initial
transforms (translations by trade words, optional global complement, part
permutation) and over all coordinate orders, a sequence of per-level
refinement signatures.  Coordinates are assigned to output bit positions one
at a time; the signature of a level is the split profile it induces on the
current ordered partition of the words of each part.  Minimizing that
sequence lexicographically is a sound branch order (each level's signature
depends only on the prefix), so candidates that are not minimal at a level
can be pruned, and complete assignments that tie with the current best yield
automorphisms.  Discovered automorphisms prune sibling branches in the
standard way, and their permutation parts generate the stabilizer group,
whose order is computed with a Schreier-Sims chain.

Leftmost-first word order means output bit k is the k-th assigned
coordinate; the canonical key serializes the relabeled, sorted part lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

from sympy.combinatorics import Permutation, PermutationGroup

from .bitword import CoordPermutation, GraphAutomorphism, complement
from .trade_core import EXTENDED, ONE_PERFECT, KWayTrade, Kind, Trade

KEY_VERSION = 1


@dataclass(frozen=True)
class CanonicalForm:
    """Total-order key for an equivalence class; equal keys iff equivalent."""

    key: bytes

    @property
    def hex(self) -> str:
        return self.key.hex()

    def __lt__(self, other: "CanonicalForm") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.hex


@dataclass(frozen=True)
class AutReport:
    """Automorphism-group data for a trade pair (parts may swap)."""

    order: int
    translation_count: int
    perm_stabilizer_order: int
    generators: tuple[tuple[GraphAutomorphism, bool], ...]  # (map, swaps_parts)
    coordinate_orbits: tuple[tuple[int, ...], ...]
    word_orbit_sizes: tuple[int, ...]
    part_swapping: bool


def _ambient_translations(kind: Kind, n: int, union: Sequence[int]) -> list[int]:
    """Equivariant translation candidates for the canonical search."""
    if kind.tag == "steiner":
        out = [0]
        if n == 2 * kind.k:
            out.append((1 << n) - 1)
        return out
    # H(n) and the halved cube: translating by a trade word puts 0^n in the
    # image, and only such translations can (all-word translates of the set
    # form the candidate orbit, which keeps the rule equivariant)
    return sorted(set(union))


class _Transform:
    """Initial transform tau: XOR by x, then reorder parts by part_map."""

    __slots__ = ("x", "part_map")

    def __init__(self, x: int, part_map: tuple[int, ...]):
        self.x = x
        self.part_map = part_map


class _CanonSearch:
    """Minimal-signature search over one structure; collects automorphisms.

    Within each initial transform tau the words are indexed once and groups
    are bitmasks over those indices, so a level signature is a handful of
    popcounts.  Completed assignments inside one tau branch all tie with the
    global best; the first one is remembered and later ones yield column
    automorphisms that prune sibling subtrees, which keeps even very
    symmetric inputs cheap.
    """

    def __init__(self, parts: Sequence[Sequence[int]], n: int,
                 translations: Sequence[int], part_maps: Sequence[tuple[int, ...]],
                 want_auts: bool):
        self.parts = [tuple(p) for p in parts]
        self.n = n
        self.translations = list(translations)
        self.part_maps = list(part_maps)
        self.want_auts = want_auts
        self.best_sigs: list[tuple] = []
        self.best_key: tuple[tuple[int, ...], ...] | None = None
        self.best_leaf: tuple[_Transform, tuple[int, ...]] | None = None
        self.auts: list[tuple[GraphAutomorphism, tuple[int, ...]]] = []
        self._aut_invs: list[tuple[GraphAutomorphism, tuple[int, ...]]] = []
        # per-tau state: per-column index masks, column automorphisms for
        # sibling pruning, first completed assignment
        self._colmask: list[int] = []
        self._tau_col_auts: list[tuple[int, ...]] = []
        self._tau_first: tuple[int, ...] | None = None
        self._cur_tau: _Transform | None = None

    def run(self) -> None:
        # per part order: base column masks and initial groups; a translation
        # only complements whole columns, so its masks derive in O(n)
        bases = {}
        for pm in self.part_maps:
            words: list[int] = []
            groups: list[int] = []
            for src in pm:
                lo = len(words)
                words.extend(self.parts[src])
                groups.append(((1 << (len(words) - lo)) - 1) << lo)
            base = [sum(1 << i for i, w in enumerate(words) if (w >> c) & 1)
                    for c in range(self.n)]
            bases[pm] = (base, groups, (1 << len(words)) - 1)
        explored: set[tuple[int, tuple[int, ...]]] = set()
        for x in self.translations:
            for pm in self.part_maps:
                if self._tau_skippable(x, pm, explored):
                    continue
                explored.add((x, pm))
                base, groups, full = bases[pm]
                self._cur_tau = _Transform(x, pm)
                self._colmask = [b ^ full if (x >> c) & 1 else b
                                 for c, b in enumerate(base)]
                self._tau_col_auts = []
                self._tau_first = None
                self._node(groups, [], self.best_key is None)

    def _tau_skippable(self, x: int, pm: tuple[int, ...],
                       explored: set[tuple[int, tuple[int, ...]]]) -> bool:
        """Initial transforms in one orbit of the discovered automorphisms
        explore identical key sets; composing with a known automorphism g
        turns the branch (x, pm) into (inv(g)(x), pm o sigma_g)."""
        for ginv, sigma in self._aut_invs:
            x2 = ginv.apply(x)
            pm2 = tuple(sigma[p] for p in pm)
            if (x2, pm2) in explored:
                return True
        return False

    # -- search internals --------------------------------------------------

    def _node(self, groups: list[int], assigned: list[int], writing: bool) -> None:
        k = len(assigned)
        if k == self.n:
            self._leaf(assigned, writing)
            return
        colmask = self._colmask
        bc = int.bit_count
        sigs = []
        done = 0
        for a in assigned:
            done |= 1 << a
        for c in range(self.n):
            if (done >> c) & 1:
                continue
            cm = colmask[c]
            sigs.append((tuple([bc(g & cm) for g in groups]), c))
        m = min(s for s, _ in sigs)
        if not writing:
            target = self.best_sigs[k]
            if m > target:
                return
            if m < target:
                writing = True
        if writing:
            del self.best_sigs[k:]
            self.best_sigs.append(m)
        explored: set[int] = set()
        first = writing
        for s, c in sigs:
            if s != m or self._prunable(assigned, c, explored):
                continue
            cm = colmask[c]
            new_groups = [z for g in groups if (z := g & ~cm)]
            new_groups += [o for g in groups if (o := g & cm)]
            self._node(new_groups, assigned + [c], first)
            first = False
            explored.add(c)

    def _prunable(self, assigned: list[int], c: int, explored: set[int]) -> bool:
        if not explored:
            return False
        for sigma in self._tau_col_auts:
            if sigma[c] in explored and all(sigma[a] == a for a in assigned):
                return True
        return False

    def _leaf(self, cols: list[int], writing: bool) -> None:
        tau = self._cur_tau
        if writing or self.best_key is None:
            self.best_key = self._key(tau, cols)
            self.best_leaf = (tau, tuple(cols))
            self._tau_first = tuple(cols)
            return
        if self._tau_first is None:
            self._tau_first = tuple(cols)
            if __debug__ and self._key(tau, cols) != self.best_key:
                raise AssertionError("tied signature sequence with different keys")
        else:
            sigma = [0] * self.n
            for k in range(self.n):
                sigma[cols[k]] = self._tau_first[k]
            self._tau_col_auts.append(tuple(sigma))
        best_tau, best_cols = self.best_leaf
        g, _ = self._ambient(tau, cols)
        g0, _ = self._ambient(best_tau, best_cols)
        part_map = tuple(best_tau.part_map.index(p) for p in tau.part_map)
        aut = g0.inverse().compose(g)
        self.auts.append((aut, part_map))
        self._aut_invs.append((aut.inverse(), part_map))

    def _key(self, tau: _Transform, cols: Sequence[int]) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(sorted(self._relabel(w ^ tau.x, cols) for w in self.parts[src]))
            for src in tau.part_map
        )

    @staticmethod
    def _relabel(w: int, cols: Sequence[int]) -> int:
        out = 0
        for k, c in enumerate(cols):
            if (w >> c) & 1:
                out |= 1 << k
        return out

    def _ambient(self, tau: _Transform, cols: Sequence[int]) -> tuple[GraphAutomorphism, tuple[int, ...]]:
        image = [0] * self.n
        for k, c in enumerate(cols):
            image[c] = k
        perm = CoordPermutation(tuple(image))
        return GraphAutomorphism(perm, perm.apply_word(tau.x)), tau.part_map


def _encode_key(n: int, parts: tuple[tuple[int, ...], ...]) -> bytes:
    out = bytearray([KEY_VERSION, n, len(parts)])
    vol = len(parts[0])
    out += vol.to_bytes(2, "little")
    for part in parts:
        for w in part:
            out += w.to_bytes(2, "little")
    return bytes(out)


def _canon(parts: Sequence[Sequence[int]], n: int, translations: Sequence[int],
           part_maps: Sequence[tuple[int, ...]], want_auts: bool) -> _CanonSearch:
    search = _CanonSearch(parts, n, translations, part_maps, want_auts)
    search.run()
    return search


_form_cache: dict[tuple, CanonicalForm] = {}


def canonical_parts(parts: Sequence[Sequence[int]], n: int, kind: Kind,
                    allow_part_swap: bool = True) -> CanonicalForm:
    """Canonical key of an ordered tuple of parts under the kind's ambient."""
    union = [w for p in parts for w in p]
    translations = _ambient_translations(kind, n, union)
    if allow_part_swap:
        part_maps = [tuple(pm) for pm in permutations(range(len(parts)))]
    else:
        part_maps = [tuple(range(len(parts)))]
    search = _canon(parts, n, translations, part_maps, want_auts=False)
    return CanonicalForm(_encode_key(n, search.best_key))


def canonical_form(t: Trade, use_cache: bool = True) -> CanonicalForm:
    """Canonical key of a trade; equal keys exactly for equivalent trades."""
    cache_key = (t.n, str(t.kind), t.t0, t.t1)
    if use_cache and cache_key in _form_cache:
        return _form_cache[cache_key]
    form = canonical_parts((t.t0, t.t1), t.n, t.kind)
    if use_cache:
        _form_cache[cache_key] = form
    return form


def canonical_form_kway(t: KWayTrade) -> CanonicalForm:
    return canonical_parts(t.parts, t.n, t.kind)


def canonical_form_permonly(words: Iterable[int], n: int,
                            allow_complement: bool = False) -> CanonicalForm:
    """Canonical key of a single word set under coordinate permutations,
    optionally together with the global complement."""
    part = tuple(sorted(set(words)))
    translations = [0] + ([(1 << n) - 1] if allow_complement else [])
    search = _canon((part,), n, translations, [(0,)], want_auts=False)
    return CanonicalForm(_encode_key(n, search.best_key))


def are_equivalent(a: Trade, b: Trade) -> bool:
    if a.n != b.n or a.kind != b.kind:
        raise ValueError(f"cannot compare kind {a.kind} n={a.n} with kind {b.kind} n={b.n}")
    return canonical_form(a) == canonical_form(b)


def _translation_stabilizer(union: frozenset[int], candidates: Iterable[int]) -> list[int]:
    out = []
    for x in set(candidates):
        if frozenset(w ^ x for w in union) == union:
            out.append(x)
    return sorted(out)


def _perm_group_order(images: list[tuple[int, ...]], n: int) -> int:
    if not images:
        return 1
    return int(PermutationGroup([Permutation(list(im)) for im in images]).order())


def automorphisms(t: Trade) -> AutReport:
    """Full automorphism group of T0 u T1 as a part-preserving-or-swapping
    group: run the canonical search collecting stabilizer elements, then
    factor the order as (pure translations) x (permutation image)."""
    union = frozenset(t.union())
    n = t.n
    if t.kind.tag == "steiner":
        trans_candidates: Iterable[int] = _ambient_translations(t.kind, n, t.union())
    else:
        u0 = min(union)
        trans_candidates = (w ^ u0 for w in union)
    translations = _translation_stabilizer(union, trans_candidates)
    tc = len(translations)

    search = _canon((t.t0, t.t1), t.n,
                    _ambient_translations(t.kind, n, t.union()),
                    [(0, 1), (1, 0)], want_auts=True)
    gen_perms = [g.perm.image for g, _ in search.auts]
    perm_order = _perm_group_order(gen_perms, n)
    order = tc * perm_order

    # coordinate orbits under the permutation image
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for im in gen_perms:
        for i in range(n):
            ra, rb = find(i), find(im[i])
            if ra != rb:
                parent[ra] = rb
    orbits_map: dict[int, list[int]] = {}
    for i in range(n):
        orbits_map.setdefault(find(i), []).append(i)
    coordinate_orbits = tuple(sorted((tuple(sorted(o)) for o in orbits_map.values())))

    # word orbits on the union under all generators plus pure translations
    gens = list(search.auts) + [
        (GraphAutomorphism(CoordPermutation.identity(n), x), (0, 1)) for x in translations
    ]
    seen: set[int] = set()
    word_orbit_sizes = []
    for w in sorted(union):
        if w in seen:
            continue
        orbit = {w}
        stack = [w]
        while stack:
            v = stack.pop()
            for g, _ in gens:
                u = g.apply(v)
                if u not in orbit:
                    orbit.add(u)
                    stack.append(u)
        seen |= orbit
        word_orbit_sizes.append(len(orbit))

    part_swapping = any(pm != (0, 1) for _, pm in gens) or any(
        frozenset(w ^ x for w in t.t0) == frozenset(t.t1) for x in translations
    )
    return AutReport(
        order=order,
        translation_count=tc,
        perm_stabilizer_order=perm_order,
        generators=tuple(search.auts),
        coordinate_orbits=coordinate_orbits,
        word_orbit_sizes=tuple(sorted(word_orbit_sizes)),
        part_swapping=part_swapping,
    )


def aut_order_set_permonly(words: Iterable[int], n: int,
                           allow_complement: bool = False) -> int:
    """Order of the stabilizer of a word set under coordinate permutations,
    optionally extended by the global complement (the J(2k, k) ambient)."""
    part = tuple(sorted(set(words)))
    union = frozenset(part)
    translations = [0] + ([(1 << n) - 1] if allow_complement else [])
    tc = len(_translation_stabilizer(union, translations))
    search = _canon((part,), n, translations, [(0,)], want_auts=True)
    perm_order = _perm_group_order([g.perm.image for g, _ in search.auts], n)
    return tc * perm_order
