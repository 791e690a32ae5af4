"""Trades: the core pair type, verification, and structural operations.

A trade is an ordered pair (T0, T1) of disjoint nonempty word sets such that
every ball (1-perfect kind) or maximum clique (extended / Steiner kinds) of
the ambient graph meets T0 and T1 equally often, 0 or 1 times each.  The
extended kind lives in the halved n-cube on even-weight words; Steiner(k)
lives in J(n, k).

Verification of the extended and Steiner kinds uses the bipartite-regularity
criterion: the pair is a trade iff the subgraph induced by T0 u T1 is
bipartite with parts T0, T1 and regular of degree n/2 (resp. k).  The direct
ball/clique counting definition is kept in the test suite as the independent
oracle for this criterion.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .bitword import (
    check_length,
    check_word,
    complement,
    format_word,
    parse_word,
    string_key,
    weight,
)


@dataclass(frozen=True)
class Kind:
    """Trade kind: extended 1-perfect, 1-perfect, or Steiner(k)."""

    tag: str  # "ext" | "perf" | "steiner"
    k: int = 0

    def __post_init__(self) -> None:
        if self.tag not in ("ext", "perf", "steiner"):
            raise ValueError(f"unknown trade kind {self.tag!r}")
        if (self.tag == "steiner") != (self.k > 0):
            raise ValueError(f"kind {self.tag!r} with k={self.k}")

    def __str__(self) -> str:
        return f"steiner:{self.k}" if self.tag == "steiner" else self.tag

    @classmethod
    def parse(cls, text: str) -> "Kind":
        if text == "ext":
            return EXTENDED
        if text == "perf":
            return ONE_PERFECT
        if text.startswith("steiner:"):
            return cls("steiner", int(text.split(":", 1)[1]))
        raise ValueError(f"unknown trade kind {text!r}")


EXTENDED = Kind("ext")
ONE_PERFECT = Kind("perf")


def steiner(k: int) -> Kind:
    return Kind("steiner", k)


def _check_part(words: Iterable[int], n: int, kind: Kind, name: str) -> tuple[int, ...]:
    part = tuple(sorted(set(words)))
    if not part:
        raise ValueError(f"{name} is empty")
    for w in part:
        check_word(w, n)
        if kind.tag == "steiner" and weight(w) != kind.k:
            raise ValueError(f"{name} word {format_word(w, n)} has weight != {kind.k}")
    return part


@dataclass(frozen=True)
class Trade:
    """An ordered trade pair.  Parts are stored sorted ascending by bitmask;
    disjointness and equal volumes are enforced at construction."""

    n: int
    kind: Kind
    t0: tuple[int, ...]
    t1: tuple[int, ...]

    def __post_init__(self) -> None:
        check_length(self.n)
        t0 = _check_part(self.t0, self.n, self.kind, "T0")
        t1 = _check_part(self.t1, self.n, self.kind, "T1")
        object.__setattr__(self, "t0", t0)
        object.__setattr__(self, "t1", t1)
        if set(t0) & set(t1):
            raise ValueError("T0 and T1 intersect")
        if len(t0) != len(t1):
            raise ValueError(f"|T0|={len(t0)} != |T1|={len(t1)}")
        if self.kind.tag == "steiner" and self.n < 2 * self.kind.k:
            raise ValueError(f"Steiner({self.kind.k}) needs n >= {2 * self.kind.k}")
        if self.kind.tag == "ext":
            # extended trades live in one parity class of the halved cube;
            # the printed length-10 representatives use the odd half
            parities = {weight(w) & 1 for w in t0 + t1}
            if len(parities) != 1:
                raise ValueError("extended trade words must share one weight parity")

    @property
    def volume(self) -> int:
        return len(self.t0)

    def union(self) -> tuple[int, ...]:
        return tuple(sorted(self.t0 + self.t1))

    def swapped(self) -> "Trade":
        return Trade(self.n, self.kind, self.t1, self.t0)

    def translate(self, x: int) -> "Trade":
        return Trade(self.n, self.kind, [w ^ x for w in self.t0], [w ^ x for w in self.t1])


@dataclass(frozen=True)
class KWayTrade:
    """k >= 2 word sets, every two of which form a valid trade."""

    n: int
    kind: Kind
    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.parts) < 2:
            raise ValueError("a k-way trade needs at least 2 parts")
        parts = tuple(
            _check_part(p, self.n, self.kind, f"part {i}") for i, p in enumerate(self.parts)
        )
        object.__setattr__(self, "parts", parts)

    @property
    def volume(self) -> int:
        return len(self.parts[0])

    def pair(self, i: int, j: int) -> Trade:
        return Trade(self.n, self.kind, self.parts[i], self.parts[j])

    def verify(self) -> bool:
        return all(
            verify(self.pair(i, j)).valid
            for i, j in combinations(range(len(self.parts)), 2)
        )


@dataclass
class VerifyReport:
    valid: bool
    violations: list[str] = field(default_factory=list)
    degree_histogram: dict[int, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.valid


def _bipartite_regular_report(t: Trade, degree: int) -> VerifyReport:
    """Prop.-2-style check: parts independent at distance 2, cross-degree fixed."""
    violations: list[str] = []
    hist: dict[int, int] = {}
    for name, part in (("T0", t.t0), ("T1", t.t1)):
        for x, y in combinations(part, 2):
            if (x ^ y).bit_count() == 2:
                violations.append(
                    f"within-part pair in {name}: {format_word(x, t.n)} ~ {format_word(y, t.n)}"
                )
    for name, part, other in (("T0", t.t0, t.t1), ("T1", t.t1, t.t0)):
        for x in part:
            d = sum(1 for y in other if (x ^ y).bit_count() == 2)
            hist[d] = hist.get(d, 0) + 1
            if d != degree:
                violations.append(
                    f"{name} word {format_word(x, t.n)} has {d} opposite neighbors, expected {degree}"
                )
    return VerifyReport(not violations, violations, hist)


def verify_extended(t: Trade) -> VerifyReport:
    """Validity of an extended 1-perfect trade in the halved n-cube."""
    if t.kind != EXTENDED:
        raise ValueError(f"expected an extended trade, got kind {t.kind}")
    if t.n % 2:
        raise ValueError(f"extended trades need even length, got n={t.n}")
    return _bipartite_regular_report(t, t.n // 2)


def verify_1perfect(t: Trade) -> VerifyReport:
    """Validity of a 1-perfect trade in H(n): equal ball counts <= 1 for every
    radius-1 ball.  Direct check over all 2^n centers."""
    if t.kind != ONE_PERFECT:
        raise ValueError(f"expected a 1-perfect trade, got kind {t.kind}")
    if t.n % 2 == 0:
        raise ValueError(f"1-perfect trades need odd length, got n={t.n}")
    s0, s1 = set(t.t0), set(t.t1)
    violations = []
    hist: dict[int, int] = {}
    for c in range(1 << t.n):
        ball = [c] + [c ^ (1 << i) for i in range(t.n)]
        c0 = sum(1 for w in ball if w in s0)
        c1 = sum(1 for w in ball if w in s1)
        if c0 or c1:
            hist[c0] = hist.get(c0, 0) + 1
        if c0 != c1 or c0 > 1:
            violations.append(f"ball at {format_word(c, t.n)}: |T0 n B|={c0}, |T1 n B|={c1}")
    return VerifyReport(not violations, violations, hist)


def verify_steiner(t: Trade) -> VerifyReport:
    """Validity of a Steiner(k) trade in J(n, k): every maximum clique meets
    the parts equally, 0 or 1 times.  Cliques are centered at weight-(k-1)
    words; for n = 2k also weight-(k+1) words."""
    if t.kind.tag != "steiner":
        raise ValueError(f"expected a Steiner trade, got kind {t.kind}")
    k, n = t.kind.k, t.n
    s0, s1 = set(t.t0), set(t.t1)
    violations = []
    hist: dict[int, int] = {}

    def check_centers(wt: int) -> None:
        for bits in combinations(range(n), wt):
            b = 0
            for i in bits:
                b |= 1 << i
            c0 = sum(1 for w in s0 if (w ^ b).bit_count() == 1)
            c1 = sum(1 for w in s1 if (w ^ b).bit_count() == 1)
            if c0 or c1:
                hist[c0] = hist.get(c0, 0) + 1
            if c0 != c1 or c0 > 1:
                violations.append(
                    f"clique at {format_word(b, n)}: |T0|={c0}, |T1|={c1}"
                )

    check_centers(k - 1)
    if n == 2 * k:
        check_centers(k + 1)
    return VerifyReport(not violations, violations, hist)


def verify(t: Trade) -> VerifyReport:
    """Dispatch to the kind's verifier."""
    if t.kind == EXTENDED:
        return verify_extended(t)
    if t.kind == ONE_PERFECT:
        return verify_1perfect(t)
    return verify_steiner(t)


def _distance2_adjacency(words: Sequence[int]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in words]
    for i, j in combinations(range(len(words)), 2):
        if (words[i] ^ words[j]).bit_count() == 2:
            adj[i].append(j)
            adj[j].append(i)
    return adj


def is_primary(t: Trade) -> bool:
    """A trade is primary iff the distance-2 graph on T0 u T1 is connected."""
    words = t.union()
    adj = _distance2_adjacency(words)
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(words)


class ComplementSymmetry(enum.Enum):
    SWAPS_PARTS = "swaps"
    FIXES_PARTS = "fixes"
    NEITHER = "neither"


def complement_symmetry(t: Trade) -> ComplementSymmetry:
    """How translation by 1^n acts on the pair.  For a valid extended trade
    this is forced by n mod 4: swap for n = 2 mod 4, fix for n = 0 mod 4."""
    c0 = frozenset(complement(w, t.n) for w in t.t0)
    if c0 == frozenset(t.t1):
        return ComplementSymmetry.SWAPS_PARTS
    if c0 == frozenset(t.t0):
        c1 = frozenset(complement(w, t.n) for w in t.t1)
        if c1 == frozenset(t.t1):
            return ComplementSymmetry.FIXES_PARTS
    return ComplementSymmetry.NEITHER


def eigenfunction_check(t: Trade) -> bool:
    """Check that chi = chi_T0 - chi_T1 is an ambient-graph eigenfunction.

    Eigenvalues: -1 for 1-perfect in H(n); -n/2 for extended in the halved
    n-cube (and additionally 0 when viewed in H(n)); -k for Steiner in
    J(n, k).
    """
    chi = {w: 1 for w in t.t0}
    chi.update({w: -1 for w in t.t1})
    n = t.n

    if t.kind == ONE_PERFECT:
        for x in range(1 << n):
            s = sum(chi.get(x ^ (1 << i), 0) for i in range(n))
            if s != -chi.get(x, 0):
                return False
        return True

    if t.kind == EXTENDED:
        parity = weight(t.t0[0]) & 1
        pairs = [(1 << i) | (1 << j) for i, j in combinations(range(n), 2)]
        for x in range(1 << n):
            if x.bit_count() & 1 != parity:
                continue
            s = sum(chi.get(x ^ p, 0) for p in pairs)
            if 2 * s != -n * chi.get(x, 0):
                return False
        # viewed in H(n) the characteristic function has eigenvalue 0
        for x in range(1 << n):
            s = sum(chi.get(x ^ (1 << i), 0) for i in range(n))
            if s != 0:
                return False
        return True

    k = t.kind.k
    for x in range(1 << n):
        if x.bit_count() != k:
            continue
        s = 0
        for i in range(n):
            if (x >> i) & 1:
                for j in range(n):
                    if not (x >> j) & 1:
                        s += chi.get(x ^ (1 << i) ^ (1 << j), 0)
        if s != -k * chi.get(x, 0):
            return False
    return True


def extend_parity(t: Trade) -> Trade:
    """Append an even-weight parity coordinate; 1-perfect -> extended."""
    if t.kind != ONE_PERFECT:
        raise ValueError("extend_parity expects a 1-perfect trade")

    def ext(w: int) -> int:
        return w | ((weight(w) & 1) << t.n)

    return Trade(t.n + 1, EXTENDED, [ext(w) for w in t.t0], [ext(w) for w in t.t1])


def puncture(t: Trade, i: int) -> Trade:
    """Delete coordinate i from all words; extended -> 1-perfect."""
    if t.kind != EXTENDED:
        raise ValueError("puncture expects an extended trade")
    if not 0 <= i < t.n:
        raise ValueError(f"coordinate {i} out of range for n={t.n}")
    low = (1 << i) - 1

    def punct(w: int) -> int:
        return (w & low) | ((w >> (i + 1)) << i)

    return Trade(t.n - 1, ONE_PERFECT, [punct(w) for w in t.t0], [punct(w) for w in t.t1])


def gf2_reduced_basis(words: Iterable[int]) -> list[int]:
    """Reduced GF(2) basis with pivots at the lowest set bit (coordinate 0 is
    the most significant position of the text form, so pivoting low keeps the
    printed basis in the shape the tables use)."""
    basis: list[int] = []
    for w in words:
        for b in basis:
            low = b & -b
            if w & low:
                w ^= b
        if w:
            basis.append(w)
    # back-substitute to reduced form
    for i, b in enumerate(basis):
        low = b & -b
        for j in range(len(basis)):
            if j != i and basis[j] & low:
                basis[j] ^= b
    basis.sort(key=lambda b: b & -b)
    return basis


def gf2_span(basis: Sequence[int]) -> list[int]:
    out = [0]
    for b in basis:
        out += [w ^ b for w in out]
    return sorted(set(out))


def kernel_decomposition(words: Iterable[int], n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split a word set S as K + R: K = {x : S + x = S} is the maximal linear
    space of translations fixing S, R holds the lexicographically least
    representative (in text-form order) of each K-coset meeting S."""
    s = frozenset(words)
    if not s:
        raise ValueError("kernel_decomposition needs a nonempty set")
    s0 = next(iter(s))
    kernel = [x for x in (w ^ s0 for w in s) if frozenset(y ^ x for y in s) == s]
    if 0 not in kernel:
        kernel.append(0)
    kset = gf2_span(gf2_reduced_basis(kernel))
    reps = {}
    for w in s:
        rep = min((w ^ x for x in kset), key=lambda v: string_key(v, n))
        reps[rep] = None
    r = tuple(sorted(reps, key=lambda v: string_key(v, n)))
    if len(kset) * len(r) != len(s):
        raise AssertionError("kernel decomposition does not tile the set")
    return tuple(kset), r


def girth(t: Trade) -> float:
    """Girth of the distance-2 graph induced on T0 u T1 (math.inf if acyclic)."""
    words = t.union()
    adj = _distance2_adjacency(words)
    best = math.inf
    for root in range(len(words)):
        dist = {root: 0}
        parent = {root: -1}
        queue = [root]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            if 2 * dist[u] >= best:
                break
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif parent[u] != v and parent[v] != u:
                    best = min(best, dist[u] + dist[v] + 1)
    return best


# --- text format -----------------------------------------------------------
#
# One record:
#   trade n=<n> kind=<ext|perf|steiner:k> vol=<v> [parts=<p>]
#   <v word lines>
#   ---
#   <v word lines>            (one block per part, separated by ---)


def format_trade(t: Trade | KWayTrade) -> str:
    parts = t.parts if isinstance(t, KWayTrade) else (t.t0, t.t1)
    head = f"trade n={t.n} kind={t.kind} vol={len(parts[0])}"
    if len(parts) != 2:
        head += f" parts={len(parts)}"
    blocks = ["\n".join(format_word(w, t.n) for w in part) for part in parts]
    return head + "\n" + "\n---\n".join(blocks) + "\n"


def _parse_header(line: str) -> tuple[int, Kind, int, int]:
    fields = line.split()
    if not fields or fields[0] != "trade":
        raise ValueError(f"bad trade header: {line!r}")
    opts = dict(f.split("=", 1) for f in fields[1:])
    n = int(opts["n"])
    kind = Kind.parse(opts["kind"])
    vol = int(opts["vol"])
    nparts = int(opts.get("parts", "2"))
    return n, kind, vol, nparts


def parse_trades(text: str) -> list[Trade | KWayTrade]:
    """Parse a stream of trade records.  Round-trips format_trade exactly."""
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    out: list[Trade | KWayTrade] = []
    pos = 0
    while pos < len(lines):
        if not lines[pos].strip() or lines[pos].lstrip().startswith("#"):
            pos += 1
            continue
        n, kind, vol, nparts = _parse_header(lines[pos])
        pos += 1
        parts = []
        for p in range(nparts):
            block = []
            for _ in range(vol):
                if pos >= len(lines):
                    raise ValueError("truncated trade record")
                w, _ = parse_word(lines[pos], n)
                block.append(w)
                pos += 1
            parts.append(block)
            if p < nparts - 1:
                if pos >= len(lines) or lines[pos].strip() != "---":
                    raise ValueError("expected --- between trade parts")
                pos += 1
        if nparts == 2:
            out.append(Trade(n, kind, parts[0], parts[1]))
        else:
            out.append(KWayTrade(n, kind, tuple(tuple(sorted(p)) for p in parts)))
    return out
