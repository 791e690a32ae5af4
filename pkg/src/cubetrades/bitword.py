"""Bit-level binary words, distances, neighborhoods and graph symmetries.

Words of length n (2 <= n <= 16) are plain int bitmasks.  Coordinate i of the
leftmost-first text form maps to bit position i, so the string "1100000000"
is the integer 0b0000000011 = 3.  Everything downstream (trades, searches,
canonical forms) works on these ints.

Three ambient graphs share the same vertex encoding:

* the n-cube H(n): all words, edges at Hamming distance 1;
* the halved n-cube: even-weight words, edges at Hamming distance 2;
* the Johnson graph J(n, w): weight-w words, edges at Hamming distance 2.

Their automorphisms are compositions of a coordinate permutation and a
translation (XOR by a fixed word); see :class:`GraphAutomorphism`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

MAX_N = 16


def check_length(n: int) -> None:
    if not 2 <= n <= MAX_N:
        raise ValueError(f"word length must be in [2, {MAX_N}], got {n}")


def check_word(w: int, n: int) -> None:
    check_length(n)
    if w < 0 or w >> n:
        raise ValueError(f"word {w:#x} has bits outside {n} coordinates")


def weight(w: int) -> int:
    """Number of set bits (nonzero coordinates)."""
    return w.bit_count()


def hamming_distance(x: int, y: int) -> int:
    """Number of coordinates where x and y differ."""
    return (x ^ y).bit_count()


def complement(w: int, n: int) -> int:
    """Bitwise negation within n coordinates (w + 1^n)."""
    return w ^ ((1 << n) - 1)


def parse_word(text: str, n: int | None = None) -> tuple[int, int]:
    """Parse a 0/1 string (grouping spaces ignored) into (word, n).

    The leftmost character is coordinate 0.  If n is given, the string
    length must match.
    """
    s = text.replace(" ", "").replace(" ", "")
    if not s or any(c not in "01" for c in s):
        raise ValueError(f"not a binary word: {text!r}")
    if n is not None and len(s) != n:
        raise ValueError(f"expected {n} coordinates, got {len(s)} in {text!r}")
    w = 0
    for i, c in enumerate(s):
        if c == "1":
            w |= 1 << i
    return w, len(s)


def format_word(w: int, n: int) -> str:
    """Leftmost-first text form, exactly n characters, no spaces."""
    check_word(w, n)
    return "".join("1" if (w >> i) & 1 else "0" for i in range(n))


def string_key(w: int, n: int) -> int:
    """Order key matching text-form lexicographic order (coordinate 0 most
    significant).  Used wherever the printed form of a set matters."""
    key = 0
    for i in range(n):
        key = (key << 1) | ((w >> i) & 1)
    return key


def halved_neighbors(w: int, n: int) -> list[int]:
    """All C(n,2) words at Hamming distance exactly 2, ascending bitmask."""
    check_word(w, n)
    out = [w ^ (1 << i) ^ (1 << j) for i, j in combinations(range(n), 2)]
    out.sort()
    return out


def johnson_neighbors(w: int, n: int) -> list[int]:
    """Same-weight words at Hamming distance 2 (one 1<->0 swap), ascending.

    Count is wt(w) * (n - wt(w)).
    """
    check_word(w, n)
    ones = [i for i in range(n) if (w >> i) & 1]
    zeros = [i for i in range(n) if not (w >> i) & 1]
    out = [w ^ (1 << i) ^ (1 << j) for i in ones for j in zeros]
    out.sort()
    return out


@dataclass(frozen=True)
class CoordPermutation:
    """A permutation of the n coordinates; image[i] is where coordinate i goes."""

    image: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.image)
        if sorted(self.image) != list(range(n)):
            raise ValueError(f"not a bijection on 0..{n - 1}: {self.image}")

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> "CoordPermutation":
        return cls(tuple(range(n)))

    def apply_word(self, w: int) -> int:
        out = 0
        for i, j in enumerate(self.image):
            if (w >> i) & 1:
                out |= 1 << j
        return out

    def compose(self, other: "CoordPermutation") -> "CoordPermutation":
        """self after other: (self * other)(w) = self(other(w))."""
        return CoordPermutation(tuple(self.image[j] for j in other.image))

    def inverse(self) -> "CoordPermutation":
        inv = [0] * self.n
        for i, j in enumerate(self.image):
            inv[j] = i
        return CoordPermutation(tuple(inv))


def parse_cycles(text: str, n: int) -> CoordPermutation:
    """Parse cycle notation like "(0123456789a)(b)" with a=10, b=11, ... f=15."""
    image = list(range(n))
    body = text.strip()
    if body and not body.startswith("("):
        raise ValueError(f"bad cycle notation: {text!r}")
    depth = 0
    cycle: list[int] = []
    for ch in body:
        if ch == "(":
            if depth:
                raise ValueError(f"nested parens in {text!r}")
            depth, cycle = 1, []
        elif ch == ")":
            if not depth:
                raise ValueError(f"unbalanced parens in {text!r}")
            depth = 0
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                image[a] = b
        elif depth:
            pt = int(ch, 16)
            if pt >= n:
                raise ValueError(f"point {ch} out of range for n={n}")
            cycle.append(pt)
        elif not ch.isspace():
            raise ValueError(f"stray character {ch!r} in {text!r}")
    if depth:
        raise ValueError(f"unbalanced parens in {text!r}")
    if sorted(image) != list(range(n)):
        raise ValueError(f"cycles are not disjoint in {text!r}")
    return CoordPermutation(tuple(image))


@dataclass(frozen=True)
class GraphAutomorphism:
    """Coordinate permutation followed by a translation (XOR).

    Acting on a word: w -> perm(w) ^ translation.  For the halved n-cube an
    even-weight translation is an automorphism proper; an odd-weight one is
    the isomorphism onto the odd half.  For J(n, w) only 0^n is allowed,
    plus 1^n when n = 2w.
    """

    perm: CoordPermutation
    translation: int = 0

    def __post_init__(self) -> None:
        check_word(self.translation, self.perm.n)

    @property
    def n(self) -> int:
        return self.perm.n

    @classmethod
    def identity(cls, n: int) -> "GraphAutomorphism":
        return cls(CoordPermutation.identity(n), 0)

    def apply(self, w: int) -> int:
        return self.perm.apply_word(w) ^ self.translation

    def apply_set(self, words) -> frozenset[int]:
        return frozenset(self.apply(w) for w in words)

    def compose(self, other: "GraphAutomorphism") -> "GraphAutomorphism":
        """self after other."""
        return GraphAutomorphism(
            self.perm.compose(other.perm),
            self.perm.apply_word(other.translation) ^ self.translation,
        )

    def inverse(self) -> "GraphAutomorphism":
        inv = self.perm.inverse()
        return GraphAutomorphism(inv, inv.apply_word(self.translation))


def apply(g: GraphAutomorphism, w: int) -> int:
    """Permute coordinates of w by g.perm, then XOR g.translation."""
    return g.apply(w)
