"""Bitstrings, Hamming-distance concept classes and permutations of a response set.

Bitstrings serialize most-significant-bit first, so bit 0 is the leftmost
character and the integer value of ``"10"`` is 2. Permutations act on the
labels ``1..r`` and print in canonical cycle notation.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_BITS = 20
MAX_EXHAUSTIVE_BITS = 12


# -- bitstrings ------------------------------------------------------------


@dataclass(frozen=True)
class BitString:
    """An n-bit string stored as an integer value."""

    value: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_BITS:
            raise ValueError(f"bitstring length must be in 1..{MAX_BITS}, got {self.n}")
        if not 0 <= self.value < (1 << self.n):
            raise ValueError(f"value {self.value} does not fit in {self.n} bits")

    @classmethod
    def parse(cls, text: str) -> "BitString":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a 0/1 string: {text!r}")
        return cls(int(text, 2), len(text))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitString":
        return cls.parse("".join(str(int(b)) for b in bits))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(int(c) for c in str(self))

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def complement(self) -> "BitString":
        return BitString(self.value ^ ((1 << self.n) - 1), self.n)

    def __xor__(self, other: "BitString") -> "BitString":
        _check_same_length(self, other)
        return BitString(self.value ^ other.value, self.n)

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b")


def all_bitstrings(n: int) -> Iterable[BitString]:
    for v in range(1 << n):
        yield BitString(v, n)


def _check_same_length(x: BitString, y: BitString) -> None:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")


def hamming_distance(x: BitString, y: BitString) -> int:
    _check_same_length(x, y)
    return (x.value ^ y.value).bit_count()


def dot(x: BitString, y: BitString) -> int:
    """Inner product of two bitstrings over the integers (not reduced mod 2)."""
    _check_same_length(x, y)
    return (x.value & y.value).bit_count()


def b1(d: int) -> int:
    """Second least significant bit of ``d``."""
    if d < 0:
        raise ValueError("b1 is defined on nonnegative integers")
    return (d >> 1) & 1


def hat(x: BitString) -> BitString:
    """x itself if its weight is even, otherwise its complement."""
    return x if x.weight % 2 == 0 else x.complement()


def hat_value(x: int, n: int) -> int:
    return x if x.bit_count() % 2 == 0 else x ^ ((1 << n) - 1)


# -- functions of Hamming distance -------------------------------------------


@dataclass(frozen=True)
class HFunction:
    """A map h : {0..n} -> {0,1}; the concept for hidden a is x -> h(dist(a, x))."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) < 2:
            raise ValueError("an HFunction needs n+1 >= 2 values")
        if set(self.values) - {0, 1}:
            raise ValueError(f"HFunction values must be 0/1, got {self.values}")

    @property
    def n(self) -> int:
        return len(self.values) - 1

    def __call__(self, d: int) -> int:
        return self.values[d]

    @classmethod
    def b1(cls, n: int) -> "HFunction":
        return cls(tuple(b1(d) for d in range(n + 1)))

    @classmethod
    def constant(cls, n: int, value: int = 0) -> "HFunction":
        return cls((value,) * (n + 1))

    @classmethod
    def from_index(cls, index: int, n: int) -> "HFunction":
        """The function whose value at d is bit d of ``index``."""
        return cls(tuple((index >> d) & 1 for d in range(n + 1)))

    def __str__(self) -> str:
        return "".join(map(str, self.values))


def concept_value(h: HFunction, a: BitString, x: BitString) -> int:
    if h.n != a.n:
        raise ValueError(f"h has {h.n + 1} values but strings have length {a.n}")
    return h(hamming_distance(a, x))


def concept_table(h: HFunction, n: int) -> np.ndarray:
    """N x N 0/1 array whose row a lists g_a(x) over all x."""
    if h.n != n:
        raise ValueError(f"h has {h.n + 1} values, expected {n + 1}")
    if n > MAX_EXHAUSTIVE_BITS:
        raise ValueError(f"n={n} exceeds the exhaustive limit {MAX_EXHAUSTIVE_BITS}")
    dist = distance_matrix(n)
    return np.asarray(h.values, dtype=np.int8)[dist]


def distinct_concepts(h: HFunction, n: int) -> int:
    """Number of distinct rows of the concept table.

    Row a is row 0 shifted by a, so rows a and a' agree exactly when a ^ a'
    stabilizes row 0; the count is N over the size of that stabilizer.
    """
    table = concept_table(h, n)
    stabilizer = int(np.count_nonzero((table == table[0]).all(axis=1)))
    return table.shape[0] // stabilizer


@lru_cache(maxsize=16)
def distance_matrix(n: int) -> np.ndarray:
    x = np.arange(1 << n, dtype=np.int64)
    xor = x[:, None] ^ x[None, :]
    dist = np.zeros_like(xor)
    for k in range(n):
        dist += (xor >> k) & 1
    dist.setflags(write=False)
    return dist


# -- permutations ------------------------------------------------------------


@dataclass(frozen=True)
class Permutation:
    """Element of S_r in one-line form: ``images[b-1]`` is the image of ``b``."""

    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(i) for i in self.images))
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"{self.images} is not a permutation of 1..{len(self.images)}")

    @property
    def r(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, r: int) -> "Permutation":
        return cls(tuple(range(1, r + 1)))

    @classmethod
    def cycle(cls, r: int, *elements: int) -> "Permutation":
        return parse_cycles("(" + " ".join(map(str, elements)) + ")", r) if elements else cls.identity(r)

    def __call__(self, b: int) -> int:
        return apply(self, b)

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __pow__(self, d: int) -> "Permutation":
        return power(self, d)

    def inverse(self) -> "Permutation":
        inv = [0] * self.r
        for b, img in enumerate(self.images, start=1):
            inv[img - 1] = b
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.r + 1))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(1, self.r + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            b = self.images[start - 1]
            while b != start:
                cyc.append(b)
                seen.add(b)
                b = self.images[b - 1]
            out.append(tuple(cyc))
        return out

    def zero_based(self) -> tuple[int, ...]:
        return tuple(i - 1 for i in self.images)

    def __str__(self) -> str:
        return format_cycles(self)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)!r}, r={self.r})"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, r: int) -> Permutation:
    """Parse a product of disjoint cycles such as ``"(13)(2 4)"``.

    Symbols are separated by whitespace or commas; with no separator each
    character is one symbol, which covers r <= 9. ``"(1)"`` and ``"()"`` are
    the identity.
    """
    if r < 1:
        raise ValueError("degree must be positive")
    text = text.strip()
    if not text:
        raise ValueError("empty cycle text")
    if _CYCLE_RE.sub("", text).strip():
        raise ValueError(f"malformed cycle text: {text!r}")
    images = list(range(1, r + 1))
    used: set[int] = set()
    for body in _CYCLE_RE.findall(text):
        body = body.strip()
        if not body:
            continue
        tokens = re.split(r"[\s,]+", body) if re.search(r"[\s,]", body) else list(body)
        try:
            cyc = [int(t) for t in tokens if t]
        except ValueError:
            raise ValueError(f"malformed cycle text: {text!r}") from None
        for s in cyc:
            if not 1 <= s <= r:
                raise ValueError(f"symbol {s} outside 1..{r}")
            if s in used:
                raise ValueError(f"symbol {s} repeated in {text!r}")
            used.add(s)
        for i, s in enumerate(cyc):
            images[s - 1] = cyc[(i + 1) % len(cyc)]
    return Permutation(tuple(images))


def format_cycles(p: Permutation) -> str:
    """Canonical cycle text: fixed points omitted, each cycle led by its smallest symbol."""
    parts = [c for c in p.cycles() if len(c) > 1]
    if not parts:
        return "(1)"
    sep = "" if p.r <= 9 else " "
    return "".join("(" + sep.join(map(str, c)) + ")" for c in parts)


def _check_degree(p: Permutation, q: Permutation) -> None:
    if p.r != q.r:
        raise ValueError(f"degree mismatch: {p.r} != {q.r}")


def compose(p: Permutation, q: Permutation) -> Permutation:
    """p after q: b -> p(q(b))."""
    _check_degree(p, q)
    return Permutation(tuple(p.images[q.images[b] - 1] for b in range(q.r)))


def power(p: Permutation, d: int) -> Permutation:
    base = p if d >= 0 else p.inverse()
    result = Permutation.identity(p.r)
    for _ in range(abs(d) % max(1, _order(p))):
        result = compose(base, result)
    return result


def _order(p: Permutation) -> int:
    return math.lcm(*(len(c) for c in p.cycles()))


def apply(p: Permutation, b: int) -> int:
    if not 1 <= b <= p.r:
        raise ValueError(f"element {b} outside 1..{p.r}")
    return p.images[b - 1]


@lru_cache(maxsize=8)
def permutations_lex(r: int) -> tuple[Permutation, ...]:
    """All of S_r in lexicographic one-line order."""
    if r < 1:
        raise ValueError("degree must be positive")
    return tuple(Permutation(t) for t in itertools.permutations(range(1, r + 1)))


@lru_cache(maxsize=8)
def _perm_rank(r: int) -> dict[tuple[int, ...], int]:
    return {p.images: i for i, p in enumerate(permutations_lex(r))}


def perm_index(p: Permutation) -> int:
    return _perm_rank(p.r)[p.images]


# -- assignments d -> sigma_d --------------------------------------------------


@dataclass(frozen=True)
class SigmaAssignment:
    """Permutation of the response set attached to each Hamming distance 0..n."""

    perms: tuple[Permutation, ...]

    def __post_init__(self):
        object.__setattr__(self, "perms", tuple(self.perms))
        if len(self.perms) < 2:
            raise ValueError("an assignment needs n+1 >= 2 permutations")
        degrees = {p.r for p in self.perms}
        if len(degrees) != 1:
            raise ValueError(f"permutations of mixed degree {sorted(degrees)}")

    @property
    def n(self) -> int:
        return len(self.perms) - 1

    @property
    def r(self) -> int:
        return self.perms[0].r

    def __getitem__(self, d: int) -> Permutation:
        return self.perms[d]

    def __iter__(self):
        return iter(self.perms)

    def __len__(self) -> int:
        return len(self.perms)

    @classmethod
    def parse(cls, texts: Sequence[str] | str, r: int) -> "SigmaAssignment":
        """Accepts a list of cycle texts or one comma/semicolon separated string."""
        if isinstance(texts, str):
            texts = [t for t in re.split(r"[;,]\s*(?![^()]*\))", texts.strip()) if t.strip()]
        return cls(tuple(parse_cycles(t, r) for t in texts))

    def cycle_texts(self) -> list[str]:
        return [format_cycles(p) for p in self.perms]

    def right_compose(self, pi: Permutation) -> "SigmaAssignment":
        """sigma_d -> sigma_d * pi for every d."""
        return SigmaAssignment(tuple(compose(p, pi) for p in self.perms))

    def inverse(self) -> "SigmaAssignment":
        return SigmaAssignment(tuple(p.inverse() for p in self.perms))

    def __str__(self) -> str:
        return "(" + ",".join(self.cycle_texts()) + ")"


def additive_assignment(n: int, r: int) -> SigmaAssignment:
    """d -> (12...r)^d, i.e. adding the distance into the response register mod r."""
    if r < 1:
        raise ValueError("r must be positive")
    shift = Permutation(tuple(list(range(2, r + 1)) + [1]))
    return SigmaAssignment(tuple(power(shift, d) for d in range(n + 1)))


def b1_assignment(n: int) -> SigmaAssignment:
    swap = Permutation((2, 1))
    return SigmaAssignment(tuple(power(swap, b1(d)) for d in range(n + 1)))


def h_assignment(h: HFunction) -> SigmaAssignment:
    """d -> (12)^h(d), the r=2 oracle that kicks back the phase (-1)^h(d)."""
    swap = Permutation((2, 1))
    return SigmaAssignment(tuple(power(swap, v) for v in h.values))


def assignment_count(n: int, r: int) -> int:
    return math.factorial(r) ** (n + 1)


def assignment_from_index(idx: int, n: int, r: int) -> SigmaAssignment:
    """Mixed-radix decoding, base r!, with sigma_0 as the most significant digit.

    The first (r!)^n indices are therefore exactly the assignments with
    sigma_0 = identity.
    """
    total = assignment_count(n, r)
    if not 0 <= idx < total:
        raise ValueError(f"index {idx} outside [0, {total})")
    perms = permutations_lex(r)
    base = len(perms)
    digits = []
    for _ in range(n + 1):
        idx, digit = divmod(idx, base)
        digits.append(perms[digit])
    return SigmaAssignment(tuple(reversed(digits)))


def index_from_assignment(sigma: SigmaAssignment) -> int:
    base = math.factorial(sigma.r)
    idx = 0
    for p in sigma.perms:
        idx = idx * base + perm_index(p)
    return idx
