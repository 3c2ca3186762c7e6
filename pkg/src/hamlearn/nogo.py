"""Learning matrices of distance-based concept classes and the exhaustive scan over h."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import MAX_EXHAUSTIVE_BITS, HFunction, b1, distance_matrix, distinct_concepts
from .srm import krawtchouk

# above this width the orthogonality test switches to the Krawtchouk spectrum
DENSE_HADAMARD_LIMIT = 9


@dataclass(frozen=True)
class LearningMatrix:
    """L[x, a] = (-1)^{h(dist(a, x))}."""

    entries: np.ndarray
    h: HFunction

    @property
    def N(self) -> int:
        return self.entries.shape[0]


def learning_matrix(h: HFunction, n: int) -> LearningMatrix:
    if h.n != n:
        raise ValueError(f"h has {h.n + 1} values, expected {n + 1}")
    if n > MAX_EXHAUSTIVE_BITS:
        raise ValueError(f"n={n} exceeds the limit {MAX_EXHAUSTIVE_BITS} for dense learning matrices")
    signs = np.where(np.asarray(h.values) == 1, -1, 1).astype(np.int8)
    return LearningMatrix(signs[distance_matrix(n)], h)


def is_hadamard(L: LearningMatrix | np.ndarray) -> bool:
    """True iff L is a square +-1 matrix with pairwise orthogonal columns."""
    m = L.entries if isinstance(L, LearningMatrix) else np.asarray(L)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.abs(m) == 1):
        raise ValueError("entries must all be +1 or -1")
    f = m.astype(np.float64)
    return bool(np.array_equal(f.T @ f, m.shape[0] * np.eye(m.shape[0])))


def is_hadamard_spectral(h: HFunction) -> bool:
    """Same test through the eigenvalues sum_d (-1)^h(d) K_d(j) of the symmetric L.

    L is symmetric, so L^T L = N I exactly when every eigenvalue squares to N.
    """
    n = h.n
    signs = np.where(np.asarray(h.values) == 1, -1.0, 1.0)
    mu = krawtchouk(n) @ signs
    return bool(np.all(np.rint(mu * mu) == (1 << n)))


def classify_translate(h: HFunction) -> int | None:
    """The shift s in {0,1,2,3} with h(d) = b1(d+s) for all d, if there is one."""
    for s in range(4):
        if all(h(d) == b1(d + s) for d in range(h.n + 1)):
            return s
    return None


@dataclass
class ScanReport:
    n: int
    passing_h: list[HFunction] = field(default_factory=list)
    classifications: list[int | None] = field(default_factory=list)
    non_distinct: list[HFunction] = field(default_factory=list)
    scanned: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "scanned": self.scanned,
            "passing": [
                {"h": str(h), "values": list(h.values), "translate_shift": s}
                for h, s in zip(self.passing_h, self.classifications)
            ],
            "non_distinct": [str(h) for h in self.non_distinct],
        }


def scan_all_h(n: int) -> ScanReport:
    """Try every h : {0..n} -> {0,1}; keep those giving 2^n distinct concepts and a Hadamard L."""
    if not 1 <= n <= MAX_EXHAUSTIVE_BITS:
        raise ValueError(f"scan needs 1 <= n <= {MAX_EXHAUSTIVE_BITS}, got {n}")
    report = ScanReport(n)
    N = 1 << n
    for k in range(1 << (n + 1)):
        h = HFunction.from_index(k, n)
        report.scanned += 1
        if distinct_concepts(h, n) < N:
            report.non_distinct.append(h)
            continue
        if n <= DENSE_HADAMARD_LIMIT:
            ok = is_hadamard(learning_matrix(h, n))
        else:
            ok = is_hadamard_spectral(h)
        if ok:
            report.passing_h.append(h)
            report.classifications.append(classify_translate(h))
    return report


def complementary_rows_sign(L: LearningMatrix, x: int) -> int | None:
    """epsilon with row(complement x) = epsilon * row(x), or None if not proportional."""
    comp = x ^ (L.N - 1)
    a, b = L.entries[x].astype(int), L.entries[comp].astype(int)
    if np.array_equal(a, b):
        return 1
    if np.array_equal(a, -b):
        return -1
    return None
