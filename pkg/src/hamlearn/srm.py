"""Square-root (pretty-good) measurement on the ensemble of oracle output states.

Two routes to the same number:

* the explicit route builds the Nr x M state matrix B, its Gram matrix
  G = B^H B and the PSD square root of G by Hermitian eigendecomposition;
* :class:`DistanceSpectrum` uses that G_{a,a'} depends only on dist(a, a'),
  so the Walsh characters diagonalize it and the eigenvalue on characters of
  weight j is |sum_d K_d(j) P_d psi|^2 / N with K the Krawtchouk table.

The sweep optimizer runs on the second; tests pin it to the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .domain import SigmaAssignment
from .statevec import ResponseState, apply_oracle, prepare_query

RANK_RTOL = 1e-8
PSD_TOL = 1e-9


class NumericalIntegrityError(ArithmeticError):
    """A matrix that must be PSD/Hermitian is not, beyond tolerance."""


@dataclass(frozen=True)
class StateMatrix:
    columns: np.ndarray  # (N*r, M); column a is O_sigma(a)|eta0>|psi>
    n: int
    r: int
    sigma: SigmaAssignment
    psi: ResponseState

    @property
    def M(self) -> int:
        return self.columns.shape[1]


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.entries, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"Gram matrix must be square, got shape {g.shape}")
        if np.max(np.abs(g - g.conj().T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(g))):
            raise NumericalIntegrityError("Gram matrix is not Hermitian")
        object.__setattr__(self, "entries", g)

    @property
    def M(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DiscriminationResult:
    probability: float
    rank: int
    rank_bound: float
    rank_deficient: bool
    sqrt_diag: np.ndarray = field(repr=False)
    srm_probability: float = 0.0  # uncapped value; ``probability`` is capped by rank/M


def build_state_matrix(n: int, sigma: SigmaAssignment, psi) -> StateMatrix:
    if not isinstance(psi, ResponseState):
        psi = ResponseState(psi)
    if sigma.r != psi.r or sigma.n != n:
        raise ValueError(
            f"assignment (n={sigma.n}, r={sigma.r}) does not match n={n}, psi of dimension {psi.r}"
        )
    query = prepare_query(n, psi)
    cols = np.empty((query.dim, 1 << n), dtype=complex)
    for a in range(1 << n):
        cols[:, a] = apply_oracle(query, a, sigma).amplitudes
    return StateMatrix(cols, n, psi.r, sigma, psi)


def gram(B: StateMatrix | np.ndarray) -> GramMatrix:
    cols = B.columns if isinstance(B, StateMatrix) else np.asarray(B)
    g = cols.conj().T @ cols
    # exact hermiticity; the product is Hermitian only up to rounding
    return GramMatrix(0.5 * (g + g.conj().T))


def psd_sqrt(G: GramMatrix | np.ndarray) -> np.ndarray:
    g = G.entries if isinstance(G, GramMatrix) else np.asarray(G, dtype=complex)
    w, v = np.linalg.eigh(g)
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    if w.size and w[0] < -PSD_TOL * scale:
        raise NumericalIntegrityError(f"matrix has eigenvalue {w[0]:.3e}; not PSD")
    # eigenvalues at rounding level are zeros of a rank-deficient G
    w = np.where(w > w.size * np.finfo(float).eps * scale, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def srm_probability(G: GramMatrix | np.ndarray) -> float:
    """(1/M) sum_c |(sqrt G)_cc|^2."""
    s = psd_sqrt(G)
    diag = np.abs(np.diag(s)) ** 2
    return float(np.clip(diag.mean(), 0.0, 1.0))


def helstrom_two_state(overlap_modulus: float) -> float:
    if not 0.0 <= overlap_modulus <= 1.0:
        raise ValueError(f"overlap modulus must lie in [0, 1], got {overlap_modulus}")
    return 0.5 * (1.0 + math.sqrt(1.0 - overlap_modulus**2))


def helstrom_from_states(u: np.ndarray, v: np.ndarray) -> float:
    """Helstrom optimum for two unit vectors, with the sine taken from the
    residual u - <v,u> v so nearly parallel pairs keep full precision."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    gamma = np.vdot(v, u)
    sine = min(1.0, float(np.linalg.norm(u - gamma * v)))
    return 0.5 * (1.0 + sine)


def rank_and_bound(B: StateMatrix | np.ndarray) -> tuple[int, float]:
    cols = B.columns if isinstance(B, StateMatrix) else np.asarray(B)
    s = np.linalg.svd(cols, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, 0.0
    rank = int(np.sum(s > RANK_RTOL * s[0]))
    return rank, rank / cols.shape[1]


def discriminate(B: StateMatrix) -> DiscriminationResult:
    s = psd_sqrt(gram(B))
    p = float(np.clip(np.mean(np.abs(np.diag(s)) ** 2), 0.0, 1.0))
    rank, bound = rank_and_bound(B)
    deficient = rank < B.M
    return DiscriminationResult(
        probability=min(p, bound) if deficient else p,
        rank=rank,
        rank_bound=bound,
        rank_deficient=deficient,
        sqrt_diag=np.real(np.diag(s)),
        srm_probability=p,
    )


# -- spectral route ------------------------------------------------------------


@lru_cache(maxsize=32)
def krawtchouk(n: int) -> np.ndarray:
    """K[j, d] = sum over y of weight d of (-1)^{s.y}, for any s of weight j."""
    K = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        for d in range(n + 1):
            K[j, d] = sum(
                (-1) ** i * math.comb(j, i) * math.comb(n - j, d - i)
                for i in range(max(0, d - (n - j)), min(j, d) + 1)
            )
    K.setflags(write=False)
    return K


def permutation_matrices(sigma: SigmaAssignment) -> np.ndarray:
    """(n+1, r, r) real matrices with P[d] e_b = e_{sigma_d(b)}."""
    r = sigma.r
    P = np.zeros((sigma.n + 1, r, r))
    for d, p in enumerate(sigma.perms):
        P[d, list(p.zero_based()), list(range(r))] = 1.0
    return P


class DistanceSpectrum:
    """Gram spectrum of the oracle output ensemble for one assignment.

    Evaluates on batches of real coordinates ``z = (Re psi, Im psi)`` of shape
    ``(..., 2r)``; z need not be normalized.
    """

    def __init__(self, n: int, sigma: SigmaAssignment):
        if sigma.n != n:
            raise ValueError(f"assignment has n={sigma.n}, expected {n}")
        self.n = n
        self.r = sigma.r
        self.N = 1 << n
        self.sigma = sigma
        # real because permutation matrices and Krawtchouk values are real
        self.mats = np.einsum("jd,dab->jab", krawtchouk(n), permutation_matrices(sigma))
        self.mult = np.array([math.comb(n, j) for j in range(n + 1)], dtype=float)

    def eigenvalues(self, z: np.ndarray) -> np.ndarray:
        """(..., n+1) Gram eigenvalues, the j-th with multiplicity C(n, j)."""
        z = np.asarray(z, dtype=float)
        r = self.r
        x, y = z[..., :r], z[..., r:]
        mx = np.einsum("jab,...b->...ja", self.mats, x)
        my = np.einsum("jab,...b->...ja", self.mats, y)
        sq = np.sum(mx * mx + my * my, axis=-1)
        norm2 = np.sum(z * z, axis=-1)[..., None]
        return sq / (norm2 * self.N)

    def _clean_eigenvalues(self, z: np.ndarray) -> np.ndarray:
        lam = self.eigenvalues(z)
        floor = self.N * np.finfo(float).eps * np.max(lam, axis=-1, keepdims=True)
        return np.where(lam > floor, lam, 0.0)

    def srm_probability(self, z: np.ndarray) -> np.ndarray:
        lam = self._clean_eigenvalues(z)
        diag = (np.sqrt(lam) @ self.mult) / self.N
        return np.clip(diag * diag, 0.0, 1.0)

    def rank(self, z: np.ndarray) -> np.ndarray:
        sv = np.sqrt(np.clip(self.eigenvalues(z), 0.0, None))
        big = sv.max(axis=-1, keepdims=True)
        return ((sv > RANK_RTOL * big) @ self.mult).astype(int)

    def value(self, z: np.ndarray) -> np.ndarray:
        """SRM probability capped by rank/M on linearly dependent ensembles."""
        p = self.srm_probability(z)
        bound = self.rank(z) / self.N
        return np.where(bound < 1.0, np.minimum(p, bound), p)

    def sqrt_amplitude(self, z: np.ndarray) -> np.ndarray:
        """Homogeneous degree-1 extension of sqrt(value) off the unit sphere."""
        z = np.asarray(z, dtype=float)
        return np.sqrt(self.value(z)) * np.linalg.norm(z, axis=-1)


def psi_to_real(psi) -> np.ndarray:
    v = np.asarray(psi.entries if isinstance(psi, ResponseState) else psi, dtype=complex)
    return np.concatenate([v.real, v.imag])


def real_to_psi(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    r = z.shape[-1] // 2
    v = z[..., :r] + 1j * z[..., r:]
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
