"""Dense statevectors on the query register (C^2)^n tensored with a C^r response register.

Amplitude of |x>|b> lives at flat index ``x * r + (b - 1)``; the response
register varies fastest so an oracle call touches r contiguous entries per x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import MAX_BITS, BitString, SigmaAssignment, distance_matrix, hat_value

NORMALIZATION_TOL = 1e-9
DRIFT_TOL = 1e-12


def _popcounts(n: int) -> np.ndarray:
    x = np.arange(1 << n, dtype=np.int64)
    w = np.zeros_like(x)
    for k in range(n):
        w += (x >> k) & 1
    return w


@dataclass(frozen=True)
class ResponseState:
    """Unit vector psi in C^r; ``entries[b-1]`` is the amplitude of label b."""

    entries: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.entries, dtype=complex).reshape(-1)
        if v.size < 1:
            raise ValueError("response state needs at least one entry")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"response state is not unit norm (|psi| = {norm:.3e})")
        if abs(norm - 1.0) > 1e-13:
            v = v / norm
        else:
            v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "entries", v)

    @property
    def r(self) -> int:
        return self.entries.size

    @classmethod
    def normalized(cls, v) -> "ResponseState":
        v = np.asarray(v, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def basis(cls, r: int, b: int) -> "ResponseState":
        v = np.zeros(r, dtype=complex)
        v[b - 1] = 1.0
        return cls(v)

    @classmethod
    def minus(cls) -> "ResponseState":
        """(|1> - |2>)/sqrt(2), the -1 eigenvector of the swap (12)."""
        return cls(np.array([1.0, -1.0]) / np.sqrt(2.0))

    def permuted(self, p) -> "ResponseState":
        """Coordinates moved by a permutation: amplitude of b goes to p(b)."""
        out = np.empty_like(self.entries)
        out[list(p.zero_based())] = self.entries
        return ResponseState(out)


class StateVector:
    """Normalized amplitudes over the 2^n * r computational basis."""

    __slots__ = ("amplitudes", "n", "r")

    def __init__(self, amplitudes, n: int, r: int, *, check: bool = True):
        if not 1 <= n <= MAX_BITS:
            raise ValueError(f"query width must be in 1..{MAX_BITS}, got {n}")
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.size != (1 << n) * r:
            raise ValueError(f"expected {(1 << n) * r} amplitudes, got {amps.size}")
        if check:
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > NORMALIZATION_TOL:
                raise ValueError(f"state is not normalized (|v| = {norm:.3e})")
        self.amplitudes = amps
        self.n = n
        self.r = r

    @classmethod
    def basis(cls, n: int, r: int, x: int, b: int = 1) -> "StateVector":
        amps = np.zeros((1 << n) * r, dtype=complex)
        amps[x * r + b - 1] = 1.0
        return cls(amps, n, r)

    @classmethod
    def product(cls, query, psi: ResponseState) -> "StateVector":
        """|query> (x) psi for a length-2^n query amplitude vector."""
        query = np.asarray(query, dtype=complex).reshape(-1)
        n = int(query.size).bit_length() - 1
        if query.size != 1 << n:
            raise ValueError("query register length must be a power of two")
        return cls(np.outer(query, psi.entries).reshape(-1), n, psi.r)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def matrix(self) -> np.ndarray:
        """View as a (2^n, r) array indexed [x, b-1]."""
        return self.amplitudes.reshape(1 << self.n, self.r)

    def amplitude(self, x: int, b: int) -> complex:
        return complex(self.amplitudes[x * self.r + b - 1])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def _derive(self, amps: np.ndarray, drift_tol: float = DRIFT_TOL) -> "StateVector":
        out = StateVector(amps, self.n, self.r, check=False)
        drift = abs(out.norm() - self.norm())
        if drift > drift_tol:
            raise ArithmeticError(f"norm drifted by {drift:.3e} during a unitary step")
        return out

    def __repr__(self) -> str:
        return f"StateVector(n={self.n}, r={self.r})"


def prepare_query(n: int, psi: ResponseState) -> StateVector:
    """Equal superposition over all x tensored with psi."""
    if not isinstance(psi, ResponseState):
        psi = ResponseState(psi)
    query = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
    return StateVector.product(query, psi)


def walsh_hadamard(values: np.ndarray, n: int) -> np.ndarray:
    """Normalized fast Walsh-Hadamard transform along axis 0 of a (2^n, ...) array."""
    out = np.array(values, dtype=complex, copy=True)
    tail = out.shape[1:]
    block = 1
    for _ in range(n):
        v = out.reshape((-1, 2, block) + tail)
        a = v[:, 0].copy()
        v[:, 0] += v[:, 1]
        v[:, 1] = a - v[:, 1]
        block *= 2
    out *= 2.0 ** (-n / 2)
    return out


def apply_walsh_hadamard(state: StateVector) -> StateVector:
    return state._derive(walsh_hadamard(state.matrix(), state.n).reshape(-1))


def phase_D_signs(n: int) -> np.ndarray:
    """(-1)^{b1(wt(x))} for every x."""
    w = _popcounts(n)
    return np.where(((w >> 1) & 1) == 1, -1.0, 1.0)


def apply_phase_D(state: StateVector) -> StateVector:
    signs = phase_D_signs(state.n)
    return state._derive((state.matrix() * signs[:, None]).reshape(-1))


def apply_hat_P(state: StateVector) -> StateVector:
    """Move the amplitude of |x, b> to |hat(x), b>; only a permutation for even n."""
    n = state.n
    if n % 2:
        raise ValueError(
            f"hat map is not a bijection for odd n={n}: x and its complement "
            "both map to the same even-weight string"
        )
    targets = np.array([hat_value(x, n) for x in range(1 << n)])
    out = np.empty_like(state.matrix())
    out[targets] = state.matrix()
    return state._derive(out.reshape(-1))


def permutation_table(sigma: SigmaAssignment) -> np.ndarray:
    """(n+1, r) zero-based images: table[d, b-1] = sigma_d(b) - 1."""
    return np.array([p.zero_based() for p in sigma.perms], dtype=np.int64)


def apply_oracle(state: StateVector, a: BitString | int, sigma: SigmaAssignment) -> StateVector:
    """|x, b> -> |x, sigma_{dist(a,x)}(b)>."""
    n, r = state.n, state.r
    if sigma.n != n or sigma.r != r:
        raise ValueError(
            f"assignment shape (n={sigma.n}, r={sigma.r}) does not match state (n={n}, r={r})"
        )
    a_val = a.value if isinstance(a, BitString) else int(a)
    if isinstance(a, BitString) and a.n != n:
        raise ValueError(f"hidden string has length {a.n}, state has n={n}")
    dist = distance_matrix(n)[a_val]
    targets = permutation_table(sigma)[dist]
    out = np.empty_like(state.matrix())
    np.put_along_axis(out, targets, state.matrix(), axis=1)
    return state._derive(out.reshape(-1))


def query_marginal(state: StateVector) -> np.ndarray:
    probs = np.sum(np.abs(state.matrix()) ** 2, axis=1)
    total = probs.sum()
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ArithmeticError(f"marginal sums to {total!r}")
    return probs
