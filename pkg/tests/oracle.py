"""Slow, dense reference implementations used to derive frozen test values.

Nothing here imports the package: states are built from explicit Kronecker
products, the oracle is an explicit permutation matrix, and the square root
of the Gram matrix comes from scipy.linalg.sqrtm.
"""

from __future__ import annotations

import itertools
from functools import reduce

import numpy as np
from scipy.linalg import sqrtm
from scipy.optimize import minimize

H1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def bits(x: int, n: int) -> str:
    return format(x, f"0{n}b")


def dist(x: int, y: int, n: int) -> int:
    return sum(c1 != c2 for c1, c2 in zip(bits(x, n), bits(y, n)))


def b1(d: int) -> int:
    return (d * (d - 1) // 2) % 2


def hadamard_n(n: int) -> np.ndarray:
    return reduce(np.kron, [H1] * n, np.eye(1))


def one_line(cycle_text: str, r: int) -> tuple[int, ...]:
    """Images (1-based) of a cycle-notation string, parsed independently."""
    images = list(range(1, r + 1))
    for chunk in cycle_text.replace(")", "").split("("):
        syms = [int(c) for c in chunk if c.isdigit()]
        for i, s in enumerate(syms):
            images[s - 1] = syms[(i + 1) % len(syms)]
    return tuple(images)


def oracle_matrix(n: int, a: int, sigma: list[tuple[int, ...]]) -> np.ndarray:
    """Dense unitary for |x, b> -> |x, sigma_{dist(a,x)}(b)>."""
    r = len(sigma[0])
    N = 1 << n
    U = np.zeros((N * r, N * r))
    for x in range(N):
        perm = sigma[dist(a, x, n)]
        for b in range(1, r + 1):
            U[x * r + perm[b - 1] - 1, x * r + b - 1] = 1.0
    return U


def state_matrix(n: int, sigma: list[tuple[int, ...]], psi: np.ndarray) -> np.ndarray:
    N = 1 << n
    query = hadamard_n(n) @ np.eye(N)[:, 0]
    start = np.kron(query, psi)
    return np.column_stack([oracle_matrix(n, a, sigma) @ start for a in range(N)])


def srm_value(B: np.ndarray) -> float:
    G = B.conj().T @ B
    S = sqrtm(G)
    return float(np.mean(np.abs(np.diag(S)) ** 2))


def rank(B: np.ndarray) -> int:
    s = np.linalg.svd(B, compute_uv=False)
    return int(np.sum(s > 1e-8 * s[0]))


def objective(n: int, sigma, psi) -> float:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    B = state_matrix(n, sigma, psi)
    p = srm_value(B)
    k = rank(B)
    if k < B.shape[1]:
        p = min(p, k / B.shape[1])
    return p


def optimize(n: int, sigma, starts: int = 30, seed: int = 1) -> tuple[float, np.ndarray]:
    """Nelder-Mead from many random starts; slow but independent."""
    r = len(sigma[0])
    rng = np.random.default_rng(seed)

    def f(z):
        v = z[:r] + 1j * z[r:]
        nv = np.linalg.norm(v)
        return 1.0 if nv == 0 else -objective(n, sigma, v / nv)

    best = (-1.0, None)
    for _ in range(starts):
        res = minimize(f, rng.normal(size=2 * r), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 20000, "maxfev": 20000})
        if -res.fun > best[0]:
            v = res.x[:r] + 1j * res.x[r:]
            best = (-res.fun, v / np.linalg.norm(v))
    return best


def all_assignments(n: int, r: int):
    perms = list(itertools.permutations(range(1, r + 1)))
    return itertools.product(perms, repeat=n + 1)


def algorithm_a_distribution(n: int, a: int) -> tuple[np.ndarray, complex]:
    """Seven steps with dense matrices; returns (marginal, sqrt(2) * amp(a, |1>))."""
    N = 1 << n
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    Hn = hadamard_n(n)
    start = np.kron(np.eye(N)[:, 0], np.array([1.0, 0.0]))
    v = np.kron(Hn, H1 @ X) @ start
    D = np.diag([(-1.0) ** b1(bin(x).count("1")) for x in range(N)])
    v = np.kron(D, np.eye(2)) @ v
    sigma = [(1, 2) if b1(d) == 0 else (2, 1) for d in range(n + 1)]
    v = oracle_matrix(n, a, sigma) @ v
    P = np.zeros((N, N))
    full = N - 1
    for x in range(N):
        xh = x if bin(x).count("1") % 2 == 0 else x ^ full
        P[xh, x] = 1.0
    v = np.kron(Hn @ P, np.eye(2)) @ v
    amps = v.reshape(N, 2)
    return np.sum(np.abs(amps) ** 2, axis=1), complex(amps[a, 0] * np.sqrt(2.0))
