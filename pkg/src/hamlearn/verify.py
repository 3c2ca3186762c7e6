"""Invariant suites, runnable from the command line and from the test suite.

Every check returns a :class:`Check`; a suite is an ordered list of check
functions. Checks are exhaustive where the state space allows and otherwise
draw from a fixed seed, so a suite gives the same verdict on every run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import domain as dm
from .algo_a import phase_identity, run_algorithm_a, state_after_oracle, step4_closed_form
from .nogo import (
    complementary_rows_sign,
    is_hadamard,
    is_hadamard_spectral,
    learning_matrix,
    scan_all_h,
)
from .srm import (
    DistanceSpectrum,
    build_state_matrix,
    discriminate,
    gram,
    helstrom_from_states,
    psd_sqrt,
    psi_to_real,
    rank_and_bound,
    srm_probability,
)
from .statevec import (
    ResponseState,
    StateVector,
    apply_hat_P,
    apply_oracle,
    apply_phase_D,
    apply_walsh_hadamard,
    prepare_query,
    query_marginal,
)
from .sweep import SweepConfig, merge_reports, objective, partition_range, sweep_assignments

SEED = 20240611


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def _rng(tag: int = 0) -> np.random.Generator:
    return np.random.default_rng([SEED, tag])


def random_psi(rng, r: int) -> ResponseState:
    return ResponseState.normalized(rng.normal(size=r) + 1j * rng.normal(size=r))


def random_assignment(rng, n: int, r: int) -> dm.SigmaAssignment:
    return dm.assignment_from_index(int(rng.integers(dm.assignment_count(n, r))), n, r)


# -- vectorized bit tables (independent of the BitString code path) -----------


def _weights(n: int) -> np.ndarray:
    return np.array([bin(v).count("1") for v in range(1 << n)])


def _b1_formula(d):
    return (d * (d - 1) // 2) % 2


def _hat_table(n: int) -> np.ndarray:
    x = np.arange(1 << n)
    return np.where(_weights(n) % 2 == 0, x, x ^ ((1 << n) - 1))


def _dot_table(n: int) -> np.ndarray:
    x = np.arange(1 << n)
    w = _weights(n)
    return w[x[:, None] & x[None, :]]


# -- lemmas --------------------------------------------------------------------


def check_translation_invariance() -> Check:
    for n in range(1, 7):
        N = 1 << n
        w = _weights(n)
        x = np.arange(N)
        base = w[x[:, None] ^ x[None, :]]
        for g in range(N):
            if not np.array_equal(w[(g ^ x)[:, None] ^ (g ^ x)[None, :]], base):
                return Check("distance is XOR-translation invariant (n<=6)", False, f"n={n}, g={g}")
    return Check("distance is XOR-translation invariant (n<=6)", True)


def check_b1_properties() -> Check:
    for d in range(101):
        if dm.b1(d + 2) == dm.b1(d):
            return Check("b1(d+2) != b1(d) and b1(d) = d(d-1)/2 mod 2 (d<=100)", False, f"d={d}")
        if dm.b1(d) != _b1_formula(d):
            return Check("b1(d+2) != b1(d) and b1(d) = d(d-1)/2 mod 2 (d<=100)", False, f"formula d={d}")
    return Check("b1(d+2) != b1(d) and b1(d) = d(d-1)/2 mod 2 (d<=100)", True)


def check_dot_hat_identity() -> Check:
    """(a.x + wt(a) wt(x)) = a.hat(x) mod 2."""
    for n in range(1, 9):
        w = _weights(n)
        dots = _dot_table(n)
        lhs = (dots + w[:, None] * w[None, :]) % 2
        rhs = dots[:, _hat_table(n)] % 2
        if not np.array_equal(lhs, rhs):
            return Check("dot/hat parity identity exhaustive (n<=8)", False, f"n={n}")
    return Check("dot/hat parity identity exhaustive (n<=8)", True)


def check_b1_phase_factorization() -> Check:
    for n in range(1, 9):
        w = _weights(n)
        x = np.arange(1 << n)
        dist = w[x[:, None] ^ x[None, :]]
        lhs = (-1) ** _b1_formula(dist)
        rhs = (
            (-1) ** _b1_formula(w)[:, None]
            * (-1) ** _b1_formula(w)[None, :]
            * (-1) ** (_dot_table(n)[:, _hat_table(n)] % 2)
        )
        if not np.array_equal(lhs, rhs):
            return Check("b1 phase factorization exhaustive (n<=8)", False, f"n={n}")
    # the library path on a smaller exhaustive range
    for n in range(1, 6):
        for a in dm.all_bitstrings(n):
            for xb in dm.all_bitstrings(n):
                lhs, rhs = phase_identity(a, xb)
                if lhs != rhs:
                    return Check("b1 phase factorization exhaustive (n<=8)", False, f"{a}, {xb}")
    return Check("b1 phase factorization exhaustive (n<=8)", True)


def check_hat_bijectivity() -> Check:
    for n in range(1, 8):
        images = {dm.hat(x).value for x in dm.all_bitstrings(n)}
        if n % 2 == 0:
            invol = all(dm.hat(dm.hat(x)) == x for x in dm.all_bitstrings(n))
            if len(images) != 1 << n or not invol:
                return Check("hat: involutive bijection iff n even (n<=7)", False, f"n={n}")
        elif len(images) == 1 << n:
            return Check("hat: involutive bijection iff n even (n<=7)", False, f"n={n} injective")
    return Check("hat: involutive bijection iff n even (n<=7)", True)


def check_concept_counts() -> Check:
    for n in range(2, 10):
        expected = 1 << (n - 1) if n % 4 == 1 else 1 << n
        got = dm.distinct_concepts(dm.HFunction.b1(n), n)
        if got != expected:
            return Check("b1 concept count 2^n, or 2^(n-1) when n = 1 mod 4 (n=2..9)", False, f"n={n}: {got}")
    return Check("b1 concept count 2^n, or 2^(n-1) when n = 1 mod 4 (n=2..9)", True)


def check_assignment_bijection() -> Check:
    rng = _rng(1)
    for n, r in [(3, 3), (5, 2)]:
        total = dm.assignment_count(n, r)
        sample = rng.choice(total, size=min(1000, total), replace=False)
        seen = set()
        for k in sample:
            s = dm.assignment_from_index(int(k), n, r)
            if dm.index_from_assignment(s) != k:
                return Check("assignment indexing is a bijection", False, f"(n={n}, r={r}) idx {k}")
            seen.add(tuple(p.images for p in s))
        if len(seen) != len(sample):
            return Check("assignment indexing is a bijection", False, f"collision at (n={n}, r={r})")
    return Check("assignment indexing is a bijection", True)


# -- statevec --------------------------------------------------------------------


def check_unitarity() -> Check:
    rng = _rng(2)
    for trial in range(60):
        n = int(rng.integers(2, 9))
        r = int(rng.integers(1, 5))
        v = rng.normal(size=(1 << n) * r) + 1j * rng.normal(size=(1 << n) * r)
        state = StateVector(v / np.linalg.norm(v), n, r)
        sigma = random_assignment(rng, n, r)
        a = int(rng.integers(1 << n))
        outs = [apply_walsh_hadamard(state), apply_phase_D(state), apply_oracle(state, a, sigma)]
        if n % 2 == 0:
            outs.append(apply_hat_P(state))
        for out in outs:
            if abs(out.norm() - 1.0) > 1e-12:
                return Check("statevector operations preserve the norm", False, f"n={n}, r={r}")
        if abs(query_marginal(state).sum() - 1.0) > 1e-12:
            return Check("statevector operations preserve the norm", False, "marginal")
    return Check("statevector operations preserve the norm", True)


def dense_hadamard(n: int) -> np.ndarray:
    return (-1.0) ** _dot_table(n) / math.sqrt(1 << n)


def check_walsh_vs_dense() -> Check:
    rng = _rng(3)
    worst = 0.0
    for n in range(1, 5):
        r = 3
        v = rng.normal(size=(1 << n) * r) + 1j * rng.normal(size=(1 << n) * r)
        state = StateVector(v / np.linalg.norm(v), n, r)
        fast = apply_walsh_hadamard(state).matrix()
        dense = dense_hadamard(n) @ state.matrix()
        worst = max(worst, float(np.max(np.abs(fast - dense))))
    return Check("fast Walsh-Hadamard matches dense matrix (n<=4)", worst <= 1e-12, f"max err {worst:.1e}")


def check_oracle_gauge() -> Check:
    rng = _rng(4)
    for _ in range(100):
        n = int(rng.integers(1, 6))
        sigma = random_assignment(rng, n, 3)
        pi = dm.permutations_lex(3)[int(rng.integers(6))]
        psi = random_psi(rng, 3)
        a = int(rng.integers(1 << n))
        lhs = apply_oracle(prepare_query(n, psi), a, sigma)
        rhs = apply_oracle(prepare_query(n, psi.permuted(pi.inverse())), a, sigma.right_compose(pi))
        if not np.array_equal(lhs.amplitudes, rhs.amplitudes):
            return Check("oracle gauge: sigma*pi with pi^-1 psi gives identical output", False)
    return Check("oracle gauge: sigma*pi with pi^-1 psi gives identical output", True)


# -- Algorithm A -----------------------------------------------------------------


def check_algorithm_a() -> Check:
    rng = _rng(5)
    worst = 0.0
    for n in (2, 4, 6, 8, 10):
        if n <= 6:
            targets = range(1 << n)
        else:
            targets = rng.integers(0, 1 << n, size=200)
        for a in targets:
            run = run_algorithm_a(n, dm.BitString(int(a), n))
            worst = max(worst, 1.0 - run.success_probability)
            if run.final_phase.real * (-1) ** dm.b1(run.a.weight) < 1 - 1e-9:
                return Check("Algorithm A identifies a with probability 1", False, f"phase n={n} a={a}")
    return Check("Algorithm A identifies a with probability 1", worst <= 1e-9, f"max deficit {worst:.1e}")


def check_step4_state() -> Check:
    worst = 0.0
    for n in (2, 4):
        for a in dm.all_bitstrings(n):
            worst = max(worst, float(np.max(np.abs(state_after_oracle(n, a).amplitudes - step4_closed_form(n, a)))))
    return Check("state after the oracle call matches its closed form (n<=4)", worst <= 1e-12, f"{worst:.1e}")


# -- SRM -------------------------------------------------------------------------


def check_helstrom_agreement() -> Check:
    rng = _rng(6)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        r = int(rng.integers(2, 5))
        B = build_state_matrix(n, random_assignment(rng, n, r), random_psi(rng, r))
        i, j = rng.choice(1 << n, size=2, replace=False) if n > 0 else (0, 0)
        sub = B.columns[:, [i, j]]
        worst = max(worst, abs(srm_probability(gram(sub)) - helstrom_from_states(sub[:, 0], sub[:, 1])))
    return Check("two-state SRM equals Helstrom (1000 pairs)", worst <= 1e-9, f"max err {worst:.1e}")


def check_psd_sqrt_reconstruction() -> Check:
    rng = _rng(7)
    worst = 0.0
    for size, rank in [(8, 8), (16, 5), (32, 32), (64, 64), (64, 40), (64, 1)]:
        A = rng.normal(size=(size, rank)) + 1j * rng.normal(size=(size, rank))
        G = A @ A.conj().T
        S = psd_sqrt(G)
        worst = max(worst, float(np.linalg.norm(S @ S - G) / np.linalg.norm(G)))
    return Check("psd_sqrt squares back to G (up to 64x64)", worst <= 1e-8, f"rel err {worst:.1e}")


def check_srm_range() -> Check:
    rng = _rng(8)
    for _ in range(200):
        n = int(rng.integers(1, 5))
        r = int(rng.integers(1, 5))
        B = build_state_matrix(n, random_assignment(rng, n, r), random_psi(rng, r))
        G = gram(B)
        p = srm_probability(G)
        near_identity = np.max(np.abs(G.entries - np.eye(G.M))) <= 1e-8
        if not 0.0 <= p <= 1.0 or (abs(p - 1.0) <= 1e-9) != near_identity:
            return Check("SRM probability in [0,1], = 1 iff G = I", False, f"n={n} r={r} p={p}")
    return Check("SRM probability in [0,1], = 1 iff G = I", True)


def check_spectral_route() -> Check:
    rng = _rng(9)
    worst = 0.0
    for _ in range(150):
        n = int(rng.integers(1, 6))
        r = int(rng.integers(1, 5))
        sigma = random_assignment(rng, n, r)
        psi = random_psi(rng, r)
        res = discriminate(build_state_matrix(n, sigma, psi))
        ds = DistanceSpectrum(n, sigma)
        z = psi_to_real(psi)
        worst = max(worst, abs(float(ds.value(z)) - res.probability))
        if int(ds.rank(z)) != res.rank:
            return Check("Krawtchouk spectrum matches explicit Gram route", False, f"rank n={n} r={r}")
    return Check("Krawtchouk spectrum matches explicit Gram route", worst <= 1e-10, f"max err {worst:.1e}")


def check_rank_dichotomy_small() -> Check:
    rng = _rng(10)
    for r in (2, 3):
        psi = random_psi(rng, r)
        for idx in range(dm.assignment_count(3, r)):
            rank, _ = rank_and_bound(build_state_matrix(3, dm.assignment_from_index(idx, 3, r), psi))
            if not (rank == 8 or rank <= 5):
                return Check("n=3 state matrices have rank 8 or <= 5", False, f"r={r} idx={idx} rank={rank}")
    return Check("n=3 state matrices have rank 8 or <= 5", True)


# -- no-go -------------------------------------------------------------------------


def check_scans() -> Check:
    for n in range(2, 8):
        rep = scan_all_h(n)
        if n % 2:
            ok = not rep.passing_h
        else:
            ok = sorted(rep.classifications) == [0, 1, 2, 3]
        if not ok or any(s is None for s in rep.classifications):
            return Check("exhaustive h scans: b1 translates at even n, nothing at odd n", False, f"n={n}")
    return Check("exhaustive h scans: b1 translates at even n, nothing at odd n", True)


def check_hadamard_bridge() -> Check:
    """Hadamard L at even n <=> probability one with the phase-kickback query."""
    minus = ResponseState.minus()
    for n in (2, 4, 6):
        for k in range(1 << (n + 1)):
            h = dm.HFunction.from_index(k, n)
            if dm.distinct_concepts(h, n) < (1 << n):
                continue
            had = is_hadamard(learning_matrix(h, n))
            if had != is_hadamard_spectral(h):
                return Check("Hadamard learning matrix <=> probability-one learning", False, f"spectral h={h}")
            p = objective(n, dm.h_assignment(h), minus)
            if had != (abs(p - 1.0) <= 1e-9):
                return Check("Hadamard learning matrix <=> probability-one learning", False, f"h={h} p={p}")
    return Check("Hadamard learning matrix <=> probability-one learning", True)


def check_complementary_rows() -> Check:
    for n in (3, 5, 7):
        for s in range(4):
            h = dm.HFunction(tuple(dm.b1(d + s) for d in range(n + 1)))
            L = learning_matrix(h, n)
            signs = {complementary_rows_sign(L, x) for x in range(L.N)}
            if None in signs or len(signs) != 1:
                return Check("odd n: complementary rows of L agree up to one sign", False, f"n={n} s={s}")
    return Check("odd n: complementary rows of L agree up to one sign", True)


def check_hadamard_columns_distance() -> Check:
    for n in (2, 4, 6):
        for h in scan_all_h(n).passing_h:
            L = learning_matrix(h, n).entries.astype(int)
            dist = (L.shape[0] - L.T @ L) // 2
            off = dist[~np.eye(L.shape[0], dtype=bool)]
            if not np.all(off == L.shape[0] // 2):
                return Check("passing concepts sit at mutual distance N/2", False, f"n={n} h={h}")
    return Check("passing concepts sit at mutual distance N/2", True)


# -- sweep -------------------------------------------------------------------------


def check_objective_gauge() -> Check:
    rng = _rng(11)
    for _ in range(100):
        sigma = random_assignment(rng, 3, 3)
        pi = dm.permutations_lex(3)[int(rng.integers(6))]
        psi = random_psi(rng, 3)
        B1 = build_state_matrix(3, sigma, psi)
        B2 = build_state_matrix(3, sigma.right_compose(pi), psi.permuted(pi.inverse()))
        if not np.array_equal(B1.columns, B2.columns):
            return Check("objective gauge invariance (bitwise B)", False, str(sigma))
        if objective(3, sigma, psi) != objective(3, sigma.right_compose(pi), psi.permuted(pi.inverse())):
            return Check("objective gauge invariance (bitwise B)", False, "objective differs")
    return Check("objective gauge invariance (bitwise B)", True)


def check_sweep_determinism() -> Check:
    cfg = SweepConfig(n=3, r=2, starts=8)
    a = sweep_assignments(cfg).records
    b = sweep_assignments(cfg).records
    return Check("sweeps are deterministic", [r.to_json() for r in a] == [r.to_json() for r in b])


def check_partition_soundness() -> Check:
    cfg = SweepConfig(n=5, r=2, starts=8)
    full = sweep_assignments(cfg)
    parts = [
        sweep_assignments(SweepConfig(n=5, r=2, starts=8, index_range=rng_))
        for rng_ in partition_range(0, cfg.total, 8)
    ]
    merged = merge_reports(cfg, parts)
    same = merged.best_probability == full.best_probability and [o.assignment_index for o in merged.optima] == [
        o.assignment_index for o in full.optima
    ]
    return Check("union of 8 range sweeps equals the full sweep", same)


SUITES: dict[str, list[Callable[[], Check]]] = {
    "lemmas": [
        check_translation_invariance,
        check_b1_properties,
        check_dot_hat_identity,
        check_b1_phase_factorization,
        check_hat_bijectivity,
        check_concept_counts,
        check_assignment_bijection,
    ],
    "statevec": [check_unitarity, check_walsh_vs_dense, check_oracle_gauge],
    "algoa": [check_algorithm_a, check_step4_state],
    "srm": [
        check_helstrom_agreement,
        check_psd_sqrt_reconstruction,
        check_srm_range,
        check_spectral_route,
        check_rank_dichotomy_small,
    ],
    "nogo": [check_scans, check_hadamard_bridge, check_complementary_rows, check_hadamard_columns_distance],
    "sweep": [check_objective_gauge, check_sweep_determinism, check_partition_soundness],
}


def run_suite(name: str, stop_on_failure: bool = False) -> list[Check]:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(name)
    results = []
    for suite in names:
        for fn in SUITES[suite]:
            res = fn()
            results.append(res)
            if stop_on_failure and not res.passed:
                return results
    return results
