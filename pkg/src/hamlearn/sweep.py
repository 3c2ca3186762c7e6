"""Exhaustive sweep over assignments d -> sigma_d with per-assignment optimization of psi.

Each assignment gets a deterministic multistart ascent over unit vectors in
C^r. Starts are drawn from a generator keyed by (seed, assignment index), so
a sweep split into ranges, run on several workers or resumed from a
checkpoint reproduces the same records.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .domain import SigmaAssignment, assignment_count, assignment_from_index
from .srm import DistanceSpectrum, build_state_matrix, discriminate, psi_to_real, real_to_psi

DEFAULT_BUDGET = 250_000
GRAD_STEP = 1e-5
STEP_GRID = 2.0 ** np.arange(0, 13)


class BudgetExceeded(ValueError):
    pass


class CheckpointError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    n: int
    r: int
    starts: int = 20
    max_iters: int = 2000
    ftol: float = 1e-10
    seed: int = 0
    gauge_reduce: bool = False
    index_range: tuple[int, int] | None = None
    tie_tol: float = 1e-6
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.n < 1 or self.r < 1:
            raise ValueError("n and r must be positive")
        if self.starts < 1:
            raise ValueError("need at least one start")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        lo, hi = self.range
        if not 0 <= lo < hi <= self.total:
            raise ValueError(f"index range [{lo}, {hi}) not inside [0, {self.total})")

    @property
    def total(self) -> int:
        return assignment_count(self.n, self.r)

    @property
    def range(self) -> tuple[int, int]:
        return tuple(self.index_range) if self.index_range is not None else (0, self.total)

    @property
    def gauge_limit(self) -> int:
        """Indices below this have sigma_0 = identity (sigma_0 is the leading digit)."""
        return math.factorial(self.r) ** self.n

    def indices(self) -> range:
        lo, hi = self.range
        if self.gauge_reduce:
            hi = min(hi, self.gauge_limit)
        return range(lo, max(lo, hi))

    def check_budget(self) -> None:
        count = len(self.indices())
        if count > self.budget:
            raise BudgetExceeded(
                f"{count} assignments to evaluate exceeds the budget of {self.budget}; "
                "narrow --range, enable --gauge or raise --budget"
            )

    def echo(self) -> dict:
        d = asdict(self)
        d["index_range"] = list(self.range)
        return d

    def compatible_with(self, other: dict) -> list[str]:
        keys = ("n", "r", "seed", "gauge_reduce", "starts", "max_iters", "ftol")
        return [k for k in keys if other.get(k) != getattr(self, k)]


@dataclass(frozen=True)
class SweepRecord:
    assignment_index: int
    sigma: list[str]
    psi_star: list[list[float]]
    probability: float
    rank: int
    rank_deficient: bool
    starts_used: int
    converged: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRecord":
        return cls(
            assignment_index=int(d["assignment_index"]),
            sigma=list(d["sigma"]),
            psi_star=[list(map(float, c)) for c in d["psi_star"]],
            probability=float(d["probability"]),
            rank=int(d["rank"]),
            rank_deficient=bool(d["rank_deficient"]),
            starts_used=int(d["starts_used"]),
            converged=bool(d["converged"]),
        )

    def psi(self) -> np.ndarray:
        return np.array([complex(re, im) for re, im in self.psi_star])


@dataclass
class SweepReport:
    best_probability: float
    optima: list[SweepRecord]
    totals: dict
    config: dict
    wall_clock: float = 0.0
    records: list[SweepRecord] = field(default_factory=list, repr=False)

    def body(self) -> dict:
        """Everything except wall-clock time; stable across reruns."""
        return {
            "best_probability": self.best_probability,
            "optima": [asdict(r) for r in self.optima],
            "totals": self.totals,
            "config": self.config,
        }

    def to_json(self) -> str:
        doc = self.body()
        doc["wall_clock"] = round(self.wall_clock, 3)
        return json.dumps(doc, indent=2, sort_keys=True)


@dataclass(frozen=True)
class OptimizeResult:
    psi_star: np.ndarray
    p_star: float
    rank: int
    rank_deficient: bool
    converged: bool
    start_values: np.ndarray
    iterations: int
    fallbacks: int


def sig12(x: float) -> float:
    return float(f"{x:.12g}")


# -- objective -----------------------------------------------------------------


def objective(n: int, sigma: SigmaAssignment, psi) -> float:
    """SRM success probability for the query |eta0>|psi>, capped by rank/M when rank-deficient."""
    return discriminate(build_state_matrix(n, sigma, psi)).probability


def fix_phase(psi: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Rotate the global phase so the first largest-modulus coordinate is real and >= 0."""
    psi = np.asarray(psi, dtype=complex)
    mags = np.abs(psi)
    k = int(np.argmax(mags >= mags.max() - tol))
    if mags[k] == 0:
        return psi
    out = psi * (mags[k] / psi[k])
    out[k] = mags[k]
    return out


def start_points(seed: int, index: int, starts: int, r: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=[seed, index]))
    return rng.standard_normal((starts, 2 * r))


def _numerical_gradient(f, z: np.ndarray, h: float = GRAD_STEP) -> np.ndarray:
    """Central differences of a batched scalar function at each row of z."""
    dim = z.shape[-1]
    steps = h * np.eye(dim)
    plus = f(z[:, None, :] + steps)
    minus = f(z[:, None, :] - steps)
    return (plus - minus) / (2 * h)


def _normalize(z: np.ndarray) -> np.ndarray:
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def ascend(spectrum: DistanceSpectrum, z0: np.ndarray, max_iters: int, ftol: float):
    """Projected ascent of sqrt(probability) on the unit sphere, all starts at once.

    The degree-1 homogeneous extension F(z) = |z| sqrt(p(z/|z|)) is a sum of
    Euclidean norms of linear maps of z, hence convex, so the unit step
    z <- grad F / |grad F| never decreases F. Longer steps along the same
    direction are tried on a geometric grid and the best is kept; this matters
    at optima where p is flat to fourth order (the b1 assignment, r = 4
    saturation). Rows where even the unit step fails (non-finite gradient, or
    a decrease at the rank-cap kink) are flagged for a derivative-free polish.
    """
    F = spectrum.sqrt_amplitude
    z = _normalize(np.asarray(z0, dtype=float))
    val = spectrum.value(z)
    active = np.ones(len(z), dtype=bool)
    unstable = np.zeros(len(z), dtype=bool)
    quiet = np.zeros(len(z), dtype=int)
    it = 0
    for it in range(1, max_iters + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        zi = z[idx]
        g = _numerical_gradient(F, zi)
        gnorm = np.linalg.norm(g, axis=-1)
        bad = ~np.isfinite(gnorm) | (gnorm < 1e-300)
        g[bad] = zi[bad]
        gnorm[bad] = 1.0
        direction = g / gnorm[:, None] - zi
        cands = _normalize(zi[:, None, :] + STEP_GRID[None, :, None] * direction[:, None, :])
        cvals = spectrum.value(cands)
        bad |= cvals[:, 0] < val[idx] - 1e-14
        pick = np.argmax(cvals, axis=1)
        best = cvals[np.arange(idx.size), pick]
        ok = ~bad & (best >= val[idx])
        gain = np.where(ok, best - val[idx], 0.0)
        upd = idx[ok]
        z[upd] = cands[ok, pick[ok]]
        val[upd] = best[ok]
        quiet[idx] = np.where(gain <= ftol, quiet[idx] + 1, 0)
        unstable[idx[bad]] = True
        active[idx[bad | (quiet[idx] >= 3)]] = False
    return z, val, unstable, it


def _simplex_polish(spectrum: DistanceSpectrum, z: np.ndarray, ftol: float) -> np.ndarray:
    res = minimize(
        lambda v: -float(spectrum.value(v)),
        z,
        method="Nelder-Mead",
        options={"xatol": 1e-9, "fatol": ftol, "maxiter": 4000 * len(z)},
    )
    return _normalize(res.x)


def optimize_psi(
    n: int,
    sigma: SigmaAssignment,
    config: SweepConfig | None = None,
    *,
    index: int = 0,
) -> OptimizeResult:
    """Multistart maximization of the success probability over unit psi in C^r."""
    if config is None:
        config = SweepConfig(n=n, r=sigma.r)
    spectrum = DistanceSpectrum(n, sigma)
    z0 = start_points(config.seed, index, config.starts, sigma.r)
    z, vals, unstable, iters = ascend(spectrum, z0, config.max_iters, config.ftol)
    fallbacks = int(unstable.sum())
    for i in np.flatnonzero(unstable):
        zp = _simplex_polish(spectrum, z[i], config.ftol)
        vp = float(spectrum.value(zp))
        if vp > vals[i]:
            z[i], vals[i] = zp, vp
    order = np.argsort(-vals, kind="stable")
    best = order[0]
    converged = len(vals) < 2 or abs(vals[order[0]] - vals[order[1]]) <= 10 * config.ftol
    psi = fix_phase(real_to_psi(z[best]))
    zb = psi_to_real(psi)
    return OptimizeResult(
        psi_star=psi,
        p_star=float(spectrum.value(zb)),
        rank=int(spectrum.rank(zb)),
        rank_deficient=bool(spectrum.rank(zb) < spectrum.N),
        converged=bool(converged),
        start_values=vals,
        iterations=iters,
        fallbacks=fallbacks,
    )


# -- sweep ---------------------------------------------------------------------


def evaluate_index(config: SweepConfig, idx: int) -> SweepRecord:
    sigma = assignment_from_index(idx, config.n, config.r)
    res = optimize_psi(config.n, sigma, config, index=idx)
    return SweepRecord(
        assignment_index=idx,
        sigma=sigma.cycle_texts(),
        psi_star=[[sig12(c.real) + 0.0, sig12(c.imag) + 0.0] for c in res.psi_star],
        probability=sig12(res.p_star),
        rank=res.rank,
        rank_deficient=res.rank_deficient,
        starts_used=config.starts,
        converged=res.converged,
    )


def _evaluate_chunk(args) -> list[SweepRecord]:
    config, lo, hi = args
    return [evaluate_index(config, i) for i in range(lo, hi)]


def partition_range(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, hi - lo))
    bounds = [lo + (hi - lo) * k // parts for k in range(parts + 1)]
    return [(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]


def iter_records(config: SweepConfig, indices: Sequence[int], workers: int = 1) -> Iterable[SweepRecord]:
    """Records in increasing index order; parallel chunks are joined in order."""
    indices = list(indices)
    if workers <= 1 or len(indices) < 2:
        for i in indices:
            yield evaluate_index(config, i)
        return
    runs = _contiguous_runs(indices)
    chunks = []
    chunk = max(1, min(256, len(indices) // (workers * 4) or 1))
    for lo, hi in runs:
        chunks += [(config, a, b) for a, b in partition_range(lo, hi, -(-(hi - lo) // chunk))]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for recs in pool.map(_evaluate_chunk, chunks):
            yield from recs


def _contiguous_runs(indices: list[int]) -> list[tuple[int, int]]:
    runs = []
    for i in sorted(indices):
        if runs and runs[-1][1] == i:
            runs[-1][1] = i + 1
        else:
            runs.append([i, i + 1])
    return [tuple(r) for r in runs]


def build_report(config: SweepConfig, records: Iterable[SweepRecord], wall_clock: float = 0.0) -> SweepReport:
    by_index = {r.assignment_index: r for r in records}
    recs = [by_index[i] for i in sorted(by_index)]
    lo, hi = config.range
    skipped = (hi - lo) - len(config.indices()) if config.gauge_reduce else 0
    if recs:
        best = max(r.probability for r in recs)
        optima = [r for r in recs if r.probability >= best - config.tie_tol]
    else:
        best, optima = 0.0, []
    totals = {
        "evaluated": len(recs),
        "skipped_by_gauge": skipped,
        "rank_deficient": sum(r.rank_deficient for r in recs),
    }
    return SweepReport(best, optima, totals, config.echo(), wall_clock, recs)


def merge_reports(config: SweepConfig, reports: Iterable[SweepReport]) -> SweepReport:
    """Combine reports over disjoint index ranges into one report for ``config``."""
    records = [r for rep in reports for r in rep.records]
    return build_report(config, records, sum(rep.wall_clock for rep in reports))


def sweep_assignments(
    config: SweepConfig,
    sink: str | Path | None = None,
    *,
    workers: int = 1,
    header: dict | None = None,
    done: dict[int, SweepRecord] | None = None,
) -> SweepReport:
    """Evaluate every assignment in the configured range.

    ``sink`` receives one JSON line per record as it is produced (a
    checkpoint); it is created with a ``#``-prefixed header line unless it
    already exists. ``done`` holds previously recorded indices to skip.
    """
    config.check_budget()
    t0 = time.perf_counter()
    done = dict(done or {})
    todo = [i for i in config.indices() if i not in done]
    fh = None
    if sink is not None:
        sink = Path(sink)
        try:
            fresh = not sink.exists()
            fh = sink.open("a", encoding="utf-8")
            if fresh:
                fh.write("# " + json.dumps(header or {"config": config.echo()}, sort_keys=True) + "\n")
                fh.flush()
        except OSError as exc:
            raise OSError(f"cannot write sweep records to {sink}: {exc}") from exc
    try:
        for rec in iter_records(config, todo, workers):
            done[rec.assignment_index] = rec
            if fh is not None:
                fh.write(rec.to_json() + "\n")
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
    return build_report(config, done.values(), time.perf_counter() - t0)


def read_checkpoint(path: str | Path) -> tuple[dict, dict[int, SweepRecord]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    lines = text.split("\n")
    if text and not text.endswith("\n"):
        lines = lines[:-1]  # torn final write from an interrupted run
    lines = [ln for ln in lines if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise CheckpointError(f"{path} has no header line")
    try:
        header = json.loads(lines[0][1:])
        records = {}
        for ln in lines[1:]:
            rec = SweepRecord.from_dict(json.loads(ln))
            records[rec.assignment_index] = rec
    except (ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc
    return header, records


def header_config(header: dict) -> dict:
    return header.get("config", header)


def resume(checkpoint_path: str | Path, config: SweepConfig, *, workers: int = 1) -> SweepReport:
    path = Path(checkpoint_path)
    header, records = read_checkpoint(path)
    mismatched = config.compatible_with(header_config(header))
    if mismatched:
        raise CheckpointError(f"checkpoint was written with a different {', '.join(mismatched)}")
    wanted = set(config.indices())
    records = {i: r for i, r in records.items() if i in wanted}
    # rewrite without a torn tail so appends start on a fresh line
    raw = path.read_text(encoding="utf-8")
    if raw and not raw.endswith("\n"):
        path.write_text(raw[: raw.rfind("\n") + 1], encoding="utf-8")
    return sweep_assignments(config, path, workers=workers, done=records)
