import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamlearn.domain import (
    SigmaAssignment,
    additive_assignment,
    assignment_count,
    assignment_from_index,
    b1_assignment,
    permutations_lex,
)
from hamlearn.statevec import ResponseState
from hamlearn.sweep import (
    BudgetExceeded,
    CheckpointError,
    SweepConfig,
    SweepRecord,
    build_report,
    fix_phase,
    merge_reports,
    objective,
    optimize_psi,
    partition_range,
    read_checkpoint,
    resume,
    start_points,
    sweep_assignments,
)
import oracle

MINUS = np.array([1.0, -1.0]) / np.sqrt(2.0)


def sig(texts, r):
    return SigmaAssignment.parse(texts, r)


# -- objective -------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 4, 6])
def test_objective_is_one_for_exact_learner(n):
    assert objective(n, b1_assignment(n), MINUS) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("n, r", [(2, 2), (3, 3), (4, 2)])
def test_objective_identity_assignment(n, r):
    rng = np.random.default_rng(n * r)
    psi = rng.normal(size=r) + 1j * rng.normal(size=r)
    psi /= np.linalg.norm(psi)
    ident = sig(["(1)"] * (n + 1), r)
    assert objective(n, ident, psi) == pytest.approx(1 / 2**n, abs=1e-12)


# frozen from tests/oracle.py (dense matrices + scipy sqrtm)
FROZEN_OBJECTIVE = [
    (3, ["(1)", "(12)", "(132)", "(123)"], 3, [1, 2j, -1], 0.8483937677235172),
    (2, ["(1)", "(123)", "(132)"], 3, [1, 1, 1], 0.25),
    (3, ["(1)", "(12)", "(1)", "(1)"], 2, [0.6, 0.8j], 0.6727183643012421),
    (4, ["(1)", "(12)", "(1)", "(1)", "(12)"], 2, [1, -1], 0.765625),
]


@pytest.mark.parametrize("n, texts, r, psi, expected", FROZEN_OBJECTIVE)
def test_objective_frozen_values(n, texts, r, psi, expected):
    psi = np.asarray(psi, dtype=complex)
    assert objective(n, sig(texts, r), psi / np.linalg.norm(psi)) == pytest.approx(expected, abs=1e-10)


@given(st.integers(0, 2**32 - 1))
def test_objective_agrees_with_dense_reference(seed):
    rng = np.random.default_rng(seed)
    n, r = int(rng.integers(1, 4)), int(rng.integers(2, 4))
    sigma = assignment_from_index(int(rng.integers(assignment_count(n, r))), n, r)
    psi = rng.normal(size=r) + 1j * rng.normal(size=r)
    psi /= np.linalg.norm(psi)
    ref = oracle.objective(n, [p.images for p in sigma], psi)
    assert objective(n, sigma, psi) == pytest.approx(ref, abs=1e-8)


def test_objective_gauge_invariance_is_exact():
    rng = np.random.default_rng(21)
    for _ in range(100):
        sigma = assignment_from_index(int(rng.integers(1296)), 3, 3)
        pi = permutations_lex(3)[int(rng.integers(6))]
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        psi = ResponseState(v / np.linalg.norm(v))
        assert objective(3, sigma, psi) == objective(3, sigma.right_compose(pi), psi.permuted(pi.inverse()))


# -- optimizer -------------------------------------------------------------------


def test_fix_phase_makes_leading_coordinate_real():
    psi = np.exp(0.7j) * np.array([0.6, -0.8j])
    out = fix_phase(psi)
    assert out[1].imag == 0.0 and out[1].real == pytest.approx(0.8)
    assert abs(abs(np.vdot(out, psi)) - 1.0) <= 1e-15


def test_start_points_are_keyed_by_seed_and_index():
    a = start_points(0, 5, 20, 3)
    assert np.array_equal(a, start_points(0, 5, 20, 3))
    assert not np.array_equal(a, start_points(0, 6, 20, 3))
    assert not np.array_equal(a, start_points(1, 5, 20, 3))
    assert np.array_equal(start_points(0, 5, 4, 3), a[:4])


@pytest.mark.parametrize("n", [2, 4])
def test_optimizer_recovers_minus_state(n):
    res = optimize_psi(n, b1_assignment(n))
    assert res.p_star == pytest.approx(1.0, abs=1e-9)
    assert abs(np.vdot(res.psi_star, MINUS)) == pytest.approx(1.0, abs=1e-6)
    # every start reaches the flat global maximum
    assert np.all(res.start_values >= 1.0 - 1e-9)
    assert res.converged


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_four_labels_saturate(n):
    assert optimize_psi(n, additive_assignment(n, 4)).p_star == pytest.approx(1.0, abs=1e-6)


# frozen from tests/oracle.py multistart Nelder-Mead
FROZEN_OPTIMA = [
    (3, ["(1)", "(12)", "(1)", "(1)"], 2, 0.8),
    (3, ["(1)", "(1)", "(12)", "(1)"], 2, 0.8),
    (3, ["(1)", "(1)", "(1)", "(12)"], 2, 0.78125),
    (3, ["(1)", "(12)", "(132)", "(123)"], 3, 0.97409505),
    (5, ["(1)", "(12)", "(12)", "(1)", "(1)", "(1)"], 2, 0.720588235294),
]


@pytest.mark.parametrize("n, texts, r, expected", FROZEN_OPTIMA)
def test_optimizer_frozen_optima(n, texts, r, expected):
    res = optimize_psi(n, sig(texts, r))
    assert res.p_star == pytest.approx(expected, abs=1e-7)
    assert abs(np.linalg.norm(res.psi_star) - 1.0) <= 1e-9
    assert objective(n, sig(texts, r), res.psi_star) == pytest.approx(res.p_star, abs=1e-9)


def test_optimizer_is_deterministic():
    s = sig(["(1)", "(12)", "(132)", "(123)"], 3)
    a, b = optimize_psi(3, s, index=7), optimize_psi(3, s, index=7)
    assert np.array_equal(a.psi_star, b.psi_star) and a.p_star == b.p_star


# -- configuration ---------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(n=3, r=2, index_range=(5, 5))
    with pytest.raises(ValueError):
        SweepConfig(n=3, r=2, index_range=(0, 17))
    with pytest.raises(ValueError):
        SweepConfig(n=3, r=2, starts=0)
    with pytest.raises(ValueError):
        SweepConfig(n=3, r=2, seed=-1)


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        sweep_assignments(SweepConfig(n=3, r=3, budget=100))
    # the gauge slice fits where the full space does not
    SweepConfig(n=3, r=3, budget=216, gauge_reduce=True).check_budget()


def test_gauge_reduction_counts():
    cfg = SweepConfig(n=3, r=2, gauge_reduce=True, starts=4)
    rep = sweep_assignments(cfg)
    assert rep.totals["evaluated"] == 8 and rep.totals["skipped_by_gauge"] == 8
    assert all(r.sigma[0] == "(1)" for r in rep.records)


def test_partition_range_covers_exactly():
    parts = partition_range(3, 100, 8)
    assert parts[0][0] == 3 and parts[-1][1] == 100
    assert all(a[1] == b[0] for a, b in zip(parts, parts[1:]))


# -- sweeps ----------------------------------------------------------------------


def test_sweep_n3_r2_values(timed_sweep):
    rep, _ = timed_sweep(n=3, r=2)
    assert rep.best_probability == pytest.approx(0.8, abs=1e-9)
    # tie set derived independently by the dense reference over all 16 assignments
    assert [o.assignment_index for o in rep.optima] == [2, 4, 11, 13]
    assert rep.best_probability == max(r.probability for r in rep.records)
    assert rep.totals == {"evaluated": 16, "skipped_by_gauge": 0, "rank_deficient": 8}


def test_records_satisfy_invariants(timed_sweep):
    rep, _ = timed_sweep(n=3, r=2)
    for rec in rep.records:
        assert 0.0 <= rec.probability <= 1.0
        assert abs(np.linalg.norm(rec.psi()) - 1.0) <= 1e-9
        assert rec.starts_used == 20
        assert SweepRecord.from_dict(json.loads(rec.to_json())) == rec


def test_monotone_in_r_at_n3(timed_sweep):
    p2 = timed_sweep(n=3, r=2)[0].best_probability
    p3 = timed_sweep(n=3, r=3)[0].best_probability
    p4 = optimize_psi(3, additive_assignment(3, 4)).p_star
    assert p2 <= p3 <= p4 and p3 < 1.0
    assert p4 == pytest.approx(1.0, abs=1e-6)


def test_sweeps_are_deterministic():
    cfg = SweepConfig(n=3, r=2, starts=6)
    a, b = sweep_assignments(cfg), sweep_assignments(cfg)
    assert [r.to_json() for r in a.records] == [r.to_json() for r in b.records]


def test_partition_soundness():
    cfg = SweepConfig(n=5, r=2, starts=8)
    full = sweep_assignments(cfg)
    parts = [
        sweep_assignments(SweepConfig(n=5, r=2, starts=8, index_range=rg))
        for rg in partition_range(0, cfg.total, 8)
    ]
    merged = merge_reports(cfg, parts)
    assert merged.best_probability == full.best_probability
    assert [o.to_json() for o in merged.optima] == [o.to_json() for o in full.optima]


def test_parallel_workers_match_serial():
    cfg = SweepConfig(n=3, r=2, starts=6)
    serial = sweep_assignments(cfg)
    parallel = sweep_assignments(cfg, workers=2)
    assert [r.to_json() for r in parallel.records] == [r.to_json() for r in serial.records]


# -- checkpoints -----------------------------------------------------------------


def test_interrupted_run_resumes_to_identical_report(tmp_path):
    cfg = SweepConfig(n=3, r=2, starts=6)
    full = sweep_assignments(cfg, tmp_path / "full.jsonl")
    path = tmp_path / "part.jsonl"
    sweep_assignments(SweepConfig(n=3, r=2, starts=6, index_range=(0, 8)), path, header={"config": cfg.echo()})
    # simulate a torn final write
    with path.open("a") as fh:
        fh.write('{"assignment_index": 8, "sig')
    resumed = resume(path, cfg)
    assert json.dumps(resumed.body(), sort_keys=True) == json.dumps(full.body(), sort_keys=True)
    _, records = read_checkpoint(path)
    assert sorted(records) == list(range(16))


def test_resume_of_completed_run_does_no_work(tmp_path, monkeypatch):
    cfg = SweepConfig(n=3, r=2, starts=4)
    path = tmp_path / "run.jsonl"
    sweep_assignments(cfg, path)
    import hamlearn.sweep as sw

    def boom(*a, **k):
        raise AssertionError("evaluated an already recorded assignment")

    monkeypatch.setattr(sw, "evaluate_index", boom)
    assert resume(path, cfg).totals["evaluated"] == 16


def test_resume_rejects_mismatched_config(tmp_path):
    path = tmp_path / "run.jsonl"
    sweep_assignments(SweepConfig(n=3, r=2, starts=4, index_range=(0, 2)), path)
    with pytest.raises(CheckpointError, match="seed"):
        resume(path, SweepConfig(n=3, r=2, starts=4, seed=1))


def test_corrupt_checkpoint_rejected(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('# {"config": {}}\nnot json\n{"assignment_index": 1}\n')
    with pytest.raises(CheckpointError):
        read_checkpoint(path)
    path.write_text('{"assignment_index": 1}\n')
    with pytest.raises(CheckpointError):
        read_checkpoint(path)


def test_unwritable_sink(tmp_path):
    with pytest.raises(OSError):
        sweep_assignments(SweepConfig(n=3, r=2, starts=2), tmp_path / "missing" / "x.jsonl")


def test_build_report_tie_tolerance():
    cfg = SweepConfig(n=3, r=2, tie_tol=0.05)
    recs = [
        SweepRecord(i, ["(1)"] * 4, [[1.0, 0.0], [0.0, 0.0]], p, 8, False, 1, True)
        for i, p in enumerate([0.5, 0.79, 0.8, 0.7])
    ]
    rep = build_report(cfg, recs)
    assert rep.best_probability == 0.8
    assert [o.assignment_index for o in rep.optima] == [1, 2]
