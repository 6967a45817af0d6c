import pytest
from hypothesis import given, strategies as st

from tgscrape.governor import (
    BudgetLockedError,
    BudgetState,
    CheckpointPolicy,
    PacingPolicy,
    PersistentBudget,
    admit_channel,
    deadline_exceeded,
    dump_budget,
    pace_channel_loop,
    parse_budget,
    should_checkpoint,
)

T0 = 1_700_000_000.0
HOUR = 3600


@pytest.mark.parametrize("duration,sleep", [(10, 50), (60, 0), (300, 0), (0, 60), (59.5, 0.5)])
def test_pacing(duration, sleep):
    assert pace_channel_loop(duration, PacingPolicy()) == sleep


@given(st.floats(0, 1e5, allow_nan=False), st.floats(0.1, 1e4, allow_nan=False))
def test_pacing_properties(duration, minimum):
    s = pace_channel_loop(duration, PacingPolicy(minimum))
    assert s >= 0
    if duration < minimum:
        assert duration + s == pytest.approx(minimum)


def test_policies_reject_nonpositive():
    with pytest.raises(ValueError):
        PacingPolicy(0)
    with pytest.raises(ValueError):
        CheckpointPolicy(0)


@pytest.mark.parametrize("t,expected", [(1000, True), (999, False), (2000, True), (2001, False)])
def test_checkpoint_cadence(t, expected):
    assert should_checkpoint(t, CheckpointPolicy()) is expected


@given(st.integers(1, 5000), st.integers(1, 700))
def test_checkpoint_fires_floor_n_over_interval(n, interval):
    policy = CheckpointPolicy(interval)
    assert sum(should_checkpoint(t, policy) for t in range(1, n + 1)) == n // interval


@pytest.mark.parametrize("elapsed,expected", [(21601, True), (21600, False), (0, False)])
def test_deadline_strict(elapsed, expected):
    assert deadline_exceeded(T0, T0 + elapsed, 21600) is expected


def test_empty_budget_admits():
    assert admit_channel(BudgetState(), "@A", T0).admitted


def test_201st_community_denied_until_oldest_expires():
    state = BudgetState()
    for i in range(200):
        assert admit_channel(state, f"@c{i}", T0).admitted
    d = admit_channel(state, "@late", T0 + HOUR)
    assert not d.admitted
    assert d.retry_after == 23 * HOUR
    # at expiry the slot frees up
    assert admit_channel(state, "@late", T0 + 24 * HOUR).admitted


def test_readmission_is_free():
    state = BudgetState(budget_limit=1)
    assert admit_channel(state, "@A", T0).admitted
    assert admit_channel(state, "@A", T0 + 2 * HOUR).admitted
    assert len(state.admissions) == 1
    assert not admit_channel(state, "@B", T0 + 2 * HOUR).admitted


@given(
    st.lists(st.tuples(st.integers(0, 30), st.floats(0, 6 * HOUR, allow_nan=False)), max_size=300),
    st.integers(1, 12),
)
def test_budget_never_exceeded(calls, limit):
    state = BudgetState(budget_limit=limit)
    now = T0
    for handle, step in calls:
        now += step
        d = admit_channel(state, f"@h{handle}", now)
        live = {h for h, t in state.admissions if now - t < state.window_seconds}
        assert len(live) <= limit
        if not d.admitted:
            assert 0 < d.retry_after <= state.window_seconds
        times = [t for _, t in state.admissions]
        assert times == sorted(times)


def test_state_text_round_trip():
    state = BudgetState([("@a", T0), ("@b", T0 + 0.25)])
    back = parse_budget(dump_budget(state))
    assert back.admissions == state.admissions
    assert dump_budget(state).splitlines()[0] == f"@a\t{T0!r}"


def test_state_survives_restart(tmp_path):
    path = tmp_path / "budget.tsv"
    with PersistentBudget(path, budget_limit=2) as b:
        assert b.admit("@A", T0).admitted
        assert b.admit("@B", T0 + 1).admitted
    with PersistentBudget(path, budget_limit=2) as b:
        d = b.admit("@C", T0 + HOUR)
        assert not d.admitted and d.retry_after == 23 * HOUR
        assert b.admit("@A", T0 + HOUR).admitted


def test_lock_prevents_second_run(tmp_path):
    path = tmp_path / "budget.tsv"
    with PersistentBudget(path):
        with pytest.raises(BudgetLockedError):
            with PersistentBudget(path):
                pass
    with PersistentBudget(path):
        pass
