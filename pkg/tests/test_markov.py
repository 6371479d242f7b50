import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hornphase.analytic import concentration_lower_bound
from hornphase.errors import InvalidProfile
from hornphase.generator import effective_rate
from hornphase.markov import (
    Profile,
    concentration_check,
    domination_check,
    fidelity_check,
    profile_step,
    profile_trajectory,
    simple_chain_run,
    trajectory_array,
    transition_probs,
    within_envelope,
    write_trajectories,
)
from hornphase.rng import RngStream


def test_transition_probs():
    p = transition_probs(5)
    assert p.p1 == 0.2
    assert p.p2 == 1 / 15
    assert p.p3 == 0.5
    assert p.p4 == 4 / 26 == 2 / 13
    q = transition_probs(1)
    assert q.p2 == 0.0 and q.p4 == 0.0
    with pytest.raises(InvalidProfile):
        transition_probs(0)


def test_single_positive_unit_collapses():
    for t in range(2, 12):
        for s in range(10):
            g = profile_step(Profile(0, 0, 1, 0, 0, t), RngStream(s, t))
            assert g == Profile(0, 0, 0, 0, 0, t - 1)


def test_negative_profile_rejected():
    with pytest.raises(InvalidProfile):
        Profile(-1, 0, 0, 0, 0, 3)
    with pytest.raises(InvalidProfile):
        profile_step(Profile(0, 0, 1, 0, 0, 0), RngStream(0, 0))


profiles = st.builds(
    Profile,
    st.integers(0, 50),
    st.integers(0, 50),
    st.integers(0, 50),
    st.integers(0, 50),
    st.integers(0, 50),
    st.integers(1, 30),
)


@given(profiles, st.integers(0, 2**32))
@settings(max_examples=300)
def test_step_bookkeeping(g, seed):
    h = profile_step(g, RngStream(seed, 0))
    assert h.t == g.t - 1
    assert min(h.as_tuple()) >= 0
    if g.hp1 > 0:
        # satisfied clauses leave; negative units become empty, nothing else disappears
        assert h.n_total <= g.n_total - 1
        assert h.e >= g.e
        assert h.hn1 + h.hn2 + h.e == g.hn1 + g.hn2 + g.e
    else:
        assert h.hp1 == 0
        assert h.n_total <= max(0, g.n_total - 1)


def test_nonnegativity_fuzz():
    # 10^6 chain steps over many random starting profiles
    total = 0
    for i in range(4000):
        rng = RngStream(31, i)
        n = 5 + rng.integers(20)
        arr = trajectory_array(n, rng.integers(3000), ("strict", "padded")[i % 2], rng)
        assert arr.min() >= 0
        total += n
    steps = 0
    rng = RngStream(32, 0)
    g = Profile(40, 40, 40, 40, 0, 10**6)
    while steps + total < 10**6:
        g = profile_step(g, rng)
        if g.n_total == 0 or g.t == 1:
            g = Profile(40, 40, 40, 40, 0, 10**6 - steps)
        steps += 1
        assert min(g.as_tuple()) >= 0


def test_trajectory_shape_and_initial_sum():
    traj = profile_trajectory(8, 300, "strict", RngStream(1, 2))
    assert len(traj) == 9
    assert traj[0].n_total == 300
    assert [g.t for g in traj] == list(range(8, -1, -1))


def test_initial_hp1_mean_is_finite_rate():
    n, m, runs = 12, 2000, 4000
    values = np.array([trajectory_array(n, m, "strict", RngStream(2, i))[0, 2] for i in range(runs)])
    lam = effective_rate(n, m, "strict").lam
    assert abs(values.mean() - lam) <= 3 * math.sqrt(lam / runs)


def test_write_trajectories():
    trajs = [profile_trajectory(2, 5, "strict", RngStream(0, i)) for i in range(2)]
    buf = io.StringIO()
    write_trajectories(trajs, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "run,t,hn1,hn2,hp1,hp2,e,n_total"
    assert len(lines) == 1 + 2 * 3
    assert lines[1].startswith("0,2,") and lines[1].endswith(",5")


def test_fidelity_small():
    report = fidelity_check(8, 64, "strict", 4000, master_seed=3)
    assert set(report.tv) == {(t, c) for t in range(0, 9) for c in ("hn1", "hn2", "hp1", "hp2", "e")}
    assert report.max_tv <= 0.06


def test_simple_chain_examples():
    assert simple_chain_run(10, 1, 1, RngStream(0, 0)) == [1, 0]
    assert simple_chain_run(10, 5, 0, RngStream(0, 0)) == [5]
    path = simple_chain_run(100, 50, 30, RngStream(0, 0))
    assert len(path) == 31 and path[0] == 50
    assert all(a >= b for a, b in zip(path, path[1:]))
    with pytest.raises(ValueError):
        simple_chain_run(5, 10, 6, RngStream(0, 0))


def test_simple_chain_mean_step():
    u, t, samples = 500, 40, 100_000
    drops = np.array([u - simple_chain_run(t, u, 1, RngStream(7, i))[1] for i in range(samples)])
    expected = 1 + (u - 1) / t
    var = (u - 1) * (1 / t) * (1 - 1 / t)
    assert abs(drops.mean() - expected) <= 3 * math.sqrt(var / samples)


def test_concentration_zero_steps():
    assert concentration_check(10**6, 10**6, 0, 20, RngStream(0, 0)) == 1.0


def test_concentration_small_regime_is_a_fraction():
    frac = concentration_check(10, 10, 9, 200, RngStream(1, 0))
    assert 0.0 <= frac <= 1.0


def test_envelope_definitions():
    n, start = 100, 1000
    y = concentration_lower_bound(n, 90, start)
    floor_path = [start] + [math.ceil(concentration_lower_bound(n, t, start)) for t in range(99, 89, -1)]
    assert within_envelope(n, start, floor_path)
    assert within_envelope(n, start, floor_path, "pointwise")
    assert not within_envelope(n, start, [start] + [int(y) - 1] * 10)
    # 900 sits above y_90 but below y_99
    early_dip = [start, 900] + [800] * 9
    assert within_envelope(n, start, early_dip)
    assert not within_envelope(n, start, early_dip, "pointwise")
    with pytest.raises(ValueError):
        within_envelope(n, start, [start, start], "other")


def test_domination_report_format():
    report = domination_check(10, 128, "strict", 2000, RngStream(0, 0), min_samples=200)
    assert sorted(report.tables) == list(range(1, 11))
    assert report.max_violation <= 0.05
    t10 = report.tables[10]
    assert t10.samples_pur == t10.samples_variant == 2000


def test_domination_self_comparison_small():
    report = domination_check(10, 128, "strict", 4000, RngStream(1, 0), min_samples=500, against="pur")
    assert report.max_violation <= 0.05
