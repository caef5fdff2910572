import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pairmaser import dynamics as D
from pairmaser import fock as F
from pairmaser import jc_map as J
from pairmaser import xstate as X
from pairmaser.errors import DivergenceError, DomainError, IntegrationError, TruncationError

GG = X.XState(0.0, 0.0, 0.0, 1.0)
EE = X.XState(1.0, 0.0, 0.0, 0.0)
COOL = X.XState(0.05, 0.1, 0.1, 0.75)


def rec(j, n, s=0.0):
    return D.RunRecord(j, n, s, 0.0, 0.0, 0.0)


# ---- configuration -----------------------------------------------------------

@pytest.mark.parametrize("kw", [dict(xi=-0.1), dict(xi=np.inf), dict(xi=0.1, rate=0.0),
                                dict(xi=0.1, passes=0), dict(xi=0.1, stride=0),
                                dict(xi=0.1, pass_map="rk"), dict(xi=0.1, max_dim=2)])
def test_pass_config_rejects(kw):
    with pytest.raises(DomainError):
        D.PassConfig(**kw)


def test_pass_config_default_dim():
    assert D.PassConfig(xi=0.5, passes=30).max_dim == 64
    assert D.PassConfig(xi=0.5, passes=30, max_dim=10).max_dim == 10


# ---- closed forms ------------------------------------------------------------

def test_increment_ratio():
    assert D.increment_ratio(X.XState(0.3, 0.2, 0.2, 0.3), 0.4) == 1.0
    assert D.increment_ratio(X.XState(0.1, 0.2, 0.2, 0.5), 0.1) == pytest.approx(0.992, abs=1e-15)


def test_first_pass_mean():
    assert D.first_pass_mean(EE, 0.2) == pytest.approx(2 * 0.04)
    assert D.first_pass_mean(GG, 0.2) == 0.0
    assert D.first_pass_mean(X.XState(0.1, 0.2, 0.2, 0.5, 0j, 0.05), 0.1) == pytest.approx(0.007)


def test_mean_after_j():
    res = X.XState(0.1, 0.2, 0.2, 0.5, 0j, 0.05)
    assert D.mean_after_j(res, 0.1, 1) == pytest.approx(D.first_pass_mean(res, 0.1))
    flat = X.XState(0.3, 0.2, 0.2, 0.3)
    assert D.mean_after_j(flat, 0.1, 7) == pytest.approx(7 * D.first_pass_mean(flat, 0.1))
    assert D.mean_after_j(res, 0.1, 10**6) == pytest.approx(D.steady_mean(res), rel=1e-12)
    with pytest.raises(DomainError):
        D.mean_after_j(res, 0.1, 0)


def test_steady_mean():
    assert D.steady_mean(X.XState(0.1, 0.2, 0.2, 0.5)) == pytest.approx(0.75)
    ent = X.thermal_entangled_xstate(0.1, 0.2, 0.5, 0.1)
    assert D.steady_mean(ent) == pytest.approx((0.1 + 0.2 - 0.1) / 0.4)
    with pytest.raises(DivergenceError):
        D.steady_mean(X.XState(0.4, 0.1, 0.1, 0.4))


def test_steady_mean_ignores_correlations(rng):
    for _ in range(20):
        rho = X.random_xstate(rng, 0.1)
        base = (2 * rho.a11 + rho.a22 + rho.a33) / (2 * (rho.a44 - rho.a11))
        assert D.steady_mean(X.classical_correlated(rho)) == pytest.approx(base)
        assert D.steady_mean(X.product_state(rho)) == pytest.approx(base)


# ---- detect_steady -----------------------------------------------------------

def test_detect_steady_constant():
    assert D.detect_steady([rec(j, 0.3, 1.0) for j in range(3, 10)]) == 3


def test_detect_steady_growing_is_absent():
    assert D.detect_steady([rec(j, 1.1 ** j, 1.0) for j in range(1, 50)]) is None


def test_detect_steady_needs_five_quiet_steps():
    rs = [rec(1, 0.1), rec(2, 0.5)] + [rec(j, 1.0) for j in range(3, 8)]
    assert D.detect_steady(rs) is None
    assert D.detect_steady(rs + [rec(8, 1.0)]) == 3
    with pytest.raises(DomainError):
        D.detect_steady([])


def test_detect_steady_fig2_window():
    cfg = D.PassConfig(xi=0.5, passes=30)
    for res in (X.WITHOUT_DOUBLE_COHERENCE, X.WITH_DOUBLE_COHERENCE):
        j = D.detect_steady(D.iterate_passes(F.vacuum(1), res, cfg), 1e-2)
        assert j is not None and 10 <= j <= 30


# ---- iteration ---------------------------------------------------------------

def test_ground_pairs_keep_vacuum():
    for r in D.iterate_passes(F.vacuum(1), GG, D.PassConfig(xi=0.5, passes=10)):
        assert r.mean_photon == 0 and r.entropy == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("pass_map", ["exact", "weak"])
def test_iteration_matches_sequential_passes(rng, pass_map):
    res = X.random_xstate(rng)
    step = J.exact_pass if pass_map == "exact" else J.weak_pass
    state = F.vacuum(1)
    want = []
    for _ in range(12):
        state = step(state, res, 0.3, max_dim=40)
        want.append(state)
    cfg = D.PassConfig(xi=0.3, passes=12, pass_map=pass_map, max_dim=40, stride=3)
    recs, last = D.iterate_states(F.vacuum(1), res, cfg)
    assert [r.j for r in recs] == [3, 6, 9, 12]
    for r in recs:
        assert r.mean_photon == pytest.approx(F.mean_photon(want[r.j - 1]), abs=1e-12)
        assert r.entropy == pytest.approx(F.von_neumann_entropy(want[r.j - 1]), abs=1e-10)
    d = min(last.dim, want[-1].dim)
    assert np.abs(last.rho[:d, :d] - want[-1].rho[:d, :d]).max() < 1e-12


def test_iteration_truncation_error():
    with pytest.raises(TruncationError):
        D.iterate_passes(F.vacuum(1), EE, D.PassConfig(xi=0.5, passes=20, max_dim=8))


@given(st.integers(0, 2**32 - 1))
def test_no_double_coherence_grows_monotonically(seed):
    # non-inverted reservoirs (a44 > a11), vacuum start
    rng = np.random.default_rng(seed)
    r = X.random_xstate(rng, min_gap=1e-3)
    res = X.XState(r.a11, r.a22, r.a33, r.a44, 0j, r.a23)
    recs = D.iterate_passes(F.vacuum(1), res, D.PassConfig(xi=0.5, passes=15))
    n = [r.mean_photon for r in recs]
    s = [r.entropy for r in recs]
    assert all(b >= a - 1e-12 for a, b in zip(n, n[1:]))
    assert all(b >= a - 1e-12 for a, b in zip(s, s[1:]))


def test_inverted_reservoir_entropy_can_fall():
    # a strongly pumped cavity narrows its photon distribution after a while
    res = X.XState(0.8876, 0.0095, 0.0098, 0.0931, 0j, -0.00014)
    recs = D.iterate_passes(F.vacuum(1), res, D.PassConfig(xi=0.5, passes=15))
    s = np.array([r.entropy for r in recs])
    assert np.all(np.diff([r.mean_photon for r in recs]) > 0)
    assert 0 < np.argmax(s) < len(s) - 1


def test_weak_iteration_matches_mean_after_j():
    res = X.XState(0.1, 0.2, 0.2, 0.5, 0j, 0.05)
    cfg = D.PassConfig(xi=0.01, passes=2000, stride=500, pass_map="weak", max_dim=60)
    recs = D.iterate_passes(F.vacuum(1), res, cfg)
    for r in recs:
        assert r.mean_photon == pytest.approx(D.mean_after_j(res, 0.01, r.j), rel=0.01)


def test_run_until_steady():
    res = X.XState(0.1, 0.2, 0.2, 0.5)
    cfg = D.PassConfig(xi=0.01, passes=1, stride=200, pass_map="weak", max_dim=200)
    recs, state, j = D.run_until_steady(F.vacuum(1), res, cfg, tol=4e-5)
    assert j is not None
    assert recs[-1].mean_photon == pytest.approx(0.75, rel=0.01)
    assert state.trace_error() < 1e-10


def test_run_until_steady_gives_up():
    cfg = D.PassConfig(xi=0.01, passes=1, stride=100, pass_map="weak", max_dim=200)
    recs, _, j = D.run_until_steady(F.vacuum(1), EE, cfg, tol=1e-8, max_passes=1000)
    assert j is None and recs[-1].j == 1000


# ---- master equation ---------------------------------------------------------

def test_master_zero_time_is_identity(rng):
    s = F.random_cavity_state(rng, 4)
    assert D.integrate_master(s, COOL, D.PassConfig(xi=0.1), 0.0) is s


def test_master_rejects_bad_horizon():
    for t in (-1.0, np.inf, np.nan):
        with pytest.raises(IntegrationError):
            D.integrate_master(F.vacuum(3), COOL, D.PassConfig(xi=0.1), t)
    with pytest.raises(IntegrationError):
        D.integrate_master(F.vacuum(3), COOL, D.PassConfig(xi=0.1), 1e3, max_steps=100)


def test_master_rate_rescales_time(rng):
    s = F.resize(F.random_cavity_state(rng, 3), 20)
    a = D.integrate_master(s, COOL, D.PassConfig(xi=0.3, rate=1.0), 7.0)
    b = D.integrate_master(s, COOL, D.PassConfig(xi=0.3, rate=2.0), 3.5)
    assert np.abs(a.rho - b.rho).max() < 1e-12


def test_master_long_time_steady_state():
    cfg = D.PassConfig(xi=0.01)
    s = D.integrate_master(F.vacuum(1), COOL, cfg, 60000.0, dim=20)
    assert F.mean_photon(s) == pytest.approx(D.steady_mean(COOL), rel=0.01)
    assert s.trace_error() < 1e-10 and s.min_eigenvalue() > -1e-10
    fast = D.integrate_master(F.vacuum(1), COOL, D.PassConfig(xi=0.01, rate=3.0), 20000.0, dim=20)
    assert F.mean_photon(fast) == pytest.approx(F.mean_photon(s), rel=1e-9)


def test_master_matches_weak_iteration():
    cfg = D.PassConfig(xi=0.01, passes=6000, stride=2000, pass_map="weak", max_dim=60)
    for r in D.iterate_passes(F.vacuum(1), COOL, cfg):
        s = D.integrate_master(F.vacuum(1), COOL, D.PassConfig(xi=0.01), float(r.j), dim=20)
        assert F.mean_photon(s) == pytest.approx(r.mean_photon, rel=0.02)


def test_master_short_steps_match_squaring_path(rng):
    # below and above the step count where repeated squaring kicks in
    s = F.resize(F.random_cavity_state(rng, 3), 24)
    cfg = D.PassConfig(xi=0.1)
    a = D.integrate_master(s, COOL, cfg, 40.95)
    b = D.integrate_master(s, COOL, cfg, 40.97)
    c = D.integrate_master(a, COOL, cfg, 0.02)
    assert np.abs(b.rho - c.rho).max() < 1e-12


def test_master_truncation():
    with pytest.raises(TruncationError):
        D.integrate_master(F.vacuum(4), EE, D.PassConfig(xi=0.5), 50.0)
