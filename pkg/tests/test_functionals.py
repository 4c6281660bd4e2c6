import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entroflux import functionals as fn
from entroflux import quantum as qm
from entroflux.models import canonical_model, random_system

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
W0 = np.diag([0.75, 0.25])
FLIP = qm.QuantumSystem(SX, W0)

P_GRID = (1.0, 1.5, 2.0, 3.0, 4.0, 6.0, math.inf)


def flip_closed_form(alpha):
    """Deformed functional of the flip qubit at t = pi/2, any p."""
    return math.log(0.75 * 3.0 ** (-alpha) + 0.25 * 3.0 ** alpha)


@pytest.mark.parametrize("p", P_GRID)
@pytest.mark.parametrize("alpha", [-1.0, 0.25, 0.5, 1.3, 2.0])
def test_flip_qubit_closed_form(p, alpha):
    got = fn.functional(FLIP, p, alpha, math.pi / 2)
    assert got == pytest.approx(flip_closed_form(alpha), abs=1e-12)


@pytest.mark.parametrize("p", P_GRID)
def test_endpoints_vanish(p):
    system = random_system(5, tri=True, seed=41)
    for t in (0.5, 1.0):
        assert abs(fn.functional(system, p, 0.0, t)) < 1e-12
        assert abs(fn.functional(system, p, 1.0, t)) < 1e-12


@pytest.mark.parametrize("p", P_GRID)
def test_symmetry_on_tri_system(p):
    system = random_system(6, tri=True, seed=42)
    for alpha in (-0.75, 0.2, 0.5, 1.6):
        lhs = fn.functional(system, p, alpha, 1.0)
        rhs = fn.functional(system, p, 1.0 - alpha, 1.0)
        assert lhs == pytest.approx(rhs, abs=1e-11)


def test_symmetry_fails_without_tri():
    system = random_system(5, tri=False, seed=43)
    gap = abs(fn.functional(system, 2.0, -0.5, 1.0)
              - fn.functional(system, 2.0, 1.5, 1.0))
    assert gap > 1e-8


def test_renyi_bridge_on_tri_system():
    system = random_system(6, tri=True, seed=44)
    for t in (0.5, 1.0):
        evolved = qm.schrodinger_evolve(system, system.reference_state.matrix,
                                        t)
        for alpha in (-0.3, 0.4, 1.2):
            via_renyi = qm.q_renyi_entropy(evolved.matrix,
                                           system.reference_state.matrix,
                                           alpha)
            got = fn.functional(system, 2.0, alpha, t)
            assert got == pytest.approx(via_renyi, abs=1e-11)


def test_renyi_bridge_check_helper():
    system = random_system(4, tri=True, seed=45)
    assert fn.renyi_bridge_check(system, 0.7, 1.0) < 1e-11


def test_bridge_uses_backward_state_without_tri():
    """For complex generators the p=2 curve matches the time-reversed state."""
    system = random_system(5, tri=False, seed=46)
    t, alpha = 1.0, 0.6
    backward = qm.schrodinger_evolve(system, system.reference_state.matrix,
                                     -t)
    via_renyi = qm.q_renyi_entropy(backward.matrix,
                                   system.reference_state.matrix, alpha)
    got = fn.functional(system, 2.0, alpha, t)
    assert got == pytest.approx(via_renyi, abs=1e-11)


def test_variational_route_matches_limit_functional():
    system = random_system(5, tri=True, seed=47)
    for alpha in (0.3, 1.2):
        got = fn.variational_max(system, alpha, 1.0)
        want = fn.functional(system, math.inf, alpha, 1.0)
        assert got == pytest.approx(want, abs=1e-10)


def test_p_monotone_in_p():
    system = random_system(6, tri=True, seed=48)
    for alpha in (0.25, 0.5, 0.75):
        values = [fn.functional(system, p, alpha, 1.0) for p in P_GRID]
        diffs = np.diff(values)
        assert np.all(diffs <= 1e-10)


def test_p64_close_to_limit():
    system = random_system(6, tri=True, seed=49)
    for alpha in (0.25, 0.6):
        gap = abs(fn.functional(system, 64.0, alpha, 1.0)
                  - fn.functional(system, math.inf, alpha, 1.0))
        assert gap < 1e-3


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_convexity_in_alpha(p):
    system = random_system(4, tri=True, seed=50)
    alphas = np.linspace(-1.0, 2.0, 31)
    vals = np.array([fn.functional(system, p, a, 1.0) for a in alphas])
    assert np.diff(vals, 2).min() >= -1e-9


@pytest.mark.parametrize("p", P_GRID)
def test_derivative_at_zero_matches_mean_ep(p):
    system = random_system(5, tri=True, seed=51)
    t, h = 1.0, 1e-4
    slope = (fn.functional(system, p, h, t)
             - fn.functional(system, p, -h, t)) / (2 * h)
    assert slope == pytest.approx(-t * qm.mean_ep_expectation(system, t),
                                  abs=1e-6)


def test_naive_functional_breaks_endpoint():
    system = random_system(4, tri=False, seed=52)
    assert abs(fn.naive_functional(system, 1.0, 1.0)) > 1e-8
    assert abs(fn.functional(system, 2.0, 1.0, 1.0)) < 1e-12


def test_naive_functional_collapses_for_commuting_pair():
    system = qm.QuantumSystem(np.diag([0.0, 1.0, 2.0]),
                              np.diag([0.5, 0.3, 0.2]))
    for alpha in (0.3, 1.0, 1.7):
        assert fn.naive_functional(system, alpha, 1.0) == pytest.approx(
            fn.functional(system, 2.0, alpha, 1.0), abs=1e-13)


def test_am_norm_frozen_example():
    got = fn.araki_masuda_norm(np.diag([2.0, 0.0]), FLIP, 2.0)
    assert got == pytest.approx(math.sqrt(3), abs=1e-14)


@pytest.mark.parametrize("p", [1.0, 2.0, 7.0])
def test_am_norm_of_identity(p):
    system = random_system(4, seed=53)
    assert fn.araki_masuda_norm(np.eye(4), system, p) == pytest.approx(
        1.0, abs=1e-13)


def test_am_norm_scales_homogeneously():
    system = random_system(3, seed=54)
    a = np.array([[1.0, 0.2], [0.1, -0.4]])
    a = np.pad(a, ((0, 1), (0, 1)))
    base = fn.araki_masuda_norm(a, system, 3.0)
    assert fn.araki_masuda_norm(2.5 * a, system, 3.0) == pytest.approx(
        2.5 * base, abs=1e-12)


def test_transfer_functional_matches_on_tri_system():
    system = random_system(5, tri=True, seed=55)
    for p in (1.0, 2.0, 4.0):
        for alpha in (-0.5, 0.3, 1.5):
            got = fn.transfer_functional(system, p, alpha, 1.0)
            want = fn.functional(system, p, alpha, 1.0)
            assert got == pytest.approx(want, abs=1e-10)


def test_transfer_functional_reflects_alpha_without_tri():
    system = random_system(4, tri=False, seed=56)
    got = fn.transfer_functional(system, 2.0, 0.3, 1.0)
    want = fn.functional(system, 2.0, 0.7, 1.0)
    assert got == pytest.approx(want, abs=1e-10)


def test_transfer_apply_group_law():
    system = random_system(4, tri=True, seed=57)
    a = np.eye(4)
    p = 3.0
    two_step = fn.transfer_apply(system, p,
                                 fn.transfer_apply(system, p, a, 0.4), 0.6)
    one_step = fn.transfer_apply(system, p, a, 1.0)
    np.testing.assert_allclose(two_step.matrix, one_step.matrix, atol=1e-11)


def test_transfer_apply_intertwines_evolution():
    system = random_system(4, seed=58)
    rng = np.random.default_rng(59)
    a = rng.normal(size=(4, 4))
    b = rng.normal(size=(4, 4))
    t, p = 0.9, 2.0
    lhs = fn.transfer_apply(
        system, p, a @ fn.transfer_apply(system, p, b, t).matrix, -t).matrix
    moved = system.propagator(-t) @ a @ system.propagator(t)
    np.testing.assert_allclose(lhs, moved @ b, atol=1e-11)


def test_functional_curve_round_trip():
    alphas = np.linspace(-1.0, 2.0, 13)
    curve = fn.functional_curve(FLIP, 2.0, math.pi / 2, alphas)
    assert len(curve.alphas) == 13
    np.testing.assert_allclose(
        curve.values, [flip_closed_form(a) for a in alphas], atol=1e-12)


def test_rejects_p_below_one():
    with pytest.raises(ValueError):
        fn.functional(FLIP, 0.5, 0.3, 1.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=8),
       st.integers(min_value=0, max_value=10_000))
def test_kawasaki_endpoint_property(dim, seed):
    system = random_system(dim, tri=bool(seed % 2), seed=seed)
    assert abs(fn.functional(system, 2.0, 1.0, 1.0)) < 1e-11
    assert abs(fn.functional(system, math.inf, 1.0, 1.0)) < 1e-11


def test_canonical_model_functional_is_finite_and_convex():
    system = canonical_model().system
    alphas = np.linspace(-1.0, 2.0, 25)
    vals = np.array([fn.functional(system, math.inf, a, 1.0)
                     for a in alphas])
    assert np.all(np.isfinite(vals))
    assert np.diff(vals, 2).min() >= -1e-9
