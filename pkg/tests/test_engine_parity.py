"""The compiled kernel and the pure-Python engine must be bit-identical:
same states, same event counts, same logs, same returned times."""

import pytest

from fireline._engine_py import PyEngineCore
from fireline.engine import COMPILED, make_engine

pytestmark = pytest.mark.skipif(not COMPILED, reason="compiled kernel unavailable")


def _pair(*args, **kwargs):
    return (
        make_engine(*args, force="python", **kwargs),
        make_engine(*args, force="compiled", **kwargs),
    )


def test_make_engine_selects():
    eng = make_engine(10, 1.0, 0.0, 1, 0)
    assert not isinstance(eng, PyEngineCore)
    assert isinstance(make_engine(10, 1.0, 0.0, 1, 0, force="python"), PyEngineCore)
    with pytest.raises(ValueError):
        make_engine(10, 1.0, 0.0, 1, 0, force="fortran")


def test_parity_clocked_matches():
    py, cy = _pair(80, 4.0, 0.3, 2025, 11)
    for t in [0.5, 1.7, 8.0, 20.0, 45.0]:
        py.advance_to(t)
        cy.advance_to(t)
        assert py.state_view() == cy.state_view(), f"diverged at t={t}"
        assert py.event_count == cy.event_count
        assert py.now == cy.now
    assert py.match_log == cy.match_log
    assert (py.burn_lo, py.burn_hi) == (cy.burn_lo, cy.burn_hi)


def test_parity_injected_and_fire():
    kwargs = dict(
        initial_occupied=True,
        ignite_site=25,
        injected_t=[1.5, 6.0],
        injected_site=[10, 40],
    )
    py, cy = _pair(51, 6.0, 0.0, 7, 3, **kwargs)
    for t in [1.0, 2.0, 5.0, 10.0, 30.0]:
        py.advance_to(t)
        cy.advance_to(t)
        assert py.state_view() == cy.state_view(), f"diverged at t={t}"
    assert py.match_log == cy.match_log
    assert py.event_count == cy.event_count


def test_parity_propagation_tracking():
    kwargs = dict(initial_occupied=True, ignite_site=300, track_fronts=True)
    py, cy = _pair(601, 9.0, 0.0, 123, 0, **kwargs)
    py.advance_to(25.0)
    cy.advance_to(25.0)
    assert py.front_plus == cy.front_plus
    assert py.front_minus == cy.front_minus
    assert py.burn_times == cy.burn_times
    assert py.spark_log == cy.spark_log
    assert py.omega_right == cy.omega_right
    assert py.omega_left == cy.omega_left
    assert py.truncated == cy.truncated
    assert py.state_view() == cy.state_view()


def test_parity_driving_methods():
    kwargs = dict(initial_occupied=True, injected_t=[0.25], injected_site=[30])
    py, cy = _pair(61, 12.0, 0.0, 42, 9, **kwargs)
    py.advance_to(0.25)
    cy.advance_to(0.25)
    end_py = py.run_while_burning(50.0)
    end_cy = cy.run_while_burning(50.0)
    assert end_py == end_cy and end_py > 0.25
    lo, hi = py.burn_lo, py.burn_hi
    assert (lo, hi) == (cy.burn_lo, cy.burn_hi)
    hit_py = py.run_until_interval_occupied(lo, hi, end_py + 60.0)
    hit_cy = cy.run_until_interval_occupied(lo, hi, end_cy + 60.0)
    assert hit_py == hit_cy and hit_py > end_py
    assert py.state_view() == cy.state_view()


def test_parity_validation_errors():
    for bad in (
        dict(n_sites=0),
        dict(pi=0.0),
        dict(match_rate=-1.0),
        dict(master_seed=2**64),
        dict(stream_id=-1),
        dict(match_rate=0.5, injected_t=[1.0], injected_site=[2]),
        dict(ignite_site=3),
    ):
        args = dict(n_sites=10, pi=1.0, match_rate=0.0, master_seed=1, stream_id=0)
        args.update(bad)
        with pytest.raises(ValueError):
            make_engine(force="python", **args)
        with pytest.raises(ValueError):
            make_engine(force="compiled", **args)
