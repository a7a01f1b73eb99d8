import pytest

from gssbo.buffer import BufferPolicyState, establish_baseline, observe_iteration


def test_baseline_is_mean_of_window():
    state = establish_baseline(BufferPolicyState(), [0.1, 0.2, 0.3])
    assert state.t_bar == pytest.approx(0.2)
    assert not state.switched


def test_no_switch_below_threshold():
    state = establish_baseline(BufferPolicyState(z_factor=4.0), [0.1])
    state = observe_iteration(state, 0.39, 50)
    assert not state.switched and state.buffer_size is None


def test_threshold_is_strict_inequality():
    state = establish_baseline(BufferPolicyState(z_factor=4.0), [0.1])
    state = observe_iteration(state, 0.4, 50)
    assert not state.switched
    state = observe_iteration(state, 0.4000001, 50)
    assert state.switched and state.buffer_size == 50


def test_buffer_frozen_at_first_crossing():
    state = establish_baseline(BufferPolicyState(z_factor=2.0), [0.1, 0.1])
    state = observe_iteration(state, 0.5, 37)
    assert state.switched and state.buffer_size == 37
    # later observations never change the frozen size
    state = observe_iteration(state, 5.0, 99)
    assert state.buffer_size == 37


def test_observe_before_baseline_raises():
    with pytest.raises(ValueError, match="t_bar"):
        observe_iteration(BufferPolicyState(), 1.0, 10)


def test_empty_window_raises():
    with pytest.raises(ValueError):
        establish_baseline(BufferPolicyState(), [])


def test_negative_time_rejected():
    state = establish_baseline(BufferPolicyState(), [0.1])
    with pytest.raises(ValueError):
        observe_iteration(state, -1.0, 10)


def test_invalid_states_rejected():
    with pytest.raises(ValueError):
        BufferPolicyState(z_factor=0.0)
    with pytest.raises(ValueError):
        BufferPolicyState(switched=True, buffer_size=None)
