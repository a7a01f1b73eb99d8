"""Dynamic buffer-size policy: freeze the fitting-set size once iteration
wall time exceeds a factor of the initial per-iteration average."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class BufferPolicyState:
    z_factor: float = 4.0
    initial_window: int = 20
    t_bar: float | None = None
    switched: bool = False
    buffer_size: int | None = None  # frozen M, defined once switched

    def __post_init__(self):
        if self.z_factor <= 0:
            raise ValueError("z_factor must be positive")
        if self.switched and (self.buffer_size is None or self.buffer_size < 1):
            raise ValueError("switched state requires buffer_size >= 1")


def establish_baseline(state: BufferPolicyState, initial_iteration_times) -> BufferPolicyState:
    """Set the baseline per-iteration time to the mean of the initial window."""
    times = list(initial_iteration_times)
    if not times:
        raise ValueError("initial_iteration_times must be nonempty")
    return replace(state, t_bar=float(sum(times) / len(times)))


def observe_iteration(state: BufferPolicyState, t_current: float,
                      current_dataset_size: int) -> BufferPolicyState:
    """Trigger the switch when an iteration exceeds z_factor * t_bar.

    Idempotent once switched; the buffer size M is frozen at the dataset size
    of the first crossing.
    """
    if state.switched:
        return state
    if state.t_bar is None:
        raise ValueError("baseline t_bar not established")
    if t_current < 0:
        raise ValueError("t_current must be >= 0")
    if t_current > state.z_factor * state.t_bar:
        return replace(state, switched=True, buffer_size=int(current_dataset_size))
    return state
