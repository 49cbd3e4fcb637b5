"""Finite vector-valued time series and their Hankel matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError


@dataclass(frozen=True, eq=False)
class Signal:
    """Samples ``z(first_index), ..., z(last_index)`` of a signal in R^dim.

    ``samples`` has shape ``(length, dim)``; row ``i`` holds
    ``z(first_index + i)``. The array is copied on construction and marked
    read-only.
    """

    samples: np.ndarray
    first_index: int = 0

    def __post_init__(self):
        a = np.array(self.samples, dtype=float)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionError(f"signal samples must have shape (length>=1, dim>=1), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValidationError("signal has non-finite samples")
        a.setflags(write=False)
        object.__setattr__(self, "samples", a)
        object.__setattr__(self, "first_index", int(self.first_index))

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def length(self) -> int:
        return self.samples.shape[0]

    @property
    def last_index(self) -> int:
        return self.first_index + self.length - 1

    def __len__(self) -> int:
        return self.length

    def at(self, t: int) -> np.ndarray:
        """Sample ``z(t)`` using the signal's own time indexing."""
        i = t - self.first_index
        if not 0 <= i < self.length:
            raise DimensionError(f"t={t} outside [{self.first_index}, {self.last_index}]")
        return self.samples[i]

    def window(self, i: int, j: int) -> "Signal":
        """The sub-signal ``z_[i, j]`` (inclusive, absolute indices)."""
        if i > j or i < self.first_index or j > self.last_index:
            raise DimensionError(
                f"window [{i}, {j}] outside [{self.first_index}, {self.last_index}]"
            )
        lo = i - self.first_index
        return Signal(self.samples[lo : lo + j - i + 1], first_index=i)

    def scaled(self, c: float) -> "Signal":
        return Signal(c * self.samples, self.first_index)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Signal):
            return NotImplemented
        return (
            self.first_index == other.first_index
            and self.samples.shape == other.samples.shape
            and bool(np.array_equal(self.samples, other.samples))
        )

    __hash__ = None


def zeros(dim: int, length: int, first_index: int = 0) -> Signal:
    return Signal(np.zeros((length, dim)), first_index)


def hankel(z: Signal, depth: int) -> np.ndarray:
    """Hankel matrix of the given depth: column ``c`` stacks ``z(c), ..., z(c+depth-1)``.

    Shape is ``(depth * dim, length - depth + 1)``.
    """
    if depth < 1:
        raise DimensionError("depth must be a positive integer")
    if depth > z.length:
        raise DimensionError(f"depth {depth} exceeds signal length {z.length}")
    cols = z.length - depth + 1
    windows = np.lib.stride_tricks.sliding_window_view(z.samples, depth, axis=0)
    # windows: (cols, dim, depth) -> (depth*dim, cols), sample-major within a column
    return np.ascontiguousarray(windows.transpose(2, 1, 0).reshape(depth * z.dim, cols))


def stack_state_input(x: Signal, u: Signal) -> np.ndarray:
    """The input/state data matrix ``[H_1(x); H_1(u)]`` of shape ``(n + m, T)``."""
    if x.length != u.length:
        raise DimensionError(f"state length {x.length} != input length {u.length}")
    return np.vstack([hankel(x, 1), hankel(u, 1)])


def shift(z: Signal, offset: int, new_length: int) -> Signal:
    """Copy of ``new_length`` samples starting ``offset`` samples after the first one."""
    if offset < 0 or new_length < 1 or offset + new_length > z.length:
        raise DimensionError(
            f"window offset={offset}, length={new_length} does not fit a signal of length {z.length}"
        )
    start = z.first_index + offset
    return z.window(start, start + new_length - 1)
