"""Learning-rate decay and the recorded training hyperparameters.

No training loop exists in this package; the constants below document the
reference setup so downstream trainers can reproduce it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

OPTIMIZER = "adam"
INITIAL_LR = 1e-3
EPOCHS = 310
BATCH_SIZE = 32


@dataclass(frozen=True)
class LrSchedule:
    A: float = INITIAL_LR  # initial rate
    B: float = 5000.0      # decay constant, in iterations
    C: float = 1e-5        # floor
    decay_start: int = 0

    def __post_init__(self) -> None:
        if not (self.A >= self.C > 0 and self.B > 0):
            raise ValueError("LrSchedule needs A >= C > 0 and B > 0")


def lr_at(iteration: int, s: LrSchedule = LrSchedule()) -> float:
    """max(C, A * exp(-(iteration - decay_start) / B)), held at A before decay_start."""
    if iteration < 0:
        raise ValueError("iteration must be non-negative")
    if iteration < s.decay_start:
        return s.A
    return max(s.C, s.A * math.exp(-(iteration - s.decay_start) / s.B))
