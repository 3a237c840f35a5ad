"""Learning-rate schedules.

Two schedules are supported:

- Exponential: lr(step) = init * (1 - decay/100)^step, step >= 0. The
  decay constant is divided by 100 inside the formula, so the default
  decay of 15e-4 gives a per-step factor of 0.999985.
- WarmupInverseSqrt: lr(step) = dim^-0.5 * min(step^-0.5,
  step * warmup^-1.5), step >= 1; linear ramp up to the warmup step,
  inverse square root decay after it, maximum exactly at step = warmup.

`lr_at` is the pure schedule function. `lr_for_update` maps the training
loop's 1-based update counter onto it (update 1 of the exponential
schedule runs at the initial rate).
"""

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class Exponential:
    init: float = 1e-4
    decay: float = 15e-4

    def lr_at(self, step: int) -> float:
        if step < 0:
            raise ValueError("step must be >= 0")
        return self.init * (1.0 - self.decay / 100.0) ** step

    def lr_for_update(self, update: int) -> float:
        return self.lr_at(update - 1)

    def to_dict(self) -> dict:
        return {"kind": "exponential", "init": self.init, "decay": self.decay}


@dataclass(frozen=True)
class WarmupInverseSqrt:
    warmup_steps: int = 4000
    model_dim: int = 512

    def lr_at(self, step: int) -> float:
        if step < 1:
            raise ValueError("step must be >= 1")
        return self.model_dim**-0.5 * min(
            step**-0.5, step * self.warmup_steps**-1.5
        )

    def lr_for_update(self, update: int) -> float:
        return self.lr_at(update)

    def to_dict(self) -> dict:
        return {
            "kind": "warmup_inverse_sqrt",
            "warmup_steps": self.warmup_steps,
            "model_dim": self.model_dim,
        }


Schedule = Exponential | WarmupInverseSqrt


def schedule_from_dict(data: dict) -> Schedule:
    kind = data.get("kind")
    if kind == "exponential":
        return Exponential(init=data["init"], decay=data["decay"])
    if kind == "warmup_inverse_sqrt":
        return WarmupInverseSqrt(
            warmup_steps=data["warmup_steps"], model_dim=data["model_dim"]
        )
    raise ValueError(f"unknown schedule kind {kind!r}")


def schedule_from_json(text: str) -> Schedule:
    return schedule_from_dict(json.loads(text))
