# File: src/responses/perturbed_responses.py
"""Response families that deviate from the threshold rule at fixed efficiency.

Cap permutations and top-two randomization leave the no-click region
untouched, so their efficiency is exact.  Jittered thresholds and tilted
scores reshape the no-click region and are recalibrated on an independent
sample before use.
"""

from typing import Optional

import numpy as np

from core.errors import CalibrationError
from responses.base_response import NO_CLICK_INDEX, BaseResponse
from responses.threshold_response import ThresholdResponse


def _random_direction(d: int, rng: np.random.Generator) -> np.ndarray:
    w = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return w / np.linalg.norm(w)


class CapPermutationResponse(ThresholdResponse):
    """Clicks inside a random spherical cap are relabelled by a cyclic shift.

    The cap {|<w|z>|^2 >= c} has measure (1-c)^(d-1) under the invariant
    measure, which fixes c from the requested cap measure.
    """

    name = "cap-permutation"

    def __init__(self, d: int, t: float, rng: np.random.Generator,
                 cap_measure: float = 0.1, shift: Optional[int] = None,
                 direction: Optional[np.ndarray] = None):
        super().__init__(d, t)
        if not 0 < cap_measure <= 1:
            raise ValueError(f"cap measure must lie in (0, 1], got {cap_measure}")
        self.cap_measure = cap_measure
        self.cap_level = 1.0 - cap_measure ** (1.0 / (self.d - 1))
        self.direction = _random_direction(self.d, rng) if direction is None else \
            np.asarray(direction, dtype=complex) / np.linalg.norm(direction)
        self.shift = int(rng.integers(1, self.d)) if shift is None else shift % self.d

    def _assign(self, W, moduli, rng):
        outcomes = super()._assign(W, moduli, rng)
        in_cap = np.abs(W @ self.direction.conj()) ** 2 >= self.cap_level
        relabel = in_cap & (outcomes != NO_CLICK_INDEX)
        outcomes[relabel] = (outcomes[relabel] + self.shift) % self.d
        return outcomes

    def describe(self) -> str:
        return f"{self.name}(measure={self.cap_measure:g}, shift={self.shift})"


class TopTwoResponse(ThresholdResponse):
    """With probability swap_prob a click reports the runner-up component"""

    name = "top-two"

    def __init__(self, d: int, t: float, swap_prob: float = 0.5):
        super().__init__(d, t)
        if not 0 <= swap_prob <= 1:
            raise ValueError(f"swap probability must lie in [0, 1], got {swap_prob}")
        self.swap_prob = swap_prob

    def _assign(self, W, moduli, rng):
        if rng is None:
            raise ValueError("top-two randomization needs a random generator")
        outcomes = super()._assign(W, moduli, rng)
        runner_up = np.argsort(moduli, axis=1, kind="stable")[:, -2]
        swap = (rng.random(outcomes.shape[0]) < self.swap_prob) & (outcomes != NO_CLICK_INDEX)
        outcomes[swap] = runner_up[swap]
        return outcomes

    def describe(self) -> str:
        return f"{self.name}(swap={self.swap_prob:.3g})"


class _CalibratedScoreResponse(BaseResponse):
    """Click on argmax when a score clears a level fitted to the target efficiency"""

    needs_calibration = True

    def __init__(self, d: int, t: float):
        super().__init__(d, t)
        self.level: Optional[float] = None

    def _score(self, W, moduli, outcomes) -> np.ndarray:
        raise NotImplementedError

    def calibrate(self, target_eta: float, Z: np.ndarray):
        Z = np.atleast_2d(Z)
        moduli = np.abs(Z) ** 2
        outcomes = np.argmax(moduli, axis=1)
        scores = self._score(Z, moduli, outcomes)
        if not 0 < target_eta < 1:
            raise CalibrationError(f"cannot calibrate to efficiency {target_eta}")
        self.level = float(np.quantile(scores, 1.0 - target_eta))
        self.logger.debug(f"{self.describe()} calibrated to level {self.level:.6g}")

    def _assign(self, W, moduli, rng):
        if self.level is None:
            raise CalibrationError(f"{self.name} used before calibration")
        outcomes = np.argmax(moduli, axis=1)
        scores = self._score(W, moduli, outcomes)
        return np.where(scores >= self.level, outcomes, NO_CLICK_INDEX)


class ThresholdJitterResponse(_CalibratedScoreResponse):
    """Per-outcome threshold offsets; a common shift restores the efficiency"""

    name = "threshold-jitter"

    def __init__(self, d: int, t: float, rng: np.random.Generator, jitter: float = 0.05):
        super().__init__(d, t)
        self.jitter = jitter
        self.offsets = rng.uniform(-jitter, jitter, size=self.d)

    def _score(self, W, moduli, outcomes):
        top = moduli[np.arange(moduli.shape[0]), outcomes]
        return top - self.offsets[outcomes]

    def describe(self) -> str:
        return f"{self.name}(jitter={self.jitter:.3g})"


class ScoreTiltResponse(_CalibratedScoreResponse):
    """No-click region decided by max_k |z_k|^2 tilted towards a random direction"""

    name = "score-tilt"

    def __init__(self, d: int, t: float, rng: np.random.Generator, strength: float = 0.1):
        super().__init__(d, t)
        self.strength = strength
        self.direction = _random_direction(self.d, rng)

    def _score(self, W, moduli, outcomes):
        top = moduli[np.arange(moduli.shape[0]), outcomes]
        return top + self.strength * np.abs(W @ self.direction.conj()) ** 2

    def describe(self) -> str:
        return f"{self.name}(strength={self.strength:.3g})"
