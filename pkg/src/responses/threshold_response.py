# File: src/responses/threshold_response.py
from typing import Optional

import numpy as np

from core.data_models import NO_CLICK, ComplexUnitVector, OperatorMatrix, Outcome, Threshold
from responses.base_response import NO_CLICK_INDEX, BaseResponse
from utils.config_manager import TOLERANCES


class ThresholdResponse(BaseResponse):
    """Closest basis state if its overlap reaches t, no click otherwise.

    Ties go to the lowest index (np.argmax); they have measure zero. The
    overlap is compared with t up to the normalization tolerance, so an
    exact tie with t survives rounding of |z_k|^2.
    """

    name = "threshold"

    def _assign(self, W: np.ndarray, moduli: np.ndarray,
                rng: Optional[np.random.Generator]) -> np.ndarray:
        outcomes = np.argmax(moduli, axis=1)
        top = moduli[np.arange(moduli.shape[0]), outcomes]
        return np.where(top >= self.t - TOLERANCES["normalization"], outcomes, NO_CLICK_INDEX)


def response(z: ComplexUnitVector, t, U: Optional[OperatorMatrix] = None) -> Outcome:
    """Deterministic outcome of a single parent outcome z.

    Reads the overlaps |(U z)_k|^2, i.e. the basis M_{k|U} = U^dagger |k><k| U,
    so measuring rho in U has the statistics of U rho U^dagger in the
    computational basis. U defaults to the identity.
    """
    threshold = Threshold.of(t)
    rule = ThresholdResponse(z.dim, float(threshold))
    index = int(rule.assign(z.amplitudes[np.newaxis, :], U)[0])
    return NO_CLICK if index == NO_CLICK_INDEX else Outcome.click(index, z.dim)
