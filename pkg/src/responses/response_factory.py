# File: src/responses/response_factory.py
from typing import List, Optional

import numpy as np

from responses.base_response import BaseResponse
from responses.perturbed_responses import (CapPermutationResponse, ScoreTiltResponse,
                                           ThresholdJitterResponse, TopTwoResponse)
from responses.threshold_response import ThresholdResponse

PERTURBATIONS = ("cap-permutation", "top-two", "threshold-jitter", "score-tilt")


class ResponseFactory:
    """Factory for creating response families by name"""

    @staticmethod
    def available() -> List[str]:
        return ["threshold", "identity", *PERTURBATIONS]

    @staticmethod
    def create(name: str, d: int, t: float,
               rng: Optional[np.random.Generator] = None, **options) -> BaseResponse:
        """Create the named response family"""
        if name in ("threshold", "identity"):
            return ThresholdResponse(d, t)
        if rng is None:
            rng = np.random.default_rng()
        if name == "cap-permutation":
            return CapPermutationResponse(d, t, rng, **options)
        elif name == "top-two":
            return TopTwoResponse(d, t, **options)
        elif name == "threshold-jitter":
            return ThresholdJitterResponse(d, t, rng, **options)
        elif name == "score-tilt":
            return ScoreTiltResponse(d, t, rng, **options)
        else:
            raise NotImplementedError(f"Response family {name} not supported")

    @staticmethod
    def random_perturbation(d: int, t: float, rng: np.random.Generator) -> BaseResponse:
        """Random member of a random perturbation family"""
        name = PERTURBATIONS[int(rng.integers(len(PERTURBATIONS)))]
        if name == "cap-permutation":
            return ResponseFactory.create(name, d, t, rng, cap_measure=float(rng.uniform(0.01, 0.3)))
        if name == "top-two":
            return ResponseFactory.create(name, d, t, rng, swap_prob=float(rng.uniform(0.05, 1.0)))
        if name == "threshold-jitter":
            return ResponseFactory.create(name, d, t, rng, jitter=float(rng.uniform(0.005, 0.1)))
        return ResponseFactory.create(name, d, t, rng, strength=float(rng.uniform(0.01, 0.3)))
