# File: src/responses/base_response.py
from abc import ABC, abstractmethod
from typing import Optional
import logging

import numpy as np

from core.data_models import Dimension, OperatorMatrix

NO_CLICK_INDEX = -1


class BaseResponse(ABC):
    """Abstract post-processing of the covariant parent POVM.

    Maps parent outcomes z (rows of an (n, d) array) to click indices,
    with NO_CLICK_INDEX standing for the no-click outcome.
    """

    name = "base"
    needs_calibration = False

    def __init__(self, d: int, t: float):
        self.d = Dimension(d)
        self.t = float(t)
        self.logger = logging.getLogger(self.__class__.__name__)

    def assign(self, Z: np.ndarray, U: Optional[OperatorMatrix] = None,
               rng: Optional[np.random.Generator] = None) -> np.ndarray:
        """Outcome index per row of Z, measured in basis U (identity if None)"""
        Z = np.atleast_2d(Z)
        if Z.shape[1] != self.d:
            raise ValueError(f"expected vectors of length {self.d}, got {Z.shape[1]}")
        W = Z if U is None else Z @ OperatorMatrix.unitary(U).entries.T
        moduli = np.abs(W) ** 2
        return self._assign(W, moduli, rng)

    @abstractmethod
    def _assign(self, W: np.ndarray, moduli: np.ndarray,
                rng: Optional[np.random.Generator]) -> np.ndarray:
        """Outcome indices given basis-rotated vectors and their moduli squared"""
        pass

    def calibrate(self, target_eta: float, Z: np.ndarray):
        """Adjust the family so its click probability on Z matches target_eta"""
        pass

    def describe(self) -> str:
        return self.name
