# File: src/core/errors.py
"""Exception hierarchy for the joint-measurability toolkit"""


class JointMeasurabilityError(Exception):
    """Base class for all domain errors"""


class DimensionMismatchError(JointMeasurabilityError, ValueError):
    """Operators, states or vectors of incompatible dimension"""


class DegenerateEndpointError(JointMeasurabilityError, ValueError):
    """Boundary point requested at t = 1, where eta = 0 and p is undefined"""


class MonotonicityViolationError(JointMeasurabilityError, RuntimeError):
    """p(t) failed the strict-increase check; root-finding must not guess"""


class CalibrationError(JointMeasurabilityError, RuntimeError):
    """A perturbed response family missed its target efficiency"""


class DegenerateMixtureError(JointMeasurabilityError, ValueError):
    """Mixture of two never-clicking measurements: the visibility is undefined"""
