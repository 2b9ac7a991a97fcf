# File: tests/test_data_models.py
import pytest
import sys
import json
from pathlib import Path

import numpy as np

# Add src to path
project_root = Path(__file__).parent.parent
src_path = project_root / "src"
sys.path.insert(0, str(src_path))

from core.data_models import (NO_CLICK, BoundarySample, ComplexUnitVector, Dimension,
                              ExportedCounts, NoiseParams, OperatorMatrix, Outcome, Threshold,
                              validate_povm)
from core.errors import DimensionMismatchError, JointMeasurabilityError


class TestScalars:
    def test_dimension_rejects_one(self):
        """d = 1 is not a valid dimension"""
        with pytest.raises(ValueError):
            Dimension(1)
        assert Dimension(2) == 2

    def test_noise_params_range(self):
        """eta and p must lie in the unit interval"""
        assert NoiseParams(0.8, 0.6).to_dict() == {"eta": 0.8, "p": 0.6}
        with pytest.raises(ValueError):
            NoiseParams(1.2, 0.5)
        with pytest.raises(ValueError):
            NoiseParams(0.5, -0.1)

    def test_threshold_of(self):
        """Threshold.of passes instances through and validates numbers"""
        threshold = Threshold(0.75)
        assert Threshold.of(threshold) is threshold
        assert float(Threshold.of(0.5)) == 0.5
        with pytest.raises(ValueError):
            Threshold(1.5)


class TestComplexUnitVector:
    def test_normalization_enforced(self):
        """Unnormalized amplitudes are rejected"""
        with pytest.raises(ValueError):
            ComplexUnitVector(np.array([1.0, 1.0]))
        z = ComplexUnitVector.normalized([1.0, 1.0j])
        assert z.moduli_squared == pytest.approx([0.5, 0.5])

    def test_amplitudes_read_only(self):
        """Stored amplitudes cannot be modified in place"""
        z = ComplexUnitVector.basis(0, 3)
        with pytest.raises(ValueError):
            z.amplitudes[0] = 0.0

    def test_projector(self):
        """|z><z| is a rank-one projector"""
        z = ComplexUnitVector.normalized([1.0, 2.0, 2.0j])
        P = z.projector()
        assert np.allclose(P @ P, P)
        assert np.trace(P).real == pytest.approx(1.0)


class TestOperatorMatrix:
    def test_tags_are_checked(self):
        """Tagged constructors certify their property"""
        with pytest.raises(ValueError):
            OperatorMatrix.positive(np.diag([1.0, -1.0]))
        with pytest.raises(ValueError):
            OperatorMatrix.unitary(2 * np.eye(2))
        assert OperatorMatrix.identity(3).is_unitary()

    def test_non_square_rejected(self):
        """Operators must be square"""
        with pytest.raises(DimensionMismatchError):
            OperatorMatrix(np.zeros((2, 3)))

    def test_max_norm_distance(self):
        """Largest entrywise deviation"""
        a = OperatorMatrix(np.eye(2))
        b = OperatorMatrix(np.array([[1.0, 0.25], [0.0, 1.0]]))
        assert a.max_norm_distance(b) == pytest.approx(0.25)
        with pytest.raises(DimensionMismatchError):
            a.max_norm_distance(np.eye(3))


class TestValidatePovm:
    def test_projective_basis(self):
        """{|0><0|, |1><1|} is a POVM"""
        assert validate_povm([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])

    def test_trivial_povm(self):
        """{1/2, 1/2} is a POVM"""
        assert validate_povm([np.eye(2) / 2, np.eye(2) / 2])

    def test_wrong_normalization(self):
        """{1, 1} sums to twice the identity"""
        assert not validate_povm([np.eye(2), np.eye(2)])

    def test_negative_element(self):
        """Elements must be positive semidefinite"""
        assert not validate_povm([np.diag([1.5, 0.0]), np.diag([-0.5, 1.0])])

    def test_shape_mismatch(self):
        """Mixed dimensions raise instead of returning False"""
        with pytest.raises(DimensionMismatchError):
            validate_povm([np.eye(2), np.eye(3)])
        assert issubclass(DimensionMismatchError, JointMeasurabilityError)


class TestOutcomeAndSamples:
    def test_outcome_labels(self):
        """Clicks are labelled by index, the no-click outcome by ø"""
        assert Outcome.click(2, 3).label == "2"
        assert NO_CLICK.is_no_click
        assert NO_CLICK.label == "ø"
        with pytest.raises(ValueError):
            Outcome.click(3, 3)

    def test_boundary_sample_invariant(self):
        """(3/4, 1/2, 3/4) lies on the d = 2 boundary"""
        assert BoundarySample(t=0.75, eta=0.5, p=0.75).satisfies_invariant(2)
        assert not BoundarySample(t=0.75, eta=0.6, p=0.75).satisfies_invariant(2)

    def test_boundary_sample_serialization(self):
        """Dictionary round trip"""
        sample = BoundarySample(t=0.6, eta=0.48, p=0.6)
        assert BoundarySample.from_dict(sample.to_dict()) == sample

    def test_exported_counts_json(self, tmp_path):
        """Counts are written with the ø label"""
        counts = ExportedCounts(d=2, t=0.75, shots=10, counts={"0": 3, "1": 2, "ø": 5},
                                expected={"0": 0.25, "1": 0.25, "ø": 0.5}, chi2=0.4, pvalue=0.8)
        path = tmp_path / "counts.json"
        counts.save(str(path))
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["counts"]["ø"] == 5
        assert set(data) == {"d", "t", "shots", "counts", "expected", "chi2", "pvalue"}
