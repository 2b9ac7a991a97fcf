# File: tests/test_simple.py
"""Smoke tests: project layout and the numeric stack"""

def test_numeric_stack_imports():
    """numpy, scipy and mpmath are importable"""
    import numpy
    import scipy.stats
    import mpmath
    assert numpy is not None
    assert scipy.stats is not None
    assert mpmath.mp.dps >= 15

def test_project_structure():
    """Test that we can find project files"""
    from pathlib import Path

    project_root = Path(__file__).parent.parent

    src_dir = project_root / "src"
    assert src_dir.exists(), f"src directory not found at {src_dir}"

    for module in ("core/closed_form.py", "core/region.py", "core/measurement.py",
                   "analyzers/mc_oracle.py", "responses/response_factory.py", "main.py"):
        assert (src_dir / module).exists(), f"{module} not found under {src_dir}"

def test_data_models_import():
    """Test that we can import our data models"""
    import sys
    from pathlib import Path

    project_root = Path(__file__).parent.parent
    src_path = project_root / "src"
    sys.path.insert(0, str(src_path))

    try:
        from core.data_models import BoundarySample, NoiseParams
        assert BoundarySample is not None
        assert NoiseParams is not None
    except ImportError as e:
        print(f"Import error: {e}")
        print(f"Python path: {sys.path}")
        print(f"Src path: {src_path}")
        raise

def test_boundary_endpoint():
    """t = 0 gives eta = 1 and p = 1/2 for qubits"""
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

    from core.closed_form import boundary_point

    sample = boundary_point(2, 0)
    assert sample.eta == 1.0
    assert sample.p == 0.5
