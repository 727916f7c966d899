#!/usr/bin/env python3
"""Quick check that the installation works end to end."""

import sys


def test_python_version():
    """Test that Python version is 3.12 or higher."""
    version = sys.version_info
    if version.major == 3 and version.minor >= 12:
        print("✅ Python version is 3.12+")
    else:
        print(f"❌ Python version {version.major}.{version.minor} is not supported. Requires Python 3.12+")
        assert False, f"Python {version.major}.{version.minor} is not supported. Requires Python 3.12+"


def test_imports():
    """Test that all modules can be imported."""
    try:
        from src.app.main import cli  # noqa: F401
        from src.config import settings  # noqa: F401
        from src.generators.figures import produce_figure  # noqa: F401
        from src.physics.analytic import classify_regime  # noqa: F401
        from src.physics.cavity import dpa_windows  # noqa: F401
        from src.physics.integrator import integrate_full  # noqa: F401
        from src.physics.quantum import build_hamiltonian  # noqa: F401
        from src.physics.spectral import fft_spectrum  # noqa: F401
        from src.sweep.engine import run_sweep  # noqa: F401

        print("✅ All imports successful")
    except ImportError as e:
        print(f"❌ Import error: {e}")
        assert False, f"Import error: {e}"


def test_baseline_gain():
    """Test that the baseline difference pump amplifies at about 2π·10 rad/s."""
    try:
        from src.physics.analytic import classify_regime
        from src.physics.model import baseline_system, difference_pump
        from src.schemas import Regime

        cfg = baseline_system(-1)
        report = classify_regime(cfg, difference_pump(cfg))
        assert report.regime is Regime.AMPLIFY
        assert abs(report.gain_rate.re - 62.83) < 0.1, report.gain_rate.re

        print(f"✅ Baseline gain rate {report.gain_rate.re:.4f} rad/s")
    except Exception as e:
        print(f"❌ Gain error: {e}")
        assert False, f"Gain error: {e}"


def test_config():
    """Test configuration loading."""
    try:
        from src.config import settings

        assert settings.jobs >= 1
        assert 6 <= settings.float_digits <= 17

        print(f"✅ Configuration loaded (out_dir={settings.out_dir}, jobs={settings.jobs})")
    except Exception as e:
        print(f"❌ Configuration error: {e}")
        assert False, f"Configuration error: {e}"


def main():
    """Run all checks."""
    print("Testing Parametric Wave Lab installation...")
    print(f"Python version: {sys.version}")
    print("=" * 50)

    tests = [
        test_python_version,
        test_imports,
        test_baseline_gain,
        test_config,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            passed += 1
        except AssertionError as e:
            print(f"❌ Test failed: {e}")
        except Exception as e:
            print(f"❌ Test error: {e}")
        print()

    print("=" * 50)
    print(f"Tests passed: {passed}/{len(tests)}")

    if passed == len(tests):
        print("🎉 All checks passed! The installation is working correctly.")
        return 0
    print("❌ Some checks failed. Please check the errors above.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
