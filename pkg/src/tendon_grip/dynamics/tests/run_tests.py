#!/usr/bin/env python3
"""
Run the dynamics tests.

pytest is the default runner; --unittest switches to unittest discovery, which
only picks up the TestCase classes. Extra arguments are passed on to pytest.

    python -m tendon_grip.dynamics.tests.run_tests -k some_test
"""

import argparse
import sys
import unittest
from pathlib import Path

import pytest

TEST_DIR = Path(__file__).parent


def run_tests_unittest() -> int:
    suite = unittest.defaultTestLoader.discover(str(TEST_DIR), pattern="test_*.py")
    result = unittest.TextTestRunner(verbosity=2).run(suite)
    return 0 if result.wasSuccessful() else 1


def run_tests_pytest(extra_args) -> int:
    return int(pytest.main(["-v", str(TEST_DIR), *extra_args]))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Run the dynamics tests")
    parser.add_argument("--unittest", action="store_true", help="Use unittest discovery")
    args, extra_args = parser.parse_known_args(argv)
    if args.unittest:
        return run_tests_unittest()
    return run_tests_pytest(extra_args)


if __name__ == "__main__":
    sys.exit(main())
