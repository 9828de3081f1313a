""" Configure the tests """

from pathlib import Path
from shutil import rmtree

import numpy as np
import pytest

from mct_hfr.datasim import GenConfig, generate_dataset
from mct_hfr.mct import ModelConfig


TESTING_DIR = Path("test_mct_hfr/tmp")


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run long statistical acceptance tests",
    )


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: long-running statistical acceptance test"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def pytest_sessionstart():
    """
    Create the temporary directory to store the test results
    before running the tests.
    """
    if TESTING_DIR.is_dir():
        rmtree(TESTING_DIR)
    TESTING_DIR.mkdir(parents=True, exist_ok=True)


def pytest_sessionfinish():
    """
    Remove the temporary directory after whole test run finished.
    """
    if TESTING_DIR.is_dir():
        rmtree(TESTING_DIR)


@pytest.fixture()
def temporary_directory():
    """
    Return the path for the temporary directory.
    """
    return TESTING_DIR


@pytest.fixture(name="rng")
def _rng():
    """Return a seeded generator."""
    return np.random.default_rng(1234)


@pytest.fixture(name="tiny_gen_config")
def _tiny_gen_config():
    """
    Return a small dataset configuration with lengths around the tiny
    model's maximum lengths (6, 4, 5).
    """
    return GenConfig(
        classes=3,
        dims=(5, 4, 3),
        length_ranges=((3, 8), (2, 5), (2, 6)),
        max_lengths=(8, 5, 6),
        snr=4.0,
        redundancy=0.5,
        seed=7,
    )


@pytest.fixture(name="tiny_model_config")
def _tiny_model_config():
    """Return the tiny model configuration used for gradient checks."""
    return ModelConfig(
        dims=(5, 4, 3),
        d=8,
        layers=1,
        heads=2,
        d_k=4,
        kernel_sizes=(3, 3, 1),
        max_lengths=(6, 4, 5),
        classes=3,
        ffn_hidden=16,
        dtype="float64",
    )


@pytest.fixture(name="tiny_samples")
def _tiny_samples(tiny_gen_config):
    """Return a small generated dataset."""
    return generate_dataset(tiny_gen_config, 12)
