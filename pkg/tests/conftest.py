import numpy as np
import pytest

from robustdoe import load_fixture


@pytest.fixture(scope="session")
def a_designs():
    return {lbl: load_fixture(lbl) for lbl in ("A1", "A2", "A3", "A4")}


@pytest.fixture(scope="session")
def b_designs():
    return {f"B{i}": load_fixture(f"B{i}") for i in range(1, 13)}


@pytest.fixture(scope="session")
def n6():
    return load_fixture("N6")


@pytest.fixture(scope="session")
def full_factorial_2x2():
    from robustdoe import Design

    return Design(np.array([
        [1, 1],
        [1, -1],
        [-1, 1],
        [-1, -1],
    ]), label="2^2")
