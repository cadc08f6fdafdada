import math

import numpy as np
import pytest
from hypothesis import settings

from conelab import PolyhedralCone, catalog

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def closed_form_1d(x, yc, k=0.0, beta=None, gamma=0):
    """Transform of ``D^gamma [e^{k xi} g]`` on [0, inf) with g = 1 or g = e^{-beta xi}.

    ``int_0^inf xi^gamma e^{-a xi} dxi = gamma! / a^(gamma+1)`` with
    ``a = yc - k + beta + i x``, times ``(2 pi)^-1 (-i)^gamma z^gamma``.
    """
    z = x - 1j * yc
    a = yc - k + (beta or 0.0) + 1j * x
    return (2 * math.pi) ** -1 * (-1j) ** gamma * z**gamma / a


def random_cone(rng: np.random.Generator, n: int) -> PolyhedralCone:
    """Pointed cone: random generators rotated into a half-space around a random axis."""
    if n == 1:
        return PolyhedralCone([[rng.choice([-1.0, 1.0])]])
    m = int(rng.integers(n, n + 3))
    axis = rng.standard_normal(n)
    axis /= np.linalg.norm(axis)
    g = rng.standard_normal((m, n))
    g -= np.outer(g @ axis, axis)
    g += np.outer(rng.uniform(0.3, 2.0, m), axis)
    return PolyhedralCone(g)


@pytest.fixture(scope="session")
def cat1():
    return catalog(1)


@pytest.fixture(scope="session")
def cat2():
    return catalog(2)


# --- acceptance summary -------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``criterion(k, ok, detail)`` records one summary line and returns ``ok``."""

    def record(k: int, ok: bool, detail: str) -> bool:
        line = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[k] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
