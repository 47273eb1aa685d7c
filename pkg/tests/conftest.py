import numpy as np
import pytest

from decksym.expr import parse_system
from decksym.monodromy import MonodromyConfig, run_monodromy, seed_from_linear_params

EX41_TEXT = "unknowns x; parameters p; equations x^2 + p*x + 1;"
EX42_TEXT = "unknowns x, y; parameters p; equations x^2 + x + p; x + y + p;"
SEXTIC_TEXT = (
    "unknowns x; parameters a, b, c, d;"
    "equations a*x^6 + b*x^5 + c*x^4 + d*x^3 + c*x^2 + b*x + a;"
)
EX57_TEXT = """
unknowns x1, x2, x3, x4; parameters p1, p2, p3;
equations
2*x1^2 + 1;
x2 + 2*x1*x3 + p1;
3*x3^2 + x4^2 - 4*p1*x1*x3 - 2*p2;
x1*x3^3 + 3*x1*x3*x4^2 + p1*x3^2 + p1*x4^2 - 2*p2*x1*x3 - 2*p3;
"""


def ex57_seed():
    """Point on the component x1 = -i/sqrt(2) from three chosen cubic roots."""
    r = np.array([0.7, -1.3, 2.1])
    p = np.array(
        [-(r[0] + r[1] + r[2]), r[0] * r[1] + r[0] * r[2] + r[1] * r[2], -r[0] * r[1] * r[2]],
        dtype=complex,
    )
    x1 = -1j / np.sqrt(2)
    x = np.array([x1, r[0], (r[1] + r[2]) / (2 * x1), (r[1] - r[2]) / (2 * x1)])
    return x, p


def run_fixture_monodromy(text, degree, seed_rng, x_star="random", seed_pair=None):
    system = parse_system(text)
    rng = np.random.default_rng(seed_rng)
    cfg = MonodromyConfig(expected_degree=degree)
    if seed_pair is None:
        seed_pair = seed_from_linear_params(system, x_star, rng)
    result = run_monodromy(system, seed_pair, cfg, rng)
    return system, result, cfg, rng


@pytest.fixture(scope="session")
def mono41():
    return run_fixture_monodromy(EX41_TEXT, 2, 0, np.array([2.0 + 0j]))


@pytest.fixture(scope="session")
def mono42():
    return run_fixture_monodromy(EX42_TEXT, 2, 1, np.array([1.0 + 0j, 1.0 + 0j]))


@pytest.fixture(scope="session")
def mono_sextic():
    return run_fixture_monodromy(SEXTIC_TEXT, 6, 2)


@pytest.fixture(scope="session")
def mono_ex57():
    return run_fixture_monodromy(EX57_TEXT, 6, 3, seed_pair=ex57_seed())
