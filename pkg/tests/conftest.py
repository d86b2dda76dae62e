import json
from pathlib import Path

import pytest

from sdspec.surface import SurfaceProfile

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.fixture(scope="session")
def frozen():
    return FROZEN


@pytest.fixture(scope="session")
def sphere():
    return SurfaceProfile.sphere()


@pytest.fixture(scope="session")
def tilted():
    """omega = 1 + 0.3 z on [-1, 1], the curved test profile."""
    return SurfaceProfile.from_coefficients(-1.0, 1.0, [1.0, 0.3])


@pytest.fixture(scope="session", params=["sphere", "tilted"])
def profile(request, sphere, tilted):
    return {"sphere": sphere, "tilted": tilted}[request.param]


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call":
                continue
            lines += [v for k, v in rep.user_properties if k == "criterion"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda ln: int(ln.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
