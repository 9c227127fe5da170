import pytest

from latticelab import nerve, presets, smallness


@pytest.fixture(scope="session")
def sl2z():
    return presets.sl2z()


@pytest.fixture(scope="session")
def a5_group():
    return smallness.icosahedral_rotation_group()


@pytest.fixture(scope="session")
def octagon_surface():
    """(group, metric) for the genus-2 octagon quotient; the deck-set BFS is
    the expensive part, so build it once per session."""
    group = presets.octagon_genus2()
    metric = nerve.SurfaceMetric(
        group,
        presets.octagon_center(),
        region_radius=presets.octagon_circumradius(),
        interaction_radius=1.25,
        slack=5.0,
    )
    return group, metric
