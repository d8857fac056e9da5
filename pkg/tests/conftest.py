import pytest

from congestsim.experiments import uav_manifest
from congestsim.launchzone import generate_layout
from congestsim.maps import builtin_world, building_set
from congestsim.mission import build_mission_plan


@pytest.fixture(scope="session")
def cassidy_world():
    return builtin_world("cassidy-like")


@pytest.fixture(scope="session")
def empty_world():
    return builtin_world("empty")


@pytest.fixture(scope="session")
def desk_ids():
    return building_set("cassidy-desk")


@pytest.fixture(scope="session")
def desk_layout(cassidy_world, desk_ids):
    return generate_layout(cassidy_world, "square", 2.0,
                           uav_manifest(len(desk_ids)), 5, 8)


@pytest.fixture(scope="session")
def desk_plan(cassidy_world, desk_ids):
    return build_mission_plan(cassidy_world, desk_ids, 1)
