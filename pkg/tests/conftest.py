import pytest

import coldplate as cp


@pytest.fixture(scope="session")
def water():
    return cp.water_at_reference()


@pytest.fixture(scope="session")
def copper():
    return cp.get_material("copper")


@pytest.fixture
def primary():
    return cp.primary_side()


@pytest.fixture
def secondary():
    return cp.secondary_side()


def small_assembly(material_name="copper"):
    """Compact double-sided plate with one module; cheap for FV tests."""
    plate = cp.PlateGeometry(length=0.12, width=0.06, thickness=0.012,
                             material=cp.get_material(material_name))
    layout = cp.ChannelLayout(rows=2, channels_per_row=1,
                              channel_length=0.12,
                              shape=cp.Semicircular(radius=0.003),
                              cover_thickness=0.0015, lateral_pitch=0.06)
    dies = (
        cp.DieSource(center=(0.045, 0.03), footprint=(0.01, 0.01), power=50.0),
        cp.DieSource(center=(0.075, 0.03), footprint=(0.01, 0.01), power=50.0),
    )
    module = cp.ModulePlacement(id="M1", face="top", origin=(0.03, 0.015),
                                footprint=(0.06, 0.03), dies=dies)
    return cp.Assembly(plate=plate, layout=layout, modules=(module,))


@pytest.fixture
def small():
    return small_assembly()
