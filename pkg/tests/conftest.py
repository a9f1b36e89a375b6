"""
Pytest configuration and fixtures.
"""
import json
import math
from pathlib import Path

import factory
import pytest

from spectral_bounds.apps.bounds.models import DomainSummary
from spectral_bounds.apps.geometry.models import BOX, GENERAL, Polytope
from spectral_bounds.apps.harness.models import CampaignConfig

DOMAINS_DIR = Path(__file__).resolve().parent.parent / "domains"


class BoxFactory(factory.Factory):
    """Factory for axis-aligned box polytopes."""

    class Meta:
        model = Polytope

    dimension = 2
    kind = BOX
    lengths = factory.LazyAttribute(lambda obj: (1.0,) * obj.dimension)
    name = factory.Sequence(lambda n: f"box_{n}")
    tiling = True


class PolygonFactory(factory.Factory):
    """Factory for general polygons given as a counter-clockwise vertex loop."""

    class Meta:
        model = Polytope

    dimension = 2
    kind = GENERAL
    vertices = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    faces = factory.LazyAttribute(lambda obj: tuple((i, (i + 1) % len(obj.vertices)) for i in range(len(obj.vertices))))
    name = factory.Sequence(lambda n: f"polygon_{n}")
    tiling = False


class DomainSummaryFactory(factory.Factory):
    """Factory for the unit square summary (fraction 1/3)."""

    class Meta:
        model = DomainSummary

    n = 2
    V = 1.0
    A = 4.0
    I = 1.0 / 6.0  # noqa: E741
    min_d = 1.0 / 3.0
    min_A = 1.0
    B_n = math.pi
    domain_id = "unit_square"
    tiling = True


class CampaignConfigFactory(factory.Factory):
    """Factory for verify campaign configurations."""

    class Meta:
        model = CampaignConfig

    domain_file = str(DOMAINS_DIR / "unit_square.json")
    melas_constant = 1e-3
    k_max = 200
    method = "exact"
    seed = 0


@pytest.fixture
def domains_dir():
    return DOMAINS_DIR


@pytest.fixture
def unit_square():
    return BoxFactory(name="unit_square")


@pytest.fixture
def unit_cube():
    return BoxFactory(dimension=3, name="unit_cube")


@pytest.fixture
def box_123():
    return BoxFactory(dimension=3, lengths=(1.0, 2.0, 3.0), name="box_1_2_3")


@pytest.fixture
def right_triangle():
    return PolygonFactory(name="right_triangle", tiling=True)


@pytest.fixture
def equilateral_triangle():
    return PolygonFactory(vertices=((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0)), name="equilateral")


@pytest.fixture
def l_shape():
    return PolygonFactory(
        vertices=((0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)), name="l_shape"
    )


@pytest.fixture
def tetrahedron():
    return Polytope(
        dimension=3,
        vertices=((1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)),
        faces=((1, 3, 2), (0, 2, 3), (0, 3, 1), (0, 1, 2)),
        name="tetrahedron",
    )


@pytest.fixture
def square_summary():
    return DomainSummaryFactory()


@pytest.fixture
def write_domain(tmp_path):
    """Write a polytope spec payload to a temporary JSON file."""

    def _write(payload, name="domain.json"):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding="utf-8")
        return path

    return _write


@pytest.fixture(autouse=True)
def clear_cache():
    """Clear Django cache around each test."""
    from django.core.cache import cache

    cache.clear()
    yield
    cache.clear()
