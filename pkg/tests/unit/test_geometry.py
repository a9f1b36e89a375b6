"""
Unit tests for the geometry app.
"""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import settings as hypothesis_settings
from hypothesis import strategies as st

from spectral_bounds.apps.core.exceptions import (
    ConfigError,
    DecompositionError,
    DomainError,
    InvalidGeometryError,
)
from spectral_bounds.apps.geometry.decomposition import face_decomposition, largest_margin
from spectral_bounds.apps.geometry.models import BOX, Polytope
from spectral_bounds.apps.geometry.repositories import JsonFilePolytopeRepository
from spectral_bounds.apps.geometry.services import (
    EXACT_BOX,
    EXACT_TRIANGLE,
    boundary_distance_along_axis,
    centroid,
    contains,
    contains_points,
    detect_exact_oracle,
    face_areas,
    moment_of_inertia,
    surface_area,
    unit_ball_volume,
    volume,
)

ALL_SHAPES = ["unit_square", "unit_cube", "box_123", "right_triangle", "equilateral_triangle", "l_shape", "tetrahedron"]
POLYGONS = ["unit_square", "right_triangle", "equilateral_triangle", "l_shape"]
MONTE_CARLO_SAMPLES = 1_000_000
BOUNDARY_SAMPLES = 10_000


def _to_segment(points, a, b):
    """Exact distance from each point to the segment [a, b]."""
    edge = b - a
    t = np.clip((points - a) @ edge / (edge @ edge), 0.0, 1.0)
    return np.linalg.norm(points - (a + t[:, None] * edge), axis=1)


def _sample_segments(segments, total):
    per_segment = max(total // len(segments), 2)
    t = np.linspace(0.0, 1.0, per_segment)[:, None]
    return np.concatenate([a + t * (b - a) for a, b in segments])


def _sampled_face_distance(polygon, face_index, patches):
    """Smallest distance between dense samples of the patches and of the other faces.

    Samples on each side are measured exactly against the segments of the other side, so the
    minimum is attained whenever the closest pair has an endpoint on either side.
    """
    patch_segments = [(patch.vertices[0], patch.vertices[1]) for patch in patches]
    other_segments = [
        (polygon.vertices[a], polygon.vertices[b]) for index, (a, b) in enumerate(polygon.faces) if index != face_index
    ]
    patch_points = _sample_segments(patch_segments, BOUNDARY_SAMPLES)
    other_points = _sample_segments(other_segments, BOUNDARY_SAMPLES)
    from_patches = min(_to_segment(patch_points, a, b).min() for a, b in other_segments)
    from_others = min(_to_segment(other_points, a, b).min() for a, b in patch_segments)
    return min(from_patches, from_others)


class TestMeasures:
    """Test cases for volume, face areas and moment of inertia."""

    def test_box_volumes(self, unit_square, box_123):
        """Test box volumes are the product of the sides."""
        assert volume(unit_square) == 1.0
        assert volume(box_123) == 6.0

    def test_equilateral_triangle_volume(self, equilateral_triangle):
        """Test the area of the unit equilateral triangle."""
        assert volume(equilateral_triangle) == pytest.approx(math.sqrt(3.0) / 4.0, rel=1e-12)

    def test_surface_areas(self, unit_square, unit_cube, equilateral_triangle):
        """Test boundary measures of square, cube and triangle."""
        assert surface_area(unit_square) == 4.0
        assert surface_area(unit_cube) == 6.0
        assert surface_area(equilateral_triangle) == pytest.approx(3.0, rel=1e-12)

    def test_face_areas(self, unit_square, box_123, right_triangle):
        """Test per-face measures in face order."""
        assert face_areas(unit_square) == [1.0, 1.0, 1.0, 1.0]
        assert face_areas(box_123) == pytest.approx([6.0, 6.0, 3.0, 3.0, 2.0, 2.0])
        assert face_areas(right_triangle) == pytest.approx([1.0, math.sqrt(2.0), 1.0])

    def test_moment_of_inertia(self, unit_square, unit_cube):
        """Test I = 1/6 for the square and 1/4 for the cube."""
        assert moment_of_inertia(unit_square) == pytest.approx(1.0 / 6.0)
        assert moment_of_inertia(unit_cube) == pytest.approx(0.25)

    def test_general_and_box_forms_agree(self, box_123):
        """Test the explicit polyhedron of a box has the same measures."""
        general = box_123.as_general()
        assert volume(general) == pytest.approx(6.0, rel=1e-12)
        assert sorted(face_areas(general)) == pytest.approx(sorted(face_areas(box_123)))
        assert moment_of_inertia(general) == pytest.approx(moment_of_inertia(box_123), rel=1e-12)
        assert centroid(general) == pytest.approx([0.5, 1.0, 1.5])

    def test_tetrahedron_measures(self, tetrahedron):
        """Test volume, surface and centroid of the regular tetrahedron."""
        # Regular tetrahedron of edge 2√2 inscribed in the cube [-1, 1]³
        assert volume(tetrahedron) == pytest.approx(8.0 / 3.0, rel=1e-12)
        assert surface_area(tetrahedron) == pytest.approx(4.0 * math.sqrt(3.0) / 4.0 * 8.0, rel=1e-12)
        assert centroid(tetrahedron) == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)

    @pytest.mark.parametrize("shape", ALL_SHAPES)
    def test_isoperimetric_inequality(self, request, shape):
        """Test |∂Ω|ⁿ > nⁿ·B_n·|Ω|ⁿ⁻¹, strict for polytopes."""
        polytope = request.getfixturevalue(shape)
        n = polytope.dimension
        assert surface_area(polytope) ** n > n**n * unit_ball_volume(n) * volume(polytope) ** (n - 1)

    @pytest.mark.parametrize("shape", ["right_triangle", "equilateral_triangle", "l_shape", "tetrahedron"])
    def test_volume_against_monte_carlo(self, request, shape):
        """Test volume within three standard errors of rejection sampling."""
        polytope = request.getfixturevalue(shape)
        lo, hi = polytope.bounding_box()
        box_volume = float(np.prod(hi - lo))
        points = np.random.default_rng(11).uniform(lo, hi, size=(MONTE_CARLO_SAMPLES, polytope.dimension))

        samples = box_volume * contains_points(polytope, points).astype(float)
        sigma = samples.std(ddof=1) / math.sqrt(len(samples))
        assert abs(samples.mean() - volume(polytope)) <= 3.0 * sigma

    @pytest.mark.parametrize("shape", ["l_shape", "right_triangle", "tetrahedron"])
    def test_moment_against_monte_carlo(self, request, shape):
        """Test the moment of inertia within three standard errors of rejection sampling."""
        polytope = request.getfixturevalue(shape)
        lo, hi = polytope.bounding_box()
        box_volume = float(np.prod(hi - lo))
        points = np.random.default_rng(7).uniform(lo, hi, size=(MONTE_CARLO_SAMPLES, polytope.dimension))

        inside = contains_points(polytope, points)
        samples = box_volume * inside * np.sum((points - centroid(polytope)) ** 2, axis=1)
        sigma = samples.std(ddof=1) / math.sqrt(len(samples))
        assert abs(samples.mean() - moment_of_inertia(polytope)) <= 3.0 * sigma

    @given(scale=st.floats(min_value=0.1, max_value=10.0))
    @hypothesis_settings(max_examples=25, deadline=None)
    def test_scaling_laws(self, scale):
        """Test volume, surface and inertia scale as t², t and t⁴."""
        triangle = Polytope(dimension=2, vertices=((0, 0), (1, 0), (0, 1)), faces=((0, 1), (1, 2), (2, 0)))
        scaled = triangle.scaled(scale)
        assert volume(scaled) == pytest.approx(scale**2 * volume(triangle), rel=1e-9)
        assert surface_area(scaled) == pytest.approx(scale * surface_area(triangle), rel=1e-9)
        assert moment_of_inertia(scaled) == pytest.approx(scale**4 * moment_of_inertia(triangle), rel=1e-9)

    @given(offset=st.tuples(*[st.floats(min_value=-50.0, max_value=50.0)] * 3))
    @hypothesis_settings(max_examples=25, deadline=None)
    def test_translation_invariance(self, offset):
        """Test volume and inertia do not depend on position."""
        tetra = Polytope(
            dimension=3,
            vertices=((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)),
            faces=((0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)),
        )
        moved = tetra.translated(offset)
        assert volume(moved) == pytest.approx(volume(tetra), rel=1e-9)
        assert moment_of_inertia(moved) == pytest.approx(moment_of_inertia(tetra), rel=1e-6)


class TestUnitBallVolume:
    """Test cases for unit_ball_volume."""

    @pytest.mark.parametrize(
        "n, expected", [(1, 2.0), (2, math.pi), (3, 4.0 * math.pi / 3.0), (4, math.pi**2 / 2.0)]
    )
    def test_known_values(self, n, expected):
        """Test B_n for the first four dimensions."""
        assert unit_ball_volume(n) == pytest.approx(expected, rel=1e-12)

    def test_rejects_zero_dimension(self):
        """Test n = 0 raises DomainError."""
        with pytest.raises(DomainError):
            unit_ball_volume(0)


class TestPolytopeValidation:
    """Test cases for polytope construction."""

    def test_inverted_orientation_rejected(self):
        """Test a clockwise polygon is rejected."""
        with pytest.raises(InvalidGeometryError):
            Polytope(dimension=2, vertices=((0, 0), (0, 1), (1, 0)), faces=((0, 1), (1, 2), (2, 0)))

    def test_open_boundary_rejected(self):
        """Test a boundary that does not close is rejected."""
        with pytest.raises(InvalidGeometryError):
            Polytope(dimension=2, vertices=((0, 0), (1, 0), (0, 1)), faces=((0, 1), (1, 2)))

    def test_degenerate_rejected(self):
        """Test collinear vertices are rejected."""
        with pytest.raises(InvalidGeometryError):
            Polytope(dimension=2, vertices=((0, 0), (1, 0), (2, 0)), faces=((0, 1), (1, 2), (2, 0)))

    def test_box_requires_positive_sides(self):
        """Test a zero side is rejected."""
        with pytest.raises(InvalidGeometryError):
            Polytope(dimension=2, kind=BOX, lengths=(1.0, 0.0))

    def test_tetrahedron_with_flipped_face_rejected(self):
        """Test an inward-facing triangle is rejected."""
        with pytest.raises(InvalidGeometryError):
            Polytope(
                dimension=3,
                vertices=((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)),
                faces=((0, 1, 2), (0, 1, 3), (0, 3, 2), (1, 2, 3)),
            )


class TestContains:
    """Test cases for point containment."""

    def test_unit_square(self, unit_square):
        """Test the boundary is outside the open square."""
        assert contains(unit_square, [0.5, 0.5])
        assert not contains(unit_square, [1.0, 0.5])

    def test_l_shape_removed_quadrant(self, l_shape):
        """Test the missing quadrant and the reflex edges."""
        assert not contains(l_shape, [1.5, 1.5])
        assert contains(l_shape, [0.5, 1.5])
        assert not contains(l_shape, [1.0, 1.5])

    def test_tetrahedron(self, tetrahedron):
        """Test the center, an outside point and a vertex."""
        assert contains(tetrahedron, [0.0, 0.0, 0.0])
        assert not contains(tetrahedron, [0.9, 0.9, -0.9])
        assert not contains(tetrahedron, [1.0, 1.0, 1.0])

    def test_general_box_matches_box(self, box_123):
        """Test both representations of a box agree on random points."""
        rng = np.random.default_rng(3)
        points = rng.uniform(-0.5, 3.5, size=(2000, 3))
        assert np.array_equal(contains_points(box_123, points), contains_points(box_123.as_general(), points))

    def test_boundary_distance_along_axis(self, right_triangle):
        """Test axis rays against the legs and the hypotenuse."""
        points = np.array([[0.25, 0.25], [0.5, 0.25]])
        assert boundary_distance_along_axis(right_triangle, points, 0, 1) == pytest.approx([0.5, 0.25])
        assert boundary_distance_along_axis(right_triangle, points, 1, -1) == pytest.approx([0.25, 0.25])


class TestFaceDecomposition:
    """Test cases for face_decomposition."""

    def test_unit_square(self, unit_square):
        """Test the middle-third patches of the square sit 1/3 from the other sides."""
        decomposition = face_decomposition(unit_square, 1.0 / 3.0)
        assert len(decomposition) == 4
        assert decomposition.min_distance == pytest.approx(1.0 / 3.0, rel=1e-9)
        for face in decomposition.faces:
            assert face.patch_area_total >= face.face_area / 3.0 - 1e-12
            assert face.distance == pytest.approx(1.0 / 3.0, rel=1e-9)

    def test_unit_square_as_polygon(self, unit_square):
        """Test the polygon path reproduces the box closed form."""
        decomposition = face_decomposition(unit_square.as_general(), 1.0 / 3.0)
        assert decomposition.distances == pytest.approx([1.0 / 3.0] * 4, rel=1e-9)

    @pytest.mark.parametrize("shape", POLYGONS)
    def test_distances_match_dense_boundary_sampling(self, request, shape):
        """Test every d_i against the minimum over dense samples of patches and remaining faces."""
        polytope = request.getfixturevalue(shape)
        decomposition = face_decomposition(polytope)
        polygon = polytope.as_general()
        for face in decomposition.faces:
            sampled = _sampled_face_distance(polygon, face.face_index, face.patches)
            assert face.distance == pytest.approx(sampled, abs=1e-9)

    def test_box_123_margins(self, box_123):
        """Test box margins and face areas against hand values."""
        decomposition = face_decomposition(box_123, 1.0 / 3.0)
        expected = [0.5, 0.5, 1.0 - math.sqrt(0.5), 1.0 - math.sqrt(0.5), 0.2713, 0.2713]
        assert decomposition.distances == pytest.approx(expected, abs=1e-4)
        assert decomposition.min_distance == pytest.approx(0.2713, abs=1e-4)
        assert decomposition.face_areas == pytest.approx([6.0, 6.0, 3.0, 3.0, 2.0, 2.0])

    def test_box_polyhedron_matches_closed_form(self, box_123):
        """Test the polyhedron path agrees with the box closed form."""
        closed = face_decomposition(box_123)
        general = face_decomposition(box_123.as_general())
        assert general.min_distance == pytest.approx(closed.min_distance, rel=1e-3)

    def test_l_shape_reflex_corner(self, l_shape):
        """Test the reflex corner still gives positive distances."""
        decomposition = face_decomposition(l_shape)
        assert decomposition.min_distance > 0
        assert decomposition.min_face_area == pytest.approx(1.0)

    def test_tetrahedron(self, tetrahedron):
        """Test each tetrahedron face keeps a third of its area."""
        decomposition = face_decomposition(tetrahedron)
        assert len(decomposition) == 4
        assert all(face.patch_area_total >= face.face_area / 3.0 * (1 - 1e-6) for face in decomposition.faces)
        assert decomposition.min_distance > 0

    def test_fraction_out_of_range(self, unit_square):
        """Test fraction 1 raises DomainError."""
        with pytest.raises(DomainError):
            face_decomposition(unit_square, 1.0)

    def test_fraction_near_one_fails(self, unit_square, settings):
        """Test a vanishing margin raises DecompositionError for the first face."""
        settings.DECOMPOSITION_MIN_MARGIN = 1e-3
        with pytest.raises(DecompositionError) as excinfo:
            face_decomposition(unit_square, 1.0 - 1e-6)
        assert excinfo.value.face_index == 0

    def test_largest_margin_bisection(self):
        """Test bisection finds the margin of a linear area law."""
        margin = largest_margin(lambda d: 1.0 - 2.0 * d, 1.0 / 3.0, 0.5, 64)
        assert margin == pytest.approx(1.0 / 3.0, rel=1e-12)


class TestExactOracleDetection:
    """Test cases for detect_exact_oracle."""

    def test_box(self, box_123):
        """Test boxes report their sides."""
        assert detect_exact_oracle(box_123) == (EXACT_BOX, (1.0, 2.0, 3.0))

    def test_rectangle_polygon(self, unit_square):
        """Test an axis-aligned rectangle polygon is recognized."""
        kind, extents = detect_exact_oracle(unit_square.as_general())
        assert kind == EXACT_BOX
        assert extents == pytest.approx((1.0, 1.0))

    def test_equilateral_triangle(self, equilateral_triangle):
        """Test the equilateral triangle reports its side."""
        kind, (side,) = detect_exact_oracle(equilateral_triangle)
        assert kind == EXACT_TRIANGLE
        assert side == pytest.approx(1.0)

    def test_l_shape_has_no_oracle(self, l_shape):
        """Test the L has no closed form."""
        assert detect_exact_oracle(l_shape) is None


class TestJsonFilePolytopeRepository:
    """Test cases for loading domain spec files."""

    def test_shipped_domains_load(self, domains_dir):
        """Test every shipped domain file loads with positive volume."""
        repository = JsonFilePolytopeRepository()
        for path in sorted(domains_dir.glob("*.json")):
            polytope = repository.load(path)
            assert volume(polytope) > 0

    def test_name_defaults_to_file_stem(self, write_domain):
        """Test the domain id falls back to the file name."""
        path = write_domain({"dimension": 2, "kind": "box", "lengths": [1, 2]}, name="retangulo.json")
        assert JsonFilePolytopeRepository().load(path).domain_id == "retangulo"

    def test_malformed_json(self, write_domain):
        """Test a JSON syntax error reports its line."""
        path = write_domain('{"dimension": 2,,}')
        with pytest.raises(ConfigError) as excinfo:
            JsonFilePolytopeRepository().load(path)
        assert "linha 1" in str(excinfo.value)

    def test_missing_file(self, tmp_path):
        """Test a missing file raises ConfigError."""
        with pytest.raises(ConfigError):
            JsonFilePolytopeRepository().load(tmp_path / "nao_existe.json")

    def test_box_and_vertices_together_rejected(self, write_domain):
        """Test a box with explicit vertices is rejected."""
        path = write_domain({"dimension": 2, "kind": "box", "lengths": [1, 1], "vertices": [[0, 0]], "faces": []})
        with pytest.raises(ConfigError):
            JsonFilePolytopeRepository().load(path)

    def test_invalid_geometry_propagates(self, write_domain):
        """Test geometry errors pass through the repository unchanged."""
        path = write_domain({"dimension": 2, "vertices": [[0, 0], [0, 1], [1, 0]], "faces": [[0, 1], [1, 2], [2, 0]]})
        with pytest.raises(InvalidGeometryError):
            JsonFilePolytopeRepository().load(path)
