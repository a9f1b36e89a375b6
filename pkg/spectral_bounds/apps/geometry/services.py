"""
Geometric measures of polytopes: volume, face areas, moment of inertia, containment.

Boxes use closed forms in any dimension; general 2D/3D polytopes use signed-simplex decompositions
of their oriented boundary.
"""
from functools import lru_cache

import numpy as np
from django.conf import settings
from loguru import logger
from scipy.special import gammaln

from spectral_bounds.apps.core.exceptions import DomainError

from .models import BOX, Polytope
from .primitives import (
    distance_to_polyline,
    fan_triangles,
    newell_normal,
    plane_frame,
    point_segment_distance,
    points_in_polygon_2d,
    project_to_plane,
    ray_segment_hits,
    ray_triangle_hits,
    simplex_moments,
    winding_numbers,
)

EXACT_BOX = "box"
EXACT_TRIANGLE = "triangle"


def _tolerance(P: Polytope) -> float:
    return getattr(settings, "GEOMETRY_TOLERANCE", 1e-12) * P.scale


@lru_cache(maxsize=64)
def unit_ball_volume(n: int) -> float:
    """π^{n/2}/Γ(n/2 + 1)."""
    if n < 1:
        raise DomainError(f"Dimensão deve ser ≥ 1, recebido {n}")
    if n == 1:
        return 2.0
    if n == 2:
        return float(np.pi)
    return float(np.exp(0.5 * n * np.log(np.pi) - gammaln(0.5 * n + 1.0)))


def volume(P: Polytope) -> float:
    if P.kind == BOX:
        return float(np.prod(P.lengths))
    measure, _, _, _ = simplex_moments(P.vertices, P.faces, P.dimension)
    return float(measure)


def face_areas(P: Polytope) -> list[float]:
    """Per-face (n−1)-measure, in face order (for boxes: axis by axis, lower face first)."""
    if P.kind == BOX:
        lengths = np.array(P.lengths)
        total = float(np.prod(lengths))
        areas = []
        for length in lengths:
            areas.extend([total / length, total / length])
        return areas
    if P.dimension == 2:
        return [float(np.linalg.norm(P.vertices[b] - P.vertices[a])) for a, b in P.faces]
    return [float(np.linalg.norm(newell_normal(P.vertices[list(face)]))) for face in P.faces]


def surface_area(P: Polytope) -> float:
    return float(np.sum(face_areas(P)))


def centroid(P: Polytope) -> np.ndarray:
    if P.kind == BOX:
        return np.array(P.origin) + 0.5 * np.array(P.lengths)
    measure, first, _, reference = simplex_moments(P.vertices, P.faces, P.dimension)
    return reference + first / measure


def moment_of_inertia(P: Polytope) -> float:
    """∫_Ω |x − c|² dx about the centroid c."""
    if P.kind == BOX:
        lengths = np.array(P.lengths)
        return float(np.prod(lengths) * np.sum(lengths**2) / 12.0)
    measure, first, second, _ = simplex_moments(P.vertices, P.faces, P.dimension)
    shift = first / measure
    return float(np.trace(second) - measure * (shift @ shift))


def face_polygons(P: Polytope) -> list[np.ndarray]:
    """Vertex coordinates of each face in order."""
    return [P.vertices[list(face)] for face in P.faces]


def boundary_simplices(P: Polytope) -> list[list[np.ndarray]]:
    """Per face, the segments (2D) or fan triangles (3D) covering it."""
    if P.dimension == 2:
        return [[P.vertices[list(face)]] for face in P.faces]
    return [[P.vertices[list(triangle)] for triangle in fan_triangles(face)] for face in P.faces]


def _on_boundary_3d(P: Polytope, points: np.ndarray, tolerance: float) -> np.ndarray:
    on_boundary = np.zeros(len(points), dtype=bool)
    for polygon in face_polygons(P):
        origin, u, v, normal = plane_frame(polygon)
        near_plane = np.abs((points - origin) @ normal) <= tolerance
        if not near_plane.any():
            continue
        candidates = points[near_plane]
        flat = project_to_plane(candidates, origin, u, v)
        loop = project_to_plane(polygon, origin, u, v)
        hit = points_in_polygon_2d(flat, loop) | (distance_to_polyline(flat, loop) <= tolerance)
        on_boundary[np.flatnonzero(near_plane)[hit]] = True
    return on_boundary


def contains_points(P: Polytope, points) -> np.ndarray:
    """Open-interior membership for each row of ``points``; boundary points are exterior."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    tolerance = _tolerance(P)

    if P.kind == BOX:
        lo, hi = P.bounding_box()
        return np.all((points > lo + tolerance) & (points < hi - tolerance), axis=1)

    if P.dimension == 2:
        inside = np.zeros(len(points), dtype=bool)
        near = np.full(len(points), np.inf)
        for a, b in P.faces:
            start, end = P.vertices[a], P.vertices[b]
            near = np.minimum(near, point_segment_distance(points, start, end))
            straddles = (start[1] > points[:, 1]) != (end[1] > points[:, 1])
            if straddles.any():
                with np.errstate(divide="ignore", invalid="ignore"):
                    x_cross = start[0] + (points[:, 1] - start[1]) * (end[0] - start[0]) / (end[1] - start[1])
                inside ^= straddles & (points[:, 0] < x_cross)
        return inside & (near > tolerance)

    on_boundary = _on_boundary_3d(P, points, tolerance)
    triangles = np.array([tri for face in boundary_simplices(P) for tri in face])
    inside = np.zeros(len(points), dtype=bool)
    candidates = ~on_boundary
    if candidates.any():
        inside[candidates] = winding_numbers(points[candidates], triangles) > 0.5
    return inside


def contains(P: Polytope, x) -> bool:
    return bool(contains_points(P, np.asarray(x, dtype=float)[None, :])[0])


def boundary_distance_along_axis(P: Polytope, points: np.ndarray, axis: int, sign: int) -> np.ndarray:
    """Distance from each interior point to ∂Ω along the ray ``sign·e_axis`` (inf if no hit)."""
    direction = np.zeros(P.dimension)
    direction[axis] = float(sign)
    tolerance = _tolerance(P)

    if P.kind == BOX:
        lo, hi = P.bounding_box()
        return (hi[axis] - points[:, axis]) if sign > 0 else (points[:, axis] - lo[axis])

    hits = np.full(len(points), np.inf)
    if P.dimension == 2:
        for a, b in P.faces:
            hits = np.minimum(hits, ray_segment_hits(points, direction, P.vertices[a], P.vertices[b], tolerance))
    else:
        for face in boundary_simplices(P):
            for a, b, c in face:
                hits = np.minimum(hits, ray_triangle_hits(points, direction, a, b, c, tolerance))
    return hits


def detect_exact_oracle(P: Polytope) -> tuple[str, tuple[float, ...]] | None:
    """Recognize domains with a closed-form spectrum: axis-aligned boxes and equilateral triangles."""
    if P.kind == BOX:
        return EXACT_BOX, P.lengths

    lo, hi = P.bounding_box()
    extents = hi - lo
    relative = 1e-9
    if abs(volume(P) - float(np.prod(extents))) <= relative * float(np.prod(extents)):
        logger.debug(f"Domain {P.domain_id} recognized as axis-aligned box {tuple(extents)}")
        return EXACT_BOX, tuple(float(value) for value in extents)

    if P.dimension == 2 and len(P.faces) == 3:
        sides = face_areas(P)
        if max(sides) - min(sides) <= relative * max(sides):
            logger.debug(f"Domain {P.domain_id} recognized as equilateral triangle of side {sides[0]}")
            return EXACT_TRIANGLE, (float(np.mean(sides)),)
    return None

