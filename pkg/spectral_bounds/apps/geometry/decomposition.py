"""
Face decomposition: eroded convex patches on every face and their distance to the rest of ∂Ω.

Each face is shrunk inside its own hyperplane by the largest margin δ that keeps at least
``fraction`` of its area. The margin is found by bisection; 2D faces shrink as segments, 3D faces
through an inward shapely buffer, and box faces as sub-boxes.
"""
import numpy as np
from django.conf import settings
from loguru import logger
from shapely.geometry import MultiPolygon, Polygon
from shapely.geometry.polygon import orient

from spectral_bounds.apps.core.exceptions import DecompositionError, DomainError

from .models import BOX, FaceDecomposition, FacePatches, Patch, Polytope
from .primitives import (
    ear_clip,
    fan_triangles,
    is_convex_polygon,
    lift_from_plane,
    plane_frame,
    project_to_plane,
    signed_area_2d,
    simplex_distance,
)
from .services import boundary_simplices, face_areas


def largest_margin(area_at, target: float, upper: float, iterations: int) -> float:
    """Largest δ in [0, upper] with area_at(δ) ≥ target, area_at being non-increasing."""
    lo, hi = 0.0, upper
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if area_at(mid) >= target:
            lo = mid
        else:
            hi = mid
    return lo


class SegmentEroder:
    """Erosion of a 2D face (an edge) into its central sub-segment."""

    def __init__(self, points: np.ndarray):
        self.start, self.end = points
        self.length = float(np.linalg.norm(self.end - self.start))
        self.direction = (self.end - self.start) / self.length
        self.max_margin = 0.5 * self.length

    def area(self, margin: float) -> float:
        return max(0.0, self.length - 2.0 * margin)

    def patches(self, margin: float) -> list[Patch]:
        segment = np.array([self.start + margin * self.direction, self.end - margin * self.direction])
        return [Patch(area=self.area(margin), vertices=segment)]


class PolygonEroder:
    """Erosion of a planar 3D face by an inward buffer inside its own plane."""

    QUAD_SEGMENTS = 32

    def __init__(self, points: np.ndarray):
        self.frame = plane_frame(points)
        origin, u, v, _ = self.frame
        self.polygon = orient(Polygon(project_to_plane(points, origin, u, v)), sign=1.0)
        minx, miny, maxx, maxy = self.polygon.bounds
        self.max_margin = 0.5 * max(maxx - minx, maxy - miny)

    def eroded(self, margin: float):
        return self.polygon.buffer(-margin, quad_segs=self.QUAD_SEGMENTS, join_style="round")

    def area(self, margin: float) -> float:
        return float(self.eroded(margin).area)

    def patches(self, margin: float) -> list[Patch]:
        region = self.eroded(margin)
        components = list(region.geoms) if isinstance(region, MultiPolygon) else [region]
        origin, u, v, _ = self.frame
        patches = []
        for component in components:
            if component.is_empty:
                continue
            loop = np.asarray(orient(component, sign=1.0).exterior.coords)[:-1]
            if is_convex_polygon(loop):
                pieces = [loop]
            else:
                pieces = [loop[list(triangle)] for triangle in ear_clip(loop)]
            for piece in pieces:
                patches.append(
                    Patch(area=abs(signed_area_2d(piece)), vertices=lift_from_plane(piece, origin, u, v))
                )
        return patches


def _patch_simplices(patch: Patch, dimension: int) -> list[np.ndarray]:
    if dimension == 2:
        return [patch.vertices]
    loop = tuple(range(len(patch.vertices)))
    return [patch.vertices[list(triangle)] for triangle in fan_triangles(loop)]


def _box_decomposition(P: Polytope, fraction: float, iterations: int, floor: float) -> FaceDecomposition:
    lengths = np.array(P.lengths)
    lo = np.array(P.origin)
    faces = []
    for axis in range(P.dimension):
        others = np.delete(lengths, axis)
        face_area = float(np.prod(others))

        def area_at(margin, others=others):
            return float(np.prod(np.clip(others - 2.0 * margin, 0.0, None)))

        margin = largest_margin(area_at, fraction * face_area, 0.5 * float(others.min()), iterations)
        for side in (0, 1):
            face_index = 2 * axis + side
            if margin <= floor:
                raise DecompositionError(
                    f"Face {face_index} sem margem positiva para a fração {fraction}", face_index=face_index
                )
            corner_lo = lo + margin
            corner_hi = lo + lengths - margin
            corner_lo[axis] = corner_hi[axis] = lo[axis] + side * lengths[axis]
            patch = Patch(area=area_at(margin), vertices=np.array([corner_lo, corner_hi]))
            faces.append(
                FacePatches(
                    face_index=face_index,
                    face_area=face_area,
                    patches=(patch,),
                    patch_area_total=patch.area,
                    distance=float(min(margin, lengths[axis])),
                    erosion_margin=float(margin),
                )
            )
    return FaceDecomposition(faces=tuple(faces), fraction=fraction, domain_id=P.domain_id)


def face_decomposition(P: Polytope, fraction: float | None = None) -> FaceDecomposition:
    """Eroded convex patches s_i on each face, with d_i = dist(∪s_i, ∂Ω ∖ face_i)."""
    if fraction is None:
        fraction = getattr(settings, "FACE_FRACTION", 1 / 3)
    if not 0.0 < fraction < 1.0:
        raise DomainError(f"A fração deve estar em (0, 1), recebido {fraction}")

    iterations = getattr(settings, "BISECTION_ITERATIONS", 64)
    floor = getattr(settings, "DECOMPOSITION_MIN_MARGIN", 1e-9) * P.scale

    if P.kind == BOX:
        decomposition = _box_decomposition(P, fraction, iterations, floor)
        logger.debug(f"Box decomposition of {P.domain_id}: min d = {decomposition.min_distance}")
        return decomposition

    areas = face_areas(P)
    simplices = boundary_simplices(P)
    faces = []
    for face_index, face in enumerate(P.faces):
        points = P.vertices[list(face)]
        eroder = SegmentEroder(points) if P.dimension == 2 else PolygonEroder(points)
        margin = largest_margin(eroder.area, fraction * areas[face_index], eroder.max_margin, iterations)
        if margin <= floor:
            raise DecompositionError(
                f"Face {face_index} sem margem positiva para a fração {fraction}", face_index=face_index
            )

        patches = eroder.patches(margin)
        others = [simplex for other, group in enumerate(simplices) if other != face_index for simplex in group]
        distance = min(
            simplex_distance(piece, other)
            for patch in patches
            for piece in _patch_simplices(patch, P.dimension)
            for other in others
        )
        if distance <= floor:
            raise DecompositionError(f"Face {face_index} com distância nula ao resto da fronteira", face_index)

        faces.append(
            FacePatches(
                face_index=face_index,
                face_area=areas[face_index],
                patches=tuple(patches),
                patch_area_total=float(sum(patch.area for patch in patches)),
                distance=float(distance),
                erosion_margin=float(margin),
            )
        )

    decomposition = FaceDecomposition(faces=tuple(faces), fraction=fraction, domain_id=P.domain_id)
    logger.debug(
        f"Face decomposition of {P.domain_id}: {len(faces)} faces, min d = {decomposition.min_distance}, "
        f"min A = {decomposition.min_face_area}"
    )
    return decomposition
