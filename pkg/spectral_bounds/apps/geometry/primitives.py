"""
Low-level numpy kernels shared by the geometry services.

Everything here works on plain arrays: vertex coordinates, index loops and simplices. Polytope-level
semantics (validation, boxes, face decomposition) live in models.py, services.py and decomposition.py.
"""
import numpy as np

_DEGENERATE = 1e-30


def cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """z-component of the cross product of 2D vectors (broadcasting)."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def signed_area_2d(points: np.ndarray) -> float:
    shifted = np.roll(points, -1, axis=0)
    return 0.5 * float(np.sum(cross2(points, shifted)))


def newell_normal(points: np.ndarray) -> np.ndarray:
    """Area vector of a planar 3D polygon: unit normal times area, right-hand orientation."""
    centered = points - points.mean(axis=0)
    shifted = np.roll(centered, -1, axis=0)
    return 0.5 * np.cross(centered, shifted).sum(axis=0)


def plane_frame(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Origin, in-plane basis (u, v) and unit normal of a planar polygon.

    The basis is chosen so that a loop counter-clockwise around the normal projects to a
    counter-clockwise 2D polygon.
    """
    normal = newell_normal(points)
    normal = normal / np.linalg.norm(normal)
    origin = points[0]
    edges = points - origin
    u = edges[np.argmax(np.linalg.norm(edges, axis=1))]
    u = u - (u @ normal) * normal
    u = u / np.linalg.norm(u)
    v = np.cross(normal, u)
    return origin, u, v, normal


def project_to_plane(points: np.ndarray, origin: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    rel = points - origin
    return np.column_stack((rel @ u, rel @ v))


def lift_from_plane(points2d: np.ndarray, origin: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return origin + np.outer(points2d[:, 0], u) + np.outer(points2d[:, 1], v)


def fan_triangles(loop: tuple[int, ...]) -> list[tuple[int, int, int]]:
    return [(loop[0], loop[i], loop[i + 1]) for i in range(1, len(loop) - 1)]


def simplex_moments(vertices: np.ndarray, faces: tuple[tuple[int, ...], ...], dimension: int):
    """Zeroth, first and second moments of the region bounded by oriented faces.

    Each face is coned to the vertex mean, giving signed simplices whose closed-form moments
    add up to the moments of the polytope. Returned moments are about the vertex mean, which
    is returned as the fourth element.
    """
    reference = vertices.mean(axis=0)
    shifted = vertices - reference
    volume = 0.0
    first = np.zeros(dimension)
    second = np.zeros((dimension, dimension))

    if dimension == 2:
        simplices = [(shifted[a], shifted[b]) for a, b in faces]
    else:
        simplices = [
            (shifted[a], shifted[b], shifted[c]) for face in faces for a, b, c in fan_triangles(tuple(face))
        ]

    for simplex in simplices:
        corners = np.array(simplex)
        if dimension == 2:
            measure = 0.5 * float(cross2(corners[0], corners[1]))
        else:
            measure = float(corners[0] @ np.cross(corners[1], corners[2])) / 6.0
        total = corners.sum(axis=0)
        volume += measure
        first += measure * total / (dimension + 1)
        second += measure / ((dimension + 1) * (dimension + 2)) * (corners.T @ corners + np.outer(total, total))

    return volume, first, second, reference


def point_segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(points)
    ab = b - a
    length_sq = float(ab @ ab)
    if length_sq <= _DEGENERATE:
        return np.linalg.norm(points - a, axis=1)
    t = np.clip((points - a) @ ab / length_sq, 0.0, 1.0)
    return np.linalg.norm(points - (a + t[:, None] * ab), axis=1)


def segment_segment_distance(p1: np.ndarray, q1: np.ndarray, p2: np.ndarray, q2: np.ndarray) -> float:
    """Exact distance between two closed segments in any dimension."""
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)

    if a <= _DEGENERATE and e <= _DEGENERATE:
        return float(np.linalg.norm(r))
    if a <= _DEGENERATE:
        s, t = 0.0, float(np.clip(f / e, 0.0, 1.0))
    else:
        c = float(d1 @ r)
        if e <= _DEGENERATE:
            t, s = 0.0, float(np.clip(-c / a, 0.0, 1.0))
        else:
            b = float(d1 @ d2)
            denom = a * e - b * b
            s = float(np.clip((b * f - c * e) / denom, 0.0, 1.0)) if denom > _DEGENERATE else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t, s = 0.0, float(np.clip(-c / a, 0.0, 1.0))
            elif t > 1.0:
                t, s = 1.0, float(np.clip((b - c) / a, 0.0, 1.0))

    return float(np.linalg.norm(p1 + d1 * s - (p2 + d2 * t)))


def point_triangle_distance(point: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    normal = np.cross(b - a, c - a)
    norm_sq = float(normal @ normal)
    if norm_sq > _DEGENERATE:
        height = float((point - a) @ normal) / norm_sq
        foot = point - height * normal
        # barycentric coordinates of the foot point
        w_a = float(np.cross(b - foot, c - foot) @ normal) / norm_sq
        w_b = float(np.cross(c - foot, a - foot) @ normal) / norm_sq
        if w_a >= 0.0 and w_b >= 0.0 and w_a + w_b <= 1.0:
            return abs(height) * np.sqrt(norm_sq)
    return float(
        min(
            point_segment_distance(point, a, b)[0],
            point_segment_distance(point, b, c)[0],
            point_segment_distance(point, c, a)[0],
        )
    )


def simplex_distance(first: np.ndarray, second: np.ndarray) -> float:
    """Distance between two non-intersecting segments or triangles (rows are corners)."""
    if len(first) == 2 and len(second) == 2:
        return segment_segment_distance(first[0], first[1], second[0], second[1])

    candidates = []
    for this, other in ((first, second), (second, first)):
        if len(other) == 3:
            candidates.extend(point_triangle_distance(point, *other) for point in this)
    first_edges = [(first[i], first[(i + 1) % len(first)]) for i in range(len(first) if len(first) == 3 else 1)]
    second_edges = [(second[i], second[(i + 1) % len(second)]) for i in range(len(second) if len(second) == 3 else 1)]
    for p1, q1 in first_edges:
        for p2, q2 in second_edges:
            candidates.append(segment_segment_distance(p1, q1, p2, q2))
    return float(min(candidates))


def points_in_polygon_2d(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Even-odd crossing test; points on edges may land either way."""
    x = points[:, 0]
    y = points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    for a, b in zip(polygon, np.roll(polygon, -1, axis=0), strict=True):
        straddles = (a[1] > y) != (b[1] > y)
        if not straddles.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
        inside ^= straddles & (x < x_cross)
    return inside


def distance_to_polyline(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    distances = np.full(len(points), np.inf)
    for a, b in zip(polygon, np.roll(polygon, -1, axis=0), strict=True):
        distances = np.minimum(distances, point_segment_distance(points, a, b))
    return distances


def winding_numbers(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Generalized winding number of a closed oriented triangle surface around each point."""
    total = np.zeros(len(points))
    for a, b, c in triangles:
        ra, rb, rc = a - points, b - points, c - points
        la = np.linalg.norm(ra, axis=1)
        lb = np.linalg.norm(rb, axis=1)
        lc = np.linalg.norm(rc, axis=1)
        det = np.einsum("ij,ij->i", ra, np.cross(rb, rc))
        denom = (
            la * lb * lc
            + np.einsum("ij,ij->i", ra, rb) * lc
            + np.einsum("ij,ij->i", ra, rc) * lb
            + np.einsum("ij,ij->i", rb, rc) * la
        )
        total += 2.0 * np.arctan2(det, denom)
    return total / (4.0 * np.pi)


def ray_segment_hits(origins: np.ndarray, direction: np.ndarray, a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Ray parameter t ≥ 0 where origin + t·direction meets segment [a, b]; inf when it misses."""
    edge = b - a
    denom = float(cross2(direction, edge))
    hits = np.full(len(origins), np.inf)
    if abs(denom) <= _DEGENERATE:
        return hits
    rel = a - origins
    t = cross2(rel, edge) / denom
    s = cross2(rel, direction) / denom
    valid = (t >= 0.0) & (s >= -tol) & (s <= 1.0 + tol)
    hits[valid] = t[valid]
    return hits


def ray_triangle_hits(
    origins: np.ndarray, direction: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float
) -> np.ndarray:
    """Möller–Trumbore intersection, vectorized over ray origins."""
    e1 = b - a
    e2 = c - a
    pvec = np.cross(direction, e2)
    det = float(e1 @ pvec)
    hits = np.full(len(origins), np.inf)
    if abs(det) <= _DEGENERATE:
        return hits
    inv = 1.0 / det
    tvec = origins - a
    u = (tvec @ pvec) * inv
    qvec = np.cross(tvec, e1)
    v = (qvec @ direction) * inv
    t = (qvec @ e2) * inv
    valid = (u >= -tol) & (v >= -tol) & (u + v <= 1.0 + tol) & (t >= 0.0)
    hits[valid] = t[valid]
    return hits


def is_convex_polygon(points: np.ndarray, tol: float = 1e-12) -> bool:
    edges = np.roll(points, -1, axis=0) - points
    turns = cross2(edges, np.roll(edges, -1, axis=0))
    scale = max(float(np.max(np.abs(points))), 1.0) ** 2
    return bool(np.all(turns >= -tol * scale))


def _point_in_triangle(point, a, b, c) -> bool:
    return cross2(b - a, point - a) >= 0.0 and cross2(c - b, point - b) >= 0.0 and cross2(a - c, point - c) >= 0.0


def ear_clip(points: np.ndarray, tol: float = 1e-12) -> list[tuple[int, int, int]]:
    """Triangulate a simple counter-clockwise polygon by ear clipping.

    Collinear vertices are dropped on the way; raises ValueError when no ear exists, which only
    happens for self-intersecting input.
    """
    remaining = list(range(len(points)))
    triangles = []
    scale = max(float(np.max(np.abs(points))), 1.0) ** 2

    while len(remaining) > 3:
        for position, current in enumerate(remaining):
            previous = remaining[position - 1]
            following = remaining[(position + 1) % len(remaining)]
            a, b, c = points[previous], points[current], points[following]
            turn = cross2(b - a, c - b)
            if abs(turn) <= tol * scale:
                remaining.pop(position)
                break
            if turn < 0.0:
                continue
            blocked = any(
                _point_in_triangle(points[other], a, b, c)
                for other in remaining
                if other not in (previous, current, following)
            )
            if blocked:
                continue
            triangles.append((previous, current, following))
            remaining.pop(position)
            break
        else:
            raise ValueError("polygon has no ear; it is not simple")

    if len(remaining) == 3:
        a, b, c = (points[i] for i in remaining)
        if abs(cross2(b - a, c - b)) > tol * scale:
            triangles.append(tuple(remaining))
    return triangles
