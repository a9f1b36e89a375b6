"""
Domain entities of the geometry app.

Polytopes are immutable values; there is no database behind them. A polytope is validated when it
is constructed, so every service can take validity for granted.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np
from django.conf import settings

from spectral_bounds.apps.core.exceptions import InvalidGeometryError

from .primitives import newell_normal, simplex_moments

GENERAL = "general"
BOX = "box"
KIND_CHOICES = (GENERAL, BOX)


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Polytope:
    """An n-dimensional polytope given by oriented faces, or an axis-aligned box given by its sides.

    2D faces are directed edges ``(a, b)`` with the interior on the left; 3D faces are vertex loops
    counter-clockwise seen from outside. Boxes occupy ``[origin, origin + lengths]``.
    """

    dimension: int
    kind: str = GENERAL
    vertices: np.ndarray | None = None
    faces: tuple[tuple[int, ...], ...] = ()
    lengths: tuple[float, ...] = ()
    origin: tuple[float, ...] = ()
    name: str = "domain"
    tiling: bool = False

    def __post_init__(self):
        if self.kind not in KIND_CHOICES:
            raise InvalidGeometryError(f"Tipo de politopo desconhecido: {self.kind}")
        if int(self.dimension) != self.dimension or self.dimension < 2:
            raise InvalidGeometryError(f"Dimensão inválida: {self.dimension}")

        if self.kind == BOX:
            self._init_box()
        else:
            self._init_general()

    def _init_box(self):
        lengths = tuple(float(value) for value in self.lengths)
        if len(lengths) != self.dimension:
            raise InvalidGeometryError(f"Caixa de dimensão {self.dimension} exige {self.dimension} lados")
        if not all(np.isfinite(value) and value > 0 for value in lengths):
            raise InvalidGeometryError(f"Lados da caixa devem ser positivos: {lengths}")
        origin = tuple(float(value) for value in self.origin) or (0.0,) * self.dimension
        if len(origin) != self.dimension:
            raise InvalidGeometryError("Origem da caixa com dimensão incorreta")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "vertices", None)
        object.__setattr__(self, "faces", ())

    def _init_general(self):
        if self.dimension not in (2, 3):
            raise InvalidGeometryError("Somente caixas são suportadas para n > 3")
        if self.vertices is None or not self.faces:
            raise InvalidGeometryError("Politopo geral exige vértices e faces")

        vertices = np.array(self.vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != self.dimension or len(vertices) < self.dimension + 1:
            raise InvalidGeometryError(f"Vértices devem formar uma matriz m×{self.dimension}")
        if not np.all(np.isfinite(vertices)):
            raise InvalidGeometryError("Coordenadas de vértices não finitas")

        faces = tuple(tuple(int(index) for index in face) for face in self.faces)
        for face_index, face in enumerate(faces):
            if any(index < 0 or index >= len(vertices) for index in face):
                raise InvalidGeometryError(f"Face {face_index} referencia vértice inexistente")

        object.__setattr__(self, "vertices", _readonly(vertices))
        object.__setattr__(self, "faces", faces)
        object.__setattr__(self, "lengths", ())
        object.__setattr__(self, "origin", ())
        self._validate_boundary()

    @property
    def scale(self) -> float:
        lo, hi = self.bounding_box()
        return max(float(np.max(hi - lo)), 1.0)

    def _validate_boundary(self):
        tolerance = getattr(settings, "GEOMETRY_TOLERANCE", 1e-12) * self.scale
        if self.dimension == 2:
            self._validate_edges(tolerance)
        else:
            self._validate_facets(tolerance)

        volume, _, _, _ = simplex_moments(self.vertices, self.faces, self.dimension)
        if volume < -tolerance:
            raise InvalidGeometryError("Faces orientadas para dentro (volume negativo)")
        if volume <= tolerance:
            raise InvalidGeometryError("Politopo degenerado: volume nulo")

    def _validate_edges(self, tolerance: float):
        tails, heads = [], []
        for face_index, face in enumerate(self.faces):
            if len(face) != 2 or face[0] == face[1]:
                raise InvalidGeometryError(f"Face {face_index} deve ser uma aresta [a, b]")
            a, b = self.vertices[list(face)]
            if np.linalg.norm(b - a) <= tolerance:
                raise InvalidGeometryError(f"Face {face_index} tem comprimento nulo")
            tails.append(face[0])
            heads.append(face[1])
        if sorted(tails) != sorted(set(tails)) or sorted(heads) != sorted(set(heads)) or set(tails) != set(heads):
            raise InvalidGeometryError("Fronteira não fechada: cada vértice deve iniciar e terminar uma aresta")

    def _validate_facets(self, tolerance: float):
        planarity = getattr(settings, "PLANARITY_TOLERANCE", 1e-9) * self.scale
        directed = {}
        for face_index, face in enumerate(self.faces):
            if len(face) < 3 or len(set(face)) != len(face):
                raise InvalidGeometryError(f"Face {face_index} deve ter ao menos 3 vértices distintos")
            points = self.vertices[list(face)]
            area_vector = newell_normal(points)
            area = float(np.linalg.norm(area_vector))
            if area <= tolerance:
                raise InvalidGeometryError(f"Face {face_index} degenerada (área nula)")
            offsets = (points - points.mean(axis=0)) @ (area_vector / area)
            if np.max(np.abs(offsets)) > planarity:
                raise InvalidGeometryError(f"Face {face_index} não é plana")
            for position, start in enumerate(face):
                edge = (start, face[(position + 1) % len(face)])
                if edge in directed:
                    raise InvalidGeometryError(f"Aresta {edge} repetida com a mesma orientação")
                directed[edge] = face_index
        for start, end in directed:
            if (end, start) not in directed:
                raise InvalidGeometryError(f"Fronteira não fechada na aresta ({start}, {end})")

    @property
    def domain_id(self) -> str:
        return self.name

    @property
    def face_count(self) -> int:
        return 2 * self.dimension if self.kind == BOX else len(self.faces)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == BOX:
            lo = np.array(self.origin)
            return lo, lo + np.array(self.lengths)
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def scaled(self, factor: float) -> "Polytope":
        if self.kind == BOX:
            return Polytope(
                dimension=self.dimension,
                kind=BOX,
                lengths=tuple(factor * value for value in self.lengths),
                origin=tuple(factor * value for value in self.origin),
                name=self.name,
                tiling=self.tiling,
            )
        return Polytope(
            dimension=self.dimension,
            vertices=factor * self.vertices,
            faces=self.faces,
            name=self.name,
            tiling=self.tiling,
        )

    def translated(self, offset) -> "Polytope":
        offset = np.asarray(offset, dtype=float)
        if self.kind == BOX:
            return Polytope(
                dimension=self.dimension,
                kind=BOX,
                lengths=self.lengths,
                origin=tuple(np.array(self.origin) + offset),
                name=self.name,
                tiling=self.tiling,
            )
        return Polytope(
            dimension=self.dimension,
            vertices=self.vertices + offset,
            faces=self.faces,
            name=self.name,
            tiling=self.tiling,
        )

    def as_general(self) -> "Polytope":
        """Explicit vertices and faces of a 2D or 3D box, faces in the box face order."""
        if self.kind == GENERAL:
            return self
        if self.dimension not in (2, 3):
            raise InvalidGeometryError("Somente caixas 2D e 3D têm representação por faces")

        lo = np.array(self.origin)
        corners = np.array(list(product((0.0, 1.0), repeat=self.dimension)))
        vertices = lo + corners * np.array(self.lengths)
        index = {tuple(int(c) for c in corner): i for i, corner in enumerate(corners)}

        if self.dimension == 2:
            faces = (
                (index[(0, 1)], index[(0, 0)]),
                (index[(1, 0)], index[(1, 1)]),
                (index[(0, 0)], index[(1, 0)]),
                (index[(1, 1)], index[(0, 1)]),
            )
        else:
            faces = []
            for axis in range(3):
                for side in (0, 1):
                    u, v = [other for other in range(3) if other != axis]
                    loop = []
                    for a, b in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        corner = [0, 0, 0]
                        corner[axis], corner[u], corner[v] = side, a, b
                        loop.append(index[tuple(corner)])
                    # (u, v) ordering is counter-clockwise around +e_axis only for cyclic (axis, u, v)
                    positive = (axis, u, v) in ((0, 1, 2), (1, 2, 0), (2, 0, 1))
                    outward_positive = side == 1
                    if positive != outward_positive:
                        loop.reverse()
                    faces.append(tuple(loop))
            faces = tuple(faces)

        return Polytope(dimension=self.dimension, vertices=vertices, faces=faces, name=self.name, tiling=self.tiling)


@dataclass(frozen=True, eq=False)
class Patch:
    """A convex piece of an eroded face.

    ``vertices`` holds the ambient coordinates of the piece: a segment in 2D, a convex loop in 3D,
    and the two opposite corners of the eroded sub-box for box faces.
    """

    area: float
    vertices: np.ndarray


@dataclass(frozen=True)
class FacePatches:
    face_index: int
    face_area: float
    patches: tuple[Patch, ...]
    patch_area_total: float
    distance: float
    erosion_margin: float


@dataclass(frozen=True)
class FaceDecomposition:
    faces: tuple[FacePatches, ...]
    fraction: float = 1 / 3
    domain_id: str = "domain"

    @property
    def distances(self) -> list[float]:
        return [face.distance for face in self.faces]

    @property
    def face_areas(self) -> list[float]:
        return [face.face_area for face in self.faces]

    @property
    def min_distance(self) -> float:
        return min(self.distances)

    @property
    def min_face_area(self) -> float:
        return min(self.face_areas)

    def __len__(self):
        return len(self.faces)

    def __getitem__(self, index) -> FacePatches:
        return self.faces[index]

