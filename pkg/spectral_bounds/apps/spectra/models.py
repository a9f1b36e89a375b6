"""
Domain entities of the spectra app.
"""
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from spectral_bounds.apps.core.exceptions import ConsistencyError

EXACT_BOX = "exact_box"
EXACT_TRIANGLE = "exact_triangle"
FINITE_DIFFERENCE = "finite_difference"
RICHARDSON = "richardson"
METHOD_CHOICES = (EXACT_BOX, EXACT_TRIANGLE, FINITE_DIFFERENCE, RICHARDSON)

STANDARD = "standard"
SHORTLEY_WELLER = "shortley_weller"
STENCIL_CHOICES = (STANDARD, SHORTLEY_WELLER)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sorted Dirichlet eigenvalues with provenance.

    Values must be strictly positive and non-decreasing; anything else raises ``ConsistencyError``.

    ``ceiling`` is the value below which the spectrum is complete: every eigenvalue of the domain
    smaller than it is listed. Exact oracles set it to the next enumerated value; discrete spectra
    to their last value.
    """

    eigenvalues: np.ndarray
    method: str
    domain_id: str
    resolution: float | None = None
    ceiling: float = np.inf

    def __post_init__(self):
        values = np.array(self.eigenvalues, dtype=float)
        if values.ndim != 1:
            raise ConsistencyError(f"Autovalores devem formar um vetor, recebido formato {values.shape}")
        non_positive = np.flatnonzero(~(values > 0))
        if non_positive.size:
            k = int(non_positive[0])
            raise ConsistencyError(
                f"Autovalor não positivo em k={k + 1}: {values[k]}",
                diagnostics={"domain_id": self.domain_id, "k": k + 1, "value": float(values[k])},
            )
        decreasing = np.flatnonzero(np.diff(values) < 0)
        if decreasing.size:
            k = int(decreasing[0])
            raise ConsistencyError(
                f"Autovalores fora de ordem em k={k + 1}: {values[k]} > {values[k + 1]}",
                diagnostics={"domain_id": self.domain_id, "k": k + 1, "values": values[k : k + 2].tolist()},
            )
        values.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def is_exact(self) -> bool:
        return self.method in (EXACT_BOX, EXACT_TRIANGLE)


@dataclass(frozen=True, eq=False)
class GridOperator:
    """Finite-difference Dirichlet Laplacian (negated) on the lattice points inside Ω.

    ``interior_nodes`` maps lattice multi-indices (rows, C order) to matrix rows; lattice point
    ``i`` sits at ``origin + i·h``.
    """

    h: float
    interior_nodes: np.ndarray
    matrix: sparse.csr_matrix
    stencil: str
    domain_id: str
    origin: np.ndarray
    shape: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.h * self.interior_nodes
