"""
Finite-difference Dirichlet Laplacian on a Cartesian lattice masked by the domain, and its eigensolver.
"""
import time

import numpy as np
import prometheus_client
import scipy.linalg
from django.conf import settings
from loguru import logger
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from spectral_bounds.apps.core.exceptions import ConvergenceError, DomainError, ResolutionError, ResourceLimitError
from spectral_bounds.apps.geometry.models import Polytope
from spectral_bounds.apps.geometry.services import boundary_distance_along_axis, contains_points

from .models import FINITE_DIFFERENCE, STANDARD, STENCIL_CHOICES, GridOperator, Spectrum

# Prometheus metrics
eigensolver_solves = prometheus_client.Counter(
    "spectral_bounds_eigensolver_solves_total", "Total number of finite-difference eigensolves", ["solver", "status"]
)

eigensolver_duration = prometheus_client.Histogram(
    "spectral_bounds_eigensolver_duration_seconds", "Duration of finite-difference eigensolves", ["solver"]
)


def _lattice(P: Polytope, h: float):
    lo, hi = P.bounding_box()
    counts = np.floor((hi - lo) / h + 1e-9).astype(int)
    shape = tuple(int(c) + 1 for c in counts)
    total = int(np.prod(shape))
    if total > getattr(settings, "MAX_LATTICE_POINTS", 50_000_000):
        raise ResourceLimitError(f"Malha com {total} pontos excede o limite configurado")
    indices = np.indices(shape).reshape(P.dimension, -1).T
    return lo, shape, indices


def fd_assemble(P: Polytope, h: float, stencil: str = STANDARD, min_nodes: int | None = None) -> GridOperator:
    """Assemble −Δ_h with Dirichlet conditions on the lattice points ``lo + i·h`` inside Ω.

    The standard stencil drops exterior neighbors. ``SHORTLEY_WELLER`` selects the symmetric
    cut-cell variant of that stencil: on a link that leaves Ω it measures the arm θh to ∂Ω and adds
    1/(θh²) to the diagonal instead of 1/h², while every interior link keeps the −1/h² coupling.
    The classical Shortley–Weller rows are not symmetric and no diagonal rescaling makes them so
    without a mass matrix; this form stays symmetric and is still second order for λ.
    """
    if h <= 0:
        raise DomainError(f"Espaçamento h deve ser positivo, recebido {h}")
    if stencil not in STENCIL_CHOICES:
        raise DomainError(f"Estêncil desconhecido: {stencil}")
    if P.dimension not in (2, 3):
        raise DomainError("Diferenças finitas disponíveis apenas para n = 2 ou 3")
    if min_nodes is None:
        min_nodes = getattr(settings, "MIN_INTERIOR_NODES", 10)

    origin, shape, indices = _lattice(P, h)
    inside = contains_points(P, origin + h * indices)
    interior = indices[inside]
    size = len(interior)
    if size < min_nodes:
        raise ResolutionError(f"Apenas {size} nós interiores com h={h}; mínimo é {min_nodes}")

    node_ids = np.full(len(indices), -1, dtype=np.int64)
    node_ids[inside] = np.arange(size)
    rows_all = np.arange(size)
    inv_h2 = 1.0 / h**2
    min_fraction = getattr(settings, "SHORTLEY_WELLER_MIN_FRACTION", 1e-6)

    diagonal = np.zeros(size)
    rows, cols = [], []
    for axis in range(P.dimension):
        for sign in (-1, 1):
            neighbor = interior.copy()
            neighbor[:, axis] += sign
            in_range = (neighbor[:, axis] >= 0) & (neighbor[:, axis] < shape[axis])
            neighbor_ids = np.full(size, -1, dtype=np.int64)
            flat = np.ravel_multi_index(neighbor[in_range].T, shape)
            neighbor_ids[in_range] = node_ids[flat]
            linked = neighbor_ids >= 0

            rows.append(rows_all[linked])
            cols.append(neighbor_ids[linked])

            if stencil == STANDARD:
                diagonal += inv_h2
                continue

            diagonal[linked] += inv_h2
            cut = ~linked
            if cut.any():
                arms = boundary_distance_along_axis(P, origin + h * interior[cut], axis, sign) / h
                arms = np.where(np.isfinite(arms), arms, 1.0)
                diagonal[cut] += inv_h2 / np.clip(arms, min_fraction, 1.0)

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    off_diagonal = sparse.coo_matrix((np.full(len(rows), -inv_h2), (rows, cols)), shape=(size, size))
    matrix = (off_diagonal + sparse.diags(diagonal)).tocsr()

    logger.debug(f"Assembled {stencil} operator for {P.domain_id}: h={h}, {size} interior nodes, nnz={matrix.nnz}")
    return GridOperator(
        h=float(h),
        interior_nodes=interior,
        matrix=matrix,
        stencil=stencil,
        domain_id=P.domain_id,
        origin=origin,
        shape=shape,
    )


def _residuals(matrix, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    return np.linalg.norm(matrix @ vectors - vectors * values, axis=0) / np.linalg.norm(vectors, axis=0)


def fd_spectrum(op: GridOperator, count: int, seed: int = 0) -> Spectrum:
    """The ``count`` smallest eigenvalues of the grid operator.

    Shift-invert Lanczos around 0 with a seeded start vector; small operators (or requests for
    nearly the whole spectrum) go to a dense symmetric solver. Every pair is checked against the
    residual tolerance.
    """
    if count < 1 or count > op.size:
        raise DomainError(f"count deve estar em [1, {op.size}], recebido {count}")

    tolerance = getattr(settings, "EIGENSOLVER_RESIDUAL_TOL", 1e-8)
    dense = op.size <= getattr(settings, "DENSE_SOLVER_LIMIT", 400) or count >= op.size - 1
    solver = "dense" if dense else "shift_invert_lanczos"
    started = time.perf_counter()

    with eigensolver_duration.labels(solver=solver).time():
        try:
            if dense:
                values, vectors = scipy.linalg.eigh(op.matrix.toarray(), subset_by_index=[0, count - 1])
            else:
                start = np.random.default_rng(seed).standard_normal(op.size)
                values, vectors = eigsh(
                    op.matrix.tocsc(),
                    k=count,
                    sigma=0.0,
                    which="LM",
                    v0=start,
                    maxiter=getattr(settings, "EIGENSOLVER_MAX_ITER", 20000),
                )
        except ArpackNoConvergence as e:
            eigensolver_solves.labels(solver=solver, status="no_convergence").inc()
            residuals = _residuals(op.matrix, e.eigenvalues, e.eigenvectors) if len(e.eigenvalues) else []
            logger.error(f"Eigensolver did not converge on {op.domain_id}: {len(e.eigenvalues)}/{count} pairs")
            raise ConvergenceError(
                f"Autovalores não convergiram ({len(e.eigenvalues)}/{count})", residuals=list(residuals)
            )
        except (scipy.linalg.LinAlgError, RuntimeError, ValueError) as e:
            # singular shift-invert factor, LAPACK failure or bad input to the solver
            eigensolver_solves.labels(solver=solver, status="failure").inc()
            logger.error(f"Eigensolver failed on {op.domain_id} ({solver}): {e}")
            raise ConvergenceError(f"Falha no solver de autovalores ({solver}): {e}") from e

    order = np.argsort(values)
    values = values[order]
    vectors = vectors[:, order]
    residuals = _residuals(op.matrix, values, vectors)
    if np.any(residuals > tolerance * np.abs(values)):
        eigensolver_solves.labels(solver=solver, status="residual").inc()
        logger.error(f"Residual check failed on {op.domain_id}: max residual {residuals.max():.3e}")
        raise ConvergenceError("Resíduo acima da tolerância", residuals=list(residuals))

    eigensolver_solves.labels(solver=solver, status="success").inc()
    logger.info(
        f"Solved {count} eigenpairs on {op.domain_id} ({op.size} nodes, {solver}) "
        f"in {time.perf_counter() - started:.2f}s"
    )
    return Spectrum(
        eigenvalues=values,
        method=FINITE_DIFFERENCE,
        domain_id=op.domain_id,
        resolution=op.h,
        ceiling=float(values[-1]),
    )
