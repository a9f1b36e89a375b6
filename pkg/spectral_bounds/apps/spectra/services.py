"""
Spectra app services - exact oracles, spectrum utilities and the spectrum provider factory.
"""
from abc import ABC, abstractmethod

import numpy as np
import prometheus_client
from django.conf import settings
from loguru import logger

from spectral_bounds.apps.core.exceptions import (
    ConfigError,
    ConsistencyError,
    DomainError,
    ResourceLimitError,
    SpectrumMismatchError,
    SpectrumRangeError,
)
from spectral_bounds.apps.geometry.models import Polytope
from spectral_bounds.apps.geometry.services import EXACT_BOX, EXACT_TRIANGLE, detect_exact_oracle, unit_ball_volume

from . import models
from .discretization import fd_assemble, fd_spectrum
from .models import RICHARDSON, STANDARD, Spectrum

GUARD_BAND = 1e-9
SWEEP_GROWTH = 1.5

# Prometheus metrics
exact_enumerations = prometheus_client.Counter(
    "spectral_bounds_exact_enumerations_total", "Total number of exact spectrum enumerations", ["oracle"]
)


def _max_points() -> int:
    return getattr(settings, "MAX_LATTICE_POINTS", 50_000_000)


def _lattice_sums(weights: np.ndarray, cutoff: float) -> np.ndarray:
    """All values Σ w_i m_i² ≤ cutoff with integers m_i ≥ 1."""
    tails = np.concatenate([np.cumsum(weights[::-1])[::-1][1:], [0.0]])
    partial = np.zeros(1)
    for weight, tail in zip(weights, tails, strict=True):
        room = cutoff - tail
        top = int(np.floor(np.sqrt(max(room - partial.min(), 0.0) / weight)))
        if top < 1:
            return np.empty(0)
        if len(partial) * top > _max_points():
            raise ResourceLimitError(f"Varredura de rede excede {_max_points()} pontos")
        combined = (partial[:, None] + weight * np.arange(1, top + 1, dtype=float) ** 2).ravel()
        partial = combined[combined <= room]
    return partial


def _certified(values: np.ndarray, count: int, cutoff: float) -> tuple[np.ndarray, float] | None:
    if len(values) < count:
        return None
    values = np.sort(values)
    if values[count - 1] * (1.0 + GUARD_BAND) > cutoff:
        return None
    ceiling = values[count] if len(values) > count else cutoff
    return values[:count], float(ceiling)


def box_spectrum_exact(lengths, count: int, domain_id: str = "box") -> Spectrum:
    """The ``count`` smallest values of π²Σ(m_i/L_i)², m_i ≥ 1, with multiplicity."""
    lengths = np.asarray(lengths, dtype=float)
    if count < 1:
        raise DomainError(f"count deve ser ≥ 1, recebido {count}")
    if lengths.ndim != 1 or len(lengths) < 1 or np.any(lengths <= 0):
        raise DomainError(f"Lados devem ser positivos: {lengths}")

    n = len(lengths)
    weights = 1.0 / lengths**2
    # Weyl estimate of the count-th value, in units of π²
    cutoff = 4.0 * (count / (unit_ball_volume(n) * np.prod(lengths))) ** (2.0 / n) + weights.sum()

    while True:
        certified = _certified(_lattice_sums(weights, cutoff), count, cutoff)
        if certified is not None:
            break
        cutoff *= SWEEP_GROWTH

    values, ceiling = certified
    exact_enumerations.labels(oracle="box").inc()
    logger.debug(f"Box oracle {tuple(lengths)}: {count} values below cutoff {cutoff * np.pi**2:.6g}")
    return Spectrum(
        eigenvalues=np.pi**2 * values,
        method=models.EXACT_BOX,
        domain_id=domain_id,
        ceiling=np.pi**2 * ceiling,
    )


def _triangle_indices(q_max: int) -> np.ndarray:
    """All m² + mn + n² ≤ q_max with m, n ≥ 1, as integers."""
    top = int(np.sqrt(q_max))
    if top * top > _max_points():
        raise ResourceLimitError(f"Varredura de rede excede {_max_points()} pontos")
    n = np.arange(1, top + 1, dtype=np.int64)
    chunks = []
    for m in range(1, top + 1):
        q = m * m + m * n + n * n
        chunks.append(q[q <= q_max])
    return np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)


def equilateral_triangle_spectrum_exact(side: float, count: int, domain_id: str = "triangle") -> Spectrum:
    """The ``count`` smallest values of (16π²/(9a²))(m² + mn + n²), m, n ≥ 1, with multiplicity."""
    if side <= 0:
        raise DomainError(f"Lado deve ser positivo, recebido {side}")
    if count < 1:
        raise DomainError(f"count deve ser ≥ 1, recebido {count}")

    area = np.sqrt(3.0) / 4.0 * side**2
    # Weyl estimate λ ≈ 4πk/A, converted to the integer index q
    q_max = int(np.ceil(4.0 * np.pi * (count + 1) / area * 9.0 * side**2 / (16.0 * np.pi**2))) + 3

    while True:
        indices = np.sort(_triangle_indices(q_max))
        if len(indices) >= count and indices[count - 1] < q_max:
            break
        q_max = int(np.ceil(q_max * SWEEP_GROWTH))

    factor = 16.0 * np.pi**2 / (9.0 * side**2)
    ceiling = indices[count] if len(indices) > count else q_max + 1
    exact_enumerations.labels(oracle="triangle").inc()
    return Spectrum(
        eigenvalues=factor * indices[:count].astype(float),
        method=models.EXACT_TRIANGLE,
        domain_id=domain_id,
        ceiling=factor * float(ceiling),
    )


def discrete_sine_spectrum(lengths, h: float, count: int) -> np.ndarray:
    """Closed-form eigenvalues of the standard stencil on a box whose sides are multiples of h."""
    lengths = np.asarray(lengths, dtype=float)
    per_axis = []
    for length in lengths:
        intervals = int(round(length / h))
        modes = np.arange(1, intervals)
        per_axis.append(4.0 / h**2 * np.sin(modes * np.pi * h / (2.0 * length)) ** 2)
    values = per_axis[0]
    for axis_values in per_axis[1:]:
        values = np.add.outer(values, axis_values).ravel()
    return np.sort(values)[:count]


def counting_function(S: Spectrum, lam: float) -> int:
    """N(λ) = #{j : λ_j ≤ λ}."""
    if lam < 0:
        raise DomainError(f"λ deve ser ≥ 0, recebido {lam}")
    if lam >= S.ceiling:
        raise SpectrumRangeError(f"λ={lam} fora do intervalo certificado do espectro (< {S.ceiling})")
    return int(np.searchsorted(S.eigenvalues, lam, side="right"))


def eigenvalue_averages(S: Spectrum) -> np.ndarray:
    """(1/k)Σ_{j≤k} λ_j for every k = 1..len(S)."""
    return np.cumsum(S.eigenvalues) / np.arange(1, len(S) + 1)


def eigenvalue_average(S: Spectrum, k: int) -> float:
    if k < 1 or k > len(S):
        raise SpectrumRangeError(f"k={k} fora de [1, {len(S)}]")
    return float(np.sum(S.eigenvalues[:k]) / k)


def richardson_extrapolate(S_h: Spectrum, S_h2: Spectrum, order: int = 2) -> Spectrum:
    """Per-index (2^order·λ^{(h/2)} − λ^{(h)})/(2^order − 1), re-sorted if modes crossed."""
    if S_h.domain_id != S_h2.domain_id:
        raise SpectrumMismatchError(f"Domínios diferentes: {S_h.domain_id} e {S_h2.domain_id}")
    if len(S_h) != len(S_h2):
        raise SpectrumMismatchError(f"Quantidades diferentes: {len(S_h)} e {len(S_h2)}")
    if order < 1:
        raise DomainError(f"Ordem deve ser ≥ 1, recebido {order}")
    if S_h.resolution is not None and S_h2.resolution is not None:
        if S_h2.resolution > S_h.resolution:
            raise SpectrumMismatchError("O segundo espectro deve ter a malha mais fina")
        if not np.isclose(S_h.resolution, 2.0 * S_h2.resolution, rtol=1e-9) and S_h.resolution != S_h2.resolution:
            logger.warning(f"Richardson on resolutions {S_h.resolution} and {S_h2.resolution} is not a halving")

    weight = 2.0**order
    values = (weight * S_h2.eigenvalues - S_h.eigenvalues) / (weight - 1.0)
    # near-degenerate modes may cross between the two grids
    if np.any(np.diff(values) < 0):
        logger.warning(f"Richardson values for {S_h.domain_id} came out of order; sorting")
        values = np.sort(values)
    if values.size and values[0] <= 0:
        raise ConsistencyError(
            f"Extrapolação de Richardson produziu autovalor não positivo: {values[0]}",
            diagnostics={"domain_id": S_h.domain_id, "coarse": S_h.resolution, "fine": S_h2.resolution},
        )
    return Spectrum(
        eigenvalues=values,
        method=RICHARDSON,
        domain_id=S_h.domain_id,
        resolution=S_h2.resolution,
        ceiling=float(values[-1]),
    )


class SpectrumServiceInterface(ABC):
    """Interface for spectrum providers."""

    @abstractmethod
    def compute(self, polytope: Polytope, count: int) -> Spectrum:
        pass

    @abstractmethod
    def get_method_name(self) -> str:
        pass

    @property
    def is_exact(self) -> bool:
        return False


class ExactBoxSpectrumService(SpectrumServiceInterface):
    """Separable oracle for axis-aligned boxes (also recognized general rectangles/cuboids)."""

    def __init__(self, lengths):
        self.lengths = tuple(lengths)

    def compute(self, polytope: Polytope, count: int) -> Spectrum:
        logger.info(f"Enumerating {count} exact eigenvalues of box {self.lengths}")
        return box_spectrum_exact(self.lengths, count, domain_id=polytope.domain_id)

    def get_method_name(self) -> str:
        return models.EXACT_BOX

    @property
    def is_exact(self) -> bool:
        return True


class ExactTriangleSpectrumService(SpectrumServiceInterface):
    """Closed-form oracle for the equilateral triangle."""

    def __init__(self, side: float):
        self.side = side

    def compute(self, polytope: Polytope, count: int) -> Spectrum:
        logger.info(f"Enumerating {count} exact eigenvalues of equilateral triangle (side {self.side})")
        return equilateral_triangle_spectrum_exact(self.side, count, domain_id=polytope.domain_id)

    def get_method_name(self) -> str:
        return models.EXACT_TRIANGLE

    @property
    def is_exact(self) -> bool:
        return True


class FiniteDifferenceSpectrumService(SpectrumServiceInterface):
    """Finite-difference eigensolver, optionally Richardson-extrapolated from h and h/2."""

    def __init__(self, h: float, stencil: str = STANDARD, seed: int = 0, richardson: bool = False):
        self.h = h
        self.stencil = stencil
        self.seed = seed
        self.richardson = richardson

    def compute(self, polytope: Polytope, count: int) -> Spectrum:
        logger.info(f"Computing {count} FD eigenvalues of {polytope.domain_id} (h={self.h}, {self.stencil})")
        coarse = fd_spectrum(fd_assemble(polytope, self.h, self.stencil), count, self.seed)
        if not self.richardson:
            return coarse
        fine = fd_spectrum(fd_assemble(polytope, self.h / 2.0, self.stencil), count, self.seed)
        return richardson_extrapolate(coarse, fine)

    def get_method_name(self) -> str:
        return RICHARDSON if self.richardson else models.FINITE_DIFFERENCE


class SpectrumServiceFactory:
    """Factory for creating spectrum providers."""

    EXACT = "exact"
    FD = "fd"

    @staticmethod
    def create_service(method: str, polytope: Polytope, **options) -> SpectrumServiceInterface:
        if method == SpectrumServiceFactory.EXACT:
            oracle = detect_exact_oracle(polytope)
            if oracle is None:
                raise ConfigError(f"Domínio {polytope.domain_id} não possui oráculo exato; use --method fd")
            kind, parameters = oracle
            if kind == EXACT_BOX:
                return ExactBoxSpectrumService(parameters)
            if kind == EXACT_TRIANGLE:
                return ExactTriangleSpectrumService(parameters[0])

        if method == SpectrumServiceFactory.FD:
            h = options.get("h")
            if h is None or h <= 0:
                raise ConfigError("O método fd exige h > 0")
            return FiniteDifferenceSpectrumService(
                h=h,
                stencil=options.get("stencil", STANDARD),
                seed=options.get("seed", 0),
                richardson=options.get("richardson", False),
            )

        raise ConfigError(f"Método de espectro não suportado: {method}")
