"""
Domain entities of the proofkit app.
"""
from dataclasses import dataclass

import numpy as np

from spectral_bounds.apps.core.exceptions import ConsistencyError

FIRST_BRANCH = "plateau"
SECOND_BRANCH = "moments"


@dataclass(frozen=True)
class ProofConstants:
    """Constants the lower-bound argument fixes for one dimension, volume and λ."""

    n: int
    p: int
    D: tuple[float, ...]  # log₂ D_q, q = 0..p+1
    beta_p_sq: float  # log₂ β_p²
    beta_p1_sq: float  # log₂ β_{p+1}²
    alpha1: float
    alpha2: float
    lambda0: float
    epsilon: float

    def __post_init__(self):
        if len(self.D) != self.p + 2:
            raise ConsistencyError(f"D deve ter {self.p + 2} termos, recebido {len(self.D)}")
        if self.p >= 1 and np.any(np.diff(self.D) <= 0):
            raise ConsistencyError("log₂ D_q deve ser estritamente crescente", diagnostics={"D": list(self.D)})
        expected = self.alpha1**-0.5 / (81.0 * 2.0**self.n)
        if not np.isclose(self.alpha2, expected, rtol=1e-12):
            raise ConsistencyError("α₂ inconsistente com α₁", diagnostics={"alpha2": self.alpha2, "expected": expected})
        if min(self.alpha1, self.alpha2, self.lambda0, self.epsilon) <= 0:
            raise ConsistencyError("Constantes devem ser positivas")


@dataclass(frozen=True)
class DerivativeNormBound:
    log2_value: float
    branch: str
    log2_branches: tuple[float, float]

    @property
    def value(self) -> float:
        return float(2.0**self.log2_value)


@dataclass(frozen=True)
class DichotomyResult:
    """Grid maxima m_0, m_1, m_p and which of the two inequalities they satisfy."""

    m0: float
    m1: float
    mp: float
    interpolation_holds: bool
    small_derivative_holds: bool

    @property
    def violation(self) -> bool:
        return not (self.interpolation_holds or self.small_derivative_holds)


@dataclass(frozen=True)
class AuditCheck:
    name: str
    passed: bool
    cases: int
    detail: str = ""
