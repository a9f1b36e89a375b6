"""
Domain entities of the bounds app.
"""
from dataclasses import dataclass

from spectral_bounds.apps.core.exceptions import ConfigError, InvalidGeometryError

POLYA = "polya"
POLYA_CONJECTURE = "polya_conjecture"
LIYAU_AVG = "liyau_avg"
LIYAU_KTH = "liyau_kth"
MELAS = "melas"
THEOREM1 = "theorem1"
COROLLARY1 = "corollary1"

# Violations of these are reported but never fail a campaign.
CONJECTURAL_BOUNDS = frozenset({POLYA_CONJECTURE})

CSV_COLUMNS = (
    "k",
    "lambda_k",
    "avg_k",
    "weyl_kth",
    "weyl_avg",
    "polya",
    "liyau_avg",
    "liyau_kth",
    "melas",
    "theorem1",
    "corollary1",
    "theta",
    "epsilon",
    "violations",
)


@dataclass(frozen=True)
class DomainSummary:
    """Geometric inputs of every bound for one polytope and its face decomposition."""

    n: int
    V: float
    A: float
    I: float
    min_d: float
    min_A: float
    B_n: float
    domain_id: str = "domain"
    tiling: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise InvalidGeometryError(f"Dimensão deve ser ≥ 2, recebido {self.n}")
        positives = {"V": self.V, "I": self.I, "min_d": self.min_d, "min_A": self.min_A, "B_n": self.B_n}
        for name, value in positives.items():
            if not value > 0:
                raise InvalidGeometryError(f"{name} deve ser positivo, recebido {value}")
        if self.A < 0:
            raise InvalidGeometryError(f"A deve ser não negativo, recebido {self.A}")


@dataclass(frozen=True)
class BoundsConfig:
    melas_constant: float
    slack: float = 1e-9

    def __post_init__(self):
        if self.melas_constant is None or not self.melas_constant > 0:
            raise ConfigError(f"A constante de Melas deve ser positiva, recebido {self.melas_constant}")
        if self.slack < 0:
            raise ConfigError(f"Folga deve ser não negativa, recebido {self.slack}")


@dataclass(frozen=True)
class BoundReport:
    """Every bound at one k next to the measured λ_k and eigenvalue average; NaN marks undefined values."""

    k: int
    lambda_k: float
    avg_k: float
    weyl_kth: float
    weyl_avg: float
    polya: float
    liyau_avg: float
    liyau_kth: float
    melas: float
    theorem1: float
    corollary1: float
    theta: int
    epsilon: float
    violations: tuple[str, ...] = ()

    @property
    def theorem_violations(self) -> tuple[str, ...]:
        return tuple(name for name in self.violations if name not in CONJECTURAL_BOUNDS)
