"""
Domain entities of the harness app.
"""
from dataclasses import dataclass, field

from spectral_bounds.apps.bounds.models import BoundReport
from spectral_bounds.apps.core.exceptions import EXIT_OK, EXIT_VIOLATION, ConfigError
from spectral_bounds.apps.proofkit.models import AuditCheck
from spectral_bounds.apps.spectra.models import STANDARD, STENCIL_CHOICES

EXACT = "exact"
FD = "fd"
METHOD_CHOICES = (EXACT, FD)


@dataclass(frozen=True)
class CampaignConfig:
    """Everything one verify campaign needs; flags of the verify command map onto these fields."""

    domain_file: str
    melas_constant: float
    k_max: int = 1000
    method: str = EXACT
    h: float | None = None
    fraction: float = 1.0 / 3.0
    seed: int = 0
    output: str | None = None
    tiling: bool = False
    stencil: str = STANDARD
    richardson: bool = False
    inject_fault: bool = False

    def __post_init__(self):
        if self.k_max < 1:
            raise ConfigError(f"k_max deve ser ≥ 1, recebido {self.k_max}")
        if self.method not in METHOD_CHOICES:
            raise ConfigError(f"Método desconhecido: {self.method}")
        if self.method == FD and (self.h is None or self.h <= 0):
            raise ConfigError("O método fd exige h > 0")
        if self.melas_constant is None or not self.melas_constant > 0:
            raise ConfigError(f"A constante de Melas deve ser positiva, recebido {self.melas_constant}")
        if not 0 < self.fraction < 1:
            raise ConfigError(f"fraction deve estar em (0, 1), recebido {self.fraction}")
        if self.stencil not in STENCIL_CHOICES:
            raise ConfigError(f"Estêncil desconhecido: {self.stencil}")


@dataclass(frozen=True)
class CampaignResult:
    domain_id: str
    method: str
    k_max: int
    lambda0: float
    lambda0_entries: tuple[float, float, float, float]
    first_active_k: int | None
    violation_count: int
    conjecture_count: int
    violated_bounds: tuple[str, ...] = ()
    output: str | None = None
    reports: tuple[BoundReport, ...] = field(default=(), repr=False)

    @property
    def exit_code(self) -> int:
        return EXIT_VIOLATION if self.violation_count else EXIT_OK


@dataclass(frozen=True)
class AsymptoticsResult:
    """Least-squares fit r_k ≈ coefficient·k^slope of the average's excess over the Weyl term."""

    domain_id: str
    n: int
    k_max: int
    k_start: int
    slope: float
    coefficient: float
    boundary_constant: float
    max_two_term_error: float
    output: str | None = None

    @property
    def expected_slope(self) -> float:
        return 1.0 / self.n


@dataclass(frozen=True)
class ProofkitAuditResult:
    checks: tuple[AuditCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_VIOLATION
