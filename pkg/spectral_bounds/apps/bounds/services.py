"""
Bounds app services - closed-form eigenvalue lower bounds and their verification against spectra.

Every formula is vectorized over ``k`` and ``λ_k``: scalars in, floats out; arrays in, arrays out.
Undefined values (ε below its floor, the k-only corollary before it applies) are NaN.
"""
import numpy as np
import prometheus_client
from django.conf import settings
from loguru import logger

from spectral_bounds.apps.core.exceptions import ConfigError, ConsistencyError, DomainError, SpectrumRangeError
from spectral_bounds.apps.geometry.decomposition import face_decomposition
from spectral_bounds.apps.geometry.models import Polytope
from spectral_bounds.apps.geometry.services import moment_of_inertia, surface_area, unit_ball_volume, volume
from spectral_bounds.apps.spectra.models import Spectrum
from spectral_bounds.apps.spectra.services import eigenvalue_averages

from .models import (
    COROLLARY1,
    LIYAU_AVG,
    LIYAU_KTH,
    MELAS,
    POLYA,
    POLYA_CONJECTURE,
    THEOREM1,
    BoundReport,
    BoundsConfig,
    DomainSummary,
)

# Prometheus metrics
bound_violations = prometheus_client.Counter(
    "spectral_bounds_violations_total", "Total number of bound violations found by verify", ["bound"]
)


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def summarize_domain(P: Polytope, fraction: float | None = None) -> DomainSummary:
    decomposition = face_decomposition(P, fraction)
    summary = DomainSummary(
        n=P.dimension,
        V=volume(P),
        A=surface_area(P),
        I=moment_of_inertia(P),
        min_d=decomposition.min_distance,
        min_A=decomposition.min_face_area,
        B_n=unit_ball_volume(P.dimension),
        domain_id=P.domain_id,
        tiling=P.tiling,
    )
    logger.info(
        f"Domain {summary.domain_id}: n={summary.n} V={summary.V:.6g} A={summary.A:.6g} I={summary.I:.6g} "
        f"min_d={summary.min_d:.6g} min_A={summary.min_A:.6g}"
    )
    return summary


def weyl_kth(k, n: int, V: float):
    """4π²k^{2/n}/(B_n V)^{2/n}."""
    k = np.asarray(k, dtype=float)
    return _out(4.0 * np.pi**2 * (k / (unit_ball_volume(n) * V)) ** (2.0 / n))


def weyl_average(k, n: int, V: float):
    return _out(n / (n + 2.0) * np.asarray(weyl_kth(k, n, V)))


def polya_bound(k, n: int, V: float):
    return weyl_kth(k, n, V)


def liyau_average_bound(k, n: int, V: float):
    return weyl_average(k, n, V)


def liyau_kth_bound(k, n: int, V: float):
    return weyl_average(k, n, V)


def melas_bound(k, n: int, V: float, I: float, M_n: float):
    if M_n is None or not M_n > 0:
        raise ConfigError(f"A constante de Melas deve ser positiva, recebido {M_n}")
    return _out(np.asarray(liyau_average_bound(k, n, V)) + M_n * V / I)


def weyl_two_term(k, D: DomainSummary, c_n: float):
    """Leading average term plus c_n·A/V^{1+1/n}·k^{1/n}."""
    k = np.asarray(k, dtype=float)
    return _out(np.asarray(weyl_average(k, D.n, D.V)) + c_n * D.A / D.V ** (1.0 + 1.0 / D.n) * k ** (1.0 / D.n))


def alpha1(n: int) -> float:
    """√((3/B_n)(4nπ²/(n+2))^{n/2})."""
    if n < 2:
        raise DomainError(f"Dimensão deve ser ≥ 2, recebido {n}")
    return float(np.sqrt(3.0 / unit_ball_volume(n) * (4.0 * n * np.pi**2 / (n + 2.0)) ** (n / 2.0)))


def lambda0_entries(n: int, V: float, min_d: float, min_A: float) -> tuple[float, float, float, float]:
    a1 = alpha1(n)
    return (
        4.0 * n / min_d**2,
        (a1 / V) ** (2.0 / n),
        2.0 ** (2.0 * (n + 12) / n) * (a1 / V) ** (2.0 * (n - 1) / n),
        (12.0 / min_A) ** (2.0 / (n - 1)),
    )


def lambda0(n: int, V: float, min_d: float, min_A: float) -> float:
    if min(V, min_d, min_A) <= 0:
        raise DomainError("V, min_d e min_A devem ser positivos")
    return float(max(lambda0_entries(n, V, min_d, min_A)))


def theta(t):
    """Θ(t) = 1 for t > 0, else 0."""
    if np.ndim(t) == 0:
        return int(t > 0)
    return (np.asarray(t) > 0).astype(int)


def _inverse_floor_root(n: int, log2_argument):
    """1/⌊√(log₂(·)/(n+12))⌋, NaN where the floor is below 1."""
    log2_argument = np.asarray(log2_argument, dtype=float)
    floors = np.floor(np.sqrt(np.clip(log2_argument, 0.0, None) / (n + 12.0)))
    with np.errstate(divide="ignore"):
        return np.where(floors >= 1.0, 1.0 / floors, np.nan)


def epsilon_k(n: int, V: float, lambda_k):
    """ε = 1/⌊√(log₂((V/α₁)^{n−1}λ_k^{n/2})/(n+12))⌋; NaN when undefined."""
    lam = np.asarray(lambda_k, dtype=float)
    if np.any(lam <= 0):
        raise DomainError("λ_k deve ser positivo")
    log2_argument = (n - 1) * np.log2(V / alpha1(n)) + 0.5 * n * np.log2(lam)
    return _out(_inverse_floor_root(n, log2_argument))


def theorem1_constant(n: int) -> float:
    """3⁻⁴·2^{3−n}·π²/((n+2)·B_n^{2/n})."""
    return 2.0 ** (3 - n) * np.pi**2 / (81.0 * (n + 2) * unit_ball_volume(n) ** (2.0 / n))


def theorem1_correction(k, lambda_k, D: DomainSummary):
    """Boundary correction of the average bound, including the Θ(λ_k − λ₀) switch."""
    k = np.asarray(k, dtype=float)
    lam = np.asarray(lambda_k, dtype=float)
    n, V = D.n, D.V
    threshold = lambda0(n, V, D.min_d, D.min_A)
    active = lam > threshold
    eps = np.asarray(epsilon_k(n, V, lam))
    if np.any(active & np.isnan(eps)):
        bad = np.flatnonzero(np.atleast_1d(active & np.isnan(eps)))
        raise ConsistencyError(
            "Θ=1 com ε indefinido",
            diagnostics={"indices": bad.tolist(), "lambda0": threshold, "domain": D.domain_id},
        )

    eps = np.where(active, eps, 0.0)
    log_ratio = np.log(V * lam / alpha1(n))
    correction = (
        theorem1_constant(n)
        * D.A
        / V ** (1.0 + 2.0 / n)
        * np.exp(-n * eps * log_ratio)
        * k ** (2.0 / n)
        / np.sqrt(lam)
    )
    return _out(np.where(active, correction, 0.0))


def theorem1_bound(k, lambda_k, D: DomainSummary):
    return _out(np.asarray(weyl_average(k, D.n, D.V)) + np.asarray(theorem1_correction(k, lambda_k, D)))


def corollary1_epsilon(k, D: DomainSummary):
    """ε with λ_k replaced by its Weyl expression; NaN while the corollary does not apply."""
    k = np.asarray(k, dtype=float)
    n, V = D.n, D.V
    log2_argument = (
        (n - 1) * np.log2(V / alpha1(n))
        + 0.5 * n * np.log2(4.0 * n * np.pi**2 / (n + 2.0))
        + np.log2(k / (D.B_n * V))
    )
    return _out(_inverse_floor_root(n, log2_argument))


def corollary1_constant(n: int) -> float:
    """π/(3⁴·2^{n−1}·(n+2)·B_n^{1/n})."""
    return np.pi / (81.0 * 2.0 ** (n - 1) * (n + 2) * unit_ball_volume(n) ** (1.0 / n))


def corollary1_bound(k, D: DomainSummary):
    k = np.asarray(k, dtype=float)
    n, V = D.n, D.V
    eps = np.asarray(corollary1_epsilon(k, D))
    with np.errstate(invalid="ignore"):
        correction = corollary1_constant(n) * D.A / V ** (1.0 + 1.0 / n) * k ** (1.0 / n - 2.0 * eps)
    return _out(np.asarray(weyl_average(k, n, V)) + correction)


def corollary1_first_k(D: DomainSummary) -> int:
    """Smallest k at which the corollary bound applies."""
    n, V = D.n, D.V
    log2_k = (
        (n + 12)
        - (n - 1) * np.log2(V / alpha1(n))
        - 0.5 * n * np.log2(4.0 * n * np.pi**2 / (n + 2.0))
        + np.log2(D.B_n * V)
    )
    k = max(1, int(np.ceil(2.0**log2_k)))
    while k > 1 and not np.isnan(corollary1_epsilon(k - 1, D)):
        k -= 1
    while np.isnan(corollary1_epsilon(k, D)):
        k += 1
    return k


def _exceeds(bound: np.ndarray, measured: np.ndarray, slack: float) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        return np.nan_to_num(bound, nan=-np.inf) > measured + slack * measured


def verify(S: Spectrum, D: DomainSummary, k_max: int, config: BoundsConfig) -> list[BoundReport]:
    """Evaluate every bound for k = 1..k_max against λ_k and the eigenvalue average."""
    if k_max < 1 or k_max > len(S):
        raise SpectrumRangeError(f"k_max={k_max} fora de [1, {len(S)}]")

    n, V = D.n, D.V
    k = np.arange(1, k_max + 1, dtype=float)
    lam = np.asarray(S.eigenvalues[:k_max], dtype=float)
    avg = eigenvalue_averages(S)[:k_max]

    columns = {
        "weyl_kth": np.asarray(weyl_kth(k, n, V)),
        "weyl_avg": np.asarray(weyl_average(k, n, V)),
        POLYA: np.asarray(polya_bound(k, n, V)),
        LIYAU_AVG: np.asarray(liyau_average_bound(k, n, V)),
        LIYAU_KTH: np.asarray(liyau_kth_bound(k, n, V)),
        MELAS: np.asarray(melas_bound(k, n, V, D.I, config.melas_constant)),
        THEOREM1: np.asarray(theorem1_bound(k, lam, D)),
        COROLLARY1: np.asarray(corollary1_bound(k, D)),
    }
    active = lam > lambda0(n, V, D.min_d, D.min_A)
    eps = np.asarray(epsilon_k(n, V, lam))

    polya_name = POLYA if D.tiling else POLYA_CONJECTURE
    checks = (
        (polya_name, columns[POLYA], lam),
        (LIYAU_KTH, columns[LIYAU_KTH], lam),
        (LIYAU_AVG, columns[LIYAU_AVG], avg),
        (MELAS, columns[MELAS], avg),
        (THEOREM1, columns[THEOREM1], avg),
        (COROLLARY1, columns[COROLLARY1], avg),
    )
    flags = [(name, _exceeds(bound, measured, config.slack)) for name, bound, measured in checks]
    for name, flagged in flags:
        count = int(flagged.sum())
        if count:
            bound_violations.labels(bound=name).inc(count)
            level = "warning" if name == POLYA_CONJECTURE else "error"
            logger.log(level.upper(), f"{count} violations of {name} on {D.domain_id}, first at k={int(k[flagged][0])}")

    reports = []
    for index in range(k_max):
        reports.append(
            BoundReport(
                k=index + 1,
                lambda_k=float(lam[index]),
                avg_k=float(avg[index]),
                weyl_kth=float(columns["weyl_kth"][index]),
                weyl_avg=float(columns["weyl_avg"][index]),
                polya=float(columns[POLYA][index]),
                liyau_avg=float(columns[LIYAU_AVG][index]),
                liyau_kth=float(columns[LIYAU_KTH][index]),
                melas=float(columns[MELAS][index]),
                theorem1=float(columns[THEOREM1][index]),
                corollary1=float(columns[COROLLARY1][index]),
                theta=int(active[index]),
                epsilon=float(eps[index]),
                violations=tuple(name for name, flagged in flags if flagged[index]),
            )
        )
    return reports


def first_active_k(reports: list[BoundReport]) -> int | None:
    """First k whose report has Θ = 1."""
    return next((report.k for report in reports if report.theta), None)


def default_bounds_config(melas_constant: float | None = None) -> BoundsConfig:
    if melas_constant is None:
        melas_constant = getattr(settings, "MELAS_CONSTANT", None)
    return BoundsConfig(melas_constant=melas_constant, slack=getattr(settings, "VIOLATION_SLACK", 1e-9))
