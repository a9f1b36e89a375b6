"""
Harness app use cases - verify campaigns, the proofkit audit and the asymptotics fit.
"""
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np
import prometheus_client
from django.conf import settings
from loguru import logger

from spectral_bounds.apps.bounds.models import POLYA_CONJECTURE, BoundsConfig
from spectral_bounds.apps.bounds.services import (
    first_active_k,
    lambda0_entries,
    summarize_domain,
    verify,
    weyl_average,
    weyl_two_term,
)
from spectral_bounds.apps.core.exceptions import ConfigError, ConsistencyError
from spectral_bounds.apps.geometry.repositories import JsonFilePolytopeRepository, PolytopeRepositoryInterface
from spectral_bounds.apps.geometry.services import detect_exact_oracle
from spectral_bounds.apps.proofkit.audit import run_audit
from spectral_bounds.apps.spectra.models import Spectrum
from spectral_bounds.apps.spectra.repositories import CacheSpectrumRepository, SpectrumRepositoryInterface
from spectral_bounds.apps.spectra.services import SpectrumServiceFactory, eigenvalue_averages

from .models import FD, AsymptoticsResult, CampaignConfig, CampaignResult, ProofkitAuditResult
from .reports import write_asymptotics, write_bound_reports

# Prometheus metrics
campaigns_run = prometheus_client.Counter(
    "spectral_bounds_campaigns_total", "Total number of verify campaigns", ["method", "outcome"]
)

campaign_duration = prometheus_client.Histogram(
    "spectral_bounds_campaign_duration_seconds", "Duration of verify campaigns", ["method"]
)

spectrum_cache_hits = prometheus_client.Counter("spectral_bounds_spectrum_cache_hits_total", "Spectrum cache hits")


class RunVerifyUseCaseInterface(ABC):
    """Interface for the verify use case."""

    @abstractmethod
    def execute(self, config: CampaignConfig) -> CampaignResult:
        """
        Run one verify campaign.

        Args:
            config: Campaign configuration

        Returns:
            Campaign result with summary values and the per-k reports
        """
        ...


class RunVerifyUseCase(RunVerifyUseCaseInterface):
    """
    Load → summarize geometry → spectrum → verify → CSV.
    Spectra are cached by geometry, method and solver parameters.
    """

    def __init__(
        self,
        polytope_repository: PolytopeRepositoryInterface | None = None,
        spectrum_repository: SpectrumRepositoryInterface | None = None,
    ):
        self.polytope_repository = polytope_repository or JsonFilePolytopeRepository()
        self.spectrum_repository = spectrum_repository or CacheSpectrumRepository()

    def execute(self, config: CampaignConfig) -> CampaignResult:
        logger.info(f"Starting verify campaign on {config.domain_file} ({config.method}, k_max={config.k_max})")

        with campaign_duration.labels(method=config.method).time():
            polytope = self.polytope_repository.load(config.domain_file)
            summary = summarize_domain(polytope, config.fraction)
            if config.tiling and not summary.tiling:
                summary = replace(summary, tiling=True)

            spectrum = self._get_spectrum(polytope, config)
            if config.inject_fault:
                spectrum = self._inject_fault(spectrum)

            bounds_config = BoundsConfig(
                melas_constant=config.melas_constant, slack=getattr(settings, "VIOLATION_SLACK", 1e-9)
            )
            reports = verify(spectrum, summary, config.k_max, bounds_config)

            if config.output:
                write_bound_reports(config.output, reports)

        flagged = [(report.k, name) for report in reports for name in report.violations]
        theorem = [(k, name) for k, name in flagged if name != POLYA_CONJECTURE]
        entries = lambda0_entries(summary.n, summary.V, summary.min_d, summary.min_A)
        result = CampaignResult(
            domain_id=summary.domain_id,
            method=spectrum.method,
            k_max=config.k_max,
            lambda0=float(max(entries)),
            lambda0_entries=tuple(float(entry) for entry in entries),
            first_active_k=first_active_k(reports),
            violation_count=len(theorem),
            conjecture_count=len(flagged) - len(theorem),
            violated_bounds=tuple(sorted({name for _, name in flagged})),
            output=config.output,
            reports=tuple(reports),
        )

        outcome = "violation" if result.violation_count else "ok"
        campaigns_run.labels(method=config.method, outcome=outcome).inc()
        logger.info(
            f"Campaign on {result.domain_id} finished: {result.violation_count} theorem violations, "
            f"{result.conjecture_count} conjecture violations"
        )
        return result

    def _get_spectrum(self, polytope, config: CampaignConfig) -> Spectrum:
        parameters = {}
        if config.method == FD:
            parameters = {"h": config.h, "stencil": config.stencil, "seed": config.seed, "richardson": config.richardson}

        cached = self.spectrum_repository.get_spectrum(polytope, config.method, config.k_max, **parameters)
        if cached is not None:
            spectrum_cache_hits.inc()
            return cached

        service = SpectrumServiceFactory.create_service(config.method, polytope, **parameters)
        spectrum = service.compute(polytope, config.k_max)
        self.spectrum_repository.save_spectrum(polytope, config.method, spectrum, **parameters)
        return spectrum

    @staticmethod
    def _inject_fault(spectrum: Spectrum) -> Spectrum:
        logger.warning(f"Injecting fault into the spectrum of {spectrum.domain_id}: halving λ_1")
        values = np.array(spectrum.eigenvalues)
        values[0] /= 2.0
        return Spectrum(
            eigenvalues=values,
            method=spectrum.method,
            domain_id=spectrum.domain_id,
            resolution=spectrum.resolution,
            ceiling=spectrum.ceiling,
        )


class RunCampaignsUseCase:
    """Run several campaigns on a worker pool; results keep the input order."""

    def __init__(self, verify_use_case: RunVerifyUseCaseInterface | None = None, max_workers: int | None = None):
        self.verify_use_case = verify_use_case or RunVerifyUseCase()
        self.max_workers = max_workers or getattr(settings, "SPECTRAL_BOUNDS_THREADS", 4)

    def execute(self, configs: list[CampaignConfig]) -> list[CampaignResult]:
        if not configs:
            raise ConfigError("Nenhum domínio informado")
        if len(configs) == 1:
            return [self.verify_use_case.execute(configs[0])]

        workers = max(1, min(self.max_workers, len(configs)))
        logger.info(f"Running {len(configs)} campaigns on {workers} workers")
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.verify_use_case.execute, configs))


class RunProofkitAuditUseCase:
    """Use case for the proofkit audit."""

    def execute(self, n_range: range, p_range: range, sample_count: int, seed: int) -> ProofkitAuditResult:
        result = ProofkitAuditResult(checks=tuple(run_audit(n_range, p_range, sample_count, seed)))
        logger.info(f"Proofkit audit finished: {'passed' if result.passed else 'failed'}")
        return result


class RunAsymptoticsUseCase:
    """
    Fit the excess of the eigenvalue average over the Weyl term on an exact spectrum.
    """

    def __init__(self, polytope_repository: PolytopeRepositoryInterface | None = None):
        self.polytope_repository = polytope_repository or JsonFilePolytopeRepository()

    def execute(self, domain_file: str, k_max: int, output: str | None = None) -> AsymptoticsResult:
        if k_max < 100:
            raise ConfigError(f"k_max deve ser ≥ 100 para o ajuste assintótico, recebido {k_max}")

        polytope = self.polytope_repository.load(domain_file)
        if detect_exact_oracle(polytope) is None:
            raise ConfigError(f"Domínio {polytope.domain_id} não possui oráculo exato; assintótica exige espectro exato")

        summary = summarize_domain(polytope)
        spectrum = SpectrumServiceFactory.create_service(SpectrumServiceFactory.EXACT, polytope).compute(
            polytope, k_max
        )

        k_start = max(1, k_max // 10)
        ks = np.arange(k_start, k_max + 1)
        averages = eigenvalue_averages(spectrum)[k_start - 1 :]
        weyl = np.asarray(weyl_average(ks, summary.n, summary.V))
        remainders = averages - weyl
        if np.any(remainders <= 0):
            raise ConsistencyError(
                "Resto não positivo no ajuste assintótico",
                diagnostics={"k": ks[remainders <= 0][:5].tolist(), "domain": summary.domain_id},
            )

        slope, intercept = np.polyfit(np.log(ks), np.log(remainders), 1)
        coefficient = float(np.exp(intercept))
        boundary_constant = coefficient * summary.V ** (1.0 + 1.0 / summary.n) / summary.A
        two_term = np.asarray(weyl_two_term(ks, summary, boundary_constant))
        max_error = float(np.max(np.abs(two_term - averages) / averages))

        if output:
            write_asymptotics(output, ks, averages, weyl, remainders)

        logger.info(
            f"Asymptotics on {summary.domain_id}: slope={slope:.4f} (1/n={1.0 / summary.n:.4f}), "
            f"coefficient={coefficient:.6g}"
        )
        return AsymptoticsResult(
            domain_id=summary.domain_id,
            n=summary.n,
            k_max=k_max,
            k_start=k_start,
            slope=float(slope),
            coefficient=coefficient,
            boundary_constant=float(boundary_constant),
            max_two_term_error=max_error,
            output=output,
        )
