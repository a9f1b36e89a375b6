"""
Proofkit audit - sweeps every proofkit invariant over parameter ranges.
"""
import math
from collections.abc import Callable

import numpy as np
from numpy.polynomial import Polynomial
from loguru import logger

from spectral_bounds.apps.bounds.services import lambda0, summarize_domain, theorem1_bound
from spectral_bounds.apps.core.exceptions import ConfigError
from spectral_bounds.apps.geometry.models import BOX, Polytope
from spectral_bounds.apps.geometry.services import face_areas
from spectral_bounds.apps.spectra.services import box_spectrum_exact, eigenvalue_averages

from . import services
from .models import AuditCheck

BUMP_P_RANGE = range(1, 6)
BUMP_N_RANGE = range(2, 5)
BUMP_LAMBDAS = (1.0, 1e2, 1e6)
EXACT_D_N_MAX = 4
EXACT_D_P_MAX = 10
BALL_RADII = (0.1, 1.0, 10.0)
BALL_DIMENSIONS = (2, 3, 4)
DICHOTOMY_POLYNOMIALS = 1000
DICHOTOMY_FREQUENCIES = 100
RECONSTRUCTION_CASES = 100
RECONSTRUCTION_K_MAX = 20_000
RELATIVE_TOLERANCE = 1e-9
LOG_TOLERANCE = 1e-12

# Exact-oracle domains used by the threshold algebra and reconstruction checks
AUDIT_BOXES = ((1.0, 1.0), (1.0, 2.0, 3.0))


def _check(name: str, failures: list[str], cases: int) -> AuditCheck:
    passed = not failures
    detail = "; ".join(failures[:5]) + (f" (+{len(failures) - 5})" if len(failures) > 5 else "")
    if passed:
        logger.info(f"Audit check {name} passed ({cases} cases)")
    else:
        logger.error(f"Audit check {name} failed on {len(failures)} of {cases} cases: {detail}")
    return AuditCheck(name=name, passed=passed, cases=cases, detail=detail)


def check_d_bound(n_range: range, p_range: range) -> AuditCheck:
    failures = [f"n={n} p={p}" for n in n_range for p in p_range if not services.d_bound_check(n, p)]
    return _check("d_bound", failures, len(n_range) * len(p_range))


def check_d_exact(n_range: range, p_range: range) -> AuditCheck:
    failures = []
    cases = 0
    for n in (n for n in n_range if n <= EXACT_D_N_MAX):
        for p in (p for p in p_range if p <= EXACT_D_P_MAX):
            logs = services.d_sequence(n, p)
            for q, exact in enumerate(services.d_sequence_exact(n, p)):
                cases += 1
                reference = math.log2(exact)
                error = abs(logs[q] - reference) / max(reference, 1.0)
                if error > LOG_TOLERANCE:
                    failures.append(f"n={n} p={p} q={q} erro={error:.2e}")
    return _check("d_exact", failures, cases)


def check_bump_bounds(sample_count: int, rng: np.random.Generator) -> AuditCheck:
    failures = []
    cases = 0

    x = np.linspace(0.0, 1.0, sample_count)
    _, dg, d2g = services.g_eval(x)
    cases += 1
    if np.max(np.abs(dg)) >= 2.5 or np.max(np.abs(d2g)) >= 11.0:
        failures.append("g")

    for p in BUMP_P_RANGE:
        for q in range(p):
            support = (2 * p - q + 1) / (2 * p)
            t = np.linspace(-1.1 * support, 1.1 * support, sample_count)
            v, dv, d2v = services.v_eval(q, p, t)
            cases += 1
            if np.max(np.abs(v)) > 1.0 or np.max(np.abs(dv)) >= 5 * p or np.max(np.abs(d2v)) >= 44 * p * p:
                failures.append(f"v q={q} p={p}")

            for n in BUMP_N_RANGE:
                for lam in BUMP_LAMBDAS:
                    root = math.sqrt(lam)
                    points = rng.uniform(-support / root, support / root, size=(sample_count, n))
                    value, gradient, laplacian = services.w_eval(q, p, lam, points)
                    cases += 1
                    if (
                        np.max(value) > 1.0
                        or np.max(gradient) >= 5.0 * math.sqrt(n) * root * p
                        or np.max(np.abs(laplacian)) >= 44.0 * n * lam * p * p
                    ):
                        failures.append(f"W q={q} p={p} n={n} λ={lam:g}")
    return _check("bump_bounds", failures, cases)


def check_ball_equality() -> AuditCheck:
    failures = []
    for n in BALL_DIMENSIONS:
        for radius in BALL_RADII:
            mass, second = services.ball_indicator_moments(1.0, radius, n)
            bound = services.liyau_functional_bound(1.0, second, n)
            if abs(bound - mass) > RELATIVE_TOLERANCE * mass:
                failures.append(f"n={n} R={radius}")
    return _check("liyau_ball_equality", failures, len(BALL_DIMENSIONS) * len(BALL_RADII))


def _polynomial_derivatives(poly: Polynomial) -> Callable[[np.ndarray, int], np.ndarray]:
    return lambda t, order: poly.deriv(order)(t) if order else poly(t)


def _sine_derivatives(omega: float) -> Callable[[np.ndarray, int], np.ndarray]:
    return lambda t, order: omega**order * np.sin(omega * t + order * math.pi / 2.0)


def check_dichotomy(rng: np.random.Generator) -> AuditCheck:
    failures = []
    for trial in range(DICHOTOMY_POLYNOMIALS):
        p = int(rng.integers(2, 4))
        lam = float(10.0 ** rng.uniform(0.0, 2.0))
        degree = int(rng.integers(p, 7))
        coefficients = rng.standard_normal(degree + 1)
        coefficients[-1] = math.copysign(max(abs(coefficients[-1]), 0.1), coefficients[-1])
        result = services.confirm_dichotomy_violation(_polynomial_derivatives(Polynomial(coefficients)), p, lam)
        if result.violation:
            failures.append(f"polinômio #{trial} p={p} λ={lam:.3g}")

    for omega in np.linspace(0.1, 50.0, DICHOTOMY_FREQUENCIES):
        result = services.confirm_dichotomy_violation(_sine_derivatives(float(omega)), 2, 1.0)
        if result.violation:
            failures.append(f"sen ω={omega:.3g}")
    return _check("dichotomy", failures, DICHOTOMY_POLYNOMIALS + DICHOTOMY_FREQUENCIES)


def _audit_summaries():
    return [summarize_domain(Polytope(dimension=len(sides), kind=BOX, lengths=sides)) for sides in AUDIT_BOXES]


def check_threshold_algebra(summaries) -> AuditCheck:
    """Above λ₀: p is defined, every face carries at least two cubes, λ is admissible and M(λ) is positive."""
    failures = []
    cases = 0
    for summary in summaries:
        threshold = lambda0(summary.n, summary.V, summary.min_d, summary.min_A)
        for factor in (1.0 + 1e-12, 1.5, 10.0, 1e6):
            lam = threshold * factor
            cases += 1
            p = services.choose_p(summary.n, summary.V, lam)
            if p is None:
                failures.append(f"{summary.domain_id} λ={lam:.6g}: p indefinido")
                continue
            if services.rectangle_count(summary.min_A, lam, summary.n) < 2:
                failures.append(f"{summary.domain_id} λ={lam:.6g}: N_i < 2")
            if lam < services.admissible_lambda_threshold(summary.min_d, summary.n):
                failures.append(f"{summary.domain_id} λ={lam:.6g}: λ não admissível")
            if services.m_lambda(lam, summary, p) <= 0:
                failures.append(f"{summary.domain_id} λ={lam:.6g}: M(λ) ≤ 0")
    return _check("threshold_algebra", failures, cases)


def check_reconstruction(summaries, rng: np.random.Generator) -> AuditCheck:
    """Rebuild the corrected average bound for sampled k on the exact-oracle boxes.

    The linearized value must reproduce ``theorem1_bound``; that part is a consistency identity
    between the proofkit and bounds apps. The independent parts: the M(λ) correction never
    exceeds the deficit summed rectangle by rectangle over the actual faces, the sharp value
    inverts the Li–Yau functional bound back to k, and no bound exceeds the measured average.
    """
    failures = []
    per_domain = RECONSTRUCTION_CASES // len(summaries)
    for sides, summary in zip(AUDIT_BOXES, summaries, strict=True):
        areas = face_areas(Polytope(dimension=len(sides), kind=BOX, lengths=sides))
        spectrum = box_spectrum_exact(sides, RECONSTRUCTION_K_MAX, domain_id=summary.domain_id)
        averages = eigenvalue_averages(spectrum)
        for k in sorted(rng.choice(np.arange(1, RECONSTRUCTION_K_MAX + 1), size=per_domain, replace=False)):
            lam = float(spectrum.eigenvalues[k - 1])
            linearized, sharp = services.reconstruct_theorem1(int(k), lam, summary)
            expected = theorem1_bound(int(k), lam, summary)
            if abs(linearized - expected) > RELATIVE_TOLERANCE * expected:
                failures.append(f"{summary.domain_id} k={k}: {linearized!r} ≠ {expected!r}")
            if sharp < linearized * (1.0 - RELATIVE_TOLERANCE):
                failures.append(f"{summary.domain_id} k={k}: inversão direta menor que a linearizada")
            if linearized > averages[k - 1] * (1.0 + RELATIVE_TOLERANCE):
                failures.append(f"{summary.domain_id} k={k}: cota acima da média")

            p = services.choose_p(summary.n, summary.V, lam) or 1
            correction = summary.V * services.m_lambda_correction(lam, summary, p)
            deficit = services.boundary_deficit(lam, summary, areas, p)
            if correction > deficit * (1.0 + RELATIVE_TOLERANCE):
                failures.append(f"{summary.domain_id} k={k}: correção {correction!r} > soma por retângulos {deficit!r}")

            mass = services.m_lambda(lam, summary, p)
            recovered = services.liyau_functional_bound(mass, k * sharp, summary.n)
            if abs(recovered - k) > RELATIVE_TOLERANCE * k:
                failures.append(f"{summary.domain_id} k={k}: Li–Yau invertida devolve {recovered!r}")
    return _check("reconstruction", failures, per_domain * len(summaries))


def run_audit(n_range: range, p_range: range, sample_count: int = 100_000, seed: int = 0) -> list[AuditCheck]:
    """Run every proofkit check; checks are deterministic for a given seed."""
    if len(n_range) == 0 or len(p_range) == 0:
        raise ConfigError("Intervalos de n e p não podem ser vazios")
    if n_range.start < 2 or p_range.start < 1:
        raise ConfigError("Requer n ≥ 2 e p ≥ 1")
    if sample_count < 2:
        raise ConfigError("sample_count deve ser ≥ 2")

    logger.info(f"Running proofkit audit: n∈[{n_range.start},{n_range.stop - 1}] p∈[{p_range.start},{p_range.stop - 1}]")
    rng = np.random.default_rng(seed)
    summaries = _audit_summaries()
    return [
        check_d_bound(n_range, p_range),
        check_d_exact(n_range, p_range),
        check_bump_bounds(sample_count, rng),
        check_ball_equality(),
        check_dichotomy(rng),
        check_threshold_algebra(summaries),
        check_reconstruction(summaries, rng),
    ]
