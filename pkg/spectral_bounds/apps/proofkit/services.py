"""
Proofkit services - the pieces the corrected average bound is assembled from.

Bump functions and their derivative bounds, the D_q recursion, β_q², the choice of p, the
derivative dichotomy, the local lower bound on small cubes, the Li–Yau functional inequality
and the upper bound M(λ) on the Fourier mass. D_q and β_q² are kept as base-2 logarithms.
"""
import math
from collections.abc import Callable, Sequence

import numpy as np
from loguru import logger

from spectral_bounds.apps.bounds.models import DomainSummary
from spectral_bounds.apps.bounds.services import alpha1, lambda0
from spectral_bounds.apps.core.exceptions import ConsistencyError, DomainError, PreconditionError
from spectral_bounds.apps.geometry.services import unit_ball_volume

from .models import FIRST_BRANCH, SECOND_BRANCH, DichotomyResult, DerivativeNormBound, ProofConstants

DICHOTOMY_GRID_POINTS = 10_000
DICHOTOMY_REFINEMENT = 10


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def g_eval(x):
    """g(x) = 1 − 6x⁴ + 8x⁶ − 3x⁸ with its first two derivatives, on [0, 1]."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise DomainError("g está definida apenas em [0, 1]")
    x2 = x * x
    value = 1.0 - 6.0 * x2**2 + 8.0 * x2**3 - 3.0 * x2**4
    first = -24.0 * x * x2 + 48.0 * x * x2**2 - 24.0 * x * x2**3
    second = -72.0 * x2 + 240.0 * x2**2 - 168.0 * x2**3
    return _out(value), _out(first), _out(second)


def _check_qp(q: int, p: int):
    if p < 1:
        raise DomainError(f"p deve ser ≥ 1, recebido {p}")
    if q < 0 or q > p - 1:
        raise DomainError(f"q deve estar em [0, {p - 1}], recebido {q}")


def v_eval(q: int, p: int, t):
    """v_{q,p}: 1 up to (2p−q)/(2p), then g(2pt − 2p + q) until (2p−q+1)/(2p), then 0; even in t."""
    _check_qp(q, p)
    t = np.asarray(t, dtype=float)
    s = np.abs(t)
    start = (2 * p - q) / (2 * p)
    end = (2 * p - q + 1) / (2 * p)

    ramp = (s > start) & (s < end)
    x = np.clip(2 * p * s - 2 * p + q, 0.0, 1.0)
    g, dg, d2g = g_eval(x)

    value = np.where(s <= start, 1.0, np.where(ramp, g, 0.0))
    first = np.where(ramp, 2 * p * np.sign(t) * np.asarray(dg), 0.0)
    second = np.where(ramp, 4.0 * p * p * np.asarray(d2g), 0.0)
    return _out(value), _out(first), _out(second)


def w_eval(q: int, p: int, lam: float, x):
    """W_{q,p,λ}(x) = Π v_{q,p}(√λ x_i); returns |W|, |∇W| and ΔW. ``x`` is (n,) or (m, n)."""
    if lam <= 0:
        raise DomainError(f"λ deve ser positivo, recebido {lam}")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    root = np.sqrt(lam)
    v, dv, d2v = (np.asarray(part) for part in v_eval(q, p, root * x))

    n = x.shape[1]
    value = np.prod(v, axis=1)
    gradient = np.empty_like(x)
    laplacian = np.zeros(len(x))
    for i in range(n):
        others = np.prod(np.delete(v, i, axis=1), axis=1)
        gradient[:, i] = root * dv[:, i] * others
        laplacian += lam * d2v[:, i] * others

    results = np.abs(value), np.linalg.norm(gradient, axis=1), laplacian
    if single:
        return tuple(float(r[0]) for r in results)
    return results


def d_sequence(n: int, p: int) -> list[float]:
    """log₂ D_q for q = 0..p+1."""
    if n < 2 or p < 1:
        raise DomainError(f"Requer n ≥ 2 e p ≥ 1, recebido n={n}, p={p}")
    far = math.log2(3.0 * (1.0 + 44.0**2 * n**2 * p**4))
    near = math.log2(300.0 * n * p**2)
    logs = [0.0, math.log2(3.0 * (1.0 + 44.0**2 * n**2 * p**4 + 100.0 * n * p**2))]
    for _ in range(2, p + 2):
        logs.append(float(np.logaddexp2(far + logs[-2], near + logs[-1])))
    return logs


def d_sequence_exact(n: int, p: int) -> list[int]:
    """D_q for q = 0..p+1 in exact integer arithmetic."""
    if n < 2 or p < 1:
        raise DomainError(f"Requer n ≥ 2 e p ≥ 1, recebido n={n}, p={p}")
    far = 3 * (1 + 44**2 * n**2 * p**4)
    near = 300 * n * p**2
    values = [1, 3 * (1 + 44**2 * n**2 * p**4 + 100 * n * p**2)]
    for _ in range(2, p + 2):
        values.append(far * values[-2] + near * values[-1])
    return values


def d_bound_check(n: int, p: int) -> bool:
    """log₂ D_p < (2n + 18)p²."""
    return d_sequence(n, p)[p] < (2 * n + 18) * p**2


def beta_squared(q: int, n: int, V: float, p: int, d_logs: Sequence[float] | None = None) -> float:
    """log₂ β_q² = log₂[((n+2)/(4nπ²))^{n/2}·B_n·V²·D_{q−1}] for q ∈ {p, p+1}."""
    if q not in (p, p + 1):
        raise DomainError(f"q deve ser p ou p+1, recebido q={q}, p={p}")
    if V <= 0:
        raise DomainError(f"V deve ser positivo, recebido {V}")
    d_logs = d_logs if d_logs is not None else d_sequence(n, p)
    return (
        0.5 * n * math.log2((n + 2.0) / (4.0 * n * math.pi**2))
        + math.log2(unit_ball_volume(n))
        + 2.0 * math.log2(V)
        + d_logs[q - 1]
    )


def choose_p(n: int, V: float, lam: float) -> int | None:
    """⌊√(log₂[(V/α₁)^{n−1}λ^{n/2}]/(n+12))⌋, or None below 1."""
    if lam <= 0:
        raise DomainError(f"λ deve ser positivo, recebido {lam}")
    log2_argument = (n - 1) * math.log2(V / alpha1(n)) + 0.5 * n * math.log2(lam)
    if log2_argument <= 0:
        return None
    p = math.floor(math.sqrt(log2_argument / (n + 12)))
    return p if p >= 1 else None


def lemma24_lower(n: int, V: float, lam: float, p: int) -> DerivativeNormBound:
    """(1/(9·2^{n−1}))·min{2^{−2p−5}λ^{−n/2}, 2^{−p−2}6^{1/(2p)}(β_p²+β_{p+1}²)^{−1/(2p)}λ^{−n/2−n/(2p)}}."""
    if p < 1 or lam <= 0:
        raise DomainError(f"Requer p ≥ 1 e λ > 0, recebido p={p}, λ={lam}")
    d_logs = d_sequence(n, p)
    beta_sum = float(np.logaddexp2(beta_squared(p, n, V, p, d_logs), beta_squared(p + 1, n, V, p, d_logs)))
    log_lam = math.log2(lam)

    first = -2.0 * p - 5.0 - 0.5 * n * log_lam
    second = -p - 2.0 + math.log2(6.0) / (2 * p) - beta_sum / (2 * p) - (0.5 * n + n / (2.0 * p)) * log_lam
    prefactor = -math.log2(9.0) - (n - 1)

    branch = FIRST_BRANCH if first <= second else SECOND_BRANCH
    return DerivativeNormBound(log2_value=prefactor + min(first, second), branch=branch, log2_branches=(first, second))


def liyau_functional_bound(M1: float, M2: float, n: int) -> float:
    """Upper bound on ∫F for 0 ≤ F ≤ M1 with ∫|ξ|²F ≤ M2."""
    if M1 <= 0 or M2 < 0:
        raise DomainError(f"Requer M1 > 0 e M2 ≥ 0, recebido M1={M1}, M2={M2}")
    return (
        ((n + 2.0) / n) ** (n / (n + 2.0))
        * M2 ** (n / (n + 2.0))
        * (M1 * unit_ball_volume(n)) ** (2.0 / (n + 2.0))
    )


def liyau_second_moment_lower(N: float, M1: float, n: int) -> float:
    """Smallest ∫|ξ|²F compatible with 0 ≤ F ≤ M1 and ∫F = N."""
    if N < 0 or M1 <= 0:
        raise DomainError(f"Requer N ≥ 0 e M1 > 0, recebido N={N}, M1={M1}")
    return n / (n + 2.0) * N ** ((n + 2.0) / n) * (M1 * unit_ball_volume(n)) ** (-2.0 / n)


def ball_indicator_moments(M1: float, R: float, n: int) -> tuple[float, float]:
    """∫F and ∫|ξ|²F for F = M1·1_{|ξ|≤R}."""
    if M1 <= 0 or R <= 0:
        raise DomainError(f"Requer M1 > 0 e R > 0, recebido M1={M1}, R={R}")
    B = unit_ball_volume(n)
    return M1 * B * R**n, M1 * n * B * R ** (n + 2) / (n + 2.0)


def derivative_dichotomy_check(samples: Sequence[np.ndarray], p: int, lam: float) -> DichotomyResult:
    """Grid check of the two inequalities between m_0, m_1 and m_p.

    ``samples[q]`` holds f^{(q)} on a grid over [0, 1/(2√λ)], q = 0..p.
    """
    if p < 1 or len(samples) < p + 1:
        raise DomainError(f"Requer amostras das derivadas até a ordem p={p}")
    m0, m1, mp = (float(np.max(np.abs(samples[q]))) for q in (0, 1, p))
    if mp == 0:
        raise PreconditionError(f"f^({p}) é identicamente nula na malha")
    return DichotomyResult(
        m0=m0,
        m1=m1,
        mp=mp,
        interpolation_holds=m1 <= 2.0 ** (p - 1) * mp ** (1.0 / p) * m0 ** (1.0 - 1.0 / p),
        small_derivative_holds=m1 < 4.0 ** (p + 1) * math.sqrt(lam) * m0,
    )


def sample_derivatives(
    f: Callable[[np.ndarray, int], np.ndarray], p: int, lam: float, points: int = DICHOTOMY_GRID_POINTS
) -> list[np.ndarray]:
    """f^{(q)}, q = 0..p, on ``points`` grid points of [0, 1/(2√λ)] including both ends."""
    grid = np.linspace(0.0, 1.0 / (2.0 * math.sqrt(lam)), points)
    return [np.asarray(f(grid, q), dtype=float) * np.ones_like(grid) for q in range(p + 1)]


def confirm_dichotomy_violation(f: Callable[[np.ndarray, int], np.ndarray], p: int, lam: float) -> DichotomyResult:
    """Run the grid check; a violation stands only if a ×10 refined grid reproduces it."""
    result = derivative_dichotomy_check(sample_derivatives(f, p, lam), p, lam)
    if not result.violation:
        return result
    logger.warning(f"Dichotomy violated on the coarse grid (p={p}, λ={lam}); refining")
    return derivative_dichotomy_check(sample_derivatives(f, p, lam, DICHOTOMY_GRID_POINTS * DICHOTOMY_REFINEMENT), p, lam)


def rectangle_count(A_i: float, lam: float, n: int) -> int:
    """⌊A_i·λ^{(n−1)/2}/6⌋."""
    if A_i <= 0 or lam <= 0:
        raise DomainError(f"Requer A_i > 0 e λ > 0, recebido A_i={A_i}, λ={lam}")
    return math.floor(A_i * lam ** ((n - 1) / 2.0) / 6.0)


def admissible_lambda_threshold(min_d: float, n: int) -> float:
    """Smallest λ with 1/√λ ≤ min_d/(2√n)."""
    if min_d <= 0:
        raise DomainError(f"min_d deve ser positivo, recebido {min_d}")
    return 4.0 * n / min_d**2


def alpha2(n: int) -> float:
    return alpha1(n) ** -0.5 / (81.0 * 2.0**n)


def m_lambda_correction(lam: float, D: DomainSummary, p: int) -> float:
    """α₂V^{−1/2}A(Vλ/α₁)^{−1/2−n/p}Θ(λ − λ₀)."""
    if p < 1 or lam <= 0:
        raise DomainError(f"Requer p ≥ 1 e λ > 0, recebido p={p}, λ={lam}")
    if lam <= lambda0(D.n, D.V, D.min_d, D.min_A):
        return 0.0
    n, V = D.n, D.V
    return alpha2(n) * V**-0.5 * D.A * (V * lam / alpha1(n)) ** (-0.5 - n / p)


def boundary_deficit(lam: float, D: DomainSummary, areas: Sequence[float], p: int) -> float:
    """Σ_i N_i·(1/(9·2^{n−1}))·λ^{−n/2}(Vλ/α₁)^{−n/p}·Θ(λ − λ₀), summed rectangle by rectangle.

    ``areas`` are the individual face areas A_i. The closed-form correction of M(λ) is a weaker
    version of this sum, so V·m_lambda_correction never exceeds it.
    """
    if p < 1 or lam <= 0:
        raise DomainError(f"Requer p ≥ 1 e λ > 0, recebido p={p}, λ={lam}")
    if lam <= lambda0(D.n, D.V, D.min_d, D.min_A):
        return 0.0
    n, V = D.n, D.V
    per_rectangle = lam ** (-0.5 * n) * (V * lam / alpha1(n)) ** (-n / p) / (9.0 * 2.0 ** (n - 1))
    return per_rectangle * sum(rectangle_count(area, lam, n) for area in areas)


def m_lambda(lam: float, D: DomainSummary, p: int) -> float:
    """M(λ) = (V/(2π)ⁿ)[1 − α₂V^{−1/2}A(Vλ/α₁)^{−1/2−n/p}Θ(λ − λ₀)]."""
    correction = m_lambda_correction(lam, D, p)
    bracket = 1.0 - correction
    if bracket <= 0 or bracket > 1:
        raise ConsistencyError(
            "Colchete de M(λ) fora de (0, 1]",
            diagnostics={"lambda": lam, "p": p, "bracket": bracket, "domain": D.domain_id},
        )
    return D.V / (2.0 * math.pi) ** D.n * bracket


def proof_constants(D: DomainSummary, lam: float) -> ProofConstants:
    """Constants fixed at λ; p comes from choose_p and ε = 1/p."""
    p = choose_p(D.n, D.V, lam)
    if p is None:
        raise PreconditionError(f"p indefinido para λ={lam} em {D.domain_id}")
    d_logs = d_sequence(D.n, p)
    return ProofConstants(
        n=D.n,
        p=p,
        D=tuple(d_logs),
        beta_p_sq=beta_squared(p, D.n, D.V, p, d_logs),
        beta_p1_sq=beta_squared(p + 1, D.n, D.V, p, d_logs),
        alpha1=alpha1(D.n),
        alpha2=alpha2(D.n),
        lambda0=lambda0(D.n, D.V, D.min_d, D.min_A),
        epsilon=1.0 / p,
    )


def reconstruct_theorem1(k: int, lambda_k: float, D: DomainSummary) -> tuple[float, float]:
    """Rebuild the corrected lower bound on the eigenvalue average from M(λ_k) and the Li–Yau inequality.

    Returns the linearized bound (equal to theorem1_bound) and the sharper value obtained by
    inverting the functional inequality directly; the second is never smaller.
    """
    if k < 1:
        raise DomainError(f"k deve ser ≥ 1, recebido {k}")
    n = D.n
    p = choose_p(n, D.V, lambda_k)
    if p is None:
        if lambda_k > lambda0(n, D.V, D.min_d, D.min_A):
            raise ConsistencyError("Θ=1 com p indefinido", diagnostics={"k": k, "lambda_k": lambda_k})
        p = 1
    x = m_lambda_correction(lambda_k, D, p)

    mass = m_lambda(lambda_k, D, p)
    sharp = liyau_second_moment_lower(k, mass, n) / k
    leading = n / (n + 2.0) * k ** (2.0 / n) * (2.0 * math.pi) ** 2 * (unit_ball_volume(n) * D.V) ** (-2.0 / n)
    linearized = leading * (1.0 + 2.0 / n * x)
    return linearized, sharp
