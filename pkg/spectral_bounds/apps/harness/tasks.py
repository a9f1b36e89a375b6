"""
Harness app Celery tasks.
"""
from celery import shared_task
from loguru import logger

from spectral_bounds.apps.core.exceptions import ConfigError

from .serializers import CampaignConfigSerializer
from .usecases import RunCampaignsUseCase


@shared_task
def run_verify_campaign(options: dict):
    """
    Run verify campaigns from serialized command options.

    Args:
        options: Same fields as the verify command (domain_files, method, k_max, ...)

    Returns:
        One summary dict per domain, in input order
    """
    logger.info(f"Starting verify campaign task for {options.get('domain_files')}")

    serializer = CampaignConfigSerializer(data=options)
    if not serializer.is_valid():
        raise ConfigError(f"Configuração inválida: {serializer.errors}")

    try:
        results = RunCampaignsUseCase().execute(serializer.save())
    except Exception as e:
        logger.error(f"Error in run_verify_campaign task: {e}")
        raise

    return [
        {
            "domain_id": result.domain_id,
            "method": result.method,
            "k_max": result.k_max,
            "lambda0": result.lambda0,
            "first_active_k": result.first_active_k,
            "violation_count": result.violation_count,
            "conjecture_count": result.conjecture_count,
            "violated_bounds": list(result.violated_bounds),
            "output": result.output,
            "exit_code": result.exit_code,
        }
        for result in results
    ]
