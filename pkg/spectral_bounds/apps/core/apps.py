import sys

from django.apps import AppConfig
from django.conf import settings
from loguru import logger


class CoreConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "spectral_bounds.apps.core"
    verbose_name = "Core"

    def ready(self):
        logger.remove()
        logger.add(sys.stderr, level=settings.LOG_LEVEL)
        log_file = getattr(settings, "LOG_FILE", "")
        if log_file:
            logger.add(log_file, level=settings.LOG_LEVEL, rotation="10 MB")
