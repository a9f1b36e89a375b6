"""
Celery configuration for spectral_bounds project.
"""
import os

from celery import Celery

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "spectral_bounds.settings.development")

app = Celery("spectral_bounds")
app.config_from_object("django.conf:settings", namespace="CELERY")
app.autodiscover_tasks()

app.conf.timezone = "UTC"
