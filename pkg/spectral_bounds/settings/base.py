"""
Base settings for Spectral Bounds project.
"""
from pathlib import Path

from decouple import config

BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = config("SECRET_KEY", default="django-insecure-change-me-in-production")

DEBUG = config("DEBUG", default=False, cast=bool)

ALLOWED_HOSTS = []

DJANGO_APPS = [
    "django.contrib.auth",
    "django.contrib.contenttypes",
]

THIRD_PARTY_APPS = [
    "rest_framework",
]

LOCAL_APPS = [
    "spectral_bounds.apps.core",
    "spectral_bounds.apps.geometry",
    "spectral_bounds.apps.spectra",
    "spectral_bounds.apps.bounds",
    "spectral_bounds.apps.proofkit",
    "spectral_bounds.apps.harness",
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

# No persistence: every campaign is recomputed from its domain spec file.
DATABASES = {}

LANGUAGE_CODE = "pt-br"
TIME_ZONE = "America/Sao_Paulo"
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Cache settings
CACHES = {
    "default": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
        "LOCATION": "spectral-bounds",
        "KEY_PREFIX": "spectral_bounds",
        "TIMEOUT": 3600,
    }
}
SPECTRUM_CACHE_TIMEOUT = config("SPECTRUM_CACHE_TIMEOUT", default=3600, cast=int)

# Celery settings
CELERY_BROKER_URL = config("CELERY_BROKER_URL", default="memory://")
CELERY_RESULT_BACKEND = config("CELERY_RESULT_BACKEND", default="cache+memory://")
CELERY_ACCEPT_CONTENT = ["json"]
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_TIMEZONE = TIME_ZONE

# Campaign worker pool
SPECTRAL_BOUNDS_THREADS = config("SPECTRAL_BOUNDS_THREADS", default=4, cast=int)

# Geometry
GEOMETRY_TOLERANCE = config("GEOMETRY_TOLERANCE", default=1e-12, cast=float)
PLANARITY_TOLERANCE = config("PLANARITY_TOLERANCE", default=1e-9, cast=float)
FACE_FRACTION = config("FACE_FRACTION", default=1 / 3, cast=float)
BISECTION_ITERATIONS = config("BISECTION_ITERATIONS", default=64, cast=int)
DECOMPOSITION_MIN_MARGIN = config("DECOMPOSITION_MIN_MARGIN", default=1e-9, cast=float)

# Spectra
EIGENSOLVER_RESIDUAL_TOL = config("EIGENSOLVER_RESIDUAL_TOL", default=1e-8, cast=float)
EIGENSOLVER_MAX_ITER = config("EIGENSOLVER_MAX_ITER", default=20000, cast=int)
DENSE_SOLVER_LIMIT = config("DENSE_SOLVER_LIMIT", default=400, cast=int)
SHORTLEY_WELLER_MIN_FRACTION = config("SHORTLEY_WELLER_MIN_FRACTION", default=1e-6, cast=float)
MIN_INTERIOR_NODES = config("MIN_INTERIOR_NODES", default=10, cast=int)
MAX_LATTICE_POINTS = config("MAX_LATTICE_POINTS", default=50_000_000, cast=int)

# Bounds
VIOLATION_SLACK = config("VIOLATION_SLACK", default=1e-9, cast=float)
MELAS_CONSTANT = config("MELAS_CONSTANT", default=None, cast=lambda v: None if v in (None, "") else float(v))

# Logging
LOG_LEVEL = config("LOG_LEVEL", default="INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": "INFO",
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
    },
}
