from django.apps import AppConfig


class HarnessConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "spectral_bounds.apps.harness"
    verbose_name = "Harness"
