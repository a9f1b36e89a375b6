from django.apps import AppConfig


class ProofkitConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "spectral_bounds.apps.proofkit"
    verbose_name = "Proofkit"
