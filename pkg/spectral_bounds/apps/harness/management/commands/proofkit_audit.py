"""
Django management command to audit the constants and lemmas behind the corrected average bound.
"""
from django.core.management.base import BaseCommand, CommandError

from spectral_bounds.apps.core.exceptions import EXIT_CONFIG_ERROR, EXIT_VIOLATION, SpectralBoundsException
from spectral_bounds.apps.harness.serializers import ProofkitAuditRequestSerializer
from spectral_bounds.apps.harness.usecases import RunProofkitAuditUseCase


class Command(BaseCommand):
    help = "Sweep the proofkit invariants over dimension and p ranges"

    def add_arguments(self, parser):
        parser.add_argument("--n-min", type=int, default=2)
        parser.add_argument("--n-max", type=int, default=10)
        parser.add_argument("--p-min", type=int, default=1)
        parser.add_argument("--p-max", type=int, default=30)
        parser.add_argument("--sample-count", type=int, default=100_000, help="Points per bump-function sweep")
        parser.add_argument("--seed", type=int, default=0)

    def handle(self, *args, **options):
        serializer = ProofkitAuditRequestSerializer(
            data={key: options[key] for key in ("n_min", "n_max", "p_min", "p_max", "sample_count", "seed")}
        )
        if not serializer.is_valid():
            raise CommandError(f"Configuração inválida: {serializer.errors}", returncode=EXIT_CONFIG_ERROR)
        request = serializer.validated_data

        try:
            result = RunProofkitAuditUseCase().execute(
                range(request["n_min"], request["n_max"] + 1),
                range(request["p_min"], request["p_max"] + 1),
                request["sample_count"],
                request["seed"],
            )
        except SpectralBoundsException as e:
            raise CommandError(f"{type(e).__name__}: {e}", returncode=e.exit_code)

        for check in result.checks:
            if check.passed:
                self.stdout.write(self.style.SUCCESS(f"OK    {check.name} ({check.cases} casos)"))
            else:
                self.stdout.write(self.style.ERROR(f"FALHA {check.name} ({check.cases} casos): {check.detail}"))

        if not result.passed:
            raise CommandError("Auditoria falhou", returncode=EXIT_VIOLATION)
        self.stdout.write(self.style.SUCCESS("Auditoria concluída sem falhas"))
