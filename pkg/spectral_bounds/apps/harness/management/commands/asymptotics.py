"""
Django management command to estimate the second term of the eigenvalue-average asymptotics.
"""
from django.core.management.base import BaseCommand, CommandError

from spectral_bounds.apps.core.exceptions import EXIT_CONFIG_ERROR, SpectralBoundsException
from spectral_bounds.apps.harness.serializers import AsymptoticsRequestSerializer
from spectral_bounds.apps.harness.usecases import RunAsymptoticsUseCase


class Command(BaseCommand):
    help = "Fit log((1/k)Σλ_j − Weyl) against log k on an exact spectrum"

    def add_arguments(self, parser):
        parser.add_argument("--domain-file", required=True, help="Polytope spec file with an exact oracle")
        parser.add_argument("--k-max", type=int, default=10_000)
        parser.add_argument("--output", help="CSV with k, avg_k, weyl_avg, remainder")

    def handle(self, *args, **options):
        serializer = AsymptoticsRequestSerializer(
            data={"domain_file": options["domain_file"], "k_max": options["k_max"], "output": options["output"]}
        )
        if not serializer.is_valid():
            raise CommandError(f"Configuração inválida: {serializer.errors}", returncode=EXIT_CONFIG_ERROR)
        request = serializer.validated_data

        try:
            result = RunAsymptoticsUseCase().execute(request["domain_file"], request["k_max"], request.get("output"))
        except SpectralBoundsException as e:
            raise CommandError(f"{type(e).__name__}: {e}", returncode=e.exit_code)

        self.stdout.write(f"Domínio: {result.domain_id} (n={result.n}, k ∈ [{result.k_start}, {result.k_max}])")
        self.stdout.write(f"  Expoente ajustado: {result.slope:.4f} (esperado 1/n = {result.expected_slope:.4f})")
        self.stdout.write(f"  Coeficiente: {result.coefficient:.6g}")
        self.stdout.write(f"  Constante de fronteira estimada: {result.boundary_constant:.6g}")
        self.stdout.write(f"  Erro relativo máximo do ajuste de dois termos: {result.max_two_term_error:.3e}")
        self.stdout.write(self.style.SUCCESS("Ajuste concluído"))
