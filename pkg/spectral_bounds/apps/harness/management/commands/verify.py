"""
Django management command to verify eigenvalue lower bounds on polytopes.
"""
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from spectral_bounds.apps.core.exceptions import EXIT_CONFIG_ERROR, EXIT_VIOLATION, SpectralBoundsException
from spectral_bounds.apps.harness.models import METHOD_CHOICES
from spectral_bounds.apps.harness.reports import write_metrics
from spectral_bounds.apps.harness.serializers import CampaignConfigSerializer
from spectral_bounds.apps.harness.usecases import RunCampaignsUseCase
from spectral_bounds.apps.spectra.models import STANDARD, STENCIL_CHOICES


class Command(BaseCommand):
    """Management command running verify campaigns."""

    help = "Compute spectra and check every eigenvalue lower bound against them"

    def add_arguments(self, parser):
        """Add command arguments."""
        parser.add_argument(
            "--domain-file", action="append", dest="domain_files", required=True, help="Polytope spec file (repeatable)"
        )
        parser.add_argument("--method", choices=METHOD_CHOICES, default="exact", help="Spectrum method")
        parser.add_argument("--h", type=float, help="Grid spacing (fd only)")
        parser.add_argument("--k-max", type=int, default=1000, help="Number of eigenvalues to check")
        parser.add_argument("--melas-constant", type=float, help="Melas constant M_n (default: MELAS_CONSTANT)")
        parser.add_argument("--fraction", type=float, default=1.0 / 3.0, help="Face decomposition area fraction")
        parser.add_argument("--seed", type=int, default=0, help="Eigensolver seed")
        parser.add_argument("--output", help="CSV report path")
        parser.add_argument("--tiling", action="store_true", help="Treat the domain as tiling")
        parser.add_argument("--stencil", choices=STENCIL_CHOICES, default=STANDARD, help="FD boundary stencil")
        parser.add_argument("--richardson", action="store_true", help="Richardson-extrapolate from h and h/2")
        parser.add_argument("--inject-fault", action="store_true", help="Halve λ_1 (exit-code testing)")
        parser.add_argument("--metrics-file", help="Write prometheus metrics to this file")

    def handle(self, *args, **options):
        """Execute the command."""
        melas_constant = options["melas_constant"]
        if melas_constant is None:
            melas_constant = getattr(settings, "MELAS_CONSTANT", None)

        serializer = CampaignConfigSerializer(
            data={
                "domain_files": options["domain_files"],
                "method": options["method"],
                "h": options["h"],
                "k_max": options["k_max"],
                "melas_constant": melas_constant,
                "fraction": options["fraction"],
                "seed": options["seed"],
                "output": options["output"],
                "tiling": options["tiling"],
                "stencil": options["stencil"],
                "richardson": options["richardson"],
                "inject_fault": options["inject_fault"],
            }
        )
        if not serializer.is_valid():
            raise CommandError(f"Configuração inválida: {serializer.errors}", returncode=EXIT_CONFIG_ERROR)

        try:
            results = RunCampaignsUseCase().execute(serializer.save())
        except SpectralBoundsException as e:
            raise CommandError(f"{type(e).__name__}: {e}", returncode=e.exit_code)
        finally:
            if options["metrics_file"]:
                write_metrics(options["metrics_file"])

        for result in results:
            self._write_summary(result)

        failed = [result.domain_id for result in results if result.exit_code]
        if failed:
            raise CommandError(f"Violações de teoremas em: {', '.join(failed)}", returncode=EXIT_VIOLATION)
        self.stdout.write(self.style.SUCCESS("Nenhuma violação de teorema encontrada"))

    def _write_summary(self, result):
        entries = ", ".join(f"{entry:.6g}" for entry in result.lambda0_entries)
        first = result.first_active_k if result.first_active_k is not None else "nunca dentro de k_max"
        self.stdout.write(f"Domínio: {result.domain_id} ({result.method}, k_max={result.k_max})")
        self.stdout.write(f"  λ₀ = {result.lambda0:.6g} (entradas: {entries})")
        self.stdout.write(f"  Primeiro k com Θ=1: {first}")
        self.stdout.write(f"  Violações de teoremas: {result.violation_count}")
        if result.conjecture_count:
            self.stdout.write(
                self.style.WARNING(f"  Violações da conjectura de Pólya (não fatais): {result.conjecture_count}")
            )
        if result.violated_bounds:
            self.stdout.write(f"  Cotas violadas: {', '.join(result.violated_bounds)}")
        if result.output:
            self.stdout.write(f"  Relatório: {result.output}")
