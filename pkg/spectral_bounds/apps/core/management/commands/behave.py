"""
Django management command to run behave BDD tests.
"""
import os
import sys

from django.core.management.base import BaseCommand, CommandError


class Command(BaseCommand):
    """Management command to run behave BDD tests."""

    help = "Run BDD tests using behave"

    def add_arguments(self, parser):
        """Add command arguments."""
        parser.add_argument(
            "--features", default="tests/features", help="Path to features directory (default: tests/features)"
        )
        parser.add_argument("--tags", help="Run only features/scenarios with these tags")
        parser.add_argument("--format", default="pretty", help="Output format (default: pretty)")

    def handle(self, *args, **options):
        """Execute the command."""
        try:
            from behave.__main__ import main as behave_main
        except ImportError:
            raise CommandError("behave não está instalado. Instale com: pip install behave")

        behave_args = [options["features"], "--format", options["format"]]
        if options["tags"]:
            behave_args.extend(["--tags", options["tags"]])

        os.environ.setdefault("DJANGO_SETTINGS_MODULE", "spectral_bounds.settings.test")
        self.stdout.write(f"Running behave with args: {' '.join(behave_args)}")

        original_argv = sys.argv
        try:
            sys.argv = ["behave"] + behave_args
            exit_code = behave_main()
        except SystemExit as e:
            exit_code = e.code
        finally:
            sys.argv = original_argv

        if exit_code:
            raise CommandError(f"Cenários BDD falharam com código {exit_code}", returncode=int(exit_code))
        self.stdout.write(self.style.SUCCESS("Todos os cenários BDD passaram!"))
