"""
Unit tests for the harness app: option serializers, use cases, the Celery task, reports and the CLI.
"""
import math
from unittest.mock import MagicMock, Mock, patch

import pytest

from spectral_bounds import cli
from spectral_bounds.apps.bounds.models import CSV_COLUMNS, POLYA, POLYA_CONJECTURE, BoundsConfig
from spectral_bounds.apps.bounds.services import verify
from spectral_bounds.apps.core.exceptions import ConfigError, InvalidGeometryError
from spectral_bounds.apps.harness.models import CampaignResult, ProofkitAuditResult
from spectral_bounds.apps.harness.reports import write_asymptotics, write_bound_reports, write_metrics
from spectral_bounds.apps.harness.serializers import (
    AsymptoticsRequestSerializer,
    CampaignConfigSerializer,
    ProofkitAuditRequestSerializer,
)
from spectral_bounds.apps.harness.tasks import run_verify_campaign
from spectral_bounds.apps.harness.usecases import (
    RunAsymptoticsUseCase,
    RunCampaignsUseCase,
    RunProofkitAuditUseCase,
    RunVerifyUseCase,
)
from spectral_bounds.apps.proofkit.models import AuditCheck
from spectral_bounds.apps.spectra.services import box_spectrum_exact

from tests.conftest import CampaignConfigFactory


def _result(domain_id="unit_square", violations=0):
    return CampaignResult(
        domain_id=domain_id,
        method="exact_box",
        k_max=10,
        lambda0=71132.9,
        lambda0_entries=(72.0, 4.34, 71132.9, 144.0),
        first_active_k=None,
        violation_count=violations,
        conjecture_count=0,
    )


class TestCampaignConfigSerializer:
    """Test cases for the verify option serializer."""

    def test_valid_single_domain(self, domains_dir):
        """Test that a single domain file gives one campaign with the output unchanged."""
        serializer = CampaignConfigSerializer(
            data={
                "domain_files": [str(domains_dir / "unit_square.json")],
                "k_max": 100,
                "melas_constant": 1e-3,
                "output": "out.csv",
            }
        )
        assert serializer.is_valid(), serializer.errors
        configs = serializer.save()
        assert len(configs) == 1
        assert configs[0].output == "out.csv"
        assert configs[0].method == "exact"
        assert configs[0].fraction == pytest.approx(1.0 / 3.0)

    def test_several_domains_name_outputs(self, domains_dir):
        """Test that several domain files get one CSV each, suffixed by the domain file stem."""
        serializer = CampaignConfigSerializer(
            data={
                "domain_files": [str(domains_dir / "unit_square.json"), str(domains_dir / "unit_cube.json")],
                "k_max": 100,
                "melas_constant": 1e-3,
                "output": "relatorios/out.csv",
            }
        )
        assert serializer.is_valid(), serializer.errors
        outputs = [config.output for config in serializer.save()]
        assert outputs == ["relatorios/out_unit_square.csv", "relatorios/out_unit_cube.csv"]

    def test_fd_requires_h(self):
        """Test that the fd method without h is rejected on the h field."""
        serializer = CampaignConfigSerializer(
            data={"domain_files": ["x.json"], "method": "fd", "k_max": 10, "melas_constant": 1e-3}
        )
        assert not serializer.is_valid()
        assert "h" in serializer.errors

    def test_missing_melas_constant(self):
        """Test that a null Melas constant is rejected."""
        serializer = CampaignConfigSerializer(data={"domain_files": ["x.json"], "k_max": 10, "melas_constant": None})
        assert not serializer.is_valid()
        assert "melas_constant" in serializer.errors

    def test_fraction_out_of_range(self):
        """Test that a fraction of 1 is rejected."""
        serializer = CampaignConfigSerializer(
            data={"domain_files": ["x.json"], "k_max": 10, "melas_constant": 1e-3, "fraction": 1.0}
        )
        assert not serializer.is_valid()
        assert "fraction" in serializer.errors

    def test_no_domain_files(self):
        """Test that an empty domain list is rejected."""
        serializer = CampaignConfigSerializer(data={"domain_files": [], "k_max": 10, "melas_constant": 1e-3})
        assert not serializer.is_valid()


class TestRequestSerializers:
    """Test cases for the audit and asymptotics option serializers."""

    def test_audit_defaults(self):
        """Test audit option defaults of n ≤ 10 and p ≤ 30."""
        serializer = ProofkitAuditRequestSerializer(data={})
        assert serializer.is_valid()
        assert serializer.validated_data["n_max"] == 10
        assert serializer.validated_data["p_max"] == 30

    def test_audit_empty_range(self):
        """Test that n_max below n_min is rejected on n_max."""
        serializer = ProofkitAuditRequestSerializer(data={"n_min": 4, "n_max": 3})
        assert not serializer.is_valid()
        assert "n_max" in serializer.errors

    def test_asymptotics_k_max(self):
        """Test that a k_max too small for the fit is rejected."""
        serializer = AsymptoticsRequestSerializer(data={"domain_file": "x.json", "k_max": 50})
        assert not serializer.is_valid()
        assert "k_max" in serializer.errors


class TestCampaignConfig:
    """Test cases for CampaignConfig validation."""

    def test_invalid_k_max(self):
        """Test that k_max = 0 raises ConfigError."""
        with pytest.raises(ConfigError):
            CampaignConfigFactory(k_max=0)

    def test_fd_requires_h(self):
        """Test that an fd campaign without h raises ConfigError."""
        with pytest.raises(ConfigError):
            CampaignConfigFactory(method="fd")

    def test_unknown_stencil(self):
        """Test that an unknown stencil name raises ConfigError."""
        with pytest.raises(ConfigError):
            CampaignConfigFactory(stencil="compacto")


class TestRunVerifyUseCase:
    """Test cases for RunVerifyUseCase."""

    def test_unit_square_campaign(self, tmp_path):
        """Test successful exact campaign on the unit square with CSV output."""
        output = tmp_path / "square.csv"
        result = RunVerifyUseCase().execute(CampaignConfigFactory(k_max=50, output=str(output)))

        assert result.exit_code == 0
        assert result.violation_count == 0
        assert result.lambda0 == pytest.approx(2.0**14 * math.sqrt(6.0 * math.pi), rel=1e-9)
        assert result.first_active_k is None
        assert len(result.reports) == 50

        lines = output.read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 51

    def test_injected_fault_on_tiling_domain(self):
        """Test that halving λ_1 on a tiling domain violates Pólya and fails the campaign."""
        result = RunVerifyUseCase().execute(CampaignConfigFactory(k_max=20, inject_fault=True))

        assert result.exit_code == 1
        assert POLYA in result.violated_bounds
        assert result.reports[0].violations[0] == POLYA

    def test_injected_fault_on_non_tiling_domain(self, write_domain):
        """Test that the same violation on a non-tiling domain is a non-fatal conjecture violation."""
        path = write_domain({"dimension": 2, "kind": "box", "lengths": [1.0, 1.0]}, name="quadrado.json")
        result = RunVerifyUseCase().execute(CampaignConfigFactory(domain_file=str(path), k_max=20, inject_fault=True))

        assert result.exit_code == 0
        assert result.conjecture_count >= 1
        assert POLYA_CONJECTURE in result.violated_bounds

    def test_tiling_flag_overrides_domain(self, write_domain):
        """Test that an explicit tiling flag makes the Pólya violation fatal again."""
        path = write_domain({"dimension": 2, "kind": "box", "lengths": [1.0, 1.0]}, name="quadrado.json")
        config = CampaignConfigFactory(domain_file=str(path), k_max=20, inject_fault=True, tiling=True)
        assert RunVerifyUseCase().execute(config).exit_code == 1

    def test_cached_spectrum_skips_computation(self):
        """Test that a cache hit never reaches the spectrum service factory."""
        spectrum_repository = Mock()
        spectrum_repository.get_spectrum.return_value = box_spectrum_exact((1.0, 1.0), 30, domain_id="unit_square")

        with patch("spectral_bounds.apps.harness.usecases.SpectrumServiceFactory") as mock_factory:
            result = RunVerifyUseCase(spectrum_repository=spectrum_repository).execute(CampaignConfigFactory(k_max=30))

        mock_factory.create_service.assert_not_called()
        spectrum_repository.save_spectrum.assert_not_called()
        assert result.exit_code == 0

    def test_cache_miss_saves_spectrum(self):
        """Test that a cache miss computes the spectrum and stores it once."""
        spectrum_repository = Mock()
        spectrum_repository.get_spectrum.return_value = None

        RunVerifyUseCase(spectrum_repository=spectrum_repository).execute(CampaignConfigFactory(k_max=30))

        spectrum_repository.save_spectrum.assert_called_once()

    def test_fd_parameters_reach_cache_key(self):
        """Test that every fd parameter is part of the cache lookup."""
        spectrum_repository = Mock()
        spectrum_repository.get_spectrum.return_value = box_spectrum_exact((1.0, 1.0), 5, domain_id="unit_square")
        config = CampaignConfigFactory(method="fd", h=0.1, k_max=5, stencil="shortley_weller")

        RunVerifyUseCase(spectrum_repository=spectrum_repository).execute(config)

        _, kwargs = spectrum_repository.get_spectrum.call_args
        assert kwargs == {"h": 0.1, "stencil": "shortley_weller", "seed": 0, "richardson": False}

    def test_invalid_geometry_propagates(self):
        """Test that geometry errors from the repository propagate."""
        polytope_repository = Mock()
        polytope_repository.load.side_effect = InvalidGeometryError("Politopo degenerado")

        with pytest.raises(InvalidGeometryError):
            RunVerifyUseCase(polytope_repository=polytope_repository).execute(CampaignConfigFactory())


class TestRunCampaignsUseCase:
    """Test cases for RunCampaignsUseCase."""

    def test_results_keep_input_order(self):
        """Test that results come back in input order whatever the worker count."""
        verify_use_case = Mock()
        verify_use_case.execute.side_effect = lambda config: _result(domain_id=config.domain_file)
        configs = [CampaignConfigFactory(domain_file=f"d{i}.json") for i in range(5)]

        results = RunCampaignsUseCase(verify_use_case=verify_use_case, max_workers=3).execute(configs)

        assert [result.domain_id for result in results] == [f"d{i}.json" for i in range(5)]

    def test_empty(self):
        """Test that no campaigns raises ConfigError."""
        with pytest.raises(ConfigError):
            RunCampaignsUseCase(verify_use_case=Mock()).execute([])

    def test_workers_from_settings(self, settings):
        """Test that the worker count defaults to SPECTRAL_BOUNDS_THREADS."""
        settings.SPECTRAL_BOUNDS_THREADS = 7
        assert RunCampaignsUseCase(verify_use_case=Mock()).max_workers == 7


class TestRunProofkitAuditUseCase:
    """Test cases for RunProofkitAuditUseCase."""

    @patch("spectral_bounds.apps.harness.usecases.run_audit")
    def test_failed_check_sets_exit_code(self, mock_run_audit):
        """Test that one failed audit check makes the exit code 1."""
        mock_run_audit.return_value = [
            AuditCheck(name="d_bound", passed=True, cases=3),
            AuditCheck(name="dichotomy", passed=False, cases=10, detail="polinômio #3"),
        ]
        result = RunProofkitAuditUseCase().execute(range(2, 3), range(1, 2), 100, 0)

        assert not result.passed
        assert result.exit_code == 1

    def test_all_passed(self):
        """Test that all checks passing gives exit code 0."""
        result = ProofkitAuditResult(checks=(AuditCheck(name="d_bound", passed=True, cases=1),))
        assert result.exit_code == 0


class TestRunAsymptoticsUseCase:
    """Test cases for RunAsymptoticsUseCase."""

    def test_unit_square_slope(self, domains_dir, tmp_path):
        """Test that the excess over the Weyl average grows like k^{1/n}."""
        output = tmp_path / "asymptotics.csv"
        result = RunAsymptoticsUseCase().execute(str(domains_dir / "unit_square.json"), 2000, str(output))

        assert result.slope == pytest.approx(result.expected_slope, abs=0.1)
        assert result.boundary_constant > 0
        assert result.k_start == 200
        assert output.read_text(encoding="utf-8").splitlines()[0] == "k,avg_k,weyl_avg,remainder"

    def test_requires_exact_oracle(self, domains_dir):
        """Test that a domain without an exact spectrum is refused."""
        with pytest.raises(ConfigError):
            RunAsymptoticsUseCase().execute(str(domains_dir / "l_shape.json"), 1000)

    def test_requires_enough_eigenvalues(self, domains_dir):
        """Test that too few eigenvalues for the fit window are refused."""
        with pytest.raises(ConfigError):
            RunAsymptoticsUseCase().execute(str(domains_dir / "unit_square.json"), 50)


class TestRunVerifyCampaignTask:
    """Test cases for the run_verify_campaign Celery task."""

    @patch("spectral_bounds.apps.harness.tasks.RunCampaignsUseCase")
    def test_returns_summaries(self, mock_use_case_class):
        """Test that each campaign result becomes a plain summary dict."""
        mock_use_case = MagicMock()
        mock_use_case.execute.return_value = [_result(), _result(domain_id="unit_cube", violations=2)]
        mock_use_case_class.return_value = mock_use_case

        summaries = run_verify_campaign(
            {"domain_files": ["unit_square.json", "unit_cube.json"], "k_max": 10, "melas_constant": 1e-3}
        )

        assert [summary["domain_id"] for summary in summaries] == ["unit_square", "unit_cube"]
        assert [summary["exit_code"] for summary in summaries] == [0, 1]

    def test_invalid_options(self):
        """Test that invalid task options raise ConfigError."""
        with pytest.raises(ConfigError):
            run_verify_campaign({"domain_files": [], "k_max": 10})

    @patch("spectral_bounds.apps.harness.tasks.RunCampaignsUseCase")
    def test_errors_are_reraised(self, mock_use_case_class):
        """Test that domain errors inside the task reach the caller."""
        mock_use_case_class.return_value.execute.side_effect = InvalidGeometryError("Face degenerada")

        with pytest.raises(InvalidGeometryError):
            run_verify_campaign({"domain_files": ["x.json"], "k_max": 10, "melas_constant": 1e-3})


class TestReports:
    """Test cases for the CSV and metrics writers."""

    def test_bound_reports_csv(self, tmp_path, square_summary):
        """Test CSV rows with LF endings and empty cells for undefined values."""
        reports = verify(
            box_spectrum_exact((1.0, 1.0), 3, domain_id="unit_square"), square_summary, 3, BoundsConfig(1e-3)
        )
        path = tmp_path / "sub" / "bounds.csv"
        write_bound_reports(path, reports)

        content = path.read_bytes()
        assert b"\r" not in content
        lines = content.decode("utf-8").splitlines()
        assert len(lines) == 4
        first = dict(zip(CSV_COLUMNS, lines[1].split(","), strict=True))
        assert first["k"] == "1"
        assert float(first["lambda_k"]) == 2.0 * math.pi**2
        assert first["theta"] == "0"
        assert first["epsilon"] == ""
        assert first["corollary1"] == ""
        assert first["violations"] == ""

    def test_asymptotics_csv(self, tmp_path):
        """Test the asymptotics CSV header and plain float cells."""
        path = tmp_path / "asymptotics.csv"
        write_asymptotics(path, [1, 2], [1.5, 2.5], [1.0, 2.0], [0.5, 0.5])
        assert path.read_text(encoding="utf-8") == "k,avg_k,weyl_avg,remainder\n1,1.5,1.0,0.5\n2,2.5,2.0,0.5\n"

    def test_metrics_file(self, tmp_path):
        """Test that the metrics file holds the campaign counters."""
        RunVerifyUseCase().execute(CampaignConfigFactory(k_max=5))
        path = tmp_path / "metrics.prom"
        write_metrics(path)
        assert "spectral_bounds_campaigns_total" in path.read_text(encoding="utf-8")


class TestCli:
    """Test cases for the spectral-bounds console entry point."""

    def test_unknown_subcommand(self, capsys):
        """Test that an unknown subcommand prints the usage and exits 2."""
        assert cli.main(["calcular"]) == 2
        assert "uso: spectral-bounds" in capsys.readouterr().err

    def test_no_arguments(self):
        """Test that no arguments exits 2."""
        assert cli.main([]) == 2

    @patch("django.core.management.execute_from_command_line")
    def test_dispatches_to_management_command(self, mock_execute):
        """Test that dashed subcommands map onto the management command names."""
        assert cli.main(["proofkit-audit", "--n-max", "3"]) == 0
        mock_execute.assert_called_once_with(["spectral-bounds", "proofkit_audit", "--n-max", "3"])

    @patch("django.core.management.execute_from_command_line")
    def test_propagates_exit_code(self, mock_execute):
        """Test that SystemExit codes from the command become the return value."""
        mock_execute.side_effect = SystemExit(1)
        assert cli.main(["verify", "--domain-file", "x.json"]) == 1
