"""
Harness app serializers - validation of command options.
"""
from pathlib import Path

from rest_framework import serializers

from spectral_bounds.apps.spectra.models import STANDARD, STENCIL_CHOICES

from .models import EXACT, FD, METHOD_CHOICES, CampaignConfig


class CampaignConfigSerializer(serializers.Serializer):
    """Serializer for verify options; one campaign per domain file."""

    domain_files = serializers.ListField(child=serializers.CharField(), min_length=1)
    method = serializers.ChoiceField(choices=METHOD_CHOICES, default=EXACT)
    h = serializers.FloatField(required=False, allow_null=True)
    k_max = serializers.IntegerField(min_value=1)
    melas_constant = serializers.FloatField(allow_null=True, required=False)
    fraction = serializers.FloatField(default=1.0 / 3.0)
    seed = serializers.IntegerField(default=0)
    output = serializers.CharField(required=False, allow_null=True)
    tiling = serializers.BooleanField(default=False)
    stencil = serializers.ChoiceField(choices=STENCIL_CHOICES, default=STANDARD)
    richardson = serializers.BooleanField(default=False)
    inject_fault = serializers.BooleanField(default=False)

    def validate_melas_constant(self, value):
        if value is None or value <= 0:
            raise serializers.ValidationError("Informe --melas-constant positiva (ou MELAS_CONSTANT)")
        return value

    def validate_fraction(self, value):
        if not 0 < value < 1:
            raise serializers.ValidationError("fraction deve estar em (0, 1)")
        return value

    def validate(self, attrs):
        if attrs["method"] == FD and not attrs.get("h"):
            raise serializers.ValidationError({"h": "O método fd exige --h > 0"})
        if attrs["method"] == FD and attrs["h"] <= 0:
            raise serializers.ValidationError({"h": "h deve ser positivo"})
        if "melas_constant" not in attrs:
            raise serializers.ValidationError({"melas_constant": "Informe --melas-constant positiva"})
        return attrs

    @staticmethod
    def _output_for(output: str | None, domain_file: str, several: bool) -> str | None:
        if output is None or not several:
            return output
        target = Path(output)
        return str(target.with_name(f"{target.stem}_{Path(domain_file).stem}{target.suffix or '.csv'}"))

    def create(self, validated_data) -> list[CampaignConfig]:
        domain_files = validated_data.pop("domain_files")
        output = validated_data.pop("output", None)
        several = len(domain_files) > 1
        return [
            CampaignConfig(
                domain_file=domain_file, output=self._output_for(output, domain_file, several), **validated_data
            )
            for domain_file in domain_files
        ]


class ProofkitAuditRequestSerializer(serializers.Serializer):
    n_min = serializers.IntegerField(default=2, min_value=2)
    n_max = serializers.IntegerField(default=10)
    p_min = serializers.IntegerField(default=1, min_value=1)
    p_max = serializers.IntegerField(default=30)
    sample_count = serializers.IntegerField(default=100_000, min_value=2)
    seed = serializers.IntegerField(default=0)

    def validate(self, attrs):
        if attrs["n_max"] < attrs["n_min"]:
            raise serializers.ValidationError({"n_max": "Intervalo de n vazio"})
        if attrs["p_max"] < attrs["p_min"]:
            raise serializers.ValidationError({"p_max": "Intervalo de p vazio"})
        return attrs


class AsymptoticsRequestSerializer(serializers.Serializer):
    domain_file = serializers.CharField()
    k_max = serializers.IntegerField()
    output = serializers.CharField(required=False, allow_null=True)

    def validate_k_max(self, value):
        if value < 100:
            raise serializers.ValidationError("k_max deve ser ≥ 100 para o ajuste assintótico")
        return value
