"""
Geometry app serializers.
"""
from rest_framework import serializers

from .models import BOX, GENERAL, KIND_CHOICES, Polytope


class PolytopeSpecSerializer(serializers.Serializer):
    """Serializer for polytope spec files (JSON)."""

    dimension = serializers.IntegerField(min_value=2)
    kind = serializers.ChoiceField(choices=KIND_CHOICES, default=GENERAL)
    vertices = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2), required=False
    )
    faces = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=2), required=False
    )
    lengths = serializers.ListField(child=serializers.FloatField(), required=False)
    name = serializers.CharField(max_length=200, required=False)
    tiling = serializers.BooleanField(default=False)

    def validate(self, attrs):
        """Exactly one of vertices+faces or lengths, matching kind."""
        has_faces = "vertices" in attrs or "faces" in attrs
        has_lengths = "lengths" in attrs

        if has_faces and has_lengths:
            raise serializers.ValidationError("Informe vertices+faces ou lengths, não ambos")

        if attrs["kind"] == BOX:
            if not has_lengths:
                raise serializers.ValidationError({"lengths": "Caixas exigem lengths"})
            if len(attrs["lengths"]) != attrs["dimension"]:
                raise serializers.ValidationError({"lengths": "Número de lados difere da dimensão"})
        else:
            if "vertices" not in attrs or "faces" not in attrs:
                raise serializers.ValidationError("Politopos gerais exigem vertices e faces")
            if any(len(vertex) != attrs["dimension"] for vertex in attrs["vertices"]):
                raise serializers.ValidationError({"vertices": "Vértices com dimensão incorreta"})

        return attrs

    def create(self, validated_data):
        return Polytope(
            dimension=validated_data["dimension"],
            kind=validated_data["kind"],
            vertices=validated_data.get("vertices"),
            faces=tuple(tuple(face) for face in validated_data.get("faces", ())),
            lengths=tuple(validated_data.get("lengths", ())),
            name=validated_data.get("name", "domain"),
            tiling=validated_data["tiling"],
        )
