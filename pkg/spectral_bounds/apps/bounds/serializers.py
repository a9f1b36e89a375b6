"""
Bounds app serializers.
"""
import math

from rest_framework import serializers


class CsvFloatField(serializers.FloatField):
    """Shortest round-trip float text; undefined (NaN) values become an empty cell."""

    def to_representation(self, value):
        value = float(value)
        if math.isnan(value):
            return ""
        return repr(value)


class ViolationsField(serializers.Field):
    def to_representation(self, value):
        return ";".join(value)


class BoundReportSerializer(serializers.Serializer):
    """Serializer for one CSV row of a verify run."""

    k = serializers.IntegerField()
    lambda_k = CsvFloatField()
    avg_k = CsvFloatField()
    weyl_kth = CsvFloatField()
    weyl_avg = CsvFloatField()
    polya = CsvFloatField()
    liyau_avg = CsvFloatField()
    liyau_kth = CsvFloatField()
    melas = CsvFloatField()
    theorem1 = CsvFloatField()
    corollary1 = CsvFloatField()
    theta = serializers.IntegerField()
    epsilon = CsvFloatField()
    violations = ViolationsField()

