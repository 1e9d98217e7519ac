from rest_framework import serializers


class ComplexEntryField(serializers.ListField):
    """One matrix entry as ``[re, im]``."""

    child = serializers.FloatField()

    def __init__(self, **kwargs):
        kwargs.setdefault("min_length", 2)
        kwargs.setdefault("max_length", 2)
        super().__init__(**kwargs)


class StateFileSerializer(serializers.Serializer):
    dims = serializers.ListField(child=serializers.IntegerField(min_value=1), allow_empty=False)
    matrix = serializers.ListField(
        child=serializers.ListField(child=ComplexEntryField(), allow_empty=False),
        allow_empty=False,
    )

    def validate_matrix(self, rows):
        widths = {len(row) for row in rows}
        if len(widths) != 1:
            raise serializers.ValidationError("All matrix rows must have the same length.")
        return rows


class ParamPairSerializer(serializers.Serializer):
    mu = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    nu = serializers.ListField(child=serializers.FloatField(), allow_empty=False)


class ReportSerializer(serializers.Serializer):
    """CriterionReport and BoundReport share one shape, tagged by ``kind``."""

    KIND_CHOICES = ["criterion", "bound"]
    VERDICT_CHOICES = ["ENTANGLED", "INCONCLUSIVE"]

    kind = serializers.ChoiceField(choices=KIND_CHOICES)
    name = serializers.CharField()
    lhs = serializers.FloatField()
    rhs = serializers.FloatField()
    margin = serializers.FloatField()
    verdict = serializers.ChoiceField(choices=VERDICT_CHOICES, allow_null=True)
    tau = serializers.FloatField(allow_null=True)
    bound = serializers.FloatField(allow_null=True)
    d = serializers.IntegerField(allow_null=True)
    vacuous = serializers.BooleanField(allow_null=True)
    params = ParamPairSerializer(allow_null=True)

    def validate(self, attrs):
        if attrs["kind"] == "criterion" and attrs["verdict"] is None:
            raise serializers.ValidationError({"verdict": "Criterion reports need a verdict."})
        if attrs["kind"] == "bound" and attrs["bound"] is None:
            raise serializers.ValidationError({"bound": "Bound reports need a bound value."})
        return attrs


class ThresholdSerializer(serializers.Serializer):
    family = serializers.CharField()
    criterion = serializers.CharField()
    threshold = serializers.FloatField()
    lo = serializers.FloatField()
    hi = serializers.FloatField()
    scan_lo = serializers.FloatField()
    scan_hi = serializers.FloatField()
    iterations = serializers.IntegerField(min_value=0)
    direction = serializers.ChoiceField(choices=["up", "down"])
    lo_margin = serializers.FloatField()
    hi_margin = serializers.FloatField()


class OptimizationSerializer(serializers.Serializer):
    best = ParamPairSerializer()
    norms = serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2)
    margin = serializers.FloatField()
    evaluations = serializers.IntegerField(min_value=0)
    timed_out = serializers.BooleanField()
    trace = serializers.ListField(child=serializers.ListField(child=serializers.FloatField(), min_length=2,
                                                              max_length=2))


class ReproductionRowSerializer(serializers.Serializer):
    example = serializers.IntegerField(min_value=1)
    key = serializers.CharField()
    label = serializers.CharField()
    paper = serializers.FloatField()
    computed = serializers.FloatField(allow_null=True)
    delta = serializers.FloatField(allow_null=True)
    tol = serializers.FloatField()
    ok = serializers.BooleanField(allow_null=True)
    informational = serializers.BooleanField()
    location = serializers.CharField()
    note = serializers.CharField(allow_blank=True)


class OrderingSerializer(serializers.Serializer):
    example = serializers.IntegerField(min_value=1)
    left = serializers.CharField()
    relation = serializers.ChoiceField(choices=["<", ">"])
    right = serializers.CharField()
    left_value = serializers.FloatField()
    right_value = serializers.FloatField()
    ok = serializers.BooleanField()


class RunReportSerializer(serializers.Serializer):
    command = serializers.CharField()
    digest = serializers.CharField(allow_blank=True)
    reports = ReportSerializer(many=True)
    thresholds = ThresholdSerializer(many=True)
    optimization = OptimizationSerializer(allow_null=True)
    reproduction = ReproductionRowSerializer(many=True)
    orderings = OrderingSerializer(many=True)
    warnings = serializers.ListField(child=serializers.CharField())
    wall_time = serializers.FloatField(min_value=0)


class ReferenceCheckSerializer(serializers.Serializer):
    """One entry of the reference-value data file."""

    COMPUTE_KINDS = ["threshold", "bound", "closed_form", "reference"]

    key = serializers.CharField()
    label = serializers.CharField()
    value = serializers.FloatField(required=False, allow_null=True, default=None)
    tol = serializers.FloatField(min_value=0)
    location = serializers.CharField()
    note = serializers.CharField(required=False, allow_blank=True, default="")
    informational = serializers.BooleanField(required=False, default=False)
    compute = serializers.DictField()

    def validate_compute(self, compute):
        kind = compute.get("kind")
        if kind not in self.COMPUTE_KINDS:
            raise serializers.ValidationError(f"compute.kind must be one of {self.COMPUTE_KINDS}, got {kind!r}.")
        return compute

    def validate(self, attrs):
        # closed-form rows take their reference value from the formula itself
        if attrs["value"] is None and attrs["compute"]["kind"] != "closed_form":
            raise serializers.ValidationError({"value": "A reference value is required."})
        return attrs


class ReferenceExampleSerializer(serializers.Serializer):
    example = serializers.IntegerField(min_value=1)
    title = serializers.CharField()
    checks = ReferenceCheckSerializer(many=True)
    orderings = serializers.ListField(
        child=serializers.ListField(child=serializers.CharField(), min_length=3, max_length=3),
        required=False,
        default=list,
    )
    warnings = serializers.ListField(child=serializers.CharField(), required=False, default=list)


class ReferenceValuesSerializer(serializers.Serializer):
    version = serializers.IntegerField(min_value=1)
    examples = ReferenceExampleSerializer(many=True)
